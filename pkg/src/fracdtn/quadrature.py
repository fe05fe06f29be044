"""
Nested exponential-map trapezoidal rules on (0, inf).

With t = exp(u) an integral of t**(alpha-1) F(t) dt becomes a two-sided
integral in u whose integrand decays exponentially at both ends and is
analytic in a strip around the real axis, so the plain trapezoidal rule
converges geometrically in the step size.  This holds for complex alpha too:
the oscillating factor t**(i Im alpha) = exp(i Im(alpha) u) is entire in u.

Levels are nested (every halving of h reuses all old nodes), and the node
u = 0 (t = 1) is always present, which splits the line into head and tail
segments.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError

MAX_NODES_PER_SEGMENT = 2**14


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes t_j > 0 and complex weights w_j with int ~ sum_j w_j F(t_j)."""

    nodes: np.ndarray
    weights: np.ndarray
    transform: str

    def __post_init__(self):
        if self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights must have equal length")
        if self.nodes.size > 1 and np.any(np.diff(self.nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")

    @property
    def node_count(self) -> int:
        return int(self.nodes.size)

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum over the leading axis of ``values``, in node order."""
        return np.tensordot(self.weights, values, axes=(0, 0))


@dataclass(frozen=True)
class QuadResult:
    value: np.ndarray
    est_error: float
    rule: QuadratureRule
    levels: int


def _grid(lo: float, hi: float, h: float, level: int) -> np.ndarray:
    k_lo = math.ceil(lo / h)
    k_hi = math.floor(hi / h)
    k = np.arange(k_lo, k_hi + 1)
    if level > 0:
        k = k[k % 2 != 0]
    return k * h


def adaptive_exp_map(
    weight: Callable[[np.ndarray], np.ndarray],
    func: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    tol: float,
    norm: Callable[[np.ndarray], float],
    h0: float = 1.0,
    min_levels: int = 1,
    transform: str = "split_at_one",
    abs_floor: float = 0.0,
    offset: np.ndarray | None = None,
    max_nodes_per_segment: int = MAX_NODES_PER_SEGMENT,
    tails: tuple = (None, None),
) -> QuadResult:
    """Integrate weight(u) * func(exp(u)) du over [lo, hi] by nested trapezoids.

    ``weight`` maps u to the scalar factor (Jacobian and weight function);
    ``func`` maps the node values t = exp(u) to an array whose leading axis
    indexes the nodes.  Halving stops when two successive levels differ by at
    most ``tol`` relative to the current value, or by at most ``abs_floor``
    (the roundoff level of the sum, below which relative accuracy is moot).
    With ``offset`` the relative test is taken on ``total - offset``, for
    integrals that are only needed after a known constant is subtracted.

    ``tails = (r_lo, r_hi)`` continues the trapezoid sum beyond a window end
    whose summand behaves like s(end) exp(r (u - end)) (Re r_lo > 0 > Re r_hi);
    the geometric series is folded into the end weight as 1 / (1 - exp(-|r| h)).
    The window is then widened to multiples of ``h0`` so both ends stay nodes.
    """
    if not lo < 0 < hi:
        raise ValueError("window must straddle u = 0")
    r_lo, r_hi = tails
    if r_lo is not None or r_hi is not None:
        lo = math.floor(lo / h0) * h0
        hi = math.ceil(hi / h0) * h0
    h = h0
    us = _grid(lo, hi, h, 0)
    w = weight(us)
    vals = func(np.exp(us))
    total_nodes = h * np.tensordot(w, vals, axes=(0, 0))
    s_lo = w[0] * vals[0] if r_lo is not None else 0.0
    s_hi = w[-1] * vals[-1] if r_hi is not None else 0.0

    def tail_factors(step):
        f_lo = 0.0 if r_lo is None else cmath.exp(-r_lo * step) / (1.0 - cmath.exp(-r_lo * step))
        f_hi = 0.0 if r_hi is None else cmath.exp(r_hi * step) / (1.0 - cmath.exp(r_hi * step))
        return f_lo, f_hi

    def with_tails(nodes_sum, step):
        f_lo, f_hi = tail_factors(step)
        return nodes_sum + step * (f_lo * s_lo + f_hi * s_hi)

    total = with_tails(total_nodes, h)
    all_u = [us]
    all_w = [w]
    level = 0
    diff = math.inf
    while True:
        level += 1
        h /= 2.0
        us = _grid(lo, hi, h, level)
        seg = max(int(np.sum(np.concatenate(all_u) < 0)), int(np.sum(np.concatenate(all_u) >= 0)))
        if 2 * seg > max_nodes_per_segment:
            raise ConvergenceError(
                f"quadrature did not reach tol={tol:g} within {max_nodes_per_segment} nodes per segment "
                f"(last difference {diff:.3g})"
            )
        w = weight(us)
        vals = func(np.exp(us))
        total_nodes = total_nodes / 2.0 + h * np.tensordot(w, vals, axes=(0, 0))
        new_total = with_tails(total_nodes, h)
        all_u.append(us)
        all_w.append(w)
        diff = norm(new_total - total)
        total = new_total
        ref = total if offset is None else total - offset
        if level >= min_levels and diff <= max(tol * norm(ref), abs_floor):
            break
    u_all = np.concatenate(all_u)
    w_all = np.concatenate(all_w) * h
    order = np.argsort(u_all)
    w_sorted = w_all[order].astype(complex)
    f_lo, f_hi = tail_factors(h)
    w_sorted[0] *= 1.0 + f_lo
    w_sorted[-1] *= 1.0 + f_hi
    rule = QuadratureRule(np.exp(u_all[order]), w_sorted, transform)
    return QuadResult(total, float(diff), rule, level)
