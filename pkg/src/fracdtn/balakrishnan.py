"""
Fractional powers through the Balakrishnan integral

    J x = sin(alpha pi)/pi * int_0^inf t^(alpha-1) (t + A)^{-1} A x dt

and through the shift limit (A + eps)^alpha x, eps -> 0+.

The integral is split at t = 1.  On the head the integrand is evaluated as
x - t (t + A)^{-1} x, which stays accurate when A is singular and t is tiny;
on the tail as (t + A)^{-1} A x, which avoids the cancellation of the head
form as t grows.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError
from .operators import OperatorHandle
from .quadrature import QuadratureRule, adaptive_exp_map
from .special import FractionalOrder

ROUTES = ("balakrishnan", "shifted_limit", "spectral_oracle", "dtn")
DEFAULT_EPS = tuple(2.0 ** -j for j in range(2, 13))


@dataclass(frozen=True)
class PowerResult:
    value: np.ndarray
    est_error: float
    node_count_used: int
    route: str
    fitted_exponent: float | None = None
    history: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.route not in ROUTES:
            raise ValueError(f"unknown route {self.route!r}")
        if not self.est_error >= 0:
            raise ValueError("est_error must be non-negative")


U_FLOOR = -700.0  # exp(u) stays a normal double above this


def _window(a: float, m: float, ratio_ax: float, delta: float) -> tuple[float, float]:
    # head: |e^{alpha u} F| <= (M+1) e^{a u};  tail: <= M ratio_ax e^{(a-1) u}
    lo = math.log(delta * a / (m + 1.0)) / a
    hi = math.log(max(m * ratio_ax, 1e-300) / (delta * (1.0 - a))) / (1.0 - a)
    return max(min(lo, -1.0), U_FLOOR), min(max(hi, 1.0), -U_FLOOR)


def _tails(alpha: complex) -> tuple[complex, complex]:
    # beyond the window F(t) is nearly constant (t -> 0) or nearly c/t (t -> inf),
    # so the summands e^{alpha u} F(e^u) continue geometrically
    return alpha, alpha - 1.0


def _weight(alpha: complex):
    return lambda u: np.exp(alpha * u)


def balakrishnan_rule(order, lo: float, hi: float, h: float) -> QuadratureRule:
    """A fixed split-at-one rule for int_0^inf t^(alpha-1) F(t) dt."""
    alpha = FractionalOrder.coerce(order).alpha
    k = np.arange(math.ceil(lo / h), math.floor(hi / h) + 1)
    u = k * h
    return QuadratureRule(np.exp(u), h * np.exp(alpha * u), "split_at_one")


def _scalar_m(z: complex) -> float:
    # sup_t |t/(t+z)| over t > 0
    phi = abs(cmath.phase(z))
    return 1.0 if phi <= math.pi / 2 else 1.0 / math.sin(phi)


def scalar_balakrishnan(z, order, rule: QuadratureRule | None = None, tol: float = 1e-13) -> complex:
    """Quadrature of sin(alpha pi)/pi int_0^inf t^(alpha-1) z/(t+z) dt.

    Equals the principal power z**alpha for |arg z| < pi.  Without an
    explicit ``rule`` the nested adaptive rule is used.
    """
    ord_ = FractionalOrder.coerce(order)
    z = complex(z)
    if z == 0 or (z.imag == 0 and z.real < 0):
        raise DomainError(f"scalar_balakrishnan needs |arg z| < pi, got z={z!r}")

    def func(t):
        return z / (t + z)

    pref = ord_.sin_pi_alpha / math.pi
    if rule is not None:
        return complex(pref * rule.apply(func(rule.nodes)))
    a = ord_.re
    lo, hi = _window(a, _scalar_m(z), abs(z), 1e-3 * tol * min(1.0, abs(z) ** a))
    res = adaptive_exp_map(_weight(ord_.alpha), func, lo, hi, tol, norm=lambda v: float(abs(v)), h0=1.0,
                           tails=_tails(ord_.alpha))
    return complex(pref * res.value)


def balakrishnan_power(op: OperatorHandle, order, x, tol: float = 1e-10) -> PowerResult:
    """A^alpha x by adaptive quadrature of the Balakrishnan integral."""
    ord_ = FractionalOrder.coerce(order)
    x = op._vec(x)
    ax = op.apply(x)
    nx, nax = op.norm(x), op.norm(ax)
    if nax == 0.0:
        return PowerResult(np.zeros_like(x), 0.0, 0, "balakrishnan")
    a = ord_.re
    m = op.m_bound
    ratio = nax / nx
    delta = 1e-3 * tol * min(1.0, ratio**a)
    lo, hi = _window(a, m, ratio, delta)

    def func(t):
        out = np.empty((t.size, op.dim), dtype=complex)
        head = t < 1.0
        if np.any(head):
            th = t[head]
            out[head] = x[None, :] - th[:, None] * op.resolve_many(th, x)
        if np.any(~head):
            out[~head] = op.resolve_many(t[~head], ax)
        return out

    res = adaptive_exp_map(_weight(ord_.alpha), func, lo, hi, tol, norm=op.norm, h0=1.0, tails=_tails(ord_.alpha))
    pref = ord_.sin_pi_alpha / math.pi
    est = abs(pref) * res.est_error
    return PowerResult(pref * res.value, est, res.rule.node_count, "balakrishnan")


def _aitken(v0: np.ndarray, v1: np.ndarray, v2: np.ndarray, noise: float) -> np.ndarray:
    d1 = v1 - v0
    d2 = v2 - v1
    den = d2 - d1
    out = v2.copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.abs(d2) / np.abs(d1)
        ok = (np.abs(den) > noise) & (np.abs(d1) > noise) & (q < 0.99)
        out[ok] = v2[ok] - d2[ok] ** 2 / den[ok]
    return out


def _decay_exponent(eps: np.ndarray, errs: np.ndarray, floor: float) -> float | None:
    use = errs > floor
    if np.sum(use) < 2:
        return None
    slope, _ = np.polyfit(np.log(eps[use]), np.log(errs[use]), 1)
    return float(slope)


def shifted_power(op: OperatorHandle, order, x, eps_sequence=None, tol: float = 1e-6,
                  inner_tol: float | None = None) -> PowerResult:
    """A^alpha x as the limit of (A + eps)^alpha x along a decreasing eps sequence.

    Along eps_j = eps_0 2^-j the error is a sum of geometric sequences in j
    (powers eps, eps^2, eps^alpha, ...), so the values are accelerated with
    iterated componentwise Aitken delta-squared steps; the limit is declared
    once two successive deepest estimates differ by at most ``tol`` relative.  The decay
    exponent of ||(A + eps)^alpha x - limit|| is fitted afterwards.
    """
    ord_ = FractionalOrder.coerce(order)
    x = op._vec(x)
    eps = np.asarray(DEFAULT_EPS if eps_sequence is None else eps_sequence, dtype=float)
    if eps.size < 3 or np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise DomainError("eps_sequence needs at least 3 strictly decreasing positive values")
    inner = min(1e-3 * tol, 1e-10) if inner_tol is None else inner_tol
    # table[k] holds the k-times accelerated sequence; each new value extends every level
    table: list[list[np.ndarray]] = [[]]
    values, nodes = table[0], 0
    nx = op.norm(x)
    last_diff = math.inf
    limit = prev = None
    for e in eps:
        r = balakrishnan_power(op.shifted(float(e)), ord_, x, tol=inner)
        values.append(r.value)
        nodes += r.node_count_used
        noise = 100.0 * inner * max(nx, op.norm(r.value))
        k = 0
        while len(table[k]) >= 3:
            if k + 1 == len(table):
                table.append([])
            a0, a1, a2 = table[k][-3:]
            table[k + 1].append(_aitken(a0, a1, a2, noise))
            if len(table[k + 1]) < len(table[k]) - 2:
                break
            k += 1
        if len(values) < 3:
            continue
        est = table[-1][-1]
        if prev is not None:
            last_diff = op.norm(est - prev)
            if last_diff <= tol * max(op.norm(est), 1e-3 * nx):
                limit = est
                break
        prev = est
    if limit is None:
        raise ConvergenceError(
            f"shift limit did not settle: last accelerated difference {last_diff:.3g} > tol={tol:g}"
        )
    used = eps[: len(values)]
    errs = np.array([op.norm(v - limit) for v in values])
    expo = _decay_exponent(used, errs, floor=100.0 * inner * max(nx, op.norm(limit)) + last_diff)
    return PowerResult(limit, float(last_diff), nodes, "shifted_limit", fitted_exponent=expo,
                       history=tuple(zip(used.tolist(), errs.tolist())))
