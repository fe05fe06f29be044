"""
Closed forms for the multiplication operator (A g)(x) = f(x) g(x).

On a finite grid of sample points every statement about sup norms becomes a
max over the grid, and every limit t -> 0+ is checked point by point; no
uniform convergence is claimed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .extension import fit_rate
from .operators import OperatorHandle
from .special import SERIES_RADIUS, FractionalOrder, bessel_k, gamma, principal_power


@dataclass(frozen=True)
class SymbolGrid:
    points: np.ndarray
    values: np.ndarray
    sector_angle: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        vals = np.asarray(self.values, dtype=complex).ravel()
        if pts.shape != vals.shape:
            raise DomainError("points and values must have equal length")
        if not 0.0 <= self.sector_angle <= math.pi / 2 + 1e-15:
            raise DomainError("sector angle must lie in [0, pi/2]")
        nz = vals[vals != 0]
        if np.any(np.abs(np.angle(nz)) > self.sector_angle + 1e-12):
            raise DomainError("a symbol value lies outside the sector")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, f, points, sector_angle: float | None = None) -> "SymbolGrid":
        pts = np.asarray(points, dtype=float)
        vals = np.array([complex(f(p)) for p in pts])
        if sector_angle is None:
            sector_angle = float(np.max(np.abs(np.angle(vals[vals != 0])), initial=0.0))
        return cls(pts, vals, sector_angle)

    def operator(self) -> OperatorHandle:
        return OperatorHandle.multiplication(self.values, self.sector_angle, self.points)

    def shifted(self, eps: float) -> "SymbolGrid":
        return SymbolGrid(self.points, self.values + eps, self.sector_angle)


def _sqrt(f: complex) -> complex:
    return cmath.sqrt(f)


def closed_form_extension(sym: SymbolGrid, order, g, t: float, radius: float = SERIES_RADIUS) -> np.ndarray:
    """u(t, x_i) = 2 g_i / Gamma(alpha) (t sqrt(f_i) / 2)^alpha K_alpha(t sqrt(f_i))."""
    ord_ = FractionalOrder.coerce(order)
    g = np.asarray(g, dtype=complex)
    if not t > 0:
        raise DomainError("closed_form_extension needs t > 0")
    alpha = ord_.alpha
    pref = 2.0 / gamma(alpha)
    out = np.empty(sym.values.shape, dtype=complex)
    for i, (f, gi) in enumerate(zip(sym.values, g)):
        if f == 0:
            out[i] = gi
            continue
        z = t * _sqrt(f)
        out[i] = pref * gi * principal_power(z / 2.0, alpha) * bessel_k(alpha, z, radius)
    return out


def closed_form_derivative(sym: SymbolGrid, order, g, t: float, radius: float = SERIES_RADIUS) -> np.ndarray:
    """d/dt u(t, x_i) from d/dz [z^alpha K_alpha(z)] = -z^alpha K_{1-alpha}(z)."""
    ord_ = FractionalOrder.coerce(order)
    g = np.asarray(g, dtype=complex)
    if not t > 0:
        raise DomainError("closed_form_derivative needs t > 0")
    alpha = ord_.alpha
    pref = -2.0 / gamma(alpha) * 2.0 ** (-alpha)
    out = np.zeros(sym.values.shape, dtype=complex)
    for i, (f, gi) in enumerate(zip(sym.values, g)):
        if f == 0:
            continue
        rf = _sqrt(f)
        z = t * rf
        out[i] = pref * gi * rf * principal_power(z, alpha) * bessel_k(1.0 - alpha, z, radius)
    return out


def closed_form_power(sym: SymbolGrid, order, g) -> np.ndarray:
    """(A^alpha g)(x_i) = f(x_i)^alpha g(x_i), with 0^alpha = 0."""
    alpha = FractionalOrder.coerce(order).alpha
    g = np.asarray(g, dtype=complex)
    return np.array([0j if f == 0 else principal_power(f, alpha) * gi for f, gi in zip(sym.values, g)])


@dataclass(frozen=True)
class AsymptoticsReport:
    t_grid: np.ndarray
    boundary_limit: np.ndarray
    boundary_expected: np.ndarray
    boundary_rates: list
    dtn_limit: np.ndarray
    dtn_expected: np.ndarray
    dtn_rates: list
    boundary_error: float
    dtn_error: float
    tolerance: float
    passed: bool


def _fit_limit2(ts: np.ndarray, values: np.ndarray, exponent: complex) -> np.ndarray:
    # L + C t^exponent + D t^2, the two leading corrections of both expansions
    design = np.column_stack([np.ones(ts.size), np.exp(exponent * np.log(ts)), ts**2])
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    return coef[0]


def default_t_grid(sym: SymbolGrid, steps: int = 8) -> np.ndarray:
    scale = max(float(np.max(np.abs(sym.values))), 1.0)
    return 2.0**-8 / math.sqrt(scale) * 0.5 ** np.arange(steps)


def small_t_asymptotics_check(sym: SymbolGrid, order, g, t_grid=None, tol: float = 1e-5) -> AsymptoticsReport:
    """Pointwise limits of u(t, x_i) and -t^(1-2 alpha) d/dt u(t, x_i) as t -> 0+.

    Both sequences are extrapolated with their leading correction
    (t^(2 alpha) and t^(2 - 2 alpha)) plus a t^2 term, and compared with g(x_i) and
    c_alpha f(x_i)^alpha g(x_i).  Rates are the fitted slopes of the
    deviation moduli; they are None where the tail sits at roundoff.
    """
    ord_ = FractionalOrder.coerce(order)
    alpha = ord_.alpha
    g = np.asarray(g, dtype=complex)
    ts = default_t_grid(sym) if t_grid is None else np.asarray(t_grid, dtype=float)
    if ts.size < 4 or np.any(ts <= 0) or np.any(np.diff(ts) >= 0):
        raise DomainError("t_grid needs at least 4 strictly decreasing positive values")
    us = np.array([closed_form_extension(sym, ord_, g, float(t)) for t in ts])
    phis = np.array([-(t ** (1.0 - 2.0 * alpha)) * closed_form_derivative(sym, ord_, g, float(t)) for t in ts])
    u_lim = _fit_limit2(ts, us, 2.0 * alpha)
    p_lim = _fit_limit2(ts, phis, 2.0 - 2.0 * alpha)
    u_exp = g.copy()
    p_exp = ord_.c_alpha * closed_form_power(sym, ord_, g)
    noise = 1e-13 * max(float(np.max(np.abs(g))), 1e-300)
    u_rates = [fit_rate(ts, np.abs(us[:, i] - u_lim[i]), 10 * noise) for i in range(g.size)]
    p_rates = [fit_rate(ts, np.abs(phis[:, i] - p_lim[i]), 10 * noise * max(1.0, abs(p_exp[i])))
               for i in range(g.size)]
    u_err = float(np.max(np.abs(u_lim - u_exp) / np.maximum(np.abs(u_exp), 1.0)))
    p_err = float(np.max(np.abs(p_lim - p_exp) / np.maximum(np.abs(p_exp), 1.0)))
    return AsymptoticsReport(ts, u_lim, u_exp, u_rates, p_lim, p_exp, p_rates, u_err, p_err, tol,
                             bool(u_err <= tol and p_err <= tol))


def shift_decay_exponent(sym: SymbolGrid, order, g, eps=None) -> tuple[float, np.ndarray]:
    """Fitted slope of max_i |((f_i + eps)^alpha - f_i^alpha) g_i| against eps.

    Returns (exponent, sup-differences).
    """
    eps = np.asarray(2.0 ** -np.arange(2, 13) if eps is None else eps, dtype=float)
    base = closed_form_power(sym, order, g)
    diffs = np.array([np.max(np.abs(closed_form_power(sym.shifted(float(e)), order, g) - base)) for e in eps])
    slope = fit_rate(eps, diffs, floor=1e-14 * max(float(np.max(np.abs(base))), 1.0))
    if slope is None:
        raise DomainError("shift differences are at roundoff; no decay exponent to fit")
    return slope, diffs
