"""
The extension U(t)x, its t-derivative, and the Dirichlet-to-Neumann limit.

All integrals are taken in the variable s = t^2/(4r) of the subordination
formula

    U(t)x = 1/Gamma(alpha) int_0^inf s^(alpha-1) e^(-s) T(t^2/(4s)) x ds,

with T(r) = exp(-rA).  Differentiating in t and substituting the same way
gives

    U'(t)x = 2/(t Gamma(alpha)) int_0^inf s^(alpha-1) (alpha - s) e^(-s) T(t^2/(4s)) x ds.

Both weights s^(alpha-1) e^(-s) and s^(alpha-1) (alpha - s) e^(-s) have known
moments (Gamma(alpha) and 0), so every integral is evaluated against
T(r)x - x instead of T(r)x.  That keeps U(t)x - x and t^(1-2 alpha) U'(t)x
accurate as t -> 0+, where the raw integrals cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .balakrishnan import balakrishnan_power
from .errors import CrossCheckError, DomainError, FitError
from .operators import OperatorHandle
from .quadrature import adaptive_exp_map
from .special import FractionalOrder, gamma

FD_REL_STEP = 1e-4
FD_FLOOR = 1e-6
RE_ALPHA_GUARD = 0.9
DTN_TOL = 1e-4
MIN_T = 1e-100  # below this t^2 / (4 s) leaves the double range on the quadrature window


@dataclass(frozen=True)
class ExtensionTrace:
    t_grid: np.ndarray
    u_values: np.ndarray
    du_values: np.ndarray
    quad_errors: np.ndarray

    def __post_init__(self):
        n = len(self.t_grid)
        if not (len(self.u_values) == len(self.du_values) == len(self.quad_errors) == n):
            raise ValueError("trace arrays must have equal length")
        t = np.asarray(self.t_grid)
        if n > 1:
            q = t[1:] / t[:-1]
            if np.any(q >= 1) or not np.allclose(q, q[0], rtol=1e-12):
                raise ValueError("t_grid must be strictly decreasing with constant ratio")


@dataclass(frozen=True)
class DtnReport:
    extrapolated_limit: np.ndarray
    reference: np.ndarray
    fitted_exponent: float | None
    rel_error: float
    passed: bool
    tolerance: float
    t_samples: np.ndarray = field(repr=False)
    phi_samples: np.ndarray = field(repr=False)
    quad_errors: np.ndarray = field(repr=False)
    fit_exponent_model: float = 0.0


def _decay_time(op: OperatorHandle, x: np.ndarray, level: float) -> float | None:
    """Some r with ||T(r')x|| <= level for all r' >= r, or None (kernel component)."""
    r = 1.0 / max(op.operator_norm, 1e-300)
    tx = op.semigroup(r, x)
    for _ in range(40):
        if op.norm(tx) * op.m_bound <= level:
            return r
        tx = op.semigroup(r, tx)
        r *= 2.0
    return None


def _s_integrals(op: OperatorHandle, ord_: FractionalOrder, x: np.ndarray, t: float, coeffs, tol: float):
    """int s^(alpha-1) p_k(s) e^(-s) (T(t^2/4s)x - x) ds for polynomials p_k.

    ``coeffs`` lists the coefficient tuples (c_0, c_1, ...) of each p_k in
    powers of s; returns (values of shape (K, n), est_error).
    """
    alpha = ord_.alpha
    a = ord_.re
    m = op.m_bound
    kmax = max(len(c) for c in coeffs) - 1
    nx = op.norm(x)
    nax = op.norm(op.apply(x))
    if nax == 0.0:
        # T(r)x = x for every r, so every integrand vanishes
        return np.zeros((len(coeffs), op.dim), dtype=complex), 0.0
    ax_ratio = nax / nx
    delta = 1e-3 * tol * min(1.0, ax_ratio**a)
    # |integrand| <= (M+1)|x| p(s) s^a e^{-s}: right end is doubly exponential in v = log s
    hi = 1.0
    while (a + kmax) * hi - math.exp(hi) + math.log((m + 1.0) * 4.0) > math.log(delta):
        hi += 0.25
    t2 = t * t
    # moments int s^(alpha-1) p_k(s) e^(-s) ds
    moments = np.array([sum(c * gamma(alpha + j) for j, c in enumerate(cs)) for cs in coeffs])
    scale_t = min(t, 1.0) ** (2.0 * a)
    r_star = _decay_time(op, x, delta * a * scale_t * nx)
    if r_star is not None:
        # T(r)x is negligible for v below log(t^2 / 4 r*): integrate T(r)x alone
        # on the short window and subtract the moments exactly
        lo = min(math.log(t2 / (4.0 * r_star)), -1.0)

        def func(s):
            tx = op.semigroup_many(t2 / (4.0 * s), x)
            return np.stack([np.polyval(cs[::-1], s)[:, None] * tx for cs in coeffs], axis=1)

        offset = moments[:, None] * x[None, :]
    else:
        lo = min(math.log(delta * a / (m + 1.0)) / a + 2.0 * min(math.log(t), 0.0), -1.0)

        def func(s):
            tx = op.semigroup_many(t2 / (4.0 * s), x) - x[None, :]
            return np.stack([np.polyval(cs[::-1], s)[:, None] * tx for cs in coeffs], axis=1)

        offset = None

    def norm(v):
        return max(op.norm(row) for row in v)

    # roundoff of a sum whose terms are O((M+1)|x| Gamma(a+k))
    floor = 1e-15 * (m + 1.0) * nx * (math.gamma(a) + math.gamma(a + kmax))
    res = adaptive_exp_map(lambda v: np.exp(alpha * v - np.exp(v)), func, lo, hi, tol, norm,
                           h0=0.5, transform="laguerre_weighted", abs_floor=floor, offset=offset)
    value = res.value if offset is None else res.value - offset
    return value, res.est_error


def _check_t(t: float, allow_zero: bool = False):
    if allow_zero and t == 0:
        return
    if not math.isfinite(t) or not t >= MIN_T:
        raise DomainError(f"need t >= {MIN_T:g} (or t = 0 where allowed), got t={t!r}")


def _value(op, ord_, x, t, tol):
    vals, err = _s_integrals(op, ord_, x, t, [(1.0,)], tol)
    g = gamma(ord_.alpha)
    return x + vals[0] / g, err / abs(g)


def _derivative(op, ord_, x, t, tol):
    alpha = ord_.alpha
    vals, err = _s_integrals(op, ord_, x, t, [(alpha, -1.0)], tol)
    pref = 2.0 / (t * gamma(alpha))
    return pref * vals[0], abs(pref) * err


def extension_value(op: OperatorHandle, order, x, t: float, tol: float = 1e-10) -> np.ndarray:
    """U(t)x; U(0)x = x."""
    ord_ = FractionalOrder.coerce(order)
    x = op._vec(x)
    _check_t(t, allow_zero=True)
    if t == 0:
        return x.copy()
    return _value(op, ord_, x, t, tol)[0]


def extension_derivative_with_error(op: OperatorHandle, order, x, t: float, tol: float = 1e-10):
    """U'(t)x and its error budget, cross-checked by a central difference of U."""
    ord_ = FractionalOrder.coerce(order)
    x = op._vec(x)
    _check_t(t)
    du, err = _derivative(op, ord_, x, t, tol)
    h = FD_REL_STEP * t
    inner = min(tol, 1e-13)
    up, e1 = _value(op, ord_, x, t + h, inner)
    dn, e2 = _value(op, ord_, x, t - h, inner)
    fd = (up - dn) / (2.0 * h)
    disc = op.norm(fd - du)
    scale = max(op.norm(du), op.norm(x) / t)
    if disc > 100.0 * max(tol, FD_FLOOR) * scale:
        raise CrossCheckError(
            f"U'(t) at t={t:g}: analytic and finite-difference values differ by {disc:.3g} (scale {scale:.3g})"
        )
    return du, err + disc


def extension_derivative(op: OperatorHandle, order, x, t: float, tol: float = 1e-10) -> np.ndarray:
    """U'(t)x for t > 0."""
    return extension_derivative_with_error(op, order, x, t, tol)[0]


def extension_second_derivative(op: OperatorHandle, order, x, t: float, tol: float = 1e-12):
    """(u, u', u'') at t from the moment form of g, g', g''.

    With S_k = int s^(alpha+k-1) e^(-s) T(t^2/4s) x ds and
    g = t^(2 alpha) int e^(-t^2/4r) r^(-alpha-1) T(r)x dr:

        g   = 4^alpha S_0
        G_1 = t^(2 alpha) int f/r dr   = 4^(alpha+1) t^-2 S_1
        G_2 = t^(2 alpha) int f/r^2 dr = 4^(alpha+2) t^-4 S_2
        g'  = (2 alpha/t) g - (t/2) G_1
        g'' = -(2 alpha/t^2) g + (2 alpha/t) g' - alpha G_1 - G_1/2 + (t^2/4) G_2
    """
    ord_ = FractionalOrder.coerce(order)
    x = op._vec(x)
    _check_t(t)
    alpha = ord_.alpha
    vals, err = _s_integrals(op, ord_, x, t, [(1.0,), (0.0, 1.0), (0.0, 0.0, 1.0)], tol)
    s0 = gamma(alpha) * x + vals[0]
    s1 = gamma(alpha + 1.0) * x + vals[1]
    s2 = gamma(alpha + 2.0) * x + vals[2]
    four_a = 4.0**alpha
    g = four_a * s0
    g1 = 4.0 * four_a * s1 / t**2
    g2 = 16.0 * four_a * s2 / t**4
    dg = (2.0 * alpha / t) * g - (t / 2.0) * g1
    ddg = -(2.0 * alpha / t**2) * g + (2.0 * alpha / t) * dg - alpha * g1 - 0.5 * g1 + (t**2 / 4.0) * g2
    p = 1.0 / (gamma(alpha) * four_a)
    return p * g, p * dg, p * ddg, err


def ode_residual(op: OperatorHandle, order, x, t: float, tol: float = 1e-12) -> float:
    """||u'' + (1-2 alpha)/t u' - A u|| / max(||A u||, ||x||)."""
    ord_ = FractionalOrder.coerce(order)
    x = op._vec(x)
    u, du, ddu, _ = extension_second_derivative(op, ord_, x, t, tol)
    au = op.apply(u)
    res = ddu + (1.0 - 2.0 * ord_.alpha) / t * du - au
    return op.norm(res) / max(op.norm(au), op.norm(x), 1e-300)


def extension_trace(op: OperatorHandle, order, x, t0: float = 1.0, ratio: float = 0.5, steps: int = 8,
                    tol: float = 1e-10) -> ExtensionTrace:
    """U(t)x and U'(t)x on t_k = t0 ratio^k, k = 0..steps-1."""
    ord_ = FractionalOrder.coerce(order)
    x = op._vec(x)
    if not (t0 > 0 and 0 < ratio < 1 and steps >= 1):
        raise DomainError("need t0 > 0, 0 < ratio < 1, steps >= 1")
    ts = t0 * ratio ** np.arange(steps)
    us, dus, errs = [], [], []
    for t in ts:
        u, eu = _value(op, ord_, x, float(t), tol)
        du, ed = extension_derivative_with_error(op, ord_, x, float(t), tol)
        us.append(u)
        dus.append(du)
        errs.append(eu + ed)
    return ExtensionTrace(ts, np.array(us), np.array(dus), np.array(errs))


def fit_limit(ts: np.ndarray, values: np.ndarray, exponent: complex):
    """Least-squares fit of values(t) ~ L + C t^exponent; returns (L, C).

    ``values`` has shape (len(ts), n); complex entries and a complex
    exponent are fitted directly.
    """
    ts = np.asarray(ts, dtype=float)
    design = np.column_stack([np.ones(ts.size), np.exp(complex(exponent) * np.log(ts))])
    coef, *_ = np.linalg.lstsq(design, values.astype(complex), rcond=None)
    return coef[0], coef[1]


def fit_limit_corrected(ts: np.ndarray, values: np.ndarray, exponent: complex, min_gap: float = 0.2):
    """Fit values(t) ~ L + C t^exponent + D t^2 and return L.

    The t^2 column is dropped when the exponent comes within ``min_gap`` of 2,
    where the two columns are nearly collinear.
    """
    ts = np.asarray(ts, dtype=float)
    cols = [np.ones(ts.size), np.exp(complex(exponent) * np.log(ts))]
    if abs(complex(exponent) - 2.0) >= min_gap and ts.size >= 4:
        cols.append(ts**2)
    coef, *_ = np.linalg.lstsq(np.column_stack(cols), values.astype(complex), rcond=None)
    return coef[0]


def fit_rate(ts: np.ndarray, errors: np.ndarray, floor: float = 0.0) -> float | None:
    """Slope of log(error) against log(t) over the samples above ``floor``."""
    use = errors > floor
    if np.sum(use) < 2:
        return None
    slope, _ = np.polyfit(np.log(ts[use]), np.log(errors[use]), 1)
    return float(slope)


def default_t0(op: OperatorHandle) -> float:
    """Largest sample point for the DtN fit: t0 sqrt(||A||) = 2^-8.

    The single-term model misses a t^2 correction; its bias on the limit is
    about t0^2 ||A||, so t0 has to shrink with the operator scale.
    """
    return 2.0**-8 / math.sqrt(max(op.operator_norm, 1.0))


def dtn_extract(op: OperatorHandle, order, x, t0: float | None = None, ratio: float = 0.5, steps: int = 8,
                tol: float = 1e-12, dtn_tol: float = DTN_TOL) -> DtnReport:
    """Extrapolate phi(t) = -t^(1-2 alpha) U'(t)x to t = 0 and compare with c_alpha A^alpha x.

    phi is fitted as L + C t^(2 - 2 alpha) on the last max(4, steps-2)
    samples (for complex alpha the correction carries the phase of
    t^(-2i Im alpha)); the reference is c_alpha times the Balakrishnan route.
    ``t0=None`` picks ``default_t0(op)``.
    """
    ord_ = FractionalOrder.coerce(order)
    x = op._vec(x)
    if not 0 < ratio < 1:
        raise DomainError("ratio must lie in (0, 1)")
    if steps < 4:
        raise DomainError("steps must be >= 4")
    if t0 is None:
        t0 = default_t0(op)
    if not t0 > 0:
        raise DomainError("t0 must be positive")
    if ord_.re > RE_ALPHA_GUARD:
        raise DomainError(f"Re(alpha)={ord_.re:g} exceeds the guard {RE_ALPHA_GUARD}; the fit is unreliable")
    alpha = ord_.alpha
    ts = t0 * ratio ** np.arange(steps)
    phis, errs = [], []
    for t in ts:
        t = float(t)
        du, err = extension_derivative_with_error(op, ord_, x, t, tol)
        scale = abs(t ** (1.0 - 2.0 * alpha))
        phis.append(-(t ** (1.0 - 2.0 * alpha)) * du)
        errs.append(scale * err)
    phis = np.array(phis)
    errs = np.array(errs)
    nfit = max(4, steps - 2)
    tf, pf, ef = ts[-nfit:], phis[-nfit:], errs[-nfit:]
    p = 2.0 - 2.0 * ord_.re
    spread = max(op.norm(v - pf[-1]) for v in pf)
    if spread > 0 and ef.max() > 0.1 * spread:
        raise FitError(f"quadrature error {ef.max():.3g} exceeds 10% of the sample spread {spread:.3g}")
    limit = fit_limit_corrected(tf, pf, 2.0 - 2.0 * alpha)
    dev = np.array([op.norm(v - limit) for v in pf])
    expo = fit_rate(tf, dev, floor=10.0 * ef.max() + 1e-14 * op.norm(limit))
    ref = ord_.c_alpha * balakrishnan_power(op, ord_, x, tol=min(tol, 1e-10)).value
    nref = op.norm(ref)
    rel = op.norm(limit - ref) / nref if nref > 0 else op.norm(limit)
    return DtnReport(limit, ref, expo, float(rel), bool(rel <= dtn_tol), dtn_tol, ts, phis, errs, p)
