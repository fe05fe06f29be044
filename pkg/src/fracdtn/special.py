"""
Complex-parameter special functions.

Gamma via a Lanczos rational approximation (g = 7, nine coefficients) with
the reflection formula for Re z < 1/2, the principal branch power, and the
modified Bessel functions I and K of complex order from the ascending series.

Everything here works on Python complex scalars; callers vectorize with loops
or ``np.vectorize`` where needed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import ConvergenceError, DomainError

__all__ = [
    "FractionalOrder",
    "principal_power",
    "gamma",
    "rgamma",
    "bessel_i",
    "bessel_k",
    "bessel_k_integral",
    "c_alpha",
    "SERIES_RADIUS",
]

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

SERIES_RADIUS = 30.0
SERIES_MAX_TERMS = 400
SERIES_RTOL = 1e-16


def _check_finite(z: complex, what: str) -> complex:
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"{what} produced a non-finite value {z!r}")
    return z


def principal_power(z, a) -> complex:
    """z**a on the principal branch, arg z in (-pi, pi).

    Raises DomainError on the closed negative real axis (including 0).
    """
    z = complex(z)
    a = complex(a)
    if z.imag == 0.0 and z.real <= 0.0:
        raise DomainError(f"principal_power undefined for z={z!r} on (-inf, 0]")
    return _check_finite(cmath.exp(a * (math.log(abs(z)) + 1j * cmath.phase(z))), "principal_power")


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _gamma_right(z: complex) -> complex:
    # Lanczos sum, valid for Re z >= 1/2
    z -= 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _SQRT_2PI * cmath.exp((z + 0.5) * cmath.log(t) - t) * acc


def gamma(z) -> complex:
    """Complex gamma function.

    Raises DomainError at the poles 0, -1, -2, ...
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise DomainError(f"gamma has a pole at z={z.real:g}")
    if z.real < 0.5:
        return _check_finite(math.pi / (cmath.sin(math.pi * z) * _gamma_right(1.0 - z)), "gamma")
    return _check_finite(_gamma_right(z), "gamma")


def rgamma(z) -> complex:
    """1/Gamma(z), entire; zero at the non-positive integers."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        return 0j
    if z.real < 0.5:
        return cmath.sin(math.pi * z) * _gamma_right(1.0 - z) / math.pi
    return 1.0 / _gamma_right(z)


def bessel_i(order, z, radius: float = SERIES_RADIUS, max_terms: int = SERIES_MAX_TERMS) -> complex:
    """Modified Bessel function of the first kind from its ascending series.

    sum_k (z/2)**(2k + order) / (k! Gamma(k + order + 1)), truncated once a
    term drops below 1e-16 of the partial sum.
    """
    nu = complex(order)
    z = complex(z)
    if _is_nonpositive_integer(nu) and nu != 0:
        raise DomainError(f"bessel_i: negative integer order {nu.real:g} is not supported")
    if abs(z) > radius:
        raise DomainError(f"bessel_i: |z|={abs(z):.3g} exceeds the series radius {radius:g}")
    if z == 0:
        if nu == 0:
            return 1.0 + 0j
        if nu.real > 0:
            return 0j
        raise DomainError("bessel_i: z=0 with Re(order) <= 0 is singular")

    half = z / 2.0
    # (z/2)**order; z = -|z| keeps the standard branch via cmath.log
    term = cmath.exp(nu * cmath.log(half)) * rgamma(nu + 1.0)
    q = half * half
    total = term
    for k in range(1, max_terms):
        term = term * q / (k * (k + nu))
        total += term
        # terms grow until k(k+nu) exceeds |z/2|^2
        if k * k > abs(q) and abs(term) <= SERIES_RTOL * abs(total):
            return _check_finite(total, "bessel_i")
    raise ConvergenceError(f"bessel_i: series did not converge in {max_terms} terms (z={z!r})")


def bessel_k(order, z, radius: float = SERIES_RADIUS, max_terms: int = SERIES_MAX_TERMS) -> complex:
    """K_order(z) = pi / (2 sin(order pi)) * (I_{-order}(z) - I_order(z)).

    Non-integer order only. The I-difference cancels for large |z|; the
    result keeps roughly 16 - 0.87|z| significant digits.
    """
    nu = complex(order)
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0:
        raise DomainError(f"bessel_k undefined for z={z!r} on (-inf, 0]")
    s = cmath.sin(math.pi * nu)
    if abs(s) < 1e-8:
        raise DomainError(f"bessel_k: order {nu!r} is (nearly) an integer")
    diff = bessel_i(-nu, z, radius, max_terms) - bessel_i(nu, z, radius, max_terms)
    return _check_finite(math.pi / (2.0 * s) * diff, "bessel_k")


def bessel_k_integral(order, z, tol: float = 1e-12) -> complex:
    """K_order(z) from 0.5 (z/2)^order int_0^inf r^(-order-1) exp(-r - z^2/(4r)) dr.

    An independent route to ``bessel_k`` for |arg z| < pi/4, where the
    integral converges; evaluated with the exponential-map trapezoid rule.
    """
    import numpy as np

    from .quadrature import adaptive_exp_map

    nu = complex(order)
    z = complex(z)
    q = z * z / 4.0
    if z == 0 or q.real <= 0.0:
        raise DomainError(f"bessel_k_integral needs |arg z| < pi/4, got z={z!r}")
    # e^{-r} and e^{-Re(q)/r} drop below 1e-300 outside this window
    hi = math.log(700.0 + 2.0 * abs(nu.real))
    lo = min(math.log(q.real / (700.0 + 2.0 * abs(nu.real))), -1.0)

    res = adaptive_exp_map(
        lambda u: np.ones_like(u, dtype=complex),
        lambda r: np.exp(-nu * np.log(r) - r - q / r),
        lo,
        max(hi, 1.0),
        tol,
        norm=lambda v: float(abs(v)),
        h0=0.5,
    )
    return _check_finite(0.5 * principal_power(z / 2.0, nu) * complex(res.value), "bessel_k_integral")


def c_alpha(alpha) -> complex:
    """Gamma(1 - alpha) / (2**(2 alpha - 1) Gamma(alpha))."""
    a = complex(alpha)
    return gamma(1.0 - a) / (cmath.exp((2.0 * a - 1.0) * math.log(2.0)) * gamma(a))


@dataclass(frozen=True)
class FractionalOrder:
    """Exponent alpha with 0 < Re alpha < 1 and its derived constants."""

    alpha: complex
    sin_pi_alpha: complex = field(init=False, repr=False)
    c_alpha: complex = field(init=False, repr=False)

    def __post_init__(self):
        a = complex(self.alpha)
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise DomainError(f"alpha must be finite, got {a!r}")
        if not 0.0 < a.real < 1.0:
            raise DomainError(f"need 0 < Re(alpha) < 1, got alpha={a!r}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "sin_pi_alpha", cmath.sin(math.pi * a))
        object.__setattr__(self, "c_alpha", c_alpha(a))

    @classmethod
    def coerce(cls, value) -> "FractionalOrder":
        return value if isinstance(value, cls) else cls(complex(value))

    @property
    def re(self) -> float:
        return self.alpha.real

    @property
    def is_real(self) -> bool:
        return self.alpha.imag == 0.0
