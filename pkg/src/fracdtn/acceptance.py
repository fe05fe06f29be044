"""
The acceptance suite: fixed-seed checks of every route against its oracle.

Each criterion returns a record with the measured discrepancy, the tolerance
it is held to and the pass flag, so the flag can be recomputed from the
record alone.  Nothing here depends on wall-clock time.
"""

from __future__ import annotations

import cmath
import math
import time
from typing import Callable

import numpy as np

from .balakrishnan import balakrishnan_power, scalar_balakrishnan
from .extension import dtn_extract, extension_value, ode_residual
from .mulop import SymbolGrid, closed_form_extension, shift_decay_exponent, small_t_asymptotics_check
from .operators import OperatorHandle, spectral_function_matrix, spectral_power_oracle
from .report import SCHEMA_VERSION, dumps
from .special import bessel_k, bessel_k_integral, principal_power

SEED = 20240531
REAL_ALPHAS = (0.25, 0.5, 0.75)
COMPLEX_ALPHA = 0.4 + 0.2j


def _rng(k: int) -> np.random.Generator:
    return np.random.default_rng([SEED, k])


def dense_hpd(n: int = 8) -> OperatorHandle:
    """Seeded Hermitian positive definite matrix with spectrum in [0.1, 10]."""
    rng = _rng(0)
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    lam = np.geomspace(0.1, 10.0, n)
    mat = (q * lam) @ q.conj().T
    return OperatorHandle.dense((mat + mat.conj().T) / 2)


def shipped_operators() -> dict[str, OperatorHandle]:
    return {
        "dense_hpd_8": dense_hpd(),
        "laplacian_1d_8": OperatorHandle.laplacian_1d(8, 1.0 / 9.0),
        "jordan_2": OperatorHandle.dense([[1.0, 1.0], [0.0, 1.0]]),
        "multiplication_6": OperatorHandle.multiplication(
            [0.0, 0.5, 1.0 + 1.0j, 4.0, 3.0 * cmath.exp(-0.25j * math.pi), 9.0],
            sector_angle=math.pi / 4,
            points=[0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
        ),
    }


def _random_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def _record(cid: int, name: str, metric: float, tolerance: float, passed: bool, **details) -> dict:
    return {"id": cid, "name": name, "metric": float(metric), "tolerance": float(tolerance),
            "passed": bool(passed), "details": details}


def _max_check(cid: int, name: str, errors: list[float], tol: float, **details) -> dict:
    worst = max(errors)
    return _record(cid, name, worst, tol, worst <= tol, cases=len(errors), **details)


def criterion_1() -> dict:
    rng = _rng(1)
    errs = []
    for alpha in REAL_ALPHAS + (0.3 + 0.2j,):
        mods = np.exp(rng.uniform(math.log(1e-2), math.log(1e2), 50))
        args = rng.uniform(-math.pi / 3, math.pi / 3, 50)
        for r, a in zip(mods, args):
            z = cmath.rect(r, a)
            exact = principal_power(z, alpha)
            errs.append(abs(scalar_balakrishnan(z, alpha) - exact) / abs(exact))
    return _max_check(1, "scalar Balakrishnan identity", errs, 1e-8)


def criterion_2() -> dict:
    rng = _rng(2)
    op = dense_hpd()
    errs = []
    for k in range(10):
        alpha = rng.uniform(0.05, 0.95) + (1j * rng.uniform(-0.5, 0.5) if k % 3 == 2 else 0.0)
        x = _random_vector(rng, op.dim)
        ref = spectral_power_oracle(op, alpha, x)
        val = balakrishnan_power(op, alpha, x, tol=1e-10).value
        errs.append(op.norm(val - ref) / op.norm(ref))
    return _max_check(2, "spectral oracle equivalence", errs, 1e-6)


def criterion_3() -> dict:
    rng = _rng(3)
    op = OperatorHandle.dense([[1.0, 1.0], [0.0, 1.0]])
    nil = np.array([[0.0, 1.0], [0.0, 0.0]])
    errs = []
    for alpha in REAL_ALPHAS + (COMPLEX_ALPHA,):
        for x in ([0.0, 1.0], [1.0, 0.0], _random_vector(rng, 2)):
            x = np.asarray(x, dtype=complex)
            expected = x + alpha * (nil @ x)
            errs.append(op.norm(balakrishnan_power(op, alpha, x, tol=1e-10).value - expected))
    return _max_check(3, "nilpotent exactness", errs, 1e-8)


def criterion_4() -> dict:
    rng = _rng(4)
    errs = []
    for op in (OperatorHandle.laplacian_1d(8, 1.0 / 9.0), dense_hpd()):
        x = _random_vector(rng, op.dim)
        for t in (0.25, 0.5, 1.0, 2.0):
            ref = spectral_function_matrix(op, lambda v, t=t: np.exp(-t * np.sqrt(v.astype(complex)))) @ x
            errs.append(op.norm(extension_value(op, 0.5, x, t) - ref) / op.norm(x))
    return _max_check(4, "alpha = 1/2 semigroup identity", errs, 1e-6)


def criterion_5() -> dict:
    rng = _rng(5)
    errs = []
    for op in shipped_operators().values():
        x = _random_vector(rng, op.dim)
        for alpha in REAL_ALPHAS:
            for k in range(6):
                errs.append(ode_residual(op, alpha, x, 0.05 * 2.0**k))
    return _max_check(5, "ODE residual", errs, 1e-5)


def criterion_6() -> dict:
    rng = _rng(6)
    errs = []
    worst_case = None
    for name, op in shipped_operators().items():
        for alpha in REAL_ALPHAS + (COMPLEX_ALPHA,):
            for _ in range(5):
                x = _random_vector(rng, op.dim)
                rep = dtn_extract(op, alpha, x)
                errs.append(rep.rel_error)
                if rep.rel_error >= max(errs):
                    worst_case = {"operator": name, "alpha": complex(alpha)}
    return _max_check(6, "DtN limit equals c_alpha A^alpha x", errs, 1e-4, worst_case=worst_case)


def criterion_7() -> dict:
    rng = _rng(7)
    op = dense_hpd()
    x = _random_vector(rng, op.dim)
    devs, fitted = [], []
    for alpha in REAL_ALPHAS:
        rep = dtn_extract(op, alpha, x)
        fitted.append(rep.fitted_exponent)
        devs.append(math.inf if rep.fitted_exponent is None else abs(rep.fitted_exponent - (2 - 2 * alpha)))
    return _max_check(7, "DtN error order 2 - 2 alpha", devs, 0.25, fitted_exponents=fitted)


def random_symbol_grid(rng: np.random.Generator, n: int = 5) -> SymbolGrid:
    theta = math.pi / 3
    mods = np.exp(rng.uniform(math.log(0.05), math.log(16.0), n))
    vals = mods * np.exp(1j * rng.uniform(-theta, theta, n))
    return SymbolGrid(np.linspace(0.0, 1.0, n), vals, theta)


def criterion_8() -> dict:
    rng = _rng(8)
    ext_errs, lim_errs = [], []
    for k in range(20):
        sym = random_symbol_grid(rng)
        alpha = rng.uniform(0.1, 0.9) + (0.2j if k % 5 == 4 else 0.0)
        # keep t |f|^(1/2) <= 5, where the Bessel series keeps ~12 digits
        t = rng.uniform(0.05, 5.0 / math.sqrt(np.max(np.abs(sym.values))))
        g = _random_vector(rng, sym.values.size)
        cf = closed_form_extension(sym, alpha, g, t)
        qv = extension_value(sym.operator(), alpha, g, t)
        ext_errs.append(float(np.max(np.abs(cf - qv))) / float(np.max(np.abs(g))))
        rep = small_t_asymptotics_check(sym, alpha, g)
        lim_errs.append(max(rep.boundary_error, rep.dtn_error))
    worst_ext, worst_lim = max(ext_errs), max(lim_errs)
    passed = worst_ext <= 1e-7 and worst_lim <= 1e-5
    return _record(8, "multiplication closed form", worst_ext, 1e-7, passed,
                   limit_error=worst_lim, limit_tolerance=1e-5, cases=20)


def criterion_9() -> dict:
    sym = SymbolGrid([0.0, 0.25, 0.5, 0.75, 1.0], [0.0, 0.25, 1.0, 1.0 + 1.0j, 4.0], math.pi / 4)
    g = np.ones(5, dtype=complex)
    margins, fitted = [], []
    for alpha in (0.3, 0.6):
        slope, _ = shift_decay_exponent(sym, alpha, g)
        fitted.append(slope)
        margins.append((alpha - 0.1) - slope)
    worst = max(margins)
    return _record(9, "shift estimate exponent", worst, 0.0, worst <= 0.0, fitted_exponents=fitted,
                   note="metric is (Re alpha - 0.1) - fitted exponent; pass when <= 0")


BESSEL_PAIRS = (
    (0.3, 1.0), (0.5, 2.0), (0.25, 0.1), (0.75, 3.0), (0.1, 0.5),
    (0.9, 1.5), (0.3 + 0.2j, 1.0), (0.5, 1.0 + 0.3j), (0.4 - 0.1j, 2.0 - 0.5j), (0.6, 4.0),
)


def criterion_10() -> dict:
    errs = []
    for nu, z in BESSEL_PAIRS:
        ref = bessel_k(nu, z)
        errs.append(abs(bessel_k_integral(nu, z) - ref) / abs(ref))
    return _max_check(10, "Bessel K integral identity", errs, 1e-8)


CRITERIA: tuple[Callable[[], dict], ...] = (
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
)


def run_suite(timings: dict | None = None) -> dict:
    """Criteria 1 to 10 as a report dictionary (no wall times inside)."""
    records = []
    for crit in CRITERIA:
        start = time.perf_counter()
        try:
            rec = crit()
        except Exception as exc:  # a numerical failure is a failed criterion, not a crash
            cid = int(crit.__name__.rsplit("_", 1)[1])
            rec = _record(cid, crit.__name__, 0.0, 0.0, False,
                          error=f"{type(exc).__name__}: {exc}")
        if timings is not None:
            timings[rec["id"]] = time.perf_counter() - start
        records.append(rec)
    return {"schema": SCHEMA_VERSION, "command": "selftest", "seed": SEED, "criteria": records,
            "passed": all(r["passed"] for r in records)}


def selftest(timings: dict | None = None) -> dict:
    """The full suite, run twice; criterion 11 compares the two serialized reports byte for byte."""
    first = run_suite(timings)
    second = run_suite()
    same = dumps(first) == dumps(second)
    first["criteria"].append(_record(11, "determinism", 0.0 if same else 1.0, 0.0, same,
                                     note="metric is 1 when two consecutive reports differ"))
    first["passed"] = all(r["passed"] for r in first["criteria"])
    return first
