"""
Finite-dimensional non-negative operators.

Three realizations share one handle type:

* ``dense_matrix``  -- an arbitrary square matrix, Euclidean norm;
* ``laplacian_1d``  -- the Dirichlet second-difference matrix h**-2 tridiag(-1, 2, -1);
* ``multiplication`` -- pointwise multiplication by sampled symbol values f(x_i),
  carrying the sup norm (a finite sample of C_b(Omega)).

A non-densely-defined operator cannot live in finite dimensions.  The
multiplication kind with large symbol samples on a truncated grid is the
stand-in for that situation; reports label the truncation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DimensionError, DomainError, NonNegativityError, SingularSystemError
from .expm import expm
from .special import FractionalOrder

KINDS = ("dense_matrix", "laplacian_1d", "multiplication")
NORMS = ("euclidean", "sup")

RESOLVE_RTOL = 1e-10
DEFAULT_LAMBDA_GRID = np.logspace(-4, 4, 40)
ORACLE_MAX_COND = 1e6


@dataclass(frozen=True, eq=False)
class OperatorHandle:
    """Immutable description of a non-negative operator A.

    Use the ``dense``, ``laplacian_1d`` and ``multiplication`` constructors
    rather than instantiating directly.
    """

    kind: str
    data: np.ndarray
    norm_kind: str
    sector_angle: float | None = None
    points: np.ndarray | None = None
    params: dict = field(default_factory=dict)
    nonneg_constant_estimate: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown operator kind {self.kind!r}")
        if self.norm_kind not in NORMS:
            raise DomainError(f"unknown norm {self.norm_kind!r}")
        data = np.array(self.data, dtype=complex)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        if self.kind == "multiplication":
            if data.ndim != 1 or data.size == 0:
                raise DomainError("multiplication symbol must be a non-empty 1-d array")
        elif data.ndim != 2 or data.shape[0] != data.shape[1] or data.shape[0] == 0:
            raise DomainError(f"{self.kind} needs a non-empty square matrix, got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise DomainError("operator data must be finite")

    # -- constructors -----------------------------------------------------

    @classmethod
    def dense(cls, matrix, norm: str = "euclidean") -> "OperatorHandle":
        return cls("dense_matrix", np.asarray(matrix), norm)

    @classmethod
    def laplacian_1d(cls, n: int, h: float | None = None) -> "OperatorHandle":
        """Dirichlet Laplacian on n interior points; h defaults to 1/(n+1)."""
        if n < 1:
            raise DomainError("laplacian_1d needs n >= 1")
        h = 1.0 / (n + 1) if h is None else float(h)
        if not h > 0:
            raise DomainError("laplacian_1d needs h > 0")
        mat = (2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)) / h**2
        return cls("laplacian_1d", mat, "euclidean", params={"n": n, "h": h})

    @classmethod
    def multiplication(cls, symbol, sector_angle: float | None = None, points=None) -> "OperatorHandle":
        """Pointwise multiplication by f(x_i), every value in S_theta or 0."""
        f = np.asarray(symbol, dtype=complex).ravel()
        args = np.abs(np.angle(f[f != 0]))
        widest = float(args.max(initial=0.0))
        theta = widest if sector_angle is None else float(sector_angle)
        if not 0.0 <= theta <= math.pi / 2 + 1e-15:
            raise DomainError(f"sector angle must lie in [0, pi/2], got {theta}")
        if widest > theta + 1e-12:
            raise DomainError(f"symbol value with |arg| = {widest:.6g} leaves the sector of angle {theta:.6g}")
        pts = None if points is None else np.asarray(points, dtype=float)
        if pts is not None and pts.shape != f.shape:
            raise DomainError("points and symbol must have equal length")
        return cls("multiplication", f, "sup", sector_angle=theta, points=pts)

    # -- basic structure --------------------------------------------------

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def as_matrix(self) -> np.ndarray:
        if self.kind == "multiplication":
            return np.diag(self.data)
        return self.data

    def shifted(self, eps: float) -> "OperatorHandle":
        """The handle for A + eps."""
        if self.kind == "multiplication":
            return OperatorHandle("multiplication", self.data + eps, "sup",
                                  sector_angle=self.sector_angle, points=self.points)
        return OperatorHandle("dense_matrix", self.data + eps * np.eye(self.dim), self.norm_kind)

    def norm(self, x) -> float:
        x = np.asarray(x)
        if self.norm_kind == "sup":
            return float(np.max(np.abs(x), initial=0.0))
        return float(np.linalg.norm(x))

    def _vec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim,):
            raise DimensionError(f"vector of shape {x.shape} does not fit operator of dimension {self.dim}")
        return x

    # -- actions ------------------------------------------------------------

    def apply(self, x) -> np.ndarray:
        x = self._vec(x)
        if self.kind == "multiplication":
            return self.data * x
        return self.data @ x

    def resolve(self, lam, y) -> np.ndarray:
        """Solve (lam + A) x = y with residual <= 1e-10 ||y||."""
        y = self._vec(y)
        lam = complex(lam)
        if self.kind == "multiplication":
            d = lam + self.data
            if np.any(d == 0):
                raise SingularSystemError(f"-{lam} is a symbol value")
            x = y / d
        else:
            try:
                x = np.linalg.solve(self.data + lam * np.eye(self.dim), y)
            except np.linalg.LinAlgError as exc:
                raise SingularSystemError(f"(lam + A) singular at lam={lam}") from exc
        res = self.norm(lam * x + self.apply(x) - y)
        if not np.all(np.isfinite(x)) or res > RESOLVE_RTOL * max(self.norm(y), 1e-300):
            raise SingularSystemError(f"resolvent residual {res:.3g} too large at lam={lam}")
        return x

    def resolve_many(self, lams, y) -> np.ndarray:
        """Rows (lam_j + A)^{-1} y for every lam_j; backward-error checked."""
        y = self._vec(y)
        lams = np.asarray(lams, dtype=complex).ravel()
        if self.kind == "multiplication":
            d = lams[:, None] + self.data[None, :]
            if np.any(d == 0):
                raise SingularSystemError("a shift hits a symbol value")
            return y[None, :] / d
        n = self.dim
        systems = self.data[None, :, :] + lams[:, None, None] * np.eye(n)[None, :, :]
        try:
            out = np.linalg.solve(systems, np.broadcast_to(y, (lams.size, n))[..., None])[..., 0]
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError("(lam + A) singular at a quadrature node") from exc
        res = np.linalg.norm(np.einsum("kij,kj->ki", systems, out) - y[None, :], axis=1)
        scale = np.abs(systems).sum(axis=1).max(axis=1) * np.linalg.norm(out, axis=1) + np.linalg.norm(y)
        if not np.all(np.isfinite(out)) or np.any(res > RESOLVE_RTOL * scale):
            raise SingularSystemError("resolvent backward error too large at a quadrature node")
        return out

    def semigroup(self, r: float, x) -> np.ndarray:
        """exp(-r A) x."""
        if r < 0:
            raise DomainError("semigroup needs r >= 0")
        return self.semigroup_many([r], x)[0]

    def semigroup_many(self, rs, x) -> np.ndarray:
        x = self._vec(x)
        rs = np.asarray(rs, dtype=float).ravel()
        if np.any(rs < 0):
            raise DomainError("semigroup needs r >= 0")
        if self.kind == "multiplication":
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                e = np.exp(-rs[:, None] * self.data[None, :])
            # r = inf or 0 * inf from huge r on a zero symbol value
            e = np.where(self.data[None, :] == 0, 1.0, e)
            return e * x[None, :]
        mats = expm(-rs[:, None, None] * self.data[None, :, :])
        return mats @ x

    # -- cached diagnostics --------------------------------------------------

    @cached_property
    def m_bound(self) -> float:
        """Sampled non-negativity constant, used for truncation bounds."""
        if self.nonneg_constant_estimate is not None:
            return float(self.nonneg_constant_estimate)
        return validate_nonnegativity(self).m_estimate

    @cached_property
    def operator_norm(self) -> float:
        if self.kind == "multiplication":
            return float(np.max(np.abs(self.data)))
        if self.norm_kind == "sup":
            return float(np.abs(self.data).sum(axis=1).max())
        return float(np.linalg.norm(self.data, 2))

    def describe(self) -> dict:
        d = {"kind": self.kind, "norm": self.norm_kind, "dim": self.dim}
        if self.kind == "laplacian_1d":
            d.update(self.params)
        if self.kind == "multiplication":
            d["sector_angle"] = self.sector_angle
            d["grid_truncated"] = True
        return d


# -- non-negativity ---------------------------------------------------------


@dataclass(frozen=True)
class SectorReport:
    sampled_lambdas: np.ndarray
    norms: np.ndarray
    m_estimate: float
    sup_sampled: float
    conclusion: str


def validate_nonnegativity(op: OperatorHandle, lambda_grid=None) -> SectorReport:
    """Sample ||lam (lam + A)^{-1}|| on a positive lambda grid.

    The estimate is max(1, sampled sup): M >= 1 always, and for operators like
    the identity the sup is only reached as lam -> infinity.
    """
    lams = DEFAULT_LAMBDA_GRID if lambda_grid is None else np.asarray(lambda_grid, dtype=float).ravel()
    if lams.size == 0 or np.any(~(lams > 0)):
        raise DomainError("lambda grid must be non-empty and strictly positive")
    if op.kind != "multiplication" and op.dim > 2000:
        raise DomainError("validate_nonnegativity is limited to dimension <= 2000")
    norms = np.empty(lams.size)
    for j, lam in enumerate(lams):
        if op.kind == "multiplication":
            d = lam + op.data
            if np.any(d == 0):
                raise NonNegativityError(f"resolvent fails at lambda={lam}")
            norms[j] = np.max(np.abs(lam / d))
            continue
        shifted = op.data + lam * np.eye(op.dim)
        if op.norm_kind == "euclidean":
            smin = np.linalg.svd(shifted, compute_uv=False)[-1]
            if smin == 0:
                raise NonNegativityError(f"resolvent fails at lambda={lam}")
            norms[j] = lam / smin
        else:
            try:
                inv = np.linalg.inv(shifted)
            except np.linalg.LinAlgError as exc:
                raise NonNegativityError(f"resolvent fails at lambda={lam}") from exc
            norms[j] = lam * np.abs(inv).sum(axis=1).max()
    sup = float(norms.max())
    m = max(1.0, sup)
    if sup < 1.0:
        conclusion = "M=1 attained in the limit"
    elif norms[0] == sup and norms[0] > 1.5 * norms[min(1, norms.size - 1)] > 1.0:
        conclusion = "largest norm at the smallest lambda; M may be unbounded"
    else:
        conclusion = "M attained on grid"
    return SectorReport(lams, norms, m, sup, conclusion)


# -- spectral oracle ----------------------------------------------------------


def _eig(op: OperatorHandle):
    mat = op.data
    if np.allclose(mat, mat.conj().T, rtol=0, atol=1e-14 * max(np.abs(mat).max(), 1.0)):
        w, v = np.linalg.eigh((mat + mat.conj().T) / 2)
        return w.astype(complex), v.astype(complex), None
    w, v = np.linalg.eig(mat)
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > ORACLE_MAX_COND:
        raise DomainError(f"eigenbasis condition number {cond:.3g} exceeds {ORACLE_MAX_COND:g}; refusing")
    return w, v, np.linalg.inv(v)


def _power_values(values: np.ndarray, alpha: complex) -> np.ndarray:
    scale = max(np.abs(values).max(initial=0.0), 1e-300)
    out = np.zeros(values.shape, dtype=complex)
    nz = np.abs(values) > 1e-14 * scale
    v = values[nz]
    if np.any((v.imag == 0) & (v.real < 0)):
        raise DomainError("eigenvalue on the negative real axis")
    out[nz] = np.exp(alpha * (np.log(np.abs(v)) + 1j * np.angle(v)))
    return out


def spectral_function_matrix(op: OperatorHandle, fn) -> np.ndarray:
    """V diag(fn(lambda_i)) V^{-1} for a diagonalizable operator."""
    if op.kind == "multiplication":
        return np.diag(fn(op.data))
    w, v, vinv = _eig(op)
    vinv = v.conj().T if vinv is None else vinv
    return (v * fn(w)[None, :]) @ vinv


def spectral_power_oracle(op: OperatorHandle, order, x) -> np.ndarray:
    """A^alpha x by eigendecomposition (0^alpha := 0)."""
    alpha = FractionalOrder.coerce(order).alpha
    x = op._vec(x)
    if op.kind == "multiplication":
        return _power_values(op.data, alpha) * x
    return spectral_function_matrix(op, lambda w: _power_values(w, alpha)) @ x


# -- JSON operator files ------------------------------------------------------


def _complex_list(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).ravel()]


def _parse_complex(entry) -> complex:
    if isinstance(entry, (list, tuple)):
        if len(entry) != 2:
            raise DomainError(f"complex entries are [re, im] pairs, got {entry!r}")
        return complex(float(entry[0]), float(entry[1]))
    return complex(float(entry))


def operator_from_dict(spec: dict) -> OperatorHandle:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("operator spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind == "dense_matrix":
        rows = spec.get("matrix")
        if not rows:
            raise DomainError("dense_matrix needs a 'matrix' field")
        mat = np.array([[_parse_complex(e) for e in row] for row in rows], dtype=complex)
        return OperatorHandle.dense(mat, spec.get("norm", "euclidean"))
    if kind == "laplacian_1d":
        if "n" not in spec:
            raise DomainError("laplacian_1d needs 'n'")
        return OperatorHandle.laplacian_1d(int(spec["n"]), spec.get("h"))
    if kind == "multiplication":
        if "symbol" not in spec:
            raise DomainError("multiplication needs 'symbol'")
        if spec.get("norm", "sup") != "sup":
            raise DomainError("multiplication operators carry the sup norm")
        sym = [_parse_complex(e) for e in spec["symbol"]]
        return OperatorHandle.multiplication(sym, spec.get("sector_angle"), spec.get("points"))
    raise DomainError(f"unknown operator kind {kind!r}")


def operator_to_dict(op: OperatorHandle) -> dict:
    if op.kind == "laplacian_1d":
        return {"kind": op.kind, "norm": op.norm_kind, "n": op.params["n"], "h": op.params["h"]}
    if op.kind == "multiplication":
        d = {"kind": op.kind, "norm": "sup", "symbol": _complex_list(op.data), "sector_angle": op.sector_angle}
        if op.points is not None:
            d["points"] = [float(p) for p in op.points]
        return d
    return {"kind": op.kind, "norm": op.norm_kind,
            "matrix": [_complex_list(row) for row in op.data]}


def load_operator(path) -> OperatorHandle:
    with open(Path(path)) as fh:
        return operator_from_dict(json.load(fh))
