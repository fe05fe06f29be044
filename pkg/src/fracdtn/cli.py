"""
Command-line front end.

    fracdtn power    --op A.json --alpha 0.5 [--vector 1,2,3]
    fracdtn extend   --op A.json --alpha 0.3 --t0 1 --ratio 0.5 --steps 8
    fracdtn dtn      --op A.json --alpha 0.4,0.2
    fracdtn compare  --op A.json --alpha 0.5
    fracdtn validate --op A.json
    fracdtn selftest

Reports go to standard output (or --output) as JSON with a "schema" field,
or as CSV holding only the convergence table.  Exit codes: 0 success,
1 numerical failure, 2 bad input, 3 a check in the report failed.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
import time

import numpy as np

from . import acceptance
from .balakrishnan import balakrishnan_power, shifted_power
from .errors import DimensionError, DomainError, FracDtnError
from .extension import default_t0, dtn_extract, extension_trace
from .operators import OperatorHandle, load_operator, spectral_power_oracle, validate_nonnegativity
from .report import SCHEMA_VERSION, dumps, table_csv
from .special import FractionalOrder

EXIT_OK, EXIT_NUMERIC, EXIT_INPUT, EXIT_CHECK = 0, 1, 2, 3
COMMANDS = ("power", "extend", "dtn", "compare", "validate", "selftest")


def parse_alpha(text: str) -> complex:
    parts = text.split(",")
    if len(parts) > 2:
        raise argparse.ArgumentTypeError(f"alpha must be 're' or 're,im', got {text!r}")
    try:
        a = complex(float(parts[0]), float(parts[1]) if len(parts) == 2 else 0.0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse alpha {text!r}") from exc
    if not 0.0 < a.real < 1.0 or not math.isfinite(a.imag):
        raise argparse.ArgumentTypeError(f"need 0 < Re(alpha) < 1, got {text!r}")
    return a


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text!r}")
    return v


def _t0(text: str):
    return None if text == "auto" else _positive(text)


def _complex_entry(entry) -> complex:
    if isinstance(entry, (list, tuple)):
        if len(entry) != 2:
            raise DomainError(f"complex entries are [re, im] pairs, got {entry!r}")
        return complex(float(entry[0]), float(entry[1]))
    if isinstance(entry, str):
        return complex(entry.replace(" ", ""))
    return complex(float(entry))


def parse_vector(text: str) -> np.ndarray:
    """A vector from a file (JSON list or whitespace/comma separated) or an inline comma list."""
    if os.path.isfile(text):
        with open(text) as fh:
            body = fh.read().strip()
        try:
            entries = json.loads(body)
        except json.JSONDecodeError:
            entries = body.replace(",", " ").split()
    else:
        entries = [e for e in text.split(",") if e.strip()]
    if not isinstance(entries, list) or not entries:
        raise DomainError("vector must be a non-empty list")
    try:
        vec = np.array([_complex_entry(e) for e in entries], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"cannot parse vector: {exc}") from exc
    if not np.all(np.isfinite(vec)):
        raise DomainError("vector entries must be finite")
    return vec


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracdtn", description="Fractional powers and their DtN realization.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--op", help="operator JSON file")
    p.add_argument("--alpha", type=parse_alpha, default=None, help="exponent as 're' or 're,im'")
    p.add_argument("--vector", default=None, help="file path or inline comma list (default: all ones)")
    p.add_argument("--tol", type=_positive, default=1e-8)
    p.add_argument("--t0", type=_t0, default=None, help="largest t sample, or 'auto'")
    p.add_argument("--ratio", type=_positive, default=0.5)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None, help="write the report here instead of standard output")
    p.add_argument("--timings", action="store_true", help="print wall time per stage to standard error")
    return p


class _Stages:
    def __init__(self):
        self.times: dict[str, float] = {}

    def run(self, name, fn, *args, **kwargs):
        start = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            self.times[name] = self.times.get(name, 0.0) + time.perf_counter() - start


def _header(cmd: str, op: OperatorHandle | None, alpha, tol: float) -> dict:
    rep = {"schema": SCHEMA_VERSION, "command": cmd}
    if op is not None:
        rep["operator"] = {"kind": op.kind, "dim": op.dim, "norm": op.norm_kind}
    if alpha is not None:
        rep["alpha"] = complex(alpha)
    rep["tol"] = tol
    return rep


def _rel(op: OperatorHandle, a: np.ndarray, b: np.ndarray) -> float:
    scale = max(op.norm(a), op.norm(b))
    return op.norm(a - b) / scale if scale > 0 else 0.0


def _oracle(op, alpha, x):
    try:
        return spectral_power_oracle(op, alpha, x)
    except DomainError:
        return None


def cmd_power(op, alpha, x, args, st):
    res = st.run("balakrishnan", balakrishnan_power, op, alpha, x, tol=args.tol)
    rep = _header("power", op, alpha, args.tol)
    routes = {"balakrishnan": {"value": res.value, "est_error": res.est_error, "node_count": res.node_count_used}}
    oracle = st.run("spectral_oracle", _oracle, op, alpha, x)
    agree = 100.0 * args.tol
    disc = {}
    if oracle is not None:
        routes["spectral_oracle"] = {"value": oracle, "est_error": 0.0}
        disc["balakrishnan|spectral_oracle"] = _rel(op, res.value, oracle)
    rep.update(routes=routes, discrepancies=disc, agreement_tolerance=agree,
               passed=all(d <= agree for d in disc.values()))
    rows = [[i, res.value[i], None if oracle is None else oracle[i]] for i in range(op.dim)]
    return rep, (["index", "balakrishnan", "spectral_oracle"], rows)


def _trace_t0(args) -> float:
    return 1.0 if args.t0 is None else args.t0


def cmd_extend(op, alpha, x, args, st):
    tr = st.run("extension_trace", extension_trace, op, alpha, x, t0=_trace_t0(args), ratio=args.ratio,
                steps=args.steps, tol=args.tol)
    rep = _header("extend", op, alpha, args.tol)
    rep["trace"] = {"t": tr.t_grid, "u": tr.u_values, "du": tr.du_values, "quad_errors": tr.quad_errors}
    rep["passed"] = True
    rows = [[t, op.norm(u), op.norm(du), e] for t, u, du, e in zip(tr.t_grid, tr.u_values, tr.du_values,
                                                                     tr.quad_errors)]
    return rep, (["t", "norm_u", "norm_du", "quad_error"], rows)


def _dtn(op, alpha, x, args, st):
    t0 = default_t0(op) if args.t0 is None else args.t0
    return t0, st.run("dtn", dtn_extract, op, alpha, x, t0=t0, ratio=args.ratio, steps=args.steps,
                      tol=min(args.tol, 1e-12))


def cmd_dtn(op, alpha, x, args, st):
    t0, d = _dtn(op, alpha, x, args, st)
    rep = _header("dtn", op, alpha, args.tol)
    rep.update(t0=t0, ratio=args.ratio, steps=args.steps, limit=d.extrapolated_limit, reference=d.reference,
               c_alpha=FractionalOrder.coerce(alpha).c_alpha, fitted_exponent=d.fitted_exponent,
               model_exponent=d.fit_exponent_model, rel_error=d.rel_error, tolerance=d.tolerance,
               passed=d.passed)
    rows = [[t, op.norm(ph - d.extrapolated_limit), e] for t, ph, e in zip(d.t_samples, d.phi_samples, d.quad_errors)]
    rep["samples"] = {"t": d.t_samples, "phi": d.phi_samples, "quad_errors": d.quad_errors}
    return rep, (["t", "deviation_from_limit", "quad_error"], rows)


def cmd_compare(op, alpha, x, args, st):
    ord_ = FractionalOrder.coerce(alpha)
    rep = _header("compare", op, alpha, args.tol)
    routes, values, failures = {}, {}, {}
    bal = st.run("balakrishnan", balakrishnan_power, op, ord_, x, tol=args.tol)
    routes["balakrishnan"] = {"value": bal.value, "est_error": bal.est_error}
    values["balakrishnan"] = bal.value
    try:
        sh = st.run("shifted_limit", shifted_power, op, ord_, x, tol=0.1 * args.tol)
        routes["shifted_limit"] = {"value": sh.value, "est_error": sh.est_error,
                                   "fitted_exponent": sh.fitted_exponent}
        values["shifted_limit"] = sh.value
    except FracDtnError as exc:
        failures["shifted_limit"] = f"{type(exc).__name__}: {exc}"
    oracle = st.run("spectral_oracle", _oracle, op, ord_, x)
    if oracle is not None:
        routes["spectral_oracle"] = {"value": oracle, "est_error": 0.0}
        values["spectral_oracle"] = oracle
    try:
        _, d = _dtn(op, ord_, x, args, st)
        # the DtN limit is c_alpha A^alpha x; divide to compare powers directly
        scaled = d.extrapolated_limit / ord_.c_alpha
        routes["dtn"] = {"value": scaled, "est_error": float(np.max(d.quad_errors)),
                         "fitted_exponent": d.fitted_exponent, "c_alpha": ord_.c_alpha}
        values["dtn"] = scaled
    except FracDtnError as exc:
        failures["dtn"] = f"{type(exc).__name__}: {exc}"
    agree = 100.0 * args.tol
    disc = {f"{a}|{b}": _rel(op, values[a], values[b]) for a, b in itertools.combinations(values, 2)}
    rep.update(routes=routes, failures=failures, discrepancies=disc, agreement_tolerance=agree,
               passed=not failures and all(v <= agree for v in disc.values()))
    rows = [[k.split("|")[0], k.split("|")[1], v, agree, v <= agree] for k, v in disc.items()]
    return rep, (["route_a", "route_b", "discrepancy", "tolerance", "passed"], rows)


def cmd_validate(op, args, st):
    sr = st.run("validate", validate_nonnegativity, op)
    rep = _header("validate", op, None, args.tol)
    rep.update(lambdas=sr.sampled_lambdas, norms=sr.norms, sup_sampled=sr.sup_sampled,
               m_estimate=sr.m_estimate, conclusion=sr.conclusion, passed=True)
    return rep, (["lambda", "norm"], [[lam, n] for lam, n in zip(sr.sampled_lambdas, sr.norms)])


def cmd_selftest(args, st):
    times: dict = {}
    rep = st.run("selftest", acceptance.selftest, times)
    for cid, t in times.items():
        st.times[f"criterion_{cid}"] = t
    rows = [[c["id"], c["name"], c["metric"], c["tolerance"], c["passed"]] for c in rep["criteria"]]
    return rep, (["id", "name", "metric", "tolerance", "passed"], rows)


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    st = _Stages()
    try:
        if args.steps < 4:
            raise DomainError("--steps must be at least 4")
        if not args.ratio < 1:
            raise DomainError("--ratio must lie in (0, 1)")
        if args.command == "selftest":
            rep, table = cmd_selftest(args, st)
        else:
            if args.op is None:
                raise DomainError(f"{args.command} needs --op")
            op = load_operator(args.op)
            if args.command == "validate":
                rep, table = cmd_validate(op, args, st)
            else:
                if args.alpha is None:
                    raise DomainError(f"{args.command} needs --alpha")
                x = np.ones(op.dim, dtype=complex) if args.vector is None else parse_vector(args.vector)
                if x.size != op.dim:
                    raise DimensionError(f"vector has length {x.size}, operator dimension is {op.dim}")
                handler = {"power": cmd_power, "extend": cmd_extend, "dtn": cmd_dtn, "compare": cmd_compare}
                rep, table = handler[args.command](op, args.alpha, x, args, st)
    except (DomainError, DimensionError, OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        print(f"fracdtn: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FracDtnError as exc:
        print(f"fracdtn: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = dumps(rep) if args.format == "json" else table_csv(*table)
    _emit(text, args.output)
    if args.timings:
        print(json.dumps({"wall_time_s": st.times}), file=sys.stderr)
    return EXIT_OK if rep.get("passed", True) else EXIT_CHECK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
