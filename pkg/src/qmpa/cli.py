"""Command-line front end: ``qmpa <command> <model.json> [flags]``.

Reports are JSON on stdout (keys sorted, so identical inputs give identical
bytes); ``--human`` prints an indented text rendering instead. Exit codes:

    0  every check passed
    3  parse error          4  validation error
    5  T-state failure      6  structure/Gram mismatch
    7  representability     8  spectral failure
    9  a check failed without raising
"""
import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .asymptotics import (
    asymptotic_state,
    build_propagator,
    convergence_report,
    petz_recovery,
    reversal_checks,
)
from .catalog import bundled_path
from .checks import all_passed
from .duality import dual_basis, k_orthogonality_report
from .errors import ParseError, QMPAError, TStateError
from .gibbs import (
    DEFAULT_S_GRID,
    HermitianAttractorBasis,
    coeffs_form1,
    coeffs_form2,
    hermitian_basis,
    limit_procedure,
    state_from_form1,
    state_from_form2,
)
from .models import (
    classify,
    decode_matrix,
    encode_complex,
    encode_matrix,
    load_model,
    load_state,
    model_to_dict,
)
from .operators import MonotoneFunction, is_strictly_positive
from .spectral import decompose, second_modulus
from .structure import algebra_closure_check, cross_validate
from .tstate import resolve_tstate
from .verify import run_suite

CHECK_FAILED = 9
BUNDLED = ("cnot_ruo", "jump_lindblad")


class Exit(Exception):
    """Carry a finished report together with its exit code."""

    def __init__(self, report, code):
        super().__init__(code)
        self.report = report
        self.code = code


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _model(args):
    path = Path(args.model)
    if not path.exists() and args.model in BUNDLED:
        path = bundled_path(args.model)
    model = load_model(path)
    overrides = {}
    if args.tol_peripheral is not None:
        overrides["peripheral"] = args.tol_peripheral
    if args.tol_eigen is not None:
        overrides["eigen"] = args.tol_eigen
    if overrides:
        model = replace(model, tolerances=model.tolerances.updated(overrides))
    return model


def _summary(model):
    return {"name": model.name, "kind": model.kind, "dim": model.dim,
            "trace_preserving": bool(model.trace_preserving)}


def _spectrum(decomp):
    return [{"eigenvalue": encode_complex(lam), "multiplicity": m,
             "schrodinger_dim": len(s), "heisenberg_dim": len(h)}
            for lam, m, s, h in zip(decomp.eigenvalues, decomp.multiplicities,
                                    decomp.schrodinger_bases, decomp.heisenberg_bases)]


def _error(exc, stage=None):
    out = {"code": exc.code, "message": str(exc)}
    if stage:
        out["stage"] = stage
    for attr in ("rank", "residual", "eigenvalue"):
        val = getattr(exc, attr, None)
        if val is not None:
            out[attr] = float(val) if attr != "rank" else int(val)
    return out


def _tstate(model, decomp, report):
    """Resolve the T-state; on failure record it and stop with a partial report."""
    try:
        cert = resolve_tstate(model, decomp)
    except TStateError as exc:
        report["tstate"] = {"error": _error(exc)}
        report["partial"] = True
        raise Exit(report, exc.exit_code) from None
    report["tstate"] = cert.as_dict()
    return cert


def _initial_state(args, dim):
    if args.initial:
        return load_state(args.initial)
    return np.eye(dim, dtype=complex) / dim


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_analyze(args):
    model = _model(args)
    report = {"model": _summary(model), "classification": classify(model).as_dict(),
              "seed": args.seed}
    decomp = decompose(model)
    report["asymptotic_spectrum"] = _spectrum(decomp)
    report["attractor_dimension"] = decomp.total_dimension
    report["second_modulus"] = second_modulus(decomp.generator, model.kind, model.tolerances)
    cert = _tstate(model, decomp, report)
    k = MonotoneFunction.parse(args.k)
    db = dual_basis(decomp, k, cert.sigma, cert.sigma, model.tolerances.gram_pivot)
    dev = float(np.abs(db.pairing_matrix() - np.eye(decomp.total_dimension)).max())
    checks = [{"name": "biorthogonality", "passed": dev <= 1e-8, "residual": dev, "tol": 1e-8}]
    korth = k_orthogonality_report(decomp, k, cert.sigma, cert.sigma, seed=args.seed)
    cv = cross_validate(model, cert.sigma, decomp, raise_on_mismatch=False)
    closure = algebra_closure_check(model, cert.sigma, decomp)
    report["k"] = str(k)
    report["k_orthogonality"] = korth.as_dict()
    report["cross_validation"] = cv.as_dict()
    report["algebra_closure"] = [c.as_dict() for c in closure]
    report["checks"] = checks
    ok = checks[0]["passed"] and korth.passed and cv.passed and all_passed(closure)
    report["passed"] = bool(ok)
    return report, 0 if ok else CHECK_FAILED


def cmd_tstate(args):
    model = _model(args)
    report = {"model": _summary(model), "classification": classify(model).as_dict()}
    decomp = decompose(model)
    report["asymptotic_spectrum"] = _spectrum(decomp)
    _tstate(model, decomp, report)
    return report, 0


def cmd_dual(args):
    model = _model(args)
    report = {"model": _summary(model)}
    decomp = decompose(model)
    cert = _tstate(model, decomp, report)
    k = MonotoneFunction.parse(args.k)
    db = dual_basis(decomp, k, cert.sigma, cert.sigma, model.tolerances.gram_pivot)
    report["k"] = str(k)
    report["blocks"] = [
        {"eigenvalue": encode_complex(lam),
         "primal": [encode_matrix(X) for X in P],
         "dual": [encode_matrix(D) for D in Q]}
        for lam, P, Q in zip(db.eigenvalues, db.primal, db.dual)]
    dev = float(np.abs(db.pairing_matrix() - np.eye(decomp.total_dimension)).max())
    report["biorthogonality_deviation"] = dev
    return report, 0 if dev <= 1e-8 else CHECK_FAILED


def cmd_evolve(args):
    model = _model(args)
    report = {"model": _summary(model)}
    decomp = decompose(model)
    try:
        sigma = resolve_tstate(model, decomp).sigma
    except TStateError:
        sigma = None  # left/right eigenvector projector needs no T-state
    prop = build_propagator(decomp, sigma)
    rho0 = _initial_state(args, model.dim)
    if model.kind == "discrete":
        steps = args.steps if args.steps is not None else 0
        out = asymptotic_state(prop, rho0, step=steps)
        report["steps"] = steps
    else:
        t = args.time if args.time is not None else 0.0
        out = asymptotic_state(prop, rho0, time=t)
        report["time"] = t
    report["dual_basis"] = "k_dual" if sigma is not None else "spectral"
    report["asymptotic_state"] = encode_matrix(out)
    if args.compare_exact:
        horizon = args.steps if args.steps else 50
        conv = convergence_report(model, prop, rho0, horizon=horizon)
        report["convergence"] = conv.as_dict()
        report["second_modulus"] = second_modulus(decomp.generator, model.kind, model.tolerances)
        if args.csv:
            _write_csv(Path(args.csv) / "convergence.csv", conv.points)
    return report, 0


def _write_csv(path, points):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "distance"])
        for t, d in points:
            w.writerow([repr(float(t)), repr(float(d))])


def _gibbs_basis(args, decomp):
    if args.basis:
        try:
            doc = json.loads(Path(args.basis).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read basis file {args.basis}: {exc}") from None
        if not isinstance(doc, list):
            raise ParseError("basis file must hold a list of matrices")
        return HermitianAttractorBasis([decode_matrix(m, f"basis[{i}]") for i, m in enumerate(doc)])
    return hermitian_basis(decomp, "full" if args.scope == "full" else "fixed")


def cmd_gibbs(args):
    model = _model(args)
    report = {"model": _summary(model), "form": args.form}
    decomp = decompose(model)
    cert = _tstate(model, decomp, report)
    sigma = cert.sigma
    basis = _gibbs_basis(args, decomp)
    prop = build_propagator(decomp, sigma)
    report["basis"] = [encode_matrix(Z) for Z in basis.elements]
    report["scope"] = basis.scope
    if args.coeffs is not None:
        try:
            c = np.asarray(json.loads(args.coeffs), dtype=float)
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise ParseError(f"--coeffs must be a JSON list of reals: {exc}") from None
        build = state_from_form1 if args.form == 1 else state_from_form2
        report["state"] = encode_matrix(build(basis, c, sigma, propagator=prop))
        return report, 0
    rho = load_state(args.state) if args.state else sigma
    if args.form == 1 and not is_strictly_positive(rho):
        points = limit_procedure(rho, sigma, basis, DEFAULT_S_GRID, propagator=prop)
        report["limit_procedure"] = [p.as_dict() for p in points]
        ok = all(p.reconstruction_error <= 1e-8 for p in points)
        return report, 0 if ok else CHECK_FAILED
    fit = coeffs_form1 if args.form == 1 else coeffs_form2
    report.update(fit(rho, basis, sigma).as_dict())
    return report, 0


def cmd_recover(args):
    model = _model(args)
    report = {"model": _summary(model)}
    if model.kind != "discrete":
        raise ParseError("recover applies to discrete models")
    decomp = decompose(model)
    cert = _tstate(model, decomp, report)
    rec = petz_recovery(model, cert.sigma)
    checks = reversal_checks(model, cert.sigma, decomp)
    report["recovery"] = model_to_dict(rec)
    report["checks"] = [c.as_dict() for c in checks]
    return report, 0 if all_passed(checks) else CHECK_FAILED


def cmd_verify(args):
    model = _model(args)
    ks = (args.k,) if args.k_given else None
    result = run_suite(model, seed=args.seed, ks=ks or ("power:0.5", "power:1", "log1p"))
    report = {"model": _summary(model), "seed": args.seed}
    report.update(result.as_dict())
    if result.exit_code:
        return report, result.exit_code
    return report, 0 if result.passed else CHECK_FAILED


COMMANDS = {
    "analyze": cmd_analyze,
    "evolve": cmd_evolve,
    "gibbs": cmd_gibbs,
    "dual": cmd_dual,
    "tstate": cmd_tstate,
    "recover": cmd_recover,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    return obj


def render_human(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _is_row(v):
                lines.append(f"{pad}{k}:")
                lines.extend(render_human(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_short(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _is_row(v):
                lines.append(f"{pad}-")
                lines.extend(render_human(v, indent + 1))
            else:
                lines.append(f"{pad}- {_short(v)}")
    else:
        lines.append(f"{pad}{_short(obj)}")
    return lines


def _is_row(v):
    return isinstance(v, list) and all(isinstance(x, (int, float, str, bool)) for x in v)


def _short(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


def build_parser():
    p = argparse.ArgumentParser(prog="qmpa", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("model", help="model JSON file, or the name of a bundled model")
    p.add_argument("--k", default=None, help="operator monotone: power:<alpha> or log1p")
    p.add_argument("--tol-peripheral", type=float, default=None)
    p.add_argument("--tol-eigen", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--human", action="store_true", help="text output instead of JSON")
    p.add_argument("--csv", default=None, help="directory for convergence CSV files")
    p.add_argument("--initial", default=None, help="initial state file for evolve")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--time", type=float, default=None)
    p.add_argument("--compare-exact", action="store_true")
    p.add_argument("--state", default=None, help="state file for gibbs")
    p.add_argument("--coeffs", default=None, help="JSON list of basis coefficients for gibbs")
    p.add_argument("--form", type=int, choices=(1, 2), default=2)
    p.add_argument("--scope", choices=("fixed", "full"), default="full")
    p.add_argument("--basis", default=None, help="JSON list of hermitian basis matrices")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.k_given = args.k is not None
    args.k = args.k or "power:0.5"
    try:
        MonotoneFunction.parse(args.k)
        report, code = COMMANDS[args.command](args)
    except Exit as done:
        report, code = done.report, done.code
    except QMPAError as exc:
        report, code = {"error": _error(exc)}, exc.exit_code
    except ValueError as exc:
        report, code = {"error": {"code": "invalid_argument", "message": str(exc)}}, 2
    report = _jsonable(report)
    report["exit_code"] = code
    if args.human:
        print("\n".join(render_human(report)))
    else:
        print(json.dumps(report, sort_keys=True, indent=1))
    return code


if __name__ == "__main__":
    sys.exit(main())
