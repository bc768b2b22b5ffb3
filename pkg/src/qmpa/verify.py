"""Invariant suite run by the ``verify`` command.

Each entry is a :class:`~qmpa.checks.Check`. Checks that need a faithful
T-state are skipped when none is available, and the result is then marked
partial.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .asymptotics import (
    asymptotic_master_check,
    asymptotic_observable,
    asymptotic_state,
    build_propagator,
    k_isometry_check,
    projection,
    reversal_checks,
)
from .catalog import random_state
from .checks import Check, check
from .duality import (
    dual_basis,
    k_orthogonality_report,
    k_scalar_product,
    log_endomorphism,
    to_heisenberg,
)
from .errors import QMPAError, TStateError
from .gibbs import coeffs_form1, hermitian_basis, state_from_form1
from .operators import MonotoneFunction, frob, op_exp, op_log
from .spectral import decompose, eigen_residual, projector_distance
from .structure import algebra_closure_check, cross_validate, necessity_residuals
from .tstate import resolve_tstate

DEFAULT_KS = ("power:0.5", "power:1", "log1p")


@dataclass
class SuiteResult:
    checks: List[Check] = field(default_factory=list)
    partial: bool = False
    errors: List[dict] = field(default_factory=list)
    exit_code: int = 0

    @property
    def passed(self):
        return not self.errors and all(c.passed for c in self.checks)

    def as_dict(self):
        return {"passed": self.passed, "partial": self.partial, "errors": self.errors,
                "checks": [c.as_dict() for c in self.checks]}


def _error_entry(exc: QMPAError, stage):
    out = {"stage": stage, "code": exc.code, "message": str(exc)}
    rank = getattr(exc, "rank", None)
    if rank is not None:
        out["rank"] = rank
    return out


def spectral_checks(model, decomp) -> List[Check]:
    tol = model.tolerances
    S = decomp.generator
    Sh = S.adjoint()
    scale = max(1.0, S.norm())
    sch = max((eigen_residual(S, X, lam) for lam, B in zip(decomp.eigenvalues, decomp.schrodinger_bases)
               for X in B), default=0.0)
    heis = max((eigen_residual(Sh, X, np.conj(lam)) for lam, B in
                zip(decomp.eigenvalues, decomp.heisenberg_bases) for X in B), default=0.0)
    dims = [len(b) for b in decomp.schrodinger_bases] == [len(b) for b in decomp.heisenberg_bases]
    return [
        check("schrodinger_eigen_residual", sch / scale, tol.eigen),
        check("heisenberg_eigen_residual", heis / scale, tol.eigen),
        check("picture_dimensions_agree", 0.0 if dims else 1.0, 0.0,
              dimension=decomp.total_dimension),
    ]


def duality_checks(model, decomp, sigma, ks, rng, tol) -> List[Check]:
    out = []
    for k_name in ks:
        k = MonotoneFunction.parse(k_name)
        db = dual_basis(decomp, k, sigma, sigma, model.tolerances.gram_pivot)
        dev = np.abs(db.pairing_matrix() - np.eye(decomp.total_dimension)).max() \
            if decomp.total_dimension else 0.0
        out.append(check(f"biorthogonality[{k_name}]", dev, tol))
        rep = k_orthogonality_report(decomp, k, sigma, sigma, seed=int(rng.integers(2 ** 31)),
                                     tol=tol)
        out.append(check(f"k_orthogonality_blocks[{k_name}]", rep.max_cross_block, tol))
        out.append(check(f"k_orthogonality_range[{k_name}]", rep.max_range, tol))
        # Schrodinger eigenspace at lambda maps onto Heisenberg eigenspace at conj(lambda)
        worst = 0.0
        for lam, B, Bh in zip(decomp.eigenvalues, decomp.schrodinger_bases, decomp.heisenberg_bases):
            img = [to_heisenberg(X, k, sigma, sigma) for X in B]
            worst = max(worst, projector_distance(img, Bh))
        out.append(check(f"heisenberg_bijection[{k_name}]", worst, tol))
        # positive definiteness on random operators
        N = model.dim
        Z = [rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N)) for _ in range(3)]
        gram = np.array([[k_scalar_product(a, b, k, sigma, sigma) for b in Z] for a in Z])
        lo = float(np.linalg.eigvalsh((gram + gram.conj().T) / 2)[0])
        out.append(Check(f"k_product_positive[{k_name}]", lo > 0, lo, 0.0))
    worst = 0.0
    S = decomp.generator
    for lam, B in zip(decomp.eigenvalues, decomp.schrodinger_bases):
        for X in B:
            R = log_endomorphism(X, sigma, sigma)
            worst = max(worst, eigen_residual(S, R, lam) / max(1.0, frob(R)))
    out.append(check("log_endomorphism_invariance", worst, tol))
    return out


def asymptotic_checks(model, decomp, sigma, rng, tol) -> List[Check]:
    prop = build_propagator(decomp, sigma)
    ops = decomp.schrodinger_span()
    fixed = max((frob(projection(prop, X) - X) / frob(X) for X in ops), default=0.0)
    N = model.dim
    idem, trace_dev, duality = 0.0, 0.0, 0.0
    for _ in range(4):
        rho = random_state(N, rng)
        p = projection(prop, rho)
        idem = max(idem, frob(projection(prop, p) - p))
        if model.trace_preserving:
            trace_dev = max(trace_dev, abs(np.trace(p) - 1))
        A = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
        if model.kind == "discrete":
            n = int(rng.integers(0, 20))
            a = np.trace(asymptotic_observable(prop, A, step=n) @ rho)
            b = np.trace(A @ asymptotic_state(prop, rho, step=n))
        else:
            t = float(rng.uniform(0, 5))
            a = np.trace(asymptotic_observable(prop, A, time=t) @ rho)
            b = np.trace(A @ asymptotic_state(prop, rho, time=t))
        duality = max(duality, abs(a - b) / max(1.0, frob(A)))
    out = [check("projection_fixes_attractors", fixed, tol),
           check("projection_idempotent", idem, tol),
           check("picture_duality", duality, tol)]
    if model.trace_preserving:
        out.append(check("projection_trace", trace_dev, tol))
        out.extend(k_isometry_check(model, sigma, decomp=decomp, tol=tol,
                                    seed=int(rng.integers(2 ** 31))).checks)
    if model.kind == "discrete":
        out.extend(reversal_checks(model, sigma, decomp, tol))
    elif model.trace_preserving and frob(decomp.generator.apply(sigma)) <= model.tolerances.check:
        res = asymptotic_master_check(model, sigma, decomp, tol)
        out.append(check("asymptotic_master_equation", max((c.residual for c in res), default=0.0),
                         tol, attractors=len(res)))
    return out


def gibbs_checks(model, decomp, sigma, rng, tol) -> List[Check]:
    out = []
    w = np.linalg.eigvalsh(sigma)
    out.append(check("exp_log_round_trip", frob(op_exp(op_log(sigma)) - sigma), 1e-10,
                     condition=float(w[-1] / w[0])))
    if not model.trace_preserving:
        return out
    basis = hermitian_basis(decomp, "full")
    prop = build_propagator(decomp, sigma)
    c = 0.3 * rng.normal(size=len(basis))
    rho = state_from_form1(basis, c, sigma)
    fixed = frob(projection(prop, rho) - rho)
    out.append(check("form1_state_asymptotic", fixed, tol))
    back = state_from_form1(basis, coeffs_form1(rho, basis, sigma, tol=1e-6).coefficients, sigma)
    out.append(check("form1_round_trip", frob(back - rho), tol))
    return out


def run_suite(model, seed=0, ks=DEFAULT_KS, tol=1e-8, decomp=None) -> SuiteResult:
    """Run every applicable invariant check on ``model``."""
    rng = np.random.default_rng(seed)
    result = SuiteResult()
    try:
        decomp = decomp or decompose(model)
    except QMPAError as exc:
        result.errors.append(_error_entry(exc, "spectral"))
        result.exit_code = exc.exit_code
        return result
    result.checks.extend(spectral_checks(model, decomp))
    try:
        cert = resolve_tstate(model, decomp)
    except TStateError as exc:
        result.errors.append(_error_entry(exc, "tstate"))
        result.partial = True
        result.exit_code = exc.exit_code
        return result
    sigma = cert.sigma
    result.checks.append(check("tstate_defect", max(0.0, -cert.defect), model.tolerances.defect,
                               source=cert.source, heuristic=cert.heuristic))
    for stage, fn in (("duality", lambda: duality_checks(model, decomp, sigma, ks, rng, tol)),
                      ("asymptotics", lambda: asymptotic_checks(model, decomp, sigma, rng, tol)),
                      ("structure", lambda: _structure(model, decomp, sigma, tol)),
                      ("gibbs", lambda: gibbs_checks(model, decomp, sigma, rng, tol))):
        try:
            result.checks.extend(fn())
        except QMPAError as exc:
            result.errors.append(_error_entry(exc, stage))
            result.exit_code = result.exit_code or exc.exit_code
    return result


def _structure(model, decomp, sigma, tol) -> List[Check]:
    out = [check("structure_necessity", max(necessity_residuals(model, sigma, decomp), default=0.0),
                 tol)]
    out.extend(cross_validate(model, sigma, decomp, tol, raise_on_mismatch=False).checks)
    out.extend(algebra_closure_check(model, sigma, decomp, tol))
    return out

