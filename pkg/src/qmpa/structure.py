"""Attractors from the commutation relations they must satisfy.

For a faithful T-state ``sigma`` every discrete attractor ``X`` at ``lambda``
obeys ``A_j Y = lambda Y A_j`` and ``A_j^+ Y = conj(lambda) Y A_j^+`` for both
``Y = X sigma^{-1}`` and ``Y = sigma^{-1} X``. For a semigroup at ``lambda = i a``
the operators ``Y`` commute with every ``L_j``, ``L_j^+`` and ``G`` and satisfy
``[Y, H] = a Y``. The converse holds for trace-preserving models or stationary
``sigma``. Each relation is vectorized into a block of rows and the stacked
system is solved with one SVD, independently of the spectral route.
"""
from dataclasses import dataclass
from typing import List

import numpy as np

from .checks import Check, check
from .errors import MismatchBeyondTolerance
from .models import generator_schrodinger
from .operators import dagger, frob, require_strictly_positive, sandwich_matrix, unvec, vec
from .spectral import (
    containment_residual,
    decompose,
    eigen_residual,
    numerical_kernel,
    orthonormal_columns,
    projector_distance,
)
from .tolerances import DEFAULT


def _commutation_rows(B, mu, left, right):
    """Rows of ``B Y - mu Y B`` with ``Y = left X right``."""
    eye = np.eye(B.shape[0])
    return (sandwich_matrix(B, eye) - mu * sandwich_matrix(eye, B)) @ sandwich_matrix(left, right)


def _right_comm_rows(C, a, left, right):
    """Rows of ``[Y, C] - a Y`` with ``Y = left X right``."""
    eye = np.eye(C.shape[0])
    return (sandwich_matrix(eye, C) - sandwich_matrix(C, eye) - a * np.eye(C.shape[0] ** 2)) \
        @ sandwich_matrix(left, right)


def _solve(blocks, dim, rtol):
    M = np.vstack(blocks)
    # the relations are homogeneous; scale rows to a common magnitude
    scale = max(frob(M), 1.0)
    K = numerical_kernel(M / scale, rtol)
    return [unvec(K[:, k], dim) for k in range(K.shape[1])]


def qmch_system(model, sigma, lam) -> np.ndarray:
    n = model.dim
    eye = np.eye(n)
    sinv = np.linalg.inv(require_strictly_positive(sigma, "sigma"))
    blocks = []
    for A in model.kraus:
        for B, mu in ((A, lam), (dagger(A), np.conj(lam))):
            blocks.append(_commutation_rows(B, mu, eye, sinv))
            blocks.append(_commutation_rows(B, mu, sinv, eye))
    return np.vstack(blocks)


def qmch_structure_space(model, sigma, lam, rtol=DEFAULT.kernel) -> List[np.ndarray]:
    """Solutions ``X`` of the discrete structure relations at ``lam``."""
    return _solve([qmch_system(model, sigma, lam)], model.dim, rtol)


def qmch_structure_space_heisenberg(model, lam, rtol=DEFAULT.kernel) -> List[np.ndarray]:
    """The same relations with ``sigma = I``.

    The solutions are the Heisenberg attractors at ``conj(lam)``.
    """
    return qmch_structure_space(model, np.eye(model.dim), lam, rtol)


def qmds_system(model, sigma, a) -> np.ndarray:
    n = model.dim
    eye = np.eye(n)
    sinv = np.linalg.inv(require_strictly_positive(sigma, "sigma"))
    blocks = []
    G = model.optical_potential
    ops = [B for L in model.lindblads for B in (L, dagger(L))] + [G]
    for left, right in ((eye, sinv), (sinv, eye)):
        for B in ops:
            blocks.append(_commutation_rows(B, 1.0, left, right))
        blocks.append(_right_comm_rows(model.hamiltonian, a, left, right))
    return np.vstack(blocks)


def qmds_structure_space(model, sigma, a, rtol=DEFAULT.kernel) -> List[np.ndarray]:
    """Solutions ``X`` of the semigroup structure relations at ``lambda = i a``.

    With ``sigma = I`` the solutions are the Heisenberg attractors at ``-i a``.
    """
    return _solve([qmds_system(model, sigma, a)], model.dim, rtol)


def structure_space(model, sigma, lam, heisenberg=False, rtol=DEFAULT.kernel):
    """Dispatch on model kind; ``lam`` is the Schrodinger eigenvalue."""
    if heisenberg:
        sigma = np.eye(model.dim)
    if model.kind == "discrete":
        return qmch_structure_space(model, sigma, lam, rtol)
    return qmds_structure_space(model, sigma, float(np.imag(lam)), rtol)


def _sufficient(model, sigma):
    if model.trace_preserving:
        return True
    S = generator_schrodinger(model)
    image = S.apply(sigma)
    if model.kind == "discrete":
        return frob(image - sigma) <= model.tolerances.check
    return frob(image) <= model.tolerances.check * max(1.0, S.norm())


@dataclass(frozen=True)
class CrossValidation:
    mode: str  # "equality" or "containment"
    checks: List[Check]

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {"mode": self.mode, "passed": self.passed,
                "checks": [c.as_dict() for c in self.checks]}


def cross_validate(model, sigma, decomp=None, tol=1e-8, raise_on_mismatch=True) -> CrossValidation:
    """Compare structure-solver spaces with spectral attractor spaces at every peripheral eigenvalue.

    Both pictures are compared: the Schrodinger space at ``lambda`` against
    the relations with ``sigma``, and the Heisenberg space at
    ``conj(lambda)`` against the relations with ``sigma = I``. Without a
    trace-preserving model or stationary ``sigma`` only containment of the
    spectral space in the structure space is guaranteed, and only that is
    checked.
    """
    decomp = decomp or decompose(model)
    equality = _sufficient(model, sigma)
    checks = []
    for lam, sch, heis in zip(decomp.eigenvalues, decomp.schrodinger_bases,
                              decomp.heisenberg_bases):
        tag = f"{lam.real:+.6g}{lam.imag:+.6g}j"
        for picture, spectral_ops, solved in (
                ("schrodinger", sch, structure_space(model, sigma, lam)),
                ("heisenberg", heis, structure_space(model, sigma, lam, heisenberg=True))):
            if equality:
                r = projector_distance(spectral_ops, solved)
                name = f"{picture}_equality[{tag}]"
            else:
                r = containment_residual(spectral_ops, solved)
                name = f"{picture}_containment[{tag}]"
            checks.append(check(name, r, tol, spectral_dim=len(spectral_ops),
                                structure_dim=len(solved)))
    report = CrossValidation("equality" if equality else "containment", checks)
    if raise_on_mismatch and not report.passed:
        raise MismatchBeyondTolerance("structure-solver and spectral attractor spaces differ",
                                      report=report)
    return report


def necessity_residuals(model, sigma, decomp=None) -> List[float]:
    """Relative residual of each spectral attractor in its structure system."""
    decomp = decomp or decompose(model)
    out = []
    for lam, basis in zip(decomp.eigenvalues, decomp.schrodinger_bases):
        if model.kind == "discrete":
            M = qmch_system(model, sigma, lam)
        else:
            M = qmds_system(model, sigma, float(np.imag(lam)))
        scale = max(np.linalg.norm(M, 2), 1.0)
        out.extend(np.linalg.norm(M @ X.reshape(-1, order="F")) / scale for X in basis)
    return out


def _product_eigenvalue(kind, l1, l2):
    return l1 * l2 if kind == "discrete" else l1 + l2


def algebra_closure_check(model, sigma, decomp=None, tol=1e-8) -> List[Check]:
    """Product rule for attractors and closure of the Heisenberg attractor space.

    For every pair of basis elements ``X1`` at ``l1`` and ``X2`` at ``l2``
    whose combined eigenvalue (``l1 l2`` or ``l1 + l2``) is peripheral, the
    product ``X1 sigma^{-1} X2`` must be an attractor there. The Heisenberg
    attractor space and its fixed subspace must be closed under products and
    adjoints.
    """
    decomp = decomp or decompose(model)
    S = decomp.generator
    sinv = np.linalg.inv(require_strictly_positive(sigma, "sigma"))
    scale = max(1.0, S.norm()) * np.linalg.norm(sinv, 2)
    worst_product, pairs = 0.0, 0
    for b1, l1 in enumerate(decomp.eigenvalues):
        for b2, l2 in enumerate(decomp.eigenvalues):
            mu = _product_eigenvalue(decomp.kind, l1, l2)
            try:
                decomp.index_of(mu, tol=1e-8)
            except KeyError:
                continue
            for X1 in decomp.schrodinger_bases[b1]:
                for X2 in decomp.schrodinger_bases[b2]:
                    # scaled by the factors, since many products vanish
                    P = X1 @ sinv @ X2
                    r = eigen_residual(S, P, mu) / (frob(X1) * frob(X2) * scale)
                    worst_product = max(worst_product, r)
                    pairs += 1
    checks = [check("product_rule", worst_product, tol, pairs=pairs)]
    fixed = decomp.fixed_index()
    spaces = [("heisenberg", decomp.heisenberg_span())]
    if fixed is not None:
        spaces.append(("heisenberg_fixed", decomp.heisenberg_bases[fixed]))
    for label, ops in spaces:
        Q = orthonormal_columns(ops)
        prod = 0.0
        for Y1 in ops:
            for Y2 in ops:
                v = vec(Y1 @ Y2)
                r = np.linalg.norm(v - Q @ (dagger(Q) @ v)) / (frob(Y1) * frob(Y2))
                prod = max(prod, r)
        adj = containment_residual([dagger(Y) for Y in ops], ops)
        checks.append(check(f"{label}_product_closure", prod, tol))
        checks.append(check(f"{label}_adjoint_closure", adj, tol))
    return checks
