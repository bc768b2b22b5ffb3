"""Peripheral spectrum and attractor spaces in both pictures.

The attractor space is the direct sum of the generator's eigenspaces at
peripheral eigenvalues: modulus one for a discrete chain, purely imaginary for
a semigroup. Kernels are extracted by SVD thresholding of ``S - lambda I``
rather than by grouping eigenvectors, which keeps the extraction stable for
non-normal generators.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np
import scipy.linalg as la

from .errors import DefectivePeripheralPart, EigensolverFailure
from .models import generator_heisenberg, generator_schrodinger
from .operators import Superoperator, dagger, frob, unvec, vec
from .tolerances import DEFAULT


@dataclass(frozen=True)
class AttractorDecomposition:
    """Peripheral eigenvalues with HS-orthonormal eigenspace bases.

    ``heisenberg_bases[k]`` spans ``Ker(G^+ - conj(lambda_k))`` where ``G`` is
    the Schrodinger generator and ``lambda_k = eigenvalues[k]``.
    """

    kind: str
    eigenvalues: List[complex]
    schrodinger_bases: List[List[np.ndarray]]
    heisenberg_bases: List[List[np.ndarray]]
    multiplicities: List[int]
    generator: Superoperator = field(repr=False)

    @property
    def dim(self):
        return self.generator.dim

    @property
    def total_dimension(self):
        return sum(self.multiplicities)

    def index_of(self, lam, tol=1e-6):
        for k, mu in enumerate(self.eigenvalues):
            if abs(mu - lam) <= tol:
                return k
        raise KeyError(f"{lam} is not in the asymptotic spectrum {self.eigenvalues}")

    def schrodinger_span(self):
        return [X for basis in self.schrodinger_bases for X in basis]

    def heisenberg_span(self):
        return [X for basis in self.heisenberg_bases for X in basis]

    def fixed_index(self):
        """Index of eigenvalue 1 (discrete) or 0 (continuous), or None."""
        target = 1.0 if self.kind == "discrete" else 0.0
        try:
            return self.index_of(target, tol=1e-8)
        except KeyError:
            return None


# ---------------------------------------------------------------------------
# span utilities
# ---------------------------------------------------------------------------

def orthonormal_columns(ops, rtol=1e-10):
    """Orthonormal basis (as columns of vectorized operators) of ``span(ops)``."""
    if len(ops) == 0:
        return np.zeros((0, 0), dtype=complex)
    M = np.column_stack([vec(X) for X in ops])
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    return U[:, s > rtol * s[0]]


def span_projector(ops, n2=None):
    Q = orthonormal_columns(ops)
    if Q.size == 0:
        return np.zeros((n2, n2), dtype=complex)
    return Q @ dagger(Q)


def projector_distance(ops_a, ops_b) -> float:
    """Spectral-norm distance between orthogonal projectors onto two spans.

    Equals the sine of the largest principal angle when the spans have equal
    dimension, and 1 when the dimensions differ.
    """
    Qa = orthonormal_columns(ops_a)
    Qb = orthonormal_columns(ops_b)
    da = Qa.shape[1] if Qa.size else 0
    db = Qb.shape[1] if Qb.size else 0
    if da != db:
        return 1.0
    if da == 0:
        return 0.0
    return float(np.linalg.norm(Qa @ dagger(Qa) - Qb @ dagger(Qb), 2))


def containment_residual(inner, outer) -> float:
    """Largest relative distance of an element of ``span(inner)`` from ``span(outer)``."""
    Qi = orthonormal_columns(inner)
    if Qi.size == 0:
        return 0.0
    Qo = orthonormal_columns(outer)
    if Qo.size == 0:
        return 1.0
    R = Qi - Qo @ (dagger(Qo) @ Qi)
    return float(np.linalg.norm(R, 2))


# ---------------------------------------------------------------------------
# spectra and kernels
# ---------------------------------------------------------------------------

def full_spectrum(S: Superoperator):
    """All ``N**2`` eigenvalues with unit-norm right eigenvectors (as operators)."""
    try:
        w, V = la.eig(S.matrix)
    except la.LinAlgError as exc:
        raise EigensolverFailure(f"dense eigensolver failed: {exc}") from None
    if not np.all(np.isfinite(w)):
        raise EigensolverFailure("eigensolver returned non-finite eigenvalues")
    V = V / np.linalg.norm(V, axis=0)
    return [(complex(w[k]), unvec(V[:, k], S.dim)) for k in range(w.size)]


def _peripheral_mask(w, kind, S, tol):
    if kind == "discrete":
        return np.abs(np.abs(w) - 1.0) <= tol
    return np.abs(w.real) <= tol * max(1.0, S.norm())


def _snap(lam, kind, tol):
    if kind == "discrete":
        lam = lam / abs(lam)
    else:
        lam = 1j * lam.imag
    re = 0.0 if abs(lam.real) <= tol else lam.real
    im = 0.0 if abs(lam.imag) <= tol else lam.imag
    return complex(re, im)


def _cluster(w, tol):
    """Greedy single-linkage clustering; returns (representative, count) pairs."""
    remaining = list(w)
    clusters = []
    while remaining:
        group = [remaining.pop(0)]
        grown = True
        while grown:
            grown = False
            for z in list(remaining):
                if min(abs(z - g) for g in group) <= tol:
                    group.append(z)
                    remaining.remove(z)
                    grown = True
        clusters.append((complex(np.mean(group)), len(group)))
    return clusters


def peripheral_clusters(S: Superoperator, kind, tol=DEFAULT):
    """Clustered peripheral eigenvalues as ``(lambda, algebraic multiplicity)``."""
    w = la.eigvals(S.matrix)
    if not np.all(np.isfinite(w)):
        raise EigensolverFailure("eigensolver returned non-finite eigenvalues")
    mask = _peripheral_mask(w, kind, S, tol.peripheral)
    scale = 1.0 if kind == "discrete" else max(1.0, S.norm())
    clusters = _cluster(w[mask], tol.cluster * scale)
    out = []
    # clusters that snap onto the same point are one eigenvalue
    for lam, m in clusters:
        lam = _snap(lam, kind, tol.cluster * scale)
        for i, (mu, k) in enumerate(out):
            if abs(mu - lam) <= tol.cluster * scale:
                out[i] = (mu, k + m)
                break
        else:
            out.append((lam, m))
    return sorted(out, key=_order_key)


def _order_key(item):
    lam = item[0]
    # fixed points first, then by phase in (-pi, pi], positive before negative
    phase = np.angle(lam) if lam != 0 else 0.0
    if abs(lam.imag) < 1e-12 and abs(lam.real) > 0:
        phase = 0.0 if lam.real > 0 else np.pi
    return (round(abs(phase), 9), round(abs(lam), 9), -np.sign(phase))


def asymptotic_spectrum(S: Superoperator, kind, tol=DEFAULT) -> List[complex]:
    return [lam for lam, _ in peripheral_clusters(S, kind, tol)]


def second_modulus(S: Superoperator, kind, tol=DEFAULT) -> float:
    """Decay factor of the slowest non-peripheral mode.

    Discrete: the largest ``|mu|`` below the unit circle. Continuous: the
    largest real part ``Re(mu) < 0``. Returns 0 (resp. -inf) when absent.
    """
    w = la.eigvals(S.matrix)
    mask = _peripheral_mask(w, kind, S, tol.peripheral)
    rest = w[~mask]
    if kind == "discrete":
        return float(np.max(np.abs(rest))) if rest.size else 0.0
    return float(np.max(rest.real)) if rest.size else -np.inf


def numerical_kernel(M: np.ndarray, rtol=DEFAULT.kernel):
    """Orthonormal basis (columns) of the numerical null space of ``M``."""
    _, s, Vh = np.linalg.svd(M)
    smax = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > rtol * smax))
    return dagger(Vh[rank:, :])


def attractor_basis(S: Superoperator, lam, tol=DEFAULT, multiplicity=None):
    """HS-orthonormal basis of ``Ker(S - lam I)`` as a list of operators.

    When ``multiplicity`` (the algebraic multiplicity of the eigenvalue
    cluster) is given, a kernel of smaller dimension raises
    :class:`DefectivePeripheralPart`.
    """
    n2 = S.matrix.shape[0]
    K = numerical_kernel(S.matrix - lam * np.eye(n2), tol.kernel)
    if multiplicity is not None and K.shape[1] != multiplicity:
        raise DefectivePeripheralPart(
            f"eigenvalue {lam:.6g}: geometric multiplicity {K.shape[1]} "
            f"!= algebraic multiplicity {multiplicity}")
    return [unvec(K[:, k], S.dim) for k in range(K.shape[1])]


def eigen_residual(S: Superoperator, X, lam) -> float:
    return frob(S.apply(X) - lam * X)


def decompose(model, tol=None) -> AttractorDecomposition:
    """Asymptotic spectrum and attractor bases of a model in both pictures."""
    tol = tol or model.tolerances
    S = generator_schrodinger(model)
    Sh = generator_heisenberg(model)
    clusters = peripheral_clusters(S, model.kind, tol)
    eigenvalues, sch, heis, mult = [], [], [], []
    gnorm = max(1.0, S.norm())
    for lam, m in clusters:
        basis = attractor_basis(S, lam, tol, multiplicity=m)
        dual = attractor_basis(Sh, np.conj(lam), tol, multiplicity=m)
        for X in basis:
            r = eigen_residual(S, X, lam)
            if r > tol.eigen * gnorm:
                raise DefectivePeripheralPart(
                    f"attractor residual {r:.3e} at {lam} exceeds tolerance")
        eigenvalues.append(lam)
        sch.append(basis)
        heis.append(dual)
        mult.append(m)
    return AttractorDecomposition(model.kind, eigenvalues, sch, heis, mult, S)


def spectral_projector(decomp: AttractorDecomposition, indices=None) -> np.ndarray:
    """Matrix of the sum of spectral projectors ``P_lambda`` over the chosen blocks.

    Built from right eigenvectors (Schrodinger basis) and left eigenvectors
    (Heisenberg basis) as ``R (L^+ R)^{-1} L^+``. Needs no invariant state.
    """
    n2 = decomp.dim ** 2
    P = np.zeros((n2, n2), dtype=complex)
    if indices is None:
        indices = range(len(decomp.eigenvalues))
    for k in indices:
        R = np.column_stack([vec(X) for X in decomp.schrodinger_bases[k]])
        L = np.column_stack([vec(Y) for Y in decomp.heisenberg_bases[k]])
        P += R @ np.linalg.solve(dagger(L) @ R, dagger(L))
    return P
