"""Maps between Schrodinger and Heisenberg attractors.

Given faithful T-states ``sigma1, sigma2`` and an operator monotone ``k``, the
superoperator ``W = R_{sigma2}^{-1} k(Delta_{sigma1,sigma2})`` is strictly
positive and sends the Schrodinger eigenspace at ``lambda`` onto the
Heisenberg eigenspace at ``conj(lambda)``. It defines the scalar product
``(X, Y)_k = (X, W(Y))`` under which attractor blocks at distinct eigenvalues
are orthogonal, which yields the dual basis used by the asymptotic propagator.
"""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import SingularGram
from .operators import (
    MonotoneFunction,
    dagger,
    hs_inner,
    k_of_delta_apply,
    op_log,
    op_power,
    require_strictly_positive,
)
from .spectral import AttractorDecomposition

HALF = MonotoneFunction.power(0.5)


def to_heisenberg(X, k: MonotoneFunction, sigma1, sigma2):
    """``k(Delta_{sigma1,sigma2})(X) sigma2^{-1}``."""
    Y = k_of_delta_apply(k, sigma1, sigma2, X)
    return Y @ np.linalg.inv(require_strictly_positive(sigma2, "sigma2"))


def k_scalar_product(X, Y, k: MonotoneFunction, sigma1, sigma2) -> complex:
    """``(X, k(Delta)(Y) sigma2^{-1})``.

    For ``power(a)`` this is ``(X, sigma1^a Y sigma2^{-a-1})``. The symmetric
    product ``(X, sigma^{-1/2} Y sigma^{-1/2})`` corresponds to ``a = -1/2``,
    outside the monotone range; use :func:`power_bijection` for it.
    """
    return hs_inner(X, to_heisenberg(Y, k, sigma1, sigma2))


def k_norm(X, k, sigma1, sigma2) -> float:
    return float(np.sqrt(max(k_scalar_product(X, X, k, sigma1, sigma2).real, 0.0)))


def power_bijection(X, alpha, sigma1, sigma2):
    """``sigma1^alpha X sigma2^(-alpha-1)``, a bijection for every real alpha."""
    return op_power(sigma1, alpha) @ X @ op_power(sigma2, -alpha - 1.0)


def log_endomorphism(X, sigma1, sigma2):
    """``log(sigma1) X - X log(sigma2)``; preserves each attractor eigenspace."""
    return op_log(sigma1) @ X - X @ op_log(sigma2)


@dataclass(frozen=True)
class DualBasis:
    """Attractor basis ``primal`` with its biorthogonal partner ``dual``.

    ``(dual[a][j], primal[b][i]) = delta_ab delta_ij``. When ``k`` is ``None``
    the dual was obtained without a T-state, from left eigenvectors.
    """

    k: Optional[MonotoneFunction]
    sigma1: Optional[np.ndarray]
    sigma2: Optional[np.ndarray]
    eigenvalues: List[complex]
    primal: List[List[np.ndarray]]
    dual: List[List[np.ndarray]]

    def flat(self):
        """``[(lambda, X, X_dual)]`` over all blocks."""
        return [(lam, X, D) for lam, P, Q in zip(self.eigenvalues, self.primal, self.dual)
                for X, D in zip(P, Q)]

    def pairing_matrix(self) -> np.ndarray:
        """Matrix ``M[a, b] = (dual_a, primal_b)``; the identity for a true dual basis."""
        items = self.flat()
        return np.array([[hs_inner(Da, Xb) for _, Xb, _ in items] for _, _, Da in items])


def _k_gram_schmidt(basis, k, sigma1, sigma2, pivot_tol):
    """Make a block k-orthogonal without normalizing (modified, two passes)."""
    out = []
    for X in basis:
        ref = k_norm(X, k, sigma1, sigma2)
        Y = X.copy()
        for _ in range(2):
            for Z in out:
                Y = Y - (k_scalar_product(Z, Y, k, sigma1, sigma2)
                         / k_scalar_product(Z, Z, k, sigma1, sigma2)) * Z
        if k_norm(Y, k, sigma1, sigma2) <= pivot_tol * ref:
            raise SingularGram("attractor basis is numerically degenerate under the k-product")
        out.append(Y)
    return out


def dual_basis(decomp: AttractorDecomposition, k: MonotoneFunction, sigma1, sigma2,
               pivot_tol=1e-10) -> DualBasis:
    """k-orthogonalize each eigenspace and map it to the Heisenberg picture.

    ``X^{lambda,i} = W(X_{lambda,i}) / (X_{lambda,i}, X_{lambda,i})_k`` with
    ``W = R_{sigma2}^{-1} k(Delta_{sigma1,sigma2})``. Blocks at different
    eigenvalues are already k-orthogonal, so only within-block
    orthogonalization is needed.
    """
    sigma1 = require_strictly_positive(sigma1, "sigma1")
    sigma2 = require_strictly_positive(sigma2, "sigma2")
    primal, dual = [], []
    for basis in decomp.schrodinger_bases:
        block = _k_gram_schmidt(basis, k, sigma1, sigma2, pivot_tol)
        primal.append(block)
        dual.append([to_heisenberg(X, k, sigma1, sigma2)
                     / k_scalar_product(X, X, k, sigma1, sigma2).real for X in block])
    return DualBasis(k, sigma1, sigma2, list(decomp.eigenvalues), primal, dual)


def spectral_dual_basis(decomp: AttractorDecomposition) -> DualBasis:
    """Dual basis from left eigenvectors alone, with no T-state needed."""
    primal, dual = [], []
    for P, Q in zip(decomp.schrodinger_bases, decomp.heisenberg_bases):
        # columns of Q (M^+)^{-1} with M[a, b] = (Q_a, P_b)
        M = np.array([[hs_inner(Qa, Pb) for Pb in P] for Qa in Q])
        C = np.linalg.inv(dagger(M))
        dual.append([sum(C[a, b] * Q[a] for a in range(len(Q))) for b in range(len(P))])
        primal.append(list(P))
    return DualBasis(None, None, None, list(decomp.eigenvalues), primal, dual)


@dataclass(frozen=True)
class KOrthogonalityReport:
    pairings: np.ndarray  # normalized |(X_a, X_b)_k| over all attractor pairs
    block_of: List[int]
    max_cross_block: float
    max_range: float
    tol: float

    @property
    def passed(self):
        return self.max_cross_block <= self.tol and self.max_range <= self.tol

    def as_dict(self):
        return {"max_cross_block": self.max_cross_block, "max_range": self.max_range,
                "tol": self.tol, "passed": self.passed}


def k_orthogonality_report(decomp: AttractorDecomposition, k, sigma1, sigma2,
                           n_random=8, seed=0, tol=1e-8) -> KOrthogonalityReport:
    """Check k-orthogonality of distinct blocks and of attractors vs. ranges.

    Pairings are normalized by the k-norms of both arguments. Range elements
    are ``G(Z) - lambda Z`` for seeded random ``Z``.
    """
    rng = np.random.default_rng(seed)
    S = decomp.generator
    items = [(b, X) for b, basis in enumerate(decomp.schrodinger_bases) for X in basis]
    norms = [k_norm(X, k, sigma1, sigma2) for _, X in items]
    n = len(items)
    pair = np.zeros((n, n))
    max_cross = 0.0
    for a in range(n):
        for b in range(n):
            v = abs(k_scalar_product(items[a][1], items[b][1], k, sigma1, sigma2))
            pair[a, b] = v / (norms[a] * norms[b])
            if items[a][0] != items[b][0]:
                max_cross = max(max_cross, pair[a, b])
    max_range = 0.0
    N = decomp.dim
    for _ in range(n_random):
        Z = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
        for b, lam in enumerate(decomp.eigenvalues):
            Y = S.apply(Z) - lam * Z
            ny = k_norm(Y, k, sigma1, sigma2)
            if ny == 0:
                continue
            for X in decomp.schrodinger_bases[b]:
                v = abs(k_scalar_product(X, Y, k, sigma1, sigma2))
                max_range = max(max_range, v / (k_norm(X, k, sigma1, sigma2) * ny))
    return KOrthogonalityReport(pair, [b for b, _ in items], max_cross, max_range, tol)
