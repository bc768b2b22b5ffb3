"""Faithful T-states: strictly positive ``sigma`` with ``T(sigma) <= sigma``.

For a semigroup the condition must hold for ``exp(tL)`` at every ``t > 0``;
:func:`verify_tstate` checks the first-order condition ``-L(sigma) >= 0`` plus
a geometric grid of sample times, which is a practical surrogate rather than
an exact criterion. Certificates from that path are flagged ``heuristic``.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import (
    DefectNegative,
    NoFaithfulTState,
    TStateNotStrictlyPositive,
    TStateSearchUnsupported,
)
from .models import generator_schrodinger
from .operators import (
    frob,
    hermitian_part,
    is_hermitian,
    positivity_threshold,
    unvec,
    vec,
)
from .spectral import decompose, spectral_projector

GRID_POINTS = 10


@dataclass(frozen=True)
class TStateCertificate:
    sigma: np.ndarray
    min_eig: float
    defect: float
    stationary: bool
    source: str  # "found" | "user_supplied"
    heuristic: bool = False

    def as_dict(self):
        from .models import encode_matrix

        return {
            "sigma": encode_matrix(self.sigma),
            "min_eig": self.min_eig,
            "defect": self.defect,
            "stationary": self.stationary,
            "source": self.source,
            "heuristic": self.heuristic,
        }


def find_tstate(model, decomp=None) -> TStateCertificate:
    """Maximal-support invariant state of a trace-preserving model.

    The state is the image of ``I/N`` under the spectral projector onto the
    fixed-point eigenspace (the Cesaro mean of the orbit of ``I/N``). It is a
    faithful T-state exactly when it is strictly positive.
    """
    if not model.trace_preserving:
        raise TStateSearchUnsupported(
            "automatic T-state search needs a trace-preserving model; supply 'tstate' instead")
    decomp = decomp or decompose(model)
    k = decomp.fixed_index()
    if k is None:
        raise NoFaithfulTState("model has no fixed points", rank=0)
    n = model.dim
    P = spectral_projector(decomp, [k])
    sigma = hermitian_part(unvec(P @ vec(np.eye(n) / n), n))
    sigma = sigma / np.trace(sigma).real
    w, V = np.linalg.eigh(sigma)
    thresh = positivity_threshold(sigma, model.tolerances.positive)
    rank = int(np.sum(w > thresh))
    if rank < n:
        kernel = [V[:, j] for j in range(n) if w[j] <= thresh]
        raise NoFaithfulTState(
            f"maximal invariant state has rank {rank} < {n}", rank=rank, kernel=kernel)
    cert = verify_tstate(model, sigma)
    return TStateCertificate(cert.sigma, cert.min_eig, cert.defect, cert.stationary,
                             "found", cert.heuristic)


def verify_tstate(model, sigma) -> TStateCertificate:
    tol = model.tolerances
    sigma = np.asarray(sigma, dtype=complex)
    if not is_hermitian(sigma, tol.hermitian):
        raise TStateNotStrictlyPositive("candidate T-state is not hermitian")
    sigma = hermitian_part(sigma)
    if abs(np.trace(sigma) - 1) > tol.trace:
        raise TStateNotStrictlyPositive(f"candidate T-state has trace {np.trace(sigma).real:.6g} != 1")
    min_eig = float(np.linalg.eigvalsh(sigma)[0])
    if not min_eig > positivity_threshold(sigma, tol.positive):
        raise TStateNotStrictlyPositive(f"candidate T-state is not strictly positive (min eigenvalue {min_eig:.3e})")

    S = generator_schrodinger(model)
    image = S.apply(sigma)
    if model.kind == "discrete":
        gap = sigma - image
        stationary = frob(image - sigma) <= tol.check
    else:
        gap = -image
        stationary = frob(image) <= tol.check * max(1.0, S.norm())
    defect = _min_eig_with_witness(gap)
    if defect[0] < -tol.defect:
        raise DefectNegative(
            f"sigma - T(sigma) has eigenvalue {defect[0]:.3e}", defect[0], defect[1])

    heuristic = False
    if model.kind == "continuous":
        heuristic = True
        for t, lo, w in _sampled_gaps(S, sigma):
            if lo < -tol.defect:
                raise DefectNegative(
                    f"sigma - exp({t:.3g} L)(sigma) has eigenvalue {lo:.3e}", lo, w)
    return TStateCertificate(sigma, min_eig, defect[0], bool(stationary),
                             "user_supplied", heuristic)


def _min_eig_with_witness(A):
    w, V = np.linalg.eigh(hermitian_part(A))
    return float(w[0]), V[:, 0]


def _sampled_gaps(S, sigma):
    """Yield ``(t, min eig of sigma - exp(tL) sigma, witness)`` on the sample grid."""
    norm = S.norm()
    if norm == 0:
        return
    delta = 0.1 / norm
    for j in range(GRID_POINTS):
        t = delta * 2 ** j
        evolved = unvec(la.expm(t * S.matrix) @ vec(sigma), S.dim)
        lo, w = _min_eig_with_witness(sigma - evolved)
        yield t, lo, w


def commutant_check(sigma, attractors):
    """``[(index, ||[sigma, X_i]||_F)]`` for each operator in ``attractors``."""
    sigma = np.asarray(sigma)
    return [(i, frob(sigma @ X - X @ sigma)) for i, X in enumerate(attractors)]


def resolve_tstate(model, decomp=None) -> TStateCertificate:
    """Verify the model's own ``tstate`` if it has one, otherwise search."""
    if model.tstate is not None:
        return verify_tstate(model, model.tstate)
    return find_tstate(model, decomp)

