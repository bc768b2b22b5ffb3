"""Exponential (Gibbs-like) parametrizations of asymptotic states.

Form one writes a strictly positive asymptotic state as
``sigma^{1/2} exp(A) sigma^{1/2}`` with ``A`` a real combination of hermitian
Heisenberg attractors ``Z_i``. Form two writes it as
``exp(log(sigma) + sum_i gamma_i Z_i)``; the sign in front of the sum is
``+`` throughout this module. States on the boundary of the positive cone are
reached by the limit ``s -> 0+`` of ``(1 - s) rho + s sigma``.
"""
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .errors import NotAsymptotic, NotForm2Representable, NotStrictlyPositive
from .operators import (
    frob,
    hermitian_part,
    is_hermitian,
    is_strictly_positive,
    op_exp,
    op_log,
    op_power,
    require_strictly_positive,
    vec,
)
from .spectral import AttractorDecomposition, orthonormal_columns

DEFAULT_S_GRID = (0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.001)


@dataclass(frozen=True)
class HermitianAttractorBasis:
    """Hermitian operators spanning (over the reals) a space of observables.

    ``scope`` is ``"full"`` for the whole Heisenberg attractor space,
    ``"fixed"`` for its fixed-point subspace, or ``"custom"`` for a
    caller-supplied list such as ``[I, H]``.
    """

    elements: List[np.ndarray]
    scope: str = "custom"

    def __post_init__(self):
        els = [np.asarray(Z, dtype=complex) for Z in self.elements]
        for i, Z in enumerate(els):
            if not is_hermitian(Z):
                raise ValueError(f"basis element {i} is not hermitian")
        object.__setattr__(self, "elements", [hermitian_part(Z) for Z in els])

    def __len__(self):
        return len(self.elements)

    def combine(self, coefficients):
        c = np.asarray(coefficients, dtype=float)
        if c.shape != (len(self.elements),):
            raise ValueError(f"expected {len(self.elements)} coefficients, got {c.shape}")
        return sum(ci * Z for ci, Z in zip(c, self.elements))

    def expand(self, A):
        """Least-squares real coefficients of hermitian ``A`` and the relative residual."""
        A = np.asarray(A, dtype=complex)
        M = np.column_stack([_real_vec(Z) for Z in self.elements])
        c, *_ = np.linalg.lstsq(M, _real_vec(A), rcond=None)
        r = frob(A - self.combine(c)) / max(1.0, frob(A))
        return c, float(r)


def _real_vec(A):
    v = vec(A)
    return np.concatenate([v.real, v.imag])


def hermitian_basis(decomp: AttractorDecomposition, scope="full", tol=1e-8) -> HermitianAttractorBasis:
    """Orthonormal hermitian basis of the Heisenberg attractor space or its fixed subspace.

    The identity comes first when it lies in the space; remaining elements
    are hermitian and anti-hermitian parts of the complex basis, kept
    greedily when independent and orthonormalized in the real
    Hilbert-Schmidt product.
    """
    if scope == "full":
        ops = decomp.heisenberg_span()
    elif scope == "fixed":
        k = decomp.fixed_index()
        ops = [] if k is None else decomp.heisenberg_bases[k]
    else:
        raise ValueError(f"unknown scope {scope!r}; use 'full' or 'fixed'")
    n = decomp.dim
    candidates = []
    Q = orthonormal_columns(ops)
    eye = np.eye(n, dtype=complex)
    if Q.size and np.linalg.norm(vec(eye) - Q @ (Q.conj().T @ vec(eye))) <= tol * np.sqrt(n):
        candidates.append(eye)
    for B in ops:
        candidates.append((B + B.conj().T) / 2)
        candidates.append((B - B.conj().T) / 2j)
    chosen = []
    for Z in candidates:
        v = _real_vec(Z)
        for W in chosen:
            v = v - (W @ v) * W
        nv = np.linalg.norm(v)
        if nv > tol * max(1.0, np.linalg.norm(_real_vec(Z))):
            chosen.append(v / nv)
        if len(chosen) == len(ops):
            break
    n2 = n * n
    elements = [hermitian_part((w[:n2] + 1j * w[n2:]).reshape((n, n), order="F")) for w in chosen]
    return HermitianAttractorBasis(elements, scope)


@dataclass(frozen=True)
class GibbsForm:
    form: int
    basis: HermitianAttractorBasis
    coefficients: np.ndarray
    sigma: np.ndarray
    normalization: float
    residual: float = 0.0

    def state(self):
        if self.form == 1:
            return state_from_form1(self.basis, self.coefficients, self.sigma)
        return state_from_form2(self.basis, self.coefficients, self.sigma)

    def as_dict(self):
        return {"form": self.form, "scope": self.basis.scope,
                "coefficients": [float(c) for c in self.coefficients],
                "normalization": float(self.normalization), "residual": float(self.residual)}


def _check_asymptotic(rho, propagator, tol):
    if propagator is None:
        return
    from .asymptotics import projection

    r = frob(projection(propagator, rho) - rho) / max(1.0, frob(rho))
    if r > tol:
        raise NotAsymptotic(f"state is not fixed by the asymptotic projection (residual {r:.3e})")


def state_from_form1(basis, coefficients, sigma, propagator=None, tol=1e-8):
    """``sigma^{1/2} exp(sum c_i Z_i) sigma^{1/2}`` with unit trace."""
    s_half = op_power(require_strictly_positive(sigma, "sigma"), 0.5)
    rho = s_half @ op_exp(basis.combine(coefficients)) @ s_half
    rho = hermitian_part(rho / np.trace(rho).real)
    _check_asymptotic(rho, propagator, tol)
    return rho


def state_from_form2(basis, coefficients, sigma, propagator=None, tol=1e-8):
    """``exp(log(sigma) + sum gamma_i Z_i)`` with unit trace."""
    rho = op_exp(op_log(require_strictly_positive(sigma, "sigma")) + basis.combine(coefficients))
    rho = hermitian_part(rho / np.trace(rho).real)
    _check_asymptotic(rho, propagator, tol)
    return rho


def _require_positive_state(rho):
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho):
        raise NotStrictlyPositive("state is not hermitian")
    if not is_strictly_positive(rho):
        raise NotStrictlyPositive(
            "state is not strictly positive; use limit_procedure for boundary states")
    return hermitian_part(rho)


def coeffs_form1(rho, basis, sigma, tol=1e-8) -> GibbsForm:
    """Expand ``log(g sigma^{-1/2} rho sigma^{-1/2})`` in the basis.

    ``g`` normalizes the trace of the sandwiched operator to one and is
    reported as the normalization.
    """
    rho = _require_positive_state(rho)
    sigma = require_strictly_positive(sigma, "sigma")
    s_mhalf = op_power(sigma, -0.5)
    omega = hermitian_part(s_mhalf @ rho @ s_mhalf)
    g = 1.0 / np.trace(omega).real
    c, r = basis.expand(op_log(g * omega))
    if r > tol:
        raise NotAsymptotic(f"log of the sandwiched state leaves the basis span (residual {r:.3e})")
    return GibbsForm(1, basis, c, sigma, float(g), r)


def coeffs_form2(rho, basis, sigma, tol=1e-8) -> GibbsForm:
    """Expand ``log(rho) - log(sigma)`` in the basis."""
    rho = _require_positive_state(rho)
    sigma = require_strictly_positive(sigma, "sigma")
    c, r = basis.expand(op_log(rho) - op_log(sigma))
    if r > tol:
        raise NotForm2Representable(
            f"log(rho) - log(sigma) leaves the basis span (residual {r:.3e})", residual=r)
    unnormalized = op_exp(op_log(sigma) + basis.combine(c))
    return GibbsForm(2, basis, c, sigma, float(np.trace(unnormalized).real), r)


@dataclass(frozen=True)
class LimitPoint:
    s: float
    coefficients: np.ndarray
    normalization: float
    reconstruction_error: float

    def as_dict(self):
        return {"s": self.s, "coefficients": [float(c) for c in self.coefficients],
                "normalization": self.normalization,
                "reconstruction_error": self.reconstruction_error}


def limit_procedure(rho, sigma, basis, s_grid: Sequence[float] = DEFAULT_S_GRID,
                    propagator=None, tol=1e-8) -> List[LimitPoint]:
    """Form-one coefficients of ``(1 - s) rho + s sigma`` along ``s_grid``.

    Coefficients stay bounded when ``rho`` is strictly positive and some of
    them diverge as ``s -> 0+`` when it is not.
    """
    rho = hermitian_part(np.asarray(rho, dtype=complex))
    _check_asymptotic(rho, propagator, tol)
    out = []
    for s in s_grid:
        omega = (1.0 - s) * rho + s * sigma
        g = coeffs_form1(omega, basis, sigma, tol)
        err = frob(state_from_form1(basis, g.coefficients, sigma) - omega)
        out.append(LimitPoint(float(s), g.coefficients, g.normalization, float(err)))
    return out


def form_difference(basis, coefficients, sigma) -> float:
    """``||form2 - form1||_F`` for one coefficient vector."""
    return frob(state_from_form2(basis, coefficients, sigma)
                - state_from_form1(basis, coefficients, sigma))
