"""Long-time dynamics restricted to the attractor space.

With an attractor basis ``X_{lambda,i}`` and its dual ``X^{lambda,i}`` the
asymptotic evolution is closed form::

    rho(n) = sum lambda^n X_{lambda,i} Tr(rho0 (X^{lambda,i})^+)
    A(n)   = sum lambda^n (X^{lambda,i})^+ Tr(A0 X_{lambda,i})

with ``exp(lambda t)`` in place of ``lambda^n`` for a semigroup. At ``n = 0``
the state formula is the asymptotic projection onto the attractor space.
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.linalg as la

from .checks import Check, check
from .duality import HALF, DualBasis, dual_basis, k_scalar_product, spectral_dual_basis
from .models import DiscreteModel, generator_schrodinger
from .operators import (
    choi_matrix,
    dagger,
    frob,
    hs_inner,
    min_eigenvalue,
    op_power,
    require_strictly_positive,
    unvec,
    vec,
)
from .spectral import AttractorDecomposition, decompose


@dataclass(frozen=True)
class AsymptoticPropagator:
    decomp: AttractorDecomposition
    dual: DualBasis
    kind: str

    def factor(self, lam, step=None, time=None):
        if self.kind == "discrete":
            return lam ** (0 if step is None else int(step))
        return np.exp(lam * (0.0 if time is None else float(time)))

    def matrix(self, step=None, time=None) -> np.ndarray:
        """Superoperator matrix of the asymptotic evolution at ``step``/``time``."""
        n2 = self.decomp.dim ** 2
        M = np.zeros((n2, n2), dtype=complex)
        for lam, X, D in self.dual.flat():
            M += self.factor(lam, step, time) * np.outer(vec(X), vec(D).conj())
        return M


def build_propagator(decomp: AttractorDecomposition, sigma=None, k=HALF) -> AsymptoticPropagator:
    """Propagator from the k-dual basis, or from left eigenvectors when ``sigma`` is None."""
    if sigma is None:
        dual = spectral_dual_basis(decomp)
    else:
        dual = dual_basis(decomp, k, sigma, sigma)
    return AsymptoticPropagator(decomp, dual, decomp.kind)


def asymptotic_state(prop: AsymptoticPropagator, rho0, step=None, time=None):
    rho0 = np.asarray(rho0, dtype=complex)
    out = np.zeros_like(rho0)
    for lam, X, D in prop.dual.flat():
        out += prop.factor(lam, step, time) * hs_inner(D, rho0) * X
    return out


def asymptotic_observable(prop: AsymptoticPropagator, A0, step=None, time=None):
    A0 = np.asarray(A0, dtype=complex)
    out = np.zeros_like(A0)
    for lam, X, D in prop.dual.flat():
        out += prop.factor(lam, step, time) * np.trace(A0 @ X) * dagger(D)
    return out


def projection(prop: AsymptoticPropagator, X):
    """Asymptotic projection of ``X`` (the state formula at ``n = 0``)."""
    return asymptotic_state(prop, X, step=0, time=0.0)


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceReport:
    kind: str
    points: List[tuple]  # (step or time, distance)
    rate: Optional[float]  # fitted |mu| (discrete) or Re(mu) (continuous)

    def as_dict(self):
        return {"kind": self.kind, "rate": self.rate,
                "points": [[float(t), float(d)] for t, d in self.points]}


def convergence_report(model, prop: AsymptoticPropagator, rho0, horizon=50, dt=None,
                       floor=1e-12) -> ConvergenceReport:
    """Distances ``||T^n(rho0) - rho_as(n)||_F`` for ``n = 0..horizon``.

    For a semigroup the samples are at ``t = n dt`` and the exact evolution
    uses the matrix exponential of ``dt L``; ``dt`` defaults to ``1/||L||_F``.
    """
    S = generator_schrodinger(model)
    rho0 = np.asarray(rho0, dtype=complex)
    if model.kind == "discrete":
        step_matrix = S.matrix
        dt = 1.0
    else:
        dt = dt or 1.0 / max(S.norm(), 1e-300)
        step_matrix = la.expm(dt * S.matrix)
    v = vec(rho0)
    points = []
    for n in range(horizon + 1):
        exact = unvec(v, model.dim)
        if model.kind == "discrete":
            approx = asymptotic_state(prop, rho0, step=n)
            points.append((n, frob(exact - approx)))
        else:
            approx = asymptotic_state(prop, rho0, time=n * dt)
            points.append((n * dt, frob(exact - approx)))
        v = step_matrix @ v
    return ConvergenceReport(model.kind, points, fit_decay_rate(points, model.kind, floor))


def fit_decay_rate(points, kind, floor=1e-12) -> Optional[float]:
    """Least-squares slope of ``log(distance)`` over samples above ``floor``."""
    t = np.array([p[0] for p in points if p[1] > floor], dtype=float)
    d = np.array([p[1] for p in points if p[1] > floor], dtype=float)
    if t.size < 3:
        return None
    slope = np.polyfit(t, np.log(d), 1)[0]
    return float(np.exp(slope)) if kind == "discrete" else float(slope)


# ---------------------------------------------------------------------------
# reversal on the attractor space
# ---------------------------------------------------------------------------

def petz_recovery(model: DiscreteModel, sigma) -> DiscreteModel:
    """Quantum operation with Kraus operators ``sigma^{1/2} A_k^+ sigma^{-1/2}``."""
    if model.kind != "discrete":
        raise TypeError("recovery maps are defined for discrete models only")
    sigma = require_strictly_positive(sigma, "sigma")
    s_half, s_mhalf = op_power(sigma, 0.5), op_power(sigma, -0.5)
    kraus = [s_half @ dagger(A) @ s_mhalf for A in model.kraus]
    recovered = DiscreteModel(model.dim, kraus, tolerances=model.tolerances,
                              name=f"{model.name}_recovery" if model.name else "recovery")
    assert min_eigenvalue(choi_matrix(kraus)) >= -1e-10
    return recovered


def reversal_checks(model: DiscreteModel, sigma, decomp=None, tol=1e-8) -> List[Check]:
    """``T_rec T(X) = X`` and ``T T_rec(X) = X`` on every attractor basis element."""
    decomp = decomp or decompose(model)
    T = generator_schrodinger(model)
    R = generator_schrodinger(petz_recovery(model, sigma))
    back, forth = 0.0, 0.0
    for X in decomp.schrodinger_span():
        back = max(back, frob(R.apply(T.apply(X)) - X))
        forth = max(forth, frob(T.apply(R.apply(X)) - X))
    return [check("recovery_after_evolution", back, tol),
            check("evolution_after_recovery", forth, tol)]


@dataclass(frozen=True)
class IsometryReport:
    checks: List[Check]
    non_attractor: List[float] = field(default_factory=list)  # informational

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {"passed": self.passed, "checks": [c.as_dict() for c in self.checks],
                "non_attractor_residuals": [float(x) for x in self.non_attractor]}


def k_isometry_check(model, sigma, k=HALF, decomp=None, tol=1e-8, seed=0,
                     n_random=3) -> IsometryReport:
    """Preservation of ``(X, Y)_k`` by the evolution on attractor pairs.

    Discrete: ``(T X, T Y)_k - (X, Y)_k``. Continuous: the time derivative at
    zero, ``(L X, Y)_k + (X, L Y)_k``. Both are normalized by the k-norms.
    Random non-attractor pairs are evaluated for information only.
    """
    decomp = decomp or decompose(model)
    S = generator_schrodinger(model)
    sigma = require_strictly_positive(sigma, "sigma")
    kp = lambda X, Y: k_scalar_product(X, Y, k, sigma, sigma)

    def residual(X, Y):
        if model.kind == "discrete":
            r = kp(S.apply(X), S.apply(Y)) - kp(X, Y)
        else:
            r = kp(S.apply(X), Y) + kp(X, S.apply(Y))
        scale = np.sqrt(abs(kp(X, X)) * abs(kp(Y, Y)))
        return abs(r) / scale

    ops = decomp.schrodinger_span()
    worst = max((residual(X, Y) for X in ops for Y in ops), default=0.0)
    rng = np.random.default_rng(seed)
    N = model.dim
    info = []
    for _ in range(n_random):
        X, Y = (rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N)) for _ in range(2))
        info.append(float(residual(X, Y)))
    return IsometryReport([check("k_isometry", worst, tol, pairs=len(ops) ** 2)], info)


def asymptotic_master_check(model, sigma, decomp=None, tol=1e-8) -> List[Check]:
    """``L(X) sigma^{-1} = i [X sigma^{-1}, H]`` for every attractor ``X``."""
    if model.kind != "continuous":
        raise TypeError("the asymptotic master equation applies to continuous models")
    decomp = decomp or decompose(model)
    S = generator_schrodinger(model)
    sinv = np.linalg.inv(require_strictly_positive(sigma, "sigma"))
    H = model.hamiltonian
    out = []
    for b, basis in enumerate(decomp.schrodinger_bases):
        for i, X in enumerate(basis):
            Y = X @ sinv
            lhs = S.apply(X) @ sinv
            rhs = 1j * (Y @ H - H @ Y)
            scale = max(1.0, frob(Y))
            out.append(check(f"master[{b},{i}]", frob(lhs - rhs) / scale, tol,
                             eigenvalue=[float(decomp.eigenvalues[b].real),
                                         float(decomp.eigenvalues[b].imag)],
                             lhs_norm=frob(lhs), rhs_norm=frob(rhs)))
    return out
