import numpy as np
import pytest
import scipy.linalg as la

from qmpa import catalog
from qmpa.asymptotics import (
    asymptotic_master_check,
    asymptotic_observable,
    asymptotic_state,
    build_propagator,
    convergence_report,
    fit_decay_rate,
    k_isometry_check,
    petz_recovery,
    projection,
    reversal_checks,
)
from qmpa.duality import k_scalar_product
from qmpa.models import ContinuousModel, generator_heisenberg, generator_schrodinger
from qmpa.operators import MonotoneFunction, frob, op_power
from qmpa.spectral import decompose, second_modulus, span_projector
from qmpa.tstate import find_tstate


@pytest.fixture(scope="module")
def cnot_prop(cnot_decomp, cnot_sigma):
    return build_propagator(cnot_decomp, cnot_sigma)


@pytest.fixture(scope="module")
def jump_prop(jump_decomp, jump_sigma):
    return build_propagator(jump_decomp, jump_sigma)


@pytest.mark.parametrize("n", [0, 1, 7, 40])
def test_depolarizing_collapses_to_maximally_mixed(rng, n):
    model = catalog.depolarizing(0.4)
    prop = build_propagator(decompose(model), np.eye(2) / 2)
    rho = catalog.random_state(2, rng)
    assert np.allclose(asymptotic_state(prop, rho, step=n), np.eye(2) / 2)


@pytest.mark.parametrize("s", [0.0, 0.3, 1.0])
@pytest.mark.parametrize("t", [0.0, 0.7, 5.0])
def test_stationary_family_is_constant(jump_prop, s, t):
    X1, X2, _, _ = catalog.jump_attractors()
    rho = (s * X1 + (1 - s) * X2) / 3
    assert np.allclose(asymptotic_state(jump_prop, rho, time=t), rho, atol=1e-10)


@pytest.mark.parametrize("t", [0.4, 1.3, 3.0])
def test_rotating_component_phase(jump_prop, t):
    X1, X2, Xp, Xm = catalog.jump_attractors()
    rho = (X1 + X2 + 0.5 * Xp + 0.5 * Xm) / 6
    out = asymptotic_state(jump_prop, rho, time=t)
    expected = (X1 + X2 + 0.5 * np.exp(1j * t) * Xp + 0.5 * np.exp(-1j * t) * Xm) / 6
    assert np.allclose(out, expected, atol=1e-10)


def test_continuous_state_matches_exact_evolution(jump, jump_prop, rng):
    # rho0 already in the attractor span evolves exactly like the semigroup
    X1, X2, Xp, Xm = catalog.jump_attractors()
    rho = (X1 + X2 + 0.3j * Xp - 0.3j * Xm) / 6
    L = generator_schrodinger(jump).matrix
    t = 2.1
    exact = (la.expm(t * L) @ rho.reshape(-1, order="F")).reshape(4, 4, order="F")
    assert np.allclose(asymptotic_state(jump_prop, rho, time=t), exact, atol=1e-10)


@pytest.mark.parametrize("n", [0, 3, 11])
def test_identity_observable(cnot_prop, n):
    assert np.allclose(asymptotic_observable(cnot_prop, np.eye(4), step=n), np.eye(4))


@pytest.mark.parametrize("t", [0.0, 1.0, 4.5])
def test_hamiltonian_is_conserved(jump_prop, t):
    H = catalog.jump_hamiltonian()
    assert np.allclose(asymptotic_observable(jump_prop, H, time=t), H, atol=1e-10)
    assert np.allclose(asymptotic_observable(jump_prop, np.eye(4), time=t), np.eye(4), atol=1e-10)


def test_mean_value_duality(cnot_prop, jump_prop, rng):
    for _ in range(10):
        A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = catalog.random_state(4, rng)
        n, t = int(rng.integers(0, 30)), float(rng.uniform(0, 10))
        for prop, kw in ((cnot_prop, {"step": n}), (jump_prop, {"time": t})):
            a = np.trace(asymptotic_observable(prop, A, **kw) @ rho)
            b = np.trace(A @ asymptotic_state(prop, rho, **kw))
            assert abs(a - b) <= 1e-8 * max(1, frob(A))


def test_observable_matches_exact_heisenberg_limit(cnot, cnot_prop, rng):
    # T^dagger^n(A) approaches the asymptotic observable
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    Th = generator_heisenberg(cnot)
    B = A
    for _ in range(60):
        B = Th(B)
    assert frob(B - asymptotic_observable(cnot_prop, A, step=60)) <= 1e-10 * frob(A)


@pytest.mark.parametrize("which", ["cnot", "jump"])
def test_projection_properties(request, which, rng):
    d = request.getfixturevalue(f"{which}_decomp")
    prop = request.getfixturevalue(f"{which}_prop")
    for X in d.schrodinger_span():
        assert frob(projection(prop, X) - X) <= 1e-8 * frob(X)
    P = span_projector(d.schrodinger_span())
    for _ in range(5):
        rho = catalog.random_state(4, rng)
        p = projection(prop, rho)
        assert frob(projection(prop, p) - p) <= 1e-8
        assert abs(np.trace(p) - 1) <= 1e-10
        assert np.allclose(p, p.conj().T, atol=1e-10)
        v = p.reshape(-1, order="F")
        assert np.linalg.norm(v - P @ v) <= 1e-8


def test_sigma_free_propagator_agrees(cnot_decomp, cnot_prop, rng):
    free = build_propagator(cnot_decomp)
    assert np.allclose(free.matrix(step=3), cnot_prop.matrix(step=3), atol=1e-10)


def test_convergence_on_cnot(cnot, cnot_prop, cnot_decomp, rng):
    rho = catalog.random_state(4, rng)
    rep = convergence_report(cnot, cnot_prop, rho, horizon=50)
    assert rep.points[-1][1] < 1e-10
    r = second_modulus(cnot_decomp.generator, "discrete")
    assert rep.rate <= r + 1e-6
    # geometric bound with the fitted constant
    C = max(d / r ** n for n, d in rep.points if d > 1e-13)
    assert all(d <= C * (r + 1e-6) ** n + 1e-13 for n, d in rep.points)


def test_convergence_zero_inside_attractor_span(cnot, cnot_prop, cnot_sigma):
    rep = convergence_report(cnot, cnot_prop, cnot_sigma, horizon=10)
    assert max(d for _, d in rep.points) <= 1e-12
    assert rep.rate is None


def test_convergence_identity_channel(rng):
    model = catalog.identity_channel(3)
    prop = build_propagator(decompose(model), np.eye(3) / 3)
    rep = convergence_report(model, prop, catalog.random_state(3, rng), horizon=5)
    assert max(d for _, d in rep.points) <= 1e-12


def test_convergence_continuous(jump, jump_prop, rng):
    rep = convergence_report(jump, jump_prop, catalog.random_state(4, rng), horizon=200)
    assert rep.points[-1][1] < rep.points[0][1] * 1e-3
    assert rep.rate < 0


def test_fit_decay_rate_recovers_slope():
    pts = [(n, 3.0 * 0.7 ** n) for n in range(20)]
    assert np.isclose(fit_decay_rate(pts, "discrete"), 0.7)
    pts = [(0.1 * n, np.exp(-2.0 * 0.1 * n)) for n in range(20)]
    assert np.isclose(fit_decay_rate(pts, "continuous"), -2.0)


def test_petz_of_unitary_is_inverse(rng):
    U = catalog.random_unitary(3, rng)
    rec = petz_recovery(catalog.unitary_channel(U), np.eye(3) / 3)
    (K,) = rec.kraus
    assert np.allclose(K, U.conj().T)


def test_petz_of_unital_is_adjoint(cnot, rng):
    model = catalog.depolarizing(0.3)
    rec = generator_schrodinger(petz_recovery(model, np.eye(2) / 2))
    X = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.allclose(rec(X), generator_heisenberg(model)(X))


def test_petz_is_adjoint_for_symmetric_product(cnot, cnot_sigma, rng):
    # T^ddagger is the adjoint of T for (X, sigma^-1/2 Y sigma^-1/2)
    s = op_power(cnot_sigma, -0.5)
    prod = lambda X, Y: np.trace(X.conj().T @ s @ Y @ s)
    T = generator_schrodinger(cnot)
    R = generator_schrodinger(petz_recovery(cnot, cnot_sigma))
    X, Y = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(2))
    assert np.isclose(prod(R(X), Y), prod(X, T(Y)))


def test_petz_rejects_continuous(jump, jump_sigma):
    with pytest.raises(TypeError):
        petz_recovery(jump, jump_sigma)


def test_reversal_on_cnot(cnot, cnot_sigma, cnot_decomp):
    checks = reversal_checks(cnot, cnot_sigma, cnot_decomp)
    assert all(c.passed for c in checks)
    assert max(c.residual for c in checks) <= 1e-8


@pytest.mark.parametrize("model", catalog.random_trace_preserving_models(6, seed=3))
def test_reversal_on_random_models(model):
    d = decompose(model)
    if model.kind != "discrete":
        pytest.skip("recovery is defined for discrete models")
    sigma = find_tstate(model, d).sigma
    assert all(c.passed for c in reversal_checks(model, sigma, d))


@pytest.mark.parametrize("which", ["cnot", "jump"])
@pytest.mark.parametrize("k_name", ["power:0.5", "log1p"])
def test_k_isometry(request, which, k_name):
    model = request.getfixturevalue(which)
    rep = k_isometry_check(model, request.getfixturevalue(f"{which}_sigma"),
                           k=MonotoneFunction.parse(k_name),
                           decomp=request.getfixturevalue(f"{which}_decomp"))
    assert rep.passed


def test_k_isometry_fails_off_attractors(cnot, cnot_sigma, cnot_decomp):
    rep = k_isometry_check(cnot, cnot_sigma, decomp=cnot_decomp, n_random=5)
    assert max(rep.non_attractor) > 1e-3


def test_k_isometry_continuous_finite_difference(jump, jump_sigma, jump_decomp):
    # independent oracle: the product is constant along exp(tL) on attractors
    L = generator_schrodinger(jump).matrix
    E = la.expm(0.37 * L)
    k = MonotoneFunction.power(0.5)
    ev = lambda X: (E @ X.reshape(-1, order="F")).reshape(4, 4, order="F")
    ops = jump_decomp.schrodinger_span()
    for X in ops:
        for Y in ops:
            a = k_scalar_product(ev(X), ev(Y), k, jump_sigma, jump_sigma)
            b = k_scalar_product(X, Y, k, jump_sigma, jump_sigma)
            assert abs(a - b) <= 1e-8 * max(1, abs(b))


def test_k_isometry_identity_channel(rng):
    model = catalog.identity_channel(2)
    rep = k_isometry_check(model, np.eye(2) / 2, n_random=4)
    assert rep.passed and max(rep.non_attractor) <= 1e-12


def test_master_check_jump(jump, jump_sigma, jump_decomp):
    checks = asymptotic_master_check(jump, jump_sigma, jump_decomp)
    assert len(checks) == 4 and all(c.passed for c in checks)


def test_master_check_rotating_attractor_value(jump, jump_sigma):
    _, _, Xp, _ = catalog.jump_attractors()
    S = generator_schrodinger(jump)
    sinv = np.linalg.inv(jump_sigma)
    assert np.allclose(S(Xp) @ sinv, 1j * Xp @ sinv)


def test_master_check_without_hamiltonian(jump_sigma):
    hp, hm = catalog.jump_operators()
    model = ContinuousModel(4, np.zeros((4, 4)), [np.sqrt(2) * hp, hm])
    d = decompose(model)
    assert all(abs(lam) <= 1e-9 for lam in d.eigenvalues)
    checks = asymptotic_master_check(model, jump_sigma, d)
    assert all(c.passed and c.detail["lhs_norm"] <= 1e-10 for c in checks)


def test_master_check_rejects_discrete(cnot, cnot_sigma):
    with pytest.raises(TypeError):
        asymptotic_master_check(cnot, cnot_sigma)
