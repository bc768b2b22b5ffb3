"""Acceptance criteria, one test per criterion.

Run ``pytest tests/test_acceptance.py`` to see a PASS/FAIL line for each
criterion in the terminal summary.
"""
import time

import numpy as np
import pytest

from qmpa import catalog
from qmpa.asymptotics import (
    asymptotic_master_check,
    build_propagator,
    convergence_report,
    k_isometry_check,
    reversal_checks,
)
from qmpa.duality import dual_basis, k_orthogonality_report
from qmpa.errors import NoFaithfulTState
from qmpa.gibbs import HermitianAttractorBasis, coeffs_form2, state_from_form1, state_from_form2
from qmpa.models import ContinuousModel
from qmpa.operators import MonotoneFunction, frob
from qmpa.spectral import decompose, projector_distance, second_modulus
from qmpa.structure import cross_validate
from qmpa.tstate import commutant_check, find_tstate, verify_tstate

PHI, PSI = catalog.PHI, catalog.PSI
KB = catalog.ketbra
KS = ["power:0.5", "power:1", "log1p"]


@pytest.fixture(scope="module")
def cnot_file():
    return catalog.load_bundled("cnot_ruo")


@pytest.fixture(scope="module")
def jump_file():
    return catalog.load_bundled("jump_lindblad")


def _block(decomp, lam):
    return decomp.index_of(lam, tol=1e-8)


def test_criterion_01_cnot_attractors():
    start = time.perf_counter()
    model = catalog.load_bundled("cnot_ruo")
    d = decompose(model)
    elapsed = time.perf_counter() - start
    assert d.total_dimension == 6
    assert sum(len(b) for b in d.heisenberg_bases) == 6
    one, minus = _block(d, 1.0), _block(d, -1.0)
    assert d.multiplicities[one] == 5 and d.multiplicities[minus] == 1
    printed = [np.eye(4), KB(PHI, PHI), KB(PSI, PSI), KB(PHI, PSI), KB(PSI, PHI)]
    for bases in (d.schrodinger_bases, d.heisenberg_bases):
        assert projector_distance(bases[one], printed) <= 1e-8
        assert projector_distance(bases[minus], [catalog.X_MINUS_ONE]) <= 1e-8
    assert elapsed < 1.0


def test_criterion_02_cnot_tstate(cnot_file):
    sigma = (np.eye(4) + KB(PHI, PHI)) / 5
    cert = verify_tstate(cnot_file, sigma)
    assert cert.stationary and cert.min_eig > 0
    X = KB(PHI, PSI)
    [(_, norm)] = commutant_check(sigma, [X])
    assert abs(norm - frob(X) / 5) <= 1e-10


def test_criterion_03_form_inequivalence():
    sigma = (np.eye(4) + KB(PHI, PHI)) / 5
    basis = HermitianAttractorBasis([KB(PSI, PHI) + KB(PHI, PSI)])
    rho1 = state_from_form2(basis, [1.0], sigma)
    rho2 = state_from_form1(basis, [1.0], sigma)
    assert frob(rho1 - rho2) > 1e-3


def test_criterion_04_jump_attractors():
    start = time.perf_counter()
    model = catalog.load_bundled("jump_lindblad")
    d = decompose(model)
    elapsed = time.perf_counter() - start
    X1, X2, Xp, Xm = catalog.jump_attractors()
    expected = {0j: ([X1, X2], 2), 1j: ([Xp], 1), -1j: ([Xm], 1)}
    assert len(d.eigenvalues) == 3
    for lam, (span, mult) in expected.items():
        b = _block(d, lam)
        assert d.multiplicities[b] == mult
        assert projector_distance(d.schrodinger_bases[b], span) <= 1e-8
    fixed = d.heisenberg_bases[_block(d, 0j)]
    assert projector_distance(fixed, [np.eye(4), catalog.jump_hamiltonian()]) <= 1e-8
    assert elapsed < 1.0


@pytest.mark.parametrize("s", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_criterion_05_gibbs_stationary_family(s):
    X1, X2, _, _ = catalog.jump_attractors()
    basis = HermitianAttractorBasis([np.eye(4), catalog.jump_hamiltonian()])
    rho = ((1 - s) * X1 + s * X2) / 3
    beta = coeffs_form2(rho, basis, catalog.jump_tstate()).coefficients[1]
    assert abs(beta - np.log(s / (1 - s))) <= 1e-8


@pytest.mark.parametrize("s", [-0.9, -0.5, 0.0, 0.5, 0.9])
def test_criterion_05_gibbs_rotating_family(s):
    X1, X2, Xp, Xm = catalog.jump_attractors()
    A_minus, A_plus = catalog.jump_observables()
    basis = HermitianAttractorBasis([np.eye(4), (A_plus + A_minus) / 2])
    rho = (X1 + X2 + s * Xp + s * Xm) / 6
    gamma = coeffs_form2(rho, basis, catalog.jump_tstate()).coefficients[1]
    assert abs(gamma - np.log((1 + s) / (1 - s))) <= 1e-8


def _oracle_models():
    bundled = [(catalog.load_bundled("cnot_ruo"), catalog.cnot_tstate()),
               (catalog.load_bundled("jump_lindblad"), catalog.jump_tstate())]
    return bundled + [(m, None) for m in catalog.random_trace_preserving_models(20)]


def test_criterion_06_oracle_equivalence():
    models = _oracle_models()
    assert {m.dim for m, _ in models[2:]} == {2, 3, 4}
    worst = 0.0
    for model, sigma in models:
        d = decompose(model)
        sigma = sigma if sigma is not None else find_tstate(model, d).sigma
        rep = cross_validate(model, sigma, d, raise_on_mismatch=False)
        assert rep.mode == "equality"
        worst = max(worst, max(c.residual for c in rep.checks))
    assert worst <= 1e-8


def test_criterion_07_reversal(cnot_file):
    sigma = catalog.cnot_tstate()
    d = decompose(cnot_file)
    assert max(c.residual for c in reversal_checks(cnot_file, sigma, d)) <= 1e-8
    assert k_isometry_check(cnot_file, sigma, decomp=d).passed


@pytest.mark.parametrize("k_name", KS)
def test_criterion_08_duality(cnot_file, jump_file, k_name):
    k = MonotoneFunction.parse(k_name)
    for model, sigma in ((cnot_file, catalog.cnot_tstate()), (jump_file, catalog.jump_tstate())):
        d = decompose(model)
        db = dual_basis(d, k, sigma, sigma)
        assert np.abs(db.pairing_matrix() - np.eye(d.total_dimension)).max() <= 1e-8
        assert k_orthogonality_report(d, k, sigma, sigma).max_cross_block <= 1e-8


def test_criterion_09_convergence(cnot_file):
    d = decompose(cnot_file)
    prop = build_propagator(d, catalog.cnot_tstate())
    r = second_modulus(d.generator, "discrete")
    rng = np.random.default_rng(9)
    for _ in range(10):
        rep = convergence_report(cnot_file, prop, catalog.random_state(4, rng), horizon=50)
        assert rep.points[50][1] <= 1e-8
        assert abs(rep.rate - r) <= 0.05


def test_criterion_10_master_equation(jump_file):
    sigma = catalog.jump_tstate()
    checks = asymptotic_master_check(jump_file, sigma)
    assert len(checks) == 4 and max(c.residual for c in checks) <= 1e-8
    hp, hm = catalog.jump_operators()
    off = ContinuousModel(4, np.zeros((4, 4)), [np.sqrt(2) * hp, hm])
    d = decompose(off)
    assert d.total_dimension == 4 and all(abs(lam) <= 1e-9 for lam in d.eigenvalues)
    for c in asymptotic_master_check(off, sigma, d):
        assert c.detail["lhs_norm"] <= 1e-10 and c.detail["rhs_norm"] <= 1e-10


def test_criterion_11_negative_control():
    model = catalog.amplitude_damping(0.3)
    d = decompose(model)
    assert len(d.eigenvalues) == 1 and abs(d.eigenvalues[0] - 1) <= 1e-12
    with pytest.raises(NoFaithfulTState) as info:
        find_tstate(model, d)
    assert info.value.rank == 1
