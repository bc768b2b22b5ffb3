import pytest

from qmpa import catalog
from qmpa.checks import all_passed, check
from qmpa.verify import run_suite


def test_check_helper():
    c = check("x", 1e-9, 1e-8, note="ok")
    assert c.passed and c.as_dict()["detail"] == {"note": "ok"}
    assert not check("y", 2.0, 1.0).passed
    assert all_passed([c]) and not all_passed([c, check("y", 2.0, 1.0)])


@pytest.mark.parametrize("model", [catalog.cnot_ruo(), catalog.jump_lindblad(), catalog.depolarizing(0.3),
                                   catalog.identity_channel(2)] + catalog.random_trace_preserving_models(5, seed=8))
def test_suite_passes(model):
    result = run_suite(model)
    assert result.passed and not result.partial and result.exit_code == 0, \
        [c.name for c in result.checks if not c.passed] + result.errors


def test_suite_partial_without_tstate():
    result = run_suite(catalog.amplitude_damping(0.5))
    assert result.partial and result.exit_code == 5
    assert result.errors[0]["code"] == "no_faithful_tstate"
    assert all(c.passed for c in result.checks)


def test_suite_is_deterministic():
    a = run_suite(catalog.cnot_ruo(), seed=3).as_dict()
    b = run_suite(catalog.cnot_ruo(), seed=3).as_dict()
    assert a == b
