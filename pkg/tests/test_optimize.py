import numpy as np
import pytest

from regfid.channel import apply, compose, adjoint, fidelity, identity_channel, make_channel, random_channel
from regfid.errors import NonFiniteObjective
from regfid.optimize import (
    OptimizerOptions,
    bb_ascent,
    bb_maximize,
    max_fidelity,
    nu_2,
    nu_2_direct,
    nu_infty,
    regularized_fidelity_full,
)
from regfid.pauli import epsilon_channel, pauli_to_kraus, sigma_eigenstates

FIG1 = (0.1, 0.2, 0.3, 0.4)
FAST = OptimizerOptions(restarts=5)


def rayleigh(h):
    def objective(x):
        hx = h @ x
        return float(np.vdot(x, hx).real), hx

    return objective


@pytest.mark.parametrize(
    "kwargs",
    [dict(restarts=0), dict(max_iters=0), dict(grad_tol=0.0), dict(step_min=0.0), dict(step_min=2.0, step_max=1.0)],
)
def test_options_validation(kwargs):
    with pytest.raises(ValueError):
        OptimizerOptions(**kwargs)


def test_rayleigh_quotient():
    res = bb_maximize(rayleigh(np.diag([1.0, 2.0, 3.0]).astype(complex)), 3, FAST)
    assert res.value == pytest.approx(3.0, abs=1e-12)
    assert abs(res.argmax[2]) == pytest.approx(1.0, abs=1e-6)
    assert res.converged and 1 <= res.restarts_used <= 5


def test_non_finite_objective_raises():
    def bad(x):
        return float("nan"), x

    with pytest.raises(NonFiniteObjective):
        bb_ascent(bad, np.array([1.0, 0.0], dtype=complex), FAST)


def test_blocks_keep_each_factor_normalized():
    h = np.diag([1.0, 2.0, 0.5, 4.0]).astype(complex)
    x0 = np.array([1, 1, 1, 1], dtype=complex) / np.sqrt(2)
    res = bb_ascent(rayleigh(h), x0, FAST, blocks=[2, 2])
    assert np.linalg.norm(res.argmax[:2]) == pytest.approx(1.0)
    assert np.linalg.norm(res.argmax[2:]) == pytest.approx(1.0)
    assert res.value == pytest.approx(6.0, abs=1e-10)


def test_max_fidelity_examples():
    assert max_fidelity(identity_channel(4), FAST).value == pytest.approx(1.0, abs=1e-12)
    assert max_fidelity(pauli_to_kraus(FIG1), FAST).value == pytest.approx(0.5, abs=1e-12)
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    assert max_fidelity(make_channel([q]), FAST).value == pytest.approx(1.0, abs=1e-10)


def test_regularized_fidelity_full_examples():
    assert regularized_fidelity_full(identity_channel(2), 3, FAST) == pytest.approx(1.0)
    assert regularized_fidelity_full(pauli_to_kraus(FIG1), 2, FAST) == pytest.approx(0.547722557505166, abs=1e-9)
    ch = pauli_to_kraus(epsilon_channel(1 / 21))
    assert regularized_fidelity_full(ch, 2, FAST) == pytest.approx(2 / 3, abs=1e-6)


def test_max_fidelity_is_seed_deterministic():
    ch = random_channel(3, 2, np.random.default_rng(1))
    opts = OptimizerOptions(restarts=3, seed=42)
    a, b = max_fidelity(ch, opts), max_fidelity(ch, opts)
    assert a.value == b.value and np.array_equal(a.argmax, b.argmax)


def test_nu_infty_case_b():
    ch = pauli_to_kraus(FIG1)
    value, phi1, phi2 = nu_infty(ch, FAST)
    assert value == pytest.approx(0.7, abs=1e-10)
    plus, minus = sigma_eigenstates(1)
    # either order of the sigma_1 eigenbasis is optimal
    overlaps = sorted([abs(np.vdot(plus, phi1)) ** 2, abs(np.vdot(minus, phi1)) ** 2])
    assert overlaps == pytest.approx([0.0, 1.0], abs=1e-8)
    assert abs(np.vdot(phi1, phi2)) == pytest.approx(0.0, abs=1e-6)
    assert np.vdot(phi1, apply(ch, np.outer(phi2, phi2.conj())) @ phi1).real == pytest.approx(value)


def test_nu_infty_case_a():
    value, phi1, phi2 = nu_infty(pauli_to_kraus((0.4, 0.1, 0.2, 0.3)), FAST)
    assert value == pytest.approx(0.7, abs=1e-10)
    assert abs(np.vdot(phi1, phi2)) == pytest.approx(1.0, abs=1e-6)
    assert max(abs(phi1[0]), abs(phi1[1])) == pytest.approx(1.0, abs=1e-6)


def test_nu_infty_identity_and_ascent_trace():
    res = nu_infty(identity_channel(2), FAST)
    assert res.value == pytest.approx(1.0)
    assert abs(np.vdot(res.phi1, res.phi2)) == pytest.approx(1.0, abs=1e-6)
    vals = np.array(nu_infty(random_channel(3, 3, np.random.default_rng(2)), FAST).ascent_values)
    assert np.all(np.diff(vals) >= -1e-12)


def test_nu_2_examples():
    assert nu_2(identity_channel(2), FAST) == pytest.approx(1.0)
    assert nu_2(pauli_to_kraus(FIG1), FAST) == pytest.approx(0.761577310586391, abs=1e-9)
    assert nu_2_direct(pauli_to_kraus(FIG1), FAST) == pytest.approx(0.761577310586391, abs=1e-9)


def test_nu_2_two_routes_random():
    rng = np.random.default_rng(3)
    for _ in range(5):
        ch = random_channel(2, int(rng.integers(1, 5)), rng)
        assert nu_2(ch, FAST) == pytest.approx(nu_2_direct(ch, FAST), abs=1e-8)


def test_upper_bound_on_random_channels():
    rng = np.random.default_rng(4)
    for _ in range(5):
        ch = random_channel(3, 2, rng)
        assert max_fidelity(ch, FAST).value <= nu_infty(ch, FAST).value + 1e-10


def test_nu_2_equals_self_composition_fidelity():
    ch = random_channel(2, 3, np.random.default_rng(5))
    res = max_fidelity(compose(adjoint(ch), ch), FAST)
    psi = res.argmax
    out = apply(ch, np.outer(psi, psi.conj()))
    assert np.trace(out @ out).real == pytest.approx(res.value, abs=1e-12)
    assert fidelity(compose(adjoint(ch), ch), psi) == pytest.approx(res.value)
