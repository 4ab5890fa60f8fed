import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regfid.channel import fidelity, identity_channel, random_channel, random_state, tensor_power
from regfid.errors import DimensionMismatch, LinearlyDependentPair
from regfid.optimize import OptimizerOptions, nu_infty
from regfid.pauli import pauli_to_kraus, sigma_eigenstates
from regfid.symmetric import expand, symmetric_fidelity
from regfid.trial import (
    StatePair,
    build_trial_state,
    channel_pair_coefficients,
    fix_phase,
    kraus_vectors,
    normalization,
    trial_dicke_coefficients,
    trial_fidelity,
    trial_fidelity_root,
    trial_log_fidelity,
)

FIG1 = pauli_to_kraus((0.1, 0.2, 0.3, 0.4))
PM = StatePair(*sigma_eigenstates(1))


def test_state_pair_validation():
    with pytest.raises(DimensionMismatch):
        StatePair(np.array([1.0, 0.0]), np.array([1.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        StatePair(np.array([1.0, 1.0]), np.array([1.0, 0.0]))
    assert StatePair(np.array([1.0, 0.0]), np.array([1j, 0.0])).linearly_dependent
    assert not PM.linearly_dependent


def test_pair_coefficient_examples():
    ident = channel_pair_coefficients(identity_channel(2), StatePair(np.array([1.0, 0.0]), np.array([0.0, 1.0])))
    assert ident[0, 1, 1, 0] == pytest.approx(0.0)
    coeffs = channel_pair_coefficients(FIG1, PM)
    assert coeffs[0, 1, 1, 0] == pytest.approx(0.7, abs=1e-14)


def test_pair_coefficients_match_kraus_vectors():
    rng = np.random.default_rng(0)
    ch = random_channel(3, 3, rng)
    pair = StatePair(random_state(3, rng), random_state(3, rng))
    coeffs = channel_pair_coefficients(ch, pair)
    kv = kraus_vectors(ch, pair)
    for i, j, k, l in np.ndindex(2, 2, 2, 2):
        assert coeffs[i, j, k, l] == pytest.approx(np.vdot(kv.r(l + 1, k + 1), kv.r(i + 1, j + 1)), abs=1e-14)


def test_normalization():
    assert normalization(PM, 1) == pytest.approx(1.0)
    overlap_pair = StatePair(np.array([1.0, 0.0]), np.array([1.0, 1.0]) / np.sqrt(2))
    assert normalization(overlap_pair, 2) == pytest.approx(1.5**-0.5)
    assert normalization(overlap_pair, 4) == pytest.approx(1.25**-0.5)


def test_trial_fidelity_examples():
    assert trial_fidelity(FIG1, PM, 1) == pytest.approx(0.5, abs=1e-14)
    assert trial_fidelity(FIG1, PM, 2) == pytest.approx(0.3, abs=1e-14)
    assert trial_fidelity_root(FIG1, PM, 2) == pytest.approx(0.547722557505166, abs=1e-14)
    assert trial_fidelity_root(FIG1, PM, 20) == pytest.approx(0.676155431724733, abs=1e-12)
    assert trial_fidelity(identity_channel(2), PM, 5) == pytest.approx(1.0)


def test_trial_fidelity_large_n_is_finite():
    root = trial_fidelity_root(FIG1, PM, 10**6)
    assert root == pytest.approx(0.7, abs=1e-5)
    assert np.isfinite(trial_log_fidelity(FIG1, PM, 10**7))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6))
def test_trial_closed_form_matches_full_space(seed, n):
    rng = np.random.default_rng(seed)
    ch = random_channel(2, int(rng.integers(1, 5)), rng)
    pair = StatePair(random_state(2, rng), random_state(2, rng))
    full = fidelity(tensor_power(ch, n), build_trial_state(pair, n))
    assert trial_fidelity(ch, pair, n) == pytest.approx(full, abs=1e-10)


def test_trial_state_in_symmetric_route():
    rng = np.random.default_rng(1)
    ch = random_channel(2, 3, rng)
    pair = StatePair(random_state(2, rng), random_state(2, rng))
    for n in (3, 8):
        c = trial_dicke_coefficients(pair, n)
        assert symmetric_fidelity(ch, c) == pytest.approx(trial_fidelity(ch, pair, n), abs=1e-10)
    assert np.allclose(expand(trial_dicke_coefficients(pair, 4)), build_trial_state(pair, 4))


def test_trial_dicke_examples():
    c = trial_dicke_coefficients(PM, 2)
    assert abs(c[1]) == pytest.approx(0.0, abs=1e-15)
    assert np.abs(c) == pytest.approx([1 / np.sqrt(2), 0.0, 1 / np.sqrt(2)])
    ghz = trial_dicke_coefficients(StatePair(np.array([1.0, 0.0]), np.array([0.0, 1.0])), 3)
    assert ghz == pytest.approx([1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)])


def test_linearly_dependent_pair():
    pair = StatePair(np.array([1.0, 0.0]), np.array([-1.0, 0.0]))
    assert np.allclose(build_trial_state(pair, 3), np.eye(8)[0])
    assert trial_fidelity(FIG1, pair, 3) == pytest.approx(0.5**3)
    with pytest.raises(LinearlyDependentPair):
        trial_dicke_coefficients(pair, 3)


def test_fix_phase():
    plain = channel_pair_coefficients(FIG1, PM)[0, 1, 0, 1]
    assert plain.real >= 0 and abs(plain.imag) < 1e-15
    assert np.allclose(fix_phase(FIG1, PM).phi1, PM.phi1)

    rng = np.random.default_rng(2)
    ch = random_channel(2, 3, rng)
    pair = StatePair(random_state(2, rng), random_state(2, rng))
    before = channel_pair_coefficients(ch, pair)[0, 1, 0, 1]
    after = channel_pair_coefficients(ch, fix_phase(ch, pair))[0, 1, 0, 1]
    assert after.real == pytest.approx(abs(before), abs=1e-14)
    assert abs(after.imag) < 1e-14


def test_trial_root_converges_to_nu_infty():
    rng = np.random.default_rng(3)
    ch = random_channel(2, 3, rng)
    res = nu_infty(ch, OptimizerOptions(restarts=5))
    pair = fix_phase(ch, StatePair(res.phi1, res.phi2))
    assert trial_fidelity_root(ch, pair, 10**4) == pytest.approx(res.value, rel=1e-2)
