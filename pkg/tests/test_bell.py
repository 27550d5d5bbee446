import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hashrep.bell import (
    BellDiagonal,
    NoiseParams,
    NormalizationError,
    WernerParams,
    apply_ldn_one_qubit,
    depolarize,
    effective_input,
    entropy,
    output_noise_fidelity,
    swap,
    twirl_to_werner,
    werner_entropy,
)


@st.composite
def bell_states(draw):
    w = [draw(st.floats(0.0, 1.0)) for _ in range(4)]
    total = sum(w)
    if total < 1e-6:
        return BellDiagonal.perfect()
    return BellDiagonal(tuple(v / total for v in w))


weights = st.floats(0.0, 1.0)


def test_rejects_unnormalized():
    with pytest.raises(NormalizationError):
        BellDiagonal((0.5, 0.2, 0.2, 0.2))
    with pytest.raises(NormalizationError):
        BellDiagonal((1.1, -0.1, 0.0, 0.0))
    with pytest.raises(NormalizationError):
        BellDiagonal((1.0, 0.0, 0.0))


def test_werner_roundtrip():
    w = WernerParams(0.9)
    assert w.q == pytest.approx(13 / 15)
    assert WernerParams.from_weight(w.q).F == pytest.approx(0.9)
    assert BellDiagonal.werner(0.9).is_werner()
    assert twirl_to_werner(BellDiagonal((0.9, 0.05, 0.03, 0.02))).F == 0.9


def test_entropy_against_direct_sum():
    for F in (0.81, 0.9, 0.95, 0.99):
        p = BellDiagonal.werner(F).p
        assert werner_entropy(F) == pytest.approx(oracles.entropy_bits(p), abs=1e-14)
    assert entropy(BellDiagonal.perfect()) == 0.0
    assert entropy(BellDiagonal((0.25,) * 4)) == pytest.approx(2.0)


def test_output_noise_fidelity():
    assert output_noise_fidelity(NoiseParams(0.99)) == pytest.approx(0.985075, abs=1e-12)
    assert output_noise_fidelity(NoiseParams(1.0)) == 1.0


@settings(max_examples=200, deadline=None)
@given(bell_states(), st.floats(0.0, 1.0), st.integers(0, 1))
def test_ldn_matches_density_matrix(s, p, qubit):
    got = apply_ldn_one_qubit(s, NoiseParams(p)).p
    np.testing.assert_allclose(got, oracles.ldn_oracle(s.p, p, qubit), atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(bell_states(), bell_states())
def test_swap_matches_density_matrix(a, b):
    np.testing.assert_allclose(swap(a, b).p, oracles.swap_oracle(a.p, b.p), atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(bell_states(), bell_states(), bell_states())
def test_swap_commutative_associative(a, b, c):
    np.testing.assert_allclose(swap(a, b).p, swap(b, a).p, atol=1e-14)
    np.testing.assert_allclose(swap(swap(a, b), c).p, swap(a, swap(b, c)).p, atol=1e-14)


@settings(max_examples=200, deadline=None)
@given(bell_states(), bell_states(), weights, weights)
def test_outputs_stay_normalized(a, b, w1, w2):
    for s in (swap(a, b), depolarize(a, w1), effective_input(b, NoiseParams(w2))):
        assert math.fsum(s.p) == pytest.approx(1.0, abs=1e-12)
        assert min(s.p) >= 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(0.25, 1.0), weights, weights)
def test_werner_weight_multiplicative(F, p1, p2):
    s = BellDiagonal.werner(F)
    q = WernerParams(F).q
    once = apply_ldn_one_qubit(apply_ldn_one_qubit(s, NoiseParams(p1)), NoiseParams(p2))
    assert once.is_werner(1e-12)
    assert WernerParams(once.fidelity()).q == pytest.approx(q * p1 * p2, abs=1e-12)
    # swapping Werner pairs multiplies weights too
    F2 = 0.25 + 0.75 * p1
    out = swap(s, BellDiagonal.werner(F2))
    assert WernerParams(out.fidelity()).q == pytest.approx(q * WernerParams(F2).q, abs=1e-12)


def test_effective_input_is_two_layers():
    s = BellDiagonal.werner(0.95)
    got = effective_input(s, NoiseParams(0.99))
    ref = oracles.bell_weights(
        oracles.depolarize_qubit(
            oracles.depolarize_qubit(oracles.bell_diagonal_rho(s.p), 0, 0.99, 2), 1, 0.99, 2
        )
    )
    np.testing.assert_allclose(got.p, ref, atol=1e-14)
    assert got.fidelity() == pytest.approx(0.93607, abs=1e-12)


def test_noise_params_domain():
    with pytest.raises(ValueError):
        NoiseParams(1.5)
    with pytest.raises(ValueError):
        depolarize(BellDiagonal.perfect(), -0.1)
