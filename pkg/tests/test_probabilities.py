"""Softmax distribution: pinned examples and algebraic invariants."""

import math

import pytest
from hypothesis import given, strategies as st

from gnrpa.engine import move_probabilities
from gnrpa.errors import ContractError

finite_reals = st.floats(min_value=-30, max_value=30, allow_nan=False)
taus = st.floats(min_value=0.1, max_value=10, allow_nan=False)


def weight_bias_lists(min_size=1, max_size=8):
    return st.integers(min_value=min_size, max_value=max_size).flatmap(
        lambda n: st.tuples(
            st.lists(finite_reals, min_size=n, max_size=n),
            st.lists(finite_reals, min_size=n, max_size=n),
        )
    )


def test_uniform_when_everything_is_zero():
    assert move_probabilities([0, 0, 0], [0, 0, 0], 1.0) == pytest.approx(
        [1 / 3, 1 / 3, 1 / 3], abs=1e-15
    )


def test_two_move_softmax_analytic():
    e = math.e
    probs = move_probabilities([1, 0], [0, 0], 1.0)
    assert probs == pytest.approx([e / (1 + e), 1 / (1 + e)], abs=1e-12)
    assert probs == pytest.approx([0.731059, 0.268941], abs=1e-6)


def test_bias_evens_out_a_weight_advantage():
    assert move_probabilities([1, 0], [0, 1], 1.0) == pytest.approx([0.5, 0.5], abs=1e-15)


def test_temperature_divides_weights():
    assert move_probabilities([2, 0], [0, 0], 2.0) == pytest.approx(
        move_probabilities([1, 0], [0, 0], 1.0), abs=1e-15
    )


def test_empty_input_rejected():
    with pytest.raises(ContractError):
        move_probabilities([], [], 1.0)


def test_mismatched_lengths_rejected():
    with pytest.raises(ContractError):
        move_probabilities([1.0], [0.0, 0.0], 1.0)


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), -float("inf")])
def test_non_finite_inputs_rejected(bad):
    with pytest.raises(ContractError):
        move_probabilities([bad, 0.0], [0.0, 0.0], 1.0)
    with pytest.raises(ContractError):
        move_probabilities([0.0, 0.0], [bad, 0.0], 1.0)


@pytest.mark.parametrize("bad_tau", [0.0, -1.0, float("nan")])
def test_bad_temperature_rejected(bad_tau):
    with pytest.raises(ContractError):
        move_probabilities([0.0], [0.0], bad_tau)


def test_extreme_weights_survive_overflow():
    probs = move_probabilities([1000.0, -1000.0], [0.0, 0.0], 1.0)
    assert probs[0] == pytest.approx(1.0)
    assert probs[1] == pytest.approx(0.0)
    assert all(math.isfinite(p) for p in probs)


@given(weight_bias_lists(), taus)
def test_normalized_distribution(wb, tau):
    weights, biases = wb
    probs = move_probabilities(weights, biases, tau)
    assert abs(sum(probs) - 1.0) < 1e-9
    assert all(0.0 <= p <= 1.0 for p in probs)


@given(weight_bias_lists(min_size=2), taus, finite_reals)
def test_shift_invariance(wb, tau, shift):
    weights, biases = wb
    base = move_probabilities(weights, biases, tau)
    shifted = move_probabilities([w + shift for w in weights], biases, tau)
    assert shifted == pytest.approx(base, abs=1e-12)


@given(weight_bias_lists(min_size=2), taus, st.floats(min_value=0.1, max_value=10))
def test_scale_invariance(wb, tau, kappa):
    weights, biases = wb
    base = move_probabilities(weights, biases, tau)
    scaled = move_probabilities([w * kappa for w in weights], biases, tau * kappa)
    assert scaled == pytest.approx(base, abs=1e-12)
