"""Chain validation, stationary distributions, reversibility detection, and
exact path sampling."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import switchstab as ss
from switchstab.markov import (
    AbsorbingState,
    BadRowSum,
    ChainPath,
    Generator,
    MarkovError,
    NegativeRate,
    Reducible,
    sample_path,
    stationary,
    reversibility,
    validate,
)
from switchstab.numerics import DenseMatrix

rates_2x2 = st.tuples(
    st.floats(min_value=0.05, max_value=50.0),
    st.floats(min_value=0.05, max_value=50.0),
)


class TestValidate:
    def test_accepts_valid_generator(self):
        g = validate([[-2.0, 2.0], [1.0, -1.0]])
        assert g.N == 2 and g.irreducible
        with pytest.raises(ValueError):
            g.rates.entries[0, 0] = 5.0  # read-only

    def test_rejects_non_square_and_single_mode(self):
        with pytest.raises(ValueError):
            validate(np.ones((2, 3)))
        with pytest.raises(ValueError):
            validate([[0.0]])

    def test_negative_rate(self):
        with pytest.raises(NegativeRate) as err:
            validate([[-1.0, 1.0], [-0.5, 0.5]])
        assert err.value.pair == (1, 0)

    def test_bad_row_sum(self):
        with pytest.raises(BadRowSum) as err:
            validate([[-2.0, 2.0], [1.0, -1.5]])
        assert err.value.row == 1

    def test_reducible_chain(self):
        with pytest.raises(Reducible) as err:
            validate([[0.0, 0.0, 0.0], [1.0, -2.0, 1.0], [0.0, 1.0, -1.0]])
        i, j = err.value.pair
        assert i != j

    def test_row_sum_tolerance_scales_with_rates(self):
        # 1e-10 absolute error on rates of magnitude 1e4 is within 1e-12 relative
        q = np.array([[-1e4, 1e4], [2e4, -2e4 + 1e-10]])
        validate(q)


class TestStationary:
    def test_three_mode_frozen_values(self):
        g = validate([[-3.0, 0.0, 3.0], [1.0, -3.0, 2.0], [1.0, 2.0, -3.0]])
        dist = stationary(g)
        assert dist.mu == pytest.approx([0.25, 0.30, 0.45], abs=1e-12)
        assert dist.residual <= 1e-10 * 3.0

    def test_two_mode_closed_form(self):
        g = validate([[-2.0, 2.0], [1.0, -1.0]])
        assert stationary(g).mu == pytest.approx([1 / 3, 2 / 3], abs=1e-13)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31))
    def test_random_generator_properties(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        q = rng.uniform(0.1, 5.0, size=(n, n))
        np.fill_diagonal(q, 0.0)
        np.fill_diagonal(q, -q.sum(axis=1))
        dist = stationary(validate(q))
        assert np.all(dist.mu > 0)
        assert float(dist.mu.sum()) == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(dist.mu @ q)) <= 1e-10 * np.max(np.abs(q))

    def test_mu_is_read_only(self):
        dist = stationary(validate([[-1.0, 1.0], [1.0, -1.0]]))
        with pytest.raises(ValueError):
            dist.mu[0] = 2.0


class TestReversibility:
    def test_birth_death_is_reversible(self):
        g = validate([[-0.2, 0.2, 0.0], [3.0, -3.4, 0.4], [0.0, 4.5, -4.5]])
        assert reversibility(g, stationary(g)) is True

    def test_directed_cycle_is_not(self):
        g = validate([[-3.0, 0.0, 3.0], [1.0, -3.0, 2.0], [1.0, 2.0, -3.0]])
        assert reversibility(g, stationary(g)) is False

    @settings(max_examples=30, deadline=None)
    @given(rates_2x2)
    def test_every_two_mode_chain_is_reversible(self, uv):
        u, v = uv
        g = validate([[-u, u], [v, -v]])
        assert reversibility(g, stationary(g))


class TestChainPath:
    def test_occupation_exact_arithmetic(self):
        path = ChainPath(
            jump_times=np.array([1.0, 3.0]),
            states=np.array([0, 1, 0]),
            initial_state=0,
            horizon=4.0,
        )
        assert path.occupation() == pytest.approx([0.5, 0.5])
        assert path.occupation(3) == pytest.approx([0.5, 0.5, 0.0])

    def test_zero_horizon(self):
        path = ChainPath(
            jump_times=np.array([]), states=np.array([1]), initial_state=1, horizon=0.0
        )
        assert path.occupation(3) == pytest.approx([0.0, 1.0, 0.0])


class TestSamplePath:
    def test_deterministic_by_seed(self):
        g = validate([[-2.0, 2.0], [1.0, -1.0]])
        a = sample_path(g, 0, 100.0, seed=99)
        b = sample_path(g, 0, 100.0, seed=99)
        assert np.array_equal(a.jump_times, b.jump_times)
        assert np.array_equal(a.states, b.states)
        c = sample_path(g, 0, 100.0, seed=100)
        assert not np.array_equal(a.jump_times, c.jump_times)

    def test_path_structure(self):
        g = validate([[-3.0, 0.0, 3.0], [1.0, -3.0, 2.0], [1.0, 2.0, -3.0]])
        path = sample_path(g, 1, 50.0, seed=4)
        assert path.states[0] == 1
        assert len(path.states) == len(path.jump_times) + 1
        assert np.all(np.diff(path.jump_times) > 0)
        assert np.all(path.jump_times < 50.0)
        assert np.all(np.diff(path.states) != 0)  # a jump changes the mode
        # jumps only along positive rates
        q = g.rates.entries
        for a, b in zip(path.states[:-1], path.states[1:]):
            assert q[a, b] > 0

    def test_occupation_approaches_stationary(self):
        g = validate([[-2.0, 2.0], [1.0, -1.0]])
        occ = sample_path(g, 0, 2000.0, seed=12).occupation(2)
        assert occ == pytest.approx([1 / 3, 2 / 3], abs=0.05)

    def test_holding_times_have_the_right_mean(self):
        g = validate([[-2.0, 2.0], [1.0, -1.0]])
        path = sample_path(g, 0, 3000.0, seed=21)
        edges = np.concatenate(([0.0], path.jump_times, [path.horizon]))
        lengths = np.diff(edges)
        per_state = [lengths[path.states == s] for s in (0, 1)]
        assert np.mean(per_state[0]) == pytest.approx(0.5, abs=0.05)
        assert np.mean(per_state[1]) == pytest.approx(1.0, abs=0.10)

    def test_zero_horizon_empty_path(self):
        g = validate([[-2.0, 2.0], [1.0, -1.0]])
        path = sample_path(g, 1, 0.0, seed=0)
        assert path.jump_times.size == 0 and list(path.states) == [1]

    def test_argument_validation(self):
        g = validate([[-2.0, 2.0], [1.0, -1.0]])
        with pytest.raises(ValueError):
            sample_path(g, 2, 1.0, seed=0)
        with pytest.raises(ValueError):
            sample_path(g, 0, -1.0, seed=0)

    def test_absorbing_state_detected(self):
        # Bypasses validate(): a hand-built generator with a zero exit rate.
        g = Generator(
            rates=DenseMatrix([[0.0, 0.0], [1.0, -1.0]]), irreducible=False
        )
        with pytest.raises(AbsorbingState):
            sample_path(g, 0, 1.0, seed=0)
