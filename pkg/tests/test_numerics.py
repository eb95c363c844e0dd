"""Linear-algebra kernels: frozen-value oracles plus randomized agreement
checks against numpy/scipy reference routines."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from switchstab.numerics import (
    DefinitenessResult,
    DenseMatrix,
    NoConvergence,
    NotIrreducible,
    NotMetzler,
    NotSymmetric,
    NumericsError,
    SingularMatrix,
    definiteness,
    perron_pair,
    solve_linear,
    strongly_connected,
    sym_eig_extreme,
    sym_spectrum,
)


class TestDenseMatrix:
    def test_validates_shape_and_finiteness(self):
        with pytest.raises(ValueError):
            DenseMatrix(np.zeros(3))
        with pytest.raises(ValueError):
            DenseMatrix([[np.nan, 0.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            DenseMatrix(np.zeros((0, 2)))

    def test_entries_are_read_only(self):
        m = DenseMatrix([[1.0, 2.0], [3.0, 4.0]])
        with pytest.raises(ValueError):
            m.entries[0, 0] = 9.0
        assert m.rows == 2 and m.cols == 2
        assert np.array_equal(np.asarray(m), [[1.0, 2.0], [3.0, 4.0]])


class TestSolveLinear:
    def test_two_by_two_frozen_values(self):
        x = solve_linear([[-2.0, 1.0], [2.0, -1.5]], [-1.0, -1.0])
        assert x == pytest.approx([2.5, 4.0], abs=1e-12)

    def test_matches_numpy_on_random_systems(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            n = int(rng.integers(1, 8))
            a = rng.normal(size=(n, n)) + n * np.eye(n)
            b = rng.normal(size=n)
            assert solve_linear(a, b) == pytest.approx(np.linalg.solve(a, b), rel=1e-9)

    def test_multiple_right_hand_sides(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(4, 4)) + 4 * np.eye(4)
        b = rng.normal(size=(4, 3))
        x = solve_linear(a, b)
        assert x.shape == (4, 3)
        assert np.allclose(a @ x, b, atol=1e-9)

    def test_singular_matrix_raises(self):
        with pytest.raises(SingularMatrix):
            solve_linear([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0])

    def test_residual_contract_on_solution(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(6, 6)) + 6 * np.eye(6)
        b = rng.normal(size=6)
        x = solve_linear(a, b)
        anorm = np.max(np.sum(np.abs(a), axis=1))
        res = np.max(np.abs(a @ x - b))
        assert res <= 1e-10 * (anorm * np.max(np.abs(x)) + np.max(np.abs(b)))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            solve_linear(np.eye(3), np.ones(2))
        with pytest.raises(ValueError):
            solve_linear(np.ones((2, 3)), np.ones(2))


class TestStronglyConnected:
    def test_connected_cycle(self):
        adj = np.array([[False, True], [True, False]])
        ok, witness = strongly_connected(adj)
        assert ok and witness is None

    def test_unreachable_pair_reported(self):
        adj = np.array([[False, True, False],
                        [True, False, False],
                        [True, False, False]])
        ok, witness = strongly_connected(adj)
        assert not ok
        i, j = witness
        # j genuinely unreachable from i by walking the closure
        reach = np.eye(3, dtype=bool) | adj
        for _ in range(3):
            reach = reach | (reach @ reach)
        assert not reach[i, j]


class TestPerronPair:
    def test_two_mode_frozen_value(self):
        m = [[-1.1, 2.0], [1.0, -1.9]]
        pair = perron_pair(m)
        closed_form = (-3.0 + math.sqrt(8.64)) / 2.0
        assert pair.value == pytest.approx(closed_form, abs=1e-12)
        assert pair.value == pytest.approx(-0.030306154330094426, abs=1e-12)
        assert np.all(pair.vector > 0)
        assert pair.residual <= 1e-9

    def test_matches_dense_eig_on_random_metzler(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            n = int(rng.integers(2, 7))
            a = rng.uniform(0.1, 2.0, size=(n, n))
            np.fill_diagonal(a, rng.normal(size=n) - 2.0)
            pair = perron_pair(a)
            lam = np.linalg.eigvals(a)
            assert pair.value == pytest.approx(float(np.max(lam.real)), abs=1e-8)
            # eigenvector equation residual, independently recomputed
            assert np.max(np.abs(a @ pair.vector - pair.value * pair.vector)) <= 1e-8 * (
                1.0 + np.max(np.abs(a))
            )

    def test_rejects_negative_off_diagonal(self):
        with pytest.raises(NotMetzler):
            perron_pair([[-1.0, -0.5], [1.0, -1.0]])

    def test_rejects_reducible_support(self):
        with pytest.raises(NotIrreducible):
            perron_pair([[-1.0, 0.0], [1.0, -1.0]])

    def test_unit_norm_positive_vector(self):
        pair = perron_pair([[-2.0, 2.0], [1.0, -1.0]])
        assert np.linalg.norm(pair.vector) == pytest.approx(1.0, abs=1e-12)
        assert np.all(pair.vector > 0)


class TestSymmetricEigen:
    def test_min_eig_frozen_value(self):
        gamma = [[0.1543, -0.0007], [-0.0007, 0.1406]]
        pair = sym_eig_extreme(gamma, "min")
        tr, det_gap = 0.1543 + 0.1406, 0.1543 - 0.1406
        closed_form = (tr - math.sqrt(det_gap**2 + 4 * 0.0007**2)) / 2.0
        assert pair.value == pytest.approx(closed_form, abs=1e-15)
        assert pair.value == pytest.approx(0.14056432646722197, abs=1e-12)

    def test_spectrum_matches_numpy(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            n = int(rng.integers(1, 8))
            s = rng.normal(size=(n, n))
            s = s + s.T
            vals, vecs = sym_spectrum(s)
            assert np.sort(vals) == pytest.approx(np.linalg.eigvalsh(s), abs=1e-9)
            # eigenvector columns diagonalize s
            assert np.allclose(vecs.T @ s @ vecs, np.diag(vals), atol=1e-8)

    def test_nearly_diagonal_matrix_converges(self):
        # Regression: the off-diagonal norm must be accumulated directly;
        # computing it as ||S||_F^2 - ||diag||^2 cancels catastrophically
        # and stalls the sweep loop on matrices like this one.
        s = np.diag([-1.1487, -0.9554, -0.1543, -0.1406])
        s[0, 1] = s[1, 0] = -2.58e-9
        s[2, 3] = s[3, 2] = 7e-9
        vals, _ = sym_spectrum(s)
        assert np.sort(vals) == pytest.approx(np.linalg.eigvalsh(s), abs=1e-12)

    def test_requires_symmetry(self):
        with pytest.raises(NotSymmetric):
            sym_eig_extreme([[0.0, 1.0], [0.0, 0.0]], "max")

    def test_which_argument_validated(self):
        with pytest.raises(ValueError):
            sym_eig_extreme(np.eye(2), "smallest")

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=2, max_value=6))
    def test_extreme_pair_property(self, seed, n):
        rng = np.random.default_rng(seed)
        s = rng.normal(size=(n, n))
        s = s + s.T
        top = sym_eig_extreme(s, "max")
        bottom = sym_eig_extreme(s, "min")
        ref = np.linalg.eigvalsh(s)
        assert top.value == pytest.approx(float(ref[-1]), abs=1e-9 * (1 + np.abs(ref).max()))
        assert bottom.value == pytest.approx(float(ref[0]), abs=1e-9 * (1 + np.abs(ref).max()))
        assert s @ top.vector == pytest.approx(top.value * top.vector, abs=1e-7)


class TestDefiniteness:
    def test_near_singular_frozen_example(self):
        result = definiteness(np.diag([1.0, -1e-9]), "positive")
        assert not result
        assert result.fail_index == 2

    def test_positive_definite_reports_pivot(self):
        result = definiteness(np.diag([4.0, 9.0]), "positive")
        assert result and result.smallest_pivot == pytest.approx(4.0)

    def test_negative_sense(self):
        assert definiteness(-np.eye(3), "negative")
        assert not definiteness(np.eye(3), "negative")

    def test_margin_is_strict(self):
        s = np.diag([1.0, 0.5e-6])
        assert definiteness(s, "positive")
        assert not definiteness(s, "positive", margin=1e-6)

    def test_matches_numpy_verdicts(self):
        rng = np.random.default_rng(19)
        for _ in range(60):
            n = int(rng.integers(1, 6))
            a = rng.normal(size=(n, n))
            s = a @ a.T - rng.uniform(0.0, 1.0) * np.eye(n)
            verdict = bool(definiteness(s, "positive"))
            ref = bool(np.linalg.eigvalsh(s)[0] > 0)
            lam_min = np.linalg.eigvalsh(s)[0]
            if abs(lam_min) > 1e-10:  # away from the strictness boundary
                assert verdict == ref

    def test_sense_validated(self):
        with pytest.raises(ValueError):
            definiteness(np.eye(2), "indefinite")
        with pytest.raises(ValueError):
            definiteness(np.eye(2), "positive", margin=-1.0)
