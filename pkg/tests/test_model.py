"""Mode descriptions, the nonlinear fixture registry, growth-rate
computation, and model assembly."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import switchstab as ss
from switchstab.model import (
    BetaVector,
    DimensionMismatch,
    GammaDescriptor,
    LinearMode,
    MissingBeta,
    ModelError,
    NonlinearMode,
    SwitchingModel,
    UnknownFixture,
    beta_quadratic,
    beta_vector,
    fixture,
)


class TestLinearMode:
    def test_dimensions_and_defaults(self):
        m = LinearMode(A=[[1.0, 0.0], [0.0, 2.0]])
        assert m.dimension == 2 and m.noise_count == 0 and m.input is None

    def test_validation(self):
        with pytest.raises(DimensionMismatch):
            LinearMode(A=[[1.0, 2.0]])
        with pytest.raises(DimensionMismatch):
            LinearMode(A=np.eye(2), noise=(np.eye(3),))
        with pytest.raises(DimensionMismatch):
            LinearMode(A=np.eye(2), input=[[1.0], [2.0], [3.0]])
        with pytest.raises(ValueError):
            LinearMode(A=[[np.inf, 0.0], [0.0, 1.0]])

    def test_arrays_are_read_only(self):
        m = LinearMode(A=np.eye(2), noise=(np.eye(2),), input=np.ones((2, 1)))
        for arr in (m.A, m.noise[0], m.input):
            with pytest.raises(ValueError):
                arr[0, 0] = 7.0


class TestFixtures:
    def test_registry_values(self):
        x = np.array([2.0])
        f = fixture("quarter_growth")
        assert f.drift(x, 0.0) == pytest.approx([0.5])
        assert f.diffusion(x, 3.0) == pytest.approx([0.25])
        f = fixture("cubic_well")
        assert f.drift(x, 0.0) == pytest.approx([1.0 - 10.0 - 16.0])
        assert f.diffusion(x, np.pi / 2) == pytest.approx([2.0])
        f = fixture("eighth_decay")
        assert f.drift(x, 0.0) == pytest.approx([-0.25])

    def test_parameterized_fixture(self):
        f = fixture("geometric_saturating:rate=0.25")
        x = np.array([2.0])
        assert f.drift(x, 0.0) == pytest.approx([0.5])
        assert f.diffusion(x, 0.0) == pytest.approx([2.0])   # min(4, 2)
        assert f.diffusion(np.array([0.5]), 0.0) == pytest.approx([0.25])

    def test_unknown_and_malformed(self):
        with pytest.raises(UnknownFixture):
            fixture("white_noise_soup")
        with pytest.raises(UnknownFixture):
            fixture("geometric_saturating")  # missing parameter
        with pytest.raises(UnknownFixture):
            fixture("geometric_saturating:rate")

    def test_nonlinear_mode_resolves_early(self):
        with pytest.raises(UnknownFixture):
            NonlinearMode(fixture_id="never_heard_of_it")
        m = NonlinearMode(fixture_id="quarter_growth")
        assert m.dimension == 1 and m.noise_count == 1
        assert m.drift(np.array([4.0]), 0.0) == pytest.approx([1.0])


class TestGammaDescriptor:
    def test_value_and_integral(self):
        g = GammaDescriptor(inverse_square=4.0, exp_decay=1.0)
        assert g.value(0.0) == pytest.approx(5.0)
        assert g.value(1.0) == pytest.approx(1.0 + np.exp(-2.0))
        # integral over [0, inf): 4*1 + 1*(1/2)
        assert g.integral == pytest.approx(4.5)

    def test_rejects_negative_coefficients(self):
        with pytest.raises(ModelError):
            GammaDescriptor(inverse_square=-0.1)


class TestBetaQuadratic:
    def test_scalar_frozen_values(self):
        assert beta_quadratic(LinearMode(A=[[1.0]], noise=(np.array([[1.0]]),))) == pytest.approx(3.0)
        assert beta_quadratic(LinearMode(A=[[-2.0]], noise=(np.array([[1.0]]),))) == pytest.approx(-3.0)

    def test_planar_frozen_value(self):
        c = np.array([[1.0, 1.0], [1.0, -1.0]])
        mode = LinearMode(A=[[3.0, -1.0], [1.0, -4.0]], noise=(c,))
        # A + A^T + C^T C = diag(8, -6)
        assert beta_quadratic(mode) == pytest.approx(8.0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31))
    def test_bounds_the_quadratic_form(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 5))
        a = rng.normal(size=(n, n))
        cs = tuple(rng.normal(size=(n, n)) for _ in range(int(rng.integers(0, 3))))
        mode = LinearMode(A=a, noise=cs)
        b = beta_quadratic(mode)
        for _ in range(20):
            x = rng.normal(size=n)
            lhs = 2 * x @ (a @ x) + sum(np.sum((c @ x) ** 2) for c in cs)
            assert lhs <= b * (x @ x) + 1e-9 * (1 + abs(b)) * (x @ x)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31))
    def test_invariant_under_orthogonal_change_of_basis(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 5))
        a = rng.normal(size=(n, n))
        c = rng.normal(size=(n, n))
        u, _ = np.linalg.qr(rng.normal(size=(n, n)))
        before = beta_quadratic(LinearMode(A=a, noise=(c,)))
        after = beta_quadratic(LinearMode(A=u.T @ a @ u, noise=(u.T @ c @ u,)))
        assert after == pytest.approx(before, abs=1e-8 * (1 + abs(before)))


class TestBetaVector:
    def test_computed_and_supplied_provenance(self, stable_model):
        bv = beta_vector(stable_model)
        assert bv.beta == pytest.approx([3.0, -3.0])
        assert bv.provenance == ("computed", "computed")
        assert bv.sup == pytest.approx(3.0)

        bv2 = beta_vector(stable_model, overrides=[None, -5.0])
        assert bv2.beta == pytest.approx([3.0, -5.0])
        assert bv2.provenance == ("computed", "supplied")

    def test_nonlinear_requires_override(self):
        g = ss.validate([[-1.0, 1.0], [1.0, -1.0]])
        model = SwitchingModel(
            generator=g,
            modes=(NonlinearMode("quarter_growth"), NonlinearMode("eighth_decay")),
        )
        with pytest.raises(MissingBeta) as err:
            beta_vector(model)
        assert err.value.mode == 0
        bv = beta_vector(model, overrides=[0.5, -0.25])
        assert bv.provenance == ("supplied", "supplied")

    def test_rejects_nonfinite(self):
        with pytest.raises(ModelError):
            BetaVector(beta=np.array([1.0, np.nan]), provenance=("supplied", "supplied"))


class TestSwitchingModel:
    def test_mode_count_must_match_chain(self):
        g = ss.validate([[-1.0, 1.0], [1.0, -1.0]])
        with pytest.raises(DimensionMismatch):
            SwitchingModel(generator=g, modes=(LinearMode(A=[[1.0]]),))

    def test_dimension_and_noise_uniformity(self):
        g = ss.validate([[-1.0, 1.0], [1.0, -1.0]])
        with pytest.raises(DimensionMismatch):
            SwitchingModel(
                generator=g,
                modes=(LinearMode(A=[[1.0]]), LinearMode(A=np.eye(2))),
            )
        with pytest.raises(DimensionMismatch):
            SwitchingModel(
                generator=g,
                modes=(
                    LinearMode(A=[[1.0]], noise=(np.array([[1.0]]),)),
                    LinearMode(A=[[1.0]]),
                ),
            )

    def test_properties(self, planar_model):
        assert planar_model.N == 2
        assert planar_model.dimension == 2
        assert planar_model.noise_count == 1
        assert planar_model.all_linear
