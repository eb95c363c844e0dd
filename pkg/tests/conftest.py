"""Shared model fixtures for the test suite.

The heavyweight artifacts (feedback synthesis, the large calibration
ensemble) are session-scoped so the acceptance tests and the module tests
share one computation.
"""

from __future__ import annotations

import os

import numpy as np
import pytest

import switchstab as ss
from switchstab.model import LinearMode, SwitchingModel
from switchstab.simulate import SimConfig, run_ensemble

FIXTURES = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
    "src", "switchstab", "fixtures",
)


@pytest.fixture(scope="session")
def fixture_path():
    """Resolve a packaged model-file name to its absolute path."""
    return lambda name: os.path.join(FIXTURES, name)


def two_mode_generator(u: float, v: float):
    """Two-mode chain: rate u out of the growing mode, v out of the
    contracting one."""
    return ss.validate([[-u, u], [v, -v]])


def two_mode_scalar_model(u: float, v: float) -> SwitchingModel:
    """Scalar geometric dynamics: dx = x dt + x dW in mode 0,
    dx = -2x dt + x dW in mode 1; quadratic rates beta = (3, -3)."""
    return SwitchingModel(
        generator=two_mode_generator(u, v),
        modes=(
            LinearMode(A=[[1.0]], noise=(np.array([[1.0]]),)),
            LinearMode(A=[[-2.0]], noise=(np.array([[1.0]]),)),
        ),
    )


def planar_control_model() -> SwitchingModel:
    """Two planar modes, each unstable alone and not stabilized by
    switching, with single-channel inputs for feedback synthesis."""
    c = np.array([[1.0, 1.0], [1.0, -1.0]])
    return SwitchingModel(
        generator=ss.validate([[-1.0, 1.0], [1.0, -1.0]]),
        modes=(
            LinearMode(A=[[3.0, -1.0], [1.0, -4.0]], noise=(c,), input=[[-10.0], [0.0]]),
            LinearMode(A=[[-3.0, -1.0], [1.0, 2.0]], noise=(-c,), input=[[0.0], [-10.0]]),
        ),
    )


def reversible_generator():
    """Three-state birth-death chain (reversible by construction)."""
    return ss.validate([[-0.2, 0.2, 0.0], [3.0, -3.4, 0.4], [0.0, 4.5, -4.5]])


REVERSIBLE_BETA = np.array([-0.25, 1.01, -0.3233333333333333])

THREE_MODE_RATES = [[-3.0, 0.0, 3.0], [1.0, -3.0, 2.0], [1.0, 2.0, -3.0]]
THREE_MODE_BETA = np.array([0.5, 0.5, -8.0])


@pytest.fixture(scope="session")
def stable_model():
    return two_mode_scalar_model(2.0, 1.0)


@pytest.fixture(scope="session")
def unstable_model():
    return two_mode_scalar_model(1.0, 2.0)


@pytest.fixture(scope="session")
def planar_model():
    return planar_control_model()


@pytest.fixture(scope="session")
def planar_synthesis(planar_model):
    from switchstab.lmi import synthesize

    result = synthesize(planar_model, ss.stationary(planar_model.generator))
    assert bool(result), "synthesis refused on the planar control model"
    return result


@pytest.fixture(scope="session")
def calibration_ensemble(stable_model):
    """200 paths, T=50, h=1e-3, seed 7: the large calibration run."""
    cfg = SimConfig(T=50.0, h=1e-3, paths=200, seed=7, x0=np.array([1.0]))
    return run_ensemble(stable_model, cfg)
