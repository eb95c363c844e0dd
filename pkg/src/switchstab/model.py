"""Switching-SDE model container.

A :class:`SwitchingModel` couples a validated chain generator with one
dynamics description per mode and an optional integrable time-perturbation
descriptor.  Linear modes carry drift/noise/input matrices; nonlinear modes
name an entry of a closed registry of scalar fixtures (registered closed-form
drift/diffusion pairs).  Per-mode quadratic-Lyapunov rates ``beta_i`` are
computed for linear modes and must be supplied for nonlinear ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .markov import Generator
from .numerics import sym_eig_extreme


class ModelError(Exception):
    """Base class for model-construction failures."""


class DimensionMismatch(ModelError):
    pass


class MissingBeta(ModelError):
    def __init__(self, mode: int):
        super().__init__(
            f"mode {mode} is nonlinear; supply its growth rate via overrides"
        )
        self.mode = mode


class UnknownFixture(ModelError):
    pass


@dataclass(frozen=True)
class LinearMode:
    """Linear dynamics ``dx = A x dt + sum_k C[k] x dW_k`` with an optional
    input channel ``B u`` for feedback synthesis."""

    A: np.ndarray = field(repr=False)
    noise: tuple[np.ndarray, ...] = ()
    input: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        a = np.asarray(self.A, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"drift matrix must be square, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("drift matrix entries must be finite")
        n = a.shape[0]
        cs = []
        for k, c in enumerate(self.noise):
            c = np.asarray(c, dtype=float)
            if c.shape != (n, n):
                raise DimensionMismatch(
                    f"noise matrix {k} has shape {c.shape}, expected {(n, n)}"
                )
            if not np.all(np.isfinite(c)):
                raise ValueError(f"noise matrix {k} entries must be finite")
            c.flags.writeable = False
            cs.append(c)
        b = self.input
        if b is not None:
            b = np.asarray(b, dtype=float)
            if b.ndim != 2 or b.shape[0] != n:
                raise DimensionMismatch(
                    f"input matrix has shape {b.shape}, expected ({n}, l)"
                )
            if not np.all(np.isfinite(b)):
                raise ValueError("input matrix entries must be finite")
            b.flags.writeable = False
        a.flags.writeable = False
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "noise", tuple(cs))
        object.__setattr__(self, "input", b)

    @property
    def dimension(self) -> int:
        return self.A.shape[0]

    @property
    def noise_count(self) -> int:
        return len(self.noise)


@dataclass(frozen=True)
class NonlinearMode:
    """A mode drawn from the closed fixture registry (scalar dynamics).

    ``fixture_id`` may carry one float parameter as ``name:key=value``
    (e.g. ``geometric_saturating:rate=-1.0``).
    """

    fixture_id: str
    dimension: int = 1

    def __post_init__(self):
        fixture(self.fixture_id)  # raises UnknownFixture early
        if self.dimension != 1:
            raise DimensionMismatch("nonlinear fixtures are scalar (dimension 1)")

    @property
    def noise_count(self) -> int:
        return 1

    def drift(self, x: np.ndarray, t: float) -> np.ndarray:
        return fixture(self.fixture_id).drift(x, t)

    def diffusion(self, x: np.ndarray, t: float) -> np.ndarray:
        return fixture(self.fixture_id).diffusion(x, t)


@dataclass(frozen=True)
class Fixture:
    drift: callable
    diffusion: callable


def _parse_fixture_id(fixture_id: str) -> tuple[str, dict[str, float]]:
    name, _, rest = fixture_id.partition(":")
    params: dict[str, float] = {}
    if rest:
        for item in rest.split(","):
            key, _, value = item.partition("=")
            if not key or not value:
                raise UnknownFixture(f"malformed fixture parameter {item!r}")
            params[key.strip()] = float(value)
    return name.strip(), params


def fixture(fixture_id: str) -> Fixture:
    """Resolve a fixture id to its drift/diffusion callables.

    Registry (x is a length-1 array, t a scalar; both callables return
    length-1 arrays — the diffusion has one noise channel):

    ==============================  ==========================  ==================
    id                              drift b(x, t)               diffusion s(x, t)
    ==============================  ==========================  ==================
    quarter_growth                  x/4                         1/(1+t)
    damped_oscillatory              sin(x)/(1+t)                x/2
    cubic_well                      exp(-t) - 5x - 2x^3         x*sin(t)
    eighth_decay                    -x/8                        1/(1+t)
    damped_oscillatory_full_noise   sin(x)/(1+t)                x
    mild_cubic_well                 exp(-t) - x/6 - 2x^3        x*sin(t)/2
    geometric_saturating:rate=r     r*x                         min(x^2, |x|)
    ==============================  ==========================  ==================
    """
    name, params = _parse_fixture_id(fixture_id)
    if name == "quarter_growth":
        return Fixture(lambda x, t: x / 4.0, lambda x, t: np.full_like(x, 1.0 / (1.0 + t)))
    if name == "damped_oscillatory":
        return Fixture(lambda x, t: np.sin(x) / (1.0 + t), lambda x, t: x / 2.0)
    if name == "cubic_well":
        return Fixture(
            lambda x, t: np.exp(-t) - 5.0 * x - 2.0 * x**3,
            lambda x, t: x * np.sin(t),
        )
    if name == "eighth_decay":
        return Fixture(lambda x, t: -x / 8.0, lambda x, t: np.full_like(x, 1.0 / (1.0 + t)))
    if name == "damped_oscillatory_full_noise":
        return Fixture(lambda x, t: np.sin(x) / (1.0 + t), lambda x, t: x.copy())
    if name == "mild_cubic_well":
        return Fixture(
            lambda x, t: np.exp(-t) - x / 6.0 - 2.0 * x**3,
            lambda x, t: x * np.sin(t) / 2.0,
        )
    if name == "geometric_saturating":
        if "rate" not in params:
            raise UnknownFixture("geometric_saturating needs a rate parameter")
        r = params["rate"]
        return Fixture(
            lambda x, t: r * x,
            lambda x, t: np.minimum(x * x, np.abs(x)),
        )
    raise UnknownFixture(f"unknown nonlinear fixture {name!r}")


@dataclass(frozen=True)
class GammaDescriptor:
    """Integrable time perturbation ``inverse_square/(1+t)^2 +
    exp_decay*e^(-2t)``; both coefficients nonnegative, so the integral over
    [0, inf) is finite by construction."""

    inverse_square: float = 0.0
    exp_decay: float = 0.0

    def __post_init__(self):
        if self.inverse_square < 0 or self.exp_decay < 0:
            raise ModelError("perturbation coefficients must be nonnegative")

    def value(self, t: float) -> float:
        return self.inverse_square / (1.0 + t) ** 2 + self.exp_decay * np.exp(-2.0 * t)

    @property
    def integral(self) -> float:
        return self.inverse_square + self.exp_decay / 2.0


@dataclass(frozen=True)
class SwitchingModel:
    """A chain generator plus one dynamics description per mode."""

    generator: Generator
    modes: tuple
    gamma: GammaDescriptor | None = None

    def __post_init__(self):
        if len(self.modes) != self.generator.N:
            raise DimensionMismatch(
                f"{len(self.modes)} modes for a {self.generator.N}-mode chain"
            )
        dims = {m.dimension for m in self.modes}
        if len(dims) != 1:
            raise DimensionMismatch(f"modes disagree on state dimension: {dims}")
        counts = {m.noise_count for m in self.modes}
        if len(counts) != 1:
            raise DimensionMismatch(f"modes disagree on noise count: {counts}")
        object.__setattr__(self, "modes", tuple(self.modes))

    @property
    def N(self) -> int:
        return self.generator.N

    @property
    def dimension(self) -> int:
        return self.modes[0].dimension

    @property
    def noise_count(self) -> int:
        return self.modes[0].noise_count

    @property
    def all_linear(self) -> bool:
        return all(isinstance(m, LinearMode) for m in self.modes)


@dataclass(frozen=True)
class BetaVector:
    """Per-mode quadratic-Lyapunov growth rates with provenance.

    ``beta[i]`` bounds ``2<x, b(x,t,i)> + ||sigma(x,t,i)||_F^2 <= beta[i]|x|^2``;
    computed exactly for linear modes, supplied for nonlinear ones.
    ``sup`` records the largest entry.
    """

    beta: np.ndarray = field(repr=False)
    provenance: tuple[str, ...]

    def __post_init__(self):
        b = np.asarray(self.beta, dtype=float)
        if not np.all(np.isfinite(b)):
            raise ModelError("growth rates must be finite")
        b.flags.writeable = False
        object.__setattr__(self, "beta", b)

    @property
    def sup(self) -> float:
        return float(np.max(self.beta))

    def __len__(self) -> int:
        return len(self.beta)


def beta_quadratic(mode: LinearMode) -> float:
    """Tightest quadratic growth rate of a linear mode.

    Returns the maximum eigenvalue of ``A + A^T + sum_k C[k]^T C[k]``, the
    smallest constant with ``2<x, Ax> + sum_k |C[k] x|^2 <= beta |x|^2``.
    """
    if not isinstance(mode, LinearMode):
        raise DimensionMismatch("beta_quadratic applies to linear modes only")
    s = mode.A + mode.A.T
    for c in mode.noise:
        s = s + c.T @ c
    return float(sym_eig_extreme(s, "max").value)


def beta_vector(model: SwitchingModel, overrides=None) -> BetaVector:
    """Per-mode growth rates for a model.

    ``overrides`` (length N, entries float or None) replaces computed values;
    an override is mandatory for every nonlinear mode.

    Raises
    ------
    MissingBeta
        If a nonlinear mode has no override.
    """
    n_modes = model.N
    if overrides is not None and len(overrides) != n_modes:
        raise DimensionMismatch(
            f"got {len(overrides)} overrides for {n_modes} modes"
        )
    values = []
    provenance = []
    for i, mode in enumerate(model.modes):
        override = None if overrides is None else overrides[i]
        if override is not None:
            values.append(float(override))
            provenance.append("supplied")
        elif isinstance(mode, LinearMode):
            values.append(beta_quadratic(mode))
            provenance.append("computed")
        else:
            raise MissingBeta(i)
    return BetaVector(beta=np.array(values), provenance=tuple(provenance))
