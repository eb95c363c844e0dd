"""Continuous-time Markov chains on a finite mode set.

Validation of transition-rate matrices, stationary distributions,
detailed-balance (reversibility) detection, and exact path sampling via the
embedded-chain construction (exponential holding times, categorical jump
targets).  Modes are indexed 0..N-1 throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import DenseMatrix, as_array, solve_linear, strongly_connected
from .streams import Stream

ROW_SUM_TOL = 1e-12              # |row sum| bound for a valid generator
STATIONARY_RESIDUAL_TOL = 1e-10  # ||mu Q||_inf bound on the returned mu
DETAILED_BALANCE_RTOL = 1e-9     # |mu_i q_ij - mu_j q_ji| vs max rate


class MarkovError(Exception):
    """Base class for chain-model failures."""


class BadRowSum(MarkovError):
    def __init__(self, row: int, total: float):
        super().__init__(f"row {row} sums to {total:.3e}, expected 0")
        self.row = row
        self.total = total


class NegativeRate(MarkovError):
    def __init__(self, i: int, j: int, rate: float):
        super().__init__(f"negative off-diagonal rate q[{i},{j}] = {rate}")
        self.pair = (i, j)


class Reducible(MarkovError):
    def __init__(self, pair: tuple[int, int]):
        super().__init__(f"mode {pair[1]} unreachable from mode {pair[0]}")
        self.pair = pair


class AbsorbingState(MarkovError):
    def __init__(self, state: int):
        super().__init__(f"mode {state} has zero exit rate")
        self.state = state


@dataclass(frozen=True)
class Generator:
    """A validated transition-rate matrix (nonnegative off-diagonal, zero
    row sums, strongly connected support).  Construct via :func:`validate`."""

    rates: DenseMatrix
    irreducible: bool

    @property
    def N(self) -> int:
        return self.rates.rows

    def __array__(self, dtype=None, copy=None):
        return np.array(self.rates.entries, dtype=dtype)


@dataclass(frozen=True)
class StationaryDist:
    """The unique strictly positive probability vector with ``mu Q = 0``."""

    mu: np.ndarray = field(repr=False)
    residual: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.mu, dtype=float)
        m.flags.writeable = False
        object.__setattr__(self, "mu", m)


@dataclass(frozen=True)
class ChainPath:
    """One sampled trajectory of the mode process on ``[0, T]``.

    ``states`` holds one mode per inter-jump interval (length = number of
    jumps + 1); ``jump_times`` is strictly increasing with every entry < T.
    """

    jump_times: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    initial_state: int
    horizon: float

    def occupation(self, n_modes: int | None = None) -> np.ndarray:
        """Fraction of ``[0, T]`` spent in each mode (exact from intervals)."""
        if n_modes is None:
            n_modes = int(self.states.max()) + 1
        frac = np.zeros(n_modes)
        if self.horizon <= 0.0:
            frac[self.initial_state] = 1.0
            return frac
        edges = np.concatenate(([0.0], self.jump_times, [self.horizon]))
        lengths = np.diff(edges)
        np.add.at(frac, self.states, lengths)
        return frac / self.horizon


def validate(rates) -> Generator:
    """Check a square rate matrix and wrap it as a :class:`Generator`.

    Raises
    ------
    NegativeRate
        If any off-diagonal entry is negative.
    BadRowSum
        If any row sum exceeds ``ROW_SUM_TOL`` in magnitude.
    Reducible
        If the support graph is not strongly connected (the witness pair of
        an unreachable mode is attached).
    """
    q = as_array(rates)
    n = q.shape[0]
    if q.ndim != 2 or q.shape[1] != n:
        raise ValueError(f"rate matrix must be square, got shape {q.shape}")
    if n < 2:
        raise ValueError("a switching chain needs at least 2 modes")
    off = q.copy()
    np.fill_diagonal(off, 0.0)
    if np.any(off < 0.0):
        i, j = np.argwhere(off < 0.0)[0]
        raise NegativeRate(int(i), int(j), float(q[i, j]))
    scale = max(float(np.max(np.abs(q))), 1.0)
    sums = q.sum(axis=1)
    bad = np.nonzero(np.abs(sums) > ROW_SUM_TOL * scale)[0]
    if bad.size:
        raise BadRowSum(int(bad[0]), float(sums[bad[0]]))
    ok, witness = strongly_connected(off > 0.0)
    if not ok:
        raise Reducible(witness)
    return Generator(rates=DenseMatrix(q), irreducible=True)


def stationary(g: Generator) -> StationaryDist:
    """Stationary distribution of an irreducible generator.

    Solves ``Q^T mu = 0`` with the last (redundant) row replaced by the
    normalization ``sum(mu) = 1``, then verifies ``||mu Q||_inf`` below
    ``STATIONARY_RESIDUAL_TOL`` and strict positivity.
    """
    q = g.rates.entries
    n = g.N
    a = q.T.copy()
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    mu = solve_linear(a, b)
    residual = float(np.max(np.abs(mu @ q)))
    scale = max(float(np.max(np.abs(q))), 1.0)
    if residual > STATIONARY_RESIDUAL_TOL * scale:
        raise MarkovError(f"stationary residual {residual:.3e} too large")
    if np.any(mu <= 0.0):
        raise MarkovError("stationary solve produced a nonpositive component")
    return StationaryDist(mu=mu, residual=residual)


def reversibility(g: Generator, dist: StationaryDist) -> bool:
    """Detailed-balance test: ``mu_i q_ij == mu_j q_ji`` for all pairs,
    within ``DETAILED_BALANCE_RTOL`` times the largest rate."""
    q = g.rates.entries
    mu = dist.mu
    flux = mu[:, None] * q
    gap = float(np.max(np.abs(flux - flux.T)))
    scale = max(float(np.max(np.abs(q))), 1e-300)
    return gap <= DETAILED_BALANCE_RTOL * scale


def sample_path(g: Generator, i0: int, T: float, seed: int) -> ChainPath:
    """Sample one chain trajectory exactly.

    Holding times are exponential with the current exit rate; jump targets
    are categorical with probabilities ``q_ij / (-q_ii)``.  Both draws come
    from ``Stream(seed, 0)`` in strict alternation, so identical arguments
    give bit-identical paths.
    """
    q = g.rates.entries
    n = g.N
    if not (0 <= i0 < n):
        raise ValueError(f"initial mode {i0} outside 0..{n - 1}")
    if T < 0:
        raise ValueError("horizon must be nonnegative")
    stream = Stream(seed, 0)
    jump_times: list[float] = []
    states = [i0]
    t = 0.0
    state = i0
    while True:
        rate = -q[state, state]
        if rate <= 0.0:
            raise AbsorbingState(state)
        t = t + stream.exponential(rate)
        if t >= T:
            break
        u = stream.uniform()
        acc = 0.0
        target = -1
        for j in range(n):
            if j == state:
                continue
            acc += q[state, j] / rate
            if u <= acc:
                target = j
                break
        if target < 0:  # u landed in the rounding sliver past the last bin
            target = max(j for j in range(n) if j != state and q[state, j] > 0)
        jump_times.append(t)
        states.append(target)
        state = target
    return ChainPath(
        jump_times=np.array(jump_times, dtype=float),
        states=np.array(states, dtype=np.int64),
        initial_state=i0,
        horizon=float(T),
    )
