"""Feedback synthesis for switching linear diffusions via block matrix
inequalities.

For each mode ``i`` the certificate block is::

    [[Phi_i, Xi_i^T],
     [Xi_i,  Theta ]]          Phi_i  = (A_i G + B_i Y_i) + (.)^T - alpha_i G
                               Xi_i   = rows of C_i^(k) G stacked over k
                               Theta  = diag(-G, ..., -G)

with ``G`` a shared symmetric matrix.  A candidate ``(G, Y, alpha)`` is
accepted when ``G`` is positive definite, every block is negative definite
with margin, and the mode-averaged ``alpha`` is negative; the feedback gains
are ``K_i = Y_i G^{-1}``.  :func:`verify` is the correctness anchor;
:func:`synthesize` searches for a candidate by penalized extreme-eigenvalue
minimization and never returns an unverified solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .markov import StationaryDist
from .model import DimensionMismatch, LinearMode, SwitchingModel, beta_quadratic
from .numerics import (
    DenseMatrix,
    definiteness,
    solve_linear,
    sym_eig_extreme,
    sym_spectrum,
)

GAMMA_PD_MARGIN = 1e-9       # strictness of the G > 0 test
BLOCK_ND_MARGIN = 1e-6       # strictness of each block < 0 test (absolute)
GAIN_IDENTITY_TOL = 1e-8     # || K_i G - Y_i ||_inf bound
SYNTH_TARGET = -1e-6         # stage-2 objective level declaring feasibility
SYNTH_MAX_ITER = 20_000
SYNTH_PENALTY = 1e3          # weight on the positive-definiteness penalty
ALPHA_AVG_CAP = -0.1         # stage-1 averaged-alpha requirement


class LmiError(Exception):
    """Internal inconsistency in the verification chain."""


class NotPositiveDefinite(LmiError):
    """The trailing block of a certificate block matrix is not -G-diagonal
    with positive definite G."""


@dataclass(frozen=True)
class LmiRefusal:
    """A reasoned negative answer from verify or synthesize."""

    reason: str   # gamma_not_pd | block_not_nd | averaging_failed | solver_stalled
    details: dict

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class LmiCandidate:
    """A candidate ``(Gamma, Y_1..Y_N, alpha)`` for the block inequalities."""

    Gamma: np.ndarray = field(repr=False)
    Y: tuple = ()
    alpha: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        g = np.asarray(self.Gamma, dtype=float)
        n = g.shape[0]
        if g.ndim != 2 or g.shape[1] != n:
            raise DimensionMismatch(f"Gamma must be square, got {g.shape}")
        scale = max(float(np.max(np.abs(g))), 1e-300)
        if float(np.max(np.abs(g - g.T))) > 1e-10 * scale:
            raise DimensionMismatch("Gamma must be symmetric within 1e-10")
        ys = []
        for i, y in enumerate(self.Y):
            y = np.asarray(y, dtype=float)
            if y.ndim != 2 or y.shape[1] != n:
                raise DimensionMismatch(
                    f"Y[{i}] has shape {y.shape}, expected (l, {n})"
                )
            y.flags.writeable = False
            ys.append(y)
        a = np.asarray(self.alpha, dtype=float)
        if a.ndim != 1 or len(a) != len(ys):
            raise DimensionMismatch("alpha must hold one rate per mode")
        g.flags.writeable = False
        a.flags.writeable = False
        object.__setattr__(self, "Gamma", g)
        object.__setattr__(self, "Y", tuple(ys))
        object.__setattr__(self, "alpha", a)


@dataclass(frozen=True)
class FeedbackSynthesis:
    """An accepted candidate with its extracted gains and slack margins."""

    candidate: LmiCandidate
    K: tuple
    margins: np.ndarray = field(repr=False)        # per-mode max block eigenvalue
    averaging: float = 0.0                          # sum_i mu_i alpha_i
    congruence: np.ndarray = field(repr=False, default=None)  # per-mode check


def _require_input(mode, index: int) -> LinearMode:
    if not isinstance(mode, LinearMode):
        raise DimensionMismatch(f"mode {index} is not linear")
    if mode.input is None:
        raise DimensionMismatch(f"mode {index} has no input matrix")
    return mode


def assemble_block(mode: LinearMode, Gamma, Y_i, alpha_i: float) -> DenseMatrix:
    """The symmetric certificate block of one mode (size n + m*n)."""
    if not isinstance(mode, LinearMode):
        raise DimensionMismatch("assemble_block needs a linear mode")
    g = np.asarray(Gamma, dtype=float)
    y = np.asarray(Y_i, dtype=float)
    n = mode.dimension
    m = mode.noise_count
    if g.shape != (n, n):
        raise DimensionMismatch(f"Gamma has shape {g.shape}, expected {(n, n)}")
    b = mode.input
    if b is None:
        if y.size != 0:
            raise DimensionMismatch("mode has no input matrix but Y is nonempty")
        ag = mode.A @ g
    else:
        if y.ndim != 2 or y.shape != (b.shape[1], n):
            raise DimensionMismatch(
                f"Y has shape {y.shape}, expected {(b.shape[1], n)}"
            )
        ag = mode.A @ g + b @ y
    phi = ag + ag.T - alpha_i * g
    if m == 0:
        return DenseMatrix(phi)
    size = n + m * n
    block = np.zeros((size, size))
    block[:n, :n] = phi
    for k, c in enumerate(mode.noise):
        cg = c @ g
        rows = slice(n + k * n, n + (k + 1) * n)
        block[rows, :n] = cg
        block[:n, rows] = cg.T
        block[rows, rows] = -g
    return DenseMatrix(block)


def schur_reduce(block, n: int, m: int) -> DenseMatrix:
    """Eliminate the noise rows: ``Phi + Xi^T (-Theta)^{-1} Xi``.

    Negative definiteness of the result is equivalent to that of the full
    block whenever the trailing block ``Theta`` is negative definite.

    Raises
    ------
    NotPositiveDefinite
        If ``-Theta`` fails a strict positive-definiteness test.
    """
    a = block.entries if isinstance(block, DenseMatrix) else np.asarray(block, dtype=float)
    size = n + m * n
    if a.shape != (size, size):
        raise DimensionMismatch(f"block has shape {a.shape}, expected {(size, size)}")
    phi = a[:n, :n]
    if m == 0:
        return DenseMatrix(phi.copy())
    xi = a[n:, :n]
    p = -a[n:, n:]
    if not definiteness(p, "positive", 0.0):
        raise NotPositiveDefinite("trailing block is not negative definite")
    reduced = phi + xi.T @ solve_linear(p, xi)
    return DenseMatrix(0.5 * (reduced + reduced.T))


def _averaged_alpha(dist: StationaryDist, alpha: np.ndarray) -> float:
    total = 0.0
    for i in range(len(alpha)):
        total += dist.mu[i] * alpha[i]
    return total


def verify(model: SwitchingModel, dist: StationaryDist, cand: LmiCandidate):
    """Check a candidate and extract gains.

    Order of checks: Gamma positive definite (margin ``GAMMA_PD_MARGIN``),
    then each mode's block negative definite (margin ``BLOCK_ND_MARGIN``,
    first failure reported, cross-checked against the Schur-reduced form at
    margin 0), then the averaged alpha.  On acceptance the gains
    ``K_i = Y_i Gamma^{-1}`` are computed, the gain identity is asserted, and
    the inverse-side form ``P(A+BK) + (A+BK)^T P + sum C^T P C - alpha P``
    (P = Gamma^{-1}) is recomputed independently and asserted negative
    definite.

    Returns a :class:`FeedbackSynthesis` or an :class:`LmiRefusal` tagged
    ``gamma_not_pd`` / ``block_not_nd`` / ``averaging_failed``.
    """
    modes = [_require_input(mode, i) for i, mode in enumerate(model.modes)]
    if len(cand.Y) != len(modes):
        raise DimensionMismatch("one Y matrix per mode required")
    g = cand.Gamma
    if not definiteness(g, "positive", GAMMA_PD_MARGIN):
        return LmiRefusal(
            "gamma_not_pd",
            {"min_eig": float(sym_eig_extreme(g, "min").value)},
        )
    n = model.dimension
    m = model.noise_count
    margins = np.zeros(len(modes))
    blocks = []
    for i, mode in enumerate(modes):
        block = assemble_block(mode, g, cand.Y[i], float(cand.alpha[i]))
        blocks.append(block)
        margins[i] = float(sym_eig_extreme(block.entries, "max").value)
        full_ok = bool(definiteness(block.entries, "negative", BLOCK_ND_MARGIN))
        reduced = schur_reduce(block, n, m)
        agree = bool(definiteness(block.entries, "negative", 0.0)) == bool(
            definiteness(reduced.entries, "negative", 0.0)
        )
        if not agree:
            raise LmiError(f"Schur cross-check disagrees on mode {i}")
        if not full_ok:
            return LmiRefusal(
                "block_not_nd", {"mode": i, "max_eig": margins[i]}
            )
    averaging = _averaged_alpha(dist, cand.alpha)
    if averaging >= 0.0:
        return LmiRefusal("averaging_failed", {"averaging": averaging})

    gains = tuple(solve_linear(g, y.T).T for y in cand.Y)
    for i, (k, y) in enumerate(zip(gains, cand.Y)):
        gap = float(np.max(np.abs(k @ g - y)))
        if gap > GAIN_IDENTITY_TOL:
            raise LmiError(f"gain identity violated on mode {i}: {gap:.3e}")

    p = solve_linear(g, np.eye(n))
    p = 0.5 * (p + p.T)
    congruence = np.zeros(len(modes))
    for i, mode in enumerate(modes):
        closed = mode.A + mode.input @ gains[i]
        s = p @ closed + closed.T @ p - float(cand.alpha[i]) * p
        for c in mode.noise:
            s = s + c.T @ p @ c
        congruence[i] = float(sym_eig_extreme(0.5 * (s + s.T), "max").value)
        if congruence[i] >= 0.0:
            raise LmiError(f"inverse-side recheck failed on mode {i}")
    return FeedbackSynthesis(
        candidate=cand,
        K=gains,
        margins=margins,
        averaging=averaging,
        congruence=congruence,
    )


def _controllability_defect(modes) -> list[int]:
    """Modes whose reachability matrix [B, AB, ..., A^{n-1}B] is rank deficient."""
    bad = []
    for i, mode in enumerate(modes):
        n = mode.dimension
        cols = [mode.input]
        for _ in range(n - 1):
            cols.append(mode.A @ cols[-1])
        r = np.hstack(cols)
        gram = r @ r.T
        vals, _ = sym_spectrum(gram)
        scale = max(float(np.max(vals)), 1e-300)
        rank = int(np.sum(vals > 1e-10 * scale))
        if rank < n:
            bad.append(i)
    return bad


def _floor_gamma(g: np.ndarray, floor: float = 1e-6) -> np.ndarray:
    """Symmetrize and push eigenvalues up to the floor."""
    g = 0.5 * (g + g.T)
    vals, vecs = sym_spectrum(g)
    vals = np.maximum(vals, floor)
    g = vecs @ np.diag(vals) @ vecs.T
    return 0.5 * (g + g.T)


def synthesize(model: SwitchingModel, dist: StationaryDist):
    """Search for an accepted candidate.

    Stage 1 fixes ``alpha_i = c_i + t`` with ``c_i`` the open-loop quadratic
    growth rate of mode ``i``, stepping the integer offset ``t`` down until
    the averaged alpha is at most ``ALPHA_AVG_CAP``.  Stage 2 minimizes the
    worst block eigenvalue (plus a positive-definiteness penalty on Gamma) by
    projected subgradient descent from ``Gamma = I, Y = 0`` with step
    ``1/(1+k)``, flooring Gamma's spectrum at 1e-6 after every step.  Success
    is declared at objective below ``SYNTH_TARGET``, upon which the candidate
    is passed through :func:`verify` and that output returned.

    On stall after ``SYNTH_MAX_ITER`` iterations, returns an
    :class:`LmiRefusal` tagged ``solver_stalled`` carrying the best objective
    seen and, when some mode's reachability matrix is rank deficient, a
    ``not_controllable`` advisory naming the modes.
    """
    modes = [_require_input(mode, i) for i, mode in enumerate(model.modes)]
    n = model.dimension
    m = model.noise_count
    hints = np.array([beta_quadratic(mode) for mode in modes])
    t = 0.0
    while _averaged_alpha(dist, hints + t) > ALPHA_AVG_CAP:
        t -= 1.0
    alpha = hints + t

    gamma = np.eye(n)
    ys = [np.zeros((mode.input.shape[1], n)) for mode in modes]

    def objective_and_grads(g, ylist):
        worst = -np.inf
        worst_grad_g = None
        worst_grad_y = None
        worst_mode = -1
        for i, mode in enumerate(modes):
            block = assemble_block(mode, g, ylist[i], float(alpha[i]))
            pair = sym_eig_extreme(block.entries, "max")
            if pair.value > worst:
                worst = pair.value
                worst_mode = i
                v1 = pair.vector[:n]
                gg = (
                    mode.A.T @ np.outer(v1, v1)
                    + np.outer(v1, v1) @ mode.A
                    - float(alpha[i]) * np.outer(v1, v1)
                )
                gy = 2.0 * np.outer(mode.input.T @ v1, v1)
                for k, c in enumerate(mode.noise):
                    v2k = pair.vector[n + k * n: n + (k + 1) * n]
                    gg = gg + 2.0 * np.outer(c.T @ v2k, v1) - np.outer(v2k, v2k)
                worst_grad_g = 0.5 * (gg + gg.T)
                worst_grad_y = gy
        pd_pair = sym_eig_extreme(g, "min")
        penalty = max(0.0, 1e-6 - pd_pair.value)
        total = worst + SYNTH_PENALTY * penalty
        if penalty > 0.0:
            u = pd_pair.vector
            worst_grad_g = worst_grad_g - SYNTH_PENALTY * np.outer(u, u)
        return total, worst, worst_mode, worst_grad_g, worst_grad_y

    best = np.inf
    for it in range(SYNTH_MAX_ITER):
        total, worst, wmode, grad_g, grad_y = objective_and_grads(gamma, ys)
        best = min(best, total)
        if total < SYNTH_TARGET:
            cand = LmiCandidate(Gamma=gamma, Y=tuple(ys), alpha=alpha)
            result = verify(model, dist, cand)
            if isinstance(result, LmiRefusal):
                raise LmiError(
                    f"synthesized candidate failed verification: {result.reason}"
                )
            return result
        step = 1.0 / (1.0 + it)
        scale = max(
            float(np.sqrt(np.sum(grad_g * grad_g) + np.sum(grad_y * grad_y))),
            1e-300,
        )
        gamma = _floor_gamma(gamma - step * grad_g / scale)
        ys[wmode] = ys[wmode] - step * grad_y / scale
    details: dict = {"best_objective": best, "alpha": alpha.tolist()}
    defect = _controllability_defect(modes)
    if defect:
        details["not_controllable"] = defect
    return LmiRefusal("solver_stalled", details)
