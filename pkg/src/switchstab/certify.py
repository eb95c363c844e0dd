"""Almost-sure stability certificates for switching diffusions.

Four independent routes, each returning a :class:`StabilityCertificate`
(carrying a positive witness vector and recomputable residuals) or a
:class:`Refusal` with a machine-readable reason:

``pf``
    Mode-averaged rate must be negative; searches a damping exponent
    ``p`` over a geometric grid so that ``Q + p*diag(beta)`` has strictly
    negative Perron root.
``m1``
    Per-mode ratio test ``min over beta_i>0 of (-q_ii/beta_i) > 1`` plus the
    negative averaged rate; witness is the Perron pair of ``Q + diag(beta)``.
``eigen``
    Reversible chains only: the smallest eigenvalue of the symmetrized form
    of ``-Q - diag(beta)`` must be positive; the witness is validated
    against the weighted quadratic (Dirichlet) form.
``partition``
    Group the modes by growth-rate level, reduce the chain to a pessimistic
    finite generator over the groups, and certify by a positive vector whose
    image under ``Q^F + diag(beta^F)`` is strictly negative.  Works for
    banded countable chains (birth-death fixtures) and finite chains alike.

Refusal reason slugs: ``not_applicable`` (averaged rate nonnegative),
``ratio_test_failed``, ``not_reversible``, ``no_witness_found``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .markov import Generator, StationaryDist, reversibility, stationary
from .model import BetaVector
from .numerics import DenseMatrix, SingularMatrix, perron_pair, solve_linear, sym_eig_extreme

CERT_RESIDUAL_TOL = 1e-8     # witness residual bound on issued certificates
STRICT_POS_RTOL = 1e-10      # "strictly positive": each entry > rtol * max|v|
ETA_MIN = 1e-10              # decay rates must clear this to certify
PF_GRID_DEPTH = 40           # p grid: p_max * 2**-k, k = 0..PF_GRID_DEPTH
PF_SAFETY = 0.999            # keep p strictly inside the admissible range


class CertifyError(Exception):
    """Base class for certificate-construction failures."""


class EmptyGroup(CertifyError):
    def __init__(self, index: int, interval: str):
        super().__init__(f"partition group {index} {interval} contains no mode")
        self.index = index


class UnsortedThresholds(CertifyError):
    pass


class UnboundedRates(CertifyError):
    pass


class UnboundedBeta(CertifyError):
    pass


@dataclass(frozen=True)
class Refusal:
    """A reasoned negative answer from one certificate route."""

    route: str
    reason: str
    details: dict

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class PfWitness:
    p: float
    eta: float
    xi: np.ndarray = field(repr=False)
    p_max: float = 1.0


@dataclass(frozen=True)
class M1Witness:
    eta: float
    xi: np.ndarray = field(repr=False)
    ratio_value: float = math.inf
    gamma_ok: bool = True


@dataclass(frozen=True)
class EigenWitness:
    lambda0: float
    xi: np.ndarray = field(repr=False)
    dirichlet_residual: float = 0.0


@dataclass(frozen=True)
class PartitionWitness:
    thresholds: tuple
    groups: tuple
    QF: DenseMatrix
    betaF: np.ndarray = field(repr=False)
    xiF: np.ndarray = field(repr=False)
    image: np.ndarray = field(repr=False)
    mmatrix_literal: bool = False
    decay_min: float = 0.0
    decay_max: float = 0.0


@dataclass(frozen=True)
class StabilityCertificate:
    """A positive certificate from one route.

    ``averaging`` is the mode-averaged growth rate when a stationary
    distribution is in scope (None for the partition route, whose chain may
    be countable); ``residual`` is the route's witness-equation residual,
    always below ``CERT_RESIDUAL_TOL`` on issue.
    """

    route: str
    witness: object
    averaging: float | None
    residual: float

    def __bool__(self) -> bool:
        return True


def strictly_positive(v) -> bool:
    """Every component exceeds ``STRICT_POS_RTOL`` times the largest magnitude."""
    v = np.asarray(v, dtype=float)
    scale = float(np.max(np.abs(v), initial=0.0))
    if scale == 0.0:
        return False
    return bool(np.all(v > STRICT_POS_RTOL * scale))


def as_beta(beta) -> BetaVector:
    """Coerce an array-like of per-mode rates into a :class:`BetaVector`."""
    if isinstance(beta, BetaVector):
        return beta
    arr = np.asarray(beta, dtype=float)
    return BetaVector(beta=arr, provenance=("supplied",) * arr.shape[0])


def averaging_value(dist: StationaryDist, beta) -> float:
    """Mode-averaged growth rate, summed left-to-right in index order."""
    beta = as_beta(beta)
    mu = dist.mu
    if len(mu) != len(beta):
        raise ValueError(f"length mismatch: {len(mu)} weights, {len(beta)} rates")
    total = 0.0
    for i in range(len(mu)):
        total += mu[i] * beta.beta[i]
    return total


def _ratio_value(g: Generator, beta: BetaVector) -> float:
    """min over modes with beta_i > 0 of (-q_ii / beta_i); +inf if none."""
    q = g.rates.entries
    best = math.inf
    for i in range(g.N):
        if beta.beta[i] > 0.0:
            best = min(best, -q[i, i] / beta.beta[i])
    return best


def pf_certificate(g: Generator, beta: BetaVector):
    """Damping-exponent certificate.

    Refuses ``not_applicable`` unless the averaged rate is negative.  The
    admissible exponent cap is 1 when no mode grows, else
    ``PF_SAFETY * min over beta_i>0 of (-q_ii/beta_i)`` clipped to 1.  The
    grid ``p_max * 2**-k`` is scanned for the first ``p`` whose damped
    generator ``Q + p*diag(beta)`` has Perron root below ``-ETA_MIN``.
    """
    beta = as_beta(beta)
    dist = stationary(g)
    avg = averaging_value(dist, beta)
    if avg >= 0.0:
        return Refusal("pf", "not_applicable", {"averaging": avg})
    if beta.sup <= 0.0:
        p_max = 1.0
    else:
        p_max = min(1.0, PF_SAFETY * _ratio_value(g, beta))
    q = g.rates.entries
    for k in range(PF_GRID_DEPTH + 1):
        p = p_max * 2.0**-k
        pair = perron_pair(q + p * np.diag(beta.beta))
        eta = -pair.value
        if eta > ETA_MIN:
            xi = pair.vector
            residual = float(
                np.max(np.abs((q + p * np.diag(beta.beta)) @ xi + eta * xi))
            )
            return StabilityCertificate(
                route="pf",
                witness=PfWitness(p=p, eta=eta, xi=xi, p_max=p_max),
                averaging=avg,
                residual=residual,
            )
    return Refusal("pf", "no_witness_found", {"averaging": avg, "p_max": p_max})


def m1_certificate(g: Generator, beta: BetaVector, model=None):
    """Undamped-generator certificate.

    Requires the ratio test value ``min over beta_i>0 of (-q_ii/beta_i)`` to
    exceed 1 (vacuously true when no mode grows) and a negative averaged
    rate; then certifies iff the Perron root of ``Q + diag(beta)`` is below
    ``-ETA_MIN``.  ``gamma_ok`` records that the model's time perturbation,
    if any, is of the integrable registered form (true by construction).
    """
    beta = as_beta(beta)
    ratio = _ratio_value(g, beta)
    if not ratio > 1.0:
        return Refusal("m1", "ratio_test_failed", {"ratio_value": ratio})
    dist = stationary(g)
    avg = averaging_value(dist, beta)
    if avg >= 0.0:
        return Refusal("m1", "not_applicable", {"averaging": avg, "ratio_value": ratio})
    q1 = g.rates.entries + np.diag(beta.beta)
    pair = perron_pair(q1)
    eta = -pair.value
    if eta <= ETA_MIN:
        return Refusal(
            "m1", "no_witness_found", {"eta": eta, "averaging": avg, "ratio_value": ratio}
        )
    gamma_ok = True  # descriptor forms are integrable by construction
    xi = pair.vector
    residual = float(np.max(np.abs(q1 @ xi + eta * xi)))
    return StabilityCertificate(
        route="m1",
        witness=M1Witness(eta=eta, xi=xi, ratio_value=ratio, gamma_ok=gamma_ok),
        averaging=avg,
        residual=residual,
    )


def dirichlet_form(dist: StationaryDist, g: Generator, beta: BetaVector, f) -> float:
    """Weighted quadratic form
    ``1/2 sum_ij mu_i q_ij (f_j - f_i)^2 - sum_i mu_i beta_i f_i^2``."""
    beta = as_beta(beta)
    f = np.asarray(f, dtype=float)
    mu = dist.mu
    q = g.rates.entries
    n = g.N
    total = 0.0
    for i in range(n):
        for j in range(n):
            if j != i:
                total += 0.5 * mu[i] * q[i, j] * (f[j] - f[i]) ** 2
    return total - float(np.sum(mu * beta.beta * f * f))


def principal_eigenvalue(g: Generator, dist: StationaryDist, beta: BetaVector):
    """Reversible-chain spectral certificate.

    Symmetrizes ``-Q - diag(beta)`` by the similarity ``D^{1/2} . D^{-1/2}``
    (D = diag of the stationary weights), takes its smallest eigenvalue
    ``lambda0``, and maps the eigenvector back to a strictly positive witness
    ``xi``.  Certifies iff ``lambda0 > ETA_MIN``; the witness is cross-checked
    against the weighted quadratic form (``|form(xi) - lambda0*||xi||0^2|``
    below ``CERT_RESIDUAL_TOL``).
    """
    beta = as_beta(beta)
    if not reversibility(g, dist):
        return Refusal("eigen", "not_reversible", {})
    mu = dist.mu
    q = g.rates.entries
    d_half = np.sqrt(mu)
    s = (d_half[:, None] * (-q - np.diag(beta.beta))) / d_half[None, :]
    pair = sym_eig_extreme(s, "min")
    lambda0 = pair.value
    w = pair.vector if float(np.sum(pair.vector)) >= 0 else -pair.vector
    xi = w / d_half
    norm0_sq = float(np.sum(mu * xi * xi))
    form = dirichlet_form(dist, g, beta, xi)
    dirichlet_residual = abs(form - lambda0 * norm0_sq)
    residual = float(np.max(np.abs(q @ xi + beta.beta * xi + lambda0 * xi)))
    if lambda0 <= ETA_MIN:
        return Refusal("eigen", "no_witness_found", {"lambda0": lambda0})
    if not strictly_positive(xi):
        return Refusal("eigen", "no_witness_found", {"lambda0": lambda0, "xi": xi.tolist()})
    return StabilityCertificate(
        route="eigen",
        witness=EigenWitness(lambda0=lambda0, xi=xi, dirichlet_residual=dirichlet_residual),
        averaging=averaging_value(dist, beta),
        residual=residual,
    )


# --- mode partitioning (finite and banded countable chains) -----------------


@dataclass(frozen=True)
class PartitionSpec:
    """Finite-chain partition: groups of mode indices by growth-rate level.

    ``groups[i]`` holds the modes whose rate lies in the half-open interval
    ``(thresholds[i-1], thresholds[i]]`` (leftmost interval open below,
    rightmost capped by the largest rate).
    """

    thresholds: tuple[float, ...]
    groups: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.groups)


@dataclass(frozen=True)
class CountableGroup:
    """A group of states of a countable chain: a finite head plus an
    optional infinite tail ``{tail_from, tail_from+1, ...}``."""

    head: tuple[int, ...] = ()
    tail_from: int | None = None

    def __contains__(self, state: int) -> bool:
        return state in self.head or (
            self.tail_from is not None and state >= self.tail_from
        )

    @property
    def infinite(self) -> bool:
        return self.tail_from is not None

    def describe(self) -> str:
        parts = [str(s) for s in sorted(self.head)]
        if self.tail_from is not None:
            parts.append(f"{self.tail_from}...")
        return "{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class CountablePartition:
    thresholds: tuple[float, ...]
    groups: tuple[CountableGroup, ...]

    @property
    def size(self) -> int:
        return len(self.groups)


@dataclass(frozen=True)
class FiniteChain:
    """A finite chain bundled with its growth rates, for the partition route."""

    generator: Generator
    beta: BetaVector

    def __post_init__(self):
        if self.generator.N != len(self.beta):
            raise ValueError("generator size and rate vector length differ")


@dataclass(frozen=True)
class BirthDeathChain:
    """A countable birth-death chain on states {1, 2, ...} with bounded rates.

    Parameters
    ----------
    up, down : callable
        ``up(i)`` is the rate i -> i+1 (positive for all i >= 1);
        ``down(i)`` the rate i -> i-1 (positive for all i >= 2).
    beta : callable
        Per-state growth rate, nondecreasing from ``monotone_from`` on.
    rate_bound : float
        Claimed bound on every exit rate ``up(i) + down(i)``.
    beta_sup : float
        Claimed supremum of ``beta`` over all states.
    monotone_from : int
        Index from which ``beta`` is nondecreasing.
    beta_tail_sup : callable
        ``beta_tail_sup(t)`` must return ``sup over j >= t of beta(j)``
        exactly (closed form supplied by the fixture author).

    The claimed bounds are spot-checked on the first ``SPOT_CHECK`` states at
    construction (UnboundedRates / UnboundedBeta on violation); exactness of
    the reductions then relies only on bandedness and tail monotonicity.
    """

    SPOT_CHECK = 1000

    up: callable = field(repr=False)
    down: callable = field(repr=False)
    beta: callable = field(repr=False)
    rate_bound: float = math.inf
    beta_sup: float = math.inf
    monotone_from: int = 1
    beta_tail_sup: callable = field(default=None, repr=False)

    def __post_init__(self):
        if not math.isfinite(self.rate_bound):
            raise UnboundedRates("a finite exit-rate bound is required")
        if not math.isfinite(self.beta_sup):
            raise UnboundedBeta("a finite growth-rate supremum is required")
        if self.beta_tail_sup is None:
            raise ValueError("beta_tail_sup callable is required")
        slack = 1e-12 * max(1.0, abs(self.rate_bound), abs(self.beta_sup))
        prev_beta = -math.inf
        for i in range(1, self.SPOT_CHECK + 1):
            exit_rate = self.up(i) + (self.down(i) if i >= 2 else 0.0)
            if self.up(i) <= 0.0 or (i >= 2 and self.down(i) <= 0.0):
                raise ValueError(f"nonpositive transition rate at state {i}")
            if exit_rate > self.rate_bound + slack:
                raise UnboundedRates(
                    f"exit rate {exit_rate} at state {i} exceeds the claimed bound"
                )
            b = self.beta(i)
            if b > self.beta_sup + slack:
                raise UnboundedBeta(
                    f"growth rate {b} at state {i} exceeds the claimed supremum"
                )
            if i > self.monotone_from and b < prev_beta - slack:
                raise ValueError(
                    f"beta decreases at state {i} despite monotone_from={self.monotone_from}"
                )
            prev_beta = b

    def flux(self, row: int, group: CountableGroup) -> float:
        """Total rate out of ``row`` into ``group`` (zero if row in group)."""
        total = 0.0
        if row + 1 in group:
            total += self.up(row)
        if row >= 2 and row - 1 in group:
            total += self.down(row)
        return total


def _interval_index(value: float, thresholds: tuple[float, ...]) -> int:
    """Index of the half-open interval (k_{i-1}, k_i] containing value."""
    for i, k in enumerate(thresholds):
        if value <= k:
            return i
    return len(thresholds)


def _check_thresholds(thresholds, K: float) -> tuple[float, ...]:
    ks = tuple(float(k) for k in thresholds)
    if any(ks[i] >= ks[i + 1] for i in range(len(ks) - 1)):
        raise UnsortedThresholds(f"thresholds must be strictly increasing: {ks}")
    if ks and ks[-1] > K:
        raise UnsortedThresholds(
            f"largest threshold {ks[-1]} exceeds the largest growth rate {K}"
        )
    return ks


def build_partition(beta, thresholds):
    """Group modes by growth-rate level.

    ``beta`` may be a :class:`~switchstab.model.BetaVector` (finite chain;
    returns :class:`PartitionSpec`) or a :class:`BirthDeathChain` (returns
    :class:`CountablePartition` whose groups are finite heads plus at most
    one infinite tail).  Group ``i`` collects the states with rate in
    ``(k_{i-1}, k_i]``; every group must be nonempty.
    """
    if isinstance(beta, BirthDeathChain):
        return _build_partition_countable(beta, thresholds)
    beta = as_beta(beta)
    ks = _check_thresholds(thresholds, beta.sup)
    m = len(ks)
    groups: list[list[int]] = [[] for _ in range(m + 1)]
    for j in range(len(beta)):
        groups[_interval_index(beta.beta[j], ks)].append(j)
    bounds = (-math.inf,) + ks + (beta.sup,)
    for i, grp in enumerate(groups):
        if not grp:
            raise EmptyGroup(i, f"({bounds[i]}, {bounds[i + 1]}]")
    return PartitionSpec(thresholds=ks, groups=tuple(tuple(grp) for grp in groups))


def _build_partition_countable(chain: BirthDeathChain, thresholds) -> CountablePartition:
    ks = _check_thresholds(thresholds, chain.beta_sup)
    m = len(ks)
    scan = max(chain.monotone_from + 8, 64)
    while True:
        next_beta = chain.beta(scan + 1)
        tail_sup = chain.beta_tail_sup(scan + 1)
        # The un-enumerated tail must sit inside one rate interval: no
        # threshold may separate beta(scan+1) from the tail supremum.
        if not any(next_beta <= k < tail_sup for k in ks):
            break
        scan *= 2
        if scan > 1 << 18:
            raise CertifyError(
                "cannot isolate the tail: a threshold sits at the tail's limit rate"
            )
    tail_group = _interval_index(next_beta, ks)
    assignment = [_interval_index(chain.beta(j), ks) for j in range(1, scan + 1)]
    tail_from = scan + 1
    while tail_from > 1 and assignment[tail_from - 2] == tail_group:
        tail_from -= 1
    heads: list[list[int]] = [[] for _ in range(m + 1)]
    for j in range(1, tail_from):
        heads[assignment[j - 1]].append(j)
    groups = []
    bounds = (-math.inf,) + ks + (chain.beta_sup,)
    for i in range(m + 1):
        grp = CountableGroup(
            head=tuple(heads[i]), tail_from=tail_from if i == tail_group else None
        )
        if not grp.head and not grp.infinite:
            raise EmptyGroup(i, f"({bounds[i]}, {bounds[i + 1]}]")
        groups.append(grp)
    return CountablePartition(thresholds=ks, groups=tuple(groups))


def _reduce_finite(chain: FiniteChain, part: PartitionSpec):
    q = chain.generator.rates.entries
    m1 = part.size
    qf = np.zeros((m1, m1))
    for i, gi in enumerate(part.groups):
        for j, gj in enumerate(part.groups):
            if i == j:
                continue
            fluxes = [float(np.sum(q[r, list(gj)])) for r in gi]
            qf[i, j] = max(fluxes) if j < i else min(fluxes)
    np.fill_diagonal(qf, 0.0)
    np.fill_diagonal(qf, -qf.sum(axis=1))
    beta_f = np.array([max(chain.beta.beta[r] for r in grp) for grp in part.groups])
    return DenseMatrix(qf), beta_f


def _reduce_countable(chain: BirthDeathChain, part: CountablePartition):
    m1 = part.size
    qf = np.zeros((m1, m1))
    for i, gi in enumerate(part.groups):
        for j, gj in enumerate(part.groups):
            if i == j:
                continue
            # Only rows adjacent to gj can have nonzero flux into it; every
            # other row of gi contributes exactly 0 to the sup/inf.
            adjacent = set()
            for s in gj.head:
                adjacent.update((s - 1, s + 1))
            if gj.tail_from is not None:
                adjacent.add(gj.tail_from - 1)
            candidates = sorted(r for r in adjacent if r >= 1 and r in gi)
            fluxes = [chain.flux(r, gj) for r in candidates]
            has_other_rows = gi.infinite or len(gi.head) > len(candidates)
            if has_other_rows:
                fluxes.append(0.0)
            if not fluxes:
                fluxes = [0.0]
            qf[i, j] = max(fluxes) if j < i else min(fluxes)
    np.fill_diagonal(qf, 0.0)
    np.fill_diagonal(qf, -qf.sum(axis=1))
    beta_f = []
    for grp in part.groups:
        best = -math.inf
        if grp.head:
            best = max(chain.beta(s) for s in grp.head)
        if grp.tail_from is not None:
            best = max(best, chain.beta_tail_sup(grp.tail_from))
        beta_f.append(best)
    return DenseMatrix(qf), np.array(beta_f)


def reduced_generator(chain, part):
    """Pessimistic group-level generator and growth rates.

    Cross-group rates take the worst case over the source group: the
    supremum for downward (toward lower-rate groups) transitions and the
    infimum for upward ones; group rates are the supremum over the group.
    Exact for finite chains by enumeration, and for banded countable chains
    because only boundary-adjacent rows carry nonzero flux.
    """
    if isinstance(chain, FiniteChain):
        if not isinstance(part, PartitionSpec):
            raise TypeError("finite chains need a PartitionSpec")
        return _reduce_finite(chain, part)
    if isinstance(chain, BirthDeathChain):
        if not isinstance(part, CountablePartition):
            raise TypeError("countable chains need a CountablePartition")
        return _reduce_countable(chain, part)
    raise TypeError(f"unsupported chain type {type(chain).__name__}")


def partition_certificate(QF, betaF, part=None):
    """Certificate from the reduced group-level system.

    Two independent checks are recorded: the literal reduced test — is
    ``M = -(Q^F + diag(beta^F)) H`` (H upper-triangular ones) a nonsingular
    M-matrix (Z-pattern and ``M^{-1} 1`` strictly positive) — and the direct
    witness ``xi = (Q^F + diag(beta^F))^{-1} (-1)``.  Certification rides on
    the direct witness being strictly positive (its image is then strictly
    negative); the literal verdict ships in the witness as a flag.
    """
    qf = QF.entries if isinstance(QF, DenseMatrix) else np.asarray(QF, dtype=float)
    beta_f = np.asarray(betaF, dtype=float)
    size = qf.shape[0]
    a = qf + np.diag(beta_f)
    ones = np.ones(size)

    h = np.triu(np.ones((size, size)))
    m = -(a @ h)
    off = m.copy()
    np.fill_diagonal(off, 0.0)
    scale = max(float(np.max(np.abs(m))), 1e-300)
    z_pattern = bool(np.all(off <= 1e-12 * scale))
    literal = False
    if z_pattern:
        try:
            literal = strictly_positive(solve_linear(m, ones))
        except SingularMatrix:
            literal = False

    thresholds = () if part is None else tuple(part.thresholds)
    groups: tuple = ()
    if part is not None:
        if isinstance(part, CountablePartition):
            groups = tuple(grp.describe() for grp in part.groups)
        else:
            groups = part.groups

    try:
        xi = solve_linear(a, -ones)
    except SingularMatrix:
        return Refusal(
            "partition",
            "no_witness_found",
            {"reason": "reduced system is singular", "mmatrix_literal": literal},
        )
    image = a @ xi
    if not strictly_positive(xi):
        return Refusal(
            "partition",
            "no_witness_found",
            {"xi": xi.tolist(), "mmatrix_literal": literal},
        )
    residual = float(np.max(np.abs(image + ones)))
    witness = PartitionWitness(
        thresholds=thresholds,
        groups=groups,
        QF=DenseMatrix(qf),
        betaF=beta_f,
        xiF=xi,
        image=image,
        mmatrix_literal=literal,
        decay_min=float(np.min(-image)),
        decay_max=float(np.max(-image)),
    )
    return StabilityCertificate(
        route="partition", witness=witness, averaging=None, residual=residual
    )


def singleton_partition(beta: BetaVector) -> PartitionSpec:
    """The finest partition: one group per distinct growth-rate value,
    thresholds at midpoints between consecutive distinct values."""
    beta = as_beta(beta)
    values = sorted(set(float(b) for b in beta.beta))
    ks = tuple(
        0.5 * (values[i] + values[i + 1]) for i in range(len(values) - 1)
    )
    return build_partition(beta, ks)


def self_check(cert: StabilityCertificate, g: Generator | None = None,
               beta: BetaVector | None = None, dist: StationaryDist | None = None) -> dict:
    """Recompute an issued certificate's witness inequalities from scratch.

    Returns the recomputed residuals; raises :class:`CertifyError` if any
    stored invariant fails to reproduce.  ``g``/``beta`` (and ``dist`` for
    the eigen route) are required for every route except ``partition``,
    whose witness is self-contained.
    """
    out: dict[str, float] = {}

    def need(ok: bool, message: str):
        if not ok:
            raise CertifyError(f"certificate failed recheck: {message}")

    if beta is not None:
        beta = as_beta(beta)
    w = cert.witness
    if cert.route == "pf":
        q = g.rates.entries
        res = float(np.max(np.abs((q + w.p * np.diag(beta.beta)) @ w.xi + w.eta * w.xi)))
        out["witness_residual"] = res
        need(res <= CERT_RESIDUAL_TOL * float(np.max(np.abs(w.xi))), "damped-generator residual")
        need(strictly_positive(w.xi), "witness positivity")
        need(0.0 < w.p <= w.p_max <= 1.0, "exponent range")
        need(w.eta > ETA_MIN, "decay-rate margin")
        avg = averaging_value(stationary(g), beta)
        out["averaging"] = avg
        need(avg < 0.0, "averaged rate sign")
    elif cert.route == "m1":
        q1 = g.rates.entries + np.diag(beta.beta)
        res = float(np.max(np.abs(q1 @ w.xi + w.eta * w.xi)))
        out["witness_residual"] = res
        need(res <= CERT_RESIDUAL_TOL * float(np.max(np.abs(w.xi))), "undamped-generator residual")
        need(strictly_positive(w.xi), "witness positivity")
        need(w.eta > ETA_MIN, "decay-rate margin")
        ratio = _ratio_value(g, beta)
        out["ratio_value"] = ratio
        need(ratio > 1.0, "ratio test")
        avg = averaging_value(stationary(g), beta)
        out["averaging"] = avg
        need(avg < 0.0, "averaged rate sign")
    elif cert.route == "eigen":
        dist = dist if dist is not None else stationary(g)
        need(reversibility(g, dist), "reversibility")
        q = g.rates.entries
        res = float(np.max(np.abs(q @ w.xi + beta.beta * w.xi + w.lambda0 * w.xi)))
        out["identity_residual"] = res
        need(res <= CERT_RESIDUAL_TOL, "eigen identity residual")
        norm0_sq = float(np.sum(dist.mu * w.xi * w.xi))
        form = dirichlet_form(dist, g, beta, w.xi)
        out["dirichlet_residual"] = abs(form - w.lambda0 * norm0_sq)
        need(out["dirichlet_residual"] <= CERT_RESIDUAL_TOL, "quadratic-form residual")
        need(strictly_positive(w.xi), "witness positivity")
        need(w.lambda0 > ETA_MIN, "eigenvalue margin")
    elif cert.route == "partition":
        a = w.QF.entries + np.diag(w.betaF)
        image = a @ w.xiF
        out["witness_residual"] = float(np.max(np.abs(image - w.image)))
        need(out["witness_residual"] <= CERT_RESIDUAL_TOL, "stored image consistency")
        need(strictly_positive(w.xiF), "witness positivity")
        scale = float(np.max(np.abs(w.xiF)))
        need(bool(np.all(image < -STRICT_POS_RTOL * scale)), "image strict negativity")
    else:
        raise CertifyError(f"unknown route {cert.route!r}")
    return out
