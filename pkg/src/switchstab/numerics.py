"""Dense linear-algebra kernels for small matrices (dimensions up to ~200).

Everything the analysis layers need is provided here by four self-contained
routines: an LU solve with partial pivoting, a shifted power iteration for the
rightmost eigenpair of Metzler matrices, a cyclic Jacobi eigensolver for
symmetric matrices, and a Cholesky-based strict definiteness test.  All
routines are pure functions of their inputs and are safe to call concurrently.

The numerical tolerances used by this module are collected below as named
constants.  Callers may pass wider tolerances through the keyword arguments;
narrower values are silently raised back to the defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Tolerances (see module docstring; callers may widen, never narrow).
SOLVE_PIVOT_RTOL = 1e-13        # pivot |u_kk| below this times ||A|| is singular
SOLVE_RESIDUAL_RTOL = 1e-10     # ||Ax-b|| bound relative to ||A||*||x|| + ||b||
PERRON_RAYLEIGH_TOL = 1e-12     # successive Rayleigh quotient difference
PERRON_MAX_ITER = 100_000
JACOBI_OFFDIAG_RTOL = 1e-12     # off-diagonal Frobenius norm relative to ||S||
SYMMETRY_RTOL = 1e-10           # ||S - S^T|| tolerance relative to ||S||
EIGEN_RESIDUAL_RTOL = 1e-9      # ||Av - lambda v|| / ||A|| for returned pairs


class NumericsError(Exception):
    """Base class for kernel failures."""


class SingularMatrix(NumericsError):
    """A pivot fell below the singularity threshold."""


class NotMetzler(NumericsError):
    """An off-diagonal entry is negative."""


class NotIrreducible(NumericsError):
    """The support graph of the matrix is not strongly connected."""


class NoConvergence(NumericsError):
    """Iteration cap reached; the last residual is attached."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NotSymmetric(NumericsError):
    """Symmetry pre-check failed."""


@dataclass(frozen=True)
class DenseMatrix:
    """A validated dense real matrix.

    Parameters
    ----------
    entries : array_like
        Two-dimensional, row-major.  Must be non-empty and free of NaN/Inf.
    """

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-D array, got ndim={a.ndim}")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"empty matrix shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)


@dataclass(frozen=True)
class EigenPair:
    """An eigenvalue with a unit-Euclidean-norm eigenvector.

    ``residual`` stores ``||Av - value*v|| / ||A||`` for the matrix the pair
    was computed from; returned pairs always satisfy
    ``residual < EIGEN_RESIDUAL_RTOL``.
    """

    value: float
    vector: np.ndarray = field(repr=False)
    residual: float = 0.0


def as_array(A) -> np.ndarray:
    """Coerce a DenseMatrix or array-like to a validated float ndarray."""
    if isinstance(A, DenseMatrix):
        return A.entries
    a = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def _mat_norm(a: np.ndarray) -> float:
    # Max-row-sum (infinity) norm; the consistent norm used by every
    # relative tolerance in this module.
    if a.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(a), axis=1)))


def solve_linear(A, b, pivot_rtol: float = SOLVE_PIVOT_RTOL) -> np.ndarray:
    """Solve ``Ax = b`` by LU factorization with partial pivoting.

    Parameters
    ----------
    A : array_like, square
    b : array_like
        Right-hand side vector, or matrix whose columns are solved together.
    pivot_rtol : float
        Relative singularity threshold (raised to the default if smaller).

    Returns
    -------
    numpy.ndarray
        Solution with the same trailing shape as ``b``; satisfies
        ``||Ax-b|| <= SOLVE_RESIDUAL_RTOL * (||A||*||x|| + ||b||)``.

    Raises
    ------
    SingularMatrix
        If a pivot magnitude falls below ``pivot_rtol * ||A||``.
    """
    a = as_array(A).copy()
    rhs = np.asarray(b, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"A must be square, got shape {a.shape}")
    if rhs.shape[0] != n:
        raise ValueError(f"dimension mismatch: A is {n}x{n}, b has leading {rhs.shape[0]}")
    pivot_rtol = max(pivot_rtol, SOLVE_PIVOT_RTOL)
    anorm = _mat_norm(a)
    x = rhs.astype(float).copy()
    one_d = x.ndim == 1
    if one_d:
        x = x[:, None]

    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) < pivot_rtol * max(anorm, 1e-300):
            raise SingularMatrix(
                f"pivot {a[p, k]:.3e} at column {k} below {pivot_rtol:.1e}*||A||"
            )
        if p != k:
            a[[k, p]] = a[[p, k]]
            x[[k, p]] = x[[p, k]]
        mult = a[k + 1:, k] / a[k, k]
        a[k + 1:, k + 1:] -= np.outer(mult, a[k, k + 1:])
        x[k + 1:] -= np.outer(mult, x[k])

    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]

    x = x[:, 0] if one_d else x
    residual = float(np.max(np.abs(as_array(A) @ x - rhs))) if rhs.size else 0.0
    bound = SOLVE_RESIDUAL_RTOL * (anorm * float(np.max(np.abs(x), initial=0.0)) + float(np.max(np.abs(rhs), initial=0.0)))
    if residual > max(bound, 1e-300):
        raise NumericsError(
            f"solve residual {residual:.3e} exceeds bound {bound:.3e} (ill-conditioned system)"
        )
    return x


def strongly_connected(support: np.ndarray) -> tuple[bool, tuple[int, int] | None]:
    """Check strong connectivity of a boolean adjacency matrix.

    Returns ``(True, None)`` or ``(False, (i, j))`` where ``j`` is unreachable
    from ``i``.
    """
    n = support.shape[0]

    def reach(adj):
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            u = stack.pop()
            for v in np.nonzero(adj[u])[0]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        return seen

    fwd = reach(support)
    if not fwd.all():
        return False, (0, int(np.nonzero(~fwd)[0][0]))
    bwd = reach(support.T)
    if not bwd.all():
        return False, (int(np.nonzero(~bwd)[0][0]), 0)
    return True, None


def perron_pair(
    M,
    rayleigh_tol: float = PERRON_RAYLEIGH_TOL,
    max_iter: int = PERRON_MAX_ITER,
) -> EigenPair:
    """Rightmost eigenpair of an irreducible Metzler matrix.

    The rightmost eigenvalue of a Metzler matrix is real, with a strictly
    positive eigenvector.  It is found by power iteration on the shifted
    nonnegative matrix ``M + cI`` with ``c = 1 + max_i |M_ii|`` (positive
    diagonal, hence primitive); the iteration runs until successive Rayleigh
    quotients differ by less than ``rayleigh_tol`` (capped at ``max_iter``),
    then the pair is polished by shifted inverse iteration until the residual
    clears ``EIGEN_RESIDUAL_RTOL * ||M||`` with margin.

    Raises
    ------
    NotMetzler
        If any off-diagonal entry is negative.
    NotIrreducible
        If the support graph is not strongly connected.
    NoConvergence
        If the cap is hit or the polish stalls; last residual attached.
    """
    a = as_array(M)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"M must be square, got shape {a.shape}")
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    if np.any(off < 0.0):
        i, j = np.argwhere(off < 0.0)[0]
        raise NotMetzler(f"negative off-diagonal entry M[{i},{j}] = {a[i, j]}")
    ok, witness = strongly_connected(off > 0.0) if n > 1 else (True, None)
    if not ok:
        raise NotIrreducible(f"state {witness[1]} unreachable from state {witness[0]}")

    rayleigh_tol = max(rayleigh_tol, PERRON_RAYLEIGH_TOL)
    mnorm = max(_mat_norm(a), 1e-300)

    def eig_residual(vec, value):
        return float(np.sqrt(np.sum((a @ vec - value * vec) ** 2)))

    c = 1.0 + float(np.max(np.abs(np.diag(a))))
    shifted = a + c * np.eye(n)
    v = np.ones(n) / np.sqrt(n)
    lam = np.inf
    lam_prev = np.inf
    for it in range(max_iter):
        w = shifted @ v
        lam = float(v @ w)  # Rayleigh quotient (v has unit norm)
        v = w / np.sqrt(w @ w)
        if abs(lam - lam_prev) < rayleigh_tol:
            break
        lam_prev = lam
    else:
        raise NoConvergence(
            f"power iteration did not converge in {max_iter} iterations",
            eig_residual(v, lam - c),
        )

    if float(np.sum(v)) < 0:
        v = -v
    est = lam - c
    res = eig_residual(v, est)
    delta = 1e-10 * max(1.0, abs(est))
    for _ in range(4):
        if res <= 1e-13 * mnorm:
            break
        try:
            y = solve_linear(a - (est - delta) * np.eye(n), v)
        except NumericsError:
            delta *= 64.0
            continue
        y = y / np.sqrt(y @ y)
        if float(np.sum(y)) < 0:
            y = -y
        cand_est = float(y @ (a @ y))
        cand_res = eig_residual(y, cand_est)
        if cand_res < res:
            v, est, res = y, cand_est, cand_res
        delta *= 64.0
    if res > EIGEN_RESIDUAL_RTOL * mnorm:
        raise NoConvergence(
            f"eigenpair residual {res:.3e} did not reach {EIGEN_RESIDUAL_RTOL:.0e}*||M||",
            res / mnorm,
        )
    return EigenPair(value=est, vector=v, residual=res / mnorm)


def _jacobi(S: np.ndarray, offdiag_rtol: float) -> tuple[np.ndarray, np.ndarray]:
    # Cyclic Jacobi sweeps; returns (eigenvalues, eigenvector columns).
    a = S.copy()
    n = a.shape[0]
    V = np.eye(n)
    snorm = float(np.sqrt(np.sum(S * S)))
    if n == 1 or snorm == 0.0:
        return np.diag(a).copy(), V
    threshold = offdiag_rtol * snorm
    offdiag = ~np.eye(n, dtype=bool)
    for _sweep in range(100):
        # Sum the off-diagonal squares directly: the subtraction
        # ||A||_F^2 - ||diag||^2 cancels catastrophically once the
        # rotations have nearly diagonalised A.
        off = np.sqrt(np.sum(a[offdiag] ** 2))
        if off < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= threshold / (n * n):
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                cth = 1.0 / np.sqrt(t * t + 1.0)
                sth = t * cth
                rot_p = a[:, p].copy()
                rot_q = a[:, q].copy()
                a[:, p] = cth * rot_p - sth * rot_q
                a[:, q] = sth * rot_p + cth * rot_q
                rot_p = a[p, :].copy()
                rot_q = a[q, :].copy()
                a[p, :] = cth * rot_p - sth * rot_q
                a[q, :] = sth * rot_p + cth * rot_q
                rot_p = V[:, p].copy()
                rot_q = V[:, q].copy()
                V[:, p] = cth * rot_p - sth * rot_q
                V[:, q] = sth * rot_p + cth * rot_q
    else:
        raise NoConvergence("Jacobi sweeps exhausted", float(off))
    return np.diag(a).copy(), V


def _check_symmetric(S) -> np.ndarray:
    a = as_array(S)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"S must be square, got shape {a.shape}")
    snorm = _mat_norm(a)
    if _mat_norm(a - a.T) > SYMMETRY_RTOL * max(snorm, 1e-300):
        raise NotSymmetric(f"||S - S^T|| exceeds {SYMMETRY_RTOL:.0e}*||S||")
    return 0.5 * (a + a.T)


def sym_spectrum(S, offdiag_rtol: float = JACOBI_OFFDIAG_RTOL) -> tuple[np.ndarray, np.ndarray]:
    """Full spectrum of a symmetric matrix via cyclic Jacobi rotations.

    Returns ``(values, vectors)`` with eigenvector columns; unsorted.
    """
    a = _check_symmetric(S)
    return _jacobi(a, max(offdiag_rtol, JACOBI_OFFDIAG_RTOL))


def sym_eig_extreme(S, which: str, offdiag_rtol: float = JACOBI_OFFDIAG_RTOL) -> EigenPair:
    """Extreme eigenpair (``which`` in {"min", "max"}) of a symmetric matrix.

    The matrix is symmetrized by averaging after a symmetry pre-check, the
    full spectrum is computed by cyclic Jacobi rotations (off-diagonal norm
    driven below ``offdiag_rtol * ||S||``), and the requested extreme pair is
    returned.

    Raises
    ------
    NotSymmetric
        If ``||S - S^T|| > SYMMETRY_RTOL * ||S||``.
    """
    if which not in ("min", "max"):
        raise ValueError(f"which must be 'min' or 'max', got {which!r}")
    a = _check_symmetric(S)
    vals, vecs = _jacobi(a, max(offdiag_rtol, JACOBI_OFFDIAG_RTOL))
    idx = int(np.argmin(vals)) if which == "min" else int(np.argmax(vals))
    lam, v = float(vals[idx]), vecs[:, idx]
    v = v / np.sqrt(v @ v)
    snorm = _mat_norm(a)
    residual = float(np.sqrt(np.sum((a @ v - lam * v) ** 2))) / max(snorm, 1e-300)
    return EigenPair(value=lam, vector=v, residual=residual)


@dataclass(frozen=True)
class DefinitenessResult:
    """Outcome of a strict definiteness test.

    ``ok`` carries the verdict; on success ``smallest_pivot`` holds the
    smallest Cholesky pivot of the margin-shifted matrix, on failure
    ``fail_index`` holds the 1-based order of the violating leading principal
    submatrix.
    """

    ok: bool
    smallest_pivot: float | None = None
    fail_index: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def definiteness(S, sense: str, margin: float = 0.0) -> DefinitenessResult:
    """Strict definiteness test with an absolute margin.

    ``sense="positive"`` attempts the Cholesky factorization of
    ``S - margin*I`` and succeeds iff every pivot is positive;
    ``sense="negative"`` applies the same to ``-S - margin*I``.
    """
    if sense not in ("positive", "negative"):
        raise ValueError(f"sense must be 'positive' or 'negative', got {sense!r}")
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    a = _check_symmetric(S)
    if sense == "negative":
        a = -a
    n = a.shape[0]
    t = a - margin * np.eye(n)
    L = np.zeros((n, n))
    smallest = np.inf
    for k in range(n):
        pivot = t[k, k] - float(L[k, :k] @ L[k, :k])
        if pivot <= 0.0:
            return DefinitenessResult(ok=False, fail_index=k + 1)
        smallest = min(smallest, pivot)
        L[k, k] = np.sqrt(pivot)
        if k + 1 < n:
            L[k + 1:, k] = (t[k + 1:, k] - L[k + 1:, :k] @ L[k, :k]) / L[k, k]
    return DefinitenessResult(ok=True, smallest_pivot=float(smallest))
