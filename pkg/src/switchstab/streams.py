"""Deterministic counter-based random streams.

Reproducibility contract
------------------------
All randomness in this package flows through :class:`Stream`, a thin wrapper
around the counter-based Philox-4x64 bit generator keyed by
``(seed, stream_id)``.  Identical keys yield identical variate sequences on
every platform and under any thread schedule, because each logical consumer
(one sampled chain path, one path's diffusion noise) owns its own stream.

Output functions (fixed, documented, never platform-dependent):

* uniform: ``u = ((raw64 >> 11) + 0.5) * 2**-53`` — strictly inside (0, 1);
* standard normal: inverse normal CDF of the uniform (``scipy.special.ndtri``);
* exponential(rate): ``-log(u) / rate``.

Per-index substreams are derived with :func:`substream`, the splitmix64
finalizer applied to ``seed + (index + 1) * GOLDEN (mod 2**64)``.  The map is
injective in ``index`` for fixed ``seed`` (an odd-constant affine step chased
by a bijective mix), so distinct paths never share a stream.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15          # odd => x -> x + (i+1)*GOLDEN is injective
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_U53 = 2.0 ** -53


def splitmix64(z: int) -> int:
    """The splitmix64 bijective finalizer on 64-bit words."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return (z ^ (z >> 31)) & MASK64


def substream(seed: int, index: int) -> int:
    """Derive the 64-bit seed of logical substream ``index`` under ``seed``."""
    if index < 0:
        raise ValueError("substream index must be nonnegative")
    return splitmix64((seed + (index + 1) * GOLDEN) & MASK64)


class Stream:
    """A sequential variate stream keyed by ``(seed, stream_id)``.

    Variates are transforms of consecutive raw 64-bit words; mixing calls to
    the different draw methods is well-defined (each call consumes the next
    words in order).  Instances are cheap and not thread-safe; give each
    concurrent consumer its own stream.
    """

    _BUFFER = 256

    def __init__(self, seed: int, stream_id: int):
        self._key = (int(seed) & MASK64, int(stream_id) & MASK64)
        self._bg = np.random.Philox(key=np.array(self._key, dtype=np.uint64))
        self._cache = np.empty(0, dtype=np.uint64)
        self._pos = 0

    def raw(self, count: int) -> np.ndarray:
        """Next ``count`` raw 64-bit words as a uint64 array."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        out = np.empty(count, dtype=np.uint64)
        got = 0
        while got < count:
            if self._pos == len(self._cache):
                self._cache = self._bg.random_raw(max(self._BUFFER, count - got))
                self._pos = 0
            take = min(count - got, len(self._cache) - self._pos)
            out[got:got + take] = self._cache[self._pos:self._pos + take]
            self._pos += take
            got += take
        return out

    def uniforms(self, shape) -> np.ndarray:
        """Uniform variates in the open interval (0, 1), row-major order."""
        shape = (shape,) if np.isscalar(shape) else tuple(shape)
        n = int(np.prod(shape, dtype=np.int64)) if shape else 1
        raw = self.raw(n)
        u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _U53
        return u.reshape(shape)

    def uniform(self) -> float:
        return float(self.uniforms(1)[0])

    def normals(self, shape) -> np.ndarray:
        """Standard normal variates via the inverse normal CDF."""
        return ndtri(self.uniforms(shape))

    def exponential(self, rate: float) -> float:
        """One exponential variate with the given rate (mean 1/rate)."""
        if rate <= 0:
            raise ValueError(f"rate must be positive, got {rate}")
        return -float(np.log(self.uniform())) / rate
