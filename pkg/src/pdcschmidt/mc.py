"""
Importance-sampled Monte Carlo with reproducible, shard-parallel streams.

Each shard draws from its own Philox counter-based generator keyed by
``(seed, shard)``, so the value depends only on ``(seed, n, shards, spec)``
and never on how many workers process the shards or in which order.  Per-batch
sums are combined in a fixed order, and the standard error comes from the
spread of the batch means.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

MIN_SAMPLES = 10_000
DEFAULT_BATCHES = 32
CHUNK = 1 << 16


class NonFiniteIntegrandError(FloatingPointError):
    pass


@dataclass(frozen=True)
class Gaussian:
    std: float
    mean: float = 0.0

    def __post_init__(self):
        if not self.std > 0:
            raise ValueError(f"Gaussian proposal needs std > 0, got {self.std}")


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"Uniform proposal needs lo < hi, got ({self.lo}, {self.hi})")


@dataclass(frozen=True)
class SamplerSpec:
    """One proposal per integration coordinate."""

    proposals: tuple[Gaussian | Uniform, ...]

    @property
    def dim(self) -> int:
        return len(self.proposals)

    def draw(self, rng: np.random.Generator, m: int):
        """Return samples ``u`` of shape ``(m, dim)`` and their proposal density."""
        gi = [i for i, p in enumerate(self.proposals) if isinstance(p, Gaussian)]
        ui = [i for i, p in enumerate(self.proposals) if isinstance(p, Uniform)]
        u = np.empty((m, self.dim))
        logp = np.zeros(m)
        if gi:
            z = rng.standard_normal((m, len(gi)))
            std = np.array([self.proposals[i].std for i in gi])
            mean = np.array([self.proposals[i].mean for i in gi])
            u[:, gi] = mean + std * z
            logp -= 0.5 * np.sum(z * z, axis=1) + np.sum(np.log(std)) + 0.5 * len(gi) * math.log(2 * math.pi)
        if ui:
            r = rng.random((m, len(ui)))
            lo = np.array([self.proposals[i].lo for i in ui])
            hi = np.array([self.proposals[i].hi for i in ui])
            u[:, ui] = lo + (hi - lo) * r
            logp -= np.sum(np.log(hi - lo))
        return u, np.exp(logp)

    def density(self, u):
        u = np.atleast_2d(u)
        logp = np.zeros(u.shape[0])
        for i, p in enumerate(self.proposals):
            if isinstance(p, Gaussian):
                z = (u[:, i] - p.mean) / p.std
                logp += -0.5 * z * z - math.log(p.std) - 0.5 * math.log(2 * math.pi)
            else:
                inside = (u[:, i] >= p.lo) & (u[:, i] <= p.hi)
                logp += np.where(inside, -math.log(p.hi - p.lo), -np.inf)
        return np.exp(logp)


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo result.  For complex integrands ``stderr`` packs the real-
    and imaginary-part errors as ``se_re + 1j*se_im``."""

    value: float | complex
    stderr: float | complex
    n_samples: int
    seed: int
    n_shards: int
    n_batches: int

    @property
    def real(self) -> float:
        return float(np.real(self.value))

    @property
    def real_stderr(self) -> float:
        return float(np.real(self.stderr))

    @property
    def rel_err(self) -> float:
        return self.real_stderr / abs(self.real) if self.real else math.inf


def _shard_sizes(n, shards):
    base, extra = divmod(n, shards)
    return [base + (s < extra) for s in range(shards)]


def _run_shard(f, spec, seed, shard, n_shard, n_batches, chunk):
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, shard], dtype=np.uint64)))
    sizes = _shard_sizes(n_shard, n_batches)
    sums = []
    for size in sizes:
        total = 0.0
        left = size
        while left:
            m = min(chunk, left)
            u, p = spec.draw(rng, m)
            vals = np.asarray(f(u))
            if vals.shape != (m,):
                raise ValueError(f"integrand must return shape ({m},), got {vals.shape}")
            bad = ~np.isfinite(vals)
            if np.any(bad):
                k = int(np.flatnonzero(bad)[0])
                raise NonFiniteIntegrandError(
                    f"integrand returned {vals[k]} at u = {np.array2string(u[k], precision=6)}"
                )
            total = total + np.sum(vals / p)
            left -= m
        sums.append(total)
    return sums, sizes


def estimate(f: Callable[[np.ndarray], np.ndarray], spec: SamplerSpec, n: int,
             seed: int = 0, shards: int = 1, workers: int = 1,
             batches: int = DEFAULT_BATCHES, chunk: int = CHUNK) -> McEstimate:
    """Estimate ``int f(u) du`` as the mean of ``f(u_i)/p(u_i)``, ``u_i ~ spec``.

    ``f`` maps an ``(m, dim)`` array to ``m`` real or complex values and must
    be finite wherever the proposal has support.  ``workers`` only changes
    wall time: the result is a function of ``(seed, n, shards, spec)``.
    """
    if n < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n}")
    if shards < 1 or batches < 2:
        raise ValueError("need shards >= 1 and batches >= 2")
    per_shard = max(1, math.ceil(batches / shards))
    sizes = _shard_sizes(n, shards)
    jobs = [(f, spec, seed, s, sizes[s], per_shard, chunk) for s in range(shards)]
    if workers > 1 and shards > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda a: _run_shard(*a), jobs))
    else:
        results = [_run_shard(*a) for a in jobs]

    batch_sums = np.array([s for r in results for s in r[0]])
    batch_n = np.array([k for r in results for k in r[1]], dtype=float)
    keep = batch_n > 0
    batch_sums, batch_n = batch_sums[keep], batch_n[keep]
    value = np.sum(batch_sums) / n
    nb = len(batch_n)

    def se(part):
        means = part / batch_n
        mu = np.sum(part) / n
        var = np.sum((batch_n * (means - mu)) ** 2) / n**2 * nb / (nb - 1)
        return math.sqrt(var)

    if np.iscomplexobj(batch_sums):
        err = complex(se(batch_sums.real), se(batch_sums.imag))
        value = complex(value)
    else:
        err = se(batch_sums)
        value = float(value)
    return McEstimate(value, err, n, seed, shards, nb)


def gaussian_uniform_spec(gauss_stds: Sequence[float] = (), uniform_bounds: Sequence[tuple[float, float]] = ()):
    """Uniform coordinates first, then Gaussian ones."""
    return SamplerSpec(tuple(Uniform(lo, hi) for lo, hi in uniform_bounds)
                       + tuple(Gaussian(s) for s in gauss_stds))
