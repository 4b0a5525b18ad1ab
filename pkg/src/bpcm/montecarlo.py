"""Monte Carlo estimators used to cross-check the analytic results.

The independent unit is the realization: cluster processes make coverage of
nearby probes strongly correlated, so the reported standard error is the
between-realization one. Realization ``i`` uses the random sub-streams
``(seed, i, 0)`` for the point pattern and ``(seed, i, 1)`` for probes, and
results are reduced in index order, so an estimate does not depend on the
number of worker processes.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .coverage import BooleanModelSpec
from .errors import DomainError
from .power import PowerParams
from .processes import Kind, Window, make_rng, sample

__all__ = [
    "Estimate",
    "McConfig",
    "SpatialHashGrid",
    "covered",
    "estimate_fac",
    "estimate_sensing_prob",
    "estimate_power",
    "PARALLELISM_ENV",
]

Z95 = 1.96
BRUTE_FORCE_LIMIT = 1000
PARALLELISM_ENV = "BPCM_MAX_WORKERS"


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo estimate with a normal-approximation 95% interval."""

    value: float
    std_error: float
    ci95: tuple
    n_samples: int

    @classmethod
    def from_samples(cls, samples):
        samples = np.asarray(samples, dtype=float)
        n = len(samples)
        if n == 0:
            raise DomainError("an estimate needs at least one sample")
        value = float(np.mean(samples))
        se = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
        return cls(value, se, (value - Z95 * se, value + Z95 * se), n)

    def contains(self, x):
        return self.ci95[0] <= x <= self.ci95[1]


@dataclass(frozen=True)
class McConfig:
    n_realizations: int = 200
    n_probes: int = 10_000
    window: Window = field(default_factory=Window)
    seed: int = 0
    parallelism: int = 1

    def __post_init__(self):
        for name in ("n_realizations", "n_probes", "parallelism"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


class SpatialHashGrid:
    """Uniform grid over a planar point set for fixed-radius queries.

    Points are bucketed into square cells of side ``cell``; a query with
    radius at most ``cell`` only has to inspect the 3x3 block of cells around
    it. Bucket contents are stored contiguously (sorted by cell key) so that
    lookups are vectorised with ``searchsorted``.
    """

    def __init__(self, points, cell):
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        if not cell > 0:
            raise DomainError("cell size must be positive")
        self.cell = float(cell)
        self.origin = points.min(axis=0) if len(points) else np.zeros(2)
        ij = self._cells(points)
        self.shape = tuple(ij.max(axis=0) + 1) if len(points) else (0, 0)
        keys = ij[:, 0] * self.shape[1] + ij[:, 1] if len(points) else np.empty(0, np.int64)
        order = np.argsort(keys, kind="stable")
        self.keys = keys[order]
        self.points = points[order]

    def _cells(self, pts):
        return np.floor((pts - self.origin) / self.cell).astype(np.int64)

    def any_within(self, queries, radius):
        """Boolean mask: does each query have a point within ``radius``?"""
        if radius > self.cell:
            raise DomainError("query radius exceeds the grid cell size")
        queries = np.asarray(queries, dtype=float).reshape(-1, 2)
        hit = np.zeros(len(queries), dtype=bool)
        if not len(self.points):
            return hit
        nx, ny = self.shape
        r2 = radius * radius
        qij = self._cells(queries)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                cx = qij[:, 0] + dx
                cy = qij[:, 1] + dy
                valid = (cx >= 0) & (cx < nx) & (cy >= 0) & (cy < ny) & ~hit
                key = cx * ny + cy
                start = np.searchsorted(self.keys, key, side="left")
                count = np.where(valid, np.searchsorted(self.keys, key, side="right") - start, 0)
                for j in range(int(count.max(initial=0))):
                    sel = np.flatnonzero((count > j) & ~hit)
                    if not len(sel):
                        break
                    diff = self.points[start[sel] + j] - queries[sel]
                    hit[sel] |= np.einsum("ij,ij->i", diff, diff) <= r2
        return hit


def covered(germs, probes, radius):
    """Mask of probes lying within ``radius`` of at least one germ."""
    germs = np.asarray(germs, dtype=float).reshape(-1, 2)
    probes = np.asarray(probes, dtype=float).reshape(-1, 2)
    if not len(germs):
        return np.zeros(len(probes), dtype=bool)
    if len(germs) < BRUTE_FORCE_LIMIT:
        out = np.empty(len(probes), dtype=bool)
        r2 = radius * radius
        step = max(1, 2_000_000 // len(germs))
        for s in range(0, len(probes), step):
            p = probes[s:s + step]
            d2 = ((p[:, None, :] - germs[None, :, :]) ** 2).sum(axis=2)
            out[s:s + step] = (d2 <= r2).any(axis=1)
        return out
    extent = float(np.ptp(germs, axis=0).max())
    # floor on the cell size keeps integer cell keys small for tiny radii
    grid = SpatialHashGrid(germs, max(radius, extent / 2**20))
    return grid.any_within(probes, radius)


# ---------------------------------------------------------------------------
# parallel map over realization indices

def _workers(requested):
    cap = os.environ.get(PARALLELISM_ENV)
    if cap:
        requested = min(requested, max(1, int(cap)))
    return max(1, int(requested))


def _run_chunk(job):
    func, args, indices = job
    return [func(i, *args) for i in indices]


def _map_realizations(func, args, cfg):
    n = cfg.n_realizations
    workers = _workers(cfg.parallelism)
    if workers == 1:
        return np.array([func(i, *args) for i in range(n)], dtype=float)
    chunks = [c for c in np.array_split(np.arange(n), workers * 4) if len(c)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(_run_chunk, [(func, args, c.tolist()) for c in chunks]))
    return np.array([v for part in parts for v in part], dtype=float)


# ---------------------------------------------------------------------------
# estimators

def _margin(spec, reach):
    return reach + spec.spread


def _fac_one(i, model, window, seed, n_probes, margin):
    real = sample(model.process, window, margin, seed, i)
    rng = make_rng(seed, i, 1)
    probes = rng.random((n_probes, 2)) * (window.width, window.height)
    return covered(real.germs, probes, model.R).mean()


def estimate_fac(model: BooleanModelSpec, cfg: McConfig) -> Estimate:
    """Fraction of the window covered by the sensing disks.

    Each realization contributes the covered fraction of ``cfg.n_probes``
    uniform probes; the estimate averages those fractions.
    """
    margin = _margin(model.process, model.R)
    fractions = _map_realizations(
        _fac_one, (model, cfg.window, cfg.seed, cfg.n_probes, margin), cfg
    )
    return Estimate.from_samples(fractions)


def _sensing_one(i, process, window, seed, reach):
    real = sample(process, window, 0.0, seed, i)
    d = real.germs - window.centre
    return float(np.any(np.einsum("ij,ij->i", d, d) <= reach * reach))


def estimate_sensing_prob(model: BooleanModelSpec, r_K: float, cfg: McConfig) -> Estimate:
    """Probability that a disk event of radius ``r_K`` is sensed.

    The event sits at the window centre; it is sensed when some sensor lies
    within ``R + r_K`` of it. Only parents inside the window are drawn, so
    the window half-width has to exceed ``R + r_K`` plus the cluster spread.
    """
    if not r_K >= 0:
        raise DomainError(f"event radius must be non-negative, got {r_K}")
    reach = model.R + r_K
    need = _margin(model.process, reach)
    half = 0.5 * min(cfg.window.width, cfg.window.height)
    if half <= need:
        raise DomainError(
            f"window half-width {half} must exceed R + r_K + cluster spread = {need}"
        )
    hits = _map_realizations(_sensing_one, (model.process, cfg.window, cfg.seed, reach), cfg)
    return Estimate.from_samples(hits)


def _power_one(i, process, params, window, seed, margin):
    real = sample(process, window, margin, seed, i)
    if params.tau == 0:
        return 0.0
    inside = window.contains(real.germs)
    d = np.linalg.norm(real.germs[inside] - real.germ_heads[inside], axis=1)
    return params.tau * float(np.sum(d**params.alpha)) / window.area


def estimate_power(model: BooleanModelSpec, p: PowerParams, cfg: McConfig) -> Estimate:
    """Empirical per-unit-area power ``sum tau |z - c_z|^alpha / area`` over sensors in the window."""
    process = model.process
    margin = process.spread if process.kind is not Kind.PPP else 0.0
    values = _map_realizations(_power_one, (process, p, cfg.window, cfg.seed, margin), cfg)
    return Estimate.from_samples(values)
