"""Seeded samplers for Poisson, Matérn-cluster and Thomas-cluster processes.

Random streams
--------------
Every realization draws from its own generator,
``numpy.random.default_rng(SeedSequence(seed, spawn_key=(index, purpose)))``,
where ``index`` is the realization number and ``purpose`` is 0 for the
point pattern and 1 for auxiliary draws such as coverage probes. A
realization therefore depends only on ``(spec, window, margin, seed, index)``
and not on the order in which realizations are evaluated.
"""

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, ResourceError

__all__ = [
    "Kind",
    "ProcessSpec",
    "Window",
    "Realization",
    "make_rng",
    "sample",
    "DEFAULT_MAX_POINTS",
    "TCP_TRUNCATION",
]

DEFAULT_MAX_POINTS = 10**7
# Gaussian scatter beyond 6 sigma carries < 1e-8 of the daughter mass
TCP_TRUNCATION = 6.0
# nearest-head pad for the PPP deployment, in units of 1/sqrt(lambda_p)
HEAD_PAD = 5.0


class Kind(str, enum.Enum):
    PPP = "PPP"
    MCP = "MCP"
    TCP = "TCP"


@dataclass(frozen=True)
class ProcessSpec:
    """Point process describing where sensors are deployed.

    Parameters
    ----------
    kind : Kind or str
        ``"PPP"``, ``"MCP"`` or ``"TCP"``.
    lambda_p : float
        Density of cluster heads per m^2. For the PPP deployment the sensors
        themselves have density ``lambda_p * m`` and the heads form an
        independent PPP used only to assign sensors to clusters.
    m : float
        Mean number of sensors per cluster head.
    r_d : float, optional
        Cluster radius in m (MCP only).
    sigma : float, optional
        Per-axis standard deviation of the daughter scatter in m (TCP only).
    """

    kind: Kind
    lambda_p: float
    m: float
    r_d: float | None = None
    sigma: float | None = None

    def __post_init__(self):
        try:
            kind = Kind(str(getattr(self.kind, "value", self.kind)).upper())
        except ValueError:
            raise DomainError(f"unknown process kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        # zero densities are admitted: they describe an empty deployment
        if not self.lambda_p >= 0:
            raise DomainError(f"lambda_p must be non-negative, got {self.lambda_p}")
        if not self.m >= 0:
            raise DomainError(f"m must be non-negative, got {self.m}")
        if kind is Kind.MCP and not (self.r_d is not None and self.r_d > 0):
            raise DomainError("an MCP needs a positive cluster radius r_d")
        if kind is Kind.TCP and not (self.sigma is not None and self.sigma > 0):
            raise DomainError("a TCP needs a positive scatter sigma")

    @property
    def lambda_total(self):
        return self.lambda_p * self.m

    @property
    def lambda_d(self):
        """Daughter intensity on the cluster disk (MCP only)."""
        if self.kind is not Kind.MCP:
            raise DomainError("lambda_d is defined for MCP only")
        return self.m / (math.pi * self.r_d**2)

    @property
    def spread(self):
        """Largest distance from a head at which its daughters matter."""
        if self.kind is Kind.MCP:
            return self.r_d
        if self.kind is Kind.TCP:
            return TCP_TRUNCATION * self.sigma
        return 0.0

    def replace(self, **changes):
        fields = dict(kind=self.kind, lambda_p=self.lambda_p, m=self.m,
                      r_d=self.r_d, sigma=self.sigma)
        fields.update(changes)
        return ProcessSpec(**fields)


@dataclass(frozen=True)
class Window:
    """Observation window ``[0, width] x [0, height]`` in metres."""

    width: float = 1000.0
    height: float = 1000.0

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise DomainError("window sides must be positive")

    @property
    def area(self):
        return self.width * self.height

    @property
    def centre(self):
        return np.array([0.5 * self.width, 0.5 * self.height])

    def bounds(self, margin=0.0):
        """``(xmin, ymin, xmax, ymax)`` of the window dilated by ``margin``."""
        return (-margin, -margin, self.width + margin, self.height + margin)

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        return (
            (pts[:, 0] >= 0) & (pts[:, 0] <= self.width)
            & (pts[:, 1] >= 0) & (pts[:, 1] <= self.height)
        )


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Realization:
    """A sampled deployment.

    Attributes
    ----------
    germs : ndarray, shape (n, 2)
        Sensor locations, including those outside the observation window.
    parent_of : ndarray of int, shape (n,)
        Index into ``heads`` of each sensor's cluster head.
    heads : ndarray, shape (k, 2)
        Cluster-head locations.
    """

    germs: np.ndarray
    parent_of: np.ndarray
    heads: np.ndarray

    def __post_init__(self):
        germs = np.asarray(self.germs, dtype=float).reshape(-1, 2)
        parent_of = np.asarray(self.parent_of, dtype=np.intp).reshape(-1)
        heads = np.asarray(self.heads, dtype=float).reshape(-1, 2)
        if len(parent_of) != len(germs):
            raise DomainError("every germ needs exactly one head")
        if len(germs) and (parent_of.min() < 0 or parent_of.max() >= len(heads)):
            raise DomainError("parent index out of range")
        object.__setattr__(self, "germs", _frozen(germs))
        object.__setattr__(self, "parent_of", _frozen(parent_of))
        object.__setattr__(self, "heads", _frozen(heads))

    def __len__(self):
        return len(self.germs)

    def __eq__(self, other):
        if not isinstance(other, Realization):
            return NotImplemented
        return (
            np.array_equal(self.germs, other.germs)
            and np.array_equal(self.parent_of, other.parent_of)
            and np.array_equal(self.heads, other.heads)
        )

    @property
    def germ_heads(self):
        """Head coordinates aligned with ``germs``."""
        return self.heads[self.parent_of]

    def to_csv(self, path_or_file):
        """Write one ``germ_x,germ_y,head_x,head_y`` row per germ."""
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["germ_x", "germ_y", "head_x", "head_y"])
            for (gx, gy), (hx, hy) in zip(self.germs, self.germ_heads):
                w.writerow([f"{gx:.9g}", f"{gy:.9g}", f"{hx:.9g}", f"{hy:.9g}"])
        finally:
            if own:
                fh.close()


def make_rng(seed, index=0, purpose=0):
    """Generator for realization ``index`` of a run seeded with ``seed``."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise DomainError("seed must be a 64-bit unsigned integer")
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(int(index), int(purpose)))
    )


def _uniform_in_box(rng, n, box):
    x0, y0, x1, y1 = box
    pts = rng.random((n, 2))
    pts[:, 0] = x0 + (x1 - x0) * pts[:, 0]
    pts[:, 1] = y0 + (y1 - y0) * pts[:, 1]
    return pts


def _box_area(box):
    return (box[2] - box[0]) * (box[3] - box[1])


def sample(spec, window, margin, seed, index=0, max_points=DEFAULT_MAX_POINTS):
    """Draw one realization of ``spec``.

    Parents (or, for the PPP deployment, the sensors) are generated on the
    window dilated by ``margin`` so that coverage statistics inside the
    window are free of edge effects.

    Parameters
    ----------
    spec : ProcessSpec
    window : Window
    margin : float
        Dilation of the window, ``margin >= 0``.
    seed : int
        Master seed (64-bit unsigned).
    index : int, optional
        Realization number; selects the sub-stream (see module docstring).
    max_points : int, optional
        Refuse to draw when the expected number of points exceeds this.

    Returns
    -------
    Realization
    """
    if not margin >= 0:
        raise DomainError(f"margin must be non-negative, got {margin}")
    rng = make_rng(seed, index)
    box = window.bounds(margin)
    lam = spec.lambda_p

    if spec.kind is Kind.PPP:
        head_box = window.bounds(margin + (HEAD_PAD / math.sqrt(lam) if lam > 0 else 0.0))
        expected = lam * spec.m * _box_area(box) + lam * _box_area(head_box)
        _check_budget(expected, max_points)
        germs = _uniform_in_box(rng, rng.poisson(spec.lambda_total * _box_area(box)), box)
        heads = _uniform_in_box(rng, rng.poisson(lam * _box_area(head_box)), head_box)
        if len(germs) and not len(heads):
            raise ResourceError("no cluster head drawn; enlarge the window")
        if len(germs):
            _, parent_of = cKDTree(heads).query(germs)
        else:
            parent_of = np.empty(0, dtype=np.intp)
        return Realization(germs, parent_of, heads)

    expected = lam * _box_area(box) * (1.0 + spec.m)
    _check_budget(expected, max_points)
    heads = _uniform_in_box(rng, rng.poisson(lam * _box_area(box)), box)
    counts = rng.poisson(spec.m, size=len(heads))
    parent_of = np.repeat(np.arange(len(heads)), counts)
    n = len(parent_of)
    if spec.kind is Kind.MCP:
        radius = spec.r_d * np.sqrt(rng.random(n))
        angle = 2 * np.pi * rng.random(n)
        offsets = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
    else:
        offsets = rng.normal(0.0, spec.sigma, size=(n, 2))
    germs = heads[parent_of] + offsets
    return Realization(germs, parent_of, heads)


def _check_budget(expected, max_points):
    if expected > max_points:
        raise ResourceError(
            f"expected {expected:.3g} points exceeds the budget of {max_points}"
        )
