"""Planar geometry, special functions and adaptive quadrature.

Everything here is a pure function of its arguments. The lens-area helpers
accept scalars or numpy arrays and broadcast like ufuncs.
"""

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError

__all__ = [
    "QuadratureSettings",
    "DEFAULT_QUADRATURE",
    "lens_area",
    "lens_area_lower_circle",
    "lens_area_upper_rect",
    "gaussian_disk_mass",
    "gaussian_disk_mass_density",
    "integrate_adaptive",
    "integrate_semi_infinite",
    "erf",
    "gamma",
    "log_i0",
]


@dataclass(frozen=True)
class QuadratureSettings:
    """Tolerances shared by every numerical integral in the package.

    Parameters
    ----------
    rel_tol, abs_tol : float
        An integral is accepted once its error estimate is below
        ``max(abs_tol, rel_tol * |I|)``.
    max_subdivisions : int
        Upper bound on the number of intervals kept by the adaptive rule.
    tail_cutoff : float
        A semi-infinite integral stops growing its domain once the newest
        panel adds less than this fraction of the running total.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    tail_cutoff: float = 1e-10

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.abs_tol >= 0:
            raise DomainError(f"abs_tol must be non-negative, got {self.abs_tol}")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise DomainError(
                f"max_subdivisions must be a positive integer, got {self.max_subdivisions}"
            )
        if not 0 < self.tail_cutoff < 1:
            raise DomainError(f"tail_cutoff must lie in (0, 1), got {self.tail_cutoff}")

    def tightened(self, factor=10.0):
        """Same settings with both tolerances divided by ``factor``."""
        return QuadratureSettings(
            rel_tol=self.rel_tol / factor,
            abs_tol=self.abs_tol / factor,
            max_subdivisions=self.max_subdivisions,
            tail_cutoff=self.tail_cutoff,
        )


DEFAULT_QUADRATURE = QuadratureSettings()


# ---------------------------------------------------------------------------
# special functions

def erf(x):
    return special.erf(x)


def gamma(x):
    return special.gamma(x)


def log_i0(z):
    """Natural log of the modified Bessel function I0, finite for large z."""
    z = np.abs(np.asarray(z, dtype=float))
    out = np.log(special.i0e(z)) + z
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# two-disk geometry

def _check_disk_args(d, r1, r2):
    d = np.asarray(d, dtype=float)
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    if np.any(d < 0) or np.any(np.isnan(d)):
        raise DomainError("centre distance must be non-negative")
    if np.any(~(r1 > 0)) or np.any(~(r2 > 0)):
        raise DomainError("disk radii must be positive")
    return np.broadcast_arrays(d, r1, r2)


def _scalar(a):
    return float(a) if a.ndim == 0 else a


def lens_area(d, r1, r2):
    """Area of ``B(o, r1) ∩ B((d, 0), r2)``.

    Parameters
    ----------
    d : float or array_like
        Distance between the disk centres, ``d >= 0``.
    r1, r2 : float or array_like
        Disk radii, both positive.

    Returns
    -------
    float or ndarray
        The intersection area. Equals ``pi * min(r1, r2)**2`` when one disk
        contains the other and 0 once the disks are at least tangent.
    """
    d, r1, r2 = _check_disk_args(d, r1, r2)
    # order the radii so the floating-point result is symmetric in them
    r1, r2 = np.maximum(r1, r2), np.minimum(r1, r2)
    small = r2
    contained = d <= r1 - r2
    disjoint = d >= r1 + r2
    partial = ~(contained | disjoint)

    out = np.where(contained, np.pi * small**2, 0.0)
    if np.any(partial):
        dp, ap, bp = d[partial], r1[partial], r2[partial]
        # law of cosines, arranged so a tiny d never forms 0/0; the clamp
        # absorbs drift past +-1 near d = |r1 - r2|
        skew = ((ap - bp) / dp) * (ap + bp)
        c1 = np.clip(0.5 * (dp / ap + skew / ap), -1.0, 1.0)
        c2 = np.clip(0.5 * (dp / bp - skew / bp), -1.0, 1.0)
        kite = (-dp + ap + bp) * (dp + ap - bp) * (dp - ap + bp) * (dp + ap + bp)
        area = ap**2 * np.arccos(c1) + bp**2 * np.arccos(c2) - 0.5 * np.sqrt(np.maximum(kite, 0.0))
        out = np.array(out, copy=True)
        out[partial] = np.clip(area, 0.0, np.pi * small[partial] ** 2)
    return _scalar(out)


def lens_area_lower_circle(d, r1, r2):
    """Area of the largest disk inscribed in the two-disk lens.

    In the partial-overlap regime the inscribed disk has diameter
    ``r1 + r2 - d``; in the containment regime the lens is itself a disk and
    the exact area is returned.
    """
    d, r1, r2 = _check_disk_args(d, r1, r2)
    small = np.minimum(r1, r2)
    half_width = np.clip(0.5 * (r1 + r2 - d), 0.0, None)
    out = np.where(
        d <= np.abs(r1 - r2),
        np.pi * small**2,
        np.where(d < r1 + r2, np.pi * half_width**2, 0.0),
    )
    return _scalar(out)


def lens_area_upper_rect(d, r1, r2):
    """Area of a rectangle covering the two-disk lens, capped by the smaller disk.

    The rectangle spans the overlap along the centre line (``r1 + r2 - d``)
    and has height ``2 * min(r1, r2)``.
    """
    d, r1, r2 = _check_disk_args(d, r1, r2)
    small = np.minimum(r1, r2)
    rect = (r1 + r2 - d) * 2.0 * small
    out = np.where(d < r1 + r2, np.minimum(rect, np.pi * small**2), 0.0)
    return _scalar(out)


# ---------------------------------------------------------------------------
# adaptive Gauss-Kronrod quadrature (7-point Gauss embedded in 15-point Kronrod)

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes (counting from the ends)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[7] = _WG[3]
_GAUSS_W[[9, 11, 13]] = _WG[2::-1]

_EPS = np.finfo(float).eps


def _gk15(f, a, b):
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = centre + half * _NODES
    fx = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    if not np.all(np.isfinite(fx)):
        raise DomainError(f"integrand is not finite on [{a}, {b}]")
    kronrod = half * np.dot(_KRONROD_W, fx)
    gauss = half * np.dot(_GAUSS_W, fx)
    resabs = abs(half) * np.dot(_KRONROD_W, np.abs(fx))
    mean = kronrod / (2 * half) if half else 0.0
    resasc = abs(half) * np.dot(_KRONROD_W, np.abs(fx - mean))
    err = abs(kronrod - gauss)
    # error scaling used by QUADPACK's qk15
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50 * _EPS):
        err = max(50 * _EPS * resabs, err)
    return float(kronrod), float(err)


def integrate_adaptive(f, a, b, q=DEFAULT_QUADRATURE, points=()):
    """Integrate ``f`` over ``[a, b]`` by globally adaptive bisection.

    ``f`` is called with a 1-D numpy array of abscissae and must return an
    array of the same shape (or a broadcastable scalar).

    Parameters
    ----------
    f : callable
    a, b : float
        Integration limits with ``a <= b``.
    q : QuadratureSettings
    points : sequence of float, optional
        Interior break points (kinks, peaks) used to seed the partition.

    Returns
    -------
    float

    Raises
    ------
    ConvergenceError
        When the subdivision budget runs out before the error estimate meets
        ``max(abs_tol, rel_tol * |I|)``.
    """
    a = float(a)
    b = float(b)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise DomainError("integration limits must be finite")
    if a > b:
        raise DomainError(f"lower limit {a} exceeds upper limit {b}")
    if a == b:
        return 0.0

    edges = sorted({a, b, *(float(p) for p in points if a < p < b)})
    heap = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _gk15(f, lo, hi)
        heap.append((-err, lo, hi, val))
    heapq.heapify(heap)

    while True:
        total = math.fsum(item[3] for item in heap)
        err_total = math.fsum(-item[0] for item in heap)
        if err_total <= max(q.abs_tol, q.rel_tol * abs(total)):
            return total
        if len(heap) >= q.max_subdivisions:
            raise ConvergenceError(
                f"adaptive quadrature on [{a}, {b}] exhausted {q.max_subdivisions} "
                f"subdivisions (estimate {total!r}, error {err_total:.3g})",
                estimate=total,
                error=err_total,
            )
        neg_err, lo, hi, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise ConvergenceError(
                f"interval [{lo}, {hi}] cannot be bisected further "
                f"(estimate {total!r}, error {err_total:.3g})",
                estimate=total,
                error=err_total,
            )
        for s, t in ((lo, mid), (mid, hi)):
            val, err = _gk15(f, s, t)
            heapq.heappush(heap, (-err, s, t, val))


def integrate_semi_infinite(f, a, scale, q=DEFAULT_QUADRATURE, start=None, points=()):
    """Integrate a non-negative, eventually decreasing ``f`` over ``[a, inf)``.

    The domain is ``[a, start]`` (``start`` defaults to ``a + scale``)
    followed by panels of width ``scale``. Panels are added until the newest
    one contributes less than ``q.tail_cutoff`` of the running total.

    Raises
    ------
    ConvergenceError
        If 64 tail panels are not enough.
    """
    if not scale > 0:
        raise DomainError(f"scale must be positive, got {scale}")
    a = float(a)
    head_end = a + scale if start is None else max(float(start), a)
    total = integrate_adaptive(f, a, head_end, q, points=points)
    lo = head_end
    for _ in range(64):
        hi = lo + scale
        panel = integrate_adaptive(f, lo, hi, q, points=points)
        total += panel
        if abs(panel) <= q.tail_cutoff * abs(total):
            return total
        lo = hi
    raise ConvergenceError(
        f"tail of semi-infinite integral still contributing at {lo} "
        f"(64 panels of width {scale})",
        estimate=total,
        error=abs(panel),
    )


# ---------------------------------------------------------------------------
# Gaussian mass over an offset disk

def gaussian_disk_mass_density(t, x, sigma):
    """Radial density of the offset-disk Gaussian mass, d/dr of the mass at r = t.

    ``(t / sigma**2) * exp(-(x**2 + t**2) / (2 sigma**2)) * I0(x t / sigma**2)``,
    evaluated through the exponentially scaled Bessel function so that large
    ``x t / sigma**2`` does not overflow.
    """
    t = np.asarray(t, dtype=float)
    s2 = sigma * sigma
    out = (t / s2) * np.exp(-((x - t) ** 2) / (2 * s2)) * special.i0e(x * t / s2)
    return out[()] if out.ndim == 0 else out


def gaussian_disk_mass(x, r, sigma, q=DEFAULT_QUADRATURE):
    """Mass of an isotropic 2-D Gaussian over a disk not centred on its mean.

    Computes ``P(||(x, 0) + N(0, sigma^2 I)|| <= r)``, i.e. the standard
    normal measure of ``B((x, 0), r)`` after scaling by ``sigma``.

    Parameters
    ----------
    x : float
        Distance between the Gaussian mean and the disk centre, ``x >= 0``.
    r : float
        Disk radius, ``r >= 0``.
    sigma : float
        Per-axis standard deviation, ``sigma > 0``.
    q : QuadratureSettings, optional

    Returns
    -------
    float
        A probability in ``[0, 1]``.
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if x < 0 or r < 0:
        raise DomainError("x and r must be non-negative")
    if r == 0:
        return 0.0
    x = float(x)
    # the integrand is concentrated within a few sigma of t = x
    marks = [x - 8 * sigma, x, x + 8 * sigma]
    lo = max(0.0, x - 40 * sigma)
    hi = min(float(r), x + 40 * sigma)
    if lo >= hi:
        return 0.0
    val = integrate_adaptive(
        lambda t: gaussian_disk_mass_density(t, x, sigma), lo, hi, q, points=marks
    )
    return min(max(val, 0.0), 1.0)
