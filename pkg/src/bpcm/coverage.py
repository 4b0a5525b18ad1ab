"""Capacity functionals of Boolean models with disk grains, for disk events.

A disk grain of radius ``R`` meets the event ``B(o, r_K)`` exactly when its
germ lies within ``r = R + r_K`` of the origin, so every quantity here
depends on ``R`` and ``r_K`` only through ``r``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSettings,
    erf,
    gaussian_disk_mass,
    integrate_adaptive,
    integrate_semi_infinite,
    lens_area,
    lens_area_lower_circle,
    lens_area_upper_rect,
)
from .processes import TCP_TRUNCATION, Kind, ProcessSpec

__all__ = [
    "BooleanModelSpec",
    "CoverageQuery",
    "cap_ppp",
    "cap_mcp",
    "cap_mcp_bounds_thm3",
    "cap_mcp_bounds_thm4",
    "cap_mcp_limit",
    "cap_tcp",
    "capacity",
    "thm3_printed_report",
    "bound_slack",
]


@dataclass(frozen=True)
class BooleanModelSpec:
    """A deployment together with the sensing radius ``R`` of every sensor."""

    process: ProcessSpec
    R: float

    def __post_init__(self):
        if not self.R > 0:
            raise DomainError(f"sensing radius must be positive, got {self.R}")


@dataclass(frozen=True)
class CoverageQuery:
    model: BooleanModelSpec
    r_K: float = 0.0
    quadrature: QuadratureSettings = field(default=DEFAULT_QUADRATURE)

    def __post_init__(self):
        if not self.r_K >= 0:
            raise DomainError(f"event radius must be non-negative, got {self.r_K}")

    @property
    def r(self):
        """Effective radius ``R + r_K``."""
        return self.model.R + self.r_K

    @property
    def process(self):
        return self.model.process


def query(kind, lambda_p, m, R, r_K=0.0, r_d=None, sigma=None, quadrature=DEFAULT_QUADRATURE):
    """Shorthand for building a :class:`CoverageQuery` from plain numbers."""
    spec = ProcessSpec(kind, lambda_p, m, r_d=r_d, sigma=sigma)
    return CoverageQuery(BooleanModelSpec(spec, R), r_K, quadrature)


def bound_slack(q):
    """Absolute slack allowed when comparing two quadrature-based probabilities."""
    return 2.0 * (q.rel_tol + q.abs_tol)


def _void_to_cap(exponent):
    # 1 - exp(-a), accurate for small a
    return float(-math.expm1(-exponent))


def cap_ppp(lambda_total, R, r_K=0.0):
    """Sensing probability of a disk event for the Boolean Poisson model.

    ``1 - exp(-lambda_total * pi * (R + r_K)**2)``; with ``r_K = 0`` this is
    the probability that a given point is covered.
    """
    if not lambda_total >= 0:
        raise DomainError(f"density must be non-negative, got {lambda_total}")
    if not R > 0:
        raise DomainError(f"sensing radius must be positive, got {R}")
    if not r_K >= 0:
        raise DomainError(f"event radius must be non-negative, got {r_K}")
    return _void_to_cap(lambda_total * math.pi * (R + r_K) ** 2)


def _require(q, kind):
    if q.process.kind is not kind:
        raise DomainError(f"expected a {kind.value} model, got {q.process.kind.value}")
    return q.process


def _mcp_radial_integral(q, area):
    """``int_0^{r_d + r} (1 - exp(-lambda_d * area(x))) x dx``."""
    spec = q.process
    r, rd = q.r, spec.r_d
    lam_d = spec.lambda_d
    if lam_d == 0:
        return 0.0

    def integrand(x):
        return -np.expm1(-lam_d * area(x, rd, r)) * x

    small = min(r, rd)
    kinks = [abs(r - rd), r + rd - math.pi * small / 2]
    try:
        return integrate_adaptive(integrand, 0.0, rd + r, q.quadrature, points=kinks)
    except ConvergenceError as exc:
        raise ConvergenceError(
            f"MCP radial integral failed for r={r}, r_d={rd}: {exc}", exc.estimate, exc.error
        ) from exc


def cap_mcp(q):
    """Capacity functional of the Boolean Matérn-cluster model.

    Evaluates
    ``1 - exp(-2 pi lambda_p int_0^{r_d + r} (1 - exp(-lambda_d |B(o, r_d) ∩ B(x, r)|)) x dx)``
    with ``r = R + r_K``.
    """
    spec = _require(q, Kind.MCP)
    integral = _mcp_radial_integral(q, lens_area)
    return _void_to_cap(2 * math.pi * spec.lambda_p * integral)


def cap_mcp_bounds_thm3(q, printed=False):
    """Tight lower/upper bounds on :func:`cap_mcp`.

    The lens area in the radial integral is replaced by the area of the
    inscribed circle (lower bound) or of the covering rectangle (upper
    bound) and the result integrated numerically.

    With ``printed=True`` an alternative set of closed-form expressions is
    evaluated instead. They do not always bound the exact value and are
    kept for diagnosis only; see :func:`thm3_printed_report`.

    Returns
    -------
    (float, float)
        ``(lower, upper)``.
    """
    spec = _require(q, Kind.MCP)
    if printed:
        return _thm3_printed(q)
    lower = _void_to_cap(2 * math.pi * spec.lambda_p * _mcp_radial_integral(q, lens_area_lower_circle))
    upper = _void_to_cap(2 * math.pi * spec.lambda_p * _mcp_radial_integral(q, lens_area_upper_rect))
    return lower, upper


def _thm3_printed(q):
    spec = q.process
    r, rd, lam_p, lam_d = q.r, spec.r_d, spec.lambda_p, spec.lambda_d
    beta = min(r, rd)
    area_term = (r - rd) ** 2 * (1 - math.exp(-lam_d * math.pi * beta**2)) + 4 * r * rd
    e4 = math.exp(-4 * lam_d * beta**2)
    upper_tail = (math.pi * lam_p / (2 * lam_d**2 * beta**2)) * (
        -1 + 2 * lam_d * beta + e4 * ((r + rd) + abs(r - rd) * e4)
    )
    lower_tail = (4 * lam_p / lam_d) * (
        -2
        + 2 * math.exp(-lam_d * math.pi * beta**2)
        - math.pi * math.sqrt(lam_d) * (r + rd) * erf(-math.sqrt(lam_d * math.pi) * beta)
    )
    upper = 1 - math.exp(-math.pi * lam_p * area_term) * _safe_exp(upper_tail)
    lower = 1 - math.exp(-math.pi * lam_p * area_term) * _safe_exp(lower_tail)
    return lower, upper


def _safe_exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def thm3_printed_report(q):
    """Compare the printed closed-form bounds with the integrated ones.

    Returns a dict holding both pairs, the exact value and whether each
    printed bound actually bounds the exact value.
    """
    exact = cap_mcp(q)
    lo, hi = cap_mcp_bounds_thm3(q)
    plo, phi = cap_mcp_bounds_thm3(q, printed=True)
    slack = bound_slack(q.quadrature)
    return {
        "exact": exact,
        "integrated": (lo, hi),
        "printed": (plo, phi),
        "printed_lower_ok": bool(plo <= exact + slack),
        "printed_upper_ok": bool(phi >= exact - slack),
        "abs_diff": (abs(plo - lo), abs(phi - hi)),
    }


def cap_mcp_bounds_thm4(q, _drop_pi=False):
    """Simple closed-form bounds on :func:`cap_mcp`.

    The lens area is bounded above by ``pi * min(r, r_d)**2`` on the whole
    support ``[0, r + r_d]`` and below by the same value on the containment
    range ``[0, |r - r_d|]`` (zero beyond), which integrates to

    ``1 - exp(-pi lambda_p (r_d ± r)**2 (1 - exp(-lambda_d pi min(r, r_d)**2)))``.

    ``_drop_pi`` removes the factor pi from the inner exponent; it exists
    only so that validation can demonstrate the resulting bound violation.
    """
    spec = _require(q, Kind.MCP)
    r, rd = q.r, spec.r_d
    beta = min(r, rd)
    area = beta**2 if _drop_pi else math.pi * beta**2
    hit = -math.expm1(-spec.lambda_d * area)
    lower = _void_to_cap(math.pi * spec.lambda_p * (rd - r) ** 2 * hit)
    upper = _void_to_cap(math.pi * spec.lambda_p * (rd + r) ** 2 * hit)
    return lower, upper


def cap_mcp_limit(q, which):
    """Limits of the MCP capacity functional as the cluster radius varies.

    ``which="rd_to_zero"`` gives ``1 - exp(-pi lambda_p r^2 (1 - e^{-m}))``:
    each cluster collapses to a point that is occupied with probability
    ``1 - e^{-m}``. ``which="rd_to_inf"`` gives the Poisson value
    ``1 - exp(-m pi lambda_p r^2)``. ``r_d`` itself is ignored.
    """
    spec = q.process
    r = q.r
    if which == "rd_to_zero":
        return _void_to_cap(math.pi * spec.lambda_p * r**2 * -math.expm1(-spec.m))
    if which == "rd_to_inf":
        return _void_to_cap(spec.m * math.pi * spec.lambda_p * r**2)
    raise DomainError(f"unknown limit {which!r}")


def cap_tcp(q):
    """Capacity functional of the Boolean Thomas-cluster model.

    ``1 - exp(-2 pi lambda_p int_0^inf (1 - exp(-m G(x))) x dx)`` where
    ``G(x)`` is the Gaussian mass (scatter ``sigma``) of a disk of radius
    ``r`` whose centre is ``x`` away from the cluster head.
    """
    spec = _require(q, Kind.TCP)
    r, sigma, m = q.r, spec.sigma, spec.m
    qs = q.quadrature
    if spec.lambda_p == 0 or m == 0:
        return 0.0

    def integrand(xs):
        mass = np.array([gaussian_disk_mass(x, r, sigma, qs) for x in xs])
        return -np.expm1(-m * mass) * xs

    try:
        integral = integrate_semi_infinite(
            integrand, 0.0, sigma, qs, start=r + TCP_TRUNCATION * sigma, points=[r]
        )
    except ConvergenceError as exc:
        raise ConvergenceError(
            f"TCP outer integral failed for r={r}, sigma={sigma}: {exc}",
            exc.estimate,
            exc.error,
        ) from exc
    return _void_to_cap(2 * math.pi * spec.lambda_p * integral)


def capacity(q):
    """Dispatch to the capacity functional matching the query's process."""
    kind = q.process.kind
    if kind is Kind.PPP:
        return cap_ppp(q.process.lambda_total, q.model.R, q.r_K)
    if kind is Kind.MCP:
        return cap_mcp(q)
    return cap_tcp(q)
