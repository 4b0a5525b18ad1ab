"""Per-unit-area power needed for sensors to reach their cluster heads.

The power requirement of a deployment is ``E[sum_{z in window} tau * |z - c_z|^alpha]``
per unit area, where ``c_z`` is the head of sensor ``z``. The ``solve_*``
functions invert the closed forms for a fixed budget ``e_net``.
"""

import math
from dataclasses import dataclass

from .errors import DomainError
from .processes import Kind

__all__ = [
    "PowerParams",
    "power_mcp",
    "power_tcp",
    "power_ppp",
    "solve_r_d",
    "solve_sigma",
    "solve_m",
    "power",
]


@dataclass(frozen=True)
class PowerParams:
    """Path-loss model: SNR threshold ``tau``, exponent ``alpha``, optional budget."""

    tau: float = 1.0
    alpha: float = 2.0
    e_net: float | None = None

    def __post_init__(self):
        if not self.tau >= 0:
            raise DomainError(f"tau must be non-negative, got {self.tau}")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if self.e_net is not None and not self.e_net > 0:
            raise DomainError(f"e_net must be positive, got {self.e_net}")


def _nonneg(**kw):
    for name, v in kw.items():
        if not v >= 0:
            raise DomainError(f"{name} must be non-negative, got {v}")


def _pos(**kw):
    for name, v in kw.items():
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v}")


def power_mcp(m, lambda_p, tau, alpha, r_d):
    """``m lambda_p tau r_d^alpha / (alpha/2 + 1)``: mean of ``|y|^alpha`` for y uniform on a disk."""
    _nonneg(m=m, lambda_p=lambda_p, tau=tau, r_d=r_d)
    _pos(alpha=alpha)
    return m * lambda_p * tau * r_d**alpha / (alpha / 2 + 1)


def power_tcp(m, lambda_p, tau, alpha, sigma):
    """``m lambda_p tau Gamma(alpha/2 + 1) (2 sigma^2)^(alpha/2)``."""
    _nonneg(m=m, lambda_p=lambda_p, tau=tau, sigma=sigma)
    _pos(alpha=alpha)
    return m * lambda_p * tau * math.gamma(alpha / 2 + 1) * (2 * sigma**2) ** (alpha / 2)


def power_ppp(m, lambda_p, tau, alpha):
    """Power for Poisson sensors that join their nearest head.

    The head distance is Rayleigh with density
    ``2 pi lambda_p c exp(-pi lambda_p c^2)``, giving
    ``m lambda_p (pi lambda_p)^(-alpha/2) tau Gamma(alpha/2 + 1)``.
    """
    _nonneg(m=m, tau=tau)
    _pos(lambda_p=lambda_p, alpha=alpha)
    return m * lambda_p * (math.pi * lambda_p) ** (-alpha / 2) * tau * math.gamma(alpha / 2 + 1)


def solve_r_d(e_net, m, lambda_p, tau, alpha):
    """Cluster radius at which :func:`power_mcp` equals ``e_net``."""
    _nonneg(e_net=e_net)
    _pos(m=m, lambda_p=lambda_p, tau=tau, alpha=alpha)
    return (e_net * (1 + alpha / 2) / (m * lambda_p * tau)) ** (1 / alpha)


def solve_sigma(e_net, m, lambda_p, tau, alpha):
    """Scatter at which :func:`power_tcp` equals ``e_net``."""
    _nonneg(e_net=e_net)
    _pos(m=m, lambda_p=lambda_p, tau=tau, alpha=alpha)
    denom = m * lambda_p * tau * math.gamma(1 + alpha / 2) * 2 ** (alpha / 2)
    return (e_net / denom) ** (1 / alpha)


def solve_m(e_net, lambda_p, tau, alpha):
    """Sensors per head at which :func:`power_ppp` equals ``e_net``."""
    _nonneg(e_net=e_net)
    _pos(lambda_p=lambda_p, tau=tau, alpha=alpha)
    return e_net / (math.gamma(alpha / 2 + 1) * tau * lambda_p * (math.pi * lambda_p) ** (-alpha / 2))


def power(spec, params):
    """Closed-form power requirement of a :class:`~bpcm.processes.ProcessSpec`."""
    if spec.kind is Kind.MCP:
        return power_mcp(spec.m, spec.lambda_p, params.tau, params.alpha, spec.r_d)
    if spec.kind is Kind.TCP:
        return power_tcp(spec.m, spec.lambda_p, params.tau, params.alpha, spec.sigma)
    return power_ppp(spec.m, spec.lambda_p, params.tau, params.alpha)
