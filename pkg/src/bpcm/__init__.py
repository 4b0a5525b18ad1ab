"""Coverage and power analysis of Boolean Poisson, Matérn-cluster and Thomas-cluster sensor networks."""

from .coverage import (
    BooleanModelSpec,
    CoverageQuery,
    cap_mcp,
    cap_mcp_bounds_thm3,
    cap_mcp_bounds_thm4,
    cap_mcp_limit,
    cap_ppp,
    cap_tcp,
    capacity,
    query,
)
from .errors import ConvergenceError, DomainError, ResourceError
from .montecarlo import Estimate, McConfig, estimate_fac, estimate_power, estimate_sensing_prob
from .numerics import (
    QuadratureSettings,
    gaussian_disk_mass,
    integrate_adaptive,
    integrate_semi_infinite,
    lens_area,
    lens_area_lower_circle,
    lens_area_upper_rect,
)
from .power import (
    PowerParams,
    power_mcp,
    power_ppp,
    power_tcp,
    solve_m,
    solve_r_d,
    solve_sigma,
)
from .processes import Kind, ProcessSpec, Realization, Window, sample

__version__ = "0.1.0"
