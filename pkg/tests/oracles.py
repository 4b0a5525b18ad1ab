"""Reference computations that share no code with the package."""

import math
import warnings

import numpy as np
from scipy import integrate, stats


def quad(f, a, b, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(f, a, b, limit=500, **kw)[0]


def lens_by_chords(d, r1, r2):
    """Two-disk intersection area as an integral of overlapping vertical chords."""

    def overlap(y):
        if abs(y) >= min(r1, r2):
            return 0.0
        a = math.sqrt(r1 * r1 - y * y)
        b = math.sqrt(r2 * r2 - y * y)
        return max(0.0, min(a, d + b) - max(-a, d - b))

    h = min(r1, r2)
    return quad(overlap, -h, h, epsabs=1e-13, epsrel=1e-13)


def lens_segment_formula(d, r):
    """Equal-radius lens: 2 r^2 acos(d / 2r) - (d / 2) sqrt(4 r^2 - d^2)."""
    return 2 * r * r * math.acos(d / (2 * r)) - 0.5 * d * math.sqrt(4 * r * r - d * d)


def lens_hit_count(d, r1, r2, n, seed):
    """Monte Carlo lens area: fraction of uniform points in B(o, r1) that fall in B((d,0), r2)."""
    rng = np.random.default_rng(seed)
    rad = r1 * np.sqrt(rng.random(n))
    ang = 2 * np.pi * rng.random(n)
    x, y = rad * np.cos(ang), rad * np.sin(ang)
    frac = np.mean((x - d) ** 2 + y**2 <= r2 * r2)
    area = math.pi * r1 * r1
    return frac * area, area * math.sqrt(frac * (1 - frac) / n)


def gauss_disk_mass_raw(x, r, s):
    """Polar double integral of the 2-D Gaussian density over B((x,0), r)."""

    def f(t, th):
        return math.exp(-(x * x + t * t + 2 * x * t * math.cos(th)) / (2 * s * s)) * t / (2 * math.pi * s * s)

    return integrate.dblquad(f, 0, 2 * math.pi, 0, r, epsabs=1e-12, epsrel=1e-10)[0]


def gauss_disk_mass_marcum(x, r, s):
    """Same mass through the noncentral chi-square CDF (1 - Marcum Q_1)."""
    return float(stats.ncx2.cdf(r * r / (s * s), 2, x * x / (s * s)))


def mcp_cap(lam_p, m, r_d, r, area=lens_by_chords):
    lam_d = m / (math.pi * r_d * r_d)

    def f(x):
        return -math.expm1(-lam_d * area(x, r_d, r)) * x

    integral = quad(f, 0, r_d + r, points=[abs(r - r_d)], epsabs=1e-14, epsrel=1e-12)
    return -math.expm1(-2 * math.pi * lam_p * integral)


def tcp_cap(lam_p, m, sigma, r):
    def f(x):
        return -math.expm1(-m * gauss_disk_mass_marcum(x, r, sigma)) * x

    integral = quad(f, 0, r + 20 * sigma, points=[r], epsabs=1e-14, epsrel=1e-12)
    return -math.expm1(-2 * math.pi * lam_p * integral)
