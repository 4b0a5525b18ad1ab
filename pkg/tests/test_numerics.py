import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from bpcm.errors import ConvergenceError, DomainError
from bpcm.numerics import (
    QuadratureSettings,
    erf,
    gamma,
    gaussian_disk_mass,
    gaussian_disk_mass_density,
    integrate_adaptive,
    integrate_semi_infinite,
    lens_area,
    lens_area_lower_circle,
    lens_area_upper_rect,
    log_i0,
)

# from the segment formula; the hit-count test below re-derives it
LENS_5_5_5 = 30.709242465218917
# polar double integral (scipy dblquad, 1e-10 rel)
GAUSS_MASS_60_80_60 = 0.4297390703917236

lengths = st.floats(0.01, 200.0, allow_nan=False)


class TestLensArea:
    def test_examples(self):
        assert lens_area(0, 5, 5) == pytest.approx(25 * math.pi, rel=1e-15)
        assert lens_area(10, 5, 5) == 0.0
        assert lens_area(5, 5, 5) == pytest.approx(LENS_5_5_5, rel=1e-13)
        assert LENS_5_5_5 == pytest.approx(oracles.lens_segment_formula(5, 5), rel=1e-15)

    def test_hit_count_oracle(self):
        est, se = oracles.lens_hit_count(5, 5, 5, n=10**7, seed=11)
        assert abs(est - lens_area(5, 5, 5)) < 4 * se

    @pytest.mark.parametrize("d,r1,r2", [(1, 3, 5), (3, 3, 5), (7.5, 3, 5), (0.2, 10, 1), (9.9, 5, 5)])
    def test_against_chord_integral(self, d, r1, r2):
        assert lens_area(d, r1, r2) == pytest.approx(oracles.lens_by_chords(d, r1, r2), rel=1e-9, abs=1e-12)

    def test_containment_and_disjoint(self):
        assert lens_area(1.9, 2, 4) == pytest.approx(4 * math.pi)
        assert lens_area(6, 2, 4) == 0.0
        assert lens_area(2.0, 2, 4) == pytest.approx(4 * math.pi)

    def test_vectorised(self):
        d = np.linspace(0, 12, 50)
        out = lens_area(d, 5, 6)
        assert out.shape == d.shape
        assert np.allclose(out, [lens_area(v, 5, 6) for v in d])

    def test_near_containment_boundary_is_continuous(self):
        eps = 1e-12
        inside = lens_area(2 - eps, 3, 5)
        outside = lens_area(2 + eps, 3, 5)
        assert abs(inside - outside) < 1e-8

    def test_negative_inputs_raise(self):
        with pytest.raises(DomainError):
            lens_area(-1, 1, 1)
        with pytest.raises(DomainError):
            lens_area(1, 0, 1)
        with pytest.raises(DomainError):
            lens_area_lower_circle(1, -1, 1)
        with pytest.raises(DomainError):
            lens_area_upper_rect(1, 1, -2)

    @given(lengths, lengths, lengths)
    def test_symmetric(self, d, r1, r2):
        assert lens_area(d, r1, r2) == lens_area(d, r2, r1)

    @given(st.floats(0, 400.0), lengths, lengths)
    def test_sandwich(self, d, r1, r2):
        exact = lens_area(d, r1, r2)
        tol = 1e-12 * math.pi * min(r1, r2) ** 2
        assert lens_area_lower_circle(d, r1, r2) <= exact + tol
        assert exact <= lens_area_upper_rect(d, r1, r2) + tol

    def test_subnormal_offset(self):
        assert lens_area(5e-324, 0.25, 0.25) == pytest.approx(math.pi / 16, rel=1e-15)
        assert lens_area(1e-300, 2.0, 2.0) == pytest.approx(4 * math.pi, rel=1e-15)

    @given(lengths, lengths)
    def test_strictly_decreasing_in_partial_regime(self, r1, r2):
        lo, hi = abs(r1 - r2), r1 + r2
        d = np.linspace(lo, hi, 40)[1:-1]
        vals = lens_area(d, r1, r2)
        assert np.all(np.diff(vals) < 0)


class TestBoundingAreas:
    def test_lower_circle_examples(self):
        assert lens_area_lower_circle(0, 5, 5) == pytest.approx(25 * math.pi)
        assert lens_area_lower_circle(5, 5, 5) == pytest.approx(math.pi * 2.5**2)
        assert lens_area_lower_circle(5, 5, 5) <= LENS_5_5_5
        assert lens_area_lower_circle(10, 5, 5) == 0.0

    def test_upper_rect_examples(self):
        assert lens_area_upper_rect(10, 5, 5) == 0.0
        assert lens_area_upper_rect(5, 5, 5) == pytest.approx(50.0)
        assert lens_area_upper_rect(5, 5, 5) >= LENS_5_5_5
        assert lens_area_upper_rect(0, 3, 5) == pytest.approx(9 * math.pi)


class TestSpecialFunctions:
    @pytest.mark.parametrize("x", [-3.0, -0.5, 0.0, 1e-3, 0.7, 2.5, 6.0])
    def test_erf(self, x):
        assert abs(erf(x) - float(mpmath.erf(x))) < 1e-12

    @pytest.mark.parametrize("x", [0.5, 1.0, 1.5, 2.0, 3.0, 4.5, 11.0])
    def test_gamma(self, x):
        ref = float(mpmath.gamma(x))
        assert abs(gamma(x) - ref) < 1e-12 * max(1.0, ref)

    @pytest.mark.parametrize("z", [0.0, 1e-4, 0.3, 5.0, 80.0, 700.0, 5e4])
    def test_log_i0(self, z):
        assert abs(log_i0(z) - float(mpmath.log(mpmath.besseli(0, z)))) < 1e-12 * max(1.0, z)


class TestGaussianDiskMass:
    def test_central_case_is_rayleigh_cdf(self):
        assert gaussian_disk_mass(0, 60, 60) == pytest.approx(-math.expm1(-0.5), abs=1e-12)

    def test_total_mass(self):
        assert abs(gaussian_disk_mass(0, 20 * 60, 60) - 1.0) < 1e-12

    def test_offset_case_against_double_integral(self):
        assert gaussian_disk_mass(60, 80, 60) == pytest.approx(GAUSS_MASS_60_80_60, abs=1e-8)
        assert GAUSS_MASS_60_80_60 == pytest.approx(oracles.gauss_disk_mass_raw(60, 80, 60), abs=1e-10)

    @pytest.mark.parametrize("x,r,s", [(0, 5, 20), (100, 5, 20), (30, 40, 5), (1e3, 10, 1e4), (500, 499, 3)])
    def test_marcum_cross_check(self, x, r, s):
        assert gaussian_disk_mass(x, r, s) == pytest.approx(oracles.gauss_disk_mass_marcum(x, r, s), abs=1e-10)

    def test_zero_radius(self):
        assert gaussian_disk_mass(3.0, 0.0, 2.0) == 0.0

    def test_bad_sigma(self):
        with pytest.raises(DomainError):
            gaussian_disk_mass(1, 1, 0)

    @pytest.mark.parametrize("x,r", [(0, 30), (40, 50), (60, 80), (150, 60)])
    def test_radial_derivative(self, x, r):
        s, h = 60.0, 1e-3
        fd = (gaussian_disk_mass(x, r + h, s) - gaussian_disk_mass(x, r - h, s)) / (2 * h)
        closed = (r / s**2) * math.exp(-(x * x + r * r) / (2 * s * s)) * float(mpmath.besseli(0, x * r / s**2))
        assert fd == pytest.approx(closed, rel=1e-5)
        assert gaussian_disk_mass_density(r, x, s) == pytest.approx(closed, rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0, 300), st.floats(0, 300), st.floats(1, 100), st.floats(0.1, 10))
    def test_scale_invariance_and_range(self, x, r, s, c):
        g = gaussian_disk_mass(x, r, s)
        assert 0.0 <= g <= 1.0
        assert gaussian_disk_mass(c * x, c * r, c * s) == pytest.approx(g, abs=1e-9)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0, 200), st.floats(0.5, 200), st.floats(1, 80))
    def test_monotone(self, x, r, s):
        g = gaussian_disk_mass(x, r, s)
        assert gaussian_disk_mass(x + 1.0, r, s) <= g + 1e-10
        assert gaussian_disk_mass(x, r + 1.0, s) >= g - 1e-10


class TestIntegrateAdaptive:
    def test_examples(self):
        assert integrate_adaptive(lambda x: x, 0, 1) == pytest.approx(0.5, abs=1e-15)
        ref = float(mpmath.sqrt(mpmath.pi) / 2 * mpmath.erf(6))
        assert integrate_adaptive(lambda x: np.exp(-x * x), 0, 6) == pytest.approx(ref, rel=1e-8)
        assert integrate_adaptive(lambda x: 0.0, 0, 1) == 0.0

    @pytest.mark.parametrize("deg", range(0, 30))
    def test_exact_for_polynomials(self, deg):
        # Kronrod 15-point rule integrates degree <= 29 exactly on one panel
        val = integrate_adaptive(lambda x: x**deg, -1.0, 2.0)
        exact = (2.0 ** (deg + 1) - (-1.0) ** (deg + 1)) / (deg + 1)
        assert val == pytest.approx(exact, rel=1e-13)

    def test_tolerance_contract(self):
        q = QuadratureSettings(rel_tol=1e-10, abs_tol=0.0)
        val = integrate_adaptive(lambda x: np.sqrt(x) * np.log(x + 1e-300), 0, 1, q)
        assert val == pytest.approx(-4.0 / 9.0, rel=1e-9)

    def test_break_points(self):
        f = lambda x: np.abs(x - 0.3)
        assert integrate_adaptive(f, 0, 1, points=[0.3]) == pytest.approx(0.045 + 0.245, rel=1e-14)

    def test_empty_interval(self):
        assert integrate_adaptive(np.sin, 2.0, 2.0) == 0.0

    def test_reversed_limits(self):
        with pytest.raises(DomainError):
            integrate_adaptive(np.sin, 1, 0)

    def test_budget_exhausted(self):
        q = QuadratureSettings(max_subdivisions=3)
        with pytest.raises(ConvergenceError) as info:
            integrate_adaptive(lambda x: np.sin(1.0 / (x + 1e-3)), 0, 1, q)
        assert math.isfinite(info.value.estimate)
        assert info.value.error > 0

    def test_nonfinite_integrand(self):
        with pytest.raises(DomainError):
            integrate_adaptive(lambda x: np.where(x > 0.9, np.inf, 1.0), 0, 1)


class TestIntegrateSemiInfinite:
    def test_rayleigh(self):
        assert integrate_semi_infinite(lambda x: x * np.exp(-x * x / 2), 0, 1) == pytest.approx(1.0, rel=1e-8)

    def test_zero(self):
        assert integrate_semi_infinite(lambda x: 0.0 * x, 0, 1) == 0.0

    def test_tcp_integrand_against_wide_interval(self):
        lam_p, m, s, r = 20e-6, 30, 20.0, 5.0
        q = QuadratureSettings()
        f = lambda xs: np.array([-math.expm1(-m * gaussian_disk_mass(x, r, s)) * x for x in xs])
        val = integrate_semi_infinite(f, 0.0, s, q, start=r + 6 * s)
        ref = integrate_adaptive(f, 0.0, r + 12 * s, q.tightened(10))
        assert val == pytest.approx(ref, rel=1e-6)

    def test_non_decaying_tail_fails(self):
        with pytest.raises(ConvergenceError):
            integrate_semi_infinite(lambda x: 1.0 + 0 * x, 0, 1)

    def test_bad_scale(self):
        with pytest.raises(DomainError):
            integrate_semi_infinite(lambda x: x, 0, 0)


class TestQuadratureSettings:
    def test_defaults(self):
        q = QuadratureSettings()
        assert (q.rel_tol, q.abs_tol, q.max_subdivisions, q.tail_cutoff) == (1e-8, 1e-12, 2000, 1e-10)

    @pytest.mark.parametrize(
        "kw",
        [dict(rel_tol=0), dict(abs_tol=-1), dict(max_subdivisions=0), dict(tail_cutoff=1.0), dict(tail_cutoff=0)],
    )
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            QuadratureSettings(**kw)
