import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bpcm.coverage import BooleanModelSpec, cap_mcp, cap_ppp, query
from bpcm.errors import DomainError
from bpcm.montecarlo import (
    PARALLELISM_ENV,
    Estimate,
    McConfig,
    SpatialHashGrid,
    covered,
    estimate_fac,
    estimate_power,
    estimate_sensing_prob,
)
from bpcm.power import PowerParams, power_mcp, power_ppp, power_tcp
from bpcm.processes import ProcessSpec, Window

SMALL = Window(400, 400)


def model(kind, R, lam=20e-6, m=3, spread=60):
    return BooleanModelSpec(ProcessSpec(kind, lam, m, r_d=spread, sigma=spread), R)


class TestEstimate:
    def test_from_samples(self):
        e = Estimate.from_samples([0.0, 1.0, 1.0, 0.0])
        assert e.value == 0.5
        assert e.std_error == pytest.approx(math.sqrt(1 / 3) / 2)
        assert e.ci95 == pytest.approx((0.5 - 1.96 * e.std_error, 0.5 + 1.96 * e.std_error))
        assert e.n_samples == 4
        assert e.contains(0.5) and not e.contains(2.0)

    def test_single_sample(self):
        e = Estimate.from_samples([0.3])
        assert e.std_error == math.inf and e.contains(1e9)

    def test_empty(self):
        with pytest.raises(DomainError):
            Estimate.from_samples([])

    @given(arrays(float, st.integers(2, 50), elements=st.floats(-1e3, 1e3)))
    def test_invariants(self, xs):
        e = Estimate.from_samples(xs)
        assert e.std_error >= 0
        assert e.ci95[0] == pytest.approx(e.value - 1.96 * e.std_error)
        assert e.ci95[1] == pytest.approx(e.value + 1.96 * e.std_error)


class TestMcConfig:
    @pytest.mark.parametrize("kw", [{"n_realizations": 0}, {"n_probes": 1.5}, {"parallelism": 0}, {"seed": -1}])
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            McConfig(**kw)

    def test_defaults(self):
        c = McConfig()
        assert (c.n_realizations, c.n_probes, c.window.area) == (200, 10_000, 1e6)


coords = st.floats(-50, 50, allow_nan=False)
point_sets = arrays(float, st.tuples(st.integers(0, 60), st.just(2)), elements=coords)


@settings(max_examples=80, deadline=None)
@given(germs=point_sets, probes=arrays(float, st.tuples(st.integers(1, 40), st.just(2)), elements=coords),
       radius=st.floats(0.1, 20))
def test_hash_grid_matches_brute_force(germs, probes, radius):
    brute = (((probes[:, None] - germs[None]) ** 2).sum(-1) <= radius**2).any(axis=1) if len(germs) else np.zeros(len(probes), bool)
    grid = SpatialHashGrid(germs, radius)
    assert np.array_equal(grid.any_within(probes, radius), brute)


def test_covered_grid_path():
    rng = np.random.default_rng(0)
    germs = rng.random((3000, 2)) * 1000
    probes = rng.random((5000, 2)) * 1000
    d2 = ((probes[:, None] - germs[None]) ** 2).sum(-1)
    assert np.array_equal(covered(germs, probes, 15.0), (d2 <= 225).any(axis=1))


def test_grid_rejects_large_radius():
    with pytest.raises(DomainError):
        SpatialHashGrid(np.zeros((1, 2)), 1.0).any_within(np.zeros((1, 2)), 2.0)


class TestFac:
    def test_ppp(self):
        e = estimate_fac(model("PPP", 80), McConfig(100, 10_000, seed=1))
        assert e.contains(cap_ppp(60e-6, 80))

    def test_mcp_r20(self):
        e = estimate_fac(model("MCP", 20), McConfig(100, 10_000, seed=1))
        assert e.contains(cap_mcp(query("MCP", 20e-6, 3, 20, r_d=60)))

    def test_tiny_radius(self):
        e = estimate_fac(model("MCP", 1e-6), McConfig(20, 1000, seed=1))
        assert e.value == 0.0 and e.contains(0.0)

    def test_empty_process(self):
        e = estimate_fac(model("TCP", 50, lam=0.0), McConfig(5, 100, seed=1))
        assert e.value == 0.0


class TestSensingProb:
    @pytest.mark.parametrize("R,r_K,lam", [(10, 0, 1e-3), (20, 15, 1e-4), (5, 30, 5e-5)])
    def test_ppp(self, R, r_K, lam):
        e = estimate_sensing_prob(model("PPP", R, lam=lam, m=2), r_K, McConfig(4000, 1, SMALL, seed=1))
        assert e.contains(cap_ppp(2 * lam, R, r_K))

    @pytest.mark.parametrize("r_K", [0, 10, 20])
    def test_mcp_event_sweep(self, r_K):
        mdl = model("MCP", 5, m=30, spread=20)
        e = estimate_sensing_prob(mdl, r_K, McConfig(100_000, 1, SMALL, seed=1))
        assert e.contains(cap_mcp(query("MCP", 20e-6, 30, 5, r_K, r_d=20)))

    def test_zero_density(self):
        e = estimate_sensing_prob(model("MCP", 20, lam=0.0), 30, McConfig(50, 1, SMALL, seed=1))
        assert e.value == 0.0

    def test_window_too_small(self):
        with pytest.raises(DomainError):
            estimate_sensing_prob(model("TCP", 80), 0, McConfig(10, 1, Window(800, 800)))
        with pytest.raises(DomainError):
            estimate_sensing_prob(model("PPP", 80), -1, McConfig(10, 1))

    def test_radius_fungibility(self):
        cfg = McConfig(5000, 1, SMALL, seed=1)
        a = estimate_sensing_prob(model("MCP", 20, m=10, spread=30), 25, cfg)
        b = estimate_sensing_prob(model("MCP", 45, m=10, spread=30), 0, cfg.__class__(5000, 1, SMALL, seed=2))
        joint = 1.96 * math.hypot(a.std_error, b.std_error)
        assert abs(a.value - b.value) <= joint

    def test_same_stream_same_answer(self):
        cfg = McConfig(500, 1, SMALL, seed=4)
        a = estimate_sensing_prob(model("MCP", 20, spread=30), 25, cfg)
        b = estimate_sensing_prob(model("MCP", 45, spread=30), 0, cfg)
        assert a == b


class TestPower:
    @pytest.mark.parametrize(
        "kind,ref",
        [
            ("MCP", power_mcp(3, 20e-6, 1, 2, 60)),
            ("TCP", power_tcp(3, 20e-6, 1, 2, 60)),
            ("PPP", power_ppp(3, 20e-6, 1, 2)),
        ],
    )
    def test_closed_forms(self, kind, ref):
        e = estimate_power(model(kind, 10), PowerParams(1, 2), McConfig(300, 1, seed=1))
        assert e.contains(ref)

    def test_zero_tau(self):
        e = estimate_power(model("MCP", 10), PowerParams(0.0, 2), McConfig(10, 1, seed=1))
        assert e.value == 0.0 and e.std_error == 0.0


class TestDeterminism:
    def test_parallel_matches_serial(self):
        mdl = model("MCP", 20)
        one = estimate_fac(mdl, McConfig(12, 2000, seed=9, parallelism=1))
        two = estimate_fac(mdl, McConfig(12, 2000, seed=9, parallelism=2))
        assert one == two

    def test_env_cap(self, monkeypatch):
        monkeypatch.setenv(PARALLELISM_ENV, "1")
        mdl = model("TCP", 20)
        assert estimate_power(mdl, PowerParams(), McConfig(8, 1, seed=3, parallelism=4)) == estimate_power(
            mdl, PowerParams(), McConfig(8, 1, seed=3)
        )

    def test_seed_changes_result(self):
        mdl = model("PPP", 80)
        a = estimate_fac(mdl, McConfig(3, 500, seed=1))
        b = estimate_fac(mdl, McConfig(3, 500, seed=2))
        assert a != b


def test_ci_calibration():
    # 200 independent harness runs against the closed form
    lam, R = 1e-4, 40
    truth = cap_ppp(lam, R)
    mdl = model("PPP", R, lam=lam, m=1)
    hits = sum(
        estimate_sensing_prob(mdl, 0, McConfig(200, 1, Window(200, 200), seed=1000 + k)).contains(truth)
        for k in range(200)
    )
    assert 0.90 <= hits / 200 <= 0.99
