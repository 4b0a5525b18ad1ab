"""Experiment configs and the table-producing commands behind the CLI.

A config is a TOML document::

    command = "analytic"          # used by ``bpcm figure``

    [model]                       # BooleanModelSpec fields
    kind = "MCP"
    lambda_p = 20e-6
    m = 30
    R = 5
    r_d = 10

    [[series]]                    # optional; each entry overrides [model]
    label = "r_d=40"
    r_d = 40

    [event]                       # r_K = <value>, or a sweep
    r_K_min = 0
    r_K_max = 50
    r_K_step = 1

    [mc]
    n_realizations = 200
    n_probes = 10000
    window_width = 1000
    window_height = 1000
    seed = 0
    parallelism = 1
    estimators = ["fac"]          # any of fac, sensing_prob, power

    [power]
    tau = 1
    alpha = 2
    e_net_min = 1e-3              # log-spaced budget sweep for power-sweep
    e_net_max = 1e2
    e_net_points = 41

    [quadrature]
    rel_tol = 1e-8

    [output]
    path = "out.csv"

Lengths are metres and densities are per square metre.
"""

import csv
import io
import math
from dataclasses import dataclass, field, replace
from importlib import resources

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import coverage, power
from .coverage import BooleanModelSpec, CoverageQuery
from .errors import ConvergenceError, DomainError
from .montecarlo import McConfig, estimate_fac, estimate_power, estimate_sensing_prob
from .numerics import QuadratureSettings
from .power import PowerParams
from .processes import Kind, ProcessSpec, Window, sample

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "bundled_config",
    "cmd_analytic",
    "cmd_simulate",
    "cmd_power_sweep",
    "cmd_validate",
    "Check",
    "write_csv",
    "fmt",
]

ANALYTIC_HEADER = ["series", "r_K", "cap", "thm3_lo", "thm3_hi", "thm4_lo", "thm4_hi"]
SIMULATE_HEADER = ["series", "estimator", "value", "std_error", "ci_lo", "ci_hi", "n"]
POWER_HEADER = ["e_net", "r_d", "cov_mcp", "sigma", "cov_tcp", "m_ppp", "cov_ppp"]
ESTIMATORS = ("fac", "sensing_prob", "power")


class ConfigError(ValueError):
    """Malformed or inconsistent experiment config."""


@dataclass
class ExperimentConfig:
    series: list  # of (label, BooleanModelSpec)
    r_K: list = field(default_factory=lambda: [0.0])
    mc: McConfig = field(default_factory=McConfig)
    estimators: tuple = ("fac",)
    power: PowerParams = field(default_factory=PowerParams)
    e_net: list = field(default_factory=list)
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)
    output: str | None = None
    command: str | None = None

    @property
    def model(self):
        return self.series[0][1]


def fmt(x):
    """CSV number format: 9 significant digits, blank for missing."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.9g}"


def write_csv(header, rows, out=None):
    """Write rows as CSV to ``out`` (path, file object, or None for a string)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    text = buf.getvalue()
    if out is None:
        return text
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text


# ---------------------------------------------------------------------------
# parsing

def _num(section, key, raw, default=None, required=False, kind=float):
    if key not in raw:
        if required:
            raise ConfigError(f"[{section}] missing required field '{key}'")
        return default
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"[{section}] field '{key}' must be a number, got {v!r}")
    if kind is int:
        if int(v) != v:
            raise ConfigError(f"[{section}] field '{key}' must be an integer, got {v!r}")
        return int(v)
    return float(v)


_MODEL_KEYS = {"kind", "lambda_p", "m", "R", "r_d", "sigma", "label"}


def _model(raw, where):
    unknown = set(raw) - _MODEL_KEYS
    if unknown:
        raise ConfigError(f"[{where}] unknown field(s): {', '.join(sorted(unknown))}")
    if "kind" not in raw:
        raise ConfigError(f"[{where}] missing required field 'kind'")
    try:
        spec = ProcessSpec(
            raw["kind"],
            _num(where, "lambda_p", raw, required=True),
            _num(where, "m", raw, required=True),
            r_d=_num(where, "r_d", raw),
            sigma=_num(where, "sigma", raw),
        )
        return BooleanModelSpec(spec, _num(where, "R", raw, required=True))
    except DomainError as exc:
        raise ConfigError(f"[{where}] {exc}") from None


def _sweep(section, raw, stem):
    lo = _num(section, f"{stem}_min", raw, required=True)
    hi = _num(section, f"{stem}_max", raw, required=True)
    if lo > hi:
        raise ConfigError(f"[{section}] {stem}_min ({lo}) exceeds {stem}_max ({hi})")
    return lo, hi


def parse_config(doc):
    """Build an :class:`ExperimentConfig` from a parsed TOML mapping."""
    known = {"command", "model", "series", "event", "mc", "power", "quadrature", "output"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    if "model" not in doc:
        raise ConfigError("missing required section [model]")
    base = dict(doc["model"])
    series = []
    for k, entry in enumerate(doc.get("series", [])):
        merged = {**base, **entry}
        label = str(entry.get("label", f"series{k}"))
        series.append((label, _model(merged, f"series[{k}]")))
    if not series:
        series.append((str(base.get("label", base.get("kind", "model"))), _model(base, "model")))

    ev = doc.get("event", {})
    if "r_K_min" in ev or "r_K_max" in ev:
        lo, hi = _sweep("event", ev, "r_K")
        step = _num("event", "r_K_step", ev, default=1.0)
        if not step > 0:
            raise ConfigError(f"[event] r_K_step must be positive, got {step}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        r_K = [lo + i * step for i in range(count)]
    else:
        r_K = [_num("event", "r_K", ev, default=0.0)]
    if any(v < 0 for v in r_K):
        raise ConfigError("[event] r_K must be non-negative")

    mc_raw = doc.get("mc", {})
    try:
        window = Window(
            _num("mc", "window_width", mc_raw, default=1000.0),
            _num("mc", "window_height", mc_raw, default=1000.0),
        )
        mc = McConfig(
            n_realizations=_num("mc", "n_realizations", mc_raw, default=200, kind=int),
            n_probes=_num("mc", "n_probes", mc_raw, default=10_000, kind=int),
            window=window,
            seed=_num("mc", "seed", mc_raw, default=0, kind=int),
            parallelism=_num("mc", "parallelism", mc_raw, default=1, kind=int),
        )
    except DomainError as exc:
        raise ConfigError(f"[mc] {exc}") from None
    estimators = tuple(mc_raw.get("estimators", ["fac"]))
    bad = [e for e in estimators if e not in ESTIMATORS]
    if bad:
        raise ConfigError(f"[mc] unknown estimator(s) {bad}; choose from {list(ESTIMATORS)}")

    pw = doc.get("power", {})
    try:
        params = PowerParams(
            tau=_num("power", "tau", pw, default=1.0), alpha=_num("power", "alpha", pw, default=2.0)
        )
    except DomainError as exc:
        raise ConfigError(f"[power] {exc}") from None
    e_net = []
    if "e_net_min" in pw or "e_net_max" in pw:
        lo, hi = _sweep("power", pw, "e_net")
        if not lo > 0:
            raise ConfigError("[power] e_net_min must be positive")
        n = _num("power", "e_net_points", pw, default=41, kind=int)
        if n < 1:
            raise ConfigError("[power] e_net_points must be positive")
        e_net = list(np.geomspace(lo, hi, n)) if n > 1 else [lo]

    qd = doc.get("quadrature", {})
    try:
        quad = QuadratureSettings(
            rel_tol=_num("quadrature", "rel_tol", qd, default=1e-8),
            abs_tol=_num("quadrature", "abs_tol", qd, default=1e-12),
            max_subdivisions=_num("quadrature", "max_subdivisions", qd, default=2000, kind=int),
            tail_cutoff=_num("quadrature", "tail_cutoff", qd, default=1e-10),
        )
    except DomainError as exc:
        raise ConfigError(f"[quadrature] {exc}") from None

    return ExperimentConfig(
        series=series,
        r_K=r_K,
        mc=mc,
        estimators=estimators,
        power=params,
        e_net=e_net,
        quadrature=quad,
        output=doc.get("output", {}).get("path"),
        command=doc.get("command"),
    )


def load_config(path_or_text, is_text=False):
    """Read and validate a TOML config file (or TOML text with ``is_text``)."""
    try:
        if is_text:
            doc = tomllib.loads(path_or_text)
        else:
            with open(path_or_text, "rb") as fh:
                doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error: {exc}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(doc)


def bundled_config(n):
    """Config shipped for figure ``n`` (1-5)."""
    name = f"figure{int(n)}.toml"
    try:
        text = resources.files("bpcm").joinpath("configs", name).read_text()
    except FileNotFoundError:
        raise ConfigError(f"no bundled config for figure {n}") from None
    return load_config(text, is_text=True)


# ---------------------------------------------------------------------------
# commands

def _query(model, r_K, quad):
    return CoverageQuery(model, r_K, quad)


def cmd_analytic(cfg, errors=None):
    """Capacity functional (plus MCP bounds) for every series and event radius.

    Rows whose quadrature fails get blank numeric fields; the messages are
    appended to ``errors`` when a list is given.
    """
    rows = []
    for label, model in cfg.series:
        for r_K in cfg.r_K:
            q = _query(model, r_K, cfg.quadrature)
            try:
                cap = coverage.capacity(q)
                if model.process.kind is Kind.MCP:
                    b3 = coverage.cap_mcp_bounds_thm3(q)
                    b4 = coverage.cap_mcp_bounds_thm4(q)
                else:
                    b3 = b4 = (None, None)
                rows.append([label, r_K, cap, *b3, *b4])
            except ConvergenceError as exc:
                if errors is not None:
                    errors.append(f"{label} r_K={fmt(r_K)}: {exc}")
                rows.append([label, r_K, None, None, None, None, None])
    return rows


def cmd_simulate(cfg, dump=None):
    """Monte Carlo estimates for every series and requested estimator."""
    rows = []
    for label, model in cfg.series:
        for est in cfg.estimators:
            if est == "fac":
                results = [("fac", estimate_fac(model, cfg.mc))]
            elif est == "sensing_prob":
                results = [
                    (f"sensing_prob(r_K={fmt(r_K)})", estimate_sensing_prob(model, r_K, cfg.mc))
                    for r_K in cfg.r_K
                ]
            else:
                results = [("power", estimate_power(model, cfg.power, cfg.mc))]
            for name, e in results:
                rows.append([label, name, e.value, e.std_error, e.ci95[0], e.ci95[1], e.n_samples])
    if dump is not None:
        model = cfg.model
        real = sample(model.process, cfg.mc.window, model.R + model.process.spread, cfg.mc.seed)
        real.to_csv(dump)
    return rows


def power_sweep_row(e_net, lambda_p, m, R, params, quad=QuadratureSettings()):
    """Equal-budget comparison of the three deployments at point coverage."""
    tau, alpha = params.tau, params.alpha
    r_d = power.solve_r_d(e_net, m, lambda_p, tau, alpha)
    sigma = power.solve_sigma(e_net, m, lambda_p, tau, alpha)
    m_ppp = power.solve_m(e_net, lambda_p, tau, alpha)
    mcp = BooleanModelSpec(ProcessSpec(Kind.MCP, lambda_p, m, r_d=r_d), R)
    tcp = BooleanModelSpec(ProcessSpec(Kind.TCP, lambda_p, m, sigma=sigma), R)
    cov_mcp = coverage.cap_mcp(CoverageQuery(mcp, 0.0, quad))
    cov_tcp = coverage.cap_tcp(CoverageQuery(tcp, 0.0, quad))
    cov_ppp = coverage.cap_ppp(m_ppp * lambda_p, R, 0.0)
    return [e_net, r_d, cov_mcp, sigma, cov_tcp, m_ppp, cov_ppp]


def cmd_power_sweep(cfg, errors=None):
    """Coverage of MCP/TCP/PPP deployments sharing each power budget in the sweep."""
    if not cfg.e_net:
        raise ConfigError("[power] power-sweep needs e_net_min/e_net_max")
    proc = cfg.model.process
    if not (proc.lambda_p > 0 and proc.m > 0):
        raise ConfigError("[model] power-sweep needs positive lambda_p and m")
    rows = []
    for e in cfg.e_net:
        try:
            rows.append(power_sweep_row(e, proc.lambda_p, proc.m, cfg.model.R, cfg.power, cfg.quadrature))
        except (ConvergenceError, DomainError) as exc:
            if errors is not None:
                errors.append(f"e_net={fmt(e)}: {exc}")
            rows.append([e, None, None, None, None, None, None])
    return rows


# ---------------------------------------------------------------------------
# validation

@dataclass
class Check:
    name: str
    passed: bool
    expected: float | None = None
    actual: float | None = None
    tolerance: float | None = None
    detail: str = ""


def nesting_grid(n=5, r=80.0, seed=2024):
    """Randomised (m, r_d, lambda_p) grid for bound-nesting checks at effective radius ``r``.

    ``m`` is drawn from [1, 30], ``r_d / r`` log-uniformly from [0.1, 10] and
    ``lambda_p pi r^2`` from [0.05, 2]; the grid is the product of ``n``
    draws per axis.
    """
    rng = np.random.default_rng(seed)
    ms = np.sort(rng.uniform(1, 30, n))
    ratios = np.sort(np.exp(rng.uniform(math.log(0.1), math.log(10), n)))
    loads = np.sort(rng.uniform(0.05, 2, n))
    return [
        (float(m), float(ratio * r), float(load / (math.pi * r * r)))
        for m in ms
        for ratio in ratios
        for load in loads
    ]


def check_bound_nesting(quad=QuadratureSettings(), grid=None, r=80.0, drop_pi=False):
    """All-pairs ordering thm4.lo <= thm3.lo <= cap <= thm3.hi <= thm4.hi on a grid."""
    slack = coverage.bound_slack(quad)
    worst = 0.0
    failures = []
    for m, r_d, lam in grid if grid is not None else nesting_grid(r=r):
        q = coverage.query("MCP", lam, m, r, r_d=r_d, quadrature=quad)
        cap = coverage.cap_mcp(q)
        lo3, hi3 = coverage.cap_mcp_bounds_thm3(q)
        lo4, hi4 = coverage.cap_mcp_bounds_thm4(q, _drop_pi=drop_pi)
        chain = [lo4, lo3, cap, hi3, hi4]
        gap = max(a - b for a, b in zip(chain[:-1], chain[1:]))
        worst = max(worst, gap)
        if gap > slack:
            failures.append(f"m={m:.3g} r_d={r_d:.3g} lambda_p={lam:.3g}: chain {['%.6g' % c for c in chain]}")
    detail = "; ".join(failures[:3]) + (f" (+{len(failures) - 3} more)" if len(failures) > 3 else "")
    return Check("bound nesting", not failures, 0.0, worst, slack, detail)


def check_radius_fungibility(model, r_K_values, quad):
    worst = 0.0
    for r_K in r_K_values:
        a = coverage.capacity(CoverageQuery(model, r_K, quad))
        b = coverage.capacity(CoverageQuery(replace(model, R=model.R + r_K), 0.0, quad))
        worst = max(worst, abs(a - b))
    return Check(f"radius fungibility [{model.process.kind.value}]", worst <= 1e-12, 0.0, worst, 1e-12)


def check_asymptotics(lambda_p, m, r, quad, tol=1e-3):
    checks = []
    for which, r_d in (("rd_to_zero", r / 1e3), ("rd_to_inf", r * 1e3)):
        q = coverage.query("MCP", lambda_p, m, r, r_d=r_d, quadrature=quad)
        exact = coverage.cap_mcp(q)
        limit = coverage.cap_mcp_limit(q, which)
        checks.append(Check(f"asymptote {which}", abs(exact - limit) < tol, limit, exact, tol))
    return checks


def check_power_roundtrips(n=100, seed=7, tol=1e-10):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        m = rng.uniform(1, 50)
        lam = 10 ** rng.uniform(-6, -3)
        tau = 10 ** rng.uniform(-2, 2)
        alpha = rng.uniform(2, 6)
        spread = rng.uniform(1, 200)
        e = power.power_mcp(m, lam, tau, alpha, spread)
        worst = max(worst, abs(power.solve_r_d(e, m, lam, tau, alpha) / spread - 1))
        e = power.power_tcp(m, lam, tau, alpha, spread)
        worst = max(worst, abs(power.solve_sigma(e, m, lam, tau, alpha) / spread - 1))
        e = power.power_ppp(m, lam, tau, alpha)
        worst = max(worst, abs(power.solve_m(e, lam, tau, alpha) / m - 1))
    return Check("power roundtrips", worst <= tol, 0.0, worst, tol)


# analytic-vs-MC agreement uses a 99.9% normal band so the gate rarely trips by chance
MC_Z = 3.29


def _mc_check(name, expected, est):
    tol = MC_Z * est.std_error
    return Check(name, abs(est.value - expected) <= tol, expected, est.value, tol)


def check_monte_carlo(label, model, cfg):
    checks = []
    quad = cfg.quadrature
    cap = coverage.capacity(CoverageQuery(model, 0.0, quad))
    checks.append(_mc_check(f"fac vs analytic [{label}]", cap, estimate_fac(model, cfg.mc)))
    r_K = cfg.r_K[-1]
    cap_k = coverage.capacity(CoverageQuery(model, r_K, quad))
    sens_cfg = replace(cfg.mc, n_realizations=max(cfg.mc.n_realizations, 2000))
    checks.append(
        _mc_check(
            f"sensing_prob(r_K={fmt(r_K)}) vs analytic [{label}]",
            cap_k,
            estimate_sensing_prob(model, r_K, sens_cfg),
        )
    )
    proc = model.process
    expected = power.power(proc, cfg.power) if proc.lambda_p > 0 else 0.0
    checks.append(_mc_check(f"power vs closed form [{label}]", expected, estimate_power(model, cfg.power, cfg.mc)))
    return checks


def cmd_validate(cfg, corrupt_thm4=False, monte_carlo=True):
    """Run the invariant suite; returns a list of :class:`Check`."""
    quad = cfg.quadrature
    checks = [check_bound_nesting(quad, drop_pi=corrupt_thm4)]
    for label, model in cfg.series:
        checks.append(check_radius_fungibility(model, [0.0, *cfg.r_K[-1:], 7.5], quad))
    proc, R = cfg.model.process, cfg.model.R
    checks.extend(check_asymptotics(proc.lambda_p, proc.m, R, quad))
    checks.append(check_power_roundtrips())
    if monte_carlo:
        for label, model in cfg.series:
            checks.extend(check_monte_carlo(label, model, cfg))
    return checks


def format_checks(checks):
    lines = [f"{'status':<6}  {'check':<48}  {'expected':>12}  {'actual':>12}  {'tolerance':>10}"]
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(
            f"{status:<6}  {c.name:<48}  {fmt(c.expected):>12}  {fmt(c.actual):>12}  {fmt(c.tolerance):>10}"
        )
        if c.detail and not c.passed:
            lines.append(f"        {c.detail}")
    n_fail = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"


DEFAULT_VALIDATE_TOML = """
[model]
kind = "MCP"
lambda_p = 20e-6
m = 3
R = 80
r_d = 60

[event]
r_K = 10

[mc]
n_realizations = 200
n_probes = 2000
seed = 0
"""


def default_validate_config():
    return load_config(DEFAULT_VALIDATE_TOML, is_text=True)
