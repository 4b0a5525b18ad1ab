"""
Checking the formulas by simulation
===================================

Seeded Monte Carlo estimates of covered area, event sensing and power,
compared with the analytic values. Runs in well under a minute.
"""

from bpcm import BooleanModelSpec, McConfig, ProcessSpec, Window
from bpcm.coverage import cap_mcp, cap_tcp, query
from bpcm.montecarlo import estimate_fac, estimate_power, estimate_sensing_prob
from bpcm.power import PowerParams, power_mcp
from bpcm.processes import sample

mcp = BooleanModelSpec(ProcessSpec("MCP", 20e-6, 3, r_d=60), 20)
tcp = BooleanModelSpec(ProcessSpec("TCP", 20e-6, 3, sigma=60), 80)

# One realization; heads are the cluster centres.
real = sample(mcp.process, Window(), margin=80, seed=1)
print(len(real), "sensors around", len(real.heads), "heads")

cfg = McConfig(n_realizations=100, n_probes=5000, seed=1)
e = estimate_fac(mcp, cfg)
print("MCP area covered", e.value, e.ci95, "analytic", cap_mcp(query("MCP", 20e-6, 3, 20, r_d=60)))

# Realizations, not probes, are the independent unit, so the interval is
# wider than a naive binomial one.
e = estimate_sensing_prob(tcp, 10, McConfig(n_realizations=5000, seed=1))
print("TCP event r_K=10", e.value, e.ci95, "analytic", cap_tcp(query("TCP", 20e-6, 3, 80, 10, sigma=60)))

e = estimate_power(mcp, PowerParams(1, 2), McConfig(n_realizations=500, seed=1))
print("MCP power", e.value, e.ci95, "closed form", power_mcp(3, 20e-6, 1, 2, 60))
