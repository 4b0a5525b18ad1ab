"""
Coverage under a power budget
=============================

Sensors pay tau * distance^alpha to reach their cluster head. Fixing the
per-area budget pins the cluster spread (MCP, TCP) or the number of sensors
per head (PPP), and the best deployment depends on how large the budget is.
"""

import numpy as np

from bpcm.experiments import power_sweep_row
from bpcm.power import PowerParams, power_mcp, power_ppp, power_tcp

lambda_p, m, R = 20e-6, 30, 5
params = PowerParams(tau=1.0, alpha=2.0)

print("power at r_d = sigma = 60:", power_mcp(m, lambda_p, 1, 2, 60), power_tcp(m, lambda_p, 1, 2, 60))
print("PPP power at m = 30:     ", power_ppp(m, lambda_p, 1, 2))

print(f"{'e_net':>9} {'r_d':>9} {'MCP':>7} {'sigma':>9} {'TCP':>7} {'m_ppp':>9} {'PPP':>7}")
for e in np.geomspace(1e-3, 1e3, 13):
    e_net, r_d, cm, s, ct, mp, cp = power_sweep_row(e, lambda_p, m, R, params)
    print(f"{e_net:9.3g} {r_d:9.3g} {cm:7.4f} {s:9.3g} {ct:7.4f} {mp:9.3g} {cp:7.4f}")

# Small budgets keep Poisson sensors scarce (each must be close to a random
# head), so clustered layouts cover more; large budgets reverse this.
