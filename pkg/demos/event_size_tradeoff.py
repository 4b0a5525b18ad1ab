"""
Event size and the m x R trade-off
==================================

With a fixed product m * R, a few long-range sensors win for small events
while many short-range sensors win for large ones.
"""

import numpy as np

from bpcm.coverage import cap_mcp, cap_ppp, cap_tcp, query

lambda_p = 50e-6
r_K = np.arange(0, 101, 10.0)

for m, R in ((10, 15), (30, 5)):
    ppp = [cap_ppp(m * lambda_p, R, rk) for rk in r_K]
    mcp = [cap_mcp(query("MCP", lambda_p, m, R, rk, r_d=100)) for rk in r_K]
    tcp = [cap_tcp(query("TCP", lambda_p, m, R, rk, sigma=40)) for rk in r_K]
    print(f"m={m}, R={R}")
    print("  PPP", np.round(ppp, 3))
    print("  MCP", np.round(mcp, 3))
    print("  TCP", np.round(tcp, 3))

# Where do the Poisson curves cross? Solve on a fine grid.
fine = np.linspace(0, 100, 10001)
diff = np.array([cap_ppp(10 * lambda_p, 15, x) - cap_ppp(30 * lambda_p, 5, x) for x in fine])
print("PPP crossover at r_K ~", fine[np.argmax(diff < 0)])

# Spreading sensors out helps: larger cluster spread moves both cluster
# models toward the Poisson value.
for s in (5, 10, 20, 40, 200):
    print(s, cap_mcp(query("MCP", 20e-6, 30, 5, r_d=s)), cap_tcp(query("TCP", 20e-6, 30, 5, sigma=s)))
