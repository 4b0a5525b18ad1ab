"""
Coverage of Poisson and clustered deployments
=============================================

Point coverage for the three deployment models at the same mean sensor
density, and the reduction of a disk event to an effective radius.
"""

import numpy as np

from bpcm import cap_mcp, cap_ppp, cap_tcp
from bpcm.coverage import query

# 20 cluster heads per km^2 with 3 sensors each on average
lambda_p, m = 20e-6, 3

# The Poisson value only needs the total density m * lambda_p.
for R in (80, 20):
    ppp = cap_ppp(m * lambda_p, R)
    mcp = cap_mcp(query("MCP", lambda_p, m, R, r_d=60))
    tcp = cap_tcp(query("TCP", lambda_p, m, R, sigma=60))
    print(f"R={R:>2}  PPP {ppp:.4f}   MCP(r_d=60) {mcp:.4f}   TCP(sigma=60) {tcp:.4f}")

# Clustering wastes sensors on overlapping disks, so at equal density the
# clustered models cover less than the Poisson one.

# A disk event of radius r_K is sensed exactly when a sensor lies within
# R + r_K of its centre. Only the sum matters:
a = cap_mcp(query("MCP", lambda_p, m, 20, 30, r_d=60))
b = cap_mcp(query("MCP", lambda_p, m, 50, 0, r_d=60))
print("R=20, r_K=30:", a)
print("R=50, r_K=0: ", b)

# Sensing probability grows with the event size.
r_K = np.arange(0, 101, 20)
print(np.array([cap_tcp(query("TCP", lambda_p, m, 20, rk, sigma=60)) for rk in r_K]).round(4))
