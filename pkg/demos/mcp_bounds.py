"""
Bounds and limits for the Matérn cluster model
==============================================

The exact capacity functional needs a radial integral over a lens area.
Replacing the lens with simpler shapes gives two pairs of bounds, and the
cluster radius has closed-form limits at both ends.
"""

from bpcm.coverage import (
    cap_mcp,
    cap_mcp_bounds_thm3,
    cap_mcp_bounds_thm4,
    cap_mcp_limit,
    query,
    thm3_printed_report,
)

lambda_p, m, R = 20e-6, 3, 80

# Inscribed circle / covering rectangle (integrated numerically) and the
# cruder closed-form pair nest around the exact value.
print(f"{'r_d':>6} {'thm4 lo':>8} {'inner lo':>8} {'exact':>8} {'inner hi':>8} {'thm4 hi':>8}")
for r_d in (8, 30, 60, 120, 400):
    q = query("MCP", lambda_p, m, R, r_d=r_d)
    lo3, hi3 = cap_mcp_bounds_thm3(q)
    lo4, hi4 = cap_mcp_bounds_thm4(q)
    print(f"{r_d:>6} {lo4:8.4f} {lo3:8.4f} {cap_mcp(q):8.4f} {hi3:8.4f} {hi4:8.4f}")

# Tiny clusters act like single heads that are occupied with probability
# 1 - exp(-m); huge clusters spread their sensors like a Poisson process.
q = query("MCP", lambda_p, m, R, r_d=60)
print("r_d -> 0 limit:  ", cap_mcp_limit(q, "rd_to_zero"), cap_mcp(query("MCP", lambda_p, m, R, r_d=0.08)))
print("r_d -> inf limit:", cap_mcp_limit(q, "rd_to_inf"), cap_mcp(query("MCP", lambda_p, m, R, r_d=8e4)))

# The closed forms sometimes quoted for the inner pair do not always bound
# the exact value; the report shows where.
rep = thm3_printed_report(query("MCP", lambda_p, 30, 5, r_d=60))
print("printed pair", rep["printed"], "exact", rep["exact"])
print("lower ok:", rep["printed_lower_ok"], " upper ok:", rep["printed_upper_ok"])
