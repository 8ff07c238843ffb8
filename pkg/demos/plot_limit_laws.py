"""
The two limit laws
==================

Below xi = 2 the normalized maximum is Gumbel; above it the limit is a
one-parameter family indexed by eta = (2 + sqrt(xi)) / (xi + sqrt(xi)).
This script tabulates both, their quantiles, and the way the new law
drifts away from the Gumbel as eta shrinks.
"""

import numpy as np

from minormax import GXi, Gumbel, eta, law_for, norm_constants

# Which law applies is decided by xi alone.
for xi in (0.0, 1.0, 2.0, 4.0, 9.0):
    print(f"xi={xi:<4} -> {law_for(xi).describe()}")

# The normalization is A * (T - B); A and B grow like sqrt(2 log p).
for p in (1e2, 1e4, 1e8):
    nc = norm_constants(4.0, p)
    print(f"p={p:.0e}  A={nc.A:.4f}  B={nc.B:.4f}")

# Side-by-side CDF table.  The new law puts more mass on the right tail.
z = np.linspace(-2, 6, 9)
laws = {"gumbel": Gumbel(), "eta=2/3": GXi(eta(4.0)), "eta=5/12": GXi(eta(9.0))}
print("z      " + "  ".join(f"{k:>9}" for k in laws))
for zi in z:
    print(f"{zi:5.1f}  " + "  ".join(f"{law.cdf(zi):9.5f}" for law in laws.values()))

# Quantiles come from bisection on the CDF (closed form for the Gumbel).
for name, law in laws.items():
    q = [float(law.quantile(u)) for u in (0.05, 0.5, 0.95)]
    print(f"{name:>9}: 5%={q[0]:.3f}  median={q[1]:.3f}  95%={q[2]:.3f}")
