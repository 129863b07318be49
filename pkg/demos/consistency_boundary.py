"""
Where the coincidence rule starts to work
=========================================

With N = n = ceil(m**alpha) the scaling variable is about m**(2 alpha - 1).
Above alpha = 1/2 the error falls as the alphabet grows, below it the rule
is no better than a coin.
"""

from sparse_classify import consistency_boundary_sweep

for alpha in (0.3, 0.5, 0.7):
    rows = consistency_boundary_sweep([10**3, 10**4, 10**5], alpha, 0.8, 20_000, seed=5)
    print(f"alpha={alpha}: " + "  ".join(f"m={r.m} r={r.r:.2f} p={r.p_hat:.3f}" for r in rows))
