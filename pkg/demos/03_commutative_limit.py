"""
Approaching ordinary quantum mechanics
======================================

As the length scale ``lam`` shrinks, the noncommutative levels approach
``-1/(2 n^2)``.  The ground-state shift vanishes quadratically in ``lam``.
The radial solutions are built from confluent hypergeometric polynomials, and
the Kummer transformation used to relate the two exponent branches is checked
along the way.
"""

import math

import numpy as np

from nchydrogen.analytic import energy_shift, kummer_F, nc_parameters, polynomial_coeffs
from nchydrogen.cli import loglog_slope

lams = np.geomspace(1e-4, 1e-2, 9)
shifts = [energy_shift(1, lam) for lam in lams]
for lam, s in zip(lams, shifts):
    print(f"lam={lam:.2e}  E_1 + 1/2 = {s:.6e}  ratio to lam^2 = {s / lam**2:.6f}")
print("log-log slope:", round(loglog_slope(lams, shifts), 5))

# The deformation parameters b and d tend to 1 as lam kappa -> 0, and their
# difference is lam kappa / 2.
for lam in (1.0, 0.1, 0.01):
    p = nc_parameters(lam, 1.0)
    print(f"lam={lam:5.2f}  b={p.b:.8f}  d={p.d:.8f}  d-b={p.d - p.b:.12f}")

# Bound states terminate the hypergeometric series: for a = j + 1 - n the
# function is a polynomial whose coefficients are ratios of factorials.
print("\nF(j+1-n, 2j+2; x) coefficients of (-x)^k/k!:")
for n, j in [(1, 0), (3, 0), (3, 1), (4, 2)]:
    print(f"  n={n} j={j}:", [str(c) for c in polynomial_coeffs(n, j)])

# The Kummer transformation F(a, c; x) = e^x F(c - a, c; -x).
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(200):
    a, c, x = rng.uniform(-5, 5), rng.uniform(0.5, 6), rng.uniform(-8, 8)
    lhs, rhs = kummer_F(a, c, x), math.exp(x) * kummer_F(c - a, c, -x)
    worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0))
print(f"\nlargest relative Kummer defect over 200 random triples: {worst:.1e}")
