"""
Electrostatics, self-energy and the size of fuzzy balls
=======================================================

On the Fock lattice the Poisson equation is a recurrence in the level ``N``.
Its solutions are exactly ``-q / r + const`` with a point source at the lowest
level.  The field energy of a point charge is finite, and equating it with the
electron rest energy fixes the length scale ``lam0``.
"""

from fractions import Fraction

from nchydrogen.coulomb_field import (
    ball_volume,
    poisson_residual,
    poisson_solve,
    self_energy_lambda0,
    self_energy_partial_sum,
)

# Solve the recurrence exactly in rationals and compare with -q/(lam (N+1)).
pot = poisson_solve(q=Fraction(1), q0=Fraction(0), n_max=8, lam=Fraction(1, 2))
print("V(N):", [str(v) for v in pot.values])
print("closed form matches:", pot.values == pot.closed_form())
print("interior residuals:", [str(r) for r in poisson_residual(pot.values)])

# The self-energy sum telescopes to 3/4.
for K in (1, 10, 100, 1000):
    S = self_energy_partial_sum(K)
    print(f"K={K:5d}  S_K={float(S):.10f}  3/4 - S_K={float(Fraction(3, 4) - S):.3e}")

rep = self_energy_lambda0()
print(f"\nlam0 / r0 = {rep.ratio_to_r0}")
print(f"lam0 = {rep.lambda0:.4e} m, a0 = {rep.bohr_radius:.5e} m, lam0/a0 = {rep.lambda0_over_a0:.3e}")
print(f"relative shift of the n=1 level at lam0: {rep.relative_level_shift_n1:.3e}")

# A ball of radius lam (N+1) contains the levels 0..N.  Its volume,
# 4 pi lam^3 sum (n+1)^2, approaches (4 pi / 3) r^3 with a 1/N correction.
print("\nrelative volume deviation:")
for N in (0, 10, 100, 1000, 10_000):
    v = ball_volume(N)
    print(f"  N={N:6d}  {v.relative_deviation:.4e}  times (N+1): {v.relative_deviation * (N + 1):.4f}")
