"""
Bound states of the noncommutative Coulomb problem
==================================================

Restricted to one angular momentum sector ``j``, the Schroedinger equation
becomes a three-term recurrence over the Fock level.  It is a symmetric
generalized eigenproblem ``A R = kappa^2 B R`` with a tridiagonal ``A`` and a
diagonal weight ``B``.  Its bound states are compared here with the closed-form
levels ``E_n = -kappa_n^2 / 2`` (atomic units, lengths in Bohr radii).
"""

import numpy as np

from nchydrogen.analytic import analytic_radial_sequence, bound_energy, commutative_energy
from nchydrogen.radial_engine import build_pencil, sequence_inner, sequence_norm, solve_bound_states

lam = 0.1

# Solve the j = 0 sector on 800 Fock levels.
states = solve_bound_states(build_pencil(0, lam, 2, 800))
print(f"{'n':>2} {'E numeric':>22} {'E closed form':>22} {'rel err':>9} {'E(lam=0)':>10}")
for n, s in enumerate(states[:5], start=1):
    E_num = -0.5 * s.kappa2
    E_an = bound_energy(n, lam).energy
    print(f"{n:2d} {E_num:22.16f} {E_an:22.16f} {abs(E_num - E_an) / abs(E_an):9.1e} {float(commutative_energy(n)):10.6f}")

# Highly excited states spread over more levels.  Doubling the truncation
# shows the error of n = 4 falling until it reaches rounding level.
print("\ntruncation study for n = 4:")
E4 = bound_energy(4, lam).energy
for n_max in (400, 800, 1600, 3200):
    s = solve_bound_states(build_pencil(0, lam, 2, n_max))
    err = abs(-0.5 * s[3].kappa2 - E4) / abs(E4) if len(s) > 3 else float("nan")
    print(f"  n_max={n_max:5d}  rel err {err:.2e}")

# The levels stay degenerate in j: every sector j < n carries the same E_n.
print("\nE_3 in each sector:")
for j in range(3):
    s = solve_bound_states(build_pencil(j, lam, 2, 800))
    print(f"  j={j}: {-0.5 * s[2 - j].kappa2:.15f}")

# The eigenvector agrees with the closed-form radial sequence up to sign.
seq = analytic_radial_sequence(2, 0, lam, 800)
vals = np.asarray(seq.values, float) / np.sqrt(sequence_norm(seq))
num = states[1].sequence
overlap = sequence_inner(num, type(seq)(0, lam, vals))
print(f"\noverlap of numeric and closed-form n=2 states: {abs(overlap):.15f}")
