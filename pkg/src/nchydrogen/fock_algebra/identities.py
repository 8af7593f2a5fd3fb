"""Machine checks of the coordinate algebra and the normal-ordering identities.

Every suite returns a list of :class:`Check` records.  In the exact frame a
check passes only when its residual operator is identically zero; in the
float frame the residual is compared with ``rtol`` times a natural scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..radial_engine import NormalOrderedPoly, build_pencil, poly_eval
from .operators import (
    FockBasis,
    OperatorMatrix,
    PAULI,
    commutator,
    coordinate_ops,
    diagonal_operator,
    identity,
)
from .superoperators import (
    _ladders,
    build_psi_jm,
    coulomb_potential,
    double_commutator,
    laplacian_apply,
    normal_ordered_eval,
    normal_ordered_power,
    weighted_trace,
)

__all__ = [
    "Check",
    "check_coordinate_algebra",
    "appendix_a_identity_suite",
    "binomial_identity_check",
    "hermiticity_suite",
    "poisson_operator_check",
    "radial_reduction_checks",
    "random_interior_operator",
]

EPS = {(1, 2): 3, (2, 3): 1, (3, 1): 2, (2, 1): -3, (3, 2): -1, (1, 3): -2}


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    passed: bool
    exact: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        mode = "exact" if self.exact else "float"
        return f"{status}  {self.name:<48s} residual={self.residual:.3e} ({mode})"


def _check(name, residual_op: OperatorMatrix, scale: float, rtol: float, max_level=None) -> Check:
    res = residual_op.max_abs(max_level)
    if residual_op.exact:
        return Check(name, res, residual_op.is_zero(max_level), True)
    return Check(name, res, res <= rtol * max(scale, 1e-300), False)


def check_coordinate_algebra(basis: FockBasis, lam, exact: bool = False, rtol: float = 1e-12, sigma=PAULI):
    """``[x_i, x_j] = 2 i lam eps_ijk x_k``, ``[x_i, rho] = 0`` and ``r^2 - x^2 = lam^2``."""
    if exact:
        lam = Fraction(lam)
    x1, x2, x3, N, r = coordinate_ops(basis, lam, exact, sigma)
    xs = {1: x1, 2: x2, 3: x3}
    scale = float(lam) * max(x.max_abs() for x in xs.values())
    out = []
    for (i, j), k in EPS.items():
        sign = 1 if k > 0 else -1
        res = commutator(xs[i], xs[j]) - xs[abs(k)] * (2j * sign) * lam
        out.append(_check(f"[x{i},x{j}] - 2i lam eps x{abs(k)}", res, scale, rtol))
    rho = N * lam
    for i, x in xs.items():
        out.append(_check(f"[x{i},rho]", commutator(x, rho), scale, rtol))
    res = r @ r - (x1 @ x1 + x2 @ x2 + x3 @ x3) - identity(basis, exact) * (lam * lam)
    out.append(_check("r^2 - x^2 - lam^2", res, float(lam) ** 2, rtol))
    return out


def appendix_a_identity_suite(basis: FockBasis, lam=1, exact: bool = True, rtol: float = 1e-12, k_max=None):
    """Normal-ordering identities on ``:N^k:`` and the radial reductions.

    * ``:N^k:`` is diagonal with entries ``N!/(N-k)!``;
    * ``[a_al^+, :N^k:] = -k a_al^+ :N^(k-1):`` and
      ``[a_al, :N^k:] = k :N^(k-1): a_al``;
    * ``N :N^k: = :N^(k+1): + k :N^k:``;
    * the double commutator and the ``r`` product of a spin-j wavefunction
      equal the wavefunctions built from the pencil rows.

    ``k`` runs to ``k_max`` (default ``n_max``).
    """
    n_max = basis.n_max
    k_max = n_max if k_max is None else k_max
    (a1, a2), (c1, c2) = _ladders(basis, exact)
    out = []
    powers = [normal_ordered_power(basis, k, exact) for k in range(k_max + 2)]
    res_nk = 0.0
    ok_nk = True
    for k in range(k_max + 1):
        expected = diagonal_operator(basis, [normal_ordered_eval(k, N) for N in range(n_max + 1)], exact)
        diff = powers[k] - expected
        ok_nk &= diff.is_zero() if exact else diff.max_abs() <= rtol * max(expected.max_abs(), 1)
        res_nk = max(res_nk, diff.max_abs() / max(expected.max_abs(), 1))
    out.append(Check(":N^k: eigenvalues N!/(N-k)!", res_nk, ok_nk, exact))

    N_op = diagonal_operator(basis, range(n_max + 1), exact)
    for name, fn in (
        ("[a+, :N^k:] = -k a+ :N^(k-1):", lambda c, a, k: commutator(c, powers[k]) + (c @ powers[k - 1]) * k),
        ("[a, :N^k:] = k :N^(k-1): a", lambda c, a, k: commutator(a, powers[k]) - (powers[k - 1] @ a) * k),
    ):
        worst, ok = 0.0, True
        for k in range(k_max + 1):
            for c, a in ((c1, a1), (c2, a2)):
                if k == 0:
                    res = commutator(c if name.startswith("[a+") else a, powers[0])
                else:
                    res = fn(c, a, k)
                # the truncated creator makes the top level untrustworthy
                level = res.trusted_level
                scale = max(powers[k].max_abs(), 1)
                worst = max(worst, res.max_abs(level) / scale)
                ok &= res.is_zero(level) if exact else res.max_abs(level) <= rtol * scale
        out.append(Check(name, worst, ok, exact))

    worst, ok = 0.0, True
    for k in range(k_max + 1):
        res = N_op @ powers[k] - powers[k + 1] - powers[k] * k
        scale = max(powers[k + 1].max_abs(), 1)
        worst = max(worst, res.max_abs() / scale)
        ok &= res.is_zero() if exact else res.max_abs() <= rtol * scale
    out.append(Check("N :N^k: = :N^(k+1): + k :N^k:", worst, ok, exact))

    out.extend(radial_reduction_checks(basis, lam, exact, rtol))
    return out


def radial_reduction_checks(basis: FockBasis, lam, exact: bool = True, rtol: float = 1e-12, cases=None):
    """Fock-space superoperators against the pencil rows on interior levels.

    For each ``(j, m, R)``: ``-(1/lam) [a^+, [a, psi[R]]] + alpha psi[R] = psi[A R]``
    and ``r psi[R] = psi[B R]`` on Fock levels ``<= n_max - 1``.
    """
    n_max = basis.n_max
    if exact:
        lam = Fraction(lam)
    alpha = 2
    if cases is None:
        cases = [(1, 1, NormalOrderedPoly((0, 0, 1), lam)), (0, 0, NormalOrderedPoly((1, -1, Fraction(1, 3)), lam))]
    out = []
    for j, m, poly in cases:
        poly = NormalOrderedPoly(poly.coeffs, lam)
        pencil = build_pencil(j, lam, alpha, n_max, exact=exact)
        psi = build_psi_jm(basis, j, m, poly, lam, exact)
        vals = poly_eval(poly, j, n_max).values
        top = n_max - 1
        kin = double_commutator(psi) * (-1 / lam) + psi * alpha
        A_vals = pencil.apply(vals)
        res_a = kin - build_psi_jm(basis, j, m, list(A_vals) + [0], lam, exact)
        r_psi = diagonal_operator(basis, [lam * (N + 1) for N in range(n_max + 1)], exact) @ psi
        res_b = r_psi - build_psi_jm(basis, j, m, pencil.apply_weight(vals), lam, exact)
        scale = max(kin.max_abs(top), 1)
        out.append(_check(f"(j={j},m={m}) [a+,[a,psi]] vs pencil A", res_a, scale, rtol, top))
        out.append(_check(f"(j={j},m={m}) r psi vs pencil B", res_b, max(r_psi.max_abs(), 1), rtol))
    return out


def binomial_identity_check(n_max: int, j_max: int = 10) -> Check:
    """``sum_n C(n+j, j) C(N-n, j) = C(N+j+1, 2j+1)`` in integers."""
    bad = 0
    for j in range(j_max + 1):
        for N in range(n_max + 1):
            lhs = sum(math.comb(n + j, j) * math.comb(N - n, j) for n in range(N + 1))
            bad += lhs != math.comb(N + j + 1, 2 * j + 1)
    return Check("binomial level-trace identity", float(bad), bad == 0, True)


def poisson_operator_check(basis: FockBasis, q, lam, q0=0, exact: bool = True, rtol: float = 1e-12) -> Check:
    """``[a^+, [a, V(N)]] = 0`` on levels ``1..n_max - 1`` for ``V = -q/r + q0``.

    Level 0 carries the point source: the double commutator there equals
    ``-q/lam``, which is checked as part of the same record.
    """
    if exact:
        q, lam = Fraction(q), Fraction(lam)
    V = coulomb_potential(basis, q, lam, q0, exact)
    res = double_commutator(V)
    source = diagonal_operator(basis, [-q / lam] + [0] * basis.n_max, exact)
    return _check("NC Poisson [a+,[a,V(N)]] (source at N=0)", res - source, max(V.max_abs(), 1), rtol, res.trusted_level)


def random_interior_operator(basis: FockBasis, rng, exact: bool = False, margin: int = 1, density: float = 1.0):
    """Random level-diagonal operator supported on levels ``<= n_max - margin``."""
    entries = {}
    top = basis.n_max - margin
    for N in range(top + 1):
        sl = basis.level_slice(N)
        for r in range(sl.start, sl.stop):
            for c in range(sl.start, sl.stop):
                if rng.random() > density:
                    continue
                if exact:
                    entries[(r, c)] = complex(int(rng.integers(-5, 6)), int(rng.integers(-5, 6)))
                else:
                    entries[(r, c)] = complex(rng.normal(), rng.normal())
    return OperatorMatrix._from_entries(basis, entries, exact, 0, basis.n_max)


def hermiticity_suite(basis: FockBasis, lam, rng=None, exact: bool = False, rtol: float = 1e-12, trials: int = 3):
    """Weighted-trace symmetry of the Laplacian and of ``V(N)`` multiplication."""
    rng = np.random.default_rng(0) if rng is None else rng
    if exact:
        lam = Fraction(lam)
    V = coulomb_potential(basis, 1, lam, 0, exact)
    worst_l = worst_v = 0.0
    ok_l = ok_v = True
    for _ in range(trials):
        density = 0.3 if exact else 1.0
        phi = random_interior_operator(basis, rng, exact, density=density)
        psi = random_interior_operator(basis, rng, exact, density=density)
        for label, op in (("L", lambda x: laplacian_apply(x, lam)), ("V", lambda x: V @ x)):
            lhs = weighted_trace(phi, op(psi))
            rhs = weighted_trace(op(phi), psi)
            diff = abs(complex(lhs - rhs))
            scale = max(abs(complex(lhs)), abs(complex(rhs)), 1e-300)
            ok = (lhs == rhs) if exact else diff <= rtol * scale
            if label == "L":
                worst_l, ok_l = max(worst_l, diff / scale), ok_l and ok
            else:
                worst_v, ok_v = max(worst_v, diff / scale), ok_v and ok
    return [
        Check("Laplacian weighted-trace symmetry", worst_l, ok_l, exact),
        Check("V(N) weighted-trace symmetry", worst_v, ok_v, exact),
    ]
