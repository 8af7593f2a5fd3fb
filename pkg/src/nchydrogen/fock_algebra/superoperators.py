"""Superoperators on operator wavefunctions and the weighted trace."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..radial_engine import NormalOrderedPoly, RadialSequence, poly_eval
from .operators import (
    FockBasis,
    OperatorMatrix,
    commutator,
    coordinate_ops,
    diagonal_operator,
    identity,
    ladder_matrix,
)

__all__ = [
    "normal_ordered_eval",
    "normal_ordered_power",
    "rotation_generator",
    "rotation_apply",
    "casimir_apply",
    "jm_terms",
    "build_psi_jm",
    "extract_radial",
    "double_commutator",
    "laplacian_apply",
    "radius_multiply",
    "coulomb_potential",
    "coulomb_apply",
    "weighted_trace",
    "weighted_inner",
]


def normal_ordered_eval(k: int, N: int) -> int:
    """Eigenvalue of ``:N^k:`` on level ``N``: ``N!/(N-k)!``, zero for ``k > N``."""
    if k < 0 or N < 0:
        raise ValueError("k and N must be non-negative")
    return math.perm(N, k)


@lru_cache(maxsize=None)
def _ladders(basis: FockBasis, exact: bool):
    a = tuple(ladder_matrix(basis, m, "annihilate", exact) for m in (1, 2))
    ad = tuple(ladder_matrix(basis, m, "create", exact) for m in (1, 2))
    return a, ad


def _power(op: OperatorMatrix, k: int, basis: FockBasis, exact: bool) -> OperatorMatrix:
    out = identity(basis, exact)
    for _ in range(k):
        out = op @ out
    return out


@lru_cache(maxsize=None)
def _mode_power(basis: FockBasis, exact: bool, mode: int, p: int) -> OperatorMatrix:
    """``(a_mode^+)^p a_mode^p`` from ladder products, built incrementally."""
    (a1, a2), (c1, c2) = _ladders(basis, exact)
    a, c = (a1, c1) if mode == 1 else (a2, c2)
    if p == 0:
        return identity(basis, exact)
    if p == 1:
        return c @ a
    # c^p a^p = c (c^(p-1) a^(p-1)) a
    return c @ _mode_power(basis, exact, mode, p - 1) @ a


def normal_ordered_power(basis: FockBasis, k: int, exact: bool = False) -> OperatorMatrix:
    """``:N^k:`` built from ladder products, ``sum_p C(k,p) a1^+^p a2^+^(k-p) a1^p a2^(k-p)``.

    Operators of different modes commute, so each term is evaluated as
    ``(a1^+^p a1^p)(a2^+^(k-p) a2^(k-p))``.  Built independently of
    :func:`normal_ordered_eval` so the two can check each other.
    """
    total = None
    for p in range(k + 1):
        term = (_mode_power(basis, exact, 1, p) @ _mode_power(basis, exact, 2, k - p)) * math.comb(k, p)
        total = term if total is None else total + term
    return total


def rotation_generator(basis: FockBasis, axis: int, exact: bool = False) -> OperatorMatrix:
    """``a^+ sigma_axis a``, i.e. the coordinate ``x_axis`` at unit length."""
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {axis}")
    return coordinate_ops(basis, 1, exact)[axis - 1]


def rotation_apply(axis: int, psi: OperatorMatrix) -> OperatorMatrix:
    """``L_axis psi = (1/2) [a^+ sigma_axis a, psi]``.

    The factor is 1/2 (not i/2) so that ``L_3 psi_jm = m psi_jm`` and
    ``[L_i, L_j] = i eps_ijk L_k``.
    """
    T = rotation_generator(psi.basis, axis, psi.exact)
    return commutator(T, psi) * Fraction(1, 2)


def casimir_apply(psi: OperatorMatrix) -> OperatorMatrix:
    """``sum_i L_i L_i psi``."""
    total = None
    for axis in (1, 2, 3):
        term = rotation_apply(axis, rotation_apply(axis, psi))
        total = term if total is None else total + term
    return total


def jm_terms(j: int, m: int):
    """Multi-indices ``(m1, m2, n1, n2)`` of the spin-(j, m) sum.

    ``m1 + m2 = n1 + n2 = j`` and ``m1 - m2 - n1 + n2 = 2m``.
    """
    if j < 0:
        raise ValueError(f"j must be non-negative, got {j}")
    if abs(m) > j:
        raise ValueError(f"m={m} outside [-{j}, {j}]")
    out = []
    for m1 in range(j + 1):
        for n1 in range(j + 1):
            m2, n2 = j - m1, j - n1
            if m1 - m2 - n1 + n2 == 2 * m:
                out.append((m1, m2, n1, n2))
    return out


def _radial_values(radial, j: int, n_max: int, lam, exact: bool):
    """Values of the central radial factor on radial levels ``0..n_max - j``."""
    count = n_max - j + 1
    if isinstance(radial, NormalOrderedPoly):
        if radial.degree > n_max - j:
            raise ValueError(
                f"radial polynomial of degree {radial.degree} exceeds n_max - j = {n_max - j}"
            )
        vals = list(poly_eval(radial, j, n_max).values)
    elif isinstance(radial, RadialSequence):
        vals = list(radial.values)
    else:
        vals = list(radial)
    if len(vals) < count:
        raise ValueError(f"need {count} radial values, got {len(vals)}")
    vals = vals[:count]
    if exact:
        vals = [Fraction(v) for v in vals]
    return vals


def build_psi_jm(basis: FockBasis, j: int, m: int, radial, lam, exact: bool = False) -> OperatorMatrix:
    """Operator wavefunction of spin ``(j, m)`` with central factor ``:R(rho):``.

    ``radial`` is a :class:`NormalOrderedPoly`, a :class:`RadialSequence` or
    a plain sequence of values on radial levels ``0..n_max - j`` (the level
    of the central factor, one below the creators by ``j``).
    """
    terms = jm_terms(j, m)
    if exact:
        lam = Fraction(lam)
    vals = _radial_values(radial, j, basis.n_max, lam, exact)
    (a1, a2), (c1, c2) = _ladders(basis, exact)
    R = diagonal_operator(basis, vals, exact)
    total = None
    for m1, m2, n1, n2 in terms:
        left = _power(c1, m1, basis, exact) @ _power(c2, m2, basis, exact)
        right = _power(a1, n1, basis, exact) @ _power(a2, n2, basis, exact)
        coef = Fraction((-1) ** n2, math.factorial(m1) * math.factorial(m2) * math.factorial(n1) * math.factorial(n2))
        term = (left @ R @ right) * coef
        total = term if total is None else total + term
    return total * (lam**j)


def extract_radial(psi: OperatorMatrix, j: int, m: int, lam) -> list:
    """Read the central radial values back out of a spin-(j, m) operator.

    For ``m >= 0`` only the term with ``(n1, n2) = (0, j)`` acts on
    ``|0, i + j>``, for ``m <= 0`` only ``(n1, n2) = (j, 0)`` acts on
    ``|i + j, 0>``; each matrix element isolates one radial value.
    """
    jm_terms(j, m)
    basis = psi.basis
    if psi.exact:
        lam = Fraction(lam)
    out = []
    for i in range(basis.n_max - j + 1):
        L = i + j
        if m >= 0:
            col, row = (0, L), (m, L - m)
            m1, m2, n1, n2 = m, j - m, 0, j
        else:
            col, row = (L, 0), (L + m, -m)
            m1, m2, n1, n2 = j + m, -m, j, 0
        # a1^n1 (-a2)^n2 on the monomial column vector, then the creators' 1/(m1! m2!)
        ann = (-1) ** n2 * math.perm(col[0], n1) * math.perm(col[1], n2)
        pref = Fraction(ann, math.factorial(m1) * math.factorial(m2) * math.factorial(n1) * math.factorial(n2))
        val = psi.entry(row, col)
        if psi.exact:
            out.append(val / (pref * lam**j))
        else:
            frame = math.sqrt(
                math.factorial(row[0]) * math.factorial(row[1]) / (math.factorial(col[0]) * math.factorial(col[1]))
            )
            out.append((val / (float(pref) * frame * lam**j)).real)
    return out


def double_commutator(psi: OperatorMatrix) -> OperatorMatrix:
    """``sum_alpha [a_alpha^+, [a_alpha, psi]]``."""
    (a1, a2), (c1, c2) = _ladders(psi.basis, psi.exact)
    return commutator(c1, commutator(a1, psi)) + commutator(c2, commutator(a2, psi))


def laplacian_apply(psi: OperatorMatrix, lam) -> OperatorMatrix:
    """``-(1 / (lam^2 (N + 1))) [a^+, [a, psi]]``.

    The result is trustworthy on levels ``<= n_max - 1`` (it is marked
    lossy); operators supported strictly inside the truncation are mapped
    exactly.
    """
    basis = psi.basis
    if psi.exact:
        lam = Fraction(lam)
    inv_r = diagonal_operator(basis, [1 / (lam * lam * (N + 1)) for N in range(basis.n_max + 1)], psi.exact)
    return -(inv_r @ double_commutator(psi))


def radius_multiply(psi: OperatorMatrix, lam) -> OperatorMatrix:
    """Left multiplication by ``r = lam (N + 1)``."""
    if psi.exact:
        lam = Fraction(lam)
    r = diagonal_operator(psi.basis, [lam * (N + 1) for N in range(psi.basis.n_max + 1)], psi.exact)
    return r @ psi


def coulomb_potential(basis: FockBasis, q, lam, q0=0, exact: bool = False) -> OperatorMatrix:
    """``V(N) = -q / (lam (N + 1)) + q0`` as a diagonal operator."""
    if exact:
        q, lam, q0 = Fraction(q), Fraction(lam), Fraction(q0)
    return diagonal_operator(basis, [-q / (lam * (N + 1)) + q0 for N in range(basis.n_max + 1)], exact)


def coulomb_apply(psi: OperatorMatrix, q, lam) -> OperatorMatrix:
    """Left multiplication by the Coulomb potential ``-q / r`` (``q0 = 0``)."""
    return coulomb_potential(psi.basis, q, lam, 0, psi.exact) @ psi


def weighted_trace(phi: OperatorMatrix, psi: OperatorMatrix):
    """``Tr[(N + 1) phi^+ psi]``, exact in the exact frame."""
    basis = psi.basis
    W = diagonal_operator(basis, [N + 1 for N in range(basis.n_max + 1)], psi.exact)
    if psi.exact:
        return (W @ phi.adjoint() @ psi).trace()
    # column-weighted elementwise sum, no matrix product needed
    w = (basis.levels + 1).astype(float)
    prod = phi.data.conj().multiply(psi.data).tocoo()
    return complex(np.sum(prod.data * w[prod.col]))


def weighted_inner(phi: OperatorMatrix, psi: OperatorMatrix, lam) -> complex:
    """``<phi, psi> = 4 pi lam^3 Tr[(N + 1) phi^+ psi]``."""
    if phi.shift != 0 or psi.shift != 0:
        raise ValueError("weighted inner product is defined on level-diagonal operators")
    return 4 * math.pi * float(lam) ** 3 * complex(weighted_trace(phi, psi))
