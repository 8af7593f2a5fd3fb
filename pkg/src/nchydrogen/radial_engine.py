"""Radial reduction of the noncommutative Coulomb problem.

Radial functions enter operator wavefunctions as normal-ordered
polynomials ``:R(rho): = sum_k c_k :rho^k:``.  On the radial level ``i``
(the level of the central factor; the wavefunction itself lives on Fock
level ``i + j``) the factor acts as the number

    R(i) = sum_k c_k lam^k i! / (i - k)!.

Two exact representations of the radial Schroedinger operator are
provided: a coefficient map on ``NormalOrderedPoly`` and a tridiagonal
pencil ``A R = kappa^2 B R`` on value sequences, built from

    :R':(i)       = (R(i+1) - R(i)) / lam
    :rho R'':(i)  = (i / lam) (R(i+1) - 2 R(i) + R(i-1))
    :rho R:(i) + lam :rho R':(i) = lam i R(i).

These identities are exact on every ``:rho^k:`` so the pencil introduces no
discretisation error; the only approximation is the Dirichlet cut
``R(i_max + 1) = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "NormalOrderedPoly",
    "RadialSequence",
    "radial_measure",
    "measure_prefactor",
    "BandedPencil",
    "BoundStateSolution",
    "poly_eval",
    "poly_derivative",
    "poly_multiply_by_rho",
    "poly_radius_multiply",
    "poly_kinetic",
    "radial_operator_coeffs",
    "build_pencil",
    "solve_bound_states",
    "sequence_norm",
    "sequence_inner",
]


def _trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs) if coeffs else (0,)


def _add(p, q):
    n = max(len(p), len(q))
    return tuple((p[k] if k < len(p) else 0) + (q[k] if k < len(q) else 0) for k in range(n))


@dataclass(frozen=True)
class NormalOrderedPoly:
    """Coefficients ``c_k`` of ``:sum_k c_k rho^k:`` at length scale ``lam``."""

    coeffs: tuple
    lam: object = 1

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def _like(self, coeffs):
        return NormalOrderedPoly(coeffs, self.lam)

    def __add__(self, other):
        return self._like(_add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, scalar):
        return self._like(tuple(c * scalar for c in self.coeffs))

    __rmul__ = __mul__

    def value(self, i: int):
        """``sum_k c_k lam^k i!/(i-k)!``."""
        return sum((c * self.lam**k * math.perm(i, k) for k, c in enumerate(self.coeffs) if k <= i), 0)

    def max_abs(self) -> float:
        return max(abs(float(c)) for c in self.coeffs)


@dataclass(frozen=True)
class RadialSequence:
    """Values of a radial function on radial levels ``i = 0 .. len - 1``.

    Radial level ``i`` sits on Fock level ``i + j``; a sequence built for a
    Fock truncation ``n_max`` therefore has ``n_max - j + 1`` entries.
    """

    j: int
    lam: object
    values: np.ndarray = field(repr=False)

    @property
    def fock_levels(self) -> np.ndarray:
        return np.arange(self.j, self.j + len(self.values))

    @property
    def n_max(self) -> int:
        return self.j + len(self.values) - 1

    def __len__(self):
        return len(self.values)


def radial_measure(j: int, count: int, exact: bool = False) -> np.ndarray:
    """Integer weights ``(i + j + 1) C(i + 2j + 1, 2j + 1)`` for ``i < count``.

    The ``(i + j + 1)`` factor is the radius weight ``r / lam`` of Fock level
    ``i + j``; the binomial is the level trace of the angular ladders.
    """
    vals = [(i + j + 1) * math.comb(i + 2 * j + 1, 2 * j + 1) for i in range(count)]
    if exact:
        return np.array(vals, dtype=object)
    return np.array(vals, dtype=float)


def measure_prefactor(j: int, lam) -> float:
    return 4 * math.pi * float(lam) ** (3 + 2 * j) / math.factorial(j) ** 2


def poly_eval(poly: NormalOrderedPoly, j: int, n_max: int) -> RadialSequence:
    """Values of ``poly`` on radial levels ``0 .. n_max - j``."""
    count = n_max - j + 1
    if count <= 0:
        raise ValueError(f"n_max={n_max} leaves no radial levels for j={j}")
    exact = all(isinstance(c, (int, Fraction)) for c in poly.coeffs) and isinstance(poly.lam, (int, Fraction))
    vals = [poly.value(i) for i in range(count)]
    return RadialSequence(j, poly.lam, np.array(vals, dtype=object if exact else float))


def poly_derivative(poly: NormalOrderedPoly) -> NormalOrderedPoly:
    """``R -> R'``: coefficients ``k c_k`` moved down one degree."""
    return poly._like(tuple(k * c for k, c in enumerate(poly.coeffs))[1:] or (0,))


def poly_multiply_by_rho(poly: NormalOrderedPoly) -> NormalOrderedPoly:
    """Left product ``rho :R: = :rho R + lam rho R':``."""
    shifted = (0,) + poly.coeffs
    return poly._like(_add(shifted, tuple(poly.lam * k * c for k, c in enumerate(poly.coeffs))))


def poly_radius_multiply(poly: NormalOrderedPoly, j: int) -> NormalOrderedPoly:
    """Radial part of ``r psi_jm``: ``:(rho + lam j + lam) R + lam rho R':``."""
    return poly_multiply_by_rho(poly) + poly * (poly.lam * (j + 1))


def poly_kinetic(poly: NormalOrderedPoly, j: int) -> NormalOrderedPoly:
    """``:rho R'' + 2(j + 1) R':``, the radial part of ``-(1/lam) [a^+, [a, psi_jm]]``."""
    d1 = poly_derivative(poly)
    d2 = poly_derivative(d1)
    rho_d2 = poly._like((0,) + d2.coeffs)
    return rho_d2 + d1 * (2 * (j + 1))


def radial_operator_coeffs(poly: NormalOrderedPoly, j: int, lam, alpha, kappa2) -> NormalOrderedPoly:
    """Residual ``:rho R'' + 2(j+1) R' + alpha R - kappa^2 (rho R + lam (j+1) R + lam rho R'):``.

    The zero polynomial means ``R`` solves the radial equation.
    """
    poly = NormalOrderedPoly(poly.coeffs, lam)
    return poly_kinetic(poly, j) + poly * alpha - poly_radius_multiply(poly, j) * kappa2


@dataclass(frozen=True)
class BandedPencil:
    """Tridiagonal pencil ``A R = kappa^2 B R`` on radial levels ``0..size-1``.

    ``lower[i] = A[i+1, i]``, ``upper[i] = A[i, i+1]``, ``weight = diag(B)``.
    """

    j: int
    lam: object
    alpha: object
    lower: np.ndarray = field(repr=False)
    main: np.ndarray = field(repr=False)
    upper: np.ndarray = field(repr=False)
    weight: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.main)

    @property
    def n_max(self) -> int:
        return self.j + self.size - 1

    @property
    def exact(self) -> bool:
        return self.main.dtype == object

    def apply(self, values) -> np.ndarray:
        """``A R`` with ``R(size) = 0``; ``values`` may hold one extra entry.

        When ``values`` has ``size + 1`` entries the extra one is used in the
        last row instead of the Dirichlet zero, which lets exact solutions be
        checked on every row.
        """
        v = np.asarray(values, dtype=self.main.dtype)
        n = self.size
        out = self.main * v[:n]
        out[:-1] = out[:-1] + self.upper * v[1:n]
        out[1:] = out[1:] + self.lower * v[: n - 1]
        if len(v) > n:
            top = self.upper_at(n - 1)
            out[-1] = out[-1] + top * v[n]
        return out

    def upper_at(self, i: int):
        return (i + 2 * self.j + 2) / self.lam

    def apply_weight(self, values) -> np.ndarray:
        v = np.asarray(values, dtype=self.main.dtype)
        return self.weight * v[: self.size]

    def residual(self, values, kappa2) -> np.ndarray:
        return self.apply(values) - self.apply_weight(values) * kappa2

    def symmetrizer(self) -> np.ndarray:
        """Weights ``C(i + 2j + 1, 2j + 1)`` making ``diag(w) A`` symmetric."""
        j = self.j
        vals = [math.comb(i + 2 * j + 1, 2 * j + 1) for i in range(self.size)]
        return np.array(vals, dtype=object if self.exact else float)

    def to_dense(self):
        n = self.size
        A = np.zeros((n, n), dtype=self.main.dtype)
        A[np.arange(n), np.arange(n)] = self.main
        A[np.arange(n - 1), np.arange(1, n)] = self.upper
        A[np.arange(1, n), np.arange(n - 1)] = self.lower
        B = np.zeros((n, n), dtype=self.main.dtype)
        B[np.arange(n), np.arange(n)] = self.weight
        return A, B


def build_pencil(j: int, lam, alpha, n_max: int, exact: bool = False) -> BandedPencil:
    """Pencil for the radial equation of spin ``j`` on Fock levels ``j..n_max``.

    Row ``i``:  ``(i/lam) R(i-1) + (alpha - 2(i + j + 1)/lam) R(i) + ((i + 2j + 2)/lam) R(i+1)
    = kappa^2 lam (i + j + 1) R(i)``.  The ``R(-1)`` coefficient vanishes at
    ``i = 0`` so the left end needs no boundary condition.
    """
    if n_max <= j:
        raise ValueError(f"n_max={n_max} must exceed j={j}")
    if exact:
        lam, alpha = Fraction(lam), Fraction(alpha)
        if lam <= 0:
            raise ValueError("lam must be positive")
        i = [Fraction(k) for k in range(n_max - j + 1)]
        dtype = object
    else:
        lam, alpha = float(lam), float(alpha)
        if lam <= 0:
            raise ValueError("lam must be positive")
        i = np.arange(n_max - j + 1, dtype=float)
        dtype = float
    i = np.array(i, dtype=dtype)
    main = alpha - (2 * i + 2 * (j + 1)) / lam
    upper = (i[:-1] + 2 * j + 2) / lam
    lower = i[1:] / lam
    weight = lam * (i + j + 1)
    return BandedPencil(j, lam, alpha, lower, main, upper, weight)


@dataclass(frozen=True)
class BoundStateSolution:
    kappa2: float
    sequence: RadialSequence
    tail_fraction: float
    truncation_sensitive: bool


def solve_bound_states(pencil: BandedPencil, eps_cut: float = 1e-8, tail_tol: float = 1e-10):
    """Eigenpairs of the pencil with ``kappa^2 > eps_cut``, deepest first.

    The pencil is reduced to a symmetric tridiagonal matrix by
    ``T = W^-1/2 S^1/2 A S^-1/2 W^-1/2`` with ``S`` the symmetrizer and
    ``W = B``; eigenvectors are mapped back and normalised to unit weighted
    norm.  A state whose norm has more than ``tail_tol`` of its weight in
    the outermost 5% of levels is flagged ``truncation_sensitive``.
    """
    if pencil.exact:
        raise TypeError("solve_bound_states needs a float pencil")
    s = pencil.symmetrizer()
    w = pencil.weight
    d = pencil.main / w
    off = np.sqrt(pencil.upper * pencil.lower) / np.sqrt(w[:-1] * w[1:])
    try:
        evals, evecs = eigh_tridiagonal(d, off, select="v", select_range=(eps_cut, np.inf))
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            f"tridiagonal eigensolver failed for j={pencil.j}, lam={pencil.lam}, "
            f"alpha={pencil.alpha}, n_max={pencil.n_max}"
        ) from exc
    order = np.argsort(evals)[::-1]
    mu = radial_measure(pencil.j, pencil.size)
    tail_start = int(0.95 * pencil.size)
    out = []
    for k in order:
        vals = evecs[:, k] / np.sqrt(s * w)
        seq = RadialSequence(pencil.j, pencil.lam, vals)
        norm2 = sequence_norm(seq)
        vals = vals / math.sqrt(norm2)
        if vals[0] < 0:
            vals = -vals
        weights = mu * vals**2
        tail = float(weights[tail_start:].sum() / weights.sum())
        out.append(
            BoundStateSolution(
                float(evals[k]),
                RadialSequence(pencil.j, pencil.lam, vals),
                tail,
                tail > tail_tol,
            )
        )
    return out


def sequence_inner(a: RadialSequence, b: RadialSequence) -> float:
    """Weighted inner product of two radial sequences of the same spin."""
    if a.j != b.j:
        raise ValueError("sequences of different spin are orthogonal by symmetry")
    n = min(len(a), len(b))
    mu = radial_measure(a.j, n)
    return measure_prefactor(a.j, a.lam) * float(np.sum(mu * np.asarray(a.values[:n], float) * np.asarray(b.values[:n], float)))


def sequence_norm(seq: RadialSequence, exact: bool = False):
    """``(4 pi lam^(3+2j) / j!^2) sum_i mu_j(i) R(i)^2``.

    With ``exact=True`` the rational sum (without the ``4 pi`` factor) is
    returned as a ``Fraction``.
    """
    n = len(seq)
    if exact:
        mu = radial_measure(seq.j, n, exact=True)
        lam = Fraction(seq.lam)
        s = sum((m * Fraction(v) ** 2 for m, v in zip(mu, seq.values)), Fraction(0))
        return lam ** (3 + 2 * seq.j) / math.factorial(seq.j) ** 2 * s
    mu = radial_measure(seq.j, n)
    vals = np.asarray(seq.values, dtype=float)
    return measure_prefactor(seq.j, seq.lam) * float(np.sum(mu * vals**2))
