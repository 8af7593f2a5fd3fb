"""Closed-form spectrum and eigenfunctions of the noncommutative Coulomb problem.

Units are atomic (hbar = m = e = 1): the Bohr radius is 1, ``alpha = 2`` and
the commutative levels are ``E_n = -1/(2 n^2)``.  Lengths, ``lam`` included,
are in Bohr radii.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy.special import comb

from .radial_engine import RadialSequence, radial_measure, sequence_norm

__all__ = [
    "ALPHA",
    "HypergeometricParams",
    "HypergeometricSolution",
    "NCParameters",
    "BoundLevel",
    "kummer_F",
    "ode_to_hypergeometric",
    "nc_parameters",
    "bound_energy",
    "commutative_energy",
    "energy_shift",
    "polynomial_coeffs",
    "analytic_radial_sequence",
    "normalization_constant",
    "radial_taylor_coeffs",
    "PencilResidual",
    "analytic_pencil_residual",
    "ConvergenceError",
]

ALPHA = 2


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class HypergeometricParams:
    a: float
    c: float

    def __post_init__(self):
        if _nonpositive_integer(self.c):
            raise ValueError(f"c={self.c} is a non-positive integer; the series is undefined")

    @property
    def polynomial(self) -> bool:
        return _nonpositive_integer(self.a)


def _nonpositive_integer(x) -> bool:
    return float(x) <= 0 and float(x) == math.floor(float(x))


def kummer_F(a, c, x, tol: float = 1e-17, max_terms: int = 100_000):
    """Confluent hypergeometric function ``1F1(a; c; x)`` by its power series.

    For ``a = 0, -1, -2, ...`` the series terminates and is summed exactly;
    with rational ``a, c, x`` the result is then a ``Fraction``.
    """
    params = HypergeometricParams(a, c)
    if params.polynomial:
        deg = -int(round(float(a)))
        if all(isinstance(v, (int, Fraction)) for v in (a, c, x)):
            a, c, x = Fraction(a), Fraction(c), Fraction(x)
            term, total = Fraction(1), Fraction(1)
        else:
            a, c, x = float(a), float(c), float(x)
            term, total = 1.0, 1.0
        for k in range(deg):
            term = term * (a + k) / (c + k) * x / (k + 1)
            total += term
        return total

    a, c, x = float(a), float(c), float(x)
    total, peak = _series_float(a, c, x, tol, max_terms)
    # an alternating series loses about log10(peak / |sum|) digits; redo it
    # with that many extra digits so the result keeps ~1e-15 relative accuracy
    cond = peak / max(abs(total), 1e-300)
    if cond > 1e3:
        dps = min(20 + int(math.ceil(math.log10(cond))), 400)
        with mpmath.workdps(dps):
            total = float(_series_mp(mpmath.mpf(a), mpmath.mpf(c), mpmath.mpf(x), max_terms))
    return total


def _series_float(a, c, x, tol, max_terms):
    terms = [1.0]
    term, peak = 1.0, 1.0
    for k in range(max_terms):
        term *= (a + k) / (c + k) * x / (k + 1)
        terms.append(term)
        peak = max(peak, abs(term))
        # terms shrink monotonically once k exceeds |x|
        if k > abs(x) and abs(term) <= tol * peak:
            return math.fsum(terms), peak
    raise ConvergenceError(f"1F1({a}; {c}; {x}) did not converge in {max_terms} terms")


def _series_mp(a, c, x, max_terms):
    term, total = mpmath.mpf(1), mpmath.mpf(1)
    for k in range(max_terms):
        term *= (a + k) / (c + k) * x / (k + 1)
        total += term
        if k > abs(x) and abs(term) <= 1e-20 * abs(total):
            return total
    raise ConvergenceError(f"1F1({a}; {c}; {x}) did not converge in {max_terms} terms")


@dataclass(frozen=True)
class HypergeometricSolution:
    """``R(rho) = exp(exponent * rho) F(a, c; -D rho)``."""

    D: float
    a: float
    c: float
    exponent: float

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        vals = [math.exp(self.exponent * r) * kummer_F(self.a, self.c, -self.D * r) for r in rho.ravel()]
        return np.array(vals).reshape(rho.shape)


def ode_to_hypergeometric(a1, b1, a2, b2, branch: int = -1) -> HypergeometricSolution:
    """Solve ``rho R'' + (a1 rho + b1) R' + (a2 rho + b2) R = 0`` regular at 0.

    ``D^2 = a1^2 - 4 a2``; ``branch`` picks the sign of ``D``.  Both branches
    give the same function.
    """
    disc = a1 * a1 - 4 * a2
    if disc < 0:
        raise ValueError("complex D (oscillatory solutions) is not supported")
    if branch not in (-1, 1):
        raise ValueError("branch must be +1 or -1")
    D = branch * math.sqrt(disc)
    if D == 0:
        raise ValueError("degenerate case D = 0")
    a = (0.5 * (D - a1) * b1 + b2) / D
    return HypergeometricSolution(D, a, b1, 0.5 * (D - a1))


@dataclass(frozen=True)
class NCParameters:
    eta: float
    b: float
    d: float


def nc_parameters(lam, kappa) -> NCParameters:
    """``eta = lam kappa / 2``, ``d = sqrt(1 + eta^2)``, ``b = d - eta``."""
    if lam < 0 or kappa <= 0:
        raise ValueError("need lam >= 0 and kappa > 0")
    eta = 0.5 * lam * kappa
    d = math.hypot(1.0, eta)
    # d - eta without cancellation
    b = 1.0 / (d + eta)
    return NCParameters(eta, b, d)


@dataclass(frozen=True)
class BoundLevel:
    n: int
    lam: float
    kappa: float
    energy: float
    residual: float


def bound_energy(n: int, lam, alpha=ALPHA) -> BoundLevel:
    """``kappa_n`` and ``E_n`` from ``alpha / (2 d_n kappa_n) = n``.

    The condition is a quadratic in ``kappa^2``; its positive root is
    ``kappa^2 = 2y / (1 + sqrt(1 + lam^2 y))`` with ``y = alpha^2 / (4 n^2)``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if lam < 0:
        raise ValueError("lam must be non-negative")
    y = alpha * alpha / (4.0 * n * n)
    kappa2 = 2.0 * y / (1.0 + math.sqrt(1.0 + lam * lam * y))
    kappa = math.sqrt(kappa2)
    p = nc_parameters(lam, kappa)
    residual = abs(alpha / (2.0 * p.d * kappa) - n) / n
    return BoundLevel(n, float(lam), kappa, -0.5 * kappa2, residual)


def commutative_energy(n: int) -> Fraction:
    return Fraction(-1, 2 * n * n)


def energy_shift(n: int, lam) -> float:
    """``E_n(lam) - E_n(0)``, evaluated without cancellation."""
    x = (lam / n) ** 2
    s = math.sqrt(1.0 + x)
    return x / (2.0 * n * n * (1.0 + s) ** 2)


def polynomial_coeffs(n: int, j: int) -> list[Fraction]:
    """``c_k`` with ``F(j+1-n, 2j+2; x) = sum_k c_k (-x)^k / k!``.

    ``c_k = (n-j-1)! (2j+1)! / ((n-j-1-k)! (2j+1+k)!)``, i.e. the ratio of
    Pochhammer symbols of the terminating series.
    """
    if not 0 <= j < n:
        raise ValueError(f"need 0 <= j < n, got n={n}, j={j}")
    p = n - j - 1
    f = math.factorial
    return [Fraction(f(p) * f(2 * j + 1), f(p - k) * f(2 * j + 1 + k)) for k in range(p + 1)]


def analytic_radial_sequence(n: int, j: int, lam, n_max: int) -> RadialSequence:
    """Unnormalised radial values on radial levels ``0..n_max - j``.

    ``R(i) = q^i sum_k c_k (-2 lam kappa d / q)^k C(i, k)`` with
    ``q = 1 - b kappa lam``.
    """
    if n_max < j:
        raise ValueError("n_max must be >= j")
    level = bound_energy(n, lam)
    p = nc_parameters(lam, level.kappa)
    q = 1.0 - p.b * level.kappa * lam
    if not 0.0 < q <= 1.0:
        raise ArithmeticError(f"decay factor {q} outside (0, 1]")
    i = np.arange(n_max - j + 1, dtype=float)
    z = -2.0 * lam * level.kappa * p.d / q
    poly = np.zeros_like(i)
    for k, c in enumerate(polynomial_coeffs(n, j)):
        poly += float(c) * z**k * comb(i, k)
    return RadialSequence(j, float(lam), q**i * poly)


def normalization_constant(n: int, j: int, lam, n_max: int, warn_tol: float = 1e-10):
    """``1 / sqrt(norm)`` of the analytic sequence, with a tail bound.

    Returns ``(constant, tail_bound)`` where ``tail_bound`` bounds the
    relative contribution of the levels beyond ``n_max``, extrapolated from
    the ratio of the last two terms.
    """
    seq = analytic_radial_sequence(n, j, lam, n_max)
    norm2 = sequence_norm(seq)
    terms = radial_measure(j, len(seq)) * np.asarray(seq.values, float) ** 2
    ratio = terms[-1] / terms[-2] if len(terms) > 1 and terms[-2] > 0 else 1.0
    if ratio >= 1.0:
        tail = math.inf
    else:
        tail = float(terms[-1] * ratio / (1.0 - ratio) / terms.sum())
    if tail > warn_tol:
        warnings.warn(
            f"normalisation of (n={n}, j={j}) at n_max={n_max} misses a tail of ~{tail:.2e}",
            RuntimeWarning,
            stacklevel=2,
        )
    return 1.0 / math.sqrt(norm2), tail


def radial_taylor_coeffs(n: int, j: int, lam, degree: int) -> list[float]:
    """Taylor coefficients in ``rho`` of ``exp(-b kappa rho) F(j+1-n, 2j+2; 2 kappa d rho)``.

    Truncated at ``degree``; feeding them to the coefficient-level radial
    operator leaves a residual only in the top two degrees.
    """
    level = bound_energy(n, lam)
    p = nc_parameters(lam, level.kappa)
    poly = [float(c) * (-2.0 * level.kappa * p.d) ** k / math.factorial(k) for k, c in enumerate(polynomial_coeffs(n, j))]
    expo = [(-p.b * level.kappa) ** k / math.factorial(k) for k in range(degree + 1)]
    return [
        math.fsum(poly[k] * expo[m - k] for k in range(min(m, len(poly) - 1) + 1))
        for m in range(degree + 1)
    ]


@dataclass(frozen=True)
class PencilResidual:
    """Residual of the analytic sequence in the radial pencil.

    ``relative`` is ``max|A R - kappa^2 B R| / max|A R|``; ``backward`` is
    the normwise backward error ``max|A R - kappa^2 B R| / max(|A||R| +
    kappa^2 |B||R|)``, the measure that float64 rounding of the stencil
    terms bounds.
    """

    n: int
    j: int
    lam: float
    n_max: int
    relative: float
    backward: float
    dps: int | None


def analytic_pencil_residual(n: int, j: int, lam, n_max: int, dps: int | None = None) -> PencilResidual:
    """Substitute the closed-form sequence into every pencil row.

    With ``dps`` set, the sequence, ``kappa^2`` and the stencil are evaluated
    in ``mpmath`` with that many digits, so cancellation between stencil
    terms (of relative size ``1 / (kappa lam)^2``) cannot hide a wrong
    formula.  The value one level beyond ``n_max`` is used in the last row,
    so no row is affected by the truncation.
    """
    if not 0 <= j < n:
        raise ValueError(f"need 0 <= j < n, got n={n}, j={j}")
    if lam <= 0:
        raise ValueError("lam must be positive")
    ctx = mpmath.mp if dps is not None else None
    if ctx is None:
        level = bound_energy(n, lam)
        kappa2 = level.kappa**2
        vals = list(np.asarray(analytic_radial_sequence(n, j, lam, n_max + 1).values, float))
        lam_x, fabs = float(lam), abs
    else:
        with mpmath.workdps(dps):
            lam_x = mpmath.mpf(lam)
            y = mpmath.mpf(ALPHA) ** 2 / (4 * n * n)
            kappa2 = 2 * y / (1 + mpmath.sqrt(1 + lam_x**2 * y))
            kappa = mpmath.sqrt(kappa2)
            eta = lam_x * kappa / 2
            d = mpmath.sqrt(1 + eta**2)
            b = d - eta
            q = 1 - b * kappa * lam_x
            z = -2 * lam_x * kappa * d / q
            cs = polynomial_coeffs(n, j)
            vals = [
                q**i * mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * z**k * math.comb(i, k) for k, c in enumerate(cs))
                for i in range(n_max - j + 2)
            ]
        fabs = mpmath.fabs
    ctx_mgr = mpmath.workdps(dps) if dps is not None else _null_context()
    with ctx_mgr:
        worst_res = worst_act = worst_scale = 0
        for i in range(n_max - j + 1):
            lo = (i / lam_x) * vals[i - 1] if i > 0 else 0
            mid = (ALPHA - (2 * i + 2 * (j + 1)) / lam_x) * vals[i]
            hi = ((i + 2 * j + 2) / lam_x) * vals[i + 1]
            rhs = kappa2 * lam_x * (i + j + 1) * vals[i]
            res = fabs(lo + mid + hi - rhs)
            scale = fabs(lo) + fabs(mid) + fabs(hi) + fabs(rhs)
            worst_res = max(worst_res, res)
            worst_act = max(worst_act, fabs(lo + mid + hi))
            worst_scale = max(worst_scale, scale)
        return PencilResidual(
            n, j, float(lam), n_max, float(worst_res / worst_act), float(worst_res / worst_scale), dps
        )


class _null_context:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False
