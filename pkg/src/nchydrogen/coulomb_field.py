"""Noncommutative electrostatics: potential, field, self-energy and volumes."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

from scipy import constants as sc

from .fock_algebra.operators import FockBasis, coordinate_ops, diagonal_operator

__all__ = [
    "RadialPotential",
    "PhysicalConstants",
    "load_constants",
    "poisson_solve",
    "poisson_residual",
    "electric_field_ops",
    "self_energy_partial_sum",
    "self_energy_lambda0",
    "Lambda0Report",
    "ball_volume",
    "BallVolume",
]


@dataclass(frozen=True)
class RadialPotential:
    values: tuple
    q: object
    q0: object
    lam: object

    def closed_form(self):
        return tuple(-self.q / (self.lam * (N + 1)) + self.q0 for N in range(len(self.values)))


def poisson_solve(q, q0, n_max: int, lam=1) -> RadialPotential:
    """Iterate ``(M+1) V(M) - M V(M-1) = q0`` from ``V(0) = q0 - q/lam``.

    Rational inputs give rational output.
    """
    if all(isinstance(v, (int, Fraction)) for v in (q, q0, lam)):
        q, q0, lam = Fraction(q), Fraction(q0), Fraction(lam)
    V = [q0 - q / lam]
    for M in range(1, n_max + 1):
        V.append((q0 + M * V[M - 1]) / (M + 1))
    return RadialPotential(tuple(V), q, q0, lam)


def poisson_residual(values) -> list:
    """``(N+2) V(N+1) - 2(N+1) V(N) + N V(N-1)`` at interior levels ``N``.

    This is ``-[a^+, [a, V(N)]]`` on level ``N`` for a diagonal ``V``; it
    vanishes for every solution of the NC Poisson equation away from the
    source level ``N = 0``.
    """
    V = list(values)
    return [(N + 2) * V[N + 1] - 2 * (N + 1) * V[N] + N * V[N - 1] for N in range(1, len(V) - 1)]


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants; Gaussian ``e^2`` is ``elementary_charge^2 / (4 pi eps0)``."""

    electron_mass: float = sc.m_e
    elementary_charge: float = sc.e
    hbar: float = sc.hbar
    speed_of_light: float = sc.c
    vacuum_permittivity: float = sc.epsilon_0

    @property
    def e2(self) -> float:
        """Gaussian charge squared in J m."""
        return self.elementary_charge**2 / (4 * math.pi * self.vacuum_permittivity)

    @property
    def rest_energy(self) -> float:
        return self.electron_mass * self.speed_of_light**2

    @property
    def classical_electron_radius(self) -> float:
        return self.e2 / self.rest_energy

    @property
    def bohr_radius(self) -> float:
        return self.hbar**2 / (self.electron_mass * self.e2)

    @property
    def fine_structure(self) -> float:
        return self.e2 / (self.hbar * self.speed_of_light)


def load_constants(path=None) -> PhysicalConstants:
    """Defaults overridden by ``key = value`` lines (SI units, ``#`` comments)."""
    consts = PhysicalConstants()
    if path is None:
        return consts
    known = {f.name for f in fields(PhysicalConstants)}
    updates = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown constant {key!r}")
        updates[key] = float(value)
    return replace(consts, **updates)


def electric_field_ops(basis: FockBasis, lam, charge, exact: bool = False):
    """``E_j = (charge / lam^3) [N (N+1) (N+2)]^-1 x_j`` on levels ``N >= 1``.

    The level ``N = 0`` is outside the domain (``1/N``); it is left empty.
    """
    if basis.n_max < 1:
        raise ValueError("basis has no level N >= 1")
    if exact:
        lam, charge = Fraction(lam), Fraction(charge)
    x1, x2, x3, _, _ = coordinate_ops(basis, lam, exact)
    scale = [0] + [charge / (lam**3 * N * (N + 1) * (N + 2)) for N in range(1, basis.n_max + 1)]
    D = diagonal_operator(basis, scale, exact)
    return D @ x1, D @ x2, D @ x3


def self_energy_partial_sum(K: int) -> Fraction:
    """``sum_{N=1}^{K} 1/(N (N+2))`` exactly."""
    return sum((Fraction(1, N * (N + 2)) for N in range(1, K + 1)), Fraction(0))


def _telescoped_remainder(K: int) -> Fraction:
    return Fraction(1, 2) * (Fraction(1, K + 1) + Fraction(1, K + 2))


@dataclass(frozen=True)
class Lambda0Report:
    lambda0: float
    ratio_to_r0: Fraction
    r0: float
    bohr_radius: float
    lambda0_over_a0: float
    fine_structure: float
    nine_64_alpha2: float
    relative_level_shift_n1: float
    partial_sums: list


def self_energy_lambda0(constants: PhysicalConstants | None = None, checkpoints=(1, 10, 100, 1000, 10_000)):
    """Fix ``lam`` by equating ``m c^2`` with the NC field energy.

    ``(4 pi lam^3 / 8 pi) Tr[(N+1) E^2] = (e^2 / 2 lam) sum_{N>=1} 1/(N(N+2))
    = 3 e^2 / (8 lam)``, so ``lam0 = (3/8) r0``.  The partial-sum table
    lists ``(K, S_K, 3/4 - S_K, telescoped remainder)``.
    """
    c = constants or PhysicalConstants()
    table = []
    for K in checkpoints:
        S = self_energy_partial_sum(K)
        table.append((K, S, Fraction(3, 4) - S, _telescoped_remainder(K)))
    total = table[-1][1] + table[-1][3]
    ratio = total / 2
    lam0 = float(ratio) * c.classical_electron_radius
    a0 = c.bohr_radius
    x = (lam0 / a0) ** 2
    shift = 1.0 - 2.0 / (1.0 + math.sqrt(1.0 + x))
    return Lambda0Report(
        lambda0=lam0,
        ratio_to_r0=ratio,
        r0=c.classical_electron_radius,
        bohr_radius=a0,
        lambda0_over_a0=lam0 / a0,
        fine_structure=c.fine_structure,
        nine_64_alpha2=9 / 64 * c.fine_structure**2,
        relative_level_shift_n1=shift,
        partial_sums=table,
    )


@dataclass(frozen=True)
class BallVolume:
    volume: float
    radius: float
    relative_deviation: float
    volume_upper_variant: float
    relative_deviation_upper_variant: float


def ball_volume(N: int, lam=1.0) -> BallVolume:
    """``4 pi lam^3 sum_{n=0}^{N} (n+1)^2`` against ``(4 pi / 3) r^3``, ``r = lam (N+1)``.

    The ``_upper_variant`` fields use the sum up to ``N + 1``.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    lam = float(lam)

    def squares(M):
        return (M + 1) * (M + 2) * (2 * M + 3) // 6

    r = lam * (N + 1)
    v = 4 * math.pi * lam**3 * squares(N)
    v_up = 4 * math.pi * lam**3 * squares(N + 1)
    # exact rational deviations avoid cancellation at large N
    dev = float(Fraction(3 * squares(N), (N + 1) ** 3) - 1)
    dev_up = float(Fraction(3 * squares(N + 1), (N + 1) ** 3) - 1)
    return BallVolume(v, r, dev, v_up, dev_up)
