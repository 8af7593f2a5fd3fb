import math
import warnings
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nchydrogen.analytic import (
    ConvergenceError,
    HypergeometricParams,
    analytic_pencil_residual,
    analytic_radial_sequence,
    bound_energy,
    commutative_energy,
    energy_shift,
    kummer_F,
    nc_parameters,
    normalization_constant,
    ode_to_hypergeometric,
    polynomial_coeffs,
)
from nchydrogen.radial_engine import build_pencil, sequence_inner, sequence_norm

# -- Kummer's function ------------------------------------------------------


def test_kummer_at_zero():
    assert kummer_F(0.3, 1.7, 0.0) == 1.0
    assert kummer_F(-3, 2, 0) == 1


def test_kummer_two_term_polynomial():
    assert kummer_F(-1, 2, Fraction(3, 5)) == 1 - Fraction(3, 10)
    assert kummer_F(-1, 2, 0.6) == pytest.approx(0.7, rel=1e-16)


def test_kummer_polynomial_is_exact():
    x = Fraction(7, 3)
    assert kummer_F(-2, 2, x) == 1 - x + x * x / 6


@pytest.mark.parametrize("c", [0, -1, -4])
def test_kummer_rejects_nonpositive_integer_c(c):
    with pytest.raises(ValueError):
        kummer_F(0.5, c, 1.0)
    with pytest.raises(ValueError):
        HypergeometricParams(1.0, c)


def test_kummer_reports_nonconvergence():
    with pytest.raises(ConvergenceError):
        kummer_F(0.5, 1.5, 50.0, max_terms=10)


@settings(max_examples=200, deadline=None)
@given(
    a=st.floats(-6, 6, allow_nan=False),
    c=st.floats(0.25, 8, allow_nan=False),
    x=st.floats(-12, 12, allow_nan=False),
)
def test_kummer_matches_mpmath(a, c, x):
    want = float(mpmath.hyp1f1(a, c, x))
    scale = float(mpmath.hyp1f1(abs(a), c, abs(x)))
    assert abs(kummer_F(a, c, x) - want) <= 1e-12 * max(scale, 1.0)


@settings(max_examples=200, deadline=None)
@given(
    a=st.floats(-5, 5, allow_nan=False),
    c=st.floats(0.5, 6, allow_nan=False),
    x=st.floats(-8, 8, allow_nan=False),
)
def test_kummer_relation(a, c, x):
    lhs = kummer_F(a, c, x)
    rhs = math.exp(x) * kummer_F(c - a, c, -x)
    scale = max(abs(lhs), abs(rhs), float(mpmath.hyp1f1(abs(a), c, abs(x))), 1.0)
    assert abs(lhs - rhs) <= 1e-12 * scale


# -- ODE mapping ------------------------------------------------------------


def _ode_residual(sol, a1, b1, a2, b2, rho):
    f = lambda r: mpmath.e ** (sol.exponent * r) * mpmath.hyp1f1(sol.a, sol.c, -sol.D * r)  # noqa: E731
    with mpmath.workdps(30):
        R, R1, R2 = (mpmath.diff(f, rho, k) for k in range(3))
        res = rho * R2 + (a1 * rho + b1) * R1 + (a2 * rho + b2) * R
        scale = abs(rho * R2) + abs((a1 * rho + b1) * R1) + abs((a2 * rho + b2) * R)
    return float(abs(res) / scale)


def _coulomb_ode(j, lam, kappa, alpha=2):
    return -lam * kappa**2, 2 * j + 2, -(kappa**2), alpha - (j + 1) * lam * kappa**2


@settings(max_examples=25, deadline=None)
@given(
    j=st.integers(0, 4),
    lam=st.floats(0, 2),
    kappa=st.floats(0.1, 2),
    rho=st.floats(0.05, 6),
    branch=st.sampled_from([-1, 1]),
)
def test_ode_solution_residual(j, lam, kappa, rho, branch):
    coeffs = _coulomb_ode(j, lam, kappa)
    sol = ode_to_hypergeometric(*coeffs, branch=branch)
    assert _ode_residual(sol, *coeffs, rho) <= 1e-10


@pytest.mark.parametrize("j, lam, kappa", [(0, 0.3, 0.8), (2, 1.0, 0.5), (1, 0.0, 1.0)])
def test_branches_agree(j, lam, kappa):
    minus = ode_to_hypergeometric(*_coulomb_ode(j, lam, kappa), branch=-1)
    plus = ode_to_hypergeometric(*_coulomb_ode(j, lam, kappa), branch=1)
    rho = np.linspace(0, 8, 17)
    assert np.allclose(minus(rho), plus(rho), rtol=1e-12, atol=0)


@pytest.mark.parametrize("j", [0, 1, 3])
@pytest.mark.parametrize("lam", [0.0, 0.2, 1.5])
def test_coulomb_mapping_gives_closed_form(j, lam):
    kappa, alpha = 0.7, 2.0
    sol = ode_to_hypergeometric(*_coulomb_ode(j, lam, kappa, alpha), branch=-1)
    p = nc_parameters(lam, kappa) if lam > 0 else None
    b, d = (p.b, p.d) if p else (1.0, 1.0)
    assert sol.D == pytest.approx(-2 * kappa * d, rel=1e-14)
    assert sol.exponent == pytest.approx(-b * kappa, rel=1e-14)
    assert sol.c == 2 * j + 2
    assert sol.a == pytest.approx(j + 1 - alpha / (2 * kappa * d), rel=1e-13)


def test_commutative_mapping():
    # lam = 0: R = exp(-kappa rho) F(j+1 - alpha/(2 kappa), 2j+2; 2 kappa rho)
    sol = ode_to_hypergeometric(0.0, 2, -0.25, 2.0)
    assert sol.exponent == pytest.approx(-0.5)
    assert sol.a == pytest.approx(1 - 2.0)
    assert sol(np.array([1.0]))[0] == pytest.approx(math.exp(-0.5) * (1 - 0.5), rel=1e-15)


def test_ode_rejects_complex_discriminant():
    with pytest.raises(ValueError):
        ode_to_hypergeometric(0.0, 2, 1.0, 1.0)
    with pytest.raises(ValueError):
        ode_to_hypergeometric(1.0, 2, -1.0, 1.0, branch=0)


# -- NC parameters and energies ---------------------------------------------


def test_nc_parameters_examples():
    p = nc_parameters(0.0, 1.0)
    assert (p.eta, p.b, p.d) == (0.0, 1.0, 1.0)
    p = nc_parameters(1.5, 1.0)
    assert p.eta == 0.75
    assert p.b == pytest.approx(0.5, rel=1e-15) and p.d == pytest.approx(1.25, rel=1e-15)


@given(lam=st.floats(0, 1e3), kappa=st.floats(1e-3, 10))
def test_nc_parameter_identities(lam, kappa):
    p = nc_parameters(lam, kappa)
    assert 0 < p.b <= 1 <= p.d
    assert p.d - p.b == pytest.approx(p.eta, rel=1e-12, abs=1e-15)
    assert p.d**2 - 1 == pytest.approx(p.eta**2, rel=1e-12, abs=1e-15)
    assert p.b * p.d == pytest.approx(1 - p.eta * p.b, rel=1e-12)


def test_nc_parameters_reject():
    with pytest.raises(ValueError):
        nc_parameters(-1, 1)
    with pytest.raises(ValueError):
        nc_parameters(1, 0)


@pytest.mark.parametrize("n, lam, E", [(1, 0.0, -0.5), (3, 0.0, -1 / 18), (1, math.sqrt(3), -1 / 3)])
def test_bound_energy_examples(n, lam, E):
    assert bound_energy(n, lam).energy == pytest.approx(E, rel=1e-15)


@given(n=st.integers(1, 50), lam=st.floats(0, 100))
def test_bound_energy_self_consistent(n, lam):
    lev = bound_energy(n, lam)
    assert lev.residual <= 1e-14
    assert lev.energy < 0
    closed = -(1 / (2 * n * n)) * 2 / (1 + math.sqrt(1 + lam**2 / n**2))
    assert lev.energy == pytest.approx(closed, rel=1e-14)


def test_bound_energy_rejects():
    with pytest.raises(ValueError):
        bound_energy(0, 0.1)
    with pytest.raises(ValueError):
        bound_energy(1, -0.1)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_energy_increases_with_lambda(n):
    E = [bound_energy(n, lam).energy for lam in np.linspace(0, 5, 51)]
    assert all(b > a for a, b in zip(E, E[1:]))


def test_quasiclassical_limit():
    ratios = [bound_energy(n, 0.5).energy / float(commutative_energy(n)) for n in (1, 10, 100, 1000)]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert 1 - ratios[-1] < 1e-7


@pytest.mark.parametrize("n", range(1, 8))
def test_commutative_energy_exact(n):
    assert commutative_energy(n) == Fraction(-1, 2 * n * n)
    assert bound_energy(n, 0).energy == float(commutative_energy(n))


@pytest.mark.parametrize("lam", [1e-6, 1e-3, 0.5, 3.0])
def test_energy_shift_is_stable_difference(lam):
    n = 2
    direct = bound_energy(n, lam).energy - bound_energy(n, 0).energy
    assert energy_shift(n, lam) == pytest.approx(direct, rel=1e-6 if lam < 1e-3 else 1e-12)
    assert energy_shift(n, 0) == 0


# -- polynomial coefficients ------------------------------------------------


@pytest.mark.parametrize(
    "n, j, expected",
    [(1, 0, [1]), (2, 0, [1, Fraction(1, 2)]), (3, 0, [1, 1, Fraction(1, 3)]), (3, 1, [1, Fraction(1, 4)])],
)
def test_polynomial_coeffs_examples(n, j, expected):
    assert polynomial_coeffs(n, j) == expected


def _series_coeffs(n, j):
    # F(j+1-n, 2j+2; x) = sum_k c_k (-x)^k / k!  read off the Pochhammer series
    a, c = j + 1 - n, 2 * j + 2
    out, term = [], Fraction(1)
    for k in range(n - j):
        out.append(term * (-1) ** k)
        term = term * (a + k) / (c + k)
    return out


@pytest.mark.parametrize("n", range(1, 13))
def test_polynomial_coeffs_match_series(n):
    for j in range(n):
        assert polynomial_coeffs(n, j) == _series_coeffs(n, j)


def test_polynomial_coeffs_numerator_uses_degree():
    # F(-1, 4; x) = 1 - x/4: the numerator factorial is (n-j-1)!, and an
    # (n-1)! numerator would give c_1 = 1/2 here
    assert polynomial_coeffs(3, 1) == [1, Fraction(1, 4)]
    assert kummer_F(-1, 4, Fraction(1)) == Fraction(3, 4)
    cs = polynomial_coeffs(4, 1)
    assert cs == [1, Fraction(1, 2), Fraction(1, 10)]
    x = Fraction(2, 3)
    assert kummer_F(-2, 4, x) == sum(c * (-x) ** k / math.factorial(k) for k, c in enumerate(cs))


@pytest.mark.parametrize("n, j", [(2, 2), (1, 1), (3, -1)])
def test_polynomial_coeffs_reject(n, j):
    with pytest.raises(ValueError):
        polynomial_coeffs(n, j)


# -- sequences --------------------------------------------------------------


def test_ground_state_sequence_is_geometric():
    lam = 0.1
    seq = analytic_radial_sequence(1, 0, lam, 50)
    lev = bound_energy(1, lam)
    q = 1 - nc_parameters(lam, lev.kappa).b * lev.kappa * lam
    assert np.allclose(seq.values, q ** np.arange(51), rtol=1e-14)


@pytest.mark.parametrize("n, j", [(1, 0), (2, 0), (3, 1), (4, 0)])
def test_sequence_approaches_commutative_wavefunction(n, j):
    lam = 1e-4
    rs = np.array([0.5, 1.0, 2.0, 5.0])
    seq = analytic_radial_sequence(n, j, lam, int(6 / lam))
    kappa = 1.0 / n
    sol = ode_to_hypergeometric(0.0, 2 * j + 2, -(kappa**2), 2.0)
    want = sol(rs)
    got = np.asarray(seq.values)[np.rint(rs / lam).astype(int) - 0]
    assert np.allclose(got, want, rtol=1e-3, atol=1e-3 * np.max(np.abs(want)))


@pytest.mark.parametrize("n, j, lam", [(1, 0, 0.01), (3, 2, 0.1), (6, 0, 1.0), (6, 5, 0.01), (5, 2, 0.1)])
def test_pencil_residual(n, j, lam):
    hi = analytic_pencil_residual(n, j, lam, 300, dps=40)
    lo = analytic_pencil_residual(n, j, lam, 300)
    assert hi.relative <= 1e-30
    assert lo.backward <= 1e-12


def test_pencil_residual_detects_wrong_energy():
    # the kappa of a neighbouring level leaves a residual of order one
    lam, n, j = 0.1, 3, 0
    pen = build_pencil(j, lam, 2, 300)
    seq = analytic_radial_sequence(n, j, lam, 301)
    wrong = bound_energy(n + 1, lam).kappa ** 2
    res = pen.residual(seq.values, wrong)
    assert np.max(np.abs(res)) > 1e-3 * np.max(np.abs(pen.apply(seq.values)))


def test_pencil_residual_rejects():
    with pytest.raises(ValueError):
        analytic_pencil_residual(2, 2, 0.1, 10)
    with pytest.raises(ValueError):
        analytic_pencil_residual(2, 0, 0.0, 10)


# -- normalisation ----------------------------------------------------------


def test_normalised_norm_is_one():
    c, tail = normalization_constant(2, 1, 0.1, 600)
    seq = analytic_radial_sequence(2, 1, 0.1, 600)
    seq = type(seq)(seq.j, seq.lam, np.asarray(seq.values) * c)
    assert sequence_norm(seq) == pytest.approx(1.0, rel=1e-12)
    assert tail < 1e-10


def test_normalisation_stable_under_doubling():
    c1, _ = normalization_constant(1, 0, 0.1, 400)
    c2, _ = normalization_constant(1, 0, 0.1, 800)
    assert math.isfinite(c1) and c1 == pytest.approx(c2, rel=1e-13)


def test_normalisation_warns_on_short_truncation():
    with pytest.warns(RuntimeWarning):
        normalization_constant(3, 0, 0.1, 40)


@pytest.mark.parametrize("j", [0, 1, 2])
def test_distinct_levels_are_orthogonal(j):
    lam, n_max = 0.1, 1500
    seqs = []
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for n in range(j + 1, j + 4):
            c, _ = normalization_constant(n, j, lam, n_max)
            s = analytic_radial_sequence(n, j, lam, n_max)
            seqs.append(type(s)(j, lam, np.asarray(s.values) * c))
    for a in range(3):
        for b in range(a + 1, 3):
            assert abs(sequence_inner(seqs[a], seqs[b])) <= 1e-10


def test_sequence_rejects_short_truncation():
    with pytest.raises(ValueError):
        analytic_radial_sequence(3, 2, 0.1, 1)
