import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nchydrogen.analytic import bound_energy, polynomial_coeffs, radial_taylor_coeffs
from nchydrogen.fock_algebra import FockBasis, build_psi_jm, double_commutator, extract_radial, radius_multiply
from nchydrogen.radial_engine import (
    NormalOrderedPoly,
    RadialSequence,
    build_pencil,
    measure_prefactor,
    poly_derivative,
    poly_eval,
    poly_kinetic,
    poly_multiply_by_rho,
    poly_radius_multiply,
    radial_measure,
    radial_operator_coeffs,
    sequence_inner,
    sequence_norm,
    solve_bound_states,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


# -- polynomials ------------------------------------------------------------


@pytest.mark.parametrize(
    "coeffs, lam, j, expected",
    [
        ((0, 1), 1, 0, [0, 1, 2, 3, 4]),
        ((1,), Fraction(3, 2), 0, [1] * 5),
        ((0, 0, 1), 2, 0, [0, 0, 8, 24, 48]),
    ],
)
def test_poly_eval(coeffs, lam, j, expected):
    seq = poly_eval(NormalOrderedPoly(coeffs, lam), j, 4)
    assert list(seq.values) == expected
    assert seq.values.dtype == object


def test_poly_eval_spin_offset():
    seq = poly_eval(NormalOrderedPoly((0, 1), 1), 2, 6)
    assert len(seq) == 5 and seq.n_max == 6
    assert list(seq.fock_levels) == [2, 3, 4, 5, 6]


def test_poly_eval_rejects_empty():
    with pytest.raises(ValueError):
        poly_eval(NormalOrderedPoly((1,), 1), 3, 2)


def test_derivative_examples():
    p = NormalOrderedPoly((5, 3, 7), 1)
    assert poly_derivative(p).coeffs == (3, 14)
    assert poly_derivative(NormalOrderedPoly((4,), 1)).is_zero
    assert poly_derivative(poly_derivative(p)).coeffs == (14,)


@pytest.mark.parametrize("lam", [Fraction(1, 3), Fraction(2)])
def test_multiply_by_rho_examples(lam):
    assert poly_multiply_by_rho(NormalOrderedPoly((1,), lam)).coeffs == (0, 1)
    assert poly_multiply_by_rho(NormalOrderedPoly((0, 1), lam)).coeffs == (0, lam, 1)


@settings(max_examples=40, deadline=None)
@given(coeffs=st.lists(rationals, min_size=1, max_size=6), lam=st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(3)]))
def test_multiply_by_rho_matches_levelwise_product(coeffs, lam):
    # rho :R: evaluated on level N is lam N R(N)
    p = NormalOrderedPoly(tuple(coeffs), lam)
    lhs = poly_eval(poly_multiply_by_rho(p), 0, 10).values
    rhs = [lam * N * v for N, v in enumerate(poly_eval(p, 0, 10).values)]
    assert list(lhs) == rhs


def test_radial_operator_trivial_solution():
    res = radial_operator_coeffs(NormalOrderedPoly((1,), 1), 0, 1, 0, 0)
    assert res.is_zero


def test_radial_operator_commutative_limit():
    # at lam = 0 the residual is rho R'' + 2(j+1) R' + alpha R - kappa^2 rho R
    p = NormalOrderedPoly((Fraction(1), Fraction(-2), Fraction(1, 2)), 0)
    res = radial_operator_coeffs(p, 1, 0, 2, Fraction(1, 4))
    # rho * 1 + 4 * (-2 + rho) + 2 (1 - 2 rho + rho^2/2) - (rho - 2 rho^2 + rho^3/2)/4
    expected = (Fraction(-6), Fraction(1 + 4 - 4 - Fraction(1, 4)), Fraction(1 + Fraction(1, 2)), Fraction(-1, 8))
    assert res.coeffs == expected


@pytest.mark.parametrize("n, j", [(1, 0), (2, 0), (3, 1), (4, 2), (5, 0)])
@pytest.mark.parametrize("lam", [0.0, 0.1, 1.0])
def test_analytic_taylor_series_solves_radial_operator(n, j, lam):
    degree = 30
    taylor = radial_taylor_coeffs(n, j, lam, degree)
    level = bound_energy(n, lam)
    res = radial_operator_coeffs(NormalOrderedPoly(tuple(taylor), lam), j, lam, 2, level.kappa**2)
    scale = max(abs(c) for c in taylor)
    # truncating the series leaves a residual only in the two top degrees
    assert max(abs(c) for c in res.coeffs[: degree - 1]) <= 1e-12 * scale


@pytest.mark.parametrize("k", range(7))
@pytest.mark.parametrize("lam", [Fraction(1, 2), Fraction(2)])
def test_finite_difference_identities_on_monomials(k, lam):
    p = NormalOrderedPoly((0,) * k + (1,), lam)
    vals = list(poly_eval(p, 0, 12).values)
    d1 = list(poly_eval(poly_derivative(p), 0, 12).values)
    d2 = poly_derivative(poly_derivative(p))
    rho_d2 = poly_eval(NormalOrderedPoly((0,) + d2.coeffs, lam), 0, 12).values
    for N in range(12):
        assert d1[N] == (vals[N + 1] - vals[N]) / lam
    for N in range(1, 12):
        assert rho_d2[N] == (N / lam) * (vals[N + 1] - 2 * vals[N] + vals[N - 1])


# -- measure ----------------------------------------------------------------


@pytest.mark.parametrize("j", range(5))
def test_measure_is_positive_integer(j):
    mu = radial_measure(j, 20, exact=True)
    assert all(isinstance(m, int) and m > 0 for m in mu)
    assert mu[0] == j + 1


def test_sequence_norm_examples():
    assert sequence_norm(RadialSequence(0, 1.0, np.zeros(5))) == 0
    delta = np.zeros(5)
    delta[0] = 1
    assert sequence_norm(RadialSequence(0, 1.0, delta)) == pytest.approx(4 * math.pi)
    assert measure_prefactor(2, 1.0) == pytest.approx(math.pi)


def test_sequence_inner_rejects_mixed_spin():
    with pytest.raises(ValueError):
        sequence_inner(RadialSequence(0, 1.0, np.ones(3)), RadialSequence(1, 1.0, np.ones(3)))


# -- pencil -----------------------------------------------------------------


@pytest.mark.parametrize("j", [0, 1, 3])
def test_pencil_structure(j):
    lam = Fraction(1, 3)
    pen = build_pencil(j, lam, 2, 12, exact=True)
    A, B = pen.to_dense()
    assert pen.size == 13 - j and pen.n_max == 12
    assert [B[i, i] for i in range(pen.size)] == [lam * (N + 1) for N in range(j, 13)]
    assert all(B[i, i] > 0 for i in range(pen.size))
    nu = pen.symmetrizer()
    SA = np.array([[nu[r] * A[r, c] for c in range(pen.size)] for r in range(pen.size)], dtype=object)
    assert (SA == SA.T).all()
    # the full measure symmetrizes B^-1 A
    mu = radial_measure(j, pen.size, exact=True)
    M = np.array([[mu[r] * A[r, c] / B[r, r] for c in range(pen.size)] for r in range(pen.size)], dtype=object)
    assert (M == M.T).all()


def test_pencil_float_symmetry_residual():
    pen = build_pencil(2, 0.37, 2, 200)
    A, _ = pen.to_dense()
    SA = pen.symmetrizer()[:, None] * A
    assert np.max(np.abs(SA - SA.T)) <= 1e-12 * np.max(np.abs(SA))


@pytest.mark.parametrize("n_max, j, lam", [(2, 2, 1.0), (1, 3, 1.0), (10, 0, 0.0), (10, 0, -1.0)])
def test_pencil_rejects(n_max, j, lam):
    with pytest.raises(ValueError):
        build_pencil(j, lam, 2, n_max)


@pytest.mark.parametrize("j", [0, 1, 2, 3])
@pytest.mark.parametrize("lam", [Fraction(1, 2), Fraction(2)])
def test_pencil_matches_fock_superoperators(j, lam):
    b = FockBasis(9)
    poly = NormalOrderedPoly((Fraction(1), Fraction(-1, 2), Fraction(2, 3), Fraction(1, 5)), lam)
    pen = build_pencil(j, lam, 0, b.n_max, exact=True)
    vals = poly_eval(poly, j, b.n_max).values
    psi = build_psi_jm(b, j, j, poly, lam, exact=True)
    kinetic = extract_radial(double_commutator(psi) * (-1 / lam), j, j, lam)
    weight = extract_radial(radius_multiply(psi, lam), j, j, lam)
    A_vals = pen.apply(vals)
    interior = pen.size - 1
    assert list(A_vals[:interior]) == kinetic[:interior]
    assert list(pen.apply_weight(vals)) == weight
    # the coefficient-level operators agree too
    assert list(poly_eval(poly_kinetic(poly, j), j, b.n_max).values[:interior]) == list(A_vals[:interior])
    assert list(poly_eval(poly_radius_multiply(poly, j), j, b.n_max).values) == weight


def test_pencil_row_on_rho():
    # j = 0, lam = 1, row N = 2 of the kinetic part on R(N) = N
    pen = build_pencil(0, Fraction(1), 0, 6, exact=True)
    vals = [Fraction(N) for N in range(7)]
    assert pen.apply(vals)[2] == 2


def test_apply_with_extra_value_uses_it():
    pen = build_pencil(0, Fraction(1), 0, 4, exact=True)
    vals = [Fraction(N) for N in range(6)]
    assert pen.apply(vals)[-1] == 2
    assert pen.apply(vals[:5])[-1] != 2


# -- eigen-solve ------------------------------------------------------------


@pytest.fixture(scope="module")
def ground_sector():
    return solve_bound_states(build_pencil(0, 0.1, 2, 800))


def test_ground_state_energy(ground_sector):
    k1 = bound_energy(1, 0.1).kappa ** 2
    assert ground_sector[0].kappa2 == pytest.approx(k1, rel=1e-12)


def test_solutions_sorted_normalised_and_positive(ground_sector):
    k2 = [s.kappa2 for s in ground_sector]
    assert k2 == sorted(k2, reverse=True)
    assert all(k > 1e-8 for k in k2)
    for s in ground_sector[:5]:
        assert sequence_norm(s.sequence) == pytest.approx(1.0, rel=1e-12)
        assert s.sequence.values[0] > 0


def test_eigenvectors_orthogonal(ground_sector):
    a, b = ground_sector[0].sequence, ground_sector[1].sequence
    assert abs(sequence_inner(a, b)) < 1e-12


def test_eigenvectors_solve_pencil(ground_sector):
    pen = build_pencil(0, 0.1, 2, 800)
    s = ground_sector[1]
    res = pen.residual(s.sequence.values, s.kappa2)
    assert np.max(np.abs(res)) <= 1e-10 * np.max(np.abs(pen.apply(s.sequence.values)))


def test_bound_state_count_grows_with_truncation():
    counts = [len(solve_bound_states(build_pencil(0, 0.1, 2, n))) for n in (50, 100, 200, 400, 800)]
    assert counts == sorted(counts) and counts[-1] > counts[0]


def test_truncation_flag():
    sols = solve_bound_states(build_pencil(0, 0.1, 2, 400))
    assert not sols[0].truncation_sensitive
    assert sols[-1].truncation_sensitive


def test_j1_sector_starts_at_n2():
    sols = solve_bound_states(build_pencil(1, 0.1, 2, 800))
    assert sols[0].kappa2 == pytest.approx(bound_energy(2, 0.1).kappa ** 2, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_degeneracy_across_sectors(n):
    k2 = [solve_bound_states(build_pencil(j, 0.1, 2, 800))[n - j - 1].kappa2 for j in range(n)]
    assert max(k2) - min(k2) <= 1e-10 * max(k2)


def test_commutative_limit_numeric():
    sols = solve_bound_states(build_pencil(0, 1e-3, 2, 80_000))
    for n in (1, 2, 3):
        assert sols[n - 1].kappa2 == pytest.approx(1 / n**2, rel=1e-5)


def test_convergence_under_doubling():
    errs = []
    for n_max in (200, 400, 800):
        sols = solve_bound_states(build_pencil(0, 0.1, 2, n_max))
        errs.append([abs(sols[k].kappa2 - bound_energy(k + 1, 0.1).kappa ** 2) for k in range(3)])
    for k in range(3):
        seq = [e[k] for e in errs]
        assert all(b < a or a < 1e-13 for a, b in zip(seq, seq[1:]))


def test_solver_needs_float_pencil():
    with pytest.raises(TypeError):
        solve_bound_states(build_pencil(0, 1, 2, 5, exact=True))


def test_polynomial_coeffs_feed_exact_pencil_check():
    # lam = 0 polynomial part: F(j+1-n, 2j+2; 2 kappa rho) with the analytic c_k
    n, j = 4, 1
    cs = polynomial_coeffs(n, j)
    assert cs[0] == 1 and len(cs) == n - j
