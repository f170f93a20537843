"""Root measures, arcsine law, KS statistics, Cauchy-transform residuals.

The continuous-law oracle is mpmath quadrature of the arcsine density;
the KS oracles are closed forms at Chebyshev nodes and law quantiles,
where the statistic collapses to simple rational expressions.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bkzeros as bk
from bkzeros import (
    ArcsineLaw,
    LeadingDegreeTooLow,
    NonRealAtoms,
    Poly,
    ProbeTooCloseToRoot,
    RootMeasure,
)


F = Fraction


def real_atoms(xs, prec=128):
    return RootMeasure([gmpy2.mpc(gmpy2.mpfr(x, prec), precision=prec) for x in xs])


def frac(x) -> Fraction:
    """Exact value of an mpfr, immune to default-context rounding."""
    return Fraction(*x.as_integer_ratio())


def chebyshev_nodes(n, prec=128):
    with gmpy2.context(precision=prec):
        pi = gmpy2.const_pi(prec)
        return [gmpy2.cos((2 * k - 1) * pi / (2 * n)) for k in range(1, n + 1)]


# ---------------------------------------------------------------------------
# RootMeasure basics


def test_atoms_are_sorted_and_mass_normalized():
    m = real_atoms([3, -1, 0])
    assert [z.real for z in m.atoms] == [-1, 0, 3]
    assert len(m) == 3


def test_real_atoms_requires_zero_imaginary_parts():
    m = RootMeasure([gmpy2.mpc("1+1j")])
    with pytest.raises(NonRealAtoms):
        m.real_atoms()


def test_root_measure_from_rootset():
    rs = bk.find_roots(Poly([0, -1, 0, 1]), 20)  # roots -1, 0, 1
    m = bk.root_measure(rs)
    assert len(m) == 3
    assert abs(m.atoms[0].real + 1) < gmpy2.mpfr(10) ** (-19)


def test_empty_measure_rejected():
    with pytest.raises(ValueError):
        RootMeasure([])


# ---------------------------------------------------------------------------
# arcsine law


def test_law_validates_interval():
    with pytest.raises(ValueError):
        ArcsineLaw(F(1), F(1))
    law = ArcsineLaw(-1, 1)
    assert law.a == F(-1) and isinstance(law.a, F)


def test_cdf_boundary_and_midpoint(unit_law):
    assert bk.arcsine_cdf(unit_law, F(-1)) == 0
    assert bk.arcsine_cdf(unit_law, F(1)) == 1
    assert bk.arcsine_cdf(unit_law, F(-2)) == 0
    assert bk.arcsine_cdf(unit_law, F(2)) == 1
    mid = bk.arcsine_cdf(unit_law, F(0))
    assert abs(frac(mid) - F(1, 2)) < F(1, 10**18)


def test_cdf_closed_form_value(unit_law):
    # F(sqrt(2)/2) = (2/pi) asin(cos(pi/8)) = 3/4
    with gmpy2.context(precision=128):
        x = gmpy2.sqrt(gmpy2.mpfr(2)) / 2
    v = bk.arcsine_cdf(unit_law, x)
    assert abs(frac(v) - F(3, 4)) < F(1, 10**35)


def test_cdf_against_quadrature_oracle():
    law = ArcsineLaw(F(-3, 2), F(5, 2))
    with mpmath.workdps(40):
        a, b = mpmath.mpf("-1.5"), mpmath.mpf("2.5")
        density = lambda t: 1 / (mpmath.pi * mpmath.sqrt((b - t) * (t - a)))
        for x in ("-1.2", "0", "0.7", "2.2"):
            ref = mpmath.quad(density, [a, mpmath.mpf(x)])
            ours = bk.arcsine_cdf(law, gmpy2.mpfr(x, 64))
            assert abs(frac(ours) - F(str(mpmath.nstr(ref, 25)))) < F(1, 10**17)


def test_cdf_tracks_argument_precision(unit_law):
    v = bk.arcsine_cdf(unit_law, gmpy2.mpfr("0.25", 200))
    assert v.precision == 200
    assert bk.arcsine_cdf(unit_law, F(1, 4)).precision == 64


def test_cdf_is_monotone(unit_law):
    xs = [gmpy2.mpfr(-1) + gmpy2.mpfr(k) / 16 for k in range(33)]
    vals = [bk.arcsine_cdf(unit_law, x) for x in xs]
    assert all(u <= v for u, v in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# one-sample KS


def test_single_midpoint_atom_has_ks_half(unit_law):
    ks = bk.ks_distance(real_atoms([0]), unit_law)
    assert abs(frac(ks) - F(1, 2)) < F(1, 10**18)


def test_chebyshev_nodes_achieve_the_minimal_ks(unit_law):
    # nodes cos((2k-1) pi / (2n)) sit at arcsine CDF levels (2i-1)/(2n),
    # so the KS statistic is exactly 1/(2n)
    m = RootMeasure([gmpy2.mpc(x, precision=128) for x in chebyshev_nodes(20)])
    ks = bk.ks_distance(m, unit_law)
    assert abs(frac(ks) - F(1, 40)) < F(1, 10**30)


def test_law_quantile_atoms(unit_law):
    # atoms at CDF levels i/11, i = 1..10: statistic works out to 1/11
    with gmpy2.context(precision=128):
        pi = gmpy2.const_pi(128)
        atoms = [-gmpy2.cos(pi * i / 11) for i in range(1, 11)]
    ks = bk.ks_distance(RootMeasure([gmpy2.mpc(x, precision=128) for x in atoms]), unit_law)
    assert abs(frac(ks) - F(1, 11)) < F(1, 10**30)


def test_ks_requires_real_atoms(unit_law):
    with pytest.raises(NonRealAtoms):
        bk.ks_distance(RootMeasure([gmpy2.mpc("1j")]), unit_law)


@given(
    st.lists(
        st.fractions(min_value=F(-1), max_value=F(1), max_denominator=16),
        min_size=1,
        max_size=12,
    )
)
@settings(max_examples=30, deadline=None)
def test_ks_is_strictly_positive_and_at_most_one(xs):
    ks = bk.ks_distance(real_atoms(xs), ArcsineLaw(F(-1), F(1)))
    assert 0 < ks <= 1


@given(
    st.lists(
        st.fractions(min_value=F(-1), max_value=F(1), max_denominator=8),
        min_size=1,
        max_size=8,
    ),
    st.fractions(min_value=F(-3), max_value=F(3), max_denominator=4),
    st.fractions(min_value=F(1, 2), max_value=F(4), max_denominator=4),
)
@settings(max_examples=30, deadline=None)
def test_ks_is_affine_equivariant(xs, shift, width):
    """Mapping atoms and law by the same affine map preserves the statistic."""
    base = bk.ks_distance(real_atoms(xs, 160), ArcsineLaw(F(-1), F(1)))
    mapped = real_atoms([shift + width * (x + 1) / 2 for x in xs], 160)
    law = ArcsineLaw(shift, shift + width)
    moved = bk.ks_distance(mapped, law)
    assert abs(frac(base) - frac(moved)) < F(1, 10**30)


# ---------------------------------------------------------------------------
# two-sample KS


def test_two_sample_exact_values():
    assert bk.ks_two_sample(real_atoms([0, 1]), real_atoms([F(1, 2)])) == F(1, 2)
    assert bk.ks_two_sample(real_atoms([0, 1, 2]), real_atoms([F(1, 2), F(3, 2)])) == F(1, 3)
    assert bk.ks_two_sample(real_atoms([0]), real_atoms([1])) == 1
    m = real_atoms([-1, F(1, 3), 2])
    assert bk.ks_two_sample(m, m) == 0
    assert isinstance(bk.ks_two_sample(m, m), F)


@given(
    st.lists(st.fractions(min_value=F(-2), max_value=F(2), max_denominator=8),
             min_size=1, max_size=8),
    st.lists(st.fractions(min_value=F(-2), max_value=F(2), max_denominator=8),
             min_size=1, max_size=8),
)
@settings(max_examples=30, deadline=None)
def test_two_sample_is_a_symmetric_bounded_metric(xs, ys):
    a, b = real_atoms(xs), real_atoms(ys)
    d = bk.ks_two_sample(a, b)
    assert 0 <= d <= 1
    assert d == bk.ks_two_sample(b, a)
    if sorted(xs) == sorted(ys):
        assert d == 0


# ---------------------------------------------------------------------------
# empirical Cauchy transform


def test_cauchy_exact_rational_values(legendre_op):
    assert bk.empirical_cauchy(Poly([0, 1]), 1, F(2)) == F(1, 2)
    assert bk.empirical_cauchy(Poly([-1, 0, 1]), 2, F(2)) == F(2, 3)
    p2 = bk.eigenpolynomial(legendre_op, 2)
    assert bk.empirical_cauchy(p2, 2, F(2)) == F(6, 11)


def test_cauchy_kind_follows_probe():
    p = Poly([-1, 0, 1])
    assert isinstance(bk.empirical_cauchy(p, 2, F(2)), F)
    z = gmpy2.mpc("1+1j", precision=128)
    v = bk.empirical_cauchy(p, 2, z)
    assert isinstance(v, gmpy2.mpc)
    # exact value at 1+i: C = x/(x^2-1) = (1+i)/(-1+2i)
    exact_re, exact_im = F(1, 5), F(-3, 5)
    assert abs(Fraction(*v.real.as_integer_ratio()) - exact_re) < F(1, 10**30)
    assert abs(Fraction(*v.imag.as_integer_ratio()) - exact_im) < F(1, 10**30)


def test_cauchy_probe_on_root_raises():
    with pytest.raises(ProbeTooCloseToRoot):
        bk.empirical_cauchy(Poly([-1, 0, 1]), 2, F(1))


def test_cauchy_distance_guard():
    p = Poly([-1, 0, 1])
    atoms = [gmpy2.mpc(-1, precision=64), gmpy2.mpc(1, precision=64)]
    with pytest.raises(ProbeTooCloseToRoot):
        bk.empirical_cauchy(p, 2, F(1001, 1000), atoms=atoms, eps_real=gmpy2.mpfr("0.01"))
    ok = bk.empirical_cauchy(p, 2, F(2), atoms=atoms, eps_real=gmpy2.mpfr("0.01"))
    assert ok == F(2, 3)
    with pytest.raises(ValueError):
        bk.empirical_cauchy(p, 2, F(2), atoms=atoms)


def test_cauchy_decays_like_one_over_x(legendre_op):
    p = bk.eigenpolynomial(legendre_op, 8)
    big = F(10**6)
    assert abs(bk.empirical_cauchy(p, 8, big) - 1 / big) < F(1, 10**15)


# ---------------------------------------------------------------------------
# Cauchy-power identity residual


def test_residual_exact_values(legendre_op, order4_op):
    assert bk.cauchy_power_residual(legendre_op, 2, F(2)) == F(13, 121)
    assert bk.cauchy_power_residual(order4_op, 2, F(2)) == F(2977, 14641)


def test_residual_shrinks_with_degree(legendre_op):
    r2 = bk.cauchy_power_residual(legendre_op, 2, F(2))
    r8 = bk.cauchy_power_residual(legendre_op, 8, F(2))
    r20 = bk.cauchy_power_residual(legendre_op, 20, F(2))
    assert r20 < r8 < r2


def test_residual_far_probe_is_tiny(legendre_op):
    assert bk.cauchy_power_residual(legendre_op, 10, F(10**6)) < F(1, 10**9)


def test_residual_needs_full_degree_leading_term(hermite_op):
    with pytest.raises(LeadingDegreeTooLow):
        bk.cauchy_power_residual(hermite_op, 5, F(2))


def test_residual_degenerate_pathways(degenerate_op):
    with pytest.raises(bk.DegenerateSpectrum):
        bk.cauchy_power_residual(degenerate_op, 3, F(7))
    val = bk.cauchy_power_residual(degenerate_op, 3, F(7), allow_degenerate=True)
    # p_3 = x^3 under the zero-fill convention, so C = 1/x exactly and
    # C^2 * a~_2 = x^-2 * x^2 = 1: the identity residual vanishes
    assert val == 0


def test_residual_mpfr_probe(legendre_op):
    x = gmpy2.mpfr(2, 192)
    v = bk.cauchy_power_residual(legendre_op, 2, x)
    assert abs(frac(v) - F(13, 121)) < F(1, 10**50)


# ---------------------------------------------------------------------------
# moments


def test_moment_zero_is_exactly_one():
    m = real_atoms([F(1, 3), 7])
    v = bk.moment(m, 0)
    assert v == 1


def test_moment_symmetric_pair():
    m = real_atoms([-1, 1])
    assert bk.moment(m, 1) == 0
    assert bk.moment(m, 2) == 1
    assert bk.moment(m, 3) == 0


def test_moment_matches_arcsine_limit():
    # arcsine([-1,1]) has m_2 = 1/2; Chebyshev nodes hit it exactly
    m = RootMeasure([gmpy2.mpc(x, precision=128) for x in chebyshev_nodes(50)])
    for k, want in ((2, F(1, 2)), (4, F(3, 8))):
        v = bk.moment(m, k)
        assert v.imag == 0
        assert abs(frac(v.real) - want) < F(1, 10**30)


def test_moment_rejects_negative_order():
    with pytest.raises(ValueError):
        bk.moment(real_atoms([1]), -1)


# ---------------------------------------------------------------------------
# growth exponent


def test_growth_exponent_recovers_pure_power_law():
    series = [(n, gmpy2.mpfr(3) * gmpy2.sqrt(gmpy2.mpfr(n))) for n in (10, 20, 40, 80, 160)]
    assert abs(bk.growth_exponent(series) - F(1, 2)) < 1e-9
    linear = [(n, gmpy2.mpfr(n)) for n in (5, 10, 15, 20, 25)]
    assert abs(bk.growth_exponent(linear) - 1) < 1e-9


def test_growth_exponent_constant_series_is_exactly_zero():
    series = [(n, gmpy2.mpfr("0.99")) for n in (10, 20, 40, 80, 160)]
    assert bk.growth_exponent(series) == 0


def test_growth_exponent_input_validation():
    good = [(n, gmpy2.mpfr(n)) for n in (1, 2, 3, 4)]
    with pytest.raises(ValueError):
        bk.growth_exponent(good)  # only 4 points
    with pytest.raises(ValueError):
        bk.growth_exponent([(1, 1), (2, 1), (2, 1), (3, 1), (4, 1)])
    with pytest.raises(ValueError):
        bk.growth_exponent([(1, 1), (2, 1), (3, 0), (4, 1), (5, 1)])


# ---------------------------------------------------------------------------
# rescaling


def test_rescale_divides_atoms():
    m = real_atoms([-2, 4])
    out = bk.rescale(m, gmpy2.mpfr(2))
    assert [z.real for z in out.atoms] == [-1, 2]
    with pytest.raises(ValueError):
        bk.rescale(m, gmpy2.mpfr(0))


def test_rescale_by_max_radius_lands_in_unit_disk(hermite_op):
    rs = bk.find_roots(bk.eigenpolynomial(hermite_op, 12), 20)
    m = bk.root_measure(rs)
    out = bk.rescale(m, bk.max_radius(rs))
    slack = gmpy2.mpfr(10) ** (-15)  # quotient rounding at the extreme atom
    assert all(abs(z) <= 1 + slack for z in out.atoms)
    assert any(abs(abs(z) - 1) < slack for z in out.atoms)


# ---------------------------------------------------------------------------
# CDF overlay serialization


def test_overlay_with_law(unit_law):
    m = real_atoms([F(-1, 2), 0, F(1, 2)])
    out = bk.cdf_overlay_csv(m, unit_law, 10)
    lines = out.splitlines()
    assert lines[0] == "x,F"
    assert len(lines) == 4
    x0, f0 = lines[2].split(",")
    assert float(x0) == 0
    assert abs(float(f0) - 0.5) < 1e-9


def test_overlay_without_law_uses_empirical_steps():
    m = real_atoms([1, 2, 3, 4])
    rows = bk.cdf_overlay_csv(m, None, 8).splitlines()[1:]
    fs = [float(r.split(",")[1]) for r in rows]
    assert fs == [0.25, 0.5, 0.75, 1.0]


def test_overlay_requires_real_atoms(unit_law):
    with pytest.raises(NonRealAtoms):
        bk.cdf_overlay_csv(RootMeasure([gmpy2.mpc("2j")]), unit_law, 8)
