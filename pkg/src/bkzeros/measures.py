"""Root measures, the arcsine reference law, and convergence diagnostics.

A root measure places mass 1/n at each of the n roots of a polynomial.
This module quantifies how those measures behave as n grows: exact
Kolmogorov-Smirnov distance against the arcsine law (the universal limit
for compact-type systems), empirical Cauchy transforms and the residual of
the identity C(x)^N * a_N(x) = 1 (leading coefficient made monic), moment
diagnostics for possibly complex root sets, growth exponents separating
bounded from unbounded zero sets, and the rescaling used by the sweep
experiments.

Weak convergence itself is not directly testable; KS distance on the real
line plus moments up to a fixed order are the operational surrogates, and
every tolerance consuming them is calibrated empirically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import gmpy2

from .numeric import format_significant, prec_of
from .operator import DiffOperator, eigenpolynomial, validate
from .polycore import Poly
from .roots import RootSet


class NonRealAtoms(Exception):
    """A real-line diagnostic was asked of a measure with nonreal atoms."""


class ProbeTooCloseToRoot(Exception):
    """The Cauchy-transform probe point is on or too near a root."""


class LeadingDegreeTooLow(Exception):
    """The Cauchy-power identity needs deg a_N = N; this operator has less."""


class RootMeasure:
    """Normalized counting measure: mass 1/n at each of n atoms.

    Atoms are sorted by real part (ties by imaginary part) so the empirical
    CDF and every serialization are deterministic; total mass is exactly 1
    by construction.
    """

    __slots__ = ("atoms",)

    def __init__(self, atoms: Sequence):
        if not atoms:
            raise ValueError("a root measure needs at least one atom")
        zs = [z if isinstance(z, gmpy2.mpc) else gmpy2.mpc(z) for z in atoms]
        zs.sort(key=lambda z: (z.real, z.imag))
        object.__setattr__(self, "atoms", tuple(zs))

    def __setattr__(self, name, value):
        raise AttributeError("RootMeasure is immutable")

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def precision(self) -> int:
        return max(prec_of(z) for z in self.atoms)

    def real_atoms(self):
        """Real parts of the atoms, requiring every imaginary part to be zero.

        Atoms must come through the realness pathway first (flag + zeroing);
        a nonzero imaginary part here raises :class:`NonRealAtoms` rather
        than silently projecting.
        """
        for z in self.atoms:
            if z.imag != 0:
                raise NonRealAtoms(f"atom {z} has nonzero imaginary part")
        return [z.real for z in self.atoms]


def root_measure(rs: RootSet) -> RootMeasure:
    """The measure nu_n of a root set: mass 1/n at each root."""
    return RootMeasure(rs.roots)


@dataclass(frozen=True)
class ArcsineLaw:
    """The arcsine law on [a, b]: density 1/(pi*sqrt((b-x)(x-a))).

    The universal zero-distribution limit for compact-type systems; its CDF
    is (2/pi)*arcsin(sqrt((x-a)/(b-a))) on [a, b], clamped outside.
    """

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if not self.a < self.b:
            raise ValueError("arcsine law needs a < b")


def arcsine_cdf(law: ArcsineLaw, x):
    """CDF of the arcsine law at x, as an mpfr at x's precision (>= 64 bits)."""
    if isinstance(x, (int, Fraction)):
        prec = 64
        xv = gmpy2.mpfr(x, prec)
    else:
        prec = max(64, prec_of(x))
        xv = x
    with gmpy2.context(precision=prec):
        a = gmpy2.mpfr(law.a, prec)
        b = gmpy2.mpfr(law.b, prec)
        if xv <= a:
            return gmpy2.mpfr(0, prec)
        if xv >= b:
            return gmpy2.mpfr(1, prec)
        t = gmpy2.sqrt((xv - a) / (b - a))
        return 2 / gmpy2.const_pi(prec) * gmpy2.asin(t)


def ks_distance(m: RootMeasure, law: ArcsineLaw):
    """Exact KS statistic between the discrete measure and the continuous law.

    For sorted real atoms x_1 <= ... <= x_n this is
    max_i max(|i/n - F(x_i)|, |(i-1)/n - F(x_i)|), the supremum over the
    whole line of |F_emp - F|; it is always strictly positive for a finite
    atom set.  Raises :class:`NonRealAtoms` unless all imaginary parts are
    zero.
    """
    xs = m.real_atoms()
    n = len(xs)
    prec = m.precision
    with gmpy2.context(precision=prec):
        best = gmpy2.mpfr(0)
        for i, x in enumerate(xs, start=1):
            F = arcsine_cdf(law, gmpy2.mpfr(x, prec))
            hi = abs(gmpy2.mpfr(i) / n - F)
            lo = abs(gmpy2.mpfr(i - 1) / n - F)
            best = max(best, hi, lo)
        return best


def ks_two_sample(m1: RootMeasure, m2: RootMeasure) -> Fraction:
    """Exact two-sample KS distance between two real-atom measures.

    Both empirical CDFs are step functions with rational values, so the
    supremum gap is an exact Fraction evaluated at the pooled jump points
    (from the right and from the left).
    """
    import bisect

    xs = m1.real_atoms()
    ys = m2.real_atoms()
    n, m = len(xs), len(ys)
    best = Fraction(0)
    for v in sorted(set(xs) | set(ys)):
        right = abs(Fraction(bisect.bisect_right(xs, v), n) - Fraction(bisect.bisect_right(ys, v), m))
        left = abs(Fraction(bisect.bisect_left(xs, v), n) - Fraction(bisect.bisect_left(ys, v), m))
        best = max(best, right, left)
    return best


def empirical_cauchy(p: Poly, n: int, x, atoms: Optional[Sequence] = None, eps_real=None):
    """Cauchy transform of the root measure of p: C_n(x) = p'(x) / (n * p(x)).

    The result kind follows x: exact Fraction for rational probes, mpc at
    the probe's precision otherwise.  A probe exactly on a root raises
    :class:`ProbeTooCloseToRoot`; when the roots are available, pass them
    as ``atoms`` together with ``eps_real`` to also enforce the distance
    guard |x - alpha| >= 10 * eps_real for every atom.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if atoms is not None:
        if eps_real is None:
            raise ValueError("atoms given without eps_real")
        guard = _probe_distance_ok(x, atoms, eps_real)
        if not guard:
            raise ProbeTooCloseToRoot(f"probe {x} within 10*eps_real of a root")
    if isinstance(x, (int, Fraction)):
        xq = Fraction(x)
        pv = p.evaluate(xq)
        if pv == 0:
            raise ProbeTooCloseToRoot(f"probe {x} is a root")
        return p.derivative().evaluate(xq) / (n * pv)
    prec = prec_of(x)
    pv = p.evaluate(x)
    if pv == 0:
        raise ProbeTooCloseToRoot(f"probe {x} is a root to working precision")
    with gmpy2.context(precision=prec):
        return p.derivative().evaluate(x) / (n * pv)


def _probe_distance_ok(x, atoms, eps_real) -> bool:
    prec = prec_of(x) if isinstance(x, (gmpy2.mpfr, gmpy2.mpc)) else 64
    with gmpy2.context(precision=prec):
        xv = x if isinstance(x, gmpy2.mpc) else gmpy2.mpc(gmpy2.mpfr(x, prec))
        limit = 10 * gmpy2.mpfr(eps_real)
        return all(abs(xv - z) >= limit for z in atoms)


def cauchy_power_residual(op: DiffOperator, n: int, x, allow_degenerate: bool = False):
    """|C_n(x)^N * a~_N(x) - 1| with a~_N the monic-normalized leading term.

    The identity C(x)^N = 1/a_N(x) holds in the limit for operators with
    deg a_N = N; this evaluates the branch-free product form at one probe
    and should tend to 0 as n grows, for x away from the root support.
    Exact rational probes give an exact rational residual.

    Raises :class:`LeadingDegreeTooLow` when deg a_N < N; propagates
    DegenerateSpectrum from the eigenpolynomial solve and
    ProbeTooCloseToRoot from the transform.
    """
    if n < 1:
        raise ValueError("n must be positive")
    report = validate(op)
    if not report.spectral_growth:
        raise LeadingDegreeTooLow(
            f"deg a_N = {op.leading.degree} < N = {op.order}"
        )
    # a_N may carry any constant factor without changing the operator's
    # eigenfunctions' zeros; the identity holds for the monic normalization
    a_monic = op.leading.monic()
    p = eigenpolynomial(op, n, allow_degenerate)
    C = empirical_cauchy(p, n, x)
    if isinstance(x, (int, Fraction)):
        return abs(C ** op.order * a_monic.evaluate(Fraction(x)) - 1)
    prec = prec_of(x)
    with gmpy2.context(precision=prec):
        return abs(C ** op.order * a_monic.evaluate(x) - 1)


def moment(m: RootMeasure, k: int):
    """k-th moment (1/n) * sum alpha_i^k, as an mpc at the atoms' precision."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    prec = m.precision
    with gmpy2.context(precision=prec):
        if k == 0:
            return gmpy2.mpc(1)
        acc = gmpy2.mpc(0)
        for z in m.atoms:
            acc += z**k
        return acc / len(m.atoms)


def growth_exponent(series: Sequence[tuple[int, object]]):
    """Least-squares slope of log(max_radius) against log(n).

    Near 0 indicates a bounded zero set (deg a_N = N), markedly positive
    indicates growth (deg a_N < N).  Needs at least 5 points with strictly
    increasing n; an all-equal radius series is a degenerate fit and
    returns exactly 0.
    """
    pts = list(series)
    if len(pts) < 5:
        raise ValueError("growth_exponent needs at least 5 points")
    ns = [p[0] for p in pts]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n values must be strictly increasing")
    radii = [p[1] for p in pts]
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    if all(r == radii[0] for r in radii):
        return gmpy2.mpfr(0)
    import math

    lx = [math.log(n) for n in ns]
    ly = [math.log(float(r)) for r in radii]
    mx = sum(lx) / len(lx)
    my = sum(ly) / len(ly)
    num = sum((u - mx) * (v - my) for u, v in zip(lx, ly))
    den = sum((u - mx) ** 2 for u in lx)
    return gmpy2.mpfr(num / den)


def rescale(m: RootMeasure, s) -> RootMeasure:
    """Divide every atom by s > 0; mass is unchanged.

    The sweep experiments rescale each nu_n by its own max_radius so that
    unbounded families become comparable across n.
    """
    with gmpy2.context(precision=m.precision):
        sv = gmpy2.mpfr(s) if not isinstance(s, gmpy2.mpfr) else s
        if not sv > 0:
            raise ValueError("rescale factor must be positive")
        return RootMeasure([z / sv for z in m.atoms])


def cdf_overlay_csv(m: RootMeasure, law: Optional[ArcsineLaw], digits: int) -> str:
    """Two-column CSV (x, F) for plotting against the empirical CDF.

    x runs over the sorted real atoms; F is the law's CDF at x when a law
    is given, else the empirical CDF value i/n (the law column is what gets
    overlaid on the empirical steps, which are implied by the row index).
    """
    xs = m.real_atoms()
    n = len(xs)
    lines = ["x,F"]
    for i, x in enumerate(xs, start=1):
        if law is not None:
            F = arcsine_cdf(law, x)
        else:
            F = gmpy2.mpfr(i) / n
        lines.append(f"{format_significant(x, digits)},{format_significant(F, digits)}")
    return "\n".join(lines) + "\n"
