"""Certified arbitrary-precision polynomial root finding.

The bridge from exact eigenpolynomials to root measures: an Aberth-Ehrlich
simultaneous iteration over gmpy2 complex floats, wrapped in a precision
ladder that starts at 128 bits and doubles until a Weierstrass-disk
certificate guarantees the requested number of correct digits per root
cluster.

Eigenpolynomial coefficients span hundreds of orders of magnitude and their
monic forms are exponentially small on the zero set, so no fixed precision
suffices; the ladder plus per-root noise-floor stopping (a root is done at
the current precision when its residual drops below the rounding-error
bound of the evaluation itself) keeps every level honest and warm-starts
the next.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from fractions import Fraction

import gmpy2

from .numeric import format_significant, prec_of
from .polycore import Poly

DEFAULT_PRECISION_CEILING = 1 << 16
PRECISION_CEILING_ENV = "BK_PRECISION_CEILING"

_START_PRECISION = 128
# Safety factor applied to the first-order Horner rounding-error bound; the
# bound itself is ~2*deg*u*sum|c_i||z|^i, see the _eval_with_noise comment.
_NOISE_SAFETY = 4


class NoConvergence(Exception):
    """The precision ladder exceeded its ceiling without certifying.

    Signals conditioning beyond the configured budget (for instance a very
    tight root cluster); raise the ceiling via the BK_PRECISION_CEILING
    environment variable or the precision_ceiling argument to retry.
    """

    def __init__(self, degree: int, ceiling: int, target_digits: int):
        self.degree = degree
        self.ceiling = ceiling
        self.target_digits = target_digits
        super().__init__(
            f"no certified convergence to {target_digits} digits for degree {degree} "
            f"within the {ceiling}-bit precision ceiling"
        )


@dataclass(frozen=True)
class RootSet:
    """All roots of one polynomial, with a certificate.

    Attributes
    ----------
    roots : tuple of mpc
        Root approximations sorted by (real, imaginary) part, one entry per
        degree (multiple roots appear as clusters of nearby entries).
    source_degree : int
        Degree of the input polynomial; always equals ``len(roots)``.
    precision : int
        Working precision in bits at which the ladder certified.
    residual_bound : mpfr
        Bound on max_i |p(alpha_i)| / ||p||, where ||p|| is the largest
        coefficient magnitude of the monic-normalized input.  It includes
        the evaluation rounding error and the first-order perturbation
        term that makes deg * residual_bound * ||p|| a coefficientwise
        bound for rebuilding the monic polynomial from the roots.
    real_flags : tuple of bool
        real_flags[i] true means |Im alpha_i| is within the realness
        tolerance in force when the flags were computed.
    target_digits : int
        Digits requested from :func:`find_roots`; also the significant
        digits used by the CSV serialization.
    certified_digits : tuple of int
        Per root, the number of correct digits implied by the Weierstrass
        disk certificate, relative to max(1, |alpha_i|).  Members of a
        multiple-root cluster honestly certify fewer digits.
    """

    roots: tuple
    source_degree: int
    precision: int
    residual_bound: object
    real_flags: tuple
    target_digits: int
    certified_digits: tuple

    def __len__(self) -> int:
        return self.source_degree

    def to_csv(self) -> str:
        """Serialize as CSV: index, re, im, real_flag, certified_digits.

        Decimal values carry target_digits significant digits; the header
        row is mandatory and indices are 0-based.
        """
        d = self.target_digits
        lines = ["index,re,im,real_flag,certified_digits"]
        for i, z in enumerate(self.roots):
            lines.append(
                f"{i},{format_significant(z.real, d)},{format_significant(z.imag, d)},"
                f"{'true' if self.real_flags[i] else 'false'},{self.certified_digits[i]}"
            )
        return "\n".join(lines) + "\n"


def _monic_fraction_coeffs(p: Poly) -> list[Fraction]:
    if p.is_zero or p.degree < 1:
        raise ValueError("find_roots needs a nonzero polynomial of degree >= 1")
    return list(p.monic().coeffs)


def _eval_with_noise(cs, acs, z, az):
    """Horner value of p at z plus a running bound scale sum |c_i| |z|^i.

    The first-order rounding error of the Horner loop at unit roundoff u is
    below 2*(deg+1)*u*S with S the returned scale; callers multiply in u
    and the safety factor.
    """
    v = cs[-1]
    s = acs[-1]
    for c, a in zip(reversed(cs[:-1]), reversed(acs[:-1])):
        v = v * z + c
        s = s * az + a
    return v, s


def _certify(cs, acs, z, u):
    """Weierstrass disk certificate for the current approximations.

    For monic p and pairwise distinct z_i, all roots of p lie in the union
    of disks D(z_i, deg * |p(z_i)| / prod_{j != i} |z_i - z_j|), and any
    connected component formed by m disks contains exactly m roots.  The
    numerator includes the evaluation-noise bound so the certificate stays
    valid when |p(z_i)| has bottomed out at rounding level.

    Returns (radii, digits, bound) where digits[i] counts certified digits
    of z_i relative to max(1, |z_i|) after merging overlapping disks into
    clusters, and bound dominates both max_i |p(z_i)| and the first-order
    coefficient perturbation max_i radius_i * ||p/(x - z_i)|| that controls
    rebuilding the monic polynomial from the roots.
    """
    n = len(z)
    deg = len(cs) - 1
    radii = []
    bound = gmpy2.mpfr(0)
    for i in range(n):
        v, s = _eval_with_noise(cs, acs, z[i], abs(z[i]))
        err = abs(v) + _NOISE_SAFETY * 2 * (deg + 1) * u * s
        q = gmpy2.mpfr(1)
        for j in range(n):
            if j != i:
                q = q * abs(z[i] - z[j])
        r = deg * err / q if q > 0 else gmpy2.inf()
        radii.append(r)
        # Synthetic division quotient p / (x - z_i): its coefficient norm
        # scales how much moving z_i by radius_i can move each coefficient.
        acc = cs[-1]
        subnorm = abs(acc)
        for k in range(deg - 1, 0, -1):
            acc = cs[k] + z[i] * acc
            a = abs(acc)
            if a > subnorm:
                subnorm = a
        bound = max(bound, err, r * subnorm)

    # Union-find over overlapping disks: clusters surface multiple roots.
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= radii[i] + radii[j]:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj

    members: dict[int, list[int]] = {}
    for i in range(n):
        members.setdefault(find(i), []).append(i)

    # An approximation that is exactly a root gets a zero-radius disk; cap
    # its claim at the decimal capacity of the working precision.
    cap = prec_of(z[0]) * 0.30103 if z else 0.0
    digits = [0.0] * n
    for group in members.values():
        for i in group:
            unc = radii[i]
            for j in group:
                if j != i:
                    unc = max(unc, abs(z[i] - z[j]) + radii[j])
            scale = max(gmpy2.mpfr(1), abs(z[i]))
            d = float(-gmpy2.log10(unc / scale)) if unc > 0 else cap
            digits[i] = min(d, cap)
    return radii, digits, bound


def find_roots(p: Poly, target_digits: int, precision_ceiling: int | None = None) -> RootSet:
    """Compute all complex roots of p with a target_digits certificate.

    Parameters
    ----------
    p : Poly
        Exact polynomial, nonzero, degree >= 1.  Roots are found for the
        monic normalization (same roots).
    target_digits : int
        Certified correct digits required for every root cluster.
    precision_ceiling : int, optional
        Ladder cap in bits.  Defaults to the BK_PRECISION_CEILING
        environment variable, else 65536.

    Returns
    -------
    RootSet
        Roots sorted by (real, imaginary) part with the certificate fields
        filled in; realness flags use scale max(1, max|root|).

    Raises
    ------
    NoConvergence
        If the ladder exceeds the ceiling before certifying.

    Notes
    -----
    Initial guesses are deterministic: points on the circle of radius equal
    to the Fujiwara root bound at angles 2*pi*j/deg + 0.4 radians, so runs
    are reproducible bit for bit at fixed precision.  Each level runs
    Gauss-Seidel Aberth-Ehrlich sweeps; a root freezes when its correction
    is at rounding level or its residual reaches the evaluation noise
    floor, and the certified-digit check decides whether the ladder stops.
    """
    if target_digits < 1:
        raise ValueError("target_digits must be positive")
    if precision_ceiling is None:
        precision_ceiling = int(
            os.environ.get(PRECISION_CEILING_ENV, DEFAULT_PRECISION_CEILING)
        )
    mon = _monic_fraction_coeffs(p)
    deg = len(mon) - 1

    prec = _START_PRECISION
    z: list | None = None
    while prec <= precision_ceiling:
        with gmpy2.context(precision=prec):
            z = _run_level(mon, deg, prec, z)
            u = gmpy2.mpfr(2) ** (-prec)
            cs = [gmpy2.mpc(gmpy2.mpfr(c, prec)) for c in mon]
            acs = [abs(c) for c in cs]
            radii, digits, bound = _certify(cs, acs, z, u)
            if min(digits) >= target_digits:
                return _build_rootset(mon, deg, prec, z, digits, bound, target_digits)
        prec *= 2
    raise NoConvergence(deg, precision_ceiling, target_digits)


def _run_level(mon, deg, prec, warm):
    """One ladder level: iterate until every root froze or sweeps ran out."""
    u = gmpy2.mpfr(2) ** (-prec)
    cs = [gmpy2.mpc(gmpy2.mpfr(c, prec)) for c in mon]
    acs = [abs(c) for c in cs]
    dcs = [cs[j] * j for j in range(1, deg + 1)]

    if warm is None:
        # Fujiwara bound: 2 * max_k |c_{deg-k}|^(1/k), constant term halved.
        R = gmpy2.mpfr(0)
        for k in range(1, deg + 1):
            a = acs[deg - k]
            if k == deg:
                a = a / 2
            if a > 0:
                r = gmpy2.exp(gmpy2.log(a) / k)
                if r > R:
                    R = r
        R = 2 * R
        if R == 0:
            R = gmpy2.mpfr(1)
        two_pi = 2 * gmpy2.const_pi(prec)
        off = gmpy2.mpfr(2) / 5
        z = [
            gmpy2.mpc(
                R * gmpy2.cos(two_pi * j / deg + off),
                R * gmpy2.sin(two_pi * j / deg + off),
            )
            for j in range(deg)
        ]
    else:
        z = [gmpy2.mpc(w, precision=prec) for w in warm]

    noise_factor = _NOISE_SAFETY * 2 * (deg + 1) * u
    corr_tol = 256 * u
    one = gmpy2.mpfr(1)
    frozen = [False] * deg
    max_sweeps = 4 * deg + 60
    for _ in range(max_sweeps):
        all_frozen = True
        for i in range(deg):
            if frozen[i]:
                continue
            zi = z[i]
            v, s = _eval_with_noise(cs, acs, zi, abs(zi))
            if abs(v) <= noise_factor * s:
                frozen[i] = True
                continue
            dv = dcs[-1]
            for c in reversed(dcs[:-1]):
                dv = dv * zi + c
            repel = gmpy2.mpc(0)
            for j in range(deg):
                if j != i:
                    d = zi - z[j]
                    if d != 0:
                        repel += 1 / d
            if dv != 0:
                newton = v / dv
                den = 1 - newton * repel
                w = newton / den if den != 0 else newton
            else:
                # At a critical point: nudge by the local root scale.
                w = gmpy2.mpc(gmpy2.exp(gmpy2.log(abs(v)) / deg))
            z[i] = zi - w
            if abs(w) <= corr_tol * max(one, abs(zi)):
                frozen[i] = True
            else:
                all_frozen = False
        if all_frozen:
            break
    return z


def _build_rootset(mon, deg, prec, z, digits, bound, target_digits):
    order = sorted(range(deg), key=lambda i: (z[i].real, z[i].imag))
    roots = tuple(z[i] for i in order)
    cert = tuple(int(digits[i]) for i in order)
    pnorm = max(abs(gmpy2.mpfr(c, prec)) for c in mon)
    residual_bound = bound / pnorm
    scale = max(gmpy2.mpfr(1), max(abs(w) for w in roots))
    eps = _realness_tolerance(scale, target_digits)
    flags = tuple(abs(w.imag) <= eps for w in roots)
    return RootSet(
        roots=roots,
        source_degree=deg,
        precision=prec,
        residual_bound=residual_bound,
        real_flags=flags,
        target_digits=target_digits,
        certified_digits=cert,
    )


def _realness_tolerance(scale, target_digits: int):
    """eps_real = scale * 10^(-target_digits/3), computed at 64-bit precision."""
    with gmpy2.context(precision=64):
        return gmpy2.mpfr(scale) * gmpy2.mpfr(10) ** (-gmpy2.mpfr(target_digits) / 3)


def realness(rs: RootSet, scale) -> RootSet:
    """Recompute real flags at tolerance scale * 10^(-target_digits/3).

    Returns a copy in which every flagged root has its imaginary part
    zeroed (the original is unmodified); unflagged roots are untouched.
    The flags feed the arcsine-law pathways, which require genuinely real
    atoms.
    """
    eps = _realness_tolerance(scale, rs.target_digits)
    flags = tuple(abs(z.imag) <= eps for z in rs.roots)
    prec = rs.precision
    zeroed = tuple(
        gmpy2.mpc(z.real, gmpy2.mpfr(0, prec), precision=prec) if f else z
        for z, f in zip(rs.roots, flags)
    )
    return replace(rs, roots=zeroed, real_flags=flags)


def max_radius(rs: RootSet):
    """max_i |alpha_i|, the radius of the smallest origin-centered disk."""
    if not rs.roots:
        raise ValueError("empty root set")
    with gmpy2.context(precision=rs.precision):
        return max(abs(z) for z in rs.roots)
