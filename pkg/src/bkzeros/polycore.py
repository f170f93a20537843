"""Exact univariate polynomial arithmetic over the rationals.

Coefficients are ``fractions.Fraction`` values, which are always stored in
lowest terms with a positive denominator, so every ring operation here is
exact: no rounding ever happens in the symbolic pipeline.  Floating-point
enters only through :meth:`Poly.evaluate` on an ``mpfr``/``mpc`` argument,
and even there the result is computed exactly first and rounded once.

Polynomials are immutable and safe to share between threads or processes.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Union

import gmpy2

from .numeric import prec_of

#: Exact rational scalar type used for every coefficient.
Rat = Fraction

_RAT_RE = re.compile(r"^-?\d+(/\d+)?$")


def parse_rational(s: str) -> Fraction:
    """Parse an exact rational from an integer literal or a "p/q" string.

    Only the two serialized forms are accepted ("-3", "5/7"); decimal
    points, exponents, and signs on the denominator are rejected so that
    malformed input fails loudly instead of being silently rounded.
    """
    if not isinstance(s, str) or not _RAT_RE.match(s):
        raise ValueError(f"not an exact rational literal: {s!r}")
    if "/" in s and int(s.split("/")[1]) == 0:
        raise ValueError(f"zero denominator: {s!r}")
    return Fraction(s)


def format_rational(q: Fraction) -> str:
    """Serialize a rational as an integer literal or "p/q"."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _as_rational(c) -> Fraction:
    """Coerce a coefficient to Fraction, rejecting floats to stay exact."""
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"coefficient must be int or Fraction, got {type(c).__name__}")


class Poly:
    """Dense univariate polynomial with exact rational coefficients.

    Coefficients are kept in ascending degree order with trailing zeros
    trimmed, so the leading coefficient of a nonzero polynomial is never
    zero.  The zero polynomial has an empty coefficient tuple and degree
    ``None`` (a distinct value, never -1 or 0).
    """

    __slots__ = ("coeffs",)

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable[Union[int, Fraction]] = ()):
        cs = [_as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def x(cls) -> "Poly":
        """The monomial x."""
        return cls((0, 1))

    @classmethod
    def constant(cls, c: Union[int, Fraction]) -> "Poly":
        """The constant polynomial c."""
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c: Union[int, Fraction] = 1) -> "Poly":
        """The monomial c * x^k."""
        if k < 0:
            raise ValueError("monomial degree must be nonnegative")
        return cls((0,) * k + (c,))

    @classmethod
    def from_coeff_strings(cls, items: Iterable[str]) -> "Poly":
        """Deserialize from a JSON array of coefficient strings.

        The wire format is ascending degree order, each entry an integer
        literal or "p/q" (e.g. ["-1/3", "0", "1"] for x^2 - 1/3).
        """
        return cls(parse_rational(s) for s in items)

    def to_coeff_strings(self) -> list[str]:
        """Serialize to the JSON wire format (ascending coefficient strings)."""
        return [format_rational(c) for c in self.coeffs]

    # -- structure -------------------------------------------------------

    @property
    def degree(self) -> int | None:
        """Degree of the polynomial; ``None`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading_coefficient(self) -> Fraction:
        """Leading coefficient; raises on the zero polynomial."""
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def coefficient(self, k: int) -> Fraction:
        """Coefficient of x^k (zero beyond the degree)."""
        if k < 0:
            raise ValueError("negative degree")
        return self.coeffs[k] if k < len(self.coeffs) else Fraction(0)

    def monic(self) -> "Poly":
        """This polynomial divided by its leading coefficient."""
        lc = self.leading_coefficient
        if lc == 1:
            return self
        return Poly(c / lc for c in self.coeffs)

    # -- ring operations (all exact) --------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly(c * other for c in self.coeffs)
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    # -- calculus ----------------------------------------------------------

    def derivative(self, j: int = 1) -> "Poly":
        """Exact j-th derivative; the zero polynomial when j exceeds the degree."""
        if j < 0:
            raise ValueError("derivative order must be nonnegative")
        cs = self.coeffs
        for _ in range(j):
            if len(cs) <= 1:
                return Poly()
            cs = tuple(cs[k] * k for k in range(1, len(cs)))
        return Poly(cs)

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, x):
        """Evaluate by Horner's rule; the result kind follows the argument.

        Exact ``Fraction`` in, exact ``Fraction`` out.  For ``mpfr``/``mpc``
        arguments the value is computed exactly (every mpfr is a dyadic
        rational) and then rounded once to the argument's precision, so the
        result is correctly rounded at that precision.
        """
        if isinstance(x, (int, Fraction)):
            return self._horner_exact(Fraction(x))
        if isinstance(x, gmpy2.mpfr):
            prec = prec_of(x)
            num, den = x.as_integer_ratio()
            v = self._horner_exact(Fraction(int(num), int(den)))
            return gmpy2.mpfr(v, prec)
        if isinstance(x, gmpy2.mpc):
            prec = prec_of(x)
            rn, rd = x.real.as_integer_ratio()
            im, idn = x.imag.as_integer_ratio()
            re, ie = self._horner_complex(
                Fraction(int(rn), int(rd)), Fraction(int(im), int(idn))
            )
            return gmpy2.mpc(gmpy2.mpfr(re, prec), gmpy2.mpfr(ie, prec), precision=prec)
        raise TypeError(f"cannot evaluate at {type(x).__name__}")

    def _horner_exact(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def _horner_complex(self, re: Fraction, im: Fraction) -> tuple[Fraction, Fraction]:
        ar, ai = Fraction(0), Fraction(0)
        for c in reversed(self.coeffs):
            ar, ai = ar * re - ai * im + c, ar * im + ai * re
        return ar, ai

    # -- display ----------------------------------------------------------

    def __str__(self) -> str:
        """Human-readable form in descending powers, e.g. "x^3 - 3*x"."""
        if self.is_zero:
            return "0"
        parts: list[str] = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mag = abs(c)
            if k == 0:
                body = format_rational(mag)
            else:
                xk = "x" if k == 1 else f"x^{k}"
                body = xk if mag == 1 else f"{format_rational(mag)}*{xk}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)!r})"


def falling_factorial(n: int, k: int) -> int:
    """n(n-1)...(n-k+1), the factor multiplying c_k in the eigenvalue formula.

    Returns 0 when k > n and 1 when k = 0 (the empty product).
    """
    if n < 0 or k < 0:
        raise ValueError("falling_factorial requires nonnegative arguments")
    if k > n:
        return 0
    out = 1
    for t in range(n - k + 1, n + 1):
        out *= t
    return out
