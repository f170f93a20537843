"""Arbitrary-precision helpers shared by the numeric modules.

Values are gmpy2 ``mpfr``/``mpc`` objects, which carry their precision in
bits.  Arithmetic precision in gmpy2 is taken from the active context, not
from the operands, so every computation in this package runs inside an
explicit ``gmpy2.context`` block.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2

# log2(10), rounded up at the 4th decimal; used to convert digit targets
# into bit budgets.
_LOG2_10 = 3.3220


def bits_for_digits(digits: int) -> int:
    """Bits needed to represent `digits` decimal digits, plus guard room."""
    return int(digits * _LOG2_10) + 16


def prec_of(x) -> int:
    """Precision in bits carried by an mpfr or mpc value."""
    p = x.precision
    if isinstance(p, tuple):  # mpc reports (real_prec, imag_prec)
        return max(p)
    return int(p)


def to_mpfr(q: Fraction | int, prec: int) -> "gmpy2.mpfr":
    """Round an exact rational to an mpfr of the given precision."""
    return gmpy2.mpfr(q, prec)


def mpfr_to_fraction(x) -> Fraction:
    """Exact rational value of a finite mpfr (every mpfr is dyadic)."""
    num, den = x.as_integer_ratio()
    return Fraction(int(num), int(den))


def format_significant(x, digits: int) -> str:
    """Deterministic decimal string with `digits` significant digits.

    gmpy2's ``__format__`` does not accept the standard float format
    language, so the string is assembled from ``mpfr.digits``.  Exact zero
    prints as "0"; moderate exponents print in positional form, everything
    else in scientific form.
    """
    x = gmpy2.mpfr(x) if not isinstance(x, gmpy2.mpfr) else x
    if gmpy2.is_nan(x):
        return "nan"
    if gmpy2.is_infinite(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    mant, exp, _ = x.digits(10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    # mant is `digits` digits of 0.mant * 10^exp
    if -4 < exp <= digits:
        if exp <= 0:
            body = "0." + "0" * (-exp) + mant
        elif exp >= len(mant):
            body = mant + "0" * (exp - len(mant))
        else:
            body = mant[:exp] + "." + mant[exp:]
        return sign + body
    return f"{sign}{mant[0]}.{mant[1:]}e{exp - 1:+03d}"
