"""Classical orthogonal polynomial systems and moment-functional oracles.

This module is the independent cross-check side of the package: monic
classical families built from their three-term recurrences, exact moment
functionals with Gram-Schmidt orthogonalization, and the catalog of
second-order operators whose eigenpolynomials are those families.  Nothing
here goes through the eigenpolynomial solver, which is exactly what makes
the agreement tests between the two routes meaningful.

All arithmetic is exact.  Families whose weight moments are not rational
(after normalizing away a common transcendental factor, e.g. the pi in the
Chebyshev weight) are validated through the recurrence route instead of the
moment route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .operator import DiffOperator, apply, eigenpolynomial, eigenvalue
from .polycore import Poly, format_rational, parse_rational

_FAMILY_NAMES = ("legendre", "hermite", "laguerre", "chebyshev1", "chebyshev2", "jacobi")

# Families orthogonal w.r.t. a compactly supported positive measure; the
# arcsine-law pathways only apply to these.
_COMPACT = {"legendre", "chebyshev1", "chebyshev2", "jacobi"}


class BadParameters(ValueError):
    """Family name or parameters outside the validity range."""


class InsufficientMoments(Exception):
    """The moment prefix is too short for the requested inner product."""


class NotPositiveDefinite(Exception):
    """Gram-Schmidt hit a nonpositive squared norm; carries the first failing order."""

    def __init__(self, order: int):
        self.order = order
        super().__init__(f"moment functional not positive definite at order {order}")


@dataclass(frozen=True)
class Family:
    """A classical family tag with its parameters (exact rationals)."""

    name: str
    alpha: Optional[Fraction] = None
    beta: Optional[Fraction] = None

    def __post_init__(self):
        if self.name not in _FAMILY_NAMES:
            raise BadParameters(f"unknown family {self.name!r}; expected one of {_FAMILY_NAMES}")
        if self.name == "jacobi":
            if self.alpha is None or self.beta is None:
                raise BadParameters("jacobi requires alpha and beta")
            if self.alpha <= -1 or self.beta <= -1:
                raise BadParameters("jacobi requires alpha > -1 and beta > -1")
        elif self.name == "laguerre":
            if self.alpha is None:
                object.__setattr__(self, "alpha", Fraction(0))
            if self.alpha <= -1:
                raise BadParameters("laguerre requires alpha > -1")
            if self.beta is not None:
                raise BadParameters("laguerre takes no beta")
        else:
            if self.alpha is not None or self.beta is not None:
                raise BadParameters(f"{self.name} takes no parameters")

    @property
    def compact(self) -> bool:
        """True when the orthogonality measure has compact support."""
        return self.name in _COMPACT

    def spec(self) -> str:
        """Canonical CLI spelling, e.g. "jacobi:alpha=1,beta=2"."""
        if self.name == "jacobi":
            return (
                f"jacobi:alpha={format_rational(self.alpha)},"
                f"beta={format_rational(self.beta)}"
            )
        if self.name == "laguerre":
            return f"laguerre:alpha={format_rational(self.alpha)}"
        return self.name


def parse_family(text: str) -> Family:
    """Parse a family spec like "legendre" or "jacobi:alpha=1,beta=2".

    Parameter values are exact rationals ("1/2" is fine).  Unknown names,
    unknown keys, and out-of-range parameters raise :class:`BadParameters`.
    """
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    params: dict[str, Fraction] = {}
    if rest:
        for piece in rest.split(","):
            key, eq, val = piece.partition("=")
            key = key.strip().lower()
            if not eq or key not in ("alpha", "beta"):
                raise BadParameters(f"bad family parameter {piece!r}")
            try:
                params[key] = parse_rational(val.strip())
            except ValueError as e:
                raise BadParameters(f"bad family parameter {piece!r}: {e}") from None
    try:
        return Family(name, params.get("alpha"), params.get("beta"))
    except BadParameters:
        raise
    except ValueError as e:
        raise BadParameters(str(e)) from None


class RecurrenceOPS:
    """Monic polynomials of one family via p_{n+1} = (x - A_n) p_n - B_n p_{n-1}.

    The cache grows on demand and existing entries are never mutated.
    B_n > 0 for n >= 1 in every family with parameters in range, which is
    equivalent to positive-definiteness of the underlying functional.
    """

    def __init__(self, family: Family):
        self.family = family
        self._polys: list[Poly] = [Poly.constant(1)]

    def coefficients(self, n: int) -> tuple[Fraction, Fraction]:
        """Recurrence pair (A_n, B_n); B_0 is conventionally 0."""
        f = self.family
        a, b = f.alpha, f.beta
        if f.name == "legendre":
            return Fraction(0), Fraction(n * n, 4 * n * n - 1) if n >= 1 else Fraction(0)
        if f.name == "chebyshev1":
            if n == 0:
                return Fraction(0), Fraction(0)
            return Fraction(0), Fraction(1, 2) if n == 1 else Fraction(1, 4)
        if f.name == "chebyshev2":
            return Fraction(0), Fraction(1, 4) if n >= 1 else Fraction(0)
        if f.name == "hermite":
            return Fraction(0), Fraction(n)
        if f.name == "laguerre":
            return 2 * n + a + 1, n * (n + a) if n >= 1 else Fraction(0)
        # jacobi; the n = 0 and n = 1 forms are the limits of the general
        # ones, written without the removable 0/0 at alpha + beta in {0, -1}
        if n == 0:
            A = (b - a) / (a + b + 2)
            return A, Fraction(0)
        s = a + b
        A = (b - a) * (b + a) / ((2 * n + s) * (2 * n + s + 2))
        if n == 1:
            B = 4 * (1 + a) * (1 + b) / ((2 + s) ** 2 * (3 + s))
        else:
            B = (
                4 * n * (n + a) * (n + b) * (n + s)
                / ((2 * n + s - 1) * (2 * n + s) ** 2 * (2 * n + s + 1))
            )
        return A, B

    def poly(self, n: int) -> Poly:
        """Monic degree-n member of the family."""
        if n < 0:
            raise ValueError("degree must be nonnegative")
        x = Poly.x()
        while len(self._polys) <= n:
            m = len(self._polys) - 1
            A, B = self.coefficients(m)
            p = (x - Poly.constant(A)) * self._polys[m]
            if m >= 1:
                p = p - B * self._polys[m - 1]
            self._polys.append(p)
        return self._polys[n]


_OPS_CACHE: dict[Family, RecurrenceOPS] = {}


def classical_monic(family: Family, n: int) -> Poly:
    """Monic orthogonal polynomial of degree n for the family's weight."""
    ops = _OPS_CACHE.get(family)
    if ops is None:
        ops = _OPS_CACHE[family] = RecurrenceOPS(family)
    return ops.poly(n)


def bochner_operator(family: Family) -> DiffOperator:
    """The classical second-order operator with the family as eigenpolynomials.

    Normalization fixes a_2 as the monic weight polynomial up to sign:
    1 for Hermite, 1 - x^2 for the interval families, x for Laguerre.
    Chebyshev-2 is not in the catalog; use jacobi:alpha=1/2,beta=1/2.
    """
    name, a, b = family.name, family.alpha, family.beta
    if name == "hermite":
        return DiffOperator({2: Poly.constant(1), 1: Poly((0, -1))})
    if name == "legendre":
        return DiffOperator({2: Poly((1, 0, -1)), 1: Poly((0, -2))})
    if name == "jacobi":
        return DiffOperator({2: Poly((1, 0, -1)), 1: Poly((b - a, -(a + b + 2)))})
    if name == "laguerre":
        return DiffOperator({2: Poly((0, 1)), 1: Poly((a + 1, -1))})
    if name == "chebyshev1":
        return DiffOperator({2: Poly((1, 0, -1)), 1: Poly((0, -1))})
    raise BadParameters(
        f"no catalog operator for {name!r}; supported: jacobi, legendre, hermite, "
        "laguerre, chebyshev1 (chebyshev2 = jacobi:alpha=1/2,beta=1/2)"
    )


class MomentFunctional:
    """A linear functional on polynomials given by its moment prefix m_0, m_1, ...

    Immutable.  Positive-definiteness (all leading Hankel determinants
    positive) is checked lazily by :func:`gram_schmidt_ops`, whose squared
    norms are exactly the Hankel determinant ratios.
    """

    __slots__ = ("moments",)

    def __init__(self, moments):
        ms = tuple(Fraction(m) if isinstance(m, int) else m for m in moments)
        for m in ms:
            if not isinstance(m, Fraction):
                raise TypeError("moments must be int or Fraction")
        object.__setattr__(self, "moments", ms)

    def __setattr__(self, name, value):
        raise AttributeError("MomentFunctional is immutable")

    def __len__(self) -> int:
        return len(self.moments)

    def __eq__(self, other) -> bool:
        return isinstance(other, MomentFunctional) and self.moments == other.moments

    def __hash__(self) -> int:
        return hash(self.moments)

    def __repr__(self) -> str:
        shown = ", ".join(format_rational(m) for m in self.moments[:6])
        tail = ", ..." if len(self.moments) > 6 else ""
        return f"MomentFunctional([{shown}{tail}])"

    @classmethod
    def from_json_dict(cls, obj) -> "MomentFunctional":
        """Parse {"moments": ["2", "0", "2/3", ...]}; unknown fields rejected."""
        if not isinstance(obj, dict):
            raise ValueError("moment spec must be a JSON object")
        unknown = set(obj) - {"moments"}
        if unknown:
            raise ValueError(f"unknown field(s) in moment spec: {sorted(unknown)}")
        if "moments" not in obj or not isinstance(obj["moments"], list):
            raise ValueError('moment spec needs a "moments" array')
        return cls(parse_rational(s) for s in obj["moments"])

    def to_json_dict(self) -> dict:
        return {"moments": [format_rational(m) for m in self.moments]}

    # -- catalog weights with exact rational moments -----------------------

    @classmethod
    def uniform(cls, length: int) -> "MomentFunctional":
        """Lebesgue measure on [-1, 1]: m_k = 2/(k+1) for even k, else 0."""
        return cls(
            Fraction(2, k + 1) if k % 2 == 0 else Fraction(0) for k in range(length)
        )

    @classmethod
    def chebyshev1(cls, length: int) -> "MomentFunctional":
        """Weight (1-x^2)^(-1/2) on [-1, 1], divided by its mass pi.

        The pi factor cancels in monic Gram-Schmidt, so these rational
        moments generate the same monic system as the true weight:
        m_{2j} = C(2j, j) / 4^j.
        """
        return cls(
            Fraction(math.comb(k, k // 2), 4 ** (k // 2)) if k % 2 == 0 else Fraction(0)
            for k in range(length)
        )

    @classmethod
    def hermite(cls, length: int) -> "MomentFunctional":
        """Standard Gaussian weight e^(-x^2/2), mass-normalized: m_{2j} = (2j-1)!!."""
        ms = []
        for k in range(length):
            if k % 2:
                ms.append(Fraction(0))
            else:
                j = k // 2
                ms.append(Fraction(math.factorial(k), 2**j * math.factorial(j)))
        return cls(ms)

    @classmethod
    def laguerre(cls, alpha: Fraction, length: int) -> "MomentFunctional":
        """Weight x^alpha e^(-x) on (0, inf), mass-normalized: m_k = (alpha+1)...(alpha+k)."""
        if alpha <= -1:
            raise BadParameters("laguerre requires alpha > -1")
        ms = [Fraction(1)]
        for k in range(1, length):
            ms.append(ms[-1] * (alpha + k))
        return cls(ms)

    @classmethod
    def jacobi(cls, alpha: int, beta: int, length: int) -> "MomentFunctional":
        """Weight (1-x)^alpha (1+x)^beta on [-1, 1] for nonnegative integers.

        Integer exponents keep every moment rational (binomial expansion of
        the weight against monomial integrals); other parameters must be
        validated through the recurrence route instead.
        """
        if not (isinstance(alpha, int) and isinstance(beta, int)) or alpha < 0 or beta < 0:
            raise BadParameters("rational-moment jacobi oracle needs integer alpha, beta >= 0")
        ms = []
        for k in range(length):
            m = Fraction(0)
            for i in range(alpha + 1):
                ci = math.comb(alpha, i) * (-1) ** i
                for j in range(beta + 1):
                    e = k + i + j
                    if e % 2 == 0:
                        m += Fraction(2 * ci * math.comb(beta, j), e + 1)
            ms.append(m)
        return cls(ms)


def inner_product(sigma: MomentFunctional, p: Poly, q: Poly) -> Fraction:
    """Exact <p, q> = sigma(p*q), the linear extension of sigma to the product."""
    prod = p * q
    if prod.is_zero:
        return Fraction(0)
    if prod.degree >= len(sigma.moments):
        raise InsufficientMoments(
            f"need moment m_{prod.degree} but only {len(sigma.moments)} moments given"
        )
    return sum(
        (c * sigma.moments[k] for k, c in enumerate(prod.coeffs) if c), Fraction(0)
    )


def gram_schmidt_ops(sigma: MomentFunctional, n: int) -> list[Poly]:
    """Monic p_0..p_n with <p_i, p_j> = 0 exactly for i != j.

    The squared norms <p_j, p_j> equal the Hankel determinant ratios
    det H_{j+1} / det H_j, so a nonpositive norm pinpoints the first order
    at which positive-definiteness fails.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    polys: list[Poly] = []
    norms: list[Fraction] = []
    for j in range(n + 1):
        p = Poly.monomial(j)
        for i in range(j):
            coeff = inner_product(sigma, p, polys[i]) / norms[i]
            if coeff:
                p = p - coeff * polys[i]
        nrm = inner_product(sigma, p, p)
        if nrm <= 0:
            raise NotPositiveDefinite(j)
        polys.append(p)
        norms.append(nrm)
    return polys


def hankel_determinant(sigma: MomentFunctional, k: int) -> Fraction:
    """det(m_{i+j}) for i, j = 0..k; the diagnostic behind positive-definiteness."""
    size = k + 1
    if 2 * k >= len(sigma.moments):
        raise InsufficientMoments(
            f"need moment m_{2*k} but only {len(sigma.moments)} moments given"
        )
    mat = [[sigma.moments[i + j] for j in range(size)] for i in range(size)]
    det = Fraction(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if mat[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            mat[col], mat[pivot] = mat[pivot], mat[col]
            det = -det
        det *= mat[col][col]
        inv = 1 / mat[col][col]
        for r in range(col + 1, size):
            factor = mat[r][col] * inv
            if factor:
                for c in range(col, size):
                    mat[r][c] -= factor * mat[col][c]
    return det


def example_operator_path(name: str):
    """Filesystem path of a packaged example operator JSON.

    Available names: "legendre_squared_order4" (an order-4 operator with
    leading coefficient (x^2 - 1)^2 whose eigenpolynomials are the monic
    Legendre polynomials, eigenvalues n^2 (n+1)^2) and
    "degenerate_spectrum" (a_2 = x^2, a_1 = -3x, whose eigenvalues
    j^2 - 4j collide in pairs and exercise the degeneracy reporting).
    """
    from importlib.resources import files

    p = files(__package__) / "data" / f"{name}.json"
    if not p.is_file():
        raise ValueError(f"no packaged example operator named {name!r}")
    return p


def verify_bks(op: DiffOperator, sigma: MomentFunctional, n_max: int) -> None:
    """Check that op's eigenpolynomials form an OPS for sigma, exactly.

    Intended for user-supplied operator files (e.g. order-4 specs), whose
    coefficients must be verified at load rather than trusted: re-checks
    the eigen-relation through apply() and full pairwise orthogonality
    against the moment functional.  Raises ValueError on the first failure.
    """
    polys = []
    for n in range(n_max + 1):
        p = eigenpolynomial(op, n)
        if apply(op, p) != eigenvalue(op, n) * p:
            raise ValueError(f"eigen-relation fails at n={n}")
        polys.append(p)
    for i in range(n_max + 1):
        for j in range(i):
            if inner_product(sigma, polys[i], polys[j]) != 0:
                raise ValueError(f"orthogonality fails at pair ({i}, {j})")
        if inner_product(sigma, polys[i], polys[i]) <= 0:
            raise ValueError(f"nonpositive norm at n={i}")
