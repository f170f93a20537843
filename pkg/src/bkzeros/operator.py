"""Finite-order differential operators and their monic eigenpolynomials.

An operator is a sum  d = sum_{k=1}^{N} a_k(x) d^k/dx^k  with polynomial
coefficients a_k.  It is Bochner-admissible when deg a_k <= k for every k,
with equality for at least one k; admissibility makes the operator lower
triangular in the monomial basis (descending degree), with diagonal entry
lambda_j on x^j, which is what the eigenpolynomial solver exploits.

All algebra in this module is exact rational arithmetic: uniqueness of the
monic eigenpolynomial is an exact statement, and floats would mask the
spectral degeneracies this module is required to detect and report.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Union

from .polycore import Poly, falling_factorial


class InadmissibleOperator(ValueError):
    """Operation requires a Bochner-admissible operator but got one that is not."""


class DegenerateSpectrum(Exception):
    """The eigenvalue lambda_n collides with lambda_j for some j < n.

    Every colliding index makes the corresponding equation of the triangular
    solve either inconsistent (no eigenpolynomial of degree n exists) or
    underdetermined (the x^j coefficient is free).  ``conflicting_indices``
    carries all such j; the inconsistent/free split is preserved for
    diagnostics.  Indices are classified along the minimal-representative
    path that resolves each free coordinate to 0.
    """

    def __init__(self, n: int, inconsistent: Iterable[int], free: Iterable[int]):
        self.n = n
        self.inconsistent_indices = tuple(sorted(inconsistent))
        self.free_indices = tuple(sorted(free))
        self.conflicting_indices = tuple(
            sorted({*self.inconsistent_indices, *self.free_indices})
        )
        detail = []
        if self.inconsistent_indices:
            detail.append(f"inconsistent at {list(self.inconsistent_indices)}")
        if self.free_indices:
            detail.append(f"underdetermined at {list(self.free_indices)}")
        super().__init__(
            f"degenerate spectrum for n={n}: "
            f"conflicting indices {list(self.conflicting_indices)} ({'; '.join(detail)})"
        )


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the Bochner admissibility check.

    ``violations`` lists (k, deg a_k) pairs with deg a_k > k;
    ``has_equality_k`` lists every k with deg a_k = k; ``spectral_growth``
    is true iff the top coefficient c_N is nonzero (deg a_N = N), the case
    with polynomially growing |lambda_n| and bounded zero sets.
    """

    admissible: bool
    violations: tuple[tuple[int, int], ...]
    has_equality_k: tuple[int, ...]
    spectral_growth: bool

    def to_json_dict(self) -> dict:
        return {
            "admissible": self.admissible,
            "violations": [list(v) for v in self.violations],
            "has_equality_k": list(self.has_equality_k),
            "spectral_growth": self.spectral_growth,
        }


class DiffOperator:
    """Immutable differential operator: a map k -> a_k with k >= 1.

    The zero polynomial is not a valid term (omit the k instead), so the
    leading coefficient a_N is nonzero by construction.  There is no k = 0
    multiplication term: a constant term would merely shift every
    eigenvalue and is excluded from the data model.
    """

    __slots__ = ("terms",)

    terms: tuple[tuple[int, Poly], ...]

    def __init__(self, terms: Union[Mapping[int, Poly], Iterable[tuple[int, Poly]]]):
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = list(terms)
        seen: dict[int, Poly] = {}
        for k, p in items:
            if not isinstance(k, int) or isinstance(k, bool) or k < 1:
                raise ValueError(f"derivative order must be a positive integer, got {k!r}")
            if k in seen:
                raise ValueError(f"duplicate derivative order k={k}")
            if not isinstance(p, Poly):
                raise TypeError(f"term k={k}: expected Poly, got {type(p).__name__}")
            if p.is_zero:
                raise ValueError(f"term k={k}: zero polynomial (omit the term instead)")
            seen[k] = p
        if not seen:
            raise ValueError("operator needs at least one term")
        object.__setattr__(self, "terms", tuple(sorted(seen.items())))

    def __setattr__(self, name, value):
        raise AttributeError("DiffOperator is immutable")

    @property
    def order(self) -> int:
        """Highest derivative order N."""
        return self.terms[-1][0]

    @property
    def leading(self) -> Poly:
        """The coefficient a_N of the highest derivative."""
        return self.terms[-1][1]

    def term(self, k: int) -> Poly:
        """Coefficient a_k (the zero polynomial for absent k)."""
        for kk, p in self.terms:
            if kk == k:
                return p
        return Poly()

    def __eq__(self, other) -> bool:
        return isinstance(other, DiffOperator) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __repr__(self) -> str:
        inner = ", ".join(f"a_{k}={p}" for k, p in self.terms)
        return f"DiffOperator({inner})"

    # -- JSON wire format ---------------------------------------------------

    @classmethod
    def from_json_dict(cls, obj) -> "DiffOperator":
        """Parse {"terms": [{"k": 2, "coeffs": ["-1", "0", "1"]}, ...]}.

        Unknown fields are rejected at every level; coefficients must be
        exact rational strings per the poly-core serialization.
        """
        if not isinstance(obj, dict):
            raise ValueError("operator spec must be a JSON object")
        unknown = set(obj) - {"terms"}
        if unknown:
            raise ValueError(f"unknown field(s) in operator spec: {sorted(unknown)}")
        if "terms" not in obj or not isinstance(obj["terms"], list) or not obj["terms"]:
            raise ValueError('operator spec needs a nonempty "terms" array')
        parsed = []
        for i, t in enumerate(obj["terms"]):
            if not isinstance(t, dict):
                raise ValueError(f"terms[{i}] must be an object")
            unknown = set(t) - {"k", "coeffs"}
            if unknown:
                raise ValueError(f"terms[{i}]: unknown field(s) {sorted(unknown)}")
            if "k" not in t or "coeffs" not in t:
                raise ValueError(f'terms[{i}] needs fields "k" and "coeffs"')
            k = t["k"]
            if not isinstance(k, int) or isinstance(k, bool):
                raise ValueError(f'terms[{i}].k must be an integer, got {k!r}')
            cs = t["coeffs"]
            if not isinstance(cs, list):
                raise ValueError(f"terms[{i}].coeffs must be an array of strings")
            try:
                p = Poly.from_coeff_strings(cs)
            except (ValueError, TypeError) as e:
                raise ValueError(f"terms[{i}].coeffs: {e}") from None
            parsed.append((k, p))
        try:
            return cls(parsed)
        except (ValueError, TypeError) as e:
            raise ValueError(str(e)) from None

    def to_json_dict(self) -> dict:
        return {
            "terms": [{"k": k, "coeffs": p.to_coeff_strings()} for k, p in self.terms]
        }


def validate(op: DiffOperator) -> AdmissibilityReport:
    """Check Bochner admissibility; reporting, never raising, is the contract."""
    violations = []
    equality = []
    for k, p in op.terms:
        d = p.degree  # never None: zero terms are excluded at construction
        if d > k:
            violations.append((k, d))
        elif d == k:
            equality.append(k)
    admissible = not violations and bool(equality)
    spectral_growth = op.leading.degree == op.order
    return AdmissibilityReport(
        admissible=admissible,
        violations=tuple(violations),
        has_equality_k=tuple(equality),
        spectral_growth=spectral_growth,
    )


def _require_admissible(op: DiffOperator) -> None:
    report = validate(op)
    if not report.admissible:
        raise InadmissibleOperator(
            f"operator is not Bochner-admissible: violations={list(report.violations)}, "
            f"has_equality_k={list(report.has_equality_k)}"
        )


def eigenvalue(op: DiffOperator, n: int) -> Fraction:
    """Exact eigenvalue lambda_n = sum_k c_k * n(n-1)...(n-k+1).

    c_k is the x^k-coefficient of a_k; terms with deg a_k < k contribute
    nothing, so lambda_n is a polynomial in n of degree N iff deg a_N = N.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    _require_admissible(op)
    lam = Fraction(0)
    for k, p in op.terms:
        ck = p.coefficient(k)
        if ck:
            lam += ck * falling_factorial(n, k)
    return lam


def apply(op: DiffOperator, p: Poly) -> Poly:
    """Exact application: sum_k a_k * p^(k)."""
    out = Poly()
    for k, a in op.terms:
        dk = p.derivative(k)
        if not dk.is_zero:
            out = out + a * dk
    return out


class EigenResult(NamedTuple):
    """Monic eigenpolynomial plus the free indices zeroed under degeneracy."""

    poly: Poly
    free_indices: tuple[int, ...]


def eigenpolynomial_info(
    op: DiffOperator, n: int, allow_degenerate: bool = False
) -> EigenResult:
    """Solve for the monic degree-n eigenpolynomial, reporting free indices.

    In the monomial basis, admissibility makes the operator triangular with
    diagonal lambda_j, so the coefficients b_j of p_n = x^n + ... satisfy
    (lambda_n - lambda_j) b_j = (terms from higher coefficients), solved by
    back-substitution from j = n-1 down to 0.

    When lambda_j = lambda_n the equation degenerates: a nonzero right side
    is inconsistent (always fatal), a zero right side leaves b_j free.  By
    default any degeneracy raises :class:`DegenerateSpectrum`; with
    ``allow_degenerate`` free coordinates resolve to 0 and are reported.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    _require_admissible(op)

    lam = [eigenvalue(op, j) for j in range(n + 1)]

    # rows[i] collects the strictly-upper entries T[i][j] (j > i) of the
    # operator matrix: d x^j = sum_k falling(j,k) * a_k * x^{j-k}.
    rows: list[list[tuple[int, Fraction]]] = [[] for _ in range(n + 1)]
    for j in range(1, n + 1):
        for k, a in op.terms:
            f = falling_factorial(j, k)
            if not f:
                continue
            for d, c in enumerate(a.coeffs):
                i = j - k + d
                if c and i < j:
                    rows[i].append((j, f * c))

    b = [Fraction(0)] * (n + 1)
    b[n] = Fraction(1)
    inconsistent: list[int] = []
    free: list[int] = []
    for i in range(n - 1, -1, -1):
        rhs = Fraction(0)
        for j, v in rows[i]:
            if b[j]:
                rhs += v * b[j]
        d = lam[n] - lam[i]
        if d == 0:
            if rhs != 0:
                inconsistent.append(i)
            else:
                free.append(i)
            # b[i] stays 0: the minimal-representative choice, also used to
            # classify the remaining rows below this one.
        else:
            b[i] = rhs / d

    if inconsistent or (free and not allow_degenerate):
        raise DegenerateSpectrum(n, inconsistent, free)
    return EigenResult(Poly(b), tuple(sorted(free)))


def eigenpolynomial(op: DiffOperator, n: int, allow_degenerate: bool = False) -> Poly:
    """Monic degree-n eigenpolynomial of an admissible operator.

    See :func:`eigenpolynomial_info` for the algorithm and the degeneracy
    contract; this wrapper returns just the polynomial.
    """
    return eigenpolynomial_info(op, n, allow_degenerate).poly
