"""Shared fixtures: operators under test and a session cache of root sets.

Root finding at 30 certified digits dominates the suite's runtime (the
degree-200 cases climb the precision ladder to 512 bits), so every test
that needs roots of an eigenpolynomial goes through one session-scoped
cache keyed by (operator, degree, digits).
"""

from __future__ import annotations

import json
from fractions import Fraction

import gmpy2
import pytest

import bkzeros as bk


def reconstruction_error(rs: bk.RootSet, p: bk.Poly) -> tuple:
    """(worst coefficientwise rebuild error, certified tolerance) for rs.

    Expanding prod (x - alpha_i) at the certificate's working precision and
    comparing against the monic input coefficientwise must stay within
    deg * residual_bound * ||p||; this is the meaning of residual_bound.
    """
    mon = p.monic()
    prec = rs.precision
    with gmpy2.context(precision=prec):
        prod = [gmpy2.mpc(1, precision=prec)]
        for z in rs.roots:
            nxt = [gmpy2.mpc(0, precision=prec)] * (len(prod) + 1)
            for i, c in enumerate(prod):
                nxt[i + 1] += c
                nxt[i] -= c * z
            prod = nxt
        worst = gmpy2.mpfr(0)
        for k, c in enumerate(prod):
            err = abs(c - gmpy2.mpc(gmpy2.mpfr(mon.coefficient(k), prec)))
            worst = max(worst, err)
        pnorm = max(abs(gmpy2.mpfr(c, prec)) for c in mon.coeffs)
        tol = rs.source_degree * gmpy2.mpfr(rs.residual_bound) * pnorm
    return worst, tol


@pytest.fixture(scope="session")
def legendre_op():
    return bk.bochner_operator(bk.parse_family("legendre"))


@pytest.fixture(scope="session")
def hermite_op():
    return bk.bochner_operator(bk.parse_family("hermite"))


@pytest.fixture(scope="session")
def jacobi12_op():
    return bk.bochner_operator(bk.parse_family("jacobi:alpha=1,beta=2"))


@pytest.fixture(scope="session")
def chebyshev1_op():
    return bk.bochner_operator(bk.parse_family("chebyshev1"))


@pytest.fixture(scope="session")
def order4_op():
    with open(bk.example_operator_path("legendre_squared_order4"), encoding="utf-8") as fh:
        return bk.DiffOperator.from_json_dict(json.load(fh))


@pytest.fixture(scope="session")
def degenerate_op():
    with open(bk.example_operator_path("degenerate_spectrum"), encoding="utf-8") as fh:
        return bk.DiffOperator.from_json_dict(json.load(fh))


@pytest.fixture(scope="session")
def battery(legendre_op, hermite_op, jacobi12_op, chebyshev1_op, order4_op):
    """The named operator battery used by the acceptance criteria."""
    return {
        "hermite": hermite_op,
        "legendre": legendre_op,
        "jacobi(1,2)": jacobi12_op,
        "chebyshev1": chebyshev1_op,
        "order4": order4_op,
    }


@pytest.fixture(scope="session")
def rootset_cache():
    cache: dict = {}

    def get(op: bk.DiffOperator, n: int, digits: int = 30) -> bk.RootSet:
        key = (op, n, digits)
        if key not in cache:
            cache[key] = bk.find_roots(bk.eigenpolynomial(op, n), digits)
        return cache[key]

    return get


# Grids used by the desk-scale convergence experiments.  The Legendre grid
# has 5 points so the growth-exponent fit is defined; the Hermite grid
# includes 100 and 200 for the rescaled-measure comparison.
LEGENDRE_NS = (10, 25, 50, 100, 200)
HERMITE_NS = (10, 20, 40, 80, 100, 200)
ORDER4_N = 150


@pytest.fixture(scope="session")
def legendre_rootsets(legendre_op, rootset_cache):
    return {n: rootset_cache(legendre_op, n) for n in LEGENDRE_NS}


@pytest.fixture(scope="session")
def hermite_rootsets(hermite_op, rootset_cache):
    return {n: rootset_cache(hermite_op, n) for n in HERMITE_NS}


@pytest.fixture(scope="session")
def order4_rootset(order4_op, rootset_cache):
    return rootset_cache(order4_op, ORDER4_N)


@pytest.fixture(scope="session")
def unit_law():
    return bk.ArcsineLaw(Fraction(-1), Fraction(1))
