"""Shared hypothesis strategies for random polynomials, systems, and permutations."""
from fractions import Fraction

from hypothesis import strategies as st

from varord.polysys import PolySystem, Polynomial, VarPermutation, all_permutations


def coefficients(rationals: bool = True):
    ints = st.integers(min_value=-9, max_value=9).filter(lambda c: c != 0)
    if not rationals:
        return ints
    fracs = st.fractions(
        min_value=Fraction(-9), max_value=Fraction(9), max_denominator=5
    ).filter(lambda c: c != 0)
    return st.one_of(ints, fracs)


def monomials(nvars: int = 3, max_degree: int = 3):
    return st.tuples(*[st.integers(min_value=0, max_value=max_degree)] * nvars)


def polynomials(nvars: int = 3, max_degree: int = 3, max_terms: int = 4, rationals: bool = True):
    term = st.tuples(monomials(nvars, max_degree), coefficients(rationals))
    return (
        st.lists(term, min_size=1, max_size=max_terms)
        .map(lambda ts: Polynomial(nvars, ts))
        .filter(lambda p: not p.is_zero())
    )


def systems(nvars: int = 3, max_polys: int = 3, max_degree: int = 3, rationals: bool = True):
    return st.lists(
        polynomials(nvars, max_degree, rationals=rationals), min_size=1, max_size=max_polys
    ).map(lambda ps: PolySystem(tuple(ps), nvars))


def permutations(n: int = 3):
    return st.sampled_from(all_permutations(n))
