import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from moebius_crypto.errors import DegreeMismatch, DivisionByZero, NotPrime, ReduciblePolynomial, TooLarge
from moebius_crypto.field import (
    default_irreducible,
    enumerate_field,
    ext_make,
    extension_for,
    field_arith,
    field_make,
    is_irreducible,
)

SMALL = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4)]


def brute_irreducible(poly, p):
    """Monic poly has no monic factor of degree 1..n//2 (trial division)."""
    n = len(poly) - 1
    for d in range(1, n // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            f = list(low) + [1]
            r = list(poly)
            for shift in range(n - d, -1, -1):
                c = r[shift + d] % p
                if c:
                    for k in range(d + 1):
                        r[shift + k] = (r[shift + k] - c * f[k]) % p
            if not any(r[:d]):
                return False
    return True


# -- construction ---------------------------------------------------------------
def test_prime_field_gf2():
    F = field_make(2, 1)
    assert F.q == 2 and list(enumerate_field(F)) == [0, 1]


def test_gf4_from_t2_t_1():
    F = field_make(2, 2, (1, 1, 1))
    assert F.q == 4
    # t^2+t+1 has no root in GF(2)
    assert all((t * t + t + 1) % 2 for t in (0, 1))


def test_reducible_polynomial_rejected():
    with pytest.raises(ReduciblePolynomial):
        field_make(2, 2, (1, 0, 1))


def test_not_prime_and_degree_mismatch():
    with pytest.raises(NotPrime):
        field_make(4, 1)
    with pytest.raises(DegreeMismatch):
        field_make(2, 3, (1, 1, 1))


@pytest.mark.parametrize("p,n", [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (5, 2)])
def test_default_polynomial_is_smallest_irreducible(p, n):
    poly = default_irreducible(p, n)
    assert poly[-1] == 1 and brute_irreducible(poly, p)
    # nothing earlier in constant-term-first lexicographic order is irreducible
    for low in itertools.product(range(p), repeat=n):
        cand = tuple(low) + (1,)
        if cand == poly:
            break
        assert not brute_irreducible(cand, p)


@pytest.mark.parametrize("p,n", [(2, 5), (2, 6), (3, 4), (5, 3)])
def test_irreducibility_test_matches_trial_division(p, n):
    for low in itertools.product(range(p), repeat=n):
        poly = tuple(low) + (1,)
        assert is_irreducible(poly, p) == brute_irreducible(poly, p)


# -- arithmetic -----------------------------------------------------------------
def test_gf4_products():
    F = field_make(2, 2, (1, 1, 1))
    w = 2
    assert field_arith(F, "mul", w, w) == 3
    assert field_arith(F, "inv", w) == 3
    oracle = next(x for x in range(4) if field_arith(F, "mul", w, x) == 1)
    assert oracle == 3


def test_additive_identity_and_zero_division():
    F = field_make(3, 2)
    for a in F.elements():
        assert field_arith(F, "add", a, 0) == a
    with pytest.raises(DivisionByZero):
        field_arith(F, "div", 1, 0)
    with pytest.raises(DivisionByZero):
        F.inv(0)


@pytest.mark.parametrize("p,n", SMALL)
def test_field_axioms_exhaustive(p, n):
    F = field_make(p, n)
    els = list(F.elements())
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        assert F.mul(a, 1) == a
        if a:
            assert F.mul(a, F.inv(a)) == 1
        for b in els:
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)
            assert F.sub(F.add(a, b), b) == a
            for c in els:
                assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
                assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
                assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))


def test_gf16_axioms_exhaustive():
    F = field_make(2, 4)
    for a, b, c in itertools.product(F.elements(), repeat=3):
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))


@pytest.mark.parametrize("p,n", [(2, 16), (3, 7), (65521, 1), (2, 20), (5, 5)])
def test_field_axioms_random(p, n):
    F = field_make(p, n)
    rng = random.Random(p * 100 + n)
    for _ in range(10_000):
        a, b, c = (F.random(rng) for _ in range(3))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        if a:
            assert F.mul(a, F.inv(a)) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1), st.integers(0, 50))
def test_pow_matches_repeated_multiplication(a, b, e):
    F = field_make(2, 16)
    r = 1
    for _ in range(e):
        r = F.mul(r, a)
    assert F.pow(a, e) == r
    assert F.mul(a, b) == F._raw_mul(a, b)


# -- quadratic extension ----------------------------------------------------------
def test_gf4_over_gf2():
    G = ext_make(field_make(2, 1), (1, 1))
    w = G.omega
    assert G.conjugate(w) == G.make(1, 1)
    assert G.norm(w) == 1
    assert G.conjugate(1) == 1


def test_reducible_quadratic_rejected():
    with pytest.raises(ReduciblePolynomial):
        ext_make(field_make(2, 1), (1, 0))


def test_default_quadratic_gf16_over_gf4():
    F = field_make(2, 2)
    G = ext_make(F)
    b0, b1, one = G.quadratic
    assert one == 1
    # no root in F, and nothing earlier in (b0, b1) order qualifies
    assert all(F.add(F.add(F.mul(x, x), F.mul(b1, x)), b0) for x in F.elements())
    assert (b0, b1) == (1, 2)
    norm_one = [x for x in G.elements() if G.norm(x) == 1]
    assert len(norm_one) == 5


def test_gf9_conjugation_fixes_base():
    G = extension_for(3)
    fixed = [x for x in G.elements() if G.conjugate(x) == x]
    assert fixed == [x for x in G.elements() if G.is_base(x)] and len(fixed) == 3


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8])
def test_conjugation_is_involutory_automorphism(q):
    G = extension_for(q)
    els = G.elements()
    for x in els:
        assert G.conjugate(G.conjugate(x)) == x
        assert G.conjugate(x) == G.frobenius(x)
        for y in els:
            assert G.conjugate(G.add(x, y)) == G.add(G.conjugate(x), G.conjugate(y))
            assert G.conjugate(G.mul(x, y)) == G.mul(G.conjugate(x), G.conjugate(y))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13, 16])
def test_fixed_set_and_norm_fibres(q):
    G = extension_for(q)
    fixed = {x for x in G.elements() if G.conjugate(x) == x}
    assert fixed == set(range(q))
    fibres = {}
    for x in G.elements():
        n = G.norm(x)
        assert G.is_base(n) and G.is_base(G.trace(x))
        fibres[n] = fibres.get(n, 0) + 1
    assert fibres.pop(0) == 1
    assert set(fibres) == set(range(1, q)) and set(fibres.values()) == {q + 1}


@pytest.mark.parametrize("q", [4, 9, 25, 256, 2**16])
def test_norm_multiplicative_random(q):
    G = extension_for(q)
    rng = random.Random(q)
    for _ in range(2000):
        x, y = G.random(rng), G.random(rng)
        assert G.norm(G.mul(x, y)) == G.base.mul(G.norm(x), G.norm(y))
        assert G.conjugate(x) == G.frobenius(x)


def test_enumeration_order_and_closure():
    G9 = field_make(3, 2)
    els = list(enumerate_field(G9))
    assert len(els) == 9 == len(set(els))
    assert all(G9.add(a, b) in els and G9.mul(a, b) in els for a in els for b in els)
    G = extension_for(2)
    assert enumerate_field(G) == [0, 2, 1, 3]  # (re, im) lexicographic
    assert len(set(enumerate_field(extension_for(4)))) == 16


def test_enumeration_guard():
    with pytest.raises(TooLarge):
        extension_for(2**13).elements()
    with pytest.raises(TooLarge):
        list(enumerate_field(field_make(2, 25)))
