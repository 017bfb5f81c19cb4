import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nilcone import gf
from nilcone.errors import DivisionByZero, FieldMismatch, NonPrime, SizeLimitExceeded


def poly_mulmod(a, b, modulus, p):
    """Schoolbook product of coefficient lists, reduced by a monic modulus."""
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    k = len(modulus) - 1
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            for i, m in enumerate(modulus):
                prod[d - k + i] = (prod[d - k + i] - c * m) % p
    return (prod + [0] * k)[:k]


def encode(coeffs, p):
    return sum(c * p**i for i, c in enumerate(coeffs))


def decode(v, p, k):
    return [(v // p**i) % p for i in range(k)]


def brute_irreducible(poly, p):
    """No monic factor of degree 1 .. deg/2, by trial multiplication."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            f = list(low) + [1]
            for low2 in itertools.product(range(p), repeat=deg - d):
                g = list(low2) + [1]
                prod = [0] * (deg + 1)
                for i, x in enumerate(f):
                    for j, y in enumerate(g):
                        prod[i + j] = (prod[i + j] + x * y) % p
                if prod == [c % p for c in poly]:
                    return False
    return True


SMALL = [(2, 1), (3, 1), (5, 1), (2, 2), (2, 3), (3, 2), (2, 4), (5, 2)]


def test_prime_field_f2():
    F = gf.make_field(2, 1)
    assert (F.p, F.k, F.q) == (2, 1, 2)
    assert F.add(1, 1) == 0


def test_f4_modulus_is_the_only_irreducible_quadratic():
    F = gf.make_field(2, 2)
    assert F.modulus == (1, 1, 1)
    quadratics = [(a, b, 1) for a in range(2) for b in range(2)]
    assert [q for q in quadratics if brute_irreducible(q, 2)] == [(1, 1, 1)]


def test_non_prime_rejected():
    with pytest.raises(NonPrime):
        gf.make_field(4, 1)


def test_size_limit():
    with pytest.raises(SizeLimitExceeded):
        gf.make_field(2, 21)
    with pytest.raises(SizeLimitExceeded):
        gf.extend(gf.make_field(2), 25)


@pytest.mark.parametrize("p,k", SMALL)
def test_modulus_is_smallest_irreducible(p, k):
    F = gf.make_field(p, k)
    if k == 1:
        return
    assert brute_irreducible(F.modulus, p)
    # every monic polynomial with smaller encoding of lower coefficients is reducible
    for low in itertools.product(range(p), repeat=k):
        cand = tuple(low) + (1,)
        if encode(low, p) >= encode(F.modulus[:-1], p):
            break
        assert not brute_irreducible(cand, p)


def test_x_times_x_in_f4():
    F = gf.make_field(2, 2)
    x = F.element([0, 1])
    assert (x * x).coeffs == (1, 1)


@pytest.mark.parametrize("p,k", SMALL)
def test_multiplication_matches_polynomial_oracle(p, k):
    F = gf.make_field(p, k)
    a = np.repeat(np.arange(F.q), F.q)
    b = np.tile(np.arange(F.q), F.q)
    got = F.mul(a, b)
    for x, y, z in zip(a, b, got):
        want = encode(poly_mulmod(decode(x, p, k), decode(y, p, k), list(F.modulus), p), p)
        assert z == want


@pytest.mark.parametrize("p,k", SMALL)
def test_field_axioms_exhaustive(p, k):
    F = gf.make_field(p, k)
    e = np.arange(F.q)
    A, B, C = np.meshgrid(e, e, e, indexing="ij")
    assert np.array_equal(F.mul(F.mul(A, B), C), F.mul(A, F.mul(B, C)))
    assert np.array_equal(F.add(F.add(A, B), C), F.add(A, F.add(B, C)))
    assert np.array_equal(F.mul(A, F.add(B, C)), F.add(F.mul(A, B), F.mul(A, C)))
    nz = e[1:]
    assert np.all(F.mul(nz, F.inv(nz)) == 1)
    assert np.all(F.add(e, F.neg(e)) == 0)
    assert all(F.pow(int(a), F.q - 1) == 1 for a in nz)


@pytest.mark.parametrize("p,k", SMALL)
def test_frobenius_additive(p, k):
    F = gf.make_field(p, k)
    e = np.arange(F.q)
    A, B = np.meshgrid(e, e, indexing="ij")
    assert np.array_equal(F.frobenius(F.add(A, B)), F.add(F.frobenius(A), F.frobenius(B)))
    assert all(int(F.frobenius(a)) == F.pow(a, p) for a in range(F.q))


def test_sqrt2_inverts_squaring():
    for k in (1, 2, 3, 4):
        F = gf.make_field(2, k)
        e = np.arange(F.q)
        assert np.array_equal(F.sqrt2(F.mul(e, e)), e)


def test_inverse_of_zero():
    F = gf.make_field(3)
    with pytest.raises(DivisionByZero):
        F.inv(0)
    with pytest.raises(DivisionByZero):
        gf.arith("inv", F.element(0))


def test_arith_dispatch_and_mismatch():
    F2, F4 = gf.make_field(2), gf.make_field(2, 2)
    one = F2.element(1)
    assert gf.arith("add", one, one).value == 0
    assert gf.arith("mul", F4.element(2), F4.element(2)).value == 3
    assert gf.arith("pow", F4.element(2), 3).value == 1
    with pytest.raises(FieldMismatch):
        gf.arith("add", one, F4.element(1))


def test_element_validation():
    F = gf.make_field(3, 2)
    assert F.element([1, 2]).value == 7
    with pytest.raises(ValueError):
        F.element(9)


def test_identical_descriptions_are_equal():
    a = gf.FieldDesc(3, 2, gf.smallest_irreducible(3, 2))
    b = gf.make_field(3, 2)
    assert a == b and hash(a) == hash(b)
    e = np.arange(9)
    assert np.array_equal(a.mul(e[:, None], e[None, :]), b.mul(e[:, None], e[None, :]))


def test_extend_prime_field():
    E, emb = gf.extend(gf.make_field(2), 2)
    assert E.q == 4
    assert emb(0) == 0 and emb(1) == 1


@pytest.mark.parametrize("p,k,m", [(2, 2, 2), (3, 1, 2), (2, 1, 3), (3, 2, 2), (2, 2, 3)])
def test_extend_is_a_ring_homomorphism(p, k, m):
    F = gf.make_field(p, k)
    E, emb = gf.extend(F, m)
    assert E.q == F.q**m
    e = np.arange(F.q)
    A, B = np.meshgrid(e, e, indexing="ij")
    assert np.array_equal(emb(F.add(A, B)), E.add(emb(A), emb(B)))
    assert np.array_equal(emb(F.mul(A, B)), E.mul(emb(A), emb(B)))
    assert len(set(emb(e).tolist())) == F.q


def test_embedding_compose():
    F = gf.make_field(2)
    E1, e1 = gf.extend(F, 2)
    E2, e2 = gf.extend(E1, 2)
    both = e1.compose(e2)
    assert both.source == F and both.target == E2
    assert both(1) == 1


@given(st.integers(0, 2**8 - 1), st.integers(0, 2**8 - 1), st.integers(0, 2**8 - 1))
def test_gf256_distributive(a, b, c):
    F = gf.make_field(2, 8)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


@given(st.integers(1, 3**5 - 1), st.integers(0, 50))
def test_gf243_power_law(a, e):
    F = gf.make_field(3, 5)
    assert F.mul(F.pow(a, e), F.pow(a, 1)) == F.pow(a, e + 1)
    assert F.pow(a, F.q - 1) == 1


@given(st.integers(1, 2**16 - 1))
def test_large_field_inverse(a):
    F = gf.make_field(2, 16)
    assert F.mul(a, F.inv(a)) == 1
