import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nilcone import classical as cl
from nilcone import forms as fm
from nilcone import linalg as la
from nilcone.errors import ExtensionCapExceeded, NotAlternating, NotNilpotent, PreconditionError
from nilcone.gf import make_field


def polar_oracle(Q):
    """(A e_i, e_j) from Q(e_i + e_j) - Q(e_i) - Q(e_j), then A from the Gram matrix."""
    F, n = Q.field, Q.n
    I = la.identity(n)
    B = la.zeros(n)
    for i in range(n):
        for j in range(n):
            B[i, j] = F.sub(F.sub(Q(F.add(I[i], I[j])), Q(I[i])), Q(I[j]))
    # B = A^T J  =>  A = (B J^-1)^T
    return la.matmul(F, B, la.inverse(F, Q.gram)).T


def all_forms(F, r):
    return list(fm.enumerate_forms(F, cl.symplectic_gram(F, 2 * r)))


def test_polarize_zero(F2):
    assert not np.any(fm.polarize(fm.QuadForm.standard(F2, 1)))


def test_polarize_hyperbolic_is_identity(F2):
    Q = fm.QuadForm.standard(F2, 1, [0, 1, 0])  # x1 x2
    assert np.array_equal(fm.polarize(Q), la.identity(2))
    assert np.array_equal(polar_oracle(Q), la.identity(2))


def test_polarize_square_vanishes(F2):
    assert not np.any(fm.polarize(fm.QuadForm.standard(F2, 1, [1, 0, 0])))


@pytest.mark.parametrize("q,r", [(2, 1), (3, 1), (4, 1), (2, 2)])
def test_polarize_matches_basis_pair_oracle(q, r):
    F = make_field(2, 2) if q == 4 else make_field(q)
    for Q in all_forms(F, r):
        A = fm.polarize(Q)
        assert np.array_equal(A, polar_oracle(Q))
        if F.p == 2:
            assert fm.is_alternating(F, Q.gram, A)


def test_polarize_linear_exhaustive(F2):
    forms = all_forms(F2, 1)
    for P, Q in itertools.product(forms, repeat=2):
        assert np.array_equal(fm.polarize(P + Q), F2.add(fm.polarize(P), fm.polarize(Q)))


@pytest.mark.parametrize("q", [2, 3])
def test_form_axioms_exhaustive(q):
    F = make_field(q)
    xs = [np.array(x) for x in itertools.product(range(q), repeat=2)]
    for Q in all_forms(F, 1):
        for lam in range(q):
            for x in xs:
                assert Q(F.mul(lam, x)) == F.mul(F.mul(lam, lam), Q(x))
        A = fm.polarize(Q)
        for x, y in itertools.product(xs, repeat=2):
            polar = F.sub(F.sub(Q(F.add(x, y)), Q(x)), Q(y))
            assert polar == Q.pair(la.matmul(F, A, x), y)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_form_space_dimension(F2, r):
    assert fm.form_dim(2 * r) == cl.lie_dim("C", r) == fm.symplectic_algebra(F2, r).dim


@pytest.mark.parametrize("r", [1, 2])
def test_polarize_kernel_is_diagonal_forms(F2, r):
    ker = [Q for Q in all_forms(F2, r) if not np.any(fm.polarize(Q))]
    assert len(ker) == 2 ** (2 * r)
    assert all(not np.any(np.triu(Q.coeffs, 1)) for Q in ker)


def test_sigma_zero(F2):
    alg = fm.symplectic_algebra(F2, 1)
    xi = cl.DualFunctional(alg, np.zeros(alg.dim, dtype=np.int64))
    assert fm.sigma("to_form", xi).is_zero()
    assert fm.sigma("from_form", fm.QuadForm.standard(F2, 1), alg) == xi


@pytest.mark.parametrize("q,r", [(2, 1), (3, 1), (2, 2)])
def test_sigma_bijective_and_inverse(q, r):
    F = make_field(q)
    alg = fm.symplectic_algebra(F, r)
    forms = all_forms(F, r)
    back = [fm.sigma_from_form(Q, alg) for Q in forms]
    assert len({b.key() for b in back}) == len(forms)
    for Q, xi in zip(forms, back):
        assert fm.sigma_to_form(xi) == Q


def test_sigma_equivariance_sp2_f2(F2):
    alg = fm.symplectic_algebra(F2, 1)
    group = cl.group_list("C", 2, F2)
    pairs = 0
    for g in group:
        g_inv = la.inverse(F2, g)
        for Q in all_forms(F2, 1):
            xi = fm.sigma_from_form(Q, alg)
            assert fm.sigma_to_form(xi.coadjoint(g)) == Q.compose(g_inv)
            pairs += 1
    assert pairs == 48


def test_sigma_defining_property(F3):
    """xi(T) = tr(T X) where Q(a) = (X a, a)."""
    alg = fm.symplectic_algebra(F3, 1)
    for Q in all_forms(F3, 1):
        X = la.matmul(F3, Q.coeffs, la.inverse(F3, alg.gram)).T
        xi = fm.sigma_from_form(Q, alg)
        for T in alg.basis:
            assert xi(T) == cl.trace_pairing(F3, T, X)


def test_nilpotent_dual_examples(F2):
    alg = fm.symplectic_algebra(F2, 1)
    funcs = [cl.DualFunctional(alg, np.array(c)) for c in itertools.product(range(2), repeat=3)]
    assert fm.nilpotent_dual_test(funcs[0])
    assert sum(map(fm.nilpotent_dual_test, funcs)) == 4
    xi = fm.sigma_from_form(fm.QuadForm.standard(F2, 1, [0, 1, 0]), alg)
    assert not fm.nilpotent_dual_test(xi)


def test_good_basis_empty(F2):
    b = fm.good_basis(fm.QuadForm.standard(F2, 0))
    assert b.indices == () and b.is_good()


def test_good_basis_square(F2):
    b = fm.good_basis(fm.QuadForm.standard(F2, 1, [1, 0, 0]))
    assert b.indices == (-1, 1)
    assert b[1].tolist() == [0, 1] and b[-1].tolist() == [1, 0]
    assert b.is_good()


@pytest.mark.parametrize("q,r", [(2, 1), (3, 1), (4, 1), (5, 1), (2, 2), (3, 2)])
def test_good_basis_on_every_nilpotent_form(q, r):
    F = make_field(2, 2) if q == 4 else make_field(q)
    nil = 0
    for Q in all_forms(F, r):
        A = fm.polarize(Q)
        if not la.is_nilpotent(F, A):
            with pytest.raises(NotNilpotent):
                fm.good_basis(Q)
            continue
        nil += 1
        b = fm.good_basis(Q)
        assert b.violations() == []
        assert b.embedding.source == F
    assert nil == q ** (2 * r * r)


def test_good_basis_violations_detect_bad_vectors(F2):
    b = fm.good_basis(fm.QuadForm.standard(F2, 1, [1, 0, 0]))
    swapped = fm.GoodBasis(b.field, b.embedding, b.form, b.indices, b.vectors[::-1].copy())
    assert swapped.violations()


def test_good_basis_odd_sign_convention(F3):
    b = fm.good_basis(fm.QuadForm.standard(F3, 1, [0, 0, 0]))
    assert b.form.pair(b[1], b[-1]) == 1
    assert b.form.pair(b[-1], b[1]) == 2


def test_isotropic_vector_needs_extension(F2):
    Q = fm.QuadForm.standard(F2, 1, [1, 1, 1])  # anisotropic over F_2
    K = la.Subspace.full(F2, 2)
    v, emb = fm.isotropic_vector(Q, K)
    assert emb.target.q == 4
    QE = Q.over(emb)
    assert QE(v) == 0 and np.any(v)
    with pytest.raises(ExtensionCapExceeded):
        fm.isotropic_vector(Q, K, cap=1)


def test_isotropic_vector_anisotropic_line(F3):
    Q = fm.QuadForm.standard(F3, 1, [1, 0, 0])
    with pytest.raises(ExtensionCapExceeded):
        fm.isotropic_vector(Q, la.Subspace.span(F3, [[1, 0]], 2))


def test_fiber_count_examples(F2):
    assert fm.fiber_count(F2, la.zeros(2)) == 4
    assert fm.fiber_count(F2, la.zeros(4)) == 16
    assert fm.fiber_count(F2, la.identity(2)) == 4


@pytest.mark.parametrize("r", [1, 2])
def test_fiber_count_against_enumeration(F2, r):
    hist = Counter(fm.polarize(Q).tobytes() for Q in all_forms(F2, r))
    assert set(hist.values()) == {2 ** (2 * r)}
    for key, size in list(hist.items())[:20]:
        A = np.frombuffer(key, dtype=np.int64).reshape(2 * r, 2 * r)
        assert fm.fiber_count(F2, A) == size


def test_fiber_count_errors(F2, F3):
    with pytest.raises(PreconditionError):
        fm.fiber_count(F3, la.zeros(2))
    with pytest.raises(NotAlternating):
        fm.fiber_count(F2, la.as_matrix([[1, 0], [0, 0]]))


@pytest.mark.parametrize("r", [1, 2])
def test_kernel_of_nilpotent_polarization_even(F2, r):
    for Q in all_forms(F2, r):
        A = fm.polarize(Q)
        if la.is_nilpotent(F2, A):
            assert la.rank_kernel(F2, A)[1].dim % 2 == 0


_SP4_F2 = None


def sp4_f2():
    global _SP4_F2
    if _SP4_F2 is None:
        _SP4_F2 = cl.group_list("C", 4, make_field(2))
    return _SP4_F2


@given(st.lists(st.integers(0, 1), min_size=10, max_size=10), st.integers(0, 719))
def test_compose_matches_pointwise(vec, gi):
    F = make_field(2)
    Q = fm.QuadForm.standard(F, 2, vec)
    g = sp4_f2()[gi]
    P = Q.compose(g)
    for x in itertools.product(range(2), repeat=4):
        x = np.array(x)
        assert P(x) == Q(la.matmul(F, g, x))
