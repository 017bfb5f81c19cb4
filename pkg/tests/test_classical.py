import itertools

import numpy as np
import pytest

from nilcone import classical as cl
from nilcone import linalg as la
from nilcone.errors import NotSGood, OddDimension, WrongKind
from nilcone.gf import make_field


def roots_oracle(kind, rank):
    """Count roots as integer vectors in the standard realisation."""
    if kind == "A":
        n = rank
        basis = np.eye(n, dtype=int)
        return sum(1 for i in range(n) for j in range(n) if i != j and (basis[i] - basis[j]).any())
    r = rank
    e = np.eye(r, dtype=int)
    roots = set()
    for i, j in itertools.combinations(range(r), 2):
        for s, t in itertools.product((1, -1), repeat=2):
            roots.add(tuple(s * e[i] + t * e[j]))
    if kind == "C":
        for i in range(r):
            roots.add(tuple(2 * e[i]))
            roots.add(tuple(-2 * e[i]))
    return len(roots)


def test_dimensions_examples(F2, F3):
    assert cl.build_algebra("C", 2, F2).dim == 3
    assert cl.build_algebra("A", 3, F2).dim == 9
    assert cl.build_algebra("D", 4, F3).dim == 6


@pytest.mark.parametrize("kind,n", [("A", 2), ("A", 3), ("C", 2), ("C", 4), ("C", 6), ("D", 4), ("D", 6)])
@pytest.mark.parametrize("q", [2, 3])
def test_basis_satisfies_defining_condition(kind, n, q):
    F = make_field(q)
    alg = cl.build_algebra(kind, n, F)
    assert alg.dim == cl.lie_dim(kind, n if kind == "A" else n // 2)
    for T in alg.basis:
        if kind == "C":
            J = alg.gram
            # (Tx, y) + (x, Ty) = 0 for all x, y
            assert not np.any(F.add(la.matmul(F, T.T, J), la.matmul(F, J, T)))
        if kind == "D":
            quad, gram = cl.split_quadratic(F, n)
            for x in itertools.product(range(q), repeat=n):
                x = np.array(x)
                assert cl.bilinear(F, gram, la.matmul(F, T, x), x) == 0


@pytest.mark.parametrize("kind,rank,want", [("A", 2, 2), ("C", 2, 8), ("D", 2, 4)])
def test_num_roots_examples(kind, rank, want):
    assert cl.num_roots(kind, rank).N == want


@pytest.mark.parametrize("kind", ["A", "C", "D"])
@pytest.mark.parametrize("rank", [1, 2, 3, 4, 5])
def test_num_roots_against_root_systems(kind, rank):
    assert cl.num_roots(kind, rank).N == roots_oracle(kind, rank)


def test_num_roots_errors():
    with pytest.raises(WrongKind):
        cl.num_roots("B", 2)
    with pytest.raises(OddDimension):
        cl.symplectic_gram(make_field(2), 3)


def test_transport_of_zero(F2):
    alg = cl.build_algebra("A", 2, F2)
    assert not np.any(cl.transport_iso(alg, la.zeros(2)).coeffs)


def test_transport_e12_picks_s21(F3):
    alg = cl.build_algebra("A", 2, F3)
    E12 = la.as_matrix([[0, 1], [0, 0]])
    xi = cl.transport_iso(alg, E12)
    for c in itertools.product(range(3), repeat=4):
        S = np.array(c).reshape(2, 2)
        assert xi(S) == S[1, 0]


def test_transport_equivariant_over_so4_f2(F2):
    alg = cl.build_algebra("D", 4, F2)
    rng = np.random.default_rng(7)
    Ts = [alg.element(rng.integers(0, 2, alg.dim)) for _ in range(20)]
    group = cl.group_list("D", 4, F2)
    assert len(group) == cl.group_order("D", 4, 2)
    for g in group:
        g_inv = la.inverse(F2, g)
        for T in Ts:
            lhs = cl.transport_iso(alg, la.matmul(F2, la.matmul(F2, g, T), g_inv))
            assert lhs == cl.transport_iso(alg, T).coadjoint(g)


@pytest.mark.parametrize("kind,n,q", [("A", 2, 2), ("A", 3, 2), ("D", 4, 2), ("A", 2, 3)])
def test_transport_is_invertible(kind, n, q):
    alg = cl.build_algebra(kind, n, make_field(q))
    assert la.rank(alg.field, cl.transport_matrix(alg)) == alg.dim


def test_transport_rejects_symplectic(F2):
    with pytest.raises(WrongKind):
        cl.transport_matrix(cl.build_algebra("C", 2, F2))


def all_matrices_f2(n):
    bits = (np.arange(2 ** (n * n))[:, None] >> np.arange(n * n)[::-1]) & 1
    return bits.reshape(-1, n, n).astype(np.int64)


def test_sp2_f2_by_filter(F2):
    J = cl.symplectic_gram(F2, 2)
    mats = all_matrices_f2(2)
    keep = [g for g in mats if np.array_equal((g.T @ J @ g) % 2, J)]
    assert len(keep) == 6 == cl.group_order("C", 2, 2)
    assert len(cl.group_list("C", 2, F2)) == 6


def test_sp4_f2_order(F2):
    assert cl.group_order("C", 4, 2) == 2**4 * 3 * 15 == 720
    assert len(cl.group_list("C", 4, F2)) == 720


def test_so4_f2_against_filtered_o4(F2):
    quad, _ = cl.split_quadratic(F2, 4)
    xs = np.array(list(itertools.product(range(2), repeat=4)))
    qx = np.einsum("vi,ij,vj->v", xs, quad, xs) % 2
    mats = all_matrices_f2(4)
    gx = np.einsum("gij,vj->gvi", mats, xs) % 2
    qgx = np.einsum("gvi,ij,gvj->gv", gx, quad, gx) % 2
    preserving = mats[np.all(qgx == qx, axis=1)]
    orth = [g for g in preserving if la.rank(F2, g) == 4]
    assert len(orth) == 72
    special = {g.tobytes() for g in orth if la.rank(F2, (g + np.eye(4, dtype=np.int64)) % 2) % 2 == 0}
    got = {g.tobytes() for g in cl.group_list("D", 4, F2)}
    assert got == special and len(got) == 36


@pytest.mark.parametrize("kind,n,q", [("A", 2, 3), ("C", 2, 3), ("D", 4, 3), ("A", 3, 2)])
def test_group_order_matches_enumeration(kind, n, q):
    F = make_field(q)
    group = cl.group_list(kind, n, F)
    assert len(group) == cl.group_order(kind, n, q)
    assert all(cl.is_in_group(kind, F, g) for g in group[:50])


def test_trivial_grading(F2):
    alg = cl.build_algebra("C", 4, F2)
    gr = cl.grade_algebra(alg, (0, 0, 0, 0))
    assert set(gr.pieces) == {0} and gr.pieces[0].dim == alg.dim
    for g in cl.group_list("C", 4, F2)[:40]:
        assert gr.in_G_ge0(g)


def test_sp2_grading_pieces(F3):
    alg = cl.build_algebra("C", 2, F3)
    gr = cl.grade_algebra(alg, (-1, 1))
    assert {i: S.dim for i, S in gr.pieces.items()} == {-2: 1, 0: 1, 2: 1}
    assert {j: S.dim for j, S in gr.dual_pieces.items()} == {-2: 1, 0: 1, 2: 1}


def test_identity_in_every_parabolic(F2):
    for degrees in [(0, 0), (-1, 1), (-2, -1, 1, 2), (-1, 0, 0, 1)]:
        assert cl.in_G_ge0(degrees, la.identity(len(degrees)))


def test_bad_grading_rejected(F2):
    with pytest.raises(NotSGood):
        cl.grade_algebra(cl.build_algebra("C", 2, F2), (0, 1))


def test_transport_maps_pieces_to_dual_pieces(F2):
    alg = cl.build_algebra("D", 4, F2)
    gr = cl.grade_algebra(alg, (-1, 0, 0, 1))
    Tm = cl.transport_matrix(alg)
    for j, S in gr.pieces.items():
        image = la.Subspace(F2, alg.dim, la.matmul(F2, Tm, S.basis.T).T)
        assert image == gr.dual_pieces[j]


def test_rational_borels_of_gl2(F2):
    alg = cl.build_algebra("A", 2, F2)
    # one Borel per line in F_2^2
    assert len(cl.rational_borels(alg)) == 3
