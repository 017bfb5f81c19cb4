import itertools
from collections import Counter

import numpy as np
import pytest

from nilcone import census as cs
from nilcone import classical as cl
from nilcone import forms as fm
from nilcone import linalg as la
from nilcone import pieces as pc
from nilcone.errors import (
    ConstructionInapplicable,
    NotCompatible,
    NotNilpotent,
    NotSGood,
    PreconditionError,
    ZeroSpace,
)
from nilcone.gf import make_field


def grading(F, degrees):
    return pc.SGoodGrading(F, cl.symplectic_gram(F, len(degrees)), tuple(degrees))


def nilpotent_forms(F, r):
    return [cs.form_from_index(F, r, int(i)) for i in cs.nilpotent_form_indices(F, r)]


def graded_forms(F, g):
    for v in cs.subspace_vectors(cs.graded_q2_space(g)):
        yield fm.QuadForm(F, g.gram, fm.coeff_matrix(v, g.n))


def admissible_oracle(dim):
    """Direct search over (f_0, f_1, ..., f_dim) with the defining conditions."""
    out = set()
    top = dim
    for f0 in range(0, dim + 1):
        rest_budget = dim - f0
        if rest_budget % 2:
            continue
        for tail in itertools.product(range(rest_budget // 2 + 1), repeat=top):
            if f0 + 2 * sum(tail) != dim:
                continue
            f = (f0,) + tail
            if any(f[a] % 2 for a in range(0, len(f), 2)):
                continue
            if any(f[a] < f[a + 2] for a in range(len(f) - 2)):
                continue
            out.add(f)
    return {pc.PieceLabel(f) for f in out}


# -- labels -------------------------------------------------------------------


def test_admissible_dim2():
    labs = pc.admissible_sequences(2)
    assert [str(x) for x in labs] == ["f1=1", "f0=2"]


def test_admissible_dim4():
    assert {str(x) for x in pc.admissible_sequences(4)} == {"f0=4", "f0=2,f1=1", "f1=2", "f1=1,f3=1"}


def test_admissible_dim0():
    assert pc.admissible_sequences(0) == [pc.PieceLabel(())]
    assert str(pc.PieceLabel(())) == "empty"


@pytest.mark.parametrize("dim", [0, 2, 4, 6, 8])
def test_admissible_against_oracle(dim):
    labs = pc.admissible_sequences(dim)
    assert len(labs) == len(set(labs))
    assert labs == sorted(labs)
    assert set(labs) == admissible_oracle(dim)


def sp_unipotent_classes(n):
    """Partitions of n in which odd parts occur with even multiplicity."""

    def parts(m, cap):
        if m == 0:
            yield ()
            return
        for k in range(min(m, cap), 0, -1):
            for rest in parts(m - k, k):
                yield (k,) + rest

    return sum(1 for p in parts(n, n) if all(Counter(p)[k] % 2 == 0 for k in Counter(p) if k % 2))


@pytest.mark.parametrize("dim", [2, 4, 6, 8])
def test_number_of_pieces_equals_symplectic_unipotent_classes(dim):
    assert len(pc.admissible_sequences(dim)) == sp_unipotent_classes(dim)


def test_label_helpers():
    lab = pc.PieceLabel.from_mapping({-3: 1, -1: 1, 1: 1, 3: 1})
    assert lab.dims == (0, 1, 0, 1)
    assert lab.dim == 4 and lab.top == 3 and lab.is_admissible()
    assert lab.degrees() == [-3, -1, 1, 3]
    with pytest.raises(ValueError):
        pc.PieceLabel.from_mapping({-1: 1, 1: 2})


# -- gradings -----------------------------------------------------------------


def test_s_good_examples(F2):
    assert pc.check_s_good(grading(F2, (0, 0)))
    assert not pc.check_s_good(grading(F2, (-2, 2)))
    assert pc.check_s_good(grading(F2, (-1, 0, 0, 1)))


def test_coordinate_grading_counts(F2):
    assert [len(pc.coordinate_gradings(F2, r)) for r in (1, 2)] == [3, 17]


def test_standard_gradings_are_s_good(F3):
    for dim in (2, 4, 6):
        for lab in pc.admissible_sequences(dim):
            g = pc.standard_grading(lab, F3)
            assert pc.check_s_good(g) and g.label == lab


# -- membership ---------------------------------------------------------------


def test_membership_zero_trivial_grading(F2):
    flags = pc.membership(fm.QuadForm.standard(F2, 1), grading(F2, (0, 0)))
    assert flags == (True, True, True)


def test_membership_square_on_degree_minus_one(F2):
    g = grading(F2, (-1, 1))
    flags = pc.membership(fm.QuadForm.standard(F2, 1, [1, 0, 0]), g)
    assert flags.in_Q2 and flags.in_Q2_0
    flags = pc.membership(fm.QuadForm.standard(F2, 1), g)
    assert flags.in_Q2 and not flags.in_Q2_0


def test_membership_rejects_bad_grading(F2):
    with pytest.raises(NotSGood):
        pc.membership(fm.QuadForm.standard(F2, 1), grading(F2, (0, 1)))


@pytest.mark.parametrize("q", [2, 3])
def test_membership_flags_nested(q):
    F = make_field(q)
    for g in pc.coordinate_gradings(F, 1):
        for Q in fm.enumerate_forms(F, g.gram):
            fl = pc.membership(Q, g)
            assert (not fl.in_Q2_0 or fl.in_Q2) and (not fl.in_Q2 or fl.in_Q_ge2)


def test_degenerate_case_forces_small_grading(F2):
    for r in (1, 2):
        for g in pc.coordinate_gradings(F2, r):
            for Q in graded_forms(F2, g):
                if not np.any(fm.polarize(Q)) and pc.membership(Q, g).in_Q2_0:
                    assert set(g.degrees) <= {-1, 0, 1}
                    assert g.f(-1) <= 1


# -- filtrations and the induced form ----------------------------------------


def test_filtration_from_grading_is_valid(F3):
    for lab in pc.admissible_sequences(4):
        filt = pc.Filtration.from_grading(pc.standard_grading(lab, F3))
        assert pc.check_filtration(filt) and filt.label == lab


def test_filtration_perp_condition(F2):
    J = cl.symplectic_gram(F2, 2)
    line = la.Subspace.span(F2, [[1, 0]], 2)
    full, zero = la.Subspace.full(F2, 2), la.Subspace.zero(F2, 2)
    good = pc.Filtration(F2, J, -1, [full, line, line, zero])
    assert pc.check_filtration(good) and good.label == pc.PieceLabel((0, 1))
    # V_{>=1} = line would force V_{>=0} = line, not V
    assert not pc.check_filtration(pc.Filtration(F2, J, 0, [full, line, zero]))


def test_filtration_normalizes_redundant_levels(F2):
    J = cl.symplectic_gram(F2, 2)
    full, zero = la.Subspace.full(F2, 2), la.Subspace.zero(F2, 2)
    assert pc.Filtration(F2, J, -3, [full, full, full, zero, zero]) == pc.Filtration(F2, J, -1, [full, zero])


def test_induced_form_of_zero(F2):
    filt = pc.Filtration.from_grading(grading(F2, (-1, 1)))
    assert pc.induced_form(fm.QuadForm.standard(F2, 1), filt).is_zero()


def test_induced_form_square(F2):
    Q = fm.QuadForm.standard(F2, 1, [1, 0, 0])
    filt = pc.classify(Q).filtration
    Qbar = pc.induced_form(Q, filt)
    g, _ = filt.graded
    assert g.degrees == (-1, 1)
    assert Qbar.vector().tolist() == [1, 0, 0]


def test_induced_form_not_compatible(F2):
    Q = fm.QuadForm.standard(F2, 1, [1, 0, 0])
    with pytest.raises(NotCompatible):
        pc.induced_form(Q, pc.Filtration.from_grading(grading(F2, (0, 0))))


def test_induced_form_independent_of_lifts(F2):
    F = F2
    filts = pc.enumerate_filtrations(F, 2)
    for Q in nilpotent_forms(F, 2):
        pc.induced_form(Q, pc.classify(Q).filtration, check_lifts=True)
        for f in filts:
            try:
                pc.induced_form(Q, f, check_lifts=True)
            except NotCompatible:
                pass


def test_zeta_examples(F2):
    zero = fm.QuadForm.standard(F2, 1)
    square = fm.QuadForm.standard(F2, 1, [1, 0, 0])
    trivial = pc.Filtration.from_grading(grading(F2, (0, 0)))
    assert pc.zeta_membership(zero, trivial)
    assert pc.zeta_membership(square, pc.classify(square).filtration)
    assert not pc.zeta_membership(square, trivial)


# -- e, f and classification --------------------------------------------------


def test_ef_zero(F2):
    # e = 1 >= 2f + 1 puts H = ker A^0 = 0, which is V_{>=1} of the trivial filtration
    inv = pc.ef_invariants(fm.QuadForm.standard(F2, 1))
    assert (inv.e, inv.f, inv.m) == (1, 0, 0) and inv.H == la.Subspace.zero(F2, 2)


def test_ef_square(F2):
    inv = pc.ef_invariants(fm.QuadForm.standard(F2, 1, [1, 0, 0]))
    assert (inv.e, inv.f, inv.m) == (1, 1, 1)
    assert inv.H == la.Subspace.span(F2, [[0, 1]], 2)


def test_ef_errors(F2, F3):
    with pytest.raises(ZeroSpace):
        pc.ef_invariants(fm.QuadForm.standard(F2, 0))
    with pytest.raises(PreconditionError):
        pc.ef_invariants(fm.QuadForm.standard(F3, 1))


@pytest.mark.parametrize("r", [1, 2])
def test_ef_chain_exhaustive(F2, r):
    forms = nilpotent_forms(F2, r)
    assert len(forms) == 2 ** (2 * r * r)
    for Q in forms:
        inv = pc.ef_invariants(Q)
        assert inv.e <= 2 * inv.f + 1
        filt = pc.classify(Q).filtration
        assert inv.m == filt.top_degree == max(inv.e - 1, 2 * inv.f - 1)
        assert filt.level(-inv.m + 1) == inv.H


def test_classify_zero(F2):
    c = pc.classify(fm.QuadForm.standard(F2, 1))
    assert str(c.label) == "f0=2"
    assert c.filtration.level(0).dim == 2 and c.filtration.level(1).dim == 0


def test_classify_square(F2):
    c = pc.classify(fm.QuadForm.standard(F2, 1, [1, 0, 0]))
    assert c.label == pc.PieceLabel((0, 1))
    line = la.Subspace.span(F2, [[0, 1]], 2)
    assert c.filtration.level(0) == line == c.filtration.level(1)


def test_classify_rejects_non_nilpotent(F2):
    with pytest.raises(NotNilpotent):
        pc.classify(fm.QuadForm.standard(F2, 1, [0, 1, 0]))


@pytest.mark.parametrize("q", [2, 3])
def test_classify_exhaustive_r2(q):
    F = make_field(q)
    labels = Counter()
    by_filtration = {}
    memo = {}
    for Q in nilpotent_forms(F, 2):
        c = pc.classify(Q)
        assert c.label.is_admissible() and pc.check_filtration(c.filtration)
        assert pc.zeta_membership(Q, c.filtration)
        pc.induced_form(Q, c.filtration, check_lifts=True)
        assert pc.classify_label(Q, memo) == c.label
        labels[str(c.label)] += 1
        by_filtration.setdefault(c.filtration, c.label)
    assert len(labels) == 4
    assert sum(labels.values()) == q**8


def test_piece_census_regression_q2():
    rep = cs.piece_census(2, 2)
    assert rep.counts == {"f1=1,f3=1": 180, "f1=2": 60, "f0=2,f1=1": 15, "f0=4": 1}


def test_classify_injective_over_all_filtrations(F2):
    for r in (1, 2):
        filts = pc.enumerate_filtrations(F2, r)
        for Q in nilpotent_forms(F2, r):
            hits = [f for f in filts if pc.zeta_membership(Q, f)]
            assert hits == [pc.classify(Q).filtration]


def test_enumerated_filtrations_valid_and_distinct(F3):
    filts = pc.enumerate_filtrations(F3, 1)
    assert len(set(filts)) == len(filts) == 1 + 4
    assert all(pc.check_filtration(f) for f in filts)


# -- witnesses and stabilizers --------------------------------------------------


def test_witness_spec_example(F2):
    g = grading(F2, (-1, 0, 0, 1))
    Q = fm.QuadForm.standard(F2, 2)
    w = pc.find_witness(Q, g)
    assert pc.witness_holds(Q, g, w.matrix)
    assert np.array_equal(pc.witness(Q, g), w.matrix)


def test_witness_precondition(F2, F3):
    g = grading(F2, (-1, 1))
    with pytest.raises(PreconditionError):
        pc.find_witness(fm.QuadForm.standard(F2, 1, [1, 0, 0]), g)
    with pytest.raises(PreconditionError):
        pc.find_witness(fm.QuadForm.standard(F3, 1), grading(F3, (-1, 1)))


@pytest.mark.parametrize("recipe", ["non-injective", "odd-degree"])
def test_each_low_rank_recipe_is_used(F2, recipe):
    used = 0
    for r in (1, 2):
        for g in pc.coordinate_gradings(F2, r):
            for Q in graded_forms(F2, g):
                if pc.membership(Q, g).in_Q2_0:
                    continue
                try:
                    w = pc.find_witness(Q, g, allow_search=False, recipes=(recipe,))
                except ConstructionInapplicable:
                    continue
                assert w.path == recipe and pc.witness_holds(Q, g, w.matrix)
                used += 1
    assert used > 0


def test_even_degree_recipe(F2):
    g = pc.SGoodGrading(F2, cl.symplectic_gram(F2, 6), (-2, -2, 0, 0, 2, 2))
    Q = fm.QuadForm.standard(F2, 3, [0] * 8 + [1] + [0] * 12)
    w = pc.find_witness(Q, g, allow_search=False, recipes=("even-degree",))
    assert w.path == "even-degree" and pc.witness_holds(Q, g, w.matrix)


def test_witness_exhaustive_r2_without_search(F2):
    for g in pc.coordinate_gradings(F2, 2):
        for Q in graded_forms(F2, g):
            if pc.membership(Q, g).in_Q2_0:
                continue
            w = pc.find_witness(Q, g, allow_search=False)
            assert pc.witness_holds(Q, g, w.matrix)


def test_witness_checker_rejects_identity(F2):
    g = grading(F2, (-1, 0, 0, 1))
    assert not pc.witness_holds(fm.QuadForm.standard(F2, 2), g, la.identity(4))


def test_stabilizer_example(F2):
    g = grading(F2, (-1, 1))
    Q = fm.QuadForm.standard(F2, 1, [1, 0, 0])
    assert pc.stabilizer_subordinate(Q, g)
    stab = pc.stabilizer(Q)
    assert any(np.array_equal(B, la.identity(2)) for B in stab)


def test_q20_equivalent_to_stabilizer_condition(F2):
    for r in (1, 2):
        for g in pc.coordinate_gradings(F2, r):
            for Q in graded_forms(F2, g):
                assert pc.membership(Q, g).in_Q2_0 == pc.stabilizer_subordinate(Q, g)
