# %% [markdown]
# # Witnesses outside the parabolic
#
# For a graded form in Q(V)_2 but not in Q(V)_2^0 there is a symplectic B
# fixing Q that does not preserve the grading filtration.  Three explicit
# constructions are tried before any group search.

# %%
from collections import Counter

from nilcone import census, forms, pieces
from nilcone.gf import make_field

F = make_field(2)
paths = Counter()
for g in pieces.coordinate_gradings(F, 2):
    for v in census.subspace_vectors(census.graded_q2_space(g)):
        Q = forms.QuadForm(F, g.gram, forms.coeff_matrix(v, 4))
        if pieces.membership(Q, g).in_Q2_0:
            assert pieces.stabilizer_subordinate(Q, g)
            continue
        w = pieces.find_witness(Q, g)
        assert pieces.witness_holds(Q, g, w.matrix)
        paths[w.path] += 1
print(paths)

# %% One witness in detail
g = pieces.SGoodGrading(F, forms.QuadForm.standard(F, 2).gram, (-1, 0, 0, 1))
w = pieces.find_witness(forms.QuadForm.standard(F, 2), g)
print(w.path)
print(w.matrix)
