# %% [markdown]
# # Pieces of the nilpotent cone
#
# Every nilpotent form sits in exactly one set zeta(V_*) attached to a
# filtration of V.  The graded dimensions of that filtration label the
# piece.  `classify` finds the filtration by peeling off H_Q and its perp
# and recursing on the quotient.

# %%
from nilcone import census, forms, pieces
from nilcone.gf import make_field

print([str(lab) for lab in pieces.admissible_sequences(4)])

# %%
F = make_field(2)
Q = forms.QuadForm.standard(F, 2, [1, 0, 0, 0, 0, 0, 1, 0, 0, 0])
c = pieces.classify(Q)
print("label", c.label)
print(c.filtration)
inv = pieces.ef_invariants(Q)
print("e =", inv.e, "f =", inv.f, "m =", inv.m)

# %% Piece sizes at r = 2
for q in (2, 3):
    print(q, census.piece_census(2, q).counts)

# %% Every nilpotent form lands in exactly one zeta set, the one classify returns
rep = census.bijection_check(2, 2)
print(rep.filtrations, "filtrations;", rep.zeta_total, "forms covered; ok =", rep.ok)

# %% The exponent d in |zeta(V_*)| = q^d |Q_2^0|
print({str(lab): census.ratio_check(lab, [2, 3]) for lab in pieces.admissible_sequences(4)})
