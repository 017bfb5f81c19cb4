# %% [markdown]
# # Good bases
#
# A nilpotent form admits a basis e_i indexed by odd i in [-2r+1, 2r-1]
# in which A_Q is strictly triangular, the pairing matches e_i with e_-i,
# and Q vanishes on every e_i with i > 0.

# %%
from nilcone import forms, linalg as la
from nilcone.gf import make_field

F = make_field(3)
Q = forms.QuadForm.standard(F, 2, [0, 1, 0, 0, 0, 0, 2, 0, 0, 0])
A = forms.polarize(Q)
print("A_Q =\n", A, "\nnilpotent:", la.is_nilpotent(F, A))

# %%
basis = forms.good_basis(Q)
for i in basis.indices:
    print(f"e{i:+d} =", basis[i])
print("violations:", basis.violations())

# %% An anisotropic binary form needs a quadratic extension for its isotropic vector
F2 = make_field(2)
Q = forms.QuadForm.standard(F2, 1, [1, 1, 1])
v, emb = forms.isotropic_vector(Q, la.Subspace.full(F2, 2))
print("isotropic vector", v, "over", emb.target)
