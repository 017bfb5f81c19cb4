# %% [markdown]
# # Finite fields and exact linear algebra
#
# Field elements are plain integers: the element c0 + c1 x + ... of
# GF(p^k) is stored as c0 + c1 p + ...  Arrays of them go through numpy.

# %%
import numpy as np

from nilcone import gf, linalg as la

F4 = gf.make_field(2, 2)
print(F4, "modulus coefficients", F4.modulus)
x = F4.element([0, 1])
print("x * x =", (x * x).coeffs, " (that is x + 1)")

# %% Multiplication table, vectorized
e = np.arange(F4.q)
print(F4.mul(e[:, None], e[None, :]))

# %% Extending a field embeds the old one
E, emb = gf.extend(F4, 2)
print(E, "receives F4 as", emb(e))

# %% Subspaces are stored by their reduced echelon basis
F3 = gf.make_field(3)
U = la.Subspace.span(F3, [[1, 2, 0, 1], [2, 1, 0, 2], [0, 0, 1, 1]], 4)
print(U)
print("annihilator:", la.annihilator(U))
rank, kernel = la.rank_kernel(F3, U.basis)
print("rank", rank, "kernel", kernel)
