# %% [markdown]
# # Piece sizes are polynomials in q
#
# Exact rational interpolation of piece sizes; extra points beyond the
# degree bound check the fit.

# %%
from nilcone import census

qs = (2, 3, 4, 5, 7, 8, 9)
counts = {q: census.piece_census(1, q).counts for q in qs}
for label in ("f0=2", "f1=1"):
    fit = census.poly_fit([(q, c[label]) for q, c in counts.items()], 2)
    print(label, "->", fit)

# %% A deliberately wrong degree bound is caught by the extra points
bad = census.poly_fit([(q, c["f1=1"]) for q, c in counts.items()], 1)
print(bad)

# %% r = 2 at q = 2 and 3 (q = 4 takes a minute or two)
for q in (2, 3):
    print(q, census.piece_census(2, q).counts)
