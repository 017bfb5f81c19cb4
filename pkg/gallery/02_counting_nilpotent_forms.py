# %% [markdown]
# # Counting nilpotent elements
#
# The dual of sp(V) is identified with quadratic forms on V, and a form is
# nilpotent exactly when its polarization A_Q is a nilpotent endomorphism.
# Counting them by brute force gives q^(2 r^2), the same number as the
# nilpotent elements of the algebra itself.

# %%
from nilcone import census

for r, q in [(1, 2), (1, 3), (1, 5), (2, 2), (2, 3)]:
    rep = census.count_nilpotent("C", r, q, "coadjoint")
    print(f"r={r} q={q}: {rep.total:6d} nilpotent forms, q^(2r^2) = {rep.expected}")

# %% The adjoint side for gl_n and so_4
for kind, rank, q in [("A", 2, 3), ("A", 3, 2), ("D", 2, 3)]:
    rep = census.count_nilpotent(kind, rank, q, "adjoint")
    print(kind, rank, q, rep.total, rep.status)

# %% For gl_n and so_2r the trace form carries nilpotent matrices onto nilpotent functionals
rep = census.transport_census("D", 4, 2)
print(rep.extra)

# %% Sharding splits the enumeration into contiguous ranges and changes nothing
print({s: census.count_nilpotent("C", 2, 2, shards=s).total for s in (1, 3, 8)})

# %% Reports serialize to JSON and CSV
print(census.piece_census(1, 3).to_csv(timing=False))
