"""Classical Lie algebras gl(V), sp(V), so(V) over a finite field.

Forms are fixed once and split:

* kind ``C``: symplectic Gram matrix with anti-diagonal entries, ``+1`` in
  the upper half of the rows and ``-1`` in the lower half (all ``1`` in
  characteristic 2), so basis vector ``i`` pairs with ``n - 1 - i``;
* kind ``D``: quadratic form ``sum_{i<r} x_i x_{n-1-i}`` with polar Gram
  matrix the anti-diagonal of ones.

``SO`` in characteristic 2 is the kernel of the Dickson invariant
``rank(g - 1) mod 2`` on ``O(Q)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Iterator, Sequence

import numpy as np

from . import linalg as la
from .errors import NotSGood, OddDimension, SizeLimitExceeded, WrongKind
from .gf import FieldDesc

KINDS = ("A", "C", "D")
GROUP_LIMIT = 10**6


def symplectic_gram(F: FieldDesc, n: int) -> np.ndarray:
    if n % 2:
        raise OddDimension(f"symplectic space of odd dimension {n}")
    J = la.zeros(n)
    for i in range(n):
        J[i, n - 1 - i] = 1 if i < n // 2 else F.neg(1)
    return J


def split_quadratic(F: FieldDesc, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Upper-triangular coefficients of the split form and its polar Gram."""
    if n % 2:
        raise OddDimension(f"orthogonal space of odd dimension {n}")
    M = la.zeros(n)
    for i in range(n // 2):
        M[i, n - 1 - i] = 1
    return M, F.add(M, M.T)


def eval_quadratic(F: FieldDesc, M: np.ndarray, x: np.ndarray) -> int:
    return int(la.matmul(F, x, la.matmul(F, M, x)))


def bilinear(F: FieldDesc, gram: np.ndarray, x: np.ndarray, y: np.ndarray) -> int:
    return int(la.matmul(F, x, la.matmul(F, gram, y)))


@dataclass(frozen=True)
class RootCount:
    kind: str
    rank: int
    N: int


def num_roots(kind: str, rank: int) -> RootCount:
    """Number of roots of GL_n (rank = n), Sp_{2r} or SO_{2r} (rank = r)."""
    if rank < 1:
        raise ValueError("rank must be >= 1")
    if kind == "A":
        N = rank * (rank - 1)
    elif kind == "C":
        N = 2 * rank * rank
    elif kind == "D":
        N = 2 * rank * (rank - 1)
    else:
        raise WrongKind(kind)
    return RootCount(kind, rank, N)


def v_dim(kind: str, rank: int) -> int:
    return rank if kind == "A" else 2 * rank


def lie_dim(kind: str, rank: int) -> int:
    if kind == "A":
        return rank * rank
    if kind == "C":
        return rank * (2 * rank + 1)
    if kind == "D":
        return rank * (2 * rank - 1)
    raise WrongKind(kind)


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    kind: str
    V_dim: int
    field: FieldDesc
    gram: np.ndarray | None
    quad: np.ndarray | None
    basis: np.ndarray  # (dim, n, n)
    pivots: tuple[int, ...] = dc_field(repr=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def flat_basis(self) -> np.ndarray:
        return self.basis.reshape(self.dim, -1)

    def coordinates(self, T: np.ndarray) -> np.ndarray:
        """Coordinates of ``T`` in the basis; ``ValueError`` if ``T`` is outside."""
        c = np.asarray(T, dtype=np.int64).reshape(-1)[list(self.pivots)]
        if not np.array_equal(self.element(c), np.asarray(T)):
            raise ValueError("matrix is not in the Lie algebra")
        return c

    def element(self, coeffs) -> np.ndarray:
        F = self.field
        n = self.V_dim
        flat = la.matmul(F, np.asarray(coeffs, dtype=np.int64), self.flat_basis)
        return flat.reshape(n, n)

    def contains(self, T: np.ndarray) -> bool:
        try:
            self.coordinates(T)
        except ValueError:
            return False
        return True

    def elements(self) -> Iterator[np.ndarray]:
        F, d = self.field, self.dim
        for idx in range(F.q**d):
            yield self.element([(idx // F.q ** (d - 1 - i)) % F.q for i in range(d)])


def _defining_conditions(kind: str, F: FieldDesc, n: int, gram, quad) -> np.ndarray | None:
    """Rows of linear functionals on flattened T cutting out g in End(V)."""
    if kind == "A":
        return None
    cols = []
    for k in range(n * n):
        E = la.zeros(n)
        E.flat[k] = 1
        TG = la.matmul(F, E.T, gram)  # (Tx, y) = x^T T^T G y
        if kind == "C":
            # (Tx, y) + (x, Ty) = x^T (T^T J + J T) y and J T = -(T^T J)^T
            cond = F.sub(TG, TG.T)
            cols.append(cond[np.triu_indices(n, 1)])
        else:
            iu = np.triu_indices(n, 1)
            cols.append(np.concatenate([np.diagonal(TG), F.add(TG, TG.T)[iu]]))
    return np.array(cols, dtype=np.int64).T


def build_algebra(kind: str, V_dim: int, F: FieldDesc) -> LieAlgebra:
    if kind not in KINDS:
        raise WrongKind(kind)
    n = V_dim
    gram = quad = None
    if kind == "C":
        gram = symplectic_gram(F, n)
    elif kind == "D":
        quad, gram = split_quadratic(F, n)
    cond = _defining_conditions(kind, F, n, gram, quad)
    flat = la.identity(n * n) if cond is None else la.nullspace(F, cond)
    _, pivots = la.rref(F, flat)
    basis = flat.reshape(-1, n, n)
    basis.setflags(write=False)
    for M in (gram, quad):
        if M is not None:
            M.setflags(write=False)
    return LieAlgebra(kind, n, F, gram, quad, basis, tuple(pivots))


# -- duals and transport ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DualFunctional:
    algebra: LieAlgebra
    coeffs: np.ndarray

    def __post_init__(self):
        if len(self.coeffs) != self.algebra.dim:
            raise ValueError("coefficient vector has the wrong length")

    def __call__(self, T: np.ndarray) -> int:
        F = self.algebra.field
        return int(la.matmul(F, self.algebra.coordinates(T), self.coeffs))

    def __eq__(self, other):
        return (
            isinstance(other, DualFunctional)
            and other.algebra is self.algebra
            and np.array_equal(other.coeffs, self.coeffs)
        )

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def key(self) -> bytes:
        return np.asarray(self.coeffs, dtype=np.int64).tobytes()

    def coadjoint(self, g: np.ndarray) -> "DualFunctional":
        """``(g . xi)(T) = xi(g^-1 T g)``."""
        M = coadjoint_matrix(self.algebra, g)
        return DualFunctional(self.algebra, la.matmul(self.algebra.field, M, self.coeffs))


def adjoint_matrix(alg: LieAlgebra, g: np.ndarray, g_inv: np.ndarray | None = None) -> np.ndarray:
    """Matrix of ``T -> g T g^-1`` in the basis; column k is the image of basis k."""
    F = alg.field
    if g_inv is None:
        g_inv = la.inverse(F, g)
    imgs = la.matmul(F, la.matmul(F, g, alg.basis), g_inv)
    return np.array([alg.coordinates(M) for M in imgs], dtype=np.int64).T


def coadjoint_matrix(alg: LieAlgebra, g: np.ndarray, g_inv: np.ndarray | None = None) -> np.ndarray:
    """Matrix acting on dual coefficient vectors by ``xi -> xi o Ad(g^-1)``."""
    F = alg.field
    if g_inv is None:
        g_inv = la.inverse(F, g)
    return adjoint_matrix(alg, g_inv, g).T


def trace_pairing(F: FieldDesc, S: np.ndarray, X: np.ndarray) -> int:
    """``tr(S X)``."""
    prod = F.mul(S, X.T)
    acc = 0
    for v in prod.ravel():
        acc = F.add(acc, int(v))
    return int(acc)


def _transport_value(alg: LieAlgebra, T: np.ndarray, S: np.ndarray) -> int:
    F = alg.field
    if alg.kind == "A":
        return trace_pairing(F, S, T)
    # T -> (x, y -> (Tx, y)) -> form on V* via (,) -> S(V)^* -> g^*
    G = alg.gram
    G_inv = la.inverse(F, G)
    W_T = la.matmul(F, la.matmul(F, G_inv, T.T), la.matmul(F, G, G_inv))
    W_S = la.matmul(F, S.T, G)
    iu = np.triu_indices(alg.V_dim, 1)
    acc = 0
    for a, b in zip(W_T[iu], W_S[iu]):
        acc = F.add(acc, F.mul(int(a), int(b)))
    return int(acc)


def transport_matrix(alg: LieAlgebra) -> np.ndarray:
    """Matrix of the isomorphism g -> g* (columns: images of basis elements)."""
    if alg.kind not in ("A", "D"):
        raise WrongKind("transport is defined for kinds A and D")
    return np.array(
        [[_transport_value(alg, T, S) for S in alg.basis] for T in alg.basis], dtype=np.int64
    ).T


def transport_iso(alg: LieAlgebra, T: np.ndarray) -> DualFunctional:
    if alg.kind not in ("A", "D"):
        raise WrongKind("transport is defined for kinds A and D")
    if not alg.contains(T):
        raise WrongKind("matrix is not in the Lie algebra")
    return DualFunctional(alg, np.array([_transport_value(alg, T, S) for S in alg.basis], dtype=np.int64))


# -- groups -------------------------------------------------------------------


def group_order(kind: str, V_dim: int, q: int) -> int:
    """|GL_n(q)|, |Sp_n(q)| or |SO^+_n(q)| (split, Dickson/determinant kernel)."""
    n = V_dim
    if kind == "A":
        out = 1
        for i in range(n):
            out *= q**n - q**i
        return out
    r = n // 2
    if kind == "C":
        out = q ** (r * r)
        for i in range(1, r + 1):
            out *= q ** (2 * i) - 1
        return out
    if kind == "D":
        if r == 0:
            return 1
        out = q ** (r * (r - 1)) * (q**r - 1)
        for i in range(1, r):
            out *= q ** (2 * i) - 1
        return out
    raise WrongKind(kind)


def dickson_invariant(F: FieldDesc, g: np.ndarray) -> int:
    n = g.shape[0]
    return la.rank(F, F.sub(g, la.identity(n))) % 2


def determinant(F: FieldDesc, g: np.ndarray) -> int:
    R = np.array(g, dtype=np.int64)
    n = R.shape[0]
    det = 1
    for col in range(n):
        nz = np.nonzero(R[col:, col])[0]
        if nz.size == 0:
            return 0
        piv = col + int(nz[0])
        if piv != col:
            R[[col, piv]] = R[[piv, col]]
            det = F.neg(det)
        lead = int(R[col, col])
        det = F.mul(det, lead)
        inv = F.inv(lead)
        for i in range(col + 1, n):
            if R[i, col]:
                R[i] = F.sub(R[i], F.mul(F.mul(int(R[i, col]), inv), R[col]))
    return int(det)


def _vectors(F: FieldDesc, n: int) -> np.ndarray:
    return np.array(list(itertools.product(range(F.q), repeat=n)), dtype=np.int64)


def _isometries(F: FieldDesc, n: int, gram: np.ndarray, quad: np.ndarray | None) -> Iterator[np.ndarray]:
    """All g with columns g b_i forming a basis with the Gram (and Q) of the standard one."""
    all_vecs = _vectors(F, n)
    pairs = [(i, n - 1 - i) for i in range(n // 2)]

    def qvals(vs):
        return la.matmul(F, vs[:, None, :], la.matmul(F, quad, vs.T).T[:, :, None])[:, 0, 0]

    cols = np.zeros((n, n), dtype=np.int64)

    def rec(level: int, W: la.Subspace):
        if level == len(pairs):
            yield cols.copy()
            return
        i, j = pairs[level]
        target = int(gram[i, j])
        Wvecs = np.array(list(W.elements()), dtype=np.int64)
        cand_u = Wvecs[np.any(Wvecs != 0, axis=1)]
        if quad is not None:
            cand_u = cand_u[qvals(cand_u) == 0]
        for u in cand_u:
            # w in W with (u, w) = target
            pair_vals = la.matmul(F, Wvecs, la.matmul(F, gram.T, u))
            ws = Wvecs[pair_vals == target]
            if quad is not None:
                ws = ws[qvals(ws) == 0]
            for w in ws:
                cols[:, i] = u
                cols[:, j] = w
                rest = W.intersect(la.Subspace.span(F, [u, w], n).perp(gram))
                yield from rec(level + 1, rest)

    yield from rec(0, la.Subspace.full(F, n))


def enumerate_group(kind: str, V_dim: int, F: FieldDesc, limit: int = GROUP_LIMIT) -> Iterator[np.ndarray]:
    """Each rational point of GL(V), Sp(V) or SO(V) exactly once."""
    if kind not in KINDS:
        raise WrongKind(kind)
    if kind != "A" and V_dim % 2:
        raise OddDimension(V_dim)
    order = group_order(kind, V_dim, F.q)
    if order > limit:
        raise SizeLimitExceeded(f"|G| = {order} exceeds {limit}")
    n = V_dim
    if kind == "A":
        yield from _general_linear(F, n)
    elif kind == "C":
        yield from _isometries(F, n, symplectic_gram(F, n), None)
    else:
        quad, gram = split_quadratic(F, n)
        for g in _isometries(F, n, gram, quad):
            if F.p == 2:
                if dickson_invariant(F, g) == 0:
                    yield g
            elif determinant(F, g) == 1:
                yield g


def orthogonal_group(F: FieldDesc, V_dim: int) -> Iterator[np.ndarray]:
    """All of O(Q) for the split form (both Dickson classes)."""
    quad, gram = split_quadratic(F, V_dim)
    yield from _isometries(F, V_dim, gram, quad)


def _general_linear(F: FieldDesc, n: int) -> Iterator[np.ndarray]:
    vecs = _vectors(F, n)[1:]
    rows = np.zeros((n, n), dtype=np.int64)

    def rec(i: int, span: la.Subspace):
        if i == n:
            yield rows.copy()
            return
        for v in vecs:
            if not span.contains(v):
                rows[i] = v
                yield from rec(i + 1, span + la.Subspace.span(F, [v], n))

    yield from rec(0, la.Subspace.zero(F, n))


def group_list(kind: str, V_dim: int, F: FieldDesc, limit: int = GROUP_LIMIT) -> np.ndarray:
    return np.array(list(enumerate_group(kind, V_dim, F, limit)), dtype=np.int64)


def is_in_group(kind: str, F: FieldDesc, g: np.ndarray) -> bool:
    n = g.shape[0]
    if la.rank(F, g) != n:
        return False
    if kind == "A":
        return True
    if kind == "C":
        J = symplectic_gram(F, n)
        return np.array_equal(la.matmul(F, la.matmul(F, g.T, J), g), J)
    quad, gram = split_quadratic(F, n)
    N = la.matmul(F, la.matmul(F, g.T, quad), g)
    folded = np.triu(F.add(N, np.triu(N.T, 1)))
    if not np.array_equal(folded, quad):
        return False
    return dickson_invariant(F, g) == 0 if F.p == 2 else determinant(F, g) == 1


# -- gradings -----------------------------------------------------------------


def _degrees_of(grading) -> tuple[int, ...]:
    return tuple(getattr(grading, "degrees", grading))


def in_G_ge0(degrees: Sequence[int], g: np.ndarray) -> bool:
    """True iff ``g`` maps every ``V_{>=a}`` (span of basis vectors of degree >= a) into itself."""
    deg = np.asarray(degrees)
    bad = deg[:, None] < deg[None, :]  # row degree below column degree
    return not np.any(np.asarray(g)[bad])


@dataclass(frozen=True, eq=False)
class GradedAlgebra:
    algebra: LieAlgebra
    degrees: tuple[int, ...]
    pieces: dict  # i -> Subspace of algebra coordinates
    dual_pieces: dict  # j -> Subspace of dual coordinates

    def in_G_ge0(self, g: np.ndarray) -> bool:
        return in_G_ge0(self.degrees, g)


def grade_algebra(alg: LieAlgebra, grading) -> GradedAlgebra:
    """Decompose g and g* along a grading of V given by basis-vector degrees."""
    degrees = _degrees_of(grading)
    F, n = alg.field, alg.V_dim
    if len(degrees) != n:
        raise NotSGood("grading length differs from dim V")
    if alg.kind == "C":
        from .pieces import SGoodGrading, check_s_good

        if not check_s_good(SGoodGrading(F, alg.gram, degrees)):
            raise NotSGood(f"degrees {degrees} are not an s-good grading")
    elif alg.kind == "D":
        G = alg.gram
        for a in range(n):
            for b in range(n):
                if G[a, b] and degrees[a] + degrees[b] != 0:
                    raise NotSGood("grading is not compatible with the form")
    deg = np.asarray(degrees)
    shift = (deg[:, None] - deg[None, :]).reshape(-1)  # E_kl has degree deg k - deg l
    flat = alg.flat_basis
    pieces = {}
    for i in sorted(set(shift.tolist())):
        bad = np.nonzero(shift != i)[0]
        sub = la.nullspace(F, flat[:, bad].T) if bad.size else la.identity(alg.dim)
        S = la.Subspace(F, alg.dim, sub)
        if S.dim:
            pieces[i] = S
    dual = {}
    for j in sorted({-i for i in pieces}):
        others = la.Subspace.zero(F, alg.dim)
        for i, S in pieces.items():
            if i != -j:
                others = others + S
        A = la.annihilator(others)
        if A.dim:
            dual[j] = A
    return GradedAlgebra(alg, degrees, pieces, dual)


# -- Borel subalgebras --------------------------------------------------------


def standard_borel(alg: LieAlgebra) -> la.Subspace:
    """Upper-triangular elements of g, in algebra coordinates."""
    n = alg.V_dim
    lower = [k for k in range(n * n) if k // n > k % n]
    flat = alg.flat_basis
    sub = la.nullspace(alg.field, flat[:, lower].T)
    return la.Subspace(alg.field, alg.dim, sub)


def rational_borels(alg: LieAlgebra, group: Sequence[np.ndarray] | None = None) -> list[la.Subspace]:
    """Conjugates of the standard Borel under the rational points of G."""
    F = alg.field
    b0 = standard_borel(alg)
    mats = np.array([alg.element(c) for c in b0.basis], dtype=np.int64)
    if group is None:
        group = enumerate_group(alg.kind, alg.V_dim, F)
    seen = {}
    for g in group:
        g_inv = la.inverse(F, g)
        conj = la.matmul(F, la.matmul(F, g, mats), g_inv)
        S = la.Subspace(F, alg.dim, np.array([alg.coordinates(M) for M in conj], dtype=np.int64))
        seen.setdefault(S, None)
    return list(seen)
