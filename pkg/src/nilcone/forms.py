"""Quadratic forms on a symplectic space and their polarizations.

A quadratic form is stored by its upper-triangular coefficient matrix ``M``
so that ``Q(x) = x^T M x = sum_{i<=j} M[i, j] x_i x_j``.  With the Gram
matrix ``J`` of the symplectic form, ``(x, y) = x^T J y``, the polarization
is the endomorphism ``A_Q = J^{-T} (M + M^T)``, characterised by
``(A_Q x, y) = Q(x + y) - Q(x) - Q(y)``.

Coefficient vectors list the upper triangle row by row
(``q_11, q_12, ..., q_1n, q_22, ...``); enumeration of all forms is
lexicographic in that vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import linalg as la
from .classical import LieAlgebra, DualFunctional, build_algebra, symplectic_gram
from .errors import ExtensionCapExceeded, NotAlternating, PreconditionError
from .gf import EXTENSION_CAP, Embedding, FieldDesc, extend, identity_embedding

EXHAUSTIVE_SEARCH_LIMIT = 2**16


def fold(F: FieldDesc, N: np.ndarray) -> np.ndarray:
    """Upper-triangular coefficients of ``x -> x^T N x``."""
    return np.triu(F.add(np.triu(N), np.tril(N, -1).T))


def form_dim(n: int) -> int:
    return n * (n + 1) // 2


def coeff_vector(M: np.ndarray) -> np.ndarray:
    return np.asarray(M)[np.triu_indices(M.shape[0])]


def coeff_matrix(vec, n: int) -> np.ndarray:
    M = la.zeros(n)
    M[np.triu_indices(n)] = np.asarray(vec, dtype=np.int64)
    return M


@dataclass(frozen=True, eq=False)
class QuadForm:
    """A quadratic form on ``(F^n, gram)``."""

    field: FieldDesc
    gram: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.coeffs, dtype=np.int64)
        if M.shape != self.gram.shape or np.any(np.tril(M, -1)):
            raise ValueError("coefficients must be an upper-triangular n x n array")
        M.setflags(write=False)
        object.__setattr__(self, "coeffs", M)

    @classmethod
    def standard(cls, F: FieldDesc, r: int, coeffs=None) -> "QuadForm":
        n = 2 * r
        J = symplectic_gram(F, n)
        if coeffs is None:
            M = la.zeros(n)
        else:
            c = np.asarray(coeffs, dtype=np.int64)
            M = coeff_matrix(c, n) if c.ndim == 1 else c
        return cls(F, J, M)

    @classmethod
    def from_vector(cls, F: FieldDesc, gram: np.ndarray, vec) -> "QuadForm":
        return cls(F, gram, coeff_matrix(vec, gram.shape[0]))

    @property
    def n(self) -> int:
        return self.gram.shape[0]

    @property
    def r(self) -> int:
        return self.n // 2

    def vector(self) -> np.ndarray:
        return coeff_vector(self.coeffs)

    def key(self) -> bytes:
        return self.coeffs.tobytes()

    def __eq__(self, other):
        return (
            isinstance(other, QuadForm)
            and self.field == other.field
            and np.array_equal(self.gram, other.gram)
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"QuadForm({self.field!r}, {self.vector().tolist()})"

    def __call__(self, x) -> int:
        F = self.field
        x = np.asarray(x, dtype=np.int64)
        return int(la.matmul(F, x, la.matmul(F, self.coeffs, x)))

    def values(self, X: np.ndarray) -> np.ndarray:
        """``Q`` evaluated on each row of ``X``."""
        F = self.field
        Y = la.matmul(F, X, self.coeffs.T)
        prod = F.mul(X, Y)
        out = np.zeros(X.shape[0], dtype=np.int64)
        for j in range(X.shape[1]):
            out = F.add(out, prod[:, j])
        return out

    def pair(self, x, y) -> int:
        F = self.field
        return int(la.matmul(F, np.asarray(x), la.matmul(F, self.gram, np.asarray(y))))

    def __add__(self, other: "QuadForm") -> "QuadForm":
        return QuadForm(self.field, self.gram, self.field.add(self.coeffs, other.coeffs))

    def compose(self, B: np.ndarray) -> "QuadForm":
        """``x -> Q(B x)``."""
        F = self.field
        return QuadForm(F, self.gram, fold(F, la.matmul(F, la.matmul(F, B.T, self.coeffs), B)))

    def restrict(self, rows: np.ndarray, gram: np.ndarray | None = None) -> "QuadForm":
        """Form ``c -> Q(c . rows)`` in the coordinates given by ``rows``."""
        F = self.field
        rows = np.asarray(rows, dtype=np.int64)
        if gram is None:
            gram = la.matmul(F, la.matmul(F, rows, self.gram), rows.T)
        return QuadForm(F, gram, fold(F, la.matmul(F, la.matmul(F, rows, self.coeffs), rows.T)))

    def over(self, emb: Embedding) -> "QuadForm":
        return QuadForm(emb.target, emb(self.gram), emb(self.coeffs))

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)


def enumerate_forms(F: FieldDesc, gram: np.ndarray) -> Iterator[QuadForm]:
    n = gram.shape[0]
    d = form_dim(n)
    for idx in range(F.q**d):
        vec = [(idx // F.q ** (d - 1 - i)) % F.q for i in range(d)]
        yield QuadForm.from_vector(F, gram, vec)


# -- polarization -------------------------------------------------------------


def gram_inverse_transpose(F: FieldDesc, gram: np.ndarray) -> np.ndarray:
    return la.inverse(F, np.ascontiguousarray(gram.T))


def polarize_raw(F: FieldDesc, gram: np.ndarray, M: np.ndarray, Jit: np.ndarray | None = None) -> np.ndarray:
    if Jit is None:
        Jit = gram_inverse_transpose(F, gram)
    return la.matmul(F, Jit, F.add(M, M.T))


def polarize(Q: QuadForm) -> np.ndarray:
    """The endomorphism ``A_Q``."""
    return polarize_raw(Q.field, Q.gram, Q.coeffs)


def polarization_matrix(F: FieldDesc, gram: np.ndarray) -> np.ndarray:
    """Rows: flattened ``A_Q`` for the unit coefficient vectors, in vector order."""
    n = gram.shape[0]
    Jit = gram_inverse_transpose(F, gram)
    rows = []
    for i, j in zip(*np.triu_indices(n)):
        M = la.zeros(n)
        M[i, j] = 1
        rows.append(polarize_raw(F, gram, M, Jit).reshape(-1))
    return np.array(rows, dtype=np.int64)


def is_alternating(F: FieldDesc, gram: np.ndarray, A: np.ndarray) -> bool:
    """``(Ax, x) = 0`` for all x."""
    N = la.matmul(F, A.T, gram)
    return not np.any(fold(F, N))


def alternating_space(F: FieldDesc, gram: np.ndarray) -> la.Subspace:
    """``{A in End(V) : (Ax, x) = 0}`` as a subspace of flattened matrices."""
    n = gram.shape[0]
    cols = []
    for k in range(n * n):
        E = la.zeros(n)
        E.flat[k] = 1
        cols.append(coeff_vector(fold(F, la.matmul(F, E.T, gram))))
    return la.Subspace(F, n * n, la.nullspace(F, np.array(cols, dtype=np.int64).T))


def fiber_count(F: FieldDesc, A: np.ndarray, gram: np.ndarray | None = None) -> int:
    """Number of forms Q over F with ``A_Q = A`` (characteristic 2)."""
    if F.p != 2:
        raise PreconditionError("fiber_count needs characteristic 2")
    n = A.shape[0]
    if gram is None:
        gram = symplectic_gram(F, n)
    if not is_alternating(F, gram, A):
        raise NotAlternating("(Ax, x) is not identically zero")
    P = polarization_matrix(F, gram)
    if la.solve(F, P.T, A.reshape(-1)) is None:
        return 0
    return F.q ** (P.shape[0] - la.rank(F, P))


# -- the correspondence between sp(V)^* and quadratic forms -------------------


def symplectic_algebra(F: FieldDesc, r: int) -> LieAlgebra:
    return build_algebra("C", 2 * r, F)


def _trace_rows(alg: LieAlgebra) -> np.ndarray:
    # tr(T X) = flatten(T^T) . flatten(X)
    return np.array([T.T.reshape(-1) for T in alg.basis], dtype=np.int64)


def sigma_to_form(xi: DualFunctional) -> QuadForm:
    """The form ``a -> (X a, a)`` for any X with ``tr(T X) = xi(T)`` on g."""
    alg = xi.algebra
    F = alg.field
    X = la.solve(F, _trace_rows(alg), xi.coeffs)
    if X is None:  # pragma: no cover - trace pairing on sp is onto the dual
        raise AssertionError("trace pairing does not reach xi")
    X = X.reshape(alg.V_dim, alg.V_dim)
    return QuadForm(F, alg.gram, fold(F, la.matmul(F, X.T, alg.gram)))


def sigma_from_form(Q: QuadForm, alg: LieAlgebra | None = None) -> DualFunctional:
    F = Q.field
    if alg is None:
        alg = symplectic_algebra(F, Q.r)
    # X^T J = M  gives (X a, a) = a^T M a
    X = la.matmul(F, Q.coeffs, la.inverse(F, alg.gram)).T
    return DualFunctional(alg, la.matmul(F, _trace_rows(alg), X.reshape(-1)))


def sigma(direction: str, obj, alg: LieAlgebra | None = None):
    if direction == "to_form":
        return sigma_to_form(obj)
    if direction == "from_form":
        return sigma_from_form(obj, alg)
    raise ValueError(f"unknown direction {direction!r}")


def nilpotent_dual_test(xi: DualFunctional) -> bool:
    Q = sigma_to_form(xi)
    return la.is_nilpotent(Q.field, polarize(Q))


# -- good bases ---------------------------------------------------------------


def odd_indices(r: int) -> tuple[int, ...]:
    return tuple(range(-2 * r + 1, 2 * r, 2))


@dataclass(frozen=True, eq=False)
class GoodBasis:
    """Vectors ``e_i`` for odd ``i`` in ``[-2r+1, 2r-1]``, as rows in index order.

    Pairing convention: ``(e_i, e_{-i}) = 1`` for ``i > 0`` and ``-1`` for
    ``i < 0``; all other pairings vanish.
    """

    field: FieldDesc
    embedding: Embedding
    form: QuadForm
    indices: tuple[int, ...]
    vectors: np.ndarray

    def __getitem__(self, i: int) -> np.ndarray:
        return self.vectors[self.indices.index(i)]

    def violations(self) -> list[str]:
        """Postconditions that fail; empty when the basis is good."""
        F, Q = self.field, self.form
        E = self.vectors
        out = []
        n = len(self.indices)
        if n and la.rank(F, E) != n:
            return ["vectors are not a basis"]
        G = la.matmul(F, la.matmul(F, E, Q.gram), E.T)
        for a, i in enumerate(self.indices):
            for b, j in enumerate(self.indices):
                want = 0 if i + j else (1 if i > 0 else int(F.neg(1)))
                if int(G[a, b]) != want:
                    out.append(f"(e_{i}, e_{j}) = {int(G[a, b])}")
        if n:
            A = polarize(Q)
            Einv = la.inverse(F, E)
            # row a of Y: coordinates of A e_a in the basis
            Y = la.matmul(F, la.matmul(F, E, A.T), Einv)
            for a in range(n):
                if np.any(Y[a, : a + 1]):
                    out.append(f"A e_{self.indices[a]} leaves span of higher e_j")
        for a, i in enumerate(self.indices):
            if i > 0 and Q(E[a]) != 0:
                out.append(f"Q(e_{i}) != 0")
        return out

    def is_good(self) -> bool:
        return not self.violations()


def _binary_root(F: FieldDesc, a: int, b: int, c: int) -> tuple[int, int] | None:
    """Nonzero (s, t) with ``a s^2 + b s t + c t^2 = 0``, or None."""
    if a == 0:
        return (1, 0)
    t = np.arange(F.q, dtype=np.int64)
    vals = F.add(F.add(F.mul(a, F.mul(t, t)), F.mul(b, t)), c)
    hit = np.nonzero(vals == 0)[0]
    return (int(hit[0]), 1) if hit.size else None


def isotropic_vector(Q: QuadForm, K: la.Subspace, cap: int = EXTENSION_CAP, degree: int = 1):
    """Nonzero ``v`` in ``K`` with ``Q(v) = 0``.

    Returns ``(v, embedding)``; when the form is anisotropic on ``K`` over
    ``Q.field`` the vector lives in a quadratic extension and ``embedding``
    maps the original field into it.
    """
    F = Q.field
    if K.dim == 0:
        raise ValueError("empty search space")
    if F.q**K.dim <= EXHAUSTIVE_SEARCH_LIMIT:
        k = K.dim
        idx = np.arange(1, F.q**k, dtype=np.int64)
        C = np.stack([(idx // F.q ** (k - 1 - i)) % F.q for i in range(k)], axis=1)
        V = la.matmul(F, C, K.basis)
        hit = np.nonzero(Q.values(V) == 0)[0]
        if hit.size:
            return V[int(hit[0])], identity_embedding(F)
    else:
        u, w = K.basis[0], K.basis[1] if K.dim > 1 else None
        if w is None:
            if Q(u) == 0:
                return u, identity_embedding(F)
        else:
            a, c = Q(u), Q(w)
            b = int(F.sub(F.sub(Q(F.add(u, w)), a), c))
            root = _binary_root(F, a, b, c)
            if root is not None:
                s, t = root
                return F.add(F.mul(s, u), F.mul(t, w)), identity_embedding(F)
    if K.dim < 2:
        raise ExtensionCapExceeded("anisotropic line: no isotropic vector in any extension")
    if degree * 2 > cap:
        raise ExtensionCapExceeded(f"extension degree {degree * 2} exceeds cap {cap}")
    E, emb = extend(F, 2)
    QE = Q.over(emb)
    KE = la.Subspace(E, K.ambient_dim, emb(K.basis[:2]))
    v, emb2 = isotropic_vector(QE, KE, cap, degree * 2)
    return v, emb.compose(emb2)


def _good_basis_rec(Q: QuadForm, cap: int, degree: int) -> tuple[QuadForm, Embedding, np.ndarray]:
    F = Q.field
    n = Q.n
    if n == 0:
        return Q, identity_embedding(F), np.zeros((0, 0), dtype=np.int64)
    r = n // 2
    A = polarize(Q)
    K = la.Subspace(F, n, la.nullspace(F, A))
    v, emb = isotropic_vector(Q, K, cap, degree)
    if emb.target != F:
        Q = Q.over(emb)
        F = emb.target
        degree *= emb.target.k // emb.source.k
        A = polarize(Q)
    line = la.Subspace.span(F, [v], n)
    qmap = la.quotient_map(line.perp(Q.gram), line)
    S = qmap.section
    sub_form = Q.restrict(S)
    sub, emb2, sub_vecs = _good_basis_rec(sub_form, cap, degree)
    if emb2.target != F:
        Q, v, S, A = Q.over(emb2), emb2(v), emb2(S), polarize(Q.over(emb2))
        emb = emb.compose(emb2)
        F = emb2.target
    lifted = la.matmul(F, sub_vecs, S) if sub_vecs.size else np.zeros((0, n), dtype=np.int64)
    # e_{-2r+1}: pairs to zero with the lifted vectors and to -1 with v
    rows = np.concatenate([lifted, v[None, :]]) if lifted.size else v[None, :]
    rhs = np.zeros(rows.shape[0], dtype=np.int64)
    rhs[-1] = F.neg(1)
    low = la.solve(F, la.matmul(F, rows, Q.gram.T), rhs)
    vectors = np.concatenate([low[None, :], lifted, v[None, :]])
    # A e_{-2r+1} must have no e_{-2r+1} component (tr A = 0)
    coords = la.matmul(F, la.matmul(F, A, low), la.inverse(F, vectors))
    if coords[0] != 0:
        raise AssertionError("diagonal coefficient of A at the lowest index is nonzero")
    return Q, emb, vectors


def good_basis(Q: QuadForm, cap: int = EXTENSION_CAP) -> GoodBasis:
    """Good basis adapted to ``Q`` (requires ``A_Q`` nilpotent)."""
    A = polarize(Q)
    if not la.is_nilpotent(Q.field, A):
        from .errors import NotNilpotent

        raise NotNilpotent("A_Q is not nilpotent")
    QE, emb, vectors = _good_basis_rec(Q, cap, 1)
    return GoodBasis(emb.target, emb, QE, odd_indices(Q.r), vectors)
