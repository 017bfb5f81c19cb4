"""Exact linear algebra over a :class:`~nilcone.gf.FieldDesc`.

Matrices and vectors are integer numpy arrays of field-element encodings; the
field is passed explicitly.  Subspaces are stored by their reduced row echelon
basis, so two generating sets of one subspace give equal :class:`Subspace`
values.  Over GF(2) row reduction runs on rows packed into Python ints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotASubspace
from .gf import FieldDesc


def as_matrix(rows, cols: int | None = None) -> np.ndarray:
    M = np.array(rows, dtype=np.int64)
    if M.ndim == 1:
        M = M.reshape(0 if M.size == 0 else 1, -1) if cols is None else M.reshape(-1, cols)
    if M.size == 0 and cols is not None:
        M = M.reshape(0, cols)
    return M


def zeros(n: int, m: int | None = None) -> np.ndarray:
    return np.zeros((n, n if m is None else m), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(F: FieldDesc, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix product; leading axes broadcast as in ``numpy.matmul``."""
    if F.k == 1:
        return np.matmul(A, B) % F.p
    A = np.asarray(A)
    B = np.asarray(B)
    row = A.ndim == 1
    if row:
        A = A[None, :]
    vec = B.ndim == 1
    if vec:
        B = B[:, None]
    out = None
    for j in range(A.shape[-1]):
        term = F.mul(A[..., :, j, None], B[..., None, j, :])
        out = term if out is None else F.add(out, term)
    if out is None:
        out = np.zeros(A.shape[:-1] + B.shape[-1:], dtype=np.int64)
    if vec:
        out = out[..., 0]
    return out[..., 0, :] if row and not vec else (out[..., 0] if row else out)


def matpow(F: FieldDesc, A: np.ndarray, e: int) -> np.ndarray:
    result = np.broadcast_to(identity(A.shape[-1]), A.shape).copy()
    base = A
    while e:
        if e & 1:
            result = matmul(F, result, base)
        e >>= 1
        if e:
            base = matmul(F, base, base)
    return result


def is_nilpotent(F: FieldDesc, M: np.ndarray) -> bool:
    """True iff ``M**n == 0`` for the n x n matrix ``M``."""
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("square matrix expected")
    return not np.any(matpow(F, M, n))


def nilpotency_index(F: FieldDesc, M: np.ndarray) -> int:
    """Smallest e >= 1 with ``M**e == 0``; raises if ``M`` is not nilpotent."""
    n = M.shape[0]
    P = M.copy()
    for e in range(1, n + 1):
        if not np.any(P):
            return e
        P = matmul(F, P, M)
    if not np.any(P):
        return n + 1  # pragma: no cover - M**n == 0 always reached first
    raise ValueError("matrix is not nilpotent")


def transpose(M: np.ndarray) -> np.ndarray:
    return np.swapaxes(M, -1, -2)


# -- row reduction ------------------------------------------------------------


def _rref_gf2(M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    m, n = M.shape
    weights = [1 << (n - 1 - j) for j in range(n)]
    rows = [sum(w for w, x in zip(weights, row) if x) for row in M.tolist()]
    pivots: list[int] = []
    r = 0
    for col in range(n):
        bit = weights[col]
        piv = next((i for i in range(r, m) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        for i in range(m):
            if i != r and rows[i] & bit:
                rows[i] ^= pr
        pivots.append(col)
        r += 1
        if r == m:
            break
    out = np.zeros((m, n), dtype=np.int64)
    for i, v in enumerate(rows):
        if v:
            out[i] = [(v >> (n - 1 - j)) & 1 for j in range(n)]
    return out, pivots


def _rref_generic(F: FieldDesc, M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    R = np.array(M, dtype=np.int64, copy=True)
    m, n = R.shape
    pivots: list[int] = []
    r = 0
    for col in range(n):
        if r == m:
            break
        nz = np.nonzero(R[r:, col])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        lead = int(R[r, col])
        if lead != 1:
            R[r] = F.mul(R[r], F.inv(lead))
        factors = R[:, col].copy()
        factors[r] = 0
        if np.any(factors):
            R = F.sub(R, F.mul(factors[:, None], R[r][None, :]))
        pivots.append(col)
        r += 1
    return R, pivots


def rref(F: FieldDesc, M: np.ndarray, *, fast: bool = True) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.

    ``fast=False`` forces the generic path even over GF(2).
    """
    M = np.asarray(M, dtype=np.int64)
    if M.ndim != 2:
        raise ValueError("matrix expected")
    if M.shape[0] == 0 or M.shape[1] == 0:
        return M.copy(), []
    if fast and F.q == 2:
        return _rref_gf2(M)
    return _rref_generic(F, M)


def rank(F: FieldDesc, M: np.ndarray) -> int:
    return len(rref(F, M)[1])


def nullspace(F: FieldDesc, M: np.ndarray, *, fast: bool = True) -> np.ndarray:
    """Basis (rows, in RREF) of ``{x : M x = 0}``."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1]
    R, pivots = rref(F, M, fast=fast)
    free = [j for j in range(n) if j not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for t, j in enumerate(free):
        basis[t, j] = 1
        for i, pc in enumerate(pivots):
            if R[i, j]:
                basis[t, pc] = F.neg(int(R[i, j]))
    if len(free) > 1:
        basis, _ = rref(F, basis, fast=fast)
    return basis


def solve(F: FieldDesc, A: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """One solution of ``A x = b`` (free variables set to 0), or None."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    m, n = A.shape
    aug = np.concatenate([A, b[:, None]], axis=1)
    R, pivots = rref(F, aug)
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = R[i, n]
    return x


def inverse(F: FieldDesc, A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    R, pivots = rref(F, np.concatenate([A, identity(n)], axis=1))
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return R[:, n:].copy()


def rank_kernel(F: FieldDesc, M: np.ndarray) -> tuple[int, "Subspace"]:
    M = np.asarray(M, dtype=np.int64)
    return rank(F, M), Subspace(F, M.shape[1], nullspace(F, M))


# -- subspaces ----------------------------------------------------------------


class Subspace:
    """A subspace of F^n, held by its canonical RREF basis."""

    __slots__ = ("field", "ambient_dim", "basis", "pivots", "_key")

    def __init__(self, field: FieldDesc, ambient_dim: int, basis: np.ndarray | None = None):
        basis = np.zeros((0, ambient_dim), dtype=np.int64) if basis is None else np.asarray(basis, dtype=np.int64)
        if basis.ndim == 1:
            basis = basis.reshape(-1, ambient_dim)
        R, pivots = rref(field, basis) if basis.shape[0] else (basis, [])
        R = R[: len(pivots)].copy()
        R.setflags(write=False)
        self.field = field
        self.ambient_dim = ambient_dim
        self.basis = R
        self.pivots = tuple(pivots)
        self._key = (ambient_dim, R.tobytes())

    @classmethod
    def span(cls, F: FieldDesc, vectors, ambient_dim: int) -> "Subspace":
        return cls(F, ambient_dim, as_matrix(vectors, ambient_dim))

    @classmethod
    def full(cls, F: FieldDesc, n: int) -> "Subspace":
        return cls(F, n, identity(n))

    @classmethod
    def zero(cls, F: FieldDesc, n: int) -> "Subspace":
        return cls(F, n)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __len__(self):
        return self.dim

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.field == other.field and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Subspace(dim={self.dim}/{self.ambient_dim}, basis={self.basis.tolist()})"

    def coordinates(self, v: np.ndarray) -> np.ndarray | None:
        """Coordinates of ``v`` in ``self.basis``, or None if ``v`` is outside."""
        v = np.asarray(v, dtype=np.int64)
        c = v[list(self.pivots)] if self.pivots else np.zeros(0, dtype=np.int64)
        back = matmul(self.field, c, self.basis) if self.dim else np.zeros_like(v)
        return c if np.array_equal(back, v) else None

    def contains(self, v) -> bool:
        return self.coordinates(v) is not None

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains(row) for row in self.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.field, self.ambient_dim, np.concatenate([self.basis, other.basis]))

    def intersect(self, other: "Subspace") -> "Subspace":
        # x = a B1 = b B2  <=>  [a, b] in ker [B1; -B2]^T
        F = self.field
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(F, self.ambient_dim)
        stacked = np.concatenate([self.basis, F.neg(other.basis)]).T
        kern = nullspace(F, stacked)
        vecs = matmul(F, kern[:, : self.dim], self.basis) if kern.shape[0] else kern[:, :0]
        return Subspace(F, self.ambient_dim, vecs.reshape(-1, self.ambient_dim))

    def perp(self, gram: np.ndarray) -> "Subspace":
        """``{x : (x, u) = 0 for all u}`` with ``(x, y) = x^T gram y``."""
        F = self.field
        if self.dim == 0:
            return Subspace.full(F, self.ambient_dim)
        return Subspace(F, self.ambient_dim, nullspace(F, matmul(F, self.basis, transpose(gram))))

    def image(self, M: np.ndarray) -> "Subspace":
        """Image under ``x -> M x``."""
        if self.dim == 0:
            return Subspace.zero(self.field, M.shape[0])
        return Subspace(self.field, M.shape[0], matmul(self.field, self.basis, transpose(M)))

    def preimage(self, M: np.ndarray) -> "Subspace":
        """``{x : M x in self}``."""
        F = self.field
        # M x in U  <=>  N M x = 0 where rows of N span Ann(U)
        N = nullspace(F, self.basis) if self.dim else identity(self.ambient_dim)
        if N.shape[0] == 0:
            return Subspace.full(F, M.shape[1])
        return Subspace(F, M.shape[1], nullspace(F, matmul(F, N, M)))

    def elements(self):
        """Iterate over all vectors, in lexicographic order of coordinates."""
        F = self.field
        k = self.dim
        for idx in range(F.q**k):
            c = np.array([(idx // F.q ** (k - 1 - i)) % F.q for i in range(k)], dtype=np.int64)
            yield matmul(F, c, self.basis) if k else np.zeros(self.ambient_dim, dtype=np.int64)


def annihilator(U: Subspace) -> Subspace:
    """``Ann(U)`` in dual coordinates (the coordinate pairing)."""
    F, n = U.field, U.ambient_dim
    if U.dim == 0:
        return Subspace.full(F, n)
    return Subspace(F, n, nullspace(F, U.basis))


@dataclass(frozen=True)
class QuotientMap:
    """Projection ``W -> W / W'`` with a section.

    ``section`` rows are coset representatives whose classes form the basis
    of the quotient; ``project`` returns coordinates in that basis.
    """

    field: FieldDesc
    W: Subspace
    sub: Subspace
    section: np.ndarray
    _solver: np.ndarray

    @property
    def dim(self) -> int:
        return self.section.shape[0]

    def project(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        coords = self.W.coordinates(v)
        if coords is None:
            raise NotASubspace("vector is not in W")
        full = matmul(self.field, coords, self._solver)
        return full[self.sub.dim :]

    def lift(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        if self.dim == 0:
            return np.zeros(self.W.ambient_dim, dtype=np.int64)
        return matmul(self.field, coords, self.section)


def complement_basis(W: Subspace, sub: Subspace) -> np.ndarray:
    """Rows of ``W.basis`` that extend ``sub.basis`` to a basis of ``W``."""
    if W.dim == 0:
        return np.zeros((0, W.ambient_dim), dtype=np.int64)
    stacked = np.concatenate([sub.basis, W.basis])
    # pivot columns of the transpose pick the earliest independent rows
    _, pivots = rref(W.field, stacked.T)
    picked = [i - sub.dim for i in pivots if i >= sub.dim]
    return W.basis[picked].copy().reshape(-1, W.ambient_dim)


def quotient_map(W: Subspace, sub: Subspace) -> QuotientMap:
    if not sub <= W:
        raise NotASubspace("W' is not contained in W")
    F = W.field
    section = complement_basis(W, sub)
    # rows of [sub; section] in W-coordinates form an invertible matrix
    stacked = np.concatenate([sub.basis, section])
    if stacked.shape[0]:
        in_w = np.array([W.coordinates(v) for v in stacked], dtype=np.int64)
        solver = inverse(F, in_w)
    else:
        solver = zeros(0)
    section.setflags(write=False)
    return QuotientMap(F, W, sub, section, solver)


def vec_key(v: np.ndarray) -> bytes:
    return np.asarray(v, dtype=np.int64).tobytes()
