"""Gradings, filtrations and the partition of nilpotent quadratic forms into pieces.

Gradings are degree assignments on the basis vectors of ``(F^n, gram)``;
``V_i`` is the span of the basis vectors of degree ``i``.  Filtrations are
decreasing chains of subspaces ``V_{>=a}`` held between ``lo`` (the largest
``a`` with ``V_{>=a} = V``) and ``hi`` (the smallest ``a`` with
``V_{>=a} = 0``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Mapping, NamedTuple

import numpy as np

from . import linalg as la
from .classical import group_list, in_G_ge0, symplectic_gram
from .errors import (
    ConstructionInapplicable,
    NotCompatible,
    NotNilpotent,
    NotSGood,
    PreconditionError,
    ZeroSpace,
)
from .forms import QuadForm, fold, polarize_raw
from .gf import FieldDesc

# -- labels -------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class PieceLabel:
    """Graded dimensions ``(f_0, f_1, f_2, ...)`` with ``f_{-a} = f_a`` implied.

    Labels order lexicographically on this tuple.
    """

    dims: tuple[int, ...]

    def __post_init__(self):
        d = tuple(int(x) for x in self.dims)
        while d and d[-1] == 0:
            d = d[:-1]
        object.__setattr__(self, "dims", d)

    @classmethod
    def from_mapping(cls, f: Mapping[int, int]) -> "PieceLabel":
        top = max((abs(a) for a, v in f.items() if v), default=0)
        for a in range(1, top + 1):
            if f.get(a, 0) != f.get(-a, 0):
                raise ValueError("graded dimensions are not symmetric")
        return cls(tuple(f.get(a, 0) for a in range(top + 1)))

    def f(self, a: int) -> int:
        a = abs(a)
        return self.dims[a] if a < len(self.dims) else 0

    @property
    def dim(self) -> int:
        return (self.dims[0] if self.dims else 0) + 2 * sum(self.dims[1:])

    @property
    def top(self) -> int:
        return len(self.dims) - 1 if self.dims else 0

    def is_admissible(self) -> bool:
        d = list(self.dims) + [0, 0]
        if any(d[a] < 0 or (a % 2 == 0 and d[a] % 2) for a in range(len(d))):
            return False
        return all(d[a] >= d[a + 2] for a in range(len(d) - 2))

    def degrees(self) -> list[int]:
        """Degrees of the standard graded basis, nondecreasing along the basis."""
        low = []
        for a in range(self.top, 0, -1):
            low += [-a] * self.f(a)
        low += [0] * (self.f(0) // 2)
        return low + [-d for d in reversed(low)]

    def __str__(self):
        if not self.dims:
            return "empty"
        return ",".join(f"f{a}={v}" for a, v in enumerate(self.dims) if v)


def admissible_sequences(dimV: int) -> list[PieceLabel]:
    """All admissible labels for a symplectic space of dimension ``dimV``."""
    if dimV < 0 or dimV % 2:
        raise ValueError("dimV must be even and nonnegative")
    out = []

    def rec(prefix: list[int], remaining: int):
        a = len(prefix)
        if remaining == 0:
            lab = PieceLabel(tuple(prefix))
            if lab.is_admissible():
                out.append(lab)
            return
        cap = prefix[a - 2] if a >= 2 else remaining
        weight = 1 if a == 0 else 2
        for v in range(0, min(cap, remaining // weight) + 1):
            if a % 2 == 0 and v % 2:
                continue
            if v == 0 and a >= 2 and prefix[a - 1] == 0 and prefix[a - 2] == 0:
                continue  # both chains exhausted, nothing more can follow
            rec(prefix + [v], remaining - weight * v)

    rec([], dimV)
    return sorted(set(out))


# -- gradings -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SGoodGrading:
    """Degree of each basis vector of ``(F^n, gram)``."""

    field: FieldDesc
    gram: np.ndarray
    degrees: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))

    @property
    def n(self) -> int:
        return len(self.degrees)

    @cached_property
    def deg(self) -> np.ndarray:
        return np.asarray(self.degrees, dtype=np.int64).reshape(-1)

    @cached_property
    def dims(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return out

    def f(self, a: int) -> int:
        return self.dims.get(a, 0)

    def indices(self, a: int) -> np.ndarray:
        return np.nonzero(self.deg == a)[0]

    def projector(self, a: int) -> np.ndarray:
        P = la.zeros(self.n)
        idx = self.indices(a)
        P[idx, idx] = 1
        return P

    @cached_property
    def label(self) -> PieceLabel:
        return PieceLabel.from_mapping(self.dims)

    @cached_property
    def valid(self) -> bool:
        return check_s_good(self)

    def __eq__(self, other):
        return (
            isinstance(other, SGoodGrading)
            and self.field == other.field
            and self.degrees == other.degrees
            and np.array_equal(self.gram, other.gram)
        )

    def __hash__(self):
        return hash((self.field, self.degrees, self.gram.tobytes()))

    def __repr__(self):
        return f"SGoodGrading({self.field!r}, degrees={self.degrees})"


def check_s_good(grading: SGoodGrading) -> bool:
    F, G = grading.field, np.asarray(grading.gram)
    n = grading.n
    if G.shape != (n, n) or (n and la.rank(F, G) != n):
        return False
    dims = grading.dims
    top = max((abs(a) for a in dims), default=0)
    for a in range(top + 1):
        fa = dims.get(a, 0)
        if fa != dims.get(-a, 0):
            return False
        if a % 2 == 0 and fa % 2:
            return False
        if dims.get(-a, 0) < dims.get(-a - 2, 0):
            return False
    deg = grading.deg
    bad = (deg[:, None] + deg[None, :]) != 0
    return not np.any(G[bad])


def standard_grading(label: PieceLabel, F: FieldDesc) -> SGoodGrading:
    return SGoodGrading(F, symplectic_gram(F, label.dim), tuple(label.degrees()))


def coordinate_gradings(F: FieldDesc, r: int) -> list[SGoodGrading]:
    """Every s-good degree assignment on the standard symplectic basis.

    The pairing ``b_i <-> b_{n-1-i}`` forces ``deg b_{n-1-i} = -deg b_i``; the
    remaining freedom is the degrees of ``b_0, ..., b_{r-1}``.
    """
    n = 2 * r
    J = symplectic_gram(F, n)
    out = []
    for low in itertools.product(range(-(n - 1), n), repeat=r):
        degs = list(low) + [-d for d in reversed(low)]
        g = SGoodGrading(F, J, tuple(degs))
        if check_s_good(g):
            out.append(g)
    return out


class Membership(NamedTuple):
    in_Q2: bool
    in_Q2_0: bool
    in_Q_ge2: bool


def nondegenerate_on(F: FieldDesc, M: np.ndarray, W: np.ndarray) -> bool:
    """Is the form ``x -> x^T M x`` nondegenerate on the row span ``W``?

    In characteristic 2 this means no nonzero vector of the polar radical
    is a zero of the form.
    """
    k = W.shape[0]
    if k == 0:
        return True
    MW = fold(F, la.matmul(F, la.matmul(F, W, M), W.T))
    P = F.add(MW, MW.T)
    if F.p != 2:
        return la.rank(F, P) == k
    R = la.nullspace(F, P)
    if R.shape[0] == 0:
        return True
    if R.shape[0] > 1:
        return False
    r = R[0]
    return int(la.matmul(F, r, la.matmul(F, MW, r))) != 0


def _membership_raw(F: FieldDesc, grading: SGoodGrading, M: np.ndarray, A: np.ndarray) -> Membership:
    deg = grading.deg
    dk, dl = deg[:, None], deg[None, :]
    nzA = A != 0
    nzM = M != 0
    in_ge2 = not np.any(nzA & (dk < dl + 2)) and not np.any(nzM & (dk >= 0) & (dl >= 0))
    in_2 = not np.any(nzA & (dk != dl + 2)) and not np.any(nzM & (dk == dl) & (dk != -1))
    if not in_2:
        return Membership(False, False, in_ge2)
    ok = True
    powers = [la.identity(grading.n)]
    for a in sorted(x for x in grading.dims if x >= 0):
        while len(powers) <= a:
            powers.append(la.matmul(F, powers[-1], A))
        src = grading.indices(-a)
        if a % 2 == 0:
            P = powers[a][np.ix_(grading.indices(a), src)]
            ok = la.rank(F, P) == len(src)
        else:
            Aj = powers[(a - 1) // 2]
            P = Aj[np.ix_(grading.indices(-1), src)]
            ok = la.rank(F, P) == len(src) and nondegenerate_on(F, M, Aj[:, src].T)
        if not ok:
            break
    return Membership(True, ok, in_ge2)


def membership(Q: QuadForm, grading: SGoodGrading) -> Membership:
    """Flags for ``Q(V)_2``, ``Q(V)_2^0`` and ``Q(V)_{>=2}`` relative to the grading."""
    if not grading.valid:
        raise NotSGood(f"degrees {grading.degrees} are not s-good")
    F = grading.field
    A = polarize_raw(F, grading.gram, Q.coeffs)
    return _membership_raw(F, grading, Q.coeffs, A)


# -- filtrations --------------------------------------------------------------


class Filtration:
    """A decreasing filtration ``V_{>=a}`` of ``(F^n, gram)``."""

    __slots__ = ("field", "gram", "lo", "levels", "__dict__")

    def __init__(self, F: FieldDesc, gram: np.ndarray, lo: int, levels):
        n = gram.shape[0]
        levels = list(levels)
        if not levels or levels[0].dim != n or levels[-1].dim != 0:
            raise ValueError("levels must run from V down to 0")
        for a in range(len(levels) - 1):
            if not levels[a + 1] <= levels[a]:
                raise ValueError("levels are not decreasing")
        while len(levels) > 2 and levels[1].dim == n:
            levels.pop(0)
            lo += 1
        while len(levels) > 2 and levels[-2].dim == 0:
            levels.pop()
        self.field = F
        self.gram = gram
        self.lo = lo
        self.levels = tuple(levels)

    @classmethod
    def from_mapping(cls, F: FieldDesc, gram: np.ndarray, levels: Mapping[int, la.Subspace]) -> "Filtration":
        """Build from ``a -> V_{>=a}`` on a contiguous range that starts at V and ends at 0."""
        keys = sorted(levels)
        return cls(F, gram, keys[0], [levels[a] for a in range(keys[0], keys[-1] + 1)])

    @classmethod
    def from_grading(cls, grading: SGoodGrading) -> "Filtration":
        F, n = grading.field, grading.n
        degs = grading.degrees or (0,)
        lo, hi = min(degs), max(degs) + 1
        levels = []
        for a in range(lo, hi + 1):
            idx = np.nonzero(grading.deg >= a)[0]
            basis = la.identity(n)[idx] if n else np.zeros((0, 0), dtype=np.int64)
            levels.append(la.Subspace(F, n, basis))
        return cls(F, grading.gram, lo, levels)

    @property
    def n(self) -> int:
        return self.gram.shape[0]

    @property
    def hi(self) -> int:
        return self.lo + len(self.levels) - 1

    def level(self, a: int) -> la.Subspace:
        if a <= self.lo:
            return self.levels[0]
        if a >= self.hi:
            return self.levels[-1]
        return self.levels[a - self.lo]

    @cached_property
    def dims(self) -> dict[int, int]:
        return {
            a: self.level(a).dim - self.level(a + 1).dim
            for a in range(self.lo, self.hi)
            if self.level(a).dim - self.level(a + 1).dim
        }

    @cached_property
    def label(self) -> PieceLabel:
        return PieceLabel.from_mapping(self.dims)

    @cached_property
    def top_degree(self) -> int:
        return max((abs(a) for a in self.dims), default=0)

    def key(self):
        return (self.lo, tuple(s.basis.tobytes() for s in self.levels), tuple(s.dim for s in self.levels))

    def __eq__(self, other):
        return isinstance(other, Filtration) and self.field == other.field and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        parts = ", ".join(f"V>={a}: dim {self.level(a).dim}" for a in range(self.lo, self.hi + 1))
        return f"Filtration({parts})"

    def sections(self, shift: bool = False) -> tuple[np.ndarray, tuple[int, ...]]:
        """Lifts of a basis of each graded piece, ordered by degree.

        With ``shift`` the first basis vector of ``V_{>=a+1}`` is added to
        every lift of degree ``a``, giving a second, different section.
        """
        rows, degs = [], []
        for a in range(self.lo, self.hi):
            qm = la.quotient_map(self.level(a), self.level(a + 1))
            S = qm.section
            nxt = self.level(a + 1)
            if shift and nxt.dim and S.shape[0]:
                S = self.field.add(S, nxt.basis[0][None, :])
            rows.append(S)
            degs += [a] * S.shape[0]
        L = np.concatenate(rows) if rows else np.zeros((0, self.n), dtype=np.int64)
        return L, tuple(degs)

    @cached_property
    def graded(self) -> tuple[SGoodGrading, np.ndarray]:
        """The associated graded space with its induced pairing, plus the section used."""
        L, degs = self.sections()
        return graded_grading(self.field, self.gram, L, degs), L


def graded_grading(F: FieldDesc, gram: np.ndarray, L: np.ndarray, degs) -> SGoodGrading:
    full = la.matmul(F, la.matmul(F, L, gram), L.T) if L.size else la.zeros(0)
    deg = np.asarray(degs, dtype=np.int64)
    G0 = np.where((deg[:, None] + deg[None, :]) == 0, full, 0).astype(np.int64)
    return SGoodGrading(F, G0, tuple(degs))


def check_filtration(filt: Filtration) -> bool:
    G = filt.gram
    lo, hi = filt.lo, filt.hi
    for a in range(min(lo, 1 - hi) - 1, max(hi, 1 - lo) + 2):
        if filt.level(a).perp(G) != filt.level(1 - a):
            return False
    grading, _ = filt.graded
    return check_s_good(grading)


# -- induced form on the associated graded ------------------------------------


def compatible(F: FieldDesc, filt: Filtration, M: np.ndarray, A: np.ndarray) -> bool:
    """``A(V_{>=a}) <= V_{>=a+2}`` for all a and ``Q|V_{>=0} = 0``."""
    for a in range(filt.lo, filt.hi):
        src = filt.level(a)
        if src.dim == 0:
            continue
        img = la.matmul(F, src.basis, A.T)
        if np.any(img) and not all(filt.level(a + 2).contains(v) for v in img):
            return False
    V0 = filt.level(0).basis
    if V0.shape[0] and np.any(fold(F, la.matmul(F, la.matmul(F, V0, M), V0.T))):
        return False
    return True


def induced_matrix(F: FieldDesc, gram: np.ndarray, M: np.ndarray, A: np.ndarray, L: np.ndarray, degs) -> np.ndarray:
    """Coefficients of ``Q(x_{-1}) + sum_{a<=-2} (A x_a, x_{-a-2})`` on graded coordinates."""
    deg = np.asarray(degs, dtype=np.int64)
    d = len(deg)
    N = la.zeros(d)
    m1 = np.nonzero(deg == -1)[0]
    if m1.size:
        N[np.ix_(m1, m1)] = la.matmul(F, la.matmul(F, L[m1], M), L[m1].T)
    AtJ = la.matmul(F, A.T, gram)
    for a in sorted(set(deg.tolist())):
        if a > -2:
            continue
        src, dst = np.nonzero(deg == a)[0], np.nonzero(deg == -a - 2)[0]
        if src.size and dst.size:
            N[np.ix_(src, dst)] = la.matmul(F, la.matmul(F, L[src], AtJ), L[dst].T)
    return fold(F, N)


def induced_form(Q: QuadForm, filt: Filtration, *, check_lifts: bool = True) -> QuadForm:
    """The form induced by ``Q`` on ``gr(V_*)``, in the graded section basis."""
    F = Q.field
    A = polarize_raw(F, Q.gram, Q.coeffs)
    if not compatible(F, filt, Q.coeffs, A):
        raise NotCompatible("Q is not compatible with the filtration")
    grading, L = filt.graded
    Mbar = induced_matrix(F, Q.gram, Q.coeffs, A, L, grading.degrees)
    if check_lifts:
        L2, degs = filt.sections(shift=True)
        if not np.array_equal(Mbar, induced_matrix(F, Q.gram, Q.coeffs, A, L2, degs)):
            raise AssertionError("induced form depends on the choice of lifts")
    return QuadForm(F, grading.gram, Mbar)


def zeta_membership(Q: QuadForm, filt: Filtration) -> bool:
    try:
        Qbar = induced_form(Q, filt, check_lifts=False)
    except NotCompatible:
        return False
    grading, _ = filt.graded
    return membership(Qbar, grading).in_Q2_0


# -- invariants and the classifier --------------------------------------------


@dataclass(frozen=True)
class EFInvariants:
    e: int
    f: int
    H: la.Subspace
    m: int


def _additive_zero_set(F: FieldDesc, M: np.ndarray, K: la.Subspace) -> la.Subspace:
    """Zeros in ``K`` of a characteristic-2 form that is additive on ``K``."""
    n = K.ambient_dim
    if K.dim == 0:
        return K
    B = K.basis
    MK = fold(F, la.matmul(F, la.matmul(F, B, M), B.T))
    if np.any(F.add(MK, MK.T)):
        raise AssertionError("form is not additive on the subspace")
    roots = np.array([F.sqrt2(int(MK[i, i])) for i in range(K.dim)], dtype=np.int64)
    if not np.any(roots):
        return K
    coords = la.nullspace(F, roots[None, :])
    return la.Subspace(F, n, la.matmul(F, coords, B))


def _top_step(F: FieldDesc, gram: np.ndarray, M: np.ndarray, A: np.ndarray):
    """``(e, f, H, m)`` for a nilpotent form; odd p uses ``H = ker A^{e-1}``."""
    n = gram.shape[0]
    try:
        e = la.nilpotency_index(F, A)
    except ValueError:
        raise NotNilpotent("A_Q is not nilpotent") from None
    Ae1 = la.matpow(F, A, e - 1)
    P = la.identity(n)
    f = 0
    while np.any(fold(F, la.matmul(F, la.matmul(F, P.T, M), P))):
        P = la.matmul(F, P, A)
        f += 1
    m = max(e - 1, 2 * f - 1)
    if F.p != 2:
        return e, f, la.Subspace(F, n, la.nullspace(F, Ae1)), e - 1
    kerA = la.Subspace(F, n, la.nullspace(F, Ae1))
    if e >= 2 * f + 1:
        H = kerA
    else:
        Af = la.matpow(F, A, f - 1)
        Mf = fold(F, la.matmul(F, la.matmul(F, Af.T, M), Af))
        H = _additive_zero_set(F, Mf, kerA if e == 2 * f else la.Subspace.full(F, n))
    return e, f, H, m


def ef_invariants(Q: QuadForm) -> EFInvariants:
    """The invariants ``e, f, H_Q, m`` (characteristic 2)."""
    if Q.n == 0:
        raise ZeroSpace("V = 0")
    if Q.field.p != 2:
        raise PreconditionError("the case split for H_Q is defined in characteristic 2 only")
    A = polarize_raw(Q.field, Q.gram, Q.coeffs)
    e, f, H, m = _top_step(Q.field, Q.gram, Q.coeffs, A)
    return EFInvariants(e, f, H, m)


def _classify_rec(F: FieldDesc, G: np.ndarray, M: np.ndarray) -> dict[int, la.Subspace]:
    n = G.shape[0]
    full, zero = la.Subspace.full(F, n), la.Subspace.zero(F, n)
    if n == 0:
        return {0: full, 1: zero}
    A = polarize_raw(F, G, M)
    _, _, H, m = _top_step(F, G, M, A)
    if m == 0:
        if np.any(M):
            raise AssertionError("m = 0 with a nonzero form")
        return {0: full, 1: zero}
    Hp = H.perp(G)
    if not Hp <= H:
        raise AssertionError("H_Q is not coisotropic")
    if Hp.dim and np.any(fold(F, la.matmul(F, la.matmul(F, Hp.basis, M), Hp.basis.T))):
        raise AssertionError("Q does not vanish on the perp of H_Q")
    if Hp.dim and H.dim and np.any(la.matmul(F, la.matmul(F, H.basis, la.matmul(F, A.T, G)), Hp.basis.T)):
        raise AssertionError("A_Q pairs H_Q with its perp")
    S = la.quotient_map(H, Hp).section
    if S.shape[0] >= n:
        raise AssertionError("classification recursion did not shrink the space")
    if S.shape[0]:
        Gs = la.matmul(F, la.matmul(F, S, G), S.T)
        Ms = fold(F, la.matmul(F, la.matmul(F, S, M), S.T))
        inner = _classify_rec(F, Gs, Ms)
    else:
        inner = {0: la.Subspace.full(F, 0), 1: la.Subspace.zero(F, 0)}
    lo_in, hi_in = min(inner), max(inner)

    def inner_level(a):
        return inner[min(max(a, lo_in), hi_in)]

    if inner_level(-m + 1).dim != S.shape[0] or inner_level(m).dim != 0:
        raise AssertionError("inner filtration exceeds the degree range")
    levels = {-m: full, m + 1: zero}
    for a in range(-m + 1, m + 1):
        sub = inner_level(a)
        rows = la.matmul(F, sub.basis, S) if sub.dim else np.zeros((0, n), dtype=np.int64)
        levels[a] = la.Subspace(F, n, np.concatenate([rows, Hp.basis]))
    if levels[-m + 1] != H or levels[m] != Hp:
        raise AssertionError("spliced filtration does not match H_Q")
    return levels


class Classification(NamedTuple):
    filtration: Filtration
    label: PieceLabel


def classify(Q: QuadForm) -> Classification:
    """The unique filtration ``V_*`` with ``Q`` in ``zeta(V_*)``, and its label."""
    levels = _classify_rec(Q.field, Q.gram, Q.coeffs)
    filt = Filtration.from_mapping(Q.field, Q.gram, levels)
    return Classification(filt, filt.label)


def _label_rec(F: FieldDesc, G: np.ndarray, M: np.ndarray, memo: dict) -> tuple[int, ...]:
    """Graded dimensions ``(f_{-top}, ..., f_top)`` as a dense tuple, top first."""
    n = G.shape[0]
    if n == 0 or not np.any(M):
        return (n,)
    key = (G.tobytes(), M.tobytes(), n)
    hit = memo.get(key)
    if hit is not None:
        return hit
    A = polarize_raw(F, G, M)
    _, _, H, m = _top_step(F, G, M, A)
    Hp = H.perp(G)
    S = la.complement_basis(H, Hp)
    if S.shape[0]:
        Gs = la.matmul(F, la.matmul(F, S, G), S.T)
        Ms = fold(F, la.matmul(F, la.matmul(F, S, M), S.T))
        inner = _label_rec(F, Gs, Ms, memo)
    else:
        inner = (0,)
    width = len(inner) // 2  # inner covers degrees -width .. width
    if width >= m:
        raise AssertionError("inner filtration exceeds the degree range")
    pad = (0,) * (m - 1 - width)
    out = (Hp.dim,) + pad + inner + pad + (Hp.dim,)
    memo[key] = out
    return out


def classify_label(Q: QuadForm, memo: dict | None = None) -> PieceLabel:
    """The label of ``classify(Q)`` without building the filtration.

    ``memo`` may be shared across calls on forms over the same field.
    """
    dense = _label_rec(Q.field, Q.gram, Q.coeffs, {} if memo is None else memo)
    top = len(dense) // 2
    return PieceLabel(dense[top:])


# -- enumerating filtrations --------------------------------------------------


def all_subspaces(F: FieldDesc, n: int, k: int) -> Iterator[np.ndarray]:
    """RREF bases of every k-dimensional subspace of F^n."""
    if k == 0:
        yield np.zeros((0, n), dtype=np.int64)
        return
    for pivots in itertools.combinations(range(n), k):
        free = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pivots]
        for vals in itertools.product(range(F.q), repeat=len(free)):
            R = np.zeros((k, n), dtype=np.int64)
            for i, p in enumerate(pivots):
                R[i, p] = 1
            for (i, j), v in zip(free, vals):
                R[i, j] = v
            yield R


def enumerate_filtrations(F: FieldDesc, r: int, label: PieceLabel | None = None) -> list[Filtration]:
    """Every filtration in ``F_s(V)`` over F for ``V = F^{2r}`` (optionally of one label)."""
    labels = [label] if label is not None else admissible_sequences(2 * r)
    n = 2 * r
    J = symplectic_gram(F, n)
    out = []
    for lab in labels:
        top = lab.top
        # dims of V_{>=a} for a = 1 .. top + 1
        dims = [sum(lab.f(b) for b in range(a, top + 1)) for a in range(1, top + 2)]
        for chain in _isotropic_chains(F, J, n, dims):
            levels = {a + 1: chain[a] for a in range(len(chain))}
            for a in range(0, -top - 1, -1):
                levels[a] = levels[1 - a].perp(J)
            filt = Filtration.from_mapping(F, J, levels)
            if filt.label != lab:  # pragma: no cover - guarded by construction
                raise AssertionError("enumerated filtration has the wrong label")
            out.append(filt)
    return out


def _isotropic_chains(F: FieldDesc, J: np.ndarray, n: int, dims: list[int]):
    if not dims or dims[0] == 0:
        yield [la.Subspace.zero(F, n)] * max(len(dims), 1)
        return
    for B in all_subspaces(F, n, dims[0]):
        if np.any(la.matmul(F, la.matmul(F, B, J), B.T)):
            continue
        top = la.Subspace(F, n, B)
        yield from _subchains(F, n, top, dims[1:], [top])


def _subchains(F, n, current, dims, acc):
    if not dims:
        yield acc
        return
    for C in all_subspaces(F, current.dim, dims[0]):
        sub = la.Subspace(F, n, la.matmul(F, C, current.basis)) if C.shape[0] else la.Subspace.zero(F, n)
        yield from _subchains(F, n, sub, dims[1:], acc + [sub])


# -- witnesses and stabilizers ------------------------------------------------


@dataclass(frozen=True)
class Witness:
    matrix: np.ndarray
    path: str  # "non-injective", "even-degree", "odd-degree" or "search"
    attempts: int = 0


def witness_holds(Q: QuadForm, grading: SGoodGrading, B: np.ndarray) -> bool:
    """B preserves the pairing and Q, and does not preserve the grading filtration."""
    F = Q.field
    G = grading.gram
    if not np.array_equal(la.matmul(F, la.matmul(F, B.T, G), B), G):
        return False
    if not Q.compose(B) == Q:
        return False
    return not in_G_ge0(grading.degrees, B)


def _elements(F: FieldDesc, basis: np.ndarray, limit: int = 256):
    k = basis.shape[0]
    count = 0
    for c in itertools.product(range(F.q), repeat=k):
        if not any(c):
            continue
        yield la.matmul(F, np.array(c, dtype=np.int64), basis)
        count += 1
        if count >= limit:
            return


def _kernel_in(F: FieldDesc, M: np.ndarray, idx: np.ndarray, n: int) -> np.ndarray:
    """Vectors supported on ``idx`` killed by ``M``."""
    if idx.size == 0:
        return np.zeros((0, n), dtype=np.int64)
    K = la.nullspace(F, M[:, idx])
    out = np.zeros((K.shape[0], n), dtype=np.int64)
    out[:, idx] = K
    return out


def _rank_one(F, G, P, e, u):
    """Matrix of ``x -> (u, P x) e``."""
    row = la.matmul(F, la.matmul(F, u, G), P)
    return F.mul(e[:, None], row[None, :])


def _recipes(Q: QuadForm, grading: SGoodGrading):
    F, G = Q.field, grading.gram
    n = grading.n
    A = polarize_raw(F, G, Q.coeffs)
    I = la.identity(n)
    dims = grading.dims
    top = max((abs(a) for a in dims), default=0)
    # A: V_{-i} -> V_{-i+2} not injective
    for i in range(2, top + 1):
        K1 = _kernel_in(F, A, grading.indices(-i), n)
        K2 = _kernel_in(F, A, grading.indices(i - 2), n)
        if not (K1.shape[0] and K2.shape[0]):
            continue
        P_lo, P_hi = grading.projector(-i + 2), grading.projector(i)
        for e_lo in _elements(F, K1):
            for e_hi in _elements(F, K2):
                B = F.add(I, F.add(_rank_one(F, G, P_lo, e_lo, e_hi), _rank_one(F, G, P_hi, e_hi, e_lo)))
                yield "non-injective", B
    # A^n: V_{-n} -> V_n not an isomorphism, n even
    for nn in range(2, top + 1, 2):
        An = la.matpow(F, A, nn)
        K = _kernel_in(F, An, grading.indices(-nn), n)
        if K.shape[0] < 2:
            continue
        vecs = list(_elements(F, K, 64))
        for e0, f0 in itertools.combinations(vecs, 2):
            if la.rank(F, np.stack([e0, f0])) < 2:
                continue
            es, fs = [e0], [f0]
            for _ in range(nn - 1):
                es.append(la.matmul(F, A, es[-1]))
                fs.append(la.matmul(F, A, fs[-1]))
            B = I.copy()
            for j in range(nn):
                P = grading.projector(2 * j - nn + 2)
                B = F.add(B, _rank_one(F, G, P, es[j], fs[nn - j - 1]))
                B = F.add(B, _rank_one(F, G, P, fs[j], es[nn - j - 1]))
            yield "even-degree", B
    # degenerate restriction in odd degree N = 2k + 1
    for N in range(1, top + 1, 2):
        src = grading.indices(-N)
        if src.size == 0:
            continue
        k = (N - 1) // 2
        Ak = la.matpow(F, A, k)
        W = la.Subspace(F, n, Ak[:, src].T)
        for xi in _elements(F, W.basis):
            if Q(xi) != 0 or np.any(la.matmul(F, la.matmul(F, W.basis, la.matmul(F, A.T, G)), xi)):
                continue
            c = la.solve(F, Ak[:, src], xi)
            if c is None:  # pragma: no cover - xi lies in the image
                continue
            e0 = np.zeros(n, dtype=np.int64)
            e0[src] = c
            es = [e0]
            for _ in range(2 * k):
                es.append(la.matmul(F, A, es[-1]))
            B = I.copy()
            for j in range(2 * k + 1):
                P = grading.projector(-2 * k + 2 * j + 1)
                B = F.add(B, _rank_one(F, G, P, es[j], es[2 * k - j]))
            yield "odd-degree", B


@lru_cache(maxsize=8)
def _symplectic_group(F: FieldDesc, n: int) -> np.ndarray:
    return group_list("C", n, F)


RECIPES = ("non-injective", "even-degree", "odd-degree")


def find_witness(
    Q: QuadForm, grading: SGoodGrading, *, allow_search: bool = True, recipes: tuple[str, ...] = RECIPES
) -> Witness:
    """B in Sp(V) with ``Q o B = Q`` outside ``G_{>=0}``, for Q in ``Q(V)_2`` minus ``Q(V)_2^0``.

    Constructive recipes (restricted to ``recipes``) are tried first; the
    exhaustive group search is the last resort.
    """
    F = Q.field
    if F.p != 2:
        raise PreconditionError("witness construction needs characteristic 2")
    flags = membership(Q, grading)
    if not flags.in_Q2 or flags.in_Q2_0:
        raise PreconditionError("Q must lie in Q(V)_2 but not in Q(V)_2^0")
    attempts = 0
    for path, B in _recipes(Q, grading):
        if path not in recipes:
            continue
        attempts += 1
        if witness_holds(Q, grading, B):
            return Witness(B, path, attempts)
    if allow_search and np.array_equal(grading.gram, symplectic_gram(F, grading.n)):
        for B in _symplectic_group(F, grading.n):
            attempts += 1
            if witness_holds(Q, grading, B):
                return Witness(B, "search", attempts)
    raise ConstructionInapplicable("no witness recipe applies")


def witness(Q: QuadForm, grading: SGoodGrading) -> np.ndarray:
    return find_witness(Q, grading).matrix


def stabilizer(Q: QuadForm, group: np.ndarray | None = None) -> np.ndarray:
    """Elements of the rational symplectic group fixing Q (standard Gram only)."""
    F = Q.field
    if group is None:
        group = _symplectic_group(F, Q.n)
    N = la.matmul(F, la.matmul(F, np.swapaxes(group, -1, -2), Q.coeffs), group)
    folded = np.triu(F.add(np.triu(N), np.swapaxes(np.tril(N, -1), -1, -2)))
    keep = np.all(folded == Q.coeffs, axis=(-1, -2))
    return group[keep]


def stabilizer_subordinate(Q: QuadForm, grading: SGoodGrading, group: np.ndarray | None = None) -> bool:
    """Every rational B in Sp(V) fixing Q lies in ``G_{>=0}`` of the grading."""
    if not grading.valid:
        raise NotSGood(f"degrees {grading.degrees} are not s-good")
    if not np.array_equal(grading.gram, symplectic_gram(Q.field, grading.n)):
        raise PreconditionError("stabilizer checks use the standard symplectic Gram matrix")
    fixers = stabilizer(Q, group)
    deg = grading.deg
    bad = deg[:, None] < deg[None, :]
    return not np.any(fixers[:, bad])
