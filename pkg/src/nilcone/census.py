"""Exhaustive point counts over small finite fields.

Enumerations walk coefficient vectors in lexicographic order (first
coordinate most significant).  The index range is cut into contiguous
shards; per-shard counts are summed in shard order, so totals do not depend
on the number of shards or workers.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import classical as cl
from . import forms as fm
from . import linalg as la
from . import pieces as pc
from .errors import BudgetExceeded, InsufficientPoints, NonIntegralRatio, WrongKind
from .gf import FieldDesc, field_of_order

DEFAULT_BUDGET = 2**32
CHUNK = 1 << 15
CSV_FIELDS = ("kind", "rank", "q", "target", "label", "count", "expected", "status", "elapsed_ms")


def budget() -> int:
    """Enumeration budget: ``NILCONE_BUDGET`` if set, else 2**32."""
    raw = os.environ.get("NILCONE_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def check_budget(size: int, limit: int | None = None) -> None:
    limit = budget() if limit is None else limit
    if size > limit:
        raise BudgetExceeded(f"enumeration of {size} points exceeds budget {limit}")


# -- reports ------------------------------------------------------------------


@dataclass
class CountReport:
    kind: str
    rank: int
    q: int
    target: str
    counts: dict[str, int]
    expected: int | None = None
    elapsed: float = 0.0
    shards: int = 1
    order: str = "lexicographic"
    extra: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def status(self) -> str:
        if self.expected is None:
            return "OK"
        return "OK" if self.total == self.expected else "FAILED"

    @property
    def ok(self) -> bool:
        return self.status == "OK"

    def as_dict(self, timing: bool = True) -> dict:
        d = {
            "kind": self.kind,
            "rank": self.rank,
            "q": self.q,
            "target": self.target,
            "counts": dict(self.counts),
            "total": self.total,
            "expected": self.expected,
            "status": self.status,
            "shards": self.shards,
            "order": self.order,
        }
        if self.extra:
            d["extra"] = self.extra
        if timing:
            d["elapsed_ms"] = round(self.elapsed * 1000, 3)
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.as_dict(timing), indent=2, sort_keys=True)

    def csv_rows(self, timing: bool = True) -> list[dict]:
        ms = round(self.elapsed * 1000, 3) if timing else ""
        rows = [
            {
                "kind": self.kind,
                "rank": self.rank,
                "q": self.q,
                "target": self.target,
                "label": label,
                "count": count,
                "expected": "",
                "status": "",
                "elapsed_ms": "",
            }
            for label, count in self.counts.items()
        ]
        rows.append(
            {
                "kind": self.kind,
                "rank": self.rank,
                "q": self.q,
                "target": self.target,
                "label": "total",
                "count": self.total,
                "expected": "" if self.expected is None else self.expected,
                "status": self.status,
                "elapsed_ms": ms,
            }
        )
        return rows

    def to_csv(self, timing: bool = True, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        if header:
            w.writeheader()
        w.writerows(self.csv_rows(timing))
        return buf.getvalue()


# -- enumeration engine -------------------------------------------------------


def digits(idx: np.ndarray, q: int, d: int) -> np.ndarray:
    """Base-q digits of each index, most significant first."""
    out = np.empty((idx.shape[0], d), dtype=np.int64)
    rem = idx.copy()
    for i in range(d - 1, -1, -1):
        out[:, i] = rem % q
        rem //= q
    return out


def shard_ranges(total: int, shards: int) -> list[tuple[int, int]]:
    shards = max(1, min(shards, total)) if total else 1
    step, extra = divmod(total, shards)
    out, start = [], 0
    for s in range(shards):
        stop = start + step + (1 if s < extra else 0)
        out.append((start, stop))
        start = stop
    return out


def batch_nilpotent(F: FieldDesc, mats: np.ndarray) -> np.ndarray:
    """Boolean mask of nilpotent matrices in a stack ``(N, n, n)``."""
    n = mats.shape[-1]
    P = mats
    e = 1
    while e < n:
        P = la.matmul(F, P, P)
        e *= 2
    return ~np.any(P.reshape(P.shape[0], -1), axis=1)


@dataclass(frozen=True)
class _LinearTask:
    """Count nilpotent images of coefficient vectors under a linear map."""

    q: int
    p: int
    k: int
    dim: int
    matrix: np.ndarray  # (dim, n*n)
    n: int

    def field(self) -> FieldDesc:
        return field_of_order(self.q)

    def nilpotent_indices(self, start: int, stop: int) -> np.ndarray:
        F = self.field()
        hits = []
        for lo in range(start, stop, CHUNK):
            idx = np.arange(lo, min(stop, lo + CHUNK), dtype=np.int64)
            C = digits(idx, self.q, self.dim)
            mats = la.matmul(F, C, self.matrix).reshape(-1, self.n, self.n)
            hits.append(idx[batch_nilpotent(F, mats)])
        return np.concatenate(hits) if hits else np.zeros(0, dtype=np.int64)

    def count(self, span: tuple[int, int]) -> int:
        return int(self.nilpotent_indices(*span).size)


def _run_shards(fn: Callable, spans: list, workers: int) -> list:
    if workers > 1 and len(spans) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, spans))
    return [fn(s) for s in spans]


def _linear_count(F: FieldDesc, matrix: np.ndarray, n: int, shards: int, workers: int, limit) -> int:
    dim = matrix.shape[0]
    total = F.q**dim
    check_budget(total, limit)
    task = _LinearTask(F.q, F.p, F.k, dim, matrix, n)
    return sum(_run_shards(task.count, shard_ranges(total, shards), workers))


def nilpotent_form_indices(F: FieldDesc, r: int, limit: int | None = None) -> np.ndarray:
    """Lexicographic indices of the quadratic forms on F^{2r} with nilpotent polarization."""
    J = cl.symplectic_gram(F, 2 * r)
    P = fm.polarization_matrix(F, J)
    check_budget(F.q ** P.shape[0], limit)
    task = _LinearTask(F.q, F.p, F.k, P.shape[0], P, 2 * r)
    return task.nilpotent_indices(0, F.q ** P.shape[0])


def form_from_index(F: FieldDesc, r: int, idx: int) -> fm.QuadForm:
    d = fm.form_dim(2 * r)
    vec = digits(np.array([idx], dtype=np.int64), F.q, d)[0]
    return fm.QuadForm.standard(F, r, vec)


# -- nilpotent counts ---------------------------------------------------------


def _algebra_matrix(alg: cl.LieAlgebra) -> np.ndarray:
    return alg.flat_basis


def _inverse_transport(alg: cl.LieAlgebra) -> np.ndarray:
    """Matrix sending dual coefficient vectors (rows) to flattened elements of g."""
    T = cl.transport_matrix(alg)
    Tinv = la.inverse(alg.field, T)
    # xi = T c  =>  c = Tinv xi ; element = c . basis
    return la.matmul(alg.field, Tinv.T, alg.flat_basis)


def count_nilpotent(
    kind: str,
    rank: int,
    q: int,
    target: str = "coadjoint",
    *,
    shards: int = 1,
    workers: int = 1,
    limit: int | None = None,
) -> CountReport:
    """Number of nilpotent elements of g (adjoint) or g* (coadjoint) over F_q.

    ``rank`` is n for kind A (g = gl_n) and r for kinds C and D.
    """
    if kind not in cl.KINDS:
        raise WrongKind(kind)
    if target not in ("adjoint", "coadjoint"):
        raise ValueError(f"unknown target {target!r}")
    F = field_of_order(q)
    n = cl.v_dim(kind, rank)
    check_budget(q ** cl.lie_dim(kind, rank), limit)
    t0 = time.perf_counter()
    if kind == "C" and target == "coadjoint":
        matrix = fm.polarization_matrix(F, cl.symplectic_gram(F, n))
        route = "quadratic forms"
    else:
        alg = cl.build_algebra(kind, n, F)
        if target == "adjoint":
            matrix, route = _algebra_matrix(alg), "matrices"
        elif kind == "C":  # pragma: no cover - handled above
            raise AssertionError
        else:
            matrix, route = _inverse_transport(alg), "transport"
    total = _linear_count(F, matrix, n, shards, workers, limit)
    N = cl.num_roots(kind, rank).N
    return CountReport(
        kind, rank, q, target, {"nilpotent": total}, q**N, time.perf_counter() - t0, shards, extra={"route": route}
    )


def count_alternating_nilpotent(r: int, q: int, *, shards: int = 1, limit: int | None = None) -> int:
    """Nilpotent A with ``(Ax, x) = 0`` for all x, on F_q^{2r}."""
    F = field_of_order(q)
    n = 2 * r
    alt = fm.alternating_space(F, cl.symplectic_gram(F, n))
    return _linear_count(F, alt.basis, n, shards, 1, limit)


# -- pieces -------------------------------------------------------------------


def piece_census(r: int, q: int, *, limit: int | None = None) -> CountReport:
    """Number of nilpotent forms in each piece, over every admissible label."""
    F = field_of_order(q)
    t0 = time.perf_counter()
    idx = nilpotent_form_indices(F, r, limit)
    d = fm.form_dim(2 * r)
    J = cl.symplectic_gram(F, 2 * r)
    counts = {str(lab): 0 for lab in pc.admissible_sequences(2 * r)}
    memo: dict = {}
    for lo in range(0, idx.size, CHUNK):
        vecs = digits(idx[lo : lo + CHUNK], q, d)
        for v in vecs:
            lab = pc.classify_label(fm.QuadForm(F, J, fm.coeff_matrix(v, 2 * r)), memo)
            counts[str(lab)] += 1
    return CountReport("C", r, q, "per_piece", counts, q ** (2 * r * r), time.perf_counter() - t0)


# -- zeta sets of filtrations -------------------------------------------------


def _unit_forms(n: int) -> list[np.ndarray]:
    out = []
    for i, j in zip(*np.triu_indices(n)):
        M = la.zeros(n)
        M[i, j] = 1
        out.append(M)
    return out


def compatible_space(filt: pc.Filtration) -> la.Subspace:
    """Coefficient vectors of forms Q with ``A_Q(V_{>=a}) <= V_{>=a+2}`` and ``Q|V_{>=0} = 0``."""
    F, G, n = filt.field, filt.gram, filt.n
    cols = []
    Jit = fm.gram_inverse_transpose(F, G)
    anns = {a: la.annihilator(filt.level(a + 2)).basis for a in range(filt.lo, filt.hi)}
    V0 = filt.level(0).basis
    for M in _unit_forms(n):
        A = fm.polarize_raw(F, G, M, Jit)
        parts = []
        for a in range(filt.lo, filt.hi):
            src, ann = filt.level(a).basis, anns[a]
            if src.shape[0] and ann.shape[0]:
                parts.append(la.matmul(F, la.matmul(F, ann, A), src.T).reshape(-1))
        if V0.shape[0]:
            parts.append(fm.coeff_vector(fm.fold(F, la.matmul(F, la.matmul(F, V0, M), V0.T))))
        cols.append(np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64))
    C = np.array(cols, dtype=np.int64)  # (#coeffs, #conditions)
    if C.shape[1] == 0:
        return la.Subspace.full(F, C.shape[0])
    return la.Subspace(F, C.shape[0], la.nullspace(F, C.T))


def induced_map(filt: pc.Filtration) -> tuple[np.ndarray, pc.SGoodGrading]:
    """Matrix sending a coefficient vector of Q to that of the induced graded form."""
    F, G, n = filt.field, filt.gram, filt.n
    grading, L = filt.graded
    Jit = fm.gram_inverse_transpose(F, G)
    rows = []
    for M in _unit_forms(n):
        A = fm.polarize_raw(F, G, M, Jit)
        rows.append(fm.coeff_vector(pc.induced_matrix(F, G, M, A, L, grading.degrees)))
    return np.array(rows, dtype=np.int64), grading


def graded_q2_space(grading: pc.SGoodGrading) -> la.Subspace:
    """Coefficient vectors of ``Q(V)_2`` for a grading."""
    F, G, n = grading.field, grading.gram, grading.n
    deg = grading.deg
    Jit = fm.gram_inverse_transpose(F, G)
    badA = deg[:, None] != deg[None, :] + 2
    iu = np.triu_indices(n)
    badM = ((deg[:, None] == deg[None, :]) & (deg[:, None] != -1))[iu]
    cols = []
    for M in _unit_forms(n):
        A = fm.polarize_raw(F, G, M, Jit)
        cols.append(np.concatenate([A[badA], fm.coeff_vector(M)[badM]]))
    C = np.array(cols, dtype=np.int64)
    if C.shape[1] == 0:
        return la.Subspace.full(F, C.shape[0])
    return la.Subspace(F, C.shape[0], la.nullspace(F, C.T))


def subspace_vectors(S: la.Subspace) -> np.ndarray:
    F = S.field
    if S.dim == 0:
        return np.zeros((1, S.ambient_dim), dtype=np.int64)
    check_budget(F.q**S.dim)
    coords = digits(np.arange(F.q**S.dim, dtype=np.int64), F.q, S.dim)
    return la.matmul(F, coords, S.basis)


class Q20Oracle:
    """Memoized test of ``Q(V)_2^0`` membership for graded forms."""

    def __init__(self):
        self._memo: dict = {}

    def __call__(self, grading: pc.SGoodGrading, vecs: np.ndarray) -> np.ndarray:
        F, G, n = grading.field, grading.gram, grading.n
        Jit = fm.gram_inverse_transpose(F, G)
        gkey = (grading.degrees, G.tobytes(), F)
        out = np.zeros(vecs.shape[0], dtype=bool)
        for i, v in enumerate(vecs):
            key = (gkey, v.tobytes())
            hit = self._memo.get(key)
            if hit is None:
                M = fm.coeff_matrix(v, n)
                hit = pc._membership_raw(F, grading, M, fm.polarize_raw(F, G, M, Jit)).in_Q2_0
                self._memo[key] = hit
            out[i] = hit
        return out


def zeta_vectors(filt: pc.Filtration, oracle: Q20Oracle | None = None) -> np.ndarray:
    """Coefficient vectors of every form in ``zeta(V_*)``."""
    oracle = oracle or Q20Oracle()
    C = subspace_vectors(compatible_space(filt))
    Lmap, grading = induced_map(filt)
    bars = la.matmul(filt.field, C, Lmap) if C.shape[0] else C
    return C[oracle(grading, bars)]


def count_zeta(filt: pc.Filtration, oracle: Q20Oracle | None = None) -> int:
    return int(zeta_vectors(filt, oracle).shape[0])


def count_q20(grading: pc.SGoodGrading, oracle: Q20Oracle | None = None) -> int:
    oracle = oracle or Q20Oracle()
    vecs = subspace_vectors(graded_q2_space(grading))
    return int(np.count_nonzero(oracle(grading, vecs)))


def vector_index(vecs: np.ndarray, q: int) -> np.ndarray:
    """Inverse of :func:`digits`."""
    idx = np.zeros(vecs.shape[0], dtype=np.int64)
    for j in range(vecs.shape[1]):
        idx = idx * q + vecs[:, j]
    return idx


@dataclass
class BijectionReport:
    r: int
    q: int
    filtrations: int
    zeta_total: int
    expected: int
    uncovered: int  # nilpotent forms in no zeta set
    multiply_covered: int
    outside_cone: int  # zeta elements that are not nilpotent
    classify_mismatches: int
    per_label: dict

    @property
    def ok(self) -> bool:
        return (
            self.zeta_total == self.expected
            and not self.uncovered
            and not self.multiply_covered
            and not self.outside_cone
            and not self.classify_mismatches
        )


def bijection_check(r: int, q: int) -> BijectionReport:
    """Every nilpotent form lies in exactly one zeta set, the one ``classify`` finds."""
    F = field_of_order(q)
    filts = pc.enumerate_filtrations(F, r)
    d = fm.form_dim(2 * r)
    size = q**d
    check_budget(size)
    cover = np.zeros(size, dtype=np.int64)
    owner = np.full(size, -1, dtype=np.int64)
    oracle = Q20Oracle()
    per_label: dict[str, int] = {}
    for i, filt in enumerate(filts):
        idx = vector_index(zeta_vectors(filt, oracle), q)
        np.add.at(cover, idx, 1)
        owner[idx] = i
        per_label[str(filt.label)] = per_label.get(str(filt.label), 0) + idx.size
    nil = np.zeros(size, dtype=bool)
    nil[nilpotent_form_indices(F, r)] = True
    index_of = {f: i for i, f in enumerate(filts)}
    mismatches = 0
    for idx in np.nonzero(nil & (cover == 1))[0]:
        found = pc.classify(form_from_index(F, r, int(idx))).filtration
        if index_of.get(found) != owner[idx]:
            mismatches += 1
    return BijectionReport(
        r,
        q,
        len(filts),
        int(cover.sum()),
        q ** (2 * r * r),
        int(np.count_nonzero(nil & (cover == 0))),
        int(np.count_nonzero(cover > 1)),
        int(np.count_nonzero(~nil & (cover > 0))),
        mismatches,
        per_label,
    )


# -- ratios and polynomial fits -----------------------------------------------


def _exact_log(ratio: Fraction, q: int) -> int:
    if ratio.denominator != 1 or ratio.numerator < 1:
        raise NonIntegralRatio(f"ratio {ratio} is not a nonnegative power of {q}")
    x, d = ratio.numerator, 0
    while x % q == 0:
        x //= q
        d += 1
    if x != 1:
        raise NonIntegralRatio(f"ratio {ratio} is not a power of {q}")
    return d


def ratio_exponent(zeta_count: int, q20_count: int, q: int) -> int:
    """d with ``zeta_count = q^d q20_count``; NonIntegralRatio otherwise."""
    if q20_count == 0:
        raise NonIntegralRatio("empty Q_2^0 side")
    return _exact_log(Fraction(zeta_count, q20_count), q)


def ratio_check(target, qs: Sequence[int]) -> tuple[int, bool]:
    """Measure d in ``|zeta(V_*)| = q^d |Q(gr V_*)_2^0|`` for each q.

    ``target`` is a PieceLabel (the standard filtration of that label is
    used over each field) or a Filtration (used as is for its own field,
    with its label's standard filtration for the other q).
    """
    label = target.label if isinstance(target, pc.Filtration) else target
    ds = []
    for q in qs:
        F = field_of_order(q)
        if isinstance(target, pc.Filtration) and target.field == F:
            filt = target
        else:
            filt = pc.Filtration.from_grading(pc.standard_grading(label, F))
        oracle = Q20Oracle()
        grading, _ = filt.graded
        ds.append(ratio_exponent(count_zeta(filt, oracle), count_q20(grading, oracle), q))
    return ds[0], all(d == ds[0] for d in ds)


@dataclass(frozen=True)
class Polynomial:
    """Exact polynomial, coefficients from the constant term up."""

    coeffs: tuple[Fraction, ...]

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    @property
    def integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mag = abs(c)
            mono = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
            body = str(mag) if (mag != 1 or k == 0) else ""
            term = body + ("*" if body and mono else "") + mono
            parts.append(("-" if c < 0 else "+") + " " + term)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


@dataclass(frozen=True)
class Inconsistent:
    fitted: Polynomial
    deviations: tuple[tuple[int, Fraction, int], ...]  # (q, predicted, observed)


def _newton(points: Sequence[tuple[int, int]]) -> list[Fraction]:
    xs = [Fraction(x) for x, _ in points]
    dd = [Fraction(y) for _, y in points]
    out = [dd[0]]
    for level in range(1, len(points)):
        dd = [(dd[i + 1] - dd[i]) / (xs[i + level] - xs[i]) for i in range(len(dd) - 1)]
        out.append(dd[0])
    return out


def _newton_to_monomial(points, dd: Sequence[Fraction]) -> tuple[Fraction, ...]:
    coeffs = [Fraction(0)]
    basis = [Fraction(1)]  # prod (x - x_i) so far
    for k, c in enumerate(dd):
        coeffs += [Fraction(0)] * (len(basis) - len(coeffs))
        for i, b in enumerate(basis):
            coeffs[i] += c * b
        x_k = Fraction(points[k][0])
        basis = [Fraction(0)] + basis
        for i in range(len(basis) - 1):
            basis[i] -= x_k * basis[i + 1]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    if coeffs == [0]:
        coeffs = []
    return tuple(coeffs)


def poly_fit(points: Sequence[tuple[int, int]], degree_bound: int) -> Polynomial | Inconsistent:
    """Interpolate the first ``degree_bound + 1`` points and check the rest."""
    pts = sorted((int(x), int(y)) for x, y in points)
    if len(pts) < degree_bound + 1:
        raise InsufficientPoints(f"need {degree_bound + 1} points, got {len(pts)}")
    base = pts[: degree_bound + 1]
    poly = Polynomial(_newton_to_monomial(base, _newton(base)))
    bad = tuple((x, poly(x), y) for x, y in pts[degree_bound + 1 :] if poly(x) != y)
    return Inconsistent(poly, bad) if bad else poly


def integer_interpolant_exists(points: Sequence[tuple[int, int]]) -> bool:
    """Some integer-coefficient polynomial passes through the points.

    At integer nodes this holds exactly when all divided differences are
    integers.
    """
    pts = sorted((int(x), int(y)) for x, y in points)
    return all(c.denominator == 1 for c in _newton(pts))


# -- Borel cross-check --------------------------------------------------------


@dataclass
class BorelReport:
    r: int
    q: int
    functionals: int
    borels: int
    both: int
    neither: int
    borel_only: list
    nilpotent_only: list

    @property
    def agreements(self) -> int:
        return self.both + self.neither

    @property
    def full_agreement(self) -> bool:
        return not self.borel_only and not self.nilpotent_only


def _killed_by_some_borel(F: FieldDesc, X: np.ndarray, borels) -> np.ndarray:
    hit = np.zeros(X.shape[0], dtype=bool)
    for b in borels:
        hit |= ~np.any(la.matmul(F, X, b.basis.T), axis=1)
    return hit


def borel_cross_check(r: int, q: int, *, limit: int = cl.GROUP_LIMIT) -> BorelReport:
    """Compare 'kernel contains a rational Borel' with nilpotency of A_Q, over every xi."""
    F = field_of_order(q)
    alg = fm.symplectic_algebra(F, r)
    check_budget(q**alg.dim)
    group = cl.enumerate_group("C", 2 * r, F, limit)
    borels = cl.rational_borels(alg, group)
    X = subspace_vectors(la.Subspace.full(F, alg.dim))
    # xi -> coefficient vector of sigma(xi) is linear
    S = np.array(
        [fm.sigma_to_form(cl.DualFunctional(alg, row)).vector() for row in la.identity(alg.dim)], dtype=np.int64
    )
    P = fm.polarization_matrix(F, alg.gram)
    mats = la.matmul(F, la.matmul(F, X, S), P).reshape(-1, 2 * r, 2 * r)
    nil = batch_nilpotent(F, mats)
    bor = _killed_by_some_borel(F, X, borels)
    return BorelReport(
        r,
        q,
        X.shape[0],
        len(borels),
        int(np.count_nonzero(nil & bor)),
        int(np.count_nonzero(~nil & ~bor)),
        [tuple(int(v) for v in x) for x in X[bor & ~nil]],
        [tuple(int(v) for v in x) for x in X[nil & ~bor]],
    )


# -- transport ----------------------------------------------------------------


def transport_census(kind: str, V_dim: int, q: int, *, limit: int = cl.GROUP_LIMIT) -> CountReport:
    """Count N_g, its image under g -> g*, and the Borel-nilpotent part of g*."""
    if kind not in ("A", "D"):
        raise WrongKind("transport is defined for kinds A and D")
    F = field_of_order(q)
    t0 = time.perf_counter()
    alg = cl.build_algebra(kind, V_dim, F)
    check_budget(q**alg.dim)
    X = subspace_vectors(la.Subspace.full(F, alg.dim))
    mats = la.matmul(F, X, alg.flat_basis).reshape(-1, V_dim, V_dim)
    nil = batch_nilpotent(F, mats)
    T = cl.transport_matrix(alg)
    images = la.matmul(F, X[nil], T.T)
    image_idx = np.unique(vector_index(images, q))
    group = cl.enumerate_group(kind, V_dim, F, limit)
    borels = cl.rational_borels(alg, group)
    dual_nil = np.nonzero(_killed_by_some_borel(F, X, borels))[0]
    rank = V_dim if kind == "A" else V_dim // 2
    N = cl.num_roots(kind, rank).N
    extra = {
        "nilpotent_elements": int(np.count_nonzero(nil)),
        "distinct_images": int(image_idx.size),
        "borel_nilpotent_functionals": int(dual_nil.size),
        "image_equals_borel_set": bool(np.array_equal(image_idx, dual_nil)),
        "rational_borels": len(borels),
    }
    report = CountReport(
        kind, rank, q, "coadjoint", {"transported": int(image_idx.size)}, q**N, time.perf_counter() - t0, extra=extra
    )
    return report


def transport_ok(report: CountReport) -> bool:
    e = report.extra
    return (
        report.ok
        and e["nilpotent_elements"] == e["distinct_images"] == e["borel_nilpotent_functionals"]
        and e["image_equals_borel_set"]
    )


# -- fibers -------------------------------------------------------------------


def fiber_census(r: int, q: int) -> dict[int, int]:
    """Histogram of fiber sizes of Q -> A_Q over every alternating A."""
    F = field_of_order(q)
    J = cl.symplectic_gram(F, 2 * r)
    alt = fm.alternating_space(F, J)
    hist: dict[int, int] = {}
    for flat in subspace_vectors(alt):
        c = fm.fiber_count(F, flat.reshape(2 * r, 2 * r), J)
        hist[c] = hist.get(c, 0) + 1
    return hist
