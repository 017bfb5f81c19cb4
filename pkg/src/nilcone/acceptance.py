"""The acceptance checks, runnable from tests and from ``nilcone verify``."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import census as cs
from . import classical as cl
from . import forms as fm
from . import linalg as la
from . import pieces as pc
from .gf import field_of_order, make_field

SIGMA_SEED = 20240607
SIGMA_SAMPLES = 1000


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        word = "PASS" if self.passed else "FAIL"
        return f"{word} [{self.number:2d}] {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _nilpotent_forms(r: int, q: int) -> Iterable[fm.QuadForm]:
    F = field_of_order(q)
    for idx in cs.nilpotent_form_indices(F, r):
        yield cs.form_from_index(F, r, int(idx))


def _graded_forms(F, grading: pc.SGoodGrading):
    for vec in cs.subspace_vectors(cs.graded_q2_space(grading)):
        yield fm.QuadForm(F, grading.gram, fm.coeff_matrix(vec, grading.n))


def coadjoint_counts():
    cases = [(1, 2), (1, 3), (1, 4), (1, 5), (2, 2), (2, 3), (2, 4), (3, 2)]
    bad = []
    for r, q in cases:
        rep = cs.count_nilpotent("C", r, q, "coadjoint")
        if rep.total != q ** (2 * r * r):
            bad.append((r, q, rep.total))
    return not bad, f"{len(cases)} cases, mismatches {bad}"


def adjoint_counts():
    bad, slow = [], []
    checks = []
    for n in (2, 3):
        for q in (2, 3):
            checks.append((f"gl{n}/F{q}", lambda n=n, q=q: cs.count_nilpotent("A", n, q, "adjoint").total, q ** (n * (n - 1))))
    for q in (2, 3):
        checks.append((f"so4/F{q}", lambda q=q: cs.count_nilpotent("D", 2, q, "adjoint").total, q**4))
        checks.append((f"alt r=2/F{q}", lambda q=q: cs.count_alternating_nilpotent(2, q), q**4))
    for name, fn, want in checks:
        t0 = time.perf_counter()
        got = fn()
        if time.perf_counter() - t0 > 10:
            slow.append(name)
        if got != want:
            bad.append((name, got, want))
    return not bad and not slow, f"{len(checks)} counts, mismatches {bad}, over 10s {slow}"


def transport():
    bad = []
    for kind, dim, q in [("A", 2, 2), ("A", 2, 3), ("D", 4, 2)]:
        rep = cs.transport_census(kind, dim, q)
        if not cs.transport_ok(rep):
            bad.append((kind, dim, q, rep.extra))
    return not bad, f"3 cases, failures {bad}"


def fibers():
    hists = {r: cs.fiber_census(r, 2) for r in (1, 2)}
    ok = all(set(h) == {2 ** (2 * r)} for r, h in hists.items())
    return ok, f"fiber size -> number of alternating A: {hists}"


def bijection():
    details, ok = [], True
    for r in (1, 2):
        for q in (2, 3):
            rep = cs.bijection_check(r, q)
            ok &= rep.ok
            details.append(f"r={r} q={q}: {rep.filtrations} filtrations, sum {rep.zeta_total}/{rep.expected}")
    return ok, "; ".join(details)


def ef_chain():
    bad = 0
    total = 0
    for r in (1, 2):
        for Q in _nilpotent_forms(r, 2):
            total += 1
            inv = pc.ef_invariants(Q)
            filt = pc.classify(Q).filtration
            m = filt.top_degree
            if not (
                inv.e <= 2 * inv.f + 1
                and filt.level(-m + 1) == inv.H
                and m == max(inv.e - 1, 2 * inv.f - 1) == inv.m
            ):
                bad += 1
    return bad == 0, f"{total} forms, violations {bad}"


def _q2_pairs(r_values=(1, 2)):
    F = make_field(2)
    for r in r_values:
        for g in pc.coordinate_gradings(F, r):
            for Q in _graded_forms(F, g):
                yield g, Q, pc.membership(Q, g)


def witnesses():
    paths: dict[str, int] = {}
    bad = 0
    for g, Q, flags in _q2_pairs():
        if flags.in_Q2_0:
            continue
        w = pc.find_witness(Q, g)
        paths[w.path] = paths.get(w.path, 0) + 1
        bad += not pc.witness_holds(Q, g, w.matrix)
    return bad == 0 and bool(paths), f"witness paths {paths}, failed checks {bad}"


def stabilizers():
    total = bad = 0
    for g, Q, flags in _q2_pairs():
        if flags.in_Q2_0:
            total += 1
            bad += not pc.stabilizer_subordinate(Q, g)
    return bad == 0 and total > 0, f"{total} (form, grading) pairs in Q2^0, violations {bad}"


def good_bases():
    total = bad = 0
    extended = 0
    for r in (1, 2):
        for q in (2, 3):
            for Q in _nilpotent_forms(r, q):
                total += 1
                b = fm.good_basis(Q)
                extended += b.field != Q.field
                bad += not b.is_good()
    return bad == 0, f"{total} forms, failures {bad}, extensions used {extended}"


def polynomiality():
    notes, ok = [], True
    r1 = {q: cs.piece_census(1, q).counts for q in (2, 3, 4, 5, 7, 8, 9)}
    zero = cs.poly_fit([(q, c["f0=2"]) for q, c in r1.items()], 2)
    regular = cs.poly_fit([(q, c["f1=1"]) for q, c in r1.items()], 2)
    want_zero = cs.Polynomial((1,))
    want_reg = cs.Polynomial((-1, 0, 1))
    ok &= zero == want_zero and regular == want_reg
    notes.append(f"r=1 fits: {zero}, {regular}")
    r2 = {q: cs.piece_census(2, q) for q in (2, 3, 4)}
    ok &= all(rep.ok for rep in r2.values())
    for lab in pc.admissible_sequences(4):
        pts = [(q, rep.counts[str(lab)]) for q, rep in r2.items()]
        integral = cs.integer_interpolant_exists(pts)
        d, same = cs.ratio_check(lab, (2, 3, 4))
        ok &= integral and same
        notes.append(f"{lab}: {[c for _, c in pts]} d={d}")
    return ok, "; ".join(notes)


def sigma_suite():
    F = make_field(2)
    problems = []
    # r = 1: exhaustive
    alg = fm.symplectic_algebra(F, 1)
    if alg.dim != fm.form_dim(2) or alg.dim != 3:
        problems.append("dimension")
    xis = [cl.DualFunctional(alg, v) for v in cs.subspace_vectors(la.Subspace.full(F, alg.dim))]
    images = [fm.sigma_to_form(x) for x in xis]
    if len({Q.key() for Q in images}) != len(xis):
        problems.append("not injective")
    for xi, Q in zip(xis, images):
        if fm.sigma_from_form(Q, alg) != xi:
            problems.append("round trip")
    for a, b in zip(xis, images):
        for c, d in zip(xis, images):
            if fm.sigma_to_form(cl.DualFunctional(alg, F.add(a.coeffs, c.coeffs))) != b + d:
                problems.append("linearity")
    pairs = 0
    for g in cl.enumerate_group("C", 2, F):
        g_inv = la.inverse(F, g)
        for xi, Q in zip(xis, images):
            pairs += 1
            if fm.sigma_to_form(xi.coadjoint(g)) != Q.compose(g_inv):
                problems.append("equivariance")
    # r = 2: fixed-seed samples
    alg2 = fm.symplectic_algebra(F, 2)
    group = cl.group_list("C", 4, F)
    rng = random.Random(SIGMA_SEED)
    for _ in range(SIGMA_SAMPLES):
        xi = cl.DualFunctional(alg2, np.array([rng.randrange(2) for _ in range(alg2.dim)], dtype=np.int64))
        eta = cl.DualFunctional(alg2, np.array([rng.randrange(2) for _ in range(alg2.dim)], dtype=np.int64))
        g = group[rng.randrange(len(group))]
        Q = fm.sigma_to_form(xi)
        if fm.sigma_from_form(Q, alg2) != xi:
            problems.append("round trip r=2")
        if fm.sigma_to_form(cl.DualFunctional(alg2, F.add(xi.coeffs, eta.coeffs))) != Q + fm.sigma_to_form(eta):
            problems.append("linearity r=2")
        if fm.sigma_to_form(xi.coadjoint(g)) != Q.compose(la.inverse(F, g)):
            problems.append("equivariance r=2")
    return not problems, f"r=1 exhaustive ({pairs} equivariance pairs), r=2 {SIGMA_SAMPLES} samples, problems {sorted(set(problems))}"


CRITERIA: list[tuple[int, str, Callable[[], tuple[bool, str]]]] = [
    (1, "coadjoint symplectic counts", coadjoint_counts),
    (2, "adjoint and alternating counts", adjoint_counts),
    (3, "transport bijection", transport),
    (4, "fiber counts", fibers),
    (5, "filtration bijectivity", bijection),
    (6, "e/f invariant chain", ef_chain),
    (7, "witness suite", witnesses),
    (8, "stabilizer suite", stabilizers),
    (9, "good-basis suite", good_bases),
    (10, "polynomiality", polynomiality),
    (11, "sigma correspondence", sigma_suite),
]


def run_criterion(number: int) -> CriterionResult:
    for num, title, fn in CRITERIA:
        if num == number:
            t0 = time.perf_counter()
            try:
                passed, detail = fn()
            except Exception as exc:  # a crash is a failure, reported as such
                passed, detail = False, f"{type(exc).__name__}: {exc}"
            return CriterionResult(num, title, bool(passed), detail, time.perf_counter() - t0)
    raise KeyError(number)


def run_all(numbers: Iterable[int] | None = None) -> list[CriterionResult]:
    wanted = [n for n, _, _ in CRITERIA] if numbers is None else list(numbers)
    return [run_criterion(n) for n in wanted]
