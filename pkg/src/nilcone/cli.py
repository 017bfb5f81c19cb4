"""Command-line front end.

Exit codes: 0 all expectations met, 1 a failed expectation, 2 bad input,
3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import acceptance
from . import census as cs
from . import classical as cl
from . import forms as fm
from . import pieces as pc
from .errors import BudgetExceeded, NilconeError, NotNilpotent, PreconditionError
from .gf import EXTENSION_CAP, field_of_order

FORM_HELP = (
    "quadratic form as comma-separated upper-triangular coefficients in row-major order: "
    "q11,q12,...,q1n,q22,...,qnn, so that Q(x) = sum_{i<=j} qij xi xj"
)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    kind: str = "C"
    rank: int = 1
    qs: tuple[int, ...] = (2,)
    target: str = "coadjoint"
    budget: int | None = None
    shards: int = 1
    output_format: str = "table"
    output_path: str | None = None
    seed: int = acceptance.SIGMA_SEED
    extension_cap: int = EXTENSION_CAP


def _q_list(text: str) -> tuple[int, ...]:
    try:
        qs = tuple(int(t) for t in text.split(",") if t.strip())
        for q in qs:
            field_of_order(q)
    except (ValueError, NilconeError) as exc:
        raise argparse.ArgumentTypeError(f"bad field order list {text!r}: {exc}") from None
    if not qs:
        raise argparse.ArgumentTypeError("empty q list")
    return qs


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nilcone", description="Nilpotent cones of classical dual Lie algebras over finite fields.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, kinds=("A", "C", "D")):
        sp.add_argument("--kind", choices=kinds, default="C")
        sp.add_argument("--rank", type=int, default=1, help="n for kind A (gl_n), r for kinds C and D")
        sp.add_argument("--q", type=_q_list, default=(2,), help="field order, or a comma-separated list")
        sp.add_argument("--budget", type=int, help="enumeration budget (overrides NILCONE_BUDGET)")
        sp.add_argument("--format", dest="output_format", choices=("table", "json", "csv"), default="table")
        sp.add_argument("--output", dest="output_path", help="write the report here instead of stdout")

    sp = sub.add_parser("count", help="count nilpotent elements of g or g*")
    common(sp)
    sp.add_argument("--target", choices=("adjoint", "coadjoint", "transport"), default="coadjoint")
    sp.add_argument("--shards", type=int, default=1)
    sp.add_argument("--timing", action="store_true", help="include elapsed times (reports stop being byte-stable)")

    sp = sub.add_parser("pieces", help="count nilpotent forms in each piece")
    common(sp, ("C",))
    sp.add_argument("--timing", action="store_true")

    sp = sub.add_parser("classify", help="piece label, filtration and good basis of a form")
    common(sp, ("C",))
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--form", help=FORM_HELP)
    src.add_argument("--file", help="text file with one form per line, same format as --form")
    sp.add_argument("--extension-cap", type=int, default=EXTENSION_CAP)

    sp = sub.add_parser("witness", help="B in Sp(V) fixing Q and moving the grading filtration")
    common(sp, ("C",))
    sp.add_argument("--form", required=True, help=FORM_HELP)
    sp.add_argument("--degrees", type=_int_list, required=True, help="degree of each standard basis vector, e.g. --degrees=-1,0,0,1")

    sp = sub.add_parser("fit", help="fit piece or total counts to a polynomial in q")
    common(sp, ("C",))
    sp.add_argument("--label", help="piece label such as f1=1 (default: all nilpotent forms)")
    sp.add_argument("--degree", type=int, required=True, help="degree bound")

    sp = sub.add_parser("verify", help="run the acceptance suite")
    sp.add_argument("--only", type=_int_list, help="comma-separated criterion numbers")
    sp.add_argument("--seed", type=int, default=acceptance.SIGMA_SEED, help="seed for sampled checks")
    sp.add_argument("--format", dest="output_format", choices=("table", "json"), default="table")
    sp.add_argument("--output", dest="output_path")
    return p


@contextmanager
def _budget(value: int | None):
    if value is None:
        yield
        return
    if value < 0:
        raise UsageError("budget must be >= 0")
    old = os.environ.get("NILCONE_BUDGET")
    os.environ["NILCONE_BUDGET"] = str(value)
    try:
        yield
    finally:
        if old is None:
            os.environ.pop("NILCONE_BUDGET", None)
        else:
            os.environ["NILCONE_BUDGET"] = old


def parse_form(text: str, F, r: int) -> fm.QuadForm:
    try:
        vals = [int(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError:
        raise UsageError(f"form coefficients must be integers: {text!r}") from None
    n = 2 * r
    if len(vals) != fm.form_dim(n):
        raise UsageError(f"a form on F^{n} needs {fm.form_dim(n)} coefficients, got {len(vals)}")
    if any(v < 0 or v >= F.q for v in vals):
        raise UsageError(f"coefficients must be field elements in [0, {F.q})")
    return fm.QuadForm.standard(F, r, vals)


def _graded_str(label: pc.PieceLabel) -> str:
    degs = [a for a in range(-label.top, label.top + 1) if label.f(a)]
    names = ",".join(f"f{a}" for a in degs)
    vals = ",".join(str(label.f(a)) for a in degs)
    return f"({names}) = ({vals})"


def _vec(v) -> str:
    return "(" + ", ".join(str(int(x)) for x in v) + ")"


def _emit(cfg: RunConfig, text: str, out) -> None:
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        out.write(text)


def _report_text(reports, fmt: str, timing: bool) -> str:
    if fmt == "json":
        data = [r.as_dict(timing) for r in reports]
        return json.dumps(data[0] if len(data) == 1 else data, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return "".join(r.to_csv(timing, header=(i == 0)) for i, r in enumerate(reports))
    lines = []
    for r in reports:
        lines.append(f"kind {r.kind} rank {r.rank} q {r.q} target {r.target}")
        for label, count in r.counts.items():
            lines.append(f"  {label}: {count}")
        lines.append(f"  total {r.total}, expected {r.expected}, status {r.status}")
    return "\n".join(lines) + "\n"


def _cmd_count(args, cfg, out) -> int:
    reports = []
    for q in cfg.qs:
        if args.target == "transport":
            rep = cs.transport_census(cfg.kind, cl.v_dim(cfg.kind, cfg.rank), q)
            if not cs.transport_ok(rep):
                rep.extra["status"] = "FAILED"
        else:
            rep = cs.count_nilpotent(cfg.kind, cfg.rank, q, args.target, shards=cfg.shards)
        reports.append(rep)
    _emit(cfg, _report_text(reports, cfg.output_format, args.timing), out)
    ok = all(r.ok and r.extra.get("status") != "FAILED" for r in reports)
    return 0 if ok else 1


def _cmd_pieces(args, cfg, out) -> int:
    reports = [cs.piece_census(cfg.rank, q) for q in cfg.qs]
    _emit(cfg, _report_text(reports, cfg.output_format, args.timing), out)
    return 0 if all(r.ok for r in reports) else 1


def _classify_one(Q: fm.QuadForm, cap: int) -> dict:
    cls = pc.classify(Q)
    gb = fm.good_basis(Q, cap)
    return {
        "form": [int(v) for v in Q.vector()],
        "label": str(cls.label),
        "graded_dimensions": _graded_str(cls.label),
        "filtration": {
            str(a): [[int(x) for x in row] for row in cls.filtration.level(a).basis]
            for a in range(cls.filtration.lo, cls.filtration.hi + 1)
        },
        "good_basis_field": repr(gb.field),
        "good_basis": {str(i): [int(x) for x in gb[i]] for i in gb.indices},
    }


def _cmd_classify(args, cfg, out) -> int:
    F = field_of_order(cfg.qs[0])
    if args.form is not None:
        lines = [args.form]
    else:
        try:
            with open(args.file) as fh:
                lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
        except OSError as exc:
            raise UsageError(str(exc)) from None
    forms = [parse_form(ln, F, cfg.rank) for ln in lines]
    results = []
    for Q in forms:
        try:
            results.append(_classify_one(Q, cfg.extension_cap))
        except NotNilpotent:
            results.append({"form": [int(v) for v in Q.vector()], "error": "A_Q is not nilpotent"})
    if cfg.output_format == "json":
        text = json.dumps(results[0] if len(results) == 1 else results, indent=2, sort_keys=True) + "\n"
    elif cfg.output_format == "csv":
        text = "form,label\n" + "".join(f"\"{_vec(r['form'])}\",{r.get('label', 'not nilpotent')}\n" for r in results)
    else:
        chunks = []
        for r in results:
            if "error" in r:
                chunks.append(f"form {_vec(r['form'])}: {r['error']}")
                continue
            rows = [f"form {_vec(r['form'])}", f"label {r['label']}  graded dimensions {r['graded_dimensions']}"]
            for a, basis in r["filtration"].items():
                rows.append(f"  V>={a}: " + (", ".join(_vec(v) for v in basis) or "0"))
            rows.append(f"good basis over {r['good_basis_field']}:")
            rows += [f"  e{i} = {_vec(v)}" for i, v in r["good_basis"].items()]
            chunks.append("\n".join(rows))
        text = "\n\n".join(chunks) + "\n"
    _emit(cfg, text, out)
    return 0 if all("error" not in r for r in results) else 1


def _cmd_witness(args, cfg, out) -> int:
    F = field_of_order(cfg.qs[0])
    Q = parse_form(args.form, F, cfg.rank)
    if len(args.degrees) != 2 * cfg.rank:
        raise UsageError(f"need {2 * cfg.rank} degrees")
    grading = pc.SGoodGrading(F, cl.symplectic_gram(F, 2 * cfg.rank), tuple(args.degrees))
    if not pc.check_s_good(grading):
        raise UsageError(f"degrees {args.degrees} are not an s-good grading")
    try:
        w = pc.find_witness(Q, grading)
    except PreconditionError as exc:
        out.write(f"no witness: {exc}\n")
        return 1
    ok = pc.witness_holds(Q, grading, w.matrix)
    if cfg.output_format == "json":
        text = json.dumps({"matrix": w.matrix.tolist(), "path": w.path, "verified": ok}, indent=2) + "\n"
    else:
        rows = [" ".join(str(int(x)) for x in row) for row in w.matrix]
        text = f"path {w.path}, verified {ok}\n" + "\n".join(rows) + "\n"
    _emit(cfg, text, out)
    return 0 if ok else 1


def _parse_label(text: str) -> pc.PieceLabel:
    dims = {}
    try:
        for part in text.split(","):
            name, val = part.split("=")
            dims[abs(int(name.strip().lstrip("f")))] = int(val)
    except ValueError:
        raise UsageError(f"bad label {text!r}; expected e.g. f0=2,f1=1") from None
    top = max(dims, default=0)
    return pc.PieceLabel(tuple(dims.get(a, 0) for a in range(top + 1)))


def _cmd_fit(args, cfg, out) -> int:
    points = []
    for q in cfg.qs:
        if args.label:
            lab = _parse_label(args.label)
            rep = cs.piece_census(cfg.rank, q)
            points.append((q, rep.counts.get(str(lab), 0)))
        else:
            points.append((q, cs.count_nilpotent("C", cfg.rank, q).total))
    try:
        fit = cs.poly_fit(points, args.degree)
    except NilconeError as exc:
        raise UsageError(str(exc)) from None
    consistent = isinstance(fit, cs.Polynomial)
    poly = fit if consistent else fit.fitted
    if cfg.output_format == "json":
        payload = {
            "points": points,
            "polynomial": str(poly),
            "coefficients": [str(c) for c in poly.coeffs],
            "consistent": consistent,
            "integral": poly.integral,
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = f"points {points}\npolynomial {poly}\nconsistent {consistent}, integer coefficients {poly.integral}\n"
    _emit(cfg, text, out)
    return 0 if consistent else 1


def _cmd_verify(args, cfg, out) -> int:
    known = [num for num, _, _ in acceptance.CRITERIA]
    wanted = args.only or known
    if any(n not in known for n in wanted):
        raise UsageError(f"criteria are numbered {known[0]}..{known[-1]}")
    saved, acceptance.SIGMA_SEED = acceptance.SIGMA_SEED, args.seed
    results = []
    try:
        for n in wanted:
            res = acceptance.run_criterion(n)
            results.append(res)
            if cfg.output_format == "table" and not cfg.output_path:
                out.write(res.line() + "\n")
                out.flush()
    finally:
        acceptance.SIGMA_SEED = saved
    if cfg.output_format == "json":
        text = json.dumps([r.__dict__ for r in results], indent=2) + "\n"
        _emit(cfg, text, out)
    elif cfg.output_path:
        _emit(cfg, "".join(r.line() + "\n" for r in results), out)
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "count": _cmd_count,
    "pieces": _cmd_pieces,
    "classify": _cmd_classify,
    "witness": _cmd_witness,
    "fit": _cmd_fit,
    "verify": _cmd_verify,
}


def run(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    cfg = RunConfig(
        command=args.command,
        kind=getattr(args, "kind", "C"),
        rank=getattr(args, "rank", 1),
        qs=getattr(args, "q", (2,)),
        target=getattr(args, "target", "coadjoint"),
        budget=getattr(args, "budget", None),
        shards=getattr(args, "shards", 1),
        output_format=args.output_format,
        output_path=args.output_path,
        seed=getattr(args, "seed", acceptance.SIGMA_SEED),
        extension_cap=getattr(args, "extension_cap", EXTENSION_CAP),
    )
    if cfg.rank < 1 and args.command != "verify":
        err.write("nilcone: error: rank must be >= 1\n")
        return 2
    try:
        with _budget(cfg.budget):
            return COMMANDS[args.command](args, cfg, out)
    except BudgetExceeded as exc:
        err.write(f"BudgetExceeded: {exc}\n")
        return 3
    except UsageError as exc:
        err.write(f"nilcone: error: {exc}\n")
        return 2
    except NilconeError as exc:
        err.write(f"{type(exc).__name__}: {exc}\n")
        return 1


def main() -> None:
    np.set_printoptions(linewidth=120)
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
