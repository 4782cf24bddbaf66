"""Command-line front end.

Exit codes: 0 success, 1 disagreement found by ``verify``, 2 budget exceeded,
64 usage error, 65 malformed input data, 66 input file missing, 74 write error.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from pathlib import Path

from . import duality
from .admissibility import (admissible_clause, classify_completeness, member_IS_free, member_ISP_free,
                            verify_lemma_suite)
from .algebra import FiniteAlgebra, direct_power, lattice_reduct, require_member
from .clauses import satisfies
from .errors import BudgetExceeded, ClauseSyntaxError, FormatError, WorkbenchError
from .io import algebra_to_json, dump_algebra, dump_space, load_algebra, space_to_json
from .members import enumerate_members
from .profiles import NAMED_ALGEBRAS, PROFILE_NAMES, get_profile
from .spaces import emit_dot
from .syntax import parse_clause, print_clause, random_clause

EX_OK, EX_DISAGREE, EX_BUDGET = 0, 1, 2
EX_USAGE, EX_DATAERR, EX_NOINPUT, EX_IOERR = 64, 65, 66, 74
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(p: argparse.ArgumentParser, variety_required: bool = False):
    p.add_argument("--variety", choices=PROFILE_NAMES, required=variety_required)
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    p.add_argument("--no-cache", action="store_true", help="do not read or write the free-algebra cache")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _add_bounds(p: argparse.ArgumentParser):
    p.add_argument("--max-power", type=int, default=2)
    p.add_argument("--max-size", type=int, default=8)
    p.add_argument("--n-cap", type=int, default=None,
                   help="largest n for free-algebra witnesses (default |X(B)|+2)")


def _add_clause(p: argparse.ArgumentParser, required: bool = True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--clause")
    g.add_argument("--clause-file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dualadmit", description="Admissibility workbench for finite algebras")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="test a clause in one algebra")
    _add_common(p)
    _add_clause(p)
    p.add_argument("--algebra", required=True, help="JSON file or built-in name (2, S, D, K, D^2, ...)")

    p = sub.add_parser("member", help="membership in IS(F) and ISP(F)")
    _add_common(p)
    _add_bounds(p)
    p.add_argument("--algebra", required=True)
    p.add_argument("--witness", action="store_true", help="also search embeddings into free algebras")

    p = sub.add_parser("dual", help="dual space of an algebra")
    _add_common(p)
    p.add_argument("--algebra", required=True)
    p.add_argument("--emit-dot", metavar="PATH")
    p.add_argument("--out", metavar="PATH", help="write the space as JSON")

    p = sub.add_parser("free", help="free algebra on n generators")
    _add_common(p, variety_required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--size-only", action="store_true")
    p.add_argument("--emit-dot", metavar="PATH", help="render the generating space power")
    p.add_argument("--out", metavar="PATH", help="write the algebra as JSON")

    p = sub.add_parser("admissible", help="admissibility verdict for a clause")
    _add_common(p, variety_required=True)
    _add_bounds(p)
    _add_clause(p, required=False)
    p.add_argument("--random", type=int, metavar="N", help="test N seeded random clauses")

    p = sub.add_parser("verify", help="cross-check clause, dual and witness routes")
    _add_common(p)
    _add_bounds(p)

    p = sub.add_parser("classify", help="completeness classification")
    _add_common(p)
    _add_bounds(p)

    p = sub.add_parser("enumerate", help="list finite members up to the bounds")
    _add_common(p, variety_required=True)
    _add_bounds(p)
    p.add_argument("--out", metavar="DIR", help="write each member as a JSON file")
    return parser


# ---------------------------------------------------------------- helpers

_POWER = re.compile(r"^([A-Za-z0-9]+)(?:\^(\d+))?$")


def resolve_algebra(spec: str, variety: str | None) -> tuple[FiniteAlgebra, str]:
    """Load ``spec`` as a built-in name or a JSON path; return (algebra, profile name)."""
    m = _POWER.match(spec)
    if m and m.group(1) in NAMED_ALGEBRAS and not Path(spec).exists():
        base_profile, make = NAMED_ALGEBRAS[m.group(1)]
        alg = make()
        if m.group(2) is not None:
            alg = direct_power(alg, int(m.group(2)))
            alg.name = spec
        profile = variety or base_profile
        sig = get_profile(profile).signature
        if sig != alg.signature:
            if not set(sig.op_names) <= set(alg.signature.op_names):
                raise UsageError(f"built-in algebra {spec} has no reduct to signature {profile}")
            alg = lattice_reduct(alg, sig)
        return alg, profile
    path = Path(spec)
    if not path.exists():
        raise FileNotFoundError(spec)
    alg = load_algebra(path)
    profile = variety or alg.signature.name
    if get_profile(profile).signature != alg.signature:
        raise UsageError(f"{spec} has signature {alg.signature.name}, not {profile}")
    return alg, profile


def _read_clause(args):
    if args.clause is not None:
        return parse_clause(args.clause)
    text = Path(args.clause_file).read_text().strip()
    return parse_clause(text)


def _print_json(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def _write(path, text: str):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise _WriteError(f"cannot write {path}: {exc.strerror}") from None


class _WriteError(Exception):
    pass


# ---------------------------------------------------------------- commands

def cmd_check(args) -> int:
    alg, _ = resolve_algebra(args.algebra, args.variety)
    clause = _read_clause(args)
    s = satisfies(alg, clause)
    if args.json:
        _print_json({"algebra": alg.name, "clause": print_clause(clause), "holds": s.holds,
                     "witness": {v: alg.label(i) for v, i in s.assignment}})
    elif s:
        print("true")
    else:
        print(f"false; witness {s.describe(alg)}")
    return EX_OK


def cmd_member(args) -> int:
    alg, profile = resolve_algebra(args.algebra, args.variety)
    require_member(profile, alg)
    verdicts = [fn(profile, alg, args.n_cap, witness=args.witness)
                for fn in (member_IS_free, member_ISP_free)]
    if args.json:
        _print_json({"profile": profile, "verdicts": [v.to_json() for v in verdicts]})
        return EX_OK
    for v in verdicts:
        print(f"{v.question}(F): {str(v.result).lower()}")
        for r in v.routes:
            res = "bound-limited" if r.result is None else str(r.result).lower()
            print(f"  {r.route}: {res} ({r.evidence})")
    return EX_OK


def cmd_dual(args) -> int:
    alg, profile = resolve_algebra(args.algebra, args.variety)
    p = get_profile(profile)
    if p.bar_target:
        from .algebra import add_bounds
        alg, p = add_bounds(alg), p.target()
    d = duality.dual_space(p, alg)
    X = d.space
    if args.emit_dot:
        _write(args.emit_dot, emit_dot(X, "X"))
    if args.out:
        _write(args.out, dump_space(X))
    if args.json:
        _print_json(space_to_json(X))
        return EX_OK
    print(f"X({alg.name}): {X.size} points, kind {X.kind}")
    for i in range(X.size):
        up = [X.label(j) for j in range(X.size) if j != i and X.leq(i, j)]
        extra = "".join(f", {k}={X.label(t[i])}" for k, t in X.unary.items())
        extra += "".join(f", in {k}" for k in X.subsets if X.in_subset(k, i))
        print(f"  {X.label(i)}: below {{{', '.join(up)}}}{extra}")
    return EX_OK


def cmd_free(args) -> int:
    if args.n < 0:
        raise UsageError("-n must be non-negative")
    fa = duality.free_algebra(args.variety, args.n)
    if args.emit_dot:
        _write(args.emit_dot, emit_dot(fa.space, "M"))
    if args.size_only:
        print(fa.size)
        return EX_OK
    alg = None
    if args.out or args.json:
        alg = fa.algebra
        alg.name = f"F_{args.variety}({args.n})"
    if args.out:
        _write(args.out, dump_algebra(alg))
    if args.json:
        _print_json(algebra_to_json(alg))
        return EX_OK
    print(f"F_{args.variety}({args.n}): {fa.size} elements over {fa.points} points")
    if args.n:
        print("generators: " + ", ".join(str(g) for g in fa.generators))
    return EX_OK


def cmd_admissible(args) -> int:
    if args.random is None and args.clause is None and args.clause_file is None:
        raise UsageError("one of --clause, --clause-file or --random is required")
    p = get_profile(args.variety)
    if args.random is not None:
        rng = random.Random(args.seed)
        ops = [o for o in p.signature.op_names]
        clauses = [random_clause(rng, ops, n_vars=3, depth=2, max_premises=2, max_conclusions=1)
                   for _ in range(args.random)]
    else:
        clauses = [_read_clause(args)]
    reports = []
    for c in clauses:
        v = admissible_clause(p, c, args.max_power, args.max_size)
        reports.append(v)
        if not args.json:
            line = v.describe()
            print(f"{print_clause(c)}: {line}" if args.random is not None else line)
    if args.json:
        out = [v.to_json() for v in reports]
        _print_json(out[0] if args.random is None else out)
    return EX_OK


def cmd_verify(args) -> int:
    names = [args.variety] if args.variety else list(PROFILE_NAMES)
    reports = [verify_lemma_suite(n, args.max_power, args.max_size, args.n_cap, args.jobs)
               for n in names]
    total = sum(len(r["disagreements"]) for r in reports)
    if args.json:
        _print_json(reports[0] if args.variety else reports)
    else:
        for r in reports:
            if not args.variety:
                print(f"{r['profile']}: {r['members_checked']} members")
            for d in r["disagreements"]:
                print(f"disagreement: {d}")
        print(f"{total} disagreement{'' if total == 1 else 's'}")
    return EX_DISAGREE if total else EX_OK


_CLASSES = {"structurally_complete": "structurally complete",
            "universally_complete": "universally complete",
            "non_negative_universally_complete": "non-negative universally complete"}


def cmd_classify(args) -> int:
    names = [args.variety] if args.variety else list(PROFILE_NAMES)
    reports = [classify_completeness(n, args.max_power, args.max_size) for n in names]
    if args.json:
        _print_json(reports[0] if args.variety else reports)
        return EX_OK
    for r in reports:
        yes = [k for k in _CLASSES if r[k]]
        print(f"{r['profile']}: " + (", ".join(_CLASSES[k] for k in yes) or "none"))
        for k in _CLASSES:
            if not r[k]:
                print(f"  not {_CLASSES[k]}: {r['failures'][k]}")
    return EX_OK


def cmd_enumerate(args) -> int:
    members = enumerate_members(args.variety, args.max_power, args.max_size)
    if args.out:
        d = Path(args.out)
        try:
            d.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise _WriteError(f"cannot create {d}: {exc.strerror}") from None
        for i, alg in enumerate(members):
            _write(d / f"{args.variety}_{i:03d}.json", dump_algebra(alg))
    if args.json:
        _print_json({"profile": args.variety, "bounds": members.bounds(),
                     "members": [algebra_to_json(a) for a in members]})
        return EX_OK
    for alg in members:
        print(f"{alg.size:3d}  {alg.name}")
    return EX_OK


COMMANDS = {"check": cmd_check, "member": cmd_member, "dual": cmd_dual, "free": cmd_free,
            "admissible": cmd_admissible, "verify": cmd_verify, "classify": cmd_classify,
            "enumerate": cmd_enumerate}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be at least 1")
        for flag in ("max_power", "max_size", "n_cap"):
            v = getattr(args, flag, None)
            if v is not None and v < 0:
                raise UsageError(f"--{flag.replace('_', '-')} must be non-negative")
        if args.no_cache:
            duality.set_cache_dir(None)
        elif duality._cache_dir is None:
            duality.set_cache_dir(duality.default_cache_dir())
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dualadmit: usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    except BudgetExceeded as exc:
        print(f"dualadmit: budget exceeded: {exc}", file=sys.stderr)
        return EX_BUDGET
    except ClauseSyntaxError as exc:
        print(f"dualadmit: clause syntax error at {exc}", file=sys.stderr)
        return EX_DATAERR
    except FormatError as exc:
        print(f"dualadmit: {exc}", file=sys.stderr)
        return EX_DATAERR
    except FileNotFoundError as exc:
        print(f"dualadmit: no such file: {exc.filename or exc.args[0]}", file=sys.stderr)
        return EX_NOINPUT
    except _WriteError as exc:
        print(f"dualadmit: {exc}", file=sys.stderr)
        return EX_IOERR
    except WorkbenchError as exc:
        print(f"dualadmit: {exc}", file=sys.stderr)
        return EX_DATAERR


def main():
    sys.exit(run())
