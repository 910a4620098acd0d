"""Command-line front end.

Exit codes: 0 pass, 1 a check fails, 2 inconclusive, 3 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import bassserre as bs
from . import io
from .bns import Character, kernel_fg
from .onerelator import MagnusError, build_hierarchy, magnus_step
from .repro import PIPELINES, PASS, FAIL
from .smallcancel import SymmetrizedSet, cprime
from .stallings import (
    DEFAULT_CAP,
    ResourceCapExceeded,
    build,
    height,
    height_leq,
    intersect,
    is_malnormal,
    membership,
)
from .words import Word, WordError

OK, FAILED, INCONCLUSIVE, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def _emit(lines, fmt, out):
    if fmt == "machine":
        for ln in sorted(lines):
            print(ln, file=out)
    else:
        for ln in lines:
            key, _, val = ln.partition(" = ")
            print(f"{key}: {val}", file=out)


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _subgroup(path):
    A, words = io.parse_subgroup(_read(path))
    return A, words, build(words, A)


def cmd_cprime(args):
    A, rels = io.parse_presentation(_read(args.file))
    try:
        lam = Fraction(args.lam)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad lambda {args.lam!r}") from None
    if lam <= 0:
        raise UsageError("lambda must be positive")
    res = cprime(SymmetrizedSet.of(rels, A), lam)
    lines = res.report.lines() + [f"lambda = {lam}", f"cprime = {'holds' if res.holds else 'fails'}"]
    if res.witness is not None:
        lines.append(f"witness.piece = {res.witness.piece}")
        lines.append(f"witness.relator = {res.witness.relator}")
    return lines, OK if res.holds else FAILED


def cmd_fold(args):
    _, _, H = _subgroup(args.file)
    if args.serialize:
        args.out.write(H.serialize())
        return None, OK
    lines = [f"rank = {H.rank}", f"vertices = {H.num_vertices}"]
    lines += [f"edge.{i:04d} = {s} {H.alphabet.generators[g]} {d}" for i, (s, g, d) in enumerate(H.edges)]
    return lines, OK


def cmd_member(args):
    A, _, H = _subgroup(args.file)
    w = Word.parse(args.word, A)
    wit = membership(H, w)
    lines = [f"member = {wit is not None}"]
    if wit is not None:
        lines.append(f"witness = {wit}")
        lines += [f"basis.{n} = {b}" for n, b in zip(H.basis_alphabet, H.basis())]
    return lines, OK if wit is not None else FAILED


def cmd_intersect(args):
    A, _, H = _subgroup(args.file1)
    _, words2 = io.parse_subgroup(_read(args.file2), A)
    K = build(words2, A)
    I = intersect(H, K, args.cap)
    lines = [f"rank = {I.rank}", f"vertices = {I.num_vertices}"]
    lines += [f"basis.{i} = {b}" for i, b in enumerate(I.basis())]
    return lines, OK


def cmd_malnormal(args):
    _, _, H = _subgroup(args.file)
    ok, g = is_malnormal(H, args.cap)
    lines = [f"malnormal = {ok}"]
    if g is not None:
        lines.append(f"witness = {g}")
    return lines, OK if ok else FAILED


def cmd_height(args):
    _, _, H = _subgroup(args.file)
    if args.n is None:
        h = height(H, args.max_n, args.cap)
        return [f"height = {h if h is not None else f'> {args.max_n}'}"], OK if h is not None else INCONCLUSIVE
    cert = height_leq(H, args.n, args.cap)
    lines = [f"n = {args.n}", f"verdict = {cert.verdict}"]
    if cert.witness:
        lines += [f"witness.conjugator.{i} = {g}" for i, g in enumerate(cert.witness)]
        lines.append(f"witness.element = {cert.element}")
    return lines, OK if cert.holds else FAILED


def cmd_magnus_step(args):
    P = io.parse_one_relator(_read(args.file))
    try:
        step = magnus_step(P, args.pivot)
    except MagnusError as exc:
        raise UsageError(str(exc)) from None
    return step.lines(), OK


def cmd_hierarchy(args):
    P = io.parse_one_relator(_read(args.file))
    h = build_hierarchy(P, args.max_depth)
    return h.lines(), OK if h.decided else INCONCLUSIVE


def cmd_bns(args):
    P = io.parse_one_relator(_read(args.file))
    chi = Character.parse(args.char, P.alphabet)
    k = kernel_fg(chi, P)
    return k.lines() + [f"character = {chi}"], OK if k.decided else INCONCLUSIVE


def cmd_validate_gog(args):
    rep = bs.validate(io.parse_gog(_read(args.file)))
    return rep.lines(), OK if rep.ok else FAILED


def cmd_stabilizer(args):
    gog = io.parse_gog(_read(args.gog))
    rep = bs.validate(gog)
    if not rep.ok:
        return rep.lines(), FAILED
    path = io.parse_path(_read(args.path), gog)
    stab = bs.path_stabilizer(gog, path, args.cap)
    lines = [f"path = {path}", f"rank = {stab.rank}", f"vertex = {stab.vertex}"]
    lines += [f"basis.{i} = {b}" for i, b in enumerate(stab.graph.basis())]
    return lines, OK


def cmd_acyl(args):
    gog = io.parse_gog(_read(args.gog))
    rep = bs.validate(gog)
    if not rep.ok:
        return rep.lines(), FAILED
    r = bs.acyl_sample(gog, args.k, args.C, args.samples, args.seed, args.ball, args.workers, args.cap)
    return r.lines(), OK if r.verdict == "no_violation_found" else FAILED


def cmd_repro(args):
    if args.case == "prop-4-1":
        rep = PIPELINES[args.case](seed=args.seed, workers=args.workers)
    else:
        rep = PIPELINES[args.case]()
    code = {PASS: OK, FAIL: FAILED}.get(rep.verdict, INCONCLUSIVE)
    return rep.lines(), code


def _globals(suppress: bool) -> argparse.ArgumentParser:
    # the subcommand copies only override the top-level values when given explicitly
    def d(v):
        return argparse.SUPPRESS if suppress else v
    g = _Parser(add_help=False)
    g.add_argument("--seed", type=int, default=d(0), help="seed for randomized commands (default 0)")
    g.add_argument("--cap", type=int, default=d(DEFAULT_CAP), help="fiber product edge cap")
    g.add_argument("--format", choices=("text", "machine"), default=d("text"))
    return g


def make_parser() -> argparse.ArgumentParser:
    common = _globals(suppress=True)
    p = _Parser(prog="artifact", description="Free group, small cancellation and Bass-Serre toolkit.",
                parents=[_globals(suppress=False)])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        s = sub.add_parser(name, help=help_, parents=[common])
        s.set_defaults(fn=fn)
        return s

    s = add("cprime", cmd_cprime, "check the C'(lambda) condition for a presentation file")
    s.add_argument("--lambda", dest="lam", required=True, help="rational bound P/Q")
    s.add_argument("file")
    s = add("fold", cmd_fold, "folded core graph of a subgroup file")
    s.add_argument("--serialize", action="store_true", help="print the canonical graph serialization only")
    s.add_argument("file")
    s = add("member", cmd_member, "membership of a word, with a basis witness")
    s.add_argument("file")
    s.add_argument("word")
    s = add("intersect", cmd_intersect, "intersection of two subgroups")
    s.add_argument("file1")
    s.add_argument("file2")
    s = add("malnormal", cmd_malnormal, "malnormality test")
    s.add_argument("file")
    s = add("height", cmd_height, "bounded height test, or the height itself without --n")
    s.add_argument("--n", type=int)
    s.add_argument("--max-n", type=int, default=8)
    s.add_argument("file")
    s = add("magnus-step", cmd_magnus_step, "one rewriting step over a zero exponent sum pivot")
    s.add_argument("--pivot", required=True)
    s.add_argument("file")
    s = add("hierarchy", cmd_hierarchy, "iterate rewriting steps until the group is visibly free or cyclic")
    s.add_argument("--max-depth", type=int, default=16)
    s.add_argument("file")
    s = add("bns", cmd_bns, "finite generation of a character kernel")
    s.add_argument("--char", required=True, help="weights such as a=1,b=-1")
    s.add_argument("file")
    s = add("validate-gog", cmd_validate_gog, "check a graph of free groups")
    s.add_argument("file")
    s = add("stabilizer", cmd_stabilizer, "pointwise stabilizer of a tree path")
    s.add_argument("--gog", required=True)
    s.add_argument("--path", required=True)
    s = add("acyl", cmd_acyl, "sample tree paths looking for nontrivial stabilizers")
    s.add_argument("--gog", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--C", type=int, default=1)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--ball", type=int, default=3)
    s.add_argument("--workers", type=int, default=1)
    s = add("repro", cmd_repro, "reproduce a worked example")
    s.add_argument("case", choices=sorted(PIPELINES))
    s.add_argument("--workers", type=int, default=1)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    args.out = out
    try:
        lines, code = args.fn(args)
    except ResourceCapExceeded as exc:
        print(f"inconclusive: {exc}", file=out)
        return INCONCLUSIVE
    except (UsageError, WordError, io.FormatError, bs.GraphOfGroupsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    if lines is None:
        return code
    if args.command in ("acyl", "repro") and not any(ln.startswith("seed =") for ln in lines):
        lines.append(f"seed = {args.seed}")
    _emit(lines, args.format, out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
