"""Command-line interface: ``chm <subcommand> ...``.

Exit codes
    0   success (verify passed, mub true, equivalence found)
    2   verify or mub predicate failed
    3   equiv proved the matrices inequivalent
    4   equiv search budget exhausted
    64  usage error (unknown id, bad arity, bad flags)
    65  input document is invalid
    74  file could not be read or written
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import analysis, catalogue, construct
from . import io as chmio
from .core import DiagonalPhase, HadamardMatrix, PhaseValue

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_INEQUIVALENT = 3
EXIT_EXHAUSTED = 4
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_IO = 74

TOL_ENV = "CHM_DEFAULT_TOL"
# parameters arrive as decimal text (3.14159265 for pi), so equivalence is
# judged more loosely here than in the library
CLI_EQUIV_TOL = 1e-7


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- helpers -----------------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _matrix(path: str) -> HadamardMatrix:
    return chmio.load_matrix(_read(path))


def _env_tol() -> float | None:
    raw = os.environ.get(TOL_ENV)
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number") from None


def _hadamard_tol(args, n: int) -> float:
    if args.tol is not None:
        return args.tol
    env = _env_tol()
    return env if env is not None else 1e-10 * n


def _phase(text: str, turns: bool):
    """A radian float, or with ``--turns`` an exact rational of a turn."""
    try:
        if turns:
            return PhaseValue.exact(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot read phase {text!r}") from None


def _phase_list(text: str | None, size: int, turns: bool, what: str) -> DiagonalPhase:
    if text is None:
        return DiagonalPhase.identity(size)
    items = [s for s in text.split(",") if s.strip()]
    if len(items) != size - 1:
        raise UsageError(f"{what} needs {size - 1} comma-separated phases, got {len(items)}")
    phases = [PhaseValue.zero()]
    for s in items:
        p = _phase(s.strip(), turns)
        phases.append(p if isinstance(p, PhaseValue) else PhaseValue.approx(p))
    return DiagonalPhase(tuple(phases))


def _fmt(x: float) -> str:
    x = 0.0 if abs(x) < 5e-13 else x
    return f"{x:+.12f}"


# -- subcommands ---------------------------------------------------------------

def cmd_list(args) -> int:
    lines = []
    for e in catalogue.list_entries():
        tol = "" if e.tolerance is None else f"  tol={e.tolerance:g}"
        lines.append(f"N={e.n:<3d}{e.id:<8s} params={e.param_count:<3d}{e.kind.value}{tol}")
    _write("\n".join(lines) + "\n", None)
    return EXIT_OK


def cmd_gen(args) -> int:
    entry = catalogue.entry(args.id)
    given: dict[str, object] = {}
    for item in args.param or []:
        if "=" not in item:
            raise UsageError(f"--param expects name=value, got {item!r}")
        name, value = item.split("=", 1)
        if name not in entry.param_names:
            raise UsageError(f"{args.id} has no parameter {name!r}; parameters: {', '.join(entry.param_names) or 'none'}")
        given[name] = _phase(value, args.turns)
    missing = [p for p in entry.param_names if p not in given]
    if missing:
        raise UsageError(f"{args.id} takes {entry.param_count} parameters; missing {', '.join(missing)}")
    M = catalogue.get(args.id, [given[p] for p in entry.param_names])
    _write(chmio.serialize(M), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    M = _matrix(args.file)
    rep = analysis.is_hadamard(M, tol=_hadamard_tol(args, M.n))
    status = "PASS" if rep.passed else "FAIL"
    _write(f"{status} n={M.n} unimodular_deviation={rep.unimodular_deviation:.3e} "
           f"gram_deviation={rep.gram_deviation:.3e} tol={rep.tol:.3e}\n", None)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_dephase(args) -> int:
    _write(chmio.serialize(analysis.dephase(_matrix(args.file)).h), args.output)
    return EXIT_OK


def cmd_defect(args) -> int:
    rep = analysis.defect(_matrix(args.file), exact=not args.svd)
    out = [str(rep.defect)]
    if args.kernel:
        out.append(f"method={rep.method} svd_defect={rep.svd_defect}")
        basis = rep.exact_basis if rep.exact_basis is not None else rep.kernel_basis
        for k, B in enumerate(basis):
            out.append(f"# basis {k}")
            for row in B:
                if rep.exact_basis is not None:
                    out.append(" ".join(str(Fraction(x)) for x in row))
                else:
                    out.append(" ".join(_fmt(float(x)) for x in row))
    _write("\n".join(out) + "\n", None)
    return EXIT_OK


def cmd_invariants(args) -> int:
    inv = analysis.haagerup_invariants(_matrix(args.file), args.tol)
    if args.json:
        _write(chmio.serialize(inv), None)
        return EXIT_OK
    lines = [f"{_fmt(v.real)} {_fmt(v.imag)} {c}" for v, c in zip(inv.values, inv.counts)]
    _write("\n".join(lines) + "\n", None)
    return EXIT_OK


def cmd_equiv(args) -> int:
    A, B = _matrix(args.file_a), _matrix(args.file_b)
    if A.n != B.n:
        _write(f"not-equivalent: dimensions {A.n} and {B.n} differ\n", None)
        return EXIT_INEQUIVALENT
    if analysis.inequivalent_by_invariants(A, B, max(args.tol, analysis.DEFAULT_CLUSTER_TOL)) \
            is analysis.Verdict.INEQUIVALENT:
        _write("not-equivalent: invariant sets differ\n", None)
        return EXIT_INEQUIVALENT
    res = analysis.equivalence_search(A, B, budget=args.budget, tol=args.tol)
    if res.outcome is analysis.Outcome.FOUND:
        _write(chmio.serialize(res.witness), args.output)
        return EXIT_OK
    if res.outcome is analysis.Outcome.NOT_FOUND:
        _write(f"not-equivalent: exhaustive search, {res.nodes} nodes\n", None)
        return EXIT_INEQUIVALENT
    _write(f"exhausted: budget of {args.budget} nodes spent\n", None)
    return EXIT_EXHAUSTED


def cmd_mub(args) -> int:
    H1, H2 = _matrix(args.file_a), _matrix(args.file_b)
    tol = args.tol if args.tol is not None else _env_tol()
    ok = analysis.is_unbiased_pair(H1, H2) if tol is None else analysis.is_unbiased_pair(H1, H2, tol)
    _write(("true" if ok else "false") + "\n", None)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_tensor(args) -> int:
    _write(chmio.serialize(construct.tensor(_matrix(args.a), _matrix(args.b))), args.output)
    return EXIT_OK


def cmd_dita(args) -> int:
    A = _matrix(args.a)
    Bs = [_matrix(p) for p in args.b]
    if len(Bs) == 1:
        Bs = Bs * A.n
    if len(Bs) != A.n:
        raise UsageError(f"A is {A.n}x{A.n}: give one B or {A.n} of them, got {len(Bs)}")
    M = Bs[0].n
    es = args.E or []
    if es and len(es) != A.n - 1:
        raise UsageError(f"give -E once per block column 2..{A.n} ({A.n - 1} times), got {len(es)}")
    Es = [_phase_list(es[k] if es else None, M, args.turns, f"E{k + 2}") for k in range(A.n - 1)]
    _write(chmio.serialize(construct.dita_compose(A, Bs, Es)), args.output)
    return EXIT_OK


def cmd_double(args) -> int:
    A, B = _matrix(args.a), _matrix(args.b)
    E = _phase_list(args.E, B.n, args.turns, "E")
    _write(chmio.serialize(construct.double(A, B, E)), args.output)
    return EXIT_OK


def cmd_quadruple(args) -> int:
    mats = [_matrix(p) for p in (args.a, args.b, args.c, args.d)]
    n = mats[0].n
    Es = [_phase_list(e, n, args.turns, f"E{k}") for k, e in enumerate((args.E1, args.E2, args.E3), start=1)]
    _write(chmio.serialize(construct.quadruple(*mats, *Es)), args.output)
    return EXIT_OK


def cmd_chains(args) -> int:
    M = _matrix(args.file)
    if not (0 <= args.i < args.j < M.n):
        raise UsageError(f"need 0 <= i < j < {M.n}")
    ch = construct.chains(M, args.i, args.j)
    _write("".join(f"{_fmt(z.real)} {_fmt(z.imag)}\n" for z in ch), None)
    return EXIT_OK


def cmd_patterns(args) -> int:
    M = _matrix(args.file)
    if M.n > construct.MAX_PATTERN_N:
        raise UsageError(f"pattern enumeration is limited to N <= {construct.MAX_PATTERN_N}")
    found = construct.enumerate_patterns(M, max_nodes=args.max_nodes)
    spaces = [space for _, space in found]
    if args.json:
        _write(chmio.serialize(spaces), None)
        return EXIT_OK
    out = [f"{len(spaces)} maximal pattern space(s)"]
    for k, S in enumerate(spaces):
        out.append(f"# space {k} dimension {S.dimension}")
        for t, B in enumerate(S.basis):
            out.append(f"## basis {t}")
            out.extend(" ".join(str(x) for x in row) for row in B)
    _write("\n".join(out) + "\n", None)
    return EXIT_OK


def cmd_info(args) -> int:
    target = args.target
    if not os.path.exists(target) and target != "-":
        e = catalogue.entry(target)
        lines = [f"id: {e.id}", f"n: {e.n}", f"kind: {e.kind.value}", f"param_count: {e.param_count}",
                 f"params: {', '.join(e.param_names) or '-'}", f"description: {e.description}",
                 f"hadamard_tol: {e.hadamard_tol:g}"]
        if e.notes:
            lines.append(f"notes: {e.notes}")
        _write("\n".join(lines) + "\n", None)
        return EXIT_OK
    M = _matrix(target)
    rep = analysis.is_hadamard(M)
    lines = [f"name: {M.meta.name or '-'}", f"n: {M.n}",
             f"representation: {'phases_turns' if M.is_exact else 'entries'}",
             f"dephased: {str(M.is_dephased()).lower()}", f"hadamard: {str(rep.passed).lower()}",
             f"symmetric: {str(bool(np.array_equal(M.values, M.values.T))).lower()}"]
    _write("\n".join(lines) + "\n", None)
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chm", description="Complex Hadamard matrix catalogue and analysis tools.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help, description=help)
        sp.set_defaults(func=func)
        return sp

    def out(sp):
        sp.add_argument("-o", "--output", default=None, help="output file ('-' for stdout)")

    def turns(sp):
        sp.add_argument("--turns", action="store_true",
                        help="read phases as fractions of a turn (e.g. 1/4) instead of radians")

    add("list", cmd_list, "print the catalogue index")

    sp = add("gen", cmd_gen, "write a catalogue matrix as a document")
    sp.add_argument("id")
    sp.add_argument("--param", action="append", metavar="NAME=VALUE")
    turns(sp)
    out(sp)

    sp = add("verify", cmd_verify, "check the Hadamard property (exit 2 on failure)")
    sp.add_argument("file")
    sp.add_argument("--tol", type=float, default=None)

    sp = add("dephase", cmd_dephase, "write the dephased form")
    sp.add_argument("file")
    out(sp)

    sp = add("defect", cmd_defect, "print the defect")
    sp.add_argument("file")
    sp.add_argument("--kernel", action="store_true", help="also print a kernel basis")
    sp.add_argument("--svd", action="store_true", help="skip the exact path")

    sp = add("invariants", cmd_invariants, "print the rounded set of quadruple products")
    sp.add_argument("file")
    sp.add_argument("--tol", type=float, default=analysis.DEFAULT_CLUSTER_TOL)
    sp.add_argument("--json", action="store_true")

    sp = add("equiv", cmd_equiv, "search for an equivalence witness (exit 3 inequivalent, 4 exhausted)")
    sp.add_argument("file_a")
    sp.add_argument("file_b")
    sp.add_argument("--budget", type=int, default=analysis.DEFAULT_SEARCH_BUDGET)
    sp.add_argument("--tol", type=float, default=CLI_EQUIV_TOL,
                    help=f"entrywise matching tolerance (default {CLI_EQUIV_TOL:g})")
    out(sp)

    sp = add("mub", cmd_mub, "test whether two matrices are mutually unbiased (exit 2 if not)")
    sp.add_argument("file_a")
    sp.add_argument("file_b")
    sp.add_argument("--tol", type=float, default=None)

    sp = add("tensor", cmd_tensor, "Kronecker product")
    sp.add_argument("a")
    sp.add_argument("b")
    out(sp)

    sp = add("dita", cmd_dita, "Dita composition of A with blocks B1..BK")
    sp.add_argument("a")
    sp.add_argument("b", nargs="+")
    sp.add_argument("-E", action="append", metavar="PHASES",
                    help="comma-separated free phases of E_k, once per k = 2..K")
    turns(sp)
    out(sp)

    sp = add("double", cmd_double, "[[A, E B], [A, -E B]]")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("-E", metavar="PHASES")
    turns(sp)
    out(sp)

    sp = add("quadruple", cmd_quadruple, "4x4 sign-block construction from A, B, C, D")
    for name in "abcd":
        sp.add_argument(name)
    for k in (1, 2, 3):
        sp.add_argument(f"--E{k}", metavar="PHASES")
    turns(sp)
    out(sp)

    sp = add("chains", cmd_chains, "print the chain of rows i < j (0-based)")
    sp.add_argument("file")
    sp.add_argument("i", type=int)
    sp.add_argument("j", type=int)

    sp = add("patterns", cmd_patterns, "list maximal closed-subchain pattern spaces (N <= 6)")
    sp.add_argument("file")
    sp.add_argument("--max-nodes", type=int, default=10**6)
    sp.add_argument("--json", action="store_true")

    sp = add("info", cmd_info, "describe a catalogue id or a document")
    sp.add_argument("target")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, catalogue.UnknownEntryError, construct.ArityError) as exc:
        print(f"chm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except chmio.DocumentError as exc:
        print(f"chm: invalid document: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"chm: {exc}", file=sys.stderr)
        return EXIT_IO
    except (analysis.NotHadamardError, construct.PatternError, catalogue.CatalogueError, ValueError) as exc:
        print(f"chm: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
