"""Command-line entry point.

Exit status: 0 on success or a ``yes`` decision, 1 on ``no`` (or a failed
verification), 2 on any error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import disambig
from .errors import CapExceeded, StsgError
from .forest import DEFAULT_CAP
from .grammar import (format_fraction, parse_fraction, read_grammar, validate_grammar,
                      write_grammar)
from .reduction import BUILDERS, read_dimacs
from .satoracle import random_formulas, verify_answer_preservation
from .wordgraph import read_wordgraph, write_wordgraph

EXIT_OK, EXIT_NO, EXIT_ERROR = 0, 1, 2


def _read(path):
    return Path(path).read_text()


def _load_grammar(path):
    return read_grammar(_read(path), source=str(path))


def _load_wordgraph(path):
    return read_wordgraph(_read(path), source=str(path))


def _decision(out, value, threshold):
    if threshold is None:
        return EXIT_OK
    yes = value is not None and value >= threshold
    out.append("decision %s threshold %s" % ("yes" if yes else "no", format_fraction(threshold)))
    return EXIT_OK if yes else EXIT_NO


def cmd_reduce(args, out):
    formula = read_dimacs(_read(args.cnf), source=args.cnf)
    result = BUILDERS[args.variant](formula)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "grammar.stsg").write_text(write_grammar(result.grammar))
    (outdir / "wordgraph.wg").write_text(write_wordgraph(result.wordgraph))
    sidecar = ["variant %s" % args.variant,
               "threshold %s" % format_fraction(result.threshold),
               "theta %s" % format_fraction(result.theta)]
    (outdir / "reduction.txt").write_text("\n".join(sidecar) + "\n")
    out.extend(sidecar)
    out.append("trees %d" % len(result.grammar))
    return EXIT_OK


def cmd_mpd(args, out):
    g, wg = _load_grammar(args.grammar), _load_wordgraph(args.input)
    best = disambig.mpd(g, wg)
    if best is None:
        out.append("mpd none")
        return _decision(out, None, args.threshold)
    d, p = best
    out.append("mpd %s" % format_fraction(p))
    out.append("derivation %s" % d)
    return _decision(out, p, args.threshold)


def cmd_mpp(args, out):
    g, wg = _load_grammar(args.grammar), _load_wordgraph(args.input)
    best = disambig.mpp_exact(g, wg, args.cap)
    if best is None:
        out.append("mpp none")
        return _decision(out, None, args.threshold)
    parse, p = best
    out.append("mpp %s %s" % (" ".join(parse.yield_()), format_fraction(p)))
    out.append("parse %s" % parse)
    return _decision(out, p, args.threshold)


def cmd_mps(args, out):
    g, wg = _load_grammar(args.grammar), _load_wordgraph(args.input)
    best = disambig.mps_exact(g, wg, args.cap)
    if best is None:
        out.append("mps none")
        return _decision(out, None, args.threshold)
    sentence, p = best
    out.append("mps %s %s" % (" ".join(sentence), format_fraction(p)))
    return _decision(out, p, args.threshold)


def cmd_sample(args, out):
    g, wg = _load_grammar(args.grammar), _load_wordgraph(args.input)
    parse, freq = disambig.monte_carlo_mpp(g, wg, args.samples, args.seed)
    out.append("mc %s estimate %.6f samples %d seed %d"
               % (" ".join(parse.yield_()), freq, args.samples, args.seed))
    out.append("parse %s" % parse)
    return EXIT_OK


def cmd_collapse(args, out):
    g = _load_grammar(args.grammar)
    out.append(write_grammar(disambig.collapse_transform(g)).rstrip("\n"))
    return EXIT_OK


def cmd_validate(args, out):
    report = validate_grammar(_load_grammar(args.grammar))
    out.append(str(report))
    return EXIT_OK if report.ok else EXIT_NO


def cmd_verify(args, out):
    if args.cnf is None and args.random is None:
        raise StsgError("verify needs a CNF file or --random N")
    formulas = []
    if args.cnf is not None:
        formulas.append(read_dimacs(_read(args.cnf), source=args.cnf))
    if args.random is not None:
        formulas += random_formulas(args.random, args.seed, args.max_n, args.max_m)
    failed = 0
    for i, f in enumerate(formulas):
        report = verify_answer_preservation(f)
        failed += not report.ok
        if i:
            out.append("")
        out.append(str(report))
    if len(formulas) > 1:
        out.append("")
        out.append("verified %d pass %d fail %d" % (len(formulas), len(formulas) - failed, failed))
    return EXIT_OK if not failed else EXIT_NO


def build_parser():
    parser = argparse.ArgumentParser(prog="stsgkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="compile a 3CNF formula into a hardness gadget")
    p.add_argument("cnf")
    p.add_argument("--variant", choices=sorted(BUILDERS), default="mppwg")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reduce)

    threshold = argparse.ArgumentParser(add_help=False)
    threshold.add_argument("grammar")
    threshold.add_argument("input", help="word-graph or sentence file")
    threshold.add_argument("--threshold", type=parse_fraction, default=None,
                           help="decision threshold as num/den")
    threshold.add_argument("--cap", type=int, default=DEFAULT_CAP)
    for name, func, text in [("mpd", cmd_mpd, "most probable derivation"),
                             ("mpp", cmd_mpp, "most probable parse (exact)"),
                             ("mps", cmd_mps, "most probable sentence (exact)")]:
        p = sub.add_parser(name, parents=[threshold], help=text)
        p.set_defaults(func=func)

    p = sub.add_parser("sample", help="Monte-Carlo estimate of the most probable parse")
    p.add_argument("grammar")
    p.add_argument("input")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("collapse", help="print the probability-collapsed grammar")
    p.add_argument("grammar")
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("validate", help="check grammar invariants")
    p.add_argument("grammar")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("verify", help="check that the gadgets preserve SAT answers")
    p.add_argument("cnf", nargs="?")
    p.add_argument("--random", type=int, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--max-m", type=int, default=4)
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_OK
    out: list[str] = []
    try:
        code = args.func(args, out)
    except CapExceeded as e:
        stderr.write("error: %s\n" % e)
        return EXIT_ERROR
    except (StsgError, OSError, ValueError) as e:
        stderr.write("error: %s\n" % e)
        return EXIT_ERROR
    if out:
        stdout.write("\n".join(out) + "\n")
    return code


def main():
    sys.exit(run())
