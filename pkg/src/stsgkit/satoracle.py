"""Brute-force 3SAT and the end-to-end check that the gadgets preserve answers."""
from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .disambig import parse_distribution, sentence_distribution
from .errors import TooLarge
from .forest import build_forest, enumerate_yielded_derivations
from .grammar import format_fraction, validate_grammar
from .reduction import (Cnf3Formula, DerivationType, build_mpp_reduction,
                        build_mppwg_reduction, build_scfg_reduction, classify_derivation)
from .wordgraph import sentences_of

MAX_VARIABLES = 24


def brute_force_sat(f: Cnf3Formula) -> tuple[bool, list[tuple[bool, ...]]]:
    """All satisfying assignments, as tuples indexed from variable 1."""
    if f.n > MAX_VARIABLES:
        raise TooLarge("%d variables, brute force stops at %d" % (f.n, MAX_VARIABLES))
    found = [a for a in itertools.product((True, False), repeat=f.n) if f.evaluate(a)]
    return bool(found), found


def _truth(lit: int, assignment: Sequence[bool]) -> bool:
    return assignment[abs(lit) - 1] == (lit > 0)


def assignment_to_sentence(f: Cnf3Formula, assignment: Sequence[bool]) -> tuple[str, ...]:
    return tuple("T" if _truth(lit, assignment) else "F" for _, _, lit in f.literals())


def consistent_variables(f: Cnf3Formula, sentence: Sequence[str]) -> list[int]:
    """Variables whose occurrences in ``sentence`` agree on one truth value."""
    implied = {}
    for pos, (_, _, lit) in enumerate(f.literals()):
        value = (sentence[pos] == "T") == (lit > 0)
        implied.setdefault(abs(lit), set()).add(value)
    return [i for i in range(1, f.n + 1) if len(implied.get(i, ())) == 1]


def expected_derivation_counts(f: Cnf3Formula, sentence: Sequence[str]) -> tuple[int, int]:
    """Closed-form (first-type, second-type) derivation counts of a gadget sentence."""
    first = len(consistent_variables(f, sentence))
    trues = [sum(w == "T" for w in sentence[3 * k:3 * k + 3]) for k in range(f.m)]
    return first, math.prod(trues)


def random_formula(rng: random.Random, n: int, m: int) -> Cnf3Formula:
    """Uniform distinct clauses in which every variable occurs."""
    if 3 * m < n:
        raise ValueError("%d clauses cannot mention %d variables" % (m, n))
    literals = [v for i in range(1, n + 1) for v in (i, -i)]
    distinct = len(list(itertools.combinations_with_replacement(literals, 3)))
    if m > distinct:
        raise ValueError("only %d distinct clauses over %d variables" % (distinct, n))
    while True:
        clauses = [tuple(rng.choice(literals) for _ in range(3)) for _ in range(m)]
        if len({tuple(sorted(c)) for c in clauses}) < m:
            continue
        if {abs(x) for c in clauses for x in c} == set(range(1, n + 1)):
            return Cnf3Formula(n, clauses)


def random_formulas(count: int, seed: int, max_n: int = 4, max_m: int = 4) -> list[Cnf3Formula]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, max_n)
        lo = max(1, -(-n // 3))
        m = rng.randint(lo, max_m)
        try:
            out.append(random_formula(rng, n, m))
        except ValueError:
            continue
    return out


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    formula: Cnf3Formula
    satisfiable: bool
    checks: list[Check] = field(default_factory=list)
    values: dict[str, Fraction] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), "" if passed else detail))

    def __str__(self):
        lines = ["formula %s" % self.formula,
                 "satisfiable %s" % ("yes" if self.satisfiable else "no")]
        for key, value in self.values.items():
            lines.append("%s %s" % (key, format_fraction(value)))
        for c in self.checks:
            line = "check %s %s" % (c.name, "pass" if c.passed else "fail")
            lines.append(line + (" " + c.detail if c.detail else ""))
        return "\n".join(lines)


def _yes_no(x: bool) -> str:
    return "yes" if x else "no"


def verify_answer_preservation(f: Cnf3Formula) -> VerificationReport:
    """Run every gadget against brute-force SAT and report each check."""
    sat, models = brute_force_sat(f)
    report = VerificationReport(f, sat)
    wg_gadget = build_mppwg_reduction(f)
    q = wg_gadget.threshold
    report.values["theta"] = wg_gadget.theta
    report.values["threshold"] = q

    report.add("grammar_valid", validate_grammar(wg_gadget.grammar).ok, "mppwg gadget invalid")
    report.add("separation",
               3 ** f.m * wg_gadget.second_type_probability < wg_gadget.first_type_probability,
               "second-type mass can reach a first-type derivation")

    # (a) MPPWG and MPS on the word-graph gadget
    parses = parse_distribution(wg_gadget.grammar, wg_gadget.wordgraph)
    sentences = sentence_distribution(wg_gadget.grammar, wg_gadget.wordgraph)
    max_parse = max(parses.values(), default=Fraction(0))
    max_sentence = max(sentences.values(), default=Fraction(0))
    report.values["max_parse"] = max_parse
    report.values["max_sentence"] = max_sentence
    mppwg, mps = max_parse >= q, max_sentence >= q
    report.add("mppwg_mps", mppwg == sat and mps == sat,
               "sat %s mppwg %s mps %s" % (_yes_no(sat), _yes_no(mppwg), _yes_no(mps)))

    # (b) MPP on the single-sentence gadget
    s_gadget = build_mpp_reduction(f)
    report.values["mpp_threshold"] = s_gadget.threshold
    mpp_best = max(parse_distribution(s_gadget.grammar, s_gadget.wordgraph).values(),
                   default=Fraction(0))
    report.values["mpp_max_parse"] = mpp_best
    mpp = mpp_best >= s_gadget.threshold
    report.add("mpp", mpp == sat and validate_grammar(s_gadget.grammar).ok,
               "sat %s mpp %s" % (_yes_no(sat), _yes_no(mpp)))

    # (c) MPS on the flattened SCFG
    cf_gadget = build_scfg_reduction(f)
    cf_best = max(sentence_distribution(cf_gadget.grammar, cf_gadget.wordgraph).values(),
                  default=Fraction(0))
    report.values["scfg_max_sentence"] = cf_best
    cf = cf_best >= cf_gadget.threshold
    report.add("scfg_mps", cf == sat, "sat %s scfg-mps %s" % (_yes_no(sat), _yes_no(cf)))

    # (d) per-sentence derivation counts against the closed forms
    forest = build_forest(wg_gadget.grammar, wg_gadget.wordgraph)
    seen = Counter()
    for y, d, p in enumerate_yielded_derivations(forest):
        kind = classify_derivation(wg_gadget, d)
        expected_p = (wg_gadget.first_type_probability if kind is DerivationType.FIRST
                      else wg_gadget.second_type_probability)
        if p != expected_p:
            report.add("derivation_counts", False,
                       "derivation %s of %s has probability %s" % (d, "".join(y), p))
            break
        seen[y, kind] += 1
    else:
        bad = None
        for s in sentences_of(wg_gadget.wordgraph):
            got = (seen[s, DerivationType.FIRST], seen[s, DerivationType.SECOND])
            want = expected_derivation_counts(f, s)
            if got != want:
                bad = "sentence %s expected %s got %s" % ("".join(s), want, got)
                break
        report.add("derivation_counts", bad is None, bad or "")

    # (e) exactly the satisfying assignments reach the threshold
    reaching = {s for s, p in sentences.items() if p >= q}
    wanted = {assignment_to_sentence(f, a) for a in models}
    report.add("threshold_sentences", reaching == wanted,
               "mismatched sentences %s" % " ".join(sorted("".join(s) for s in reaching ^ wanted)))

    inconsistent = [p for s, p in sentences.items()
                    if len(consistent_variables(f, s)) < f.n]
    report.add("inconsistent_below_threshold", all(p < q for p in inconsistent),
               "an inconsistent sentence reaches the threshold")
    return report
