"""Compile 3CNF formulas into STSG hardness gadgets.

Three variants are produced:

``mppwg``
    STSG over terminals ``T``/``F`` with word-graph ``{T,F}^{3m}``.  The
    gadget has a parse (equivalently a sentence) of probability at least the
    threshold iff the formula is satisfiable.
``mpp``
    ``T``/``F`` become nonterminals above position terminals ``v<k>_<j>``; the
    input is the single sentence ``v1_1 v1_2 ... v<m>_3``.
``scfg``
    The ``mppwg`` gadget with every elementary tree flattened to a depth-one
    production.

Symbols are named ``S``, ``C<k>``, ``u<i>`` and ``nu<i>`` (negated literal).
"""
from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import DuplicateProduction, InvalidFormula, ParseError
from .grammar import Derivation, ElementaryTree, Stsg
from .trees import Tree
from .wordgraph import WordGraph

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


@dataclass(frozen=True)
class Cnf3Formula:
    """3CNF formula; literals are DIMACS-style signed variable indices."""
    n: int
    clauses: tuple[tuple[int, int, int], ...]

    def __init__(self, n: int, clauses: Iterable[Sequence[int]]):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in clauses))
        self._check()

    def _check(self):
        if self.n < 1:
            raise InvalidFormula("need at least one variable")
        if not self.clauses:
            raise InvalidFormula("need at least one clause")
        seen = set()
        for k, c in enumerate(self.clauses, 1):
            if len(c) != 3:
                raise InvalidFormula("clause %d has %d literals, expected 3" % (k, len(c)))
            for lit in c:
                if not isinstance(lit, int) or lit == 0 or abs(lit) > self.n:
                    raise InvalidFormula("clause %d has literal %r outside 1..%d" % (k, lit, self.n))
            key = tuple(sorted(c))
            if key in seen:
                raise InvalidFormula("clause %d repeats an earlier clause" % k)
            seen.add(key)
        missing = set(range(1, self.n + 1)) - {abs(x) for c in self.clauses for x in c}
        if missing:
            raise InvalidFormula("variables %s never occur" % sorted(missing))

    @property
    def m(self) -> int:
        return len(self.clauses)

    def literals(self):
        """``(k, j, literal)`` for every clause position, 1-based."""
        for k, c in enumerate(self.clauses, 1):
            for j, lit in enumerate(c, 1):
                yield k, j, lit

    def evaluate(self, assignment: Sequence[bool]) -> bool:
        return all(any(assignment[abs(x) - 1] == (x > 0) for x in c) for c in self.clauses)

    def __str__(self):
        def lit(x):
            return ("~u%d" if x < 0 else "u%d") % abs(x)
        return " & ".join("(%s)" % " | ".join(map(lit, c)) for c in self.clauses)


def read_dimacs(text: str, source: Optional[str] = None) -> Cnf3Formula:
    """Parse DIMACS CNF, insisting on exactly three literals per clause."""
    header = None
    clauses = []
    current = []
    start = None
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("%"):
            break
        if stripped.startswith("p"):
            words = stripped.split()
            if header is not None:
                raise ParseError("second problem line", lineno, 1, source)
            if len(words) != 4 or words[1] != "cnf" or not all(w.isdigit() for w in words[2:]):
                raise ParseError("expected 'p cnf <vars> <clauses>'", lineno, 1, source)
            header = (int(words[2]), int(words[3]))
            continue
        if header is None:
            raise ParseError("clause before the problem line", lineno, 1, source)
        for match in re.finditer(r"\S+", line):
            tok, col = match.group(), match.start() + 1
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError("bad literal %r" % tok, lineno, col, source) from None
            if abs(lit) > header[0]:
                raise ParseError("literal %d exceeds %d variables" % (lit, header[0]),
                                 lineno, col, source)
            if start is None:
                start = (lineno, col)
            if lit == 0:
                if len(current) != 3:
                    raise ParseError("clause has %d literals, expected 3" % len(current),
                                     start[0], start[1], source)
                clauses.append(tuple(current))
                current, start = [], None
            else:
                current.append(lit)
    if header is None:
        raise ParseError("missing problem line", None, None, source)
    if current:
        raise ParseError("last clause is not terminated by 0", start[0], start[1], source)
    if len(clauses) != header[1]:
        raise ParseError("header announces %d clauses, found %d" % (header[1], len(clauses)),
                         None, None, source)
    try:
        return Cnf3Formula(header[0], clauses)
    except InvalidFormula as e:
        raise ParseError(str(e), None, None, source) from None


def write_dimacs(f: Cnf3Formula) -> str:
    lines = ["p cnf %d %d" % (f.n, f.m)] + ["%d %d %d 0" % c for c in f.clauses]
    return "\n".join(lines) + "\n"


def literal_symbol(lit: int) -> str:
    return ("nu%d" if lit < 0 else "u%d") % abs(lit)


def occurrence_counts(f: Cnf3Formula) -> tuple[int, ...]:
    """Occurrences of both literals of each variable, indexed from variable 1."""
    c = Counter(abs(x) for _, _, x in f.literals())
    return tuple(c[i] for i in range(1, f.n + 1))


def theta_bounds(f: Cnf3Formula, factor: Fraction = HALF) -> tuple[Fraction, Fraction]:
    """Open interval for the gadget parameter.

    ``factor`` is the probability of one literal tree: 1/2 for the word-graph
    gadget and 1/(6m) for the single-sentence gadget.
    """
    s = sum(factor ** k for k in occurrence_counts(f))
    return 1 / (2 * s + factor ** f.m), 1 / (2 * s)


def choose_theta(bounds: tuple[Fraction, Fraction]) -> Fraction:
    lower, upper = bounds
    return (lower + upper) / 2


class DerivationType(enum.Enum):
    FIRST = "first"    # starts with a variable-assignment tree
    SECOND = "second"  # starts with the clause backbone


@dataclass(frozen=True)
class ReductionOutput:
    formula: Cnf3Formula
    variant: str
    grammar: Stsg
    wordgraph: WordGraph
    theta: Fraction
    threshold: Fraction
    occurrence_counts: tuple[int, ...]
    p_zero: Fraction
    literal_probability: Fraction

    @property
    def sentence(self) -> tuple[str, ...]:
        return tuple(q[0] for q in self.wordgraph.positions)

    @property
    def first_type_probability(self) -> Fraction:
        return self.theta * self.literal_probability ** (3 * self.formula.m)

    @property
    def second_type_probability(self) -> Fraction:
        m = self.formula.m
        return self.p_zero * self.literal_probability ** (2 * m) * THIRD ** m


BACKBONE_ID = "b"


def _parameters(f: Cnf3Formula, factor: Fraction, theta: Optional[Fraction]):
    bounds = theta_bounds(f, factor)
    if theta is None:
        theta = choose_theta(bounds)
    elif not bounds[0] < theta < bounds[1]:
        raise ValueError("theta %s outside (%s, %s)" % (theta, *bounds))
    counts = occurrence_counts(f)
    p = [theta * factor ** k for k in counts]
    p_zero = 1 - 2 * sum(p)
    m = f.m
    threshold = f.n * theta * factor ** (3 * m) + p_zero * factor ** (2 * m) * THIRD ** m
    return theta, counts, p, p_zero, threshold


def _gadget(f: Cnf3Formula, lexical):
    """Shared skeleton.  ``lexical(k, j, value)`` builds the subtree placed
    under the literal node at clause position (k, j) for truth ``value``."""
    def literal_node(k, j, lit, value):
        if value is None:
            return Tree(literal_symbol(lit))
        return Tree(literal_symbol(lit), [lexical(k, j, value)])

    def clause(k, values):
        c = f.clauses[k - 1]
        return Tree("C%d" % k, [literal_node(k, j, lit, values(k, j, lit))
                                for j, lit in enumerate(c, 1)])

    assignment = {}
    for i in range(1, f.n + 1):
        for value in (True, False):
            def values(k, j, lit, i=i, value=value):
                if abs(lit) != i:
                    return None
                return value if lit > 0 else not value
            assignment[i, value] = Tree("S", [clause(k, values) for k in range(1, f.m + 1)])
    clause_trees = {}
    for k in range(1, f.m + 1):
        for j in (1, 2, 3):
            clause_trees[k, j] = clause(k, lambda kk, jj, lit, j=j: True if jj == j else None)
    backbone = Tree("S", [Tree("C%d" % k) for k in range(1, f.m + 1)])
    return assignment, clause_trees, backbone


def _literal_nonterminals(f):
    out = []
    for i in range(1, f.n + 1):
        out += ["u%d" % i, "nu%d" % i]
    return out


def build_mppwg_reduction(f: Cnf3Formula, theta: Optional[Fraction] = None) -> ReductionOutput:
    theta, counts, p, p_zero, threshold = _parameters(f, HALF, theta)
    assignment, clause_trees, backbone = _gadget(f, lambda k, j, v: "T" if v else "F")
    trees = []
    for (i, value), tree in assignment.items():
        trees.append(ElementaryTree("a%d%s" % (i, "t" if value else "f"), tree, p[i - 1]))
    trees.append(ElementaryTree(BACKBONE_ID, backbone, p_zero))
    for (k, j), tree in clause_trees.items():
        trees.append(ElementaryTree("c%d_%d" % (k, j), tree, THIRD))
    for sym in _literal_nonterminals(f):
        for value in ("T", "F"):
            trees.append(ElementaryTree("l_%s_%s" % (sym, value), Tree(sym, [value]), HALF))
    nonterminals = ["S"] + ["C%d" % k for k in range(1, f.m + 1)] + _literal_nonterminals(f)
    g = Stsg("S", ["T", "F"], nonterminals, trees)
    wg = WordGraph.power(("T", "F"), 3 * f.m)
    return ReductionOutput(f, "mppwg", g, wg, theta, threshold, counts, p_zero, HALF)


def position_terminal(k: int, j: int) -> str:
    return "v%d_%d" % (k, j)


def build_mpp_reduction(f: Cnf3Formula, theta: Optional[Fraction] = None) -> ReductionOutput:
    """Single-sentence gadget; every 1/2 of the word-graph gadget becomes 1/(6m)."""
    factor = Fraction(1, 6 * f.m)
    theta, counts, p, p_zero, threshold = _parameters(f, factor, theta)

    def lexical(k, j, value):
        return Tree("T" if value else "F", [position_terminal(k, j)])

    assignment, clause_trees, backbone = _gadget(f, lexical)
    trees = []
    for (i, value), tree in assignment.items():
        trees.append(ElementaryTree("a%d%s" % (i, "t" if value else "f"), tree, p[i - 1]))
    trees.append(ElementaryTree(BACKBONE_ID, backbone, p_zero))
    for (k, j), tree in clause_trees.items():
        trees.append(ElementaryTree("c%d_%d" % (k, j), tree, THIRD))
    positions = [(k, j) for k in range(1, f.m + 1) for j in (1, 2, 3)]
    for sym in _literal_nonterminals(f):
        for value in (True, False):
            for k, j in positions:
                tid = "l_%s_%s_%d_%d" % (sym, "T" if value else "F", k, j)
                trees.append(ElementaryTree(tid, Tree(sym, [lexical(k, j, value)]), factor))
    terminals = [position_terminal(k, j) for k, j in positions]
    nonterminals = (["S"] + ["C%d" % k for k in range(1, f.m + 1)]
                    + _literal_nonterminals(f) + ["T", "F"])
    g = Stsg("S", terminals, nonterminals, trees)
    wg = WordGraph.from_sentence(terminals)
    return ReductionOutput(f, "mpp", g, wg, theta, threshold, counts, p_zero, factor)


def flatten_to_scfg(g: Stsg) -> Stsg:
    """Replace every elementary tree by the production root -> frontier."""
    seen = {}
    trees = []
    for t in g.trees:
        flat = Tree(t.root, [x if isinstance(x, str) else Tree(x.label) for x in t.tree.leaves()])
        if flat in seen:
            raise DuplicateProduction("trees %s and %s flatten to %s" % (seen[flat], t.id, flat))
        seen[flat] = t.id
        trees.append(ElementaryTree(t.id, flat, t.probability))
    return Stsg(g.start, g.terminals, g.nonterminals, trees)


def build_scfg_reduction(f: Cnf3Formula, theta: Optional[Fraction] = None) -> ReductionOutput:
    out = build_mppwg_reduction(f, theta)
    return ReductionOutput(f, "scfg", flatten_to_scfg(out.grammar), out.wordgraph, out.theta,
                           out.threshold, out.occurrence_counts, out.p_zero, HALF)


BUILDERS = {"mppwg": build_mppwg_reduction, "mpp": build_mpp_reduction,
            "scfg": build_scfg_reduction}


def classify_derivation(out: ReductionOutput, d: Derivation) -> DerivationType:
    first = d.tree_ids[0]
    if first == BACKBONE_ID:
        return DerivationType.SECOND
    if out.grammar[first].root == "S":
        return DerivationType.FIRST
    raise ValueError("derivation does not start at S: %s" % d)


def max_tree_nodes(g: Stsg) -> int:
    return max(t.tree.size() for t in g.trees)
