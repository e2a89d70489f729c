"""Stochastic tree-substitution grammars and their probability semantics."""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (IncompleteDerivation, NoOpenTree, ParseError, RootMismatch,
                     UnknownTree)
from .trees import Node, Tree, parse_bracket, to_bracket

# A parse is an ordinary tree whose frontier holds terminals only.
ParseTree = Tree


@dataclass(frozen=True)
class ElementaryTree:
    id: str
    tree: Tree
    probability: Fraction

    @property
    def root(self) -> str:
        return self.tree.label

    @cached_property
    def frontier(self) -> tuple[tuple[str, bool], ...]:
        """``(symbol, is_terminal)`` pairs, left to right."""
        return tuple((x, True) if isinstance(x, str) else (x.label, False)
                     for x in self.tree.leaves())

    @property
    def open_trees(self) -> list[str]:
        return [s for s, term in self.frontier if not term]

    def __str__(self):
        return "tree %s %s %s" % (self.id, format_fraction(self.probability), to_bracket(self.tree))


@dataclass(frozen=True)
class Derivation:
    """A left-most derivation, named by the ids of its elementary trees."""
    tree_ids: tuple[str, ...]

    def __init__(self, tree_ids: Iterable[str]):
        object.__setattr__(self, "tree_ids", tuple(tree_ids))

    def __len__(self):
        return len(self.tree_ids)

    def __iter__(self):
        return iter(self.tree_ids)

    def __str__(self):
        return " ".join(self.tree_ids)


@dataclass(frozen=True)
class Stsg:
    start: str
    terminals: tuple[str, ...]
    nonterminals: tuple[str, ...]
    trees: tuple[ElementaryTree, ...]

    def __init__(self, start, terminals, nonterminals, trees):
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "terminals", tuple(dict.fromkeys(terminals)))
        object.__setattr__(self, "nonterminals", tuple(dict.fromkeys(nonterminals)))
        object.__setattr__(self, "trees", tuple(trees))

    @cached_property
    def terminal_set(self) -> frozenset[str]:
        return frozenset(self.terminals)

    @cached_property
    def nonterminal_set(self) -> frozenset[str]:
        return frozenset(self.nonterminals)

    @cached_property
    def by_id(self) -> dict[str, ElementaryTree]:
        return {t.id: t for t in self.trees}

    @cached_property
    def by_root(self) -> dict[str, tuple[ElementaryTree, ...]]:
        out = defaultdict(list)
        for t in sorted(self.trees, key=lambda t: t.id):
            out[t.root].append(t)
        return {k: tuple(v) for k, v in out.items()}

    def __getitem__(self, tree_id: str) -> ElementaryTree:
        try:
            return self.by_id[tree_id]
        except KeyError:
            raise UnknownTree("no elementary tree with id %r" % tree_id) from None

    def __len__(self):
        return len(self.trees)

    def with_probabilities(self, probs: dict[str, Fraction]) -> Stsg:
        return Stsg(self.start, self.terminals, self.nonterminals,
                    [ElementaryTree(t.id, t.tree, probs[t.id]) for t in self.trees])


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def __str__(self):
        lines = ["violation %s" % v for v in self.violations]
        lines += ["warning %s" % w for w in self.warnings]
        return "\n".join(lines) if lines else "valid"


def format_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return "%d/%d" % (x.numerator, x.denominator)


def validate_grammar(g: Stsg) -> ValidationReport:
    """Check every STSG invariant; violations are collected, never raised.

    Nonterminals that root trees but cannot be reached from the start symbol
    only produce warnings.
    """
    report = ValidationReport()
    bad = report.violations
    terms, nts = g.terminal_set, g.nonterminal_set
    for sym in sorted(terms & nts):
        bad.append("symbol %s is both terminal and nonterminal" % sym)
    if g.start not in nts:
        bad.append("start symbol %s is not a declared nonterminal" % g.start)

    seen_ids = set()
    seen_structures = {}
    for t in g.trees:
        if t.id in seen_ids:
            bad.append("duplicate tree id %s" % t.id)
        seen_ids.add(t.id)
        if not isinstance(t.tree, Tree) or not t.tree.children:
            bad.append("tree %s has depth 0" % t.id)
            continue
        if not 0 < t.probability <= 1:
            bad.append("tree %s has probability %s outside (0,1]"
                       % (t.id, format_fraction(t.probability)))
        for node in t.tree.subtrees():
            if node.label not in nts:
                bad.append("tree %s uses undeclared nonterminal %s" % (t.id, node.label))
            for c in node.children:
                if isinstance(c, str) and c not in terms:
                    bad.append("tree %s uses undeclared terminal %s" % (t.id, c))
        other = seen_structures.setdefault(t.tree, t.id)
        if other != t.id:
            bad.append("trees %s and %s have identical structure" % (other, t.id))

    sums = defaultdict(Fraction)
    for t in g.trees:
        sums[t.root] += t.probability
    for root in sorted(sums):
        if sums[root] != 1:
            bad.append("root %s sums to %s" % (root, format_fraction(sums[root])))
    if g.start in nts and g.start not in sums:
        bad.append("start symbol %s roots no tree" % g.start)

    for t in g.trees:
        for sym in t.open_trees:
            if sym not in sums:
                bad.append("tree %s has open tree %s that no tree can fill" % (t.id, sym))

    reachable = {g.start}
    stack = [g.start]
    while stack:
        for t in g.by_root.get(stack.pop(), ()):
            for sym in t.open_trees:
                if sym not in reachable:
                    reachable.add(sym)
                    stack.append(sym)
    for root in sorted(set(sums) - reachable):
        report.warnings.append("nonterminal %s is unreachable from %s" % (root, g.start))
    return report


def _first_open_path(tree: Tree):
    """Child-index path to the left-most open tree, or None."""
    path = []

    def walk(node):
        if isinstance(node, str):
            return False
        if not node.children:
            return True
        for i, c in enumerate(node.children):
            path.append(i)
            if walk(c):
                return True
            path.pop()
        return False

    return path if walk(tree) else None


def leftmost_substitute(t: Tree, t1: ElementaryTree | Tree) -> Tree:
    """Graft ``t1`` onto the left-most open tree of ``t``."""
    sub = t1.tree if isinstance(t1, ElementaryTree) else t1
    path = _first_open_path(t)
    if path is None:
        raise NoOpenTree("tree %s has no open tree" % to_bracket(t))

    def rebuild(node, depth):
        if depth == len(path):
            if node.label != sub.label:
                raise RootMismatch("left-most open tree is %s but the substituted tree is rooted at %s"
                                   % (node.label, sub.label))
            return sub
        i = path[depth]
        kids = list(node.children)
        kids[i] = rebuild(kids[i], depth + 1)
        return Tree(node.label, kids)

    return rebuild(t, 0)


def derive(g: Stsg, d: Derivation | Sequence[str]) -> ParseTree:
    ids = tuple(d)
    if not ids:
        raise IncompleteDerivation("empty derivation")
    first = g[ids[0]]
    if first.root != g.start:
        raise RootMismatch("derivation starts with %s rooted at %s, not %s"
                           % (first.id, first.root, g.start))
    result = first.tree
    for tid in ids[1:]:
        result = leftmost_substitute(result, g[tid])
    if result.open_trees():
        raise IncompleteDerivation("open trees remain after %d steps" % len(ids))
    return result


def derivation_probability(g: Stsg, d: Derivation | Sequence[str]) -> Fraction:
    p = Fraction(1)
    for tid in d:
        p *= g[tid].probability
    return p


def yield_of(p: Node) -> tuple[str, ...]:
    if isinstance(p, str):
        return (p,)
    return p.yield_()


# -- text format ------------------------------------------------------------

_FRACTION = re.compile(r"^(\d+)(?:/(\d+))?$")


def parse_fraction(text: str, line=None, column=None) -> Fraction:
    m = _FRACTION.match(text)
    if not m or (m.group(2) is not None and int(m.group(2)) == 0):
        raise ParseError("bad probability %r, expected <num>/<den>" % text, line, column)
    return Fraction(int(m.group(1)), int(m.group(2) or 1))


def _split_fields(line: str, count: int):
    """Split the first ``count`` whitespace-separated fields off ``line``,
    returning them with their 1-based columns plus the remainder and its offset."""
    out = []
    pos = 0
    for _ in range(count):
        while pos < len(line) and line[pos].isspace():
            pos += 1
        start = pos
        while pos < len(line) and not line[pos].isspace():
            pos += 1
        out.append((line[start:pos], start + 1))
    return out, line[pos:], pos


def read_grammar(text: str, source: str | None = None) -> Stsg:
    start = None
    terminals: list[str] = []
    nonterminals: list[str] = []
    pending = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        words = line.split()
        head = words[0]
        try:
            if head == "start":
                if len(words) != 2:
                    raise ParseError("expected 'start <name>'", lineno, 1)
                start = words[1]
            elif head == "terminal":
                terminals.extend(words[1:])
            elif head == "nonterminal":
                nonterminals.extend(words[1:])
            elif head == "tree":
                (_, (tid, _c), (prob, pcol)), rest, off = _split_fields(line, 3)
                if not tid or not prob or not rest.strip():
                    raise ParseError("expected 'tree <id> <num>/<den> <tree>'", lineno, 1)
                pending.append((lineno, tid, parse_fraction(prob, lineno, pcol), rest, off))
            else:
                raise ParseError("unknown directive %r" % head, lineno, line.index(head) + 1)
        except ParseError as e:
            e.source = source
            raise
    if start is None:
        raise ParseError("missing 'start' line", None, None, source)
    terms = set(terminals)
    trees = []
    for lineno, tid, prob, rest, off in pending:
        try:
            tree = parse_bracket(rest, terms, lineno, off)
        except ParseError as e:
            e.source = source
            raise
        trees.append(ElementaryTree(tid, tree, prob))
    return Stsg(start, terminals, nonterminals, trees)


def write_grammar(g: Stsg) -> str:
    lines = ["start %s" % g.start,
             "terminal %s" % " ".join(g.terminals),
             "nonterminal %s" % " ".join(g.nonterminals)]
    lines += [str(t) for t in g.trees]
    return "\n".join(lines) + "\n"
