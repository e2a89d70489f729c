"""Shared derivation forests over sausage word-graphs.

The chart is filled bottom-up by span length.  Each elementary tree acts as
one flat production ``root -> frontier``; partial matches of a frontier are
kept as dotted items ``(tree_id, dot, start, end)`` so that long frontiers do
not blow up the number of stored edges.  The dotted items are an internal
binarization: :meth:`DerivationForest.and_nodes` unpacks them into
``(tree_id, children)`` hyperedges.

Or-node keys are ``(nonterminal, start, end)`` with 0-based half-open spans.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .errors import CapExceeded, CyclicForest
from .grammar import Derivation, Stsg
from .trees import Tree, plug
from .wordgraph import WordGraph, as_wordgraph

OrKey = tuple  # (nonterminal, start, end)
ItemKey = tuple  # (tree_id, dot, start, end)

DEFAULT_CAP = 10 ** 6


@dataclass(frozen=True)
class AndNode:
    tree_id: str
    children: tuple


class DerivationForest:
    """Packed forest of every derivation whose yield lies in the word-graph.

    Only nodes reachable from the root are kept.  ``order`` lists or-nodes and
    dotted items children-first, which is all the dynamic programs need.
    """

    def __init__(self, grammar: Stsg, wordgraph: WordGraph, root: OrKey,
                 or_edges: dict, item_edges: dict, order: list):
        self.grammar = grammar
        self.wordgraph = wordgraph
        self.root = root
        self.or_edges = or_edges
        self.item_edges = item_edges
        self.order = order

    @property
    def empty(self) -> bool:
        return self.root not in self.or_edges

    @property
    def or_nodes(self) -> list:
        return sorted(self.or_edges, key=lambda k: (k[1], k[2] - k[1], k[0]))

    def __len__(self):
        return len(self.or_edges) + len(self.item_edges)

    def __repr__(self):
        return "<DerivationForest %d or-nodes, %d items%s>" % (
            len(self.or_edges), len(self.item_edges), ", empty" if self.empty else "")

    def _terminal(self, item: ItemKey) -> str:
        return self.grammar[item[0]].frontier[item[1] - 1][0]

    def _item_children(self, item: ItemKey) -> Iterator[tuple]:
        for prev, child in self.item_edges[item]:
            tail = () if child is None else (child,)
            if prev is None:
                yield tail
            else:
                for head in self._item_children(prev):
                    yield head + tail

    def and_nodes(self, node: OrKey) -> list[AndNode]:
        """Hyperedges below ``node``: tree id plus the or-nodes filling its open trees."""
        return [AndNode(item[0], kids)
                for item in self.or_edges.get(node, ())
                for kids in self._item_children(item)]

    # -- dynamic programs ---------------------------------------------------

    def _fold(self, leaf, times, plus, weight):
        """Generic bottom-up evaluation over the packed forest.

        ``leaf`` is the value of an empty prefix or a terminal, ``weight``
        lifts a tree probability into the value domain.
        """
        val = {}
        for node in self.order:
            if len(node) == 4:
                acc = None
                for prev, child in self.item_edges[node]:
                    v = leaf if prev is None else val[prev]
                    if child is not None:
                        v = times(v, val[child])
                    acc = v if acc is None else plus(acc, v)
            else:
                acc = None
                for item in self.or_edges[node]:
                    v = times(weight(item[0]), val[item])
                    acc = v if acc is None else plus(acc, v)
            val[node] = acc
        return val

    def inside(self) -> dict:
        """Total probability mass below every node."""
        g = self.grammar
        return self._fold(Fraction(1), lambda a, b: a * b, lambda a, b: a + b,
                          lambda tid: g[tid].probability)

    def counts(self) -> dict:
        return self._fold(1, lambda a, b: a * b, lambda a, b: a + b, lambda tid: 1)

    def derivation_count(self) -> int:
        if self.empty:
            return 0
        return self.counts()[self.root]

    def total_probability(self) -> Fraction:
        if self.empty:
            return Fraction(0)
        return self.inside()[self.root]

    def viterbi(self) -> dict:
        """Best ``(probability, tree-id sequence)`` below every node.

        Ties go to the lexicographically smallest id sequence.  Sequences of
        complete derivations from one node are prefix-free, so choosing the
        smallest sequence per child yields the smallest concatenation.
        """
        g = self.grammar

        def times(a, b):
            return a[0] * b[0], a[1] + b[1]

        def plus(a, b):
            if a[0] != b[0]:
                return a if a[0] > b[0] else b
            return a if a[1] <= b[1] else b

        return self._fold((Fraction(1), ()), times, plus,
                          lambda tid: (g[tid].probability, (tid,)))

    def yield_table(self, cap: Optional[int] = None) -> dict:
        """Probability mass per yield at the root (sentence probabilities)."""
        if self.empty:
            return {}
        g = self.grammar
        val = {}
        for node in self.order:
            acc = defaultdict(Fraction)
            if len(node) == 4:
                term = None
                for prev, child in self.item_edges[node]:
                    left = {(): Fraction(1)} if prev is None else val[prev]
                    if child is None:
                        if term is None:
                            term = (self._terminal(node),)
                        for y, p in left.items():
                            acc[y + term] += p
                    else:
                        right = val[child]
                        for y1, p1 in left.items():
                            for y2, p2 in right.items():
                                acc[y1 + y2] += p1 * p2
            else:
                for item in self.or_edges[node]:
                    w = g[item[0]].probability
                    for y, p in val[item].items():
                        acc[y] += w * p
            if cap is not None and len(acc) > cap:
                raise CapExceeded(cap, None, "partial sentences")
            val[node] = dict(acc)
        return val[self.root]

    def parse_table(self, cap: Optional[int] = None) -> dict:
        """Probability mass per derived parse tree at the root."""
        if self.empty:
            return {}
        g = self.grammar
        val = {}
        for node in self.order:
            acc = defaultdict(Fraction)
            if len(node) == 4:
                for prev, child in self.item_edges[node]:
                    left = {(): Fraction(1)} if prev is None else val[prev]
                    if child is None:
                        for slots, p in left.items():
                            acc[slots] += p
                    else:
                        right = val[child]
                        for s1, p1 in left.items():
                            for t2, p2 in right.items():
                                acc[s1 + (t2,)] += p1 * p2
            else:
                for item in self.or_edges[node]:
                    et = g[item[0]]
                    for slots, p in val[item].items():
                        acc[plug(et.tree, slots)] += et.probability * p
            if cap is not None and len(acc) > cap:
                raise CapExceeded(cap, None, "partial parses")
            val[node] = dict(acc)
        return val[self.root]

    # -- enumeration --------------------------------------------------------

    def _enumerate(self, with_trees: bool) -> list:
        """All complete derivations as ``(ids, yield, probability, parse)``."""
        if self.empty:
            return []
        g = self.grammar
        memo = {}
        for node in self.order:
            out = []
            if len(node) == 4:
                for prev, child in self.item_edges[node]:
                    left = [((), (), Fraction(1), ())] if prev is None else memo[prev]
                    if child is None:
                        term = (self._terminal(node),)
                        out.extend((s, y + term, p, t) for s, y, p, t in left)
                    else:
                        right = memo[child]
                        for s1, y1, p1, t1 in left:
                            for s2, y2, p2, t2 in right:
                                out.append((s1 + s2, y1 + y2, p1 * p2,
                                            t1 + (t2,) if with_trees else ()))
            else:
                for item in self.or_edges[node]:
                    et = g[item[0]]
                    head = (et.id,)
                    for s, y, p, t in memo[item]:
                        out.append((head + s, y, et.probability * p,
                                    plug(et.tree, t) if with_trees else None))
            memo[node] = out
        result = memo[self.root]
        result.sort(key=lambda e: e[0])
        return result

    def _check_cap(self, cap: int) -> None:
        n = self.derivation_count()
        if n > cap:
            raise CapExceeded(cap, n)


def build_forest(g: Stsg, wg) -> DerivationForest:
    """Chart-parse ``wg`` with ``g``; runs in time polynomial in the word-graph
    length and the total size of the grammar.

    Raises :class:`CyclicForest` if a unary cycle is reachable from the root.
    """
    wg = as_wordgraph(wg)
    wg.check_terminals(g.terminal_set)
    L = len(wg)
    trees = sorted(g.trees, key=lambda t: t.id)
    fronts = {t.id: t.frontier for t in trees}
    unary = [t for t in trees if len(t.frontier) == 1 and not t.frontier[0][1]]
    lead_nt = [t for t in trees if len(t.frontier) > 1 and not t.frontier[0][1]]

    items: dict = {}
    ors: dict = defaultdict(list)

    for length in range(1, L + 1):
        for i in range(0, L - length + 1):
            j = i + length
            # dotted items that consume at least one token beyond the first symbol
            for t in trees:
                fr = fronts[t.id]
                for r in range(1, min(len(fr), length) + 1):
                    sym, term = fr[r - 1]
                    bps = []
                    if r == 1:
                        if term and length == 1 and sym in wg[i]:
                            bps.append((None, None))
                    elif term:
                        prev = (t.id, r - 1, i, j - 1)
                        if prev in items and sym in wg[j - 1]:
                            bps.append((prev, None))
                    else:
                        for m in range(i + r - 1, j):
                            prev = (t.id, r - 1, i, m)
                            if prev in items and (sym, m, j) in ors:
                                bps.append((prev, (sym, m, j)))
                    if bps:
                        items[(t.id, r, i, j)] = bps
            # or-nodes, closing over unary trees within the span
            for t in trees:
                if len(fronts[t.id]) > 1 or fronts[t.id][0][1]:
                    if (t.id, len(fronts[t.id]), i, j) in items:
                        ors[(t.root, i, j)].append((t.id, len(fronts[t.id]), i, j))
            changed = True
            while changed:
                changed = False
                for t in unary:
                    key = (t.id, 1, i, j)
                    child = (t.frontier[0][0], i, j)
                    if key not in items and child in ors:
                        items[key] = [(None, child)]
                        ors[(t.root, i, j)].append(key)
                        changed = True
            for t in lead_nt:
                child = (t.frontier[0][0], i, j)
                if child in ors:
                    items[(t.id, 1, i, j)] = [(None, child)]
    for node in ors:
        ors[node].sort()

    root = (g.start, 0, L)
    if root not in ors:
        return DerivationForest(g, wg, root, {}, {}, [])

    # trim to the part reachable from the root and order it children-first
    def successors(node):
        if len(node) == 3:
            return ors[node]
        return [x for bp in items[node] for x in bp if x is not None]

    state = {root: 1}
    order = []
    stack = [(root, iter(successors(root)))]
    while stack:
        node, it = stack[-1]
        for nxt in it:
            s = state.get(nxt)
            if s is None:
                state[nxt] = 1
                stack.append((nxt, iter(successors(nxt))))
                break
            if s == 1:
                raise CyclicForest("unary cycle through %s over span [%d,%d)"
                                   % (nxt[0], nxt[-2], nxt[-1]))
        else:
            stack.pop()
            state[node] = 2
            order.append(node)
    or_edges = {k: ors[k] for k in order if len(k) == 3}
    item_edges = {k: items[k] for k in order if len(k) == 4}
    return DerivationForest(g, wg, root, or_edges, item_edges, order)


def enumerate_derivations(f: DerivationForest, cap: int = DEFAULT_CAP) -> list[tuple[Derivation, Fraction]]:
    """Every complete derivation with its probability, sorted by id sequence."""
    f._check_cap(cap)
    return [(Derivation(s), p) for s, _, p, _ in f._enumerate(False)]


def enumerate_yielded_derivations(f: DerivationForest, cap: int = DEFAULT_CAP):
    """Like :func:`enumerate_derivations` but as ``(sentence, Derivation, prob)``."""
    f._check_cap(cap)
    return [(y, Derivation(s), p) for s, y, p, _ in f._enumerate(False)]


def enumerate_parses(f: DerivationForest, cap: int = DEFAULT_CAP) -> list[tuple[Tree, list[Derivation]]]:
    """Derivations grouped by the parse tree they derive.

    Parses are ordered by yield, then by bracketed form.
    """
    f._check_cap(cap)
    groups: dict = {}
    for s, _, _, tree in f._enumerate(True):
        groups.setdefault(tree, []).append(Derivation(s))
    return sorted(groups.items(), key=lambda kv: (kv[0].yield_(), str(kv[0])))


def derivation_counts_by_yield(f: DerivationForest, cap: int = DEFAULT_CAP) -> Counter:
    f._check_cap(cap)
    return Counter(y for _, y, _, _ in f._enumerate(False))


__all__ = ["AndNode", "DerivationForest", "build_forest", "enumerate_derivations",
           "enumerate_yielded_derivations", "enumerate_parses", "derivation_counts_by_yield",
           "DEFAULT_CAP"]
