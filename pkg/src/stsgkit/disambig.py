"""Disambiguation: MPD, exact MPP/MPS, threshold decisions, Monte-Carlo
estimation and the probability-collapsing transform.

MPD is a max-product pass over the packed forest and stays polynomial.  The
exact MPP and MPS searches group derivation mass by parse or by sentence; they
are exponential in the worst case, which is unavoidable for these problems.
"""
from __future__ import annotations

import bisect
import random
from collections import Counter, defaultdict
from fractions import Fraction
from typing import Optional, Sequence

from .errors import CapExceeded, EmptyForest, UnknownSymbol
from .forest import DEFAULT_CAP, DerivationForest, build_forest
from .grammar import Derivation, ElementaryTree, Stsg, derive
from .trees import Tree
from .wordgraph import as_wordgraph, sentences_of


def _parse_key(tree: Tree):
    return tree.yield_(), str(tree)


def _argmax(table: dict, key):
    best = None
    for x, p in table.items():
        if best is None or p > best[1] or (p == best[1] and key(x) < key(best[0])):
            best = (x, p)
    return best


def mpd(g: Stsg, wg) -> Optional[tuple[Derivation, Fraction]]:
    """Most probable derivation over ``wg``; ties go to the smallest id sequence."""
    f = build_forest(g, wg)
    if f.empty:
        return None
    p, seq = f.viterbi()[f.root]
    return Derivation(seq), p


def sentence_probability(g: Stsg, sentence: Sequence[str]) -> Fraction:
    try:
        f = build_forest(g, as_wordgraph(sentence))
    except UnknownSymbol:
        return Fraction(0)
    return f.total_probability()


def _match(pattern, node, slots) -> bool:
    if isinstance(pattern, str):
        return pattern == node
    if not isinstance(node, Tree) or node.label != pattern.label:
        return False
    if not pattern.children:
        slots.append(node)
        return True
    if len(pattern.children) != len(node.children):
        return False
    return all(_match(pc, nc, slots) for pc, nc in zip(pattern.children, node.children))


def fragment_weight(g: Stsg, tree: Tree) -> Fraction:
    """Total probability of all ways to compose ``tree`` from elementary trees.

    Open trees of ``tree`` itself stay open; every internal node is either
    covered by one elementary tree or is the root of another one.  For a
    complete parse rooted at the start symbol this is the parse probability.
    """
    memo = {}

    def weight(node: Tree) -> Fraction:
        if node in memo:
            return memo[node]
        total = Fraction(0)
        for et in g.by_root.get(node.label, ()):
            slots = []
            if not _match(et.tree, node, slots):
                continue
            p = et.probability
            for s in slots:
                if s.children:
                    p *= weight(s)
                    if not p:
                        break
            total += p
        memo[node] = total
        return total

    if not tree.children:
        return Fraction(0)
    return weight(tree)


def parse_probability(g: Stsg, parse: Tree) -> Fraction:
    if parse.label != g.start or parse.open_trees():
        return Fraction(0)
    return fragment_weight(g, parse)


def parse_distribution(g: Stsg, wg, cap: int = DEFAULT_CAP) -> dict:
    """Exact probability of every parse with a yield in ``wg``."""
    f = build_forest(g, wg)
    f._check_cap(cap)
    return f.parse_table()


def sentence_distribution(g: Stsg, wg, cap: int = DEFAULT_CAP) -> dict:
    """Exact probability of every generated sentence of ``wg``."""
    wg = as_wordgraph(wg)
    n = wg.sentence_count()
    if n > cap:
        raise CapExceeded(cap, n, "sentences")
    return build_forest(g, wg).yield_table()


def mpp_exact(g: Stsg, wg, cap: int = DEFAULT_CAP) -> Optional[tuple[Tree, Fraction]]:
    """Most probable parse; ties go to the smallest yield, then bracket string."""
    return _argmax(parse_distribution(g, wg, cap), _parse_key)


def mps_exact(g: Stsg, wg, cap: int = DEFAULT_CAP) -> Optional[tuple[tuple[str, ...], Fraction]]:
    """Most probable sentence; ties go to the lexicographically smallest one."""
    return _argmax(sentence_distribution(g, wg, cap), lambda s: s)


def mps_by_enumeration(g: Stsg, wg, cap: int = DEFAULT_CAP):
    """Reference route for :func:`mps_exact`: one parse per candidate sentence."""
    wg = as_wordgraph(wg)
    n = wg.sentence_count()
    if n > cap:
        raise CapExceeded(cap, n, "sentences")
    best = None
    for s in sentences_of(wg):
        p = sentence_probability(g, s)
        if p and (best is None or p > best[1]):
            best = (s, p)
    return best


def decide_mppwg(g: Stsg, wg, q: Fraction, cap: int = DEFAULT_CAP) -> bool:
    best = mpp_exact(g, wg, cap)
    return best is not None and best[1] >= q


def decide_mps(g: Stsg, wg, q: Fraction, cap: int = DEFAULT_CAP) -> bool:
    best = mps_exact(g, wg, cap)
    return best is not None and best[1] >= q


def decide_mpp(g: Stsg, sentence: Sequence[str], q: Fraction, cap: int = DEFAULT_CAP) -> bool:
    return decide_mppwg(g, as_wordgraph(sentence), q, cap)


# -- Monte-Carlo --------------------------------------------------------------

class _Sampler:
    """Draws derivations top-down, each with probability proportional to its mass."""

    def __init__(self, f: DerivationForest):
        if f.empty:
            raise EmptyForest("no derivation over the word-graph")
        self.forest = f
        g = f.grammar
        inside = f.inside()
        self.tables = {}
        for node in f.order:
            if len(node) == 4:
                opts = f.item_edges[node]
                weights = [(1 if prev is None else inside[prev])
                           * (1 if child is None else inside[child]) for prev, child in opts]
            else:
                opts = f.or_edges[node]
                weights = [g[item[0]].probability * inside[item] for item in opts]
            total = inside[node]
            cum, acc = [], Fraction(0)
            for w in weights:
                acc += w
                cum.append(float(acc / total))
            cum[-1] = 1.0
            self.tables[node] = (opts, cum)

    def _pick(self, node, rng):
        opts, cum = self.tables[node]
        if len(opts) == 1:
            return opts[0]
        return opts[bisect.bisect_right(cum, rng.random())]

    def sample(self, rng: random.Random) -> tuple[str, ...]:
        out = []
        # explicit stack of pending nodes keeps the output in left-most order
        stack = [self.forest.root]
        while stack:
            node = stack.pop()
            if len(node) == 3:
                item = self._pick(node, rng)
                out.append(item[0])
                stack.append(item)
            else:
                prev, child = self._pick(node, rng)
                if child is not None:
                    stack.append(child)
                if prev is not None:
                    stack.append(prev)
        return tuple(out)


def sample_derivations(f: DerivationForest, samples: int, seed: int) -> Counter:
    sampler = _Sampler(f)
    rng = random.Random(seed)
    return Counter(sampler.sample(rng) for _ in range(samples))


def monte_carlo_mpp(g: Stsg, wg, samples: int, seed: int) -> tuple[Tree, float]:
    """Most frequent parse among ``samples`` sampled derivations.

    Returns the parse and its relative sample frequency (an estimate, not an
    exact probability).  Deterministic for a given ``(seed, samples)``.
    """
    f = build_forest(g, wg)
    draws = sample_derivations(f, samples, seed)
    freq = Counter()
    for seq, k in draws.items():
        freq[derive(g, seq)] += k
    parse, k = _argmax(freq, _parse_key)
    return parse, k / samples


# -- collapsing -----------------------------------------------------------------

def collapse_transform(g: Stsg) -> Stsg:
    """Reweight each elementary tree by the total probability of all ways to
    compose it from the grammar's trees, then renormalize per root."""
    weights = {t.id: fragment_weight(g, t.tree) for t in g.trees}
    totals = defaultdict(Fraction)
    for t in g.trees:
        totals[t.root] += weights[t.id]
    return Stsg(g.start, g.terminals, g.nonterminals,
                [ElementaryTree(t.id, t.tree, weights[t.id] / totals[t.root]) for t in g.trees])


def mpd_as_mpp_proxy(g: Stsg, wg) -> Optional[tuple[Tree, Fraction]]:
    """Heuristic MPP: the parse of the MPD under the collapsed grammar.

    The returned probability is that derivation's probability under the
    collapsed grammar.  No optimality guarantee.
    """
    h = collapse_transform(g)
    best = mpd(h, wg)
    if best is None:
        return None
    d, p = best
    return derive(h, d), p


__all__ = ["mpd", "sentence_probability", "parse_probability", "fragment_weight",
           "parse_distribution", "sentence_distribution", "mpp_exact", "mps_exact",
           "mps_by_enumeration", "decide_mppwg", "decide_mps", "decide_mpp",
           "sample_derivations", "monte_carlo_mpp", "collapse_transform", "mpd_as_mpp_proxy"]
