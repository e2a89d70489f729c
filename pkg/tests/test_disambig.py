import random
from collections import defaultdict
from fractions import Fraction

import pytest

from oracles import random_stsg, random_wordgraph, topdown_derivations
from stsgkit.disambig import (collapse_transform, decide_mpp, decide_mps, decide_mppwg,
                              fragment_weight, monte_carlo_mpp, mpd, mpd_as_mpp_proxy,
                              mpp_exact, mps_by_enumeration, mps_exact, parse_distribution,
                              parse_probability, sample_derivations, sentence_distribution,
                              sentence_probability)
from stsgkit.errors import CapExceeded, EmptyForest
from stsgkit.forest import build_forest
from stsgkit.grammar import ElementaryTree, Stsg, derive, validate_grammar
from stsgkit.reduction import Cnf3Formula, build_mppwg_reduction
from stsgkit.trees import parse_bracket
from stsgkit.wordgraph import WordGraph

Q = Fraction(119, 4032)
MAX = Fraction(121, 4032)


def grammar(*specs, terminals=("a", "b"), nonterminals=("S", "A", "B")):
    return Stsg("S", terminals, nonterminals,
                [ElementaryTree(i, parse_bracket(t, set(terminals)), Fraction(p))
                 for i, p, t in specs])


@pytest.fixture
def three_tree():
    return grammar(("T1", "1/2", "(S A b)"), ("T3", "1/2", "(S (A a) b)"), ("T2", 1, "(A a)"))


class TestMpd:
    def test_gadget(self, example_gadget):
        d, p = mpd(example_gadget.grammar, example_gadget.wordgraph)
        assert p == Fraction(13, 1344)
        assert d.tree_ids[0].startswith("a")

    def test_no_derivation(self, example_gadget):
        assert mpd(example_gadget.grammar, list("FFFFFF")) is None

    def test_tie_break_smallest_ids(self, three_tree):
        d, p = mpd(three_tree, ["a", "b"])
        assert p == Fraction(1, 2) and tuple(d) == ("T1", "T2")

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_oracle(self, seed):
        rng = random.Random(seed)
        g = random_stsg(rng)
        wg = random_wordgraph(rng, rng.randint(1, 5))
        ref = topdown_derivations(g, wg)
        got = mpd(g, wg)
        if not ref:
            assert got is None
            return
        top = max(p for _, _, p in ref)
        assert got[1] == top
        assert tuple(got[0]) == min(ids for _, ids, p in ref if p == top)


class TestProbabilities:
    def test_sentence_all_true(self, example_gadget):
        assert sentence_probability(example_gadget.grammar, list("TFTFTF")) == MAX

    def test_sentence_unknown_terminal(self, example_gadget):
        assert sentence_probability(example_gadget.grammar, ["x"] * 6) == 0

    def test_parse_probability_gadget(self, example_gadget):
        g = example_gadget.grammar
        parse = derive(g, ["a1t", "l_nu2_F", "l_u3_T", "l_u2_T", "l_nu3_F"])
        assert parse_probability(g, parse) == MAX

    def test_parse_probability_not_start(self, three_tree):
        assert parse_probability(three_tree, parse_bracket("(A a)", {"a"})) == 0
        assert parse_probability(three_tree, parse_bracket("(S A b)", {"b"})) == 0

    def test_fragment_weight_keeps_open_trees(self, three_tree):
        assert fragment_weight(three_tree, parse_bracket("(S A b)", {"b"})) == Fraction(1, 2)
        assert fragment_weight(three_tree, parse_bracket("(S (A a) b)", {"a", "b"})) == 1

    @pytest.mark.parametrize("seed", range(8))
    def test_parse_probability_oracle(self, seed):
        rng = random.Random(50 + seed)
        g = random_stsg(rng)
        wg = random_wordgraph(rng, rng.randint(1, 5))
        ref = defaultdict(Fraction)
        for _, ids, p in topdown_derivations(g, wg):
            ref[derive(g, ids)] += p
        assert parse_distribution(g, wg) == dict(ref)
        for parse, p in ref.items():
            assert parse_probability(g, parse) == p

    def test_distribution_cap(self, example_gadget):
        with pytest.raises(CapExceeded):
            parse_distribution(example_gadget.grammar, example_gadget.wordgraph, cap=10)
        with pytest.raises(CapExceeded):
            sentence_distribution(example_gadget.grammar, example_gadget.wordgraph, cap=10)


class TestExactSearch:
    def test_mps_gadget(self, example_gadget, example_formula):
        s, p = mps_exact(example_gadget.grammar, example_gadget.wordgraph)
        assert p == MAX and "".join(s) == "FFTTTF"
        table = sentence_distribution(example_gadget.grammar, example_gadget.wordgraph)
        winners = {"".join(x) for x, q in table.items() if q == MAX}
        assert {"TFTFTF", "FTFTFT"} <= winners and len(winners) == 6

    def test_mpp_gadget(self, example_gadget):
        parse, p = mpp_exact(example_gadget.grammar, example_gadget.wordgraph)
        assert p == MAX and "".join(parse.yield_()) == "FFTTTF"

    def test_mpp_single_sentence(self, example_gadget):
        parse, p = mpp_exact(example_gadget.grammar, WordGraph.from_sentence("TFTFTF"))
        assert p == MAX and "".join(parse.yield_()) == "TFTFTF"

    def test_mps_matches_enumeration(self, example_gadget):
        g, wg = example_gadget.grammar, example_gadget.wordgraph
        s1, p1 = mps_exact(g, wg)
        s2, p2 = mps_by_enumeration(g, wg)
        assert p1 == p2 and sentence_probability(g, s2) == p1

    @pytest.mark.parametrize("seed", range(8))
    def test_mps_oracle(self, seed):
        rng = random.Random(300 + seed)
        g = random_stsg(rng)
        wg = random_wordgraph(rng, rng.randint(1, 5))
        ref = defaultdict(Fraction)
        for y, _, p in topdown_derivations(g, wg):
            ref[y] += p
        got = mps_exact(g, wg)
        if not ref:
            assert got is None and mps_by_enumeration(g, wg) is None
            return
        top = max(ref.values())
        assert got == (min(y for y, p in ref.items() if p == top), top)

    def test_sentence_cap(self, example_gadget):
        with pytest.raises(CapExceeded) as e:
            mps_exact(example_gadget.grammar, example_gadget.wordgraph, cap=63)
        assert e.value.count == 64


class TestDecisions:
    def test_yes_at_threshold(self, example_gadget):
        g, wg = example_gadget.grammar, example_gadget.wordgraph
        assert decide_mps(g, wg, Q) and decide_mppwg(g, wg, Q)
        assert decide_mps(g, wg, MAX) and not decide_mps(g, wg, MAX + Fraction(1, 10 ** 9))

    def test_threshold_one(self, example_gadget):
        assert not decide_mps(example_gadget.grammar, example_gadget.wordgraph, Fraction(1))

    def test_unsatisfiable(self):
        f = Cnf3Formula(1, [(1, 1, 1), (-1, -1, -1)])
        out = build_mppwg_reduction(f)
        assert not decide_mps(out.grammar, out.wordgraph, out.threshold)
        assert not decide_mppwg(out.grammar, out.wordgraph, out.threshold)

    def test_decide_mpp_sentence(self, example_gadget):
        assert decide_mpp(example_gadget.grammar, list("TFTFTF"), MAX)
        assert not decide_mpp(example_gadget.grammar, list("TTTTTT"), Q)


class TestMonteCarlo:
    def test_deterministic(self, example_gadget):
        g, wg = example_gadget.grammar, example_gadget.wordgraph
        assert monte_carlo_mpp(g, wg, 500, 7) == monte_carlo_mpp(g, wg, 500, 7)

    def test_single_derivation(self):
        g = grammar(("t", 1, "(S a)"))
        parse, freq = monte_carlo_mpp(g, ["a"], 50, 0)
        assert str(parse) == "(S a)" and freq == 1.0

    def test_samples_are_derivations(self, example_gadget):
        f = build_forest(example_gadget.grammar, example_gadget.wordgraph)
        draws = sample_derivations(f, 300, 3)
        assert sum(draws.values()) == 300
        for seq in draws:
            assert derive(example_gadget.grammar, seq).label == "S"

    def test_empty(self, example_gadget):
        with pytest.raises(EmptyForest):
            monte_carlo_mpp(example_gadget.grammar, list("FFFFFF"), 10, 0)


class TestCollapse:
    def test_three_tree(self, three_tree):
        h = collapse_transform(three_tree)
        assert {t.id: t.probability for t in h.trees} == {
            "T1": Fraction(1, 3), "T3": Fraction(2, 3), "T2": Fraction(1)}
        assert validate_grammar(h).ok

    def test_no_composable_trees_unchanged(self):
        g = grammar(("s1", "1/3", "(S A b)"), ("s2", "2/3", "(S a)"),
                    ("x", "1/4", "(A a)"), ("y", "3/4", "(A b b)"))
        assert collapse_transform(g) == g

    def test_gadget_validates(self, example_gadget):
        assert validate_grammar(collapse_transform(example_gadget.grammar)).ok

    def test_proxy(self, three_tree):
        parse, p = mpd_as_mpp_proxy(three_tree, ["a", "b"])
        assert str(parse) == "(S (A a) b)" and p == Fraction(2, 3)
        assert mpp_exact(three_tree, ["a", "b"])[0] == parse

    def test_proxy_empty(self, three_tree):
        assert mpd_as_mpp_proxy(three_tree, ["b", "b"]) is None
