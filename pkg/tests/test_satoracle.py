import itertools
import random

import pytest

from stsgkit.errors import TooLarge
from stsgkit.reduction import Cnf3Formula
from stsgkit.satoracle import (assignment_to_sentence, brute_force_sat, consistent_variables,
                               expected_derivation_counts, random_formula, random_formulas,
                               verify_answer_preservation)

UNSAT = [
    Cnf3Formula(1, [(1, 1, 1), (-1, -1, -1)]),
    Cnf3Formula(1, [(1, 1, 1), (1, 1, -1), (-1, -1, -1)]),
    Cnf3Formula(2, [(1, 1, 2), (1, 1, -2), (-1, -1, 2), (-1, -1, -2)]),
]
# all eight sign patterns over three variables; too many clauses for the harness
EIGHT = Cnf3Formula(3, [tuple(s * v for s, v in zip(signs, (1, 2, 3)))
                        for signs in itertools.product((1, -1), repeat=3)])


class TestBruteForce:
    def test_example(self, example_formula):
        sat, models = brute_force_sat(example_formula)
        assert sat and (True, True, True) in models and len(models) == 6

    @pytest.mark.parametrize("f", UNSAT + [EIGHT])
    def test_unsat(self, f):
        assert brute_force_sat(f) == (False, [])

    def test_single_variable(self):
        assert brute_force_sat(Cnf3Formula(1, [(1, 1, 1)])) == (True, [(True,)])

    def test_too_large(self):
        f = Cnf3Formula(25, [(3 * k + 1, 3 * k + 2, 3 * k + 3) for k in range(8)] + [(25, 25, 25)])
        with pytest.raises(TooLarge):
            brute_force_sat(f)


class TestSentences:
    def test_all_true(self, example_formula):
        assert "".join(assignment_to_sentence(example_formula, (True,) * 3)) == "TFTFTF"

    def test_all_false(self, example_formula):
        assert "".join(assignment_to_sentence(example_formula, (False,) * 3)) == "FTFTFT"

    def test_flip_one_variable(self, example_formula):
        a = assignment_to_sentence(example_formula, (True, True, True))
        b = assignment_to_sentence(example_formula, (True, False, True))
        changed = [i for i in range(6) if a[i] != b[i]]
        assert changed == [1, 4]

    @pytest.mark.parametrize("s,counts", [("TFTFTF", (3, 2)), ("TTTTTT", (0, 9)),
                                          ("FFFFFF", (0, 0))])
    def test_counts(self, example_formula, s, counts):
        assert expected_derivation_counts(example_formula, s) == counts

    def test_assignment_sentences_consistent(self, example_formula):
        for a in itertools.product((True, False), repeat=3):
            s = assignment_to_sentence(example_formula, a)
            assert consistent_variables(example_formula, s) == [1, 2, 3]


class TestRandomFormulas:
    def test_seeded(self):
        assert random_formulas(10, 4) == random_formulas(10, 4)

    def test_constraints(self):
        for f in random_formulas(200, 1):
            assert f.n <= 4 and f.m <= 4
            assert {abs(x) for c in f.clauses for x in c} == set(range(1, f.n + 1))

    def test_impossible(self):
        with pytest.raises(ValueError):
            random_formula(random.Random(0), 7, 2)


class TestVerify:
    def test_example(self, example_formula):
        report = verify_answer_preservation(example_formula)
        assert report.ok, str(report)
        assert report.values["max_sentence"] == report.values["max_parse"]
        text = str(report).splitlines()
        assert "threshold 17/576" in text and "max_sentence 121/4032" in text

    @pytest.mark.parametrize("f", UNSAT)
    def test_unsat_all_no(self, f):
        report = verify_answer_preservation(f)
        assert report.ok, str(report)
        assert not report.satisfiable
        assert report.values["max_sentence"] < report.values["threshold"]
        assert report.values["mpp_max_parse"] < report.values["mpp_threshold"]

    def test_deterministic(self, example_formula):
        assert str(verify_answer_preservation(example_formula)) == \
            str(verify_answer_preservation(example_formula))

    def test_report_lines(self, example_formula):
        lines = str(verify_answer_preservation(example_formula)).splitlines()
        checks = [l.split() for l in lines if l.startswith("check ")]
        assert [c[1] for c in checks] == [
            "grammar_valid", "separation", "mppwg_mps", "mpp", "scfg_mps",
            "derivation_counts", "threshold_sentences", "inconsistent_below_threshold"]
        assert all(c[2] == "pass" for c in checks)
