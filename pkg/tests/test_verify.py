import csv
import io
import json
import math
from fractions import Fraction

import pytest

from cflevels.cf import Word, continuants, iter_words
from cflevels.constructions import ConstructionSpec, PinnedWord, generate
from cflevels.errors import BudgetExceeded
from cflevels.verify import (
    PairInstance, SweepReport, check_comparison, check_comparison_sides,
    check_deletion_inequality, check_interval_bounds, check_ratio_bounds,
    random_pair_instances, sweep_cf_algebra, sweep_comparison, sweep_ratio_bounds,
    to_csv, to_jsonl,
)


def brute_q(w):
    # q_n as the denominator of the evaluated fraction, independent of the recursion
    x = Fraction(0)
    for a in reversed(w):
        x = 1 / (a + x)
    return x.denominator


def test_ratio_bounds_example():
    rep = check_ratio_bounds(PairInstance((2, 1), (1, 1)))
    assert rep.details["ratio"] == Fraction(3, 2)
    assert (rep.details["lower"], rep.details["upper"]) == (1, 3)
    assert rep.conclusion_holds and not rep.vacuous
    assert rep.margin == Fraction(1, 2)


def test_ratio_bounds_vacuous():
    rep = check_ratio_bounds(PairInstance((3, 1, 4), (3, 1, 4)))
    assert rep.vacuous and rep.ok
    assert rep.details["ratio"] == 1 and rep.details["lower"] == rep.details["upper"] == 1


def test_pair_instance_validation():
    with pytest.raises(ValueError):
        PairInstance((1, 2), (1,))
    with pytest.raises(ValueError):
        PairInstance((1, 2), (1, 3), omega=(1,))
    assert PairInstance((1, 2, 3), (2, 2, 1)).omega == (1, 3)


def test_continuants_match_brute_force():
    for n in range(1, 6):
        for w in iter_words(n, 3):
            assert continuants(w)[1] == brute_q(w)


def test_ratio_sweep_small():
    rep = sweep_ratio_bounds(max_len=3, max_digit=3)
    assert rep.checked == sum(3 ** (2 * n) for n in range(1, 4))
    assert rep.vacuous == sum(3 ** n for n in range(1, 4))
    assert rep.counterexamples == 0


def test_ratio_sweep_threads_agree():
    a = sweep_ratio_bounds(max_len=3, max_digit=3, threads=1)
    b = sweep_ratio_bounds(max_len=3, max_digit=3, threads=3)
    assert a.to_json() == b.to_json()


def test_merge_associative():
    parts = [sweep_ratio_bounds(max_len=n, max_digit=2, keep=True) for n in (1, 2, 3)]
    left = parts[0].merge(parts[1]).merge(parts[2])
    right = parts[0].merge(parts[1].merge(parts[2]))
    assert left.to_json() == right.to_json()
    assert len(left.reports) == left.checked


def test_comparison_example():
    sigma = (1,) * 9 + (5,)
    tau = (1,) * 9 + (4,)
    inst = PairInstance(sigma, tau)
    assert inst.t == 1
    rep = check_comparison(inst, 0.7, 6)
    assert 2 ** 6.3 >= 72
    assert rep.hypothesis_satisfied and rep.conclusion_holds and rep.margin > 0


def test_comparison_gate_fails_for_small_eps():
    inst = PairInstance((1,) * 9 + (5,), (1,) * 9 + (4,))
    rep = check_comparison(inst, 0.1, 6)
    assert not rep.hypothesis_satisfied and rep.conclusion_holds is None and rep.ok
    assert "conclusion_observed" in rep.details
    with pytest.raises(ValueError):
        check_comparison(inst, 0.0, 6)


def test_comparison_digit_gate():
    inst = PairInstance((1,) * 9 + (9,), (1,) * 9 + (4,))
    rep = check_comparison(inst, 5.0, 6)
    assert not rep.details["digits_bounded"] and not rep.hypothesis_satisfied


def test_comparison_identical_words():
    w = (2, 7, 1, 1, 3, 5)
    for eps in (0.25, 0.5, 3.0):
        rep = check_comparison(PairInstance(w, w), eps, 2)
        assert rep.hypothesis_satisfied and rep.conclusion_holds
        assert rep.details["deviation"] == 0
        assert rep.margin > 0


def test_comparison_sides_example():
    inst = PairInstance((1,) * 12 + (3,), (1,) * 12 + (2,))
    lower, upper = check_comparison_sides(inst, 0.9)
    assert lower.check == "comparison_lower" and upper.check == "comparison_upper"
    for rep in (lower, upper):
        assert rep.ok


def test_random_instances_reproducible():
    a = random_pair_instances(50, seed=7)
    b = random_pair_instances(50, seed=7)
    assert a == b
    assert all(2 <= x.n <= 20 and x.t >= 1 for x in a)
    assert all(max(x.sigma + x.tau) <= 8 for x in a)


def test_comparison_sweep_small():
    out = sweep_comparison(count=200, seed=3)
    both, sides = out["comparison"], out["comparison_sides"]
    assert both.checked == 200 and both.hypothesis_satisfied == 200
    assert both.counterexamples == 0
    assert sides.checked == 800 and sides.counterexamples == 0
    assert sides.hypothesis_satisfied > 0


def test_interval_bounds_edge_case():
    rep = check_interval_bounds((1,))
    assert rep.edge_case and rep.conclusion_holds and not rep.details["strict"]
    rep = check_interval_bounds((2,))
    assert rep.details["strict"] and not rep.edge_case
    rep = check_interval_bounds((1, 1))
    assert rep.details["strict"]
    with pytest.raises(ValueError):
        check_interval_bounds(())


def test_algebra_sweep_small():
    rep = sweep_cf_algebra(max_len=5, max_digit=3)
    assert rep.checked == sum(3 ** n for n in range(1, 6))
    assert rep.counterexamples == 0
    assert [r.instance["word"] for r in rep.edge_cases] == [["1"]]


def test_deletion_example_seed_fixture():
    pw = generate(ConstructionSpec("h_m", {"M": 3, "beta": Fraction(1, 2), "N": 2},
                                   "random_uniform", seed=1), 9)
    rep = check_deletion_inequality(pw, 0.7)
    assert rep.details["t"] == 2 and rep.details["n"] == 9
    assert rep.conclusion_holds == (rep.margin >= 0)


def test_deletion_margin_formula():
    pw = generate(ConstructionSpec("h_m", {"M": 3, "beta": Fraction(1, 2), "N": 2}), 9)
    rep = check_deletion_inequality(pw, 0.7)
    # |I_9| of (1,1,1,4,1,1,1,1,12) and |I_7| of (1,)*7, from the evaluated fraction
    def length(w):
        q = brute_q(w)
        q_prev = brute_q(w[:-1]) if len(w) > 1 else 1
        return Fraction(1, q * (q + q_prev))
    expected = math.log(length(pw.word)) - 1.7 * math.log(length((1,) * 7))
    assert rep.margin == pytest.approx(expected, abs=1e-12)


def test_deletion_needs_positive_epsilon():
    pw = generate(ConstructionSpec("h_m", {"M": 3, "beta": Fraction(1, 2), "N": 2}), 9)
    rep = check_deletion_inequality(pw, 0.0)
    assert rep.conclusion_holds is False and rep.margin < 0
    with pytest.raises(ValueError):
        check_deletion_inequality(pw, -0.1)


def test_deletion_without_pins():
    rep = check_deletion_inequality(PinnedWord(Word((2, 3)), {}), 0.5)
    assert rep.vacuous
    assert rep.margin == pytest.approx(0.5 * math.log(63), abs=1e-12)  # |I(2,3)| = 1/(7*9)
    # with no deletion the reduced word is the word itself
    assert rep.details["log_len_full"] == rep.details["log_len_reduced"]


def test_rational_budget():
    with pytest.raises(BudgetExceeded) as exc:
        check_deletion_inequality(PinnedWord(Word((2 ** (1 << 21),)), {1: 2 ** (1 << 21)}), 0.5)
    assert exc.value.gate == "rational_budget"


def test_exports():
    reps = [check_ratio_bounds(PairInstance((2, 1), (1, 1))), check_interval_bounds((1,))]
    lines = to_jsonl(reps).splitlines()
    assert [json.loads(l)["check"] for l in lines] == ["ratio_bounds", "interval_bounds"]
    rows = list(csv.reader(io.StringIO(to_csv(reps))))
    assert rows[0] == ["instance_id", "hypothesis", "conclusion", "margin"]
    assert rows[1] == ["0", "True", "True", "1/2"]


def test_sweep_report_json():
    rep = SweepReport("x", {})
    rep.add(check_ratio_bounds(PairInstance((2, 1), (1, 1))))
    data = rep.to_json()
    assert data["checked"] == 1 and data["counterexamples"] == 0
    json.dumps(data)
