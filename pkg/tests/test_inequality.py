import json
from collections import Counter
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import omega_terms, pure_probability, vacuum_vector, w_vector
from wnonlocal.inequality import (
    BellExpression,
    build_omega,
    evaluate_on_state,
    omega_closed_form,
    omega_closed_form_exact,
    term_count,
    term_values,
    violation_probability,
)
from wnonlocal.events import AllEqual, event_probability
from wnonlocal.states import AnalyticW, DimensionMismatch, build_vacuum, build_w_state

# the three-site inequality, transcribed term by term
THREE_SITE = [
    (1, "ZZZ", "++-"),
    (1, "ZZZ", "+-+"),
    (1, "ZZZ", "-++"),
    (-1, "ZXX", "++-"),
    (-1, "ZXX", "+-+"),
    (-1, "XZX", "++-"),
    (-1, "XZX", "-++"),
    (-1, "XXZ", "+-+"),
    (-1, "XXZ", "-++"),
    (-1, "XXX", "+++"),
    (-1, "XXX", "---"),
]


class TestBuild:
    def test_three_site_is_verbatim(self):
        expr = build_omega(3)
        got = [(t.sign, str(t.setting), str(t.outcome)) for t in expr.terms]
        assert got == THREE_SITE

    @pytest.mark.parametrize("n", range(3, 12))
    def test_term_structure(self, n):
        expr = build_omega(n)
        assert len(expr) == term_count(n) == n + n * (n - 1) + 2
        kinds = Counter()
        for t in expr.terms:
            nx = str(t.setting).count("X")
            kinds[(t.sign, nx)] += 1
            if nx == 2:
                xs = [s for b, s in zip(t.setting.bases, t.outcome.signs) if b == "X"]
                zs = [s for b, s in zip(t.setting.bases, t.outcome.signs) if b == "Z"]
                assert sorted(xs) == [-1, 1] and all(s == 1 for s in zs)
        assert kinds == {(1, 0): n, (-1, 2): 2 * comb(n, 2), (-1, n): 2}
        assert expr.classical_bound == 0

    def test_four_sites(self):
        assert len(build_omega(4)) == 18

    @pytest.mark.parametrize("n", [3, 6, 9])
    def test_same_term_set_as_direct_transcription(self, n):
        ours = {(t.sign, str(t.setting), t.outcome.signs) for t in build_omega(n).terms}
        assert ours == set(omega_terms(n))

    @pytest.mark.parametrize("n", [0, 2, -1])
    def test_small_n_rejected(self, n):
        with pytest.raises(ValueError):
            build_omega(n)

    def test_json_round_trip(self):
        expr = build_omega(5)
        back = BellExpression.from_dict(json.loads(expr.to_json()))
        assert back == expr
        first = expr.to_dict()["terms"][0]
        assert first == {"sign": 1, "bases": "ZZZZZ", "signs": "++++-"}

    def test_distinct_settings(self):
        assert len(build_omega(5).settings()) == 1 + comb(5, 2) + 1


class TestEvaluate:
    def test_three_site_quantum_values(self):
        vals = term_values(build_omega(3), build_w_state(3))
        expected = [1 / 3] * 3 + [0] * 6 + [3 / 8] * 2
        assert max(abs(a - b) for a, b in zip(vals, expected)) < 1e-12
        assert abs(evaluate_on_state(build_omega(3), build_w_state(3)) - 0.25) < 1e-12

    def test_vacuum(self):
        # Kronecker oracle: pair terms 1/4 each, all-X terms 1/8 each
        oracle = sum(s * pure_probability(vacuum_vector(3), b, o) for s, b, o in omega_terms(3))
        assert oracle == pytest.approx(-7 / 4)
        assert evaluate_on_state(build_omega(3), build_vacuum(3)) == pytest.approx(-7 / 4, abs=1e-12)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_matches_kronecker_oracle(self, n):
        oracle = sum(s * pure_probability(w_vector(n), b, o) for s, b, o in omega_terms(n))
        assert evaluate_on_state(build_omega(n), build_w_state(n)) == pytest.approx(oracle, abs=1e-12)

    def test_twenty_sites_analytic(self):
        val = evaluate_on_state(build_omega(20), AnalyticW(20))
        assert val == pytest.approx(1 - 20 / 2**19, abs=1e-12)
        assert f"{val:.6f}" == "0.999962"

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            evaluate_on_state(build_omega(3), build_w_state(4))

    @pytest.mark.parametrize("n", [3, 5, 8])
    def test_bounded_by_term_counts(self, n):
        expr = build_omega(n)
        for state in (build_w_state(n), build_vacuum(n)):
            v = evaluate_on_state(expr, state)
            assert -expr.negative_terms <= v <= expr.positive_terms


class TestClosedForms:
    def test_examples(self):
        assert omega_closed_form(3) == 0.25
        assert omega_closed_form(4) == 0.5
        assert omega_closed_form(20) == pytest.approx(0.999961853, abs=1e-9)

    def test_violation_probability(self):
        assert violation_probability(2) == 0
        assert violation_probability(3) == 0.25
        assert f"{violation_probability(20):.6f}" == "0.999962"
        with pytest.raises(ValueError):
            violation_probability(1)
        with pytest.raises(ValueError):
            omega_closed_form(2)

    @pytest.mark.parametrize("n", range(3, 17))
    def test_consistency_statevector(self, n):
        assert abs(omega_closed_form(n) - evaluate_on_state(build_omega(n), build_w_state(n))) < 1e-10

    @pytest.mark.parametrize("n", range(2, 15))
    def test_violation_is_complement_of_all_equal(self, n):
        p_eq = event_probability(build_w_state(n), "X" * n, AllEqual())
        assert abs(violation_probability(n) - (1 - p_eq)) < 1e-12

    @given(st.integers(3, 60))
    def test_identity_and_monotone(self, n):
        assert violation_probability(n) == omega_closed_form(n)
        assert omega_closed_form_exact(n) < omega_closed_form_exact(n + 1) < 1

    @pytest.mark.parametrize("n", [3, 6, 10, 30])
    def test_gap_structure(self, n):
        expr = build_omega(n)
        src = AnalyticW(n)
        vals = term_values(expr, src)
        positives = sum(v for t, v in zip(expr.terms, vals) if t.sign == 1)
        all_x = sum(v for t, v in zip(expr.terms, vals) if str(t.setting) == "X" * n)
        pairs = sum(v for t, v in zip(expr.terms, vals) if str(t.setting).count("X") == 2)
        assert positives == pytest.approx(1, abs=1e-12)
        assert all_x == pytest.approx(n / 2 ** (n - 1), abs=1e-12)
        assert pairs == 0
