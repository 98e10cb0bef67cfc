import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import product_projector, pure_probability, vacuum_vector, w_vector
from wnonlocal.states import (
    AnalyticW,
    DimensionMismatch,
    MeasurementSetting,
    OutcomeAssignment,
    PureState,
    analytic_w_distribution,
    analytic_w_probability,
    build_vacuum,
    build_w_state,
    outcome_distribution,
    outcome_probability,
)


def settings_and_outcomes(n):
    for bases in itertools.product("ZX", repeat=n):
        for signs in itertools.product((1, -1), repeat=n):
            yield "".join(bases), signs


@st.composite
def setting_outcome(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    bases = draw(st.text(alphabet="ZX", min_size=n, max_size=n))
    signs = tuple(draw(st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n)))
    return n, bases, signs


class TestBuild:
    def test_single_mode(self):
        w = build_w_state(1)
        assert np.allclose(w.amplitudes, [0, 1])

    def test_three_modes(self):
        w = build_w_state(3)
        expected = np.zeros(8)
        expected[[0b001, 0b010, 0b100]] = 1 / np.sqrt(3)
        assert np.allclose(w.amplitudes, expected, atol=1e-15)

    @pytest.mark.parametrize("n", [1, 2, 5, 12])
    def test_normalised(self, n):
        a = build_w_state(n).amplitudes
        assert abs(np.vdot(a, a).real - 1) < 1e-12

    def test_only_one_hot_support(self):
        a = build_w_state(6).amplitudes
        support = set(np.flatnonzero(a))
        assert support == {1 << i for i in range(6)}

    def test_vacuum(self):
        v = build_vacuum(3)
        assert v.amplitudes[0] == 1 and np.count_nonzero(v.amplitudes) == 1
        assert outcome_probability(build_vacuum(4), "ZZZZ", (1, 1, 1, 1)) == 1

    @pytest.mark.parametrize("builder", [build_w_state, build_vacuum])
    def test_zero_modes_rejected(self, builder):
        with pytest.raises(ValueError):
            builder(0)

    def test_statevector_ceiling(self):
        with pytest.raises(ValueError, match="analytic"):
            build_w_state(25)

    def test_rejects_unnormalised(self):
        with pytest.raises(ValueError):
            PureState(1, np.array([1.0, 1.0]))

    def test_amplitudes_are_read_only(self):
        w = build_w_state(2)
        with pytest.raises(ValueError):
            w.amplitudes[0] = 1


class TestTypes:
    def test_setting_string_round_trip(self):
        s = MeasurementSetting.from_string("zxz")
        assert str(s) == "ZXZ" and s.x_mask == 0b010

    def test_bad_basis(self):
        with pytest.raises(ValueError):
            MeasurementSetting(("Y",))

    def test_outcome_index_round_trip(self):
        for j in range(16):
            assert OutcomeAssignment.from_index(j, 4).index == j

    def test_bad_sign(self):
        with pytest.raises(ValueError):
            OutcomeAssignment((1, 0))


class TestOutcomeProbability:
    def test_three_site_values(self):
        w = build_w_state(3)
        assert outcome_probability(w, "ZZZ", (1, 1, -1)) == pytest.approx(1 / 3, abs=1e-12)
        assert outcome_probability(w, "XXX", (1, 1, 1)) == pytest.approx(3 / 8, abs=1e-12)
        assert outcome_probability(w, "ZXX", (1, 1, -1)) == pytest.approx(0, abs=1e-12)

    def test_four_site_all_plus(self):
        # frozen from the Kronecker oracle
        assert pure_probability(w_vector(4), "XXXX", (1, 1, 1, 1)) == pytest.approx(0.25)
        assert outcome_probability(build_w_state(4), "XXXX", (1, 1, 1, 1)) == pytest.approx(0.25, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            outcome_probability(build_w_state(3), "ZZ", (1, 1))
        with pytest.raises(DimensionMismatch):
            outcome_probability(build_w_state(3), "ZZZ", (1, 1))

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_matches_kronecker_oracle(self, n):
        w, vac = build_w_state(n), build_vacuum(n)
        for bases, signs in settings_and_outcomes(n):
            assert outcome_probability(w, bases, signs) == pytest.approx(
                pure_probability(w_vector(n), bases, signs), abs=1e-12
            )
            assert outcome_probability(vac, bases, signs) == pytest.approx(
                pure_probability(vacuum_vector(n), bases, signs), abs=1e-12
            )

    @given(setting_outcome(max_n=5), st.integers(0, 2**32 - 1))
    def test_random_state_matches_oracle(self, case, seed):
        n, bases, signs = case
        rng = np.random.default_rng(seed)
        psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        psi /= np.linalg.norm(psi)
        expected = float(np.real(np.conj(psi) @ product_projector(bases, signs) @ psi))
        assert outcome_probability(PureState(n, psi), bases, signs) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 3, 5, 8])
    def test_normalisation_over_every_setting(self, n):
        w = build_w_state(n)
        rng = np.random.default_rng(n)
        for _ in range(10):
            bases = "".join(rng.choice(["Z", "X"], size=n))
            total = sum(outcome_probability(w, bases, OutcomeAssignment.from_index(j, n)) for j in range(2**n))
            assert abs(total - 1) < 1e-12

    def test_distribution_matches_single_outcomes(self):
        w = build_w_state(5)
        for bases in ("ZZZZZ", "XZXZZ", "XXXXX"):
            dist = outcome_distribution(w, bases)
            assert abs(dist.sum() - 1) < 1e-12
            for j in range(32):
                assert dist[j] == pytest.approx(
                    outcome_probability(w, bases, OutcomeAssignment.from_index(j, 5)), abs=1e-14
                )

    @pytest.mark.parametrize("n", range(1, 9))
    def test_all_z_single_photon_support(self, n):
        dist = outcome_distribution(build_w_state(n), "Z" * n)
        for j, p in enumerate(dist):
            if bin(j).count("1") != 1:
                assert p == 0
            else:
                assert p == pytest.approx(1 / n)


class TestAnalytic:
    def test_examples(self):
        assert analytic_w_probability(3, "ZZZ", (1, -1, 1)) == pytest.approx(1 / 3, abs=1e-15)
        assert analytic_w_probability(2, "XX", (1, -1)) == 0
        assert analytic_w_probability(20, "X" * 20, (1,) * 20) == 20 / 2**20

    def test_exact_fraction(self):
        assert analytic_w_probability(3, "XXX", "+++", exact=True) == Fraction(3, 8)

    def test_large_n(self):
        n = 200
        p = analytic_w_probability(n, "X" * n, (1,) * n, exact=True)
        assert p == Fraction(n, 2**n)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_exhaustive_oracle_equivalence(self, n):
        w = build_w_state(n)
        for bases, signs in settings_and_outcomes(n):
            assert abs(analytic_w_probability(n, bases, signs) - outcome_probability(w, bases, signs)) < 1e-10

    @pytest.mark.parametrize("n", [7, 9, 12])
    def test_distribution_vectorised(self, n):
        rng = np.random.default_rng(n)
        bases = "".join(rng.choice(["Z", "X"], size=n))
        vec = analytic_w_distribution(n, bases)
        ref = outcome_distribution(build_w_state(n), bases)
        assert np.max(np.abs(vec - ref)) < 1e-10

    def test_source_protocol(self):
        src = AnalyticW(4)
        assert src.probability("XXXX", "++++") == pytest.approx(0.25)
        assert src.distribution("ZZZZ").sum() == pytest.approx(1)

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            analytic_w_probability(3, "ZZ", (1, 1, 1))

    @given(st.integers(3, 40), st.data())
    def test_anti_correlated_pairs_vanish(self, n, data):
        i, j = sorted(data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True)))
        bases = "".join("X" if s in (i, j) else "Z" for s in range(n))
        signs = [1] * n
        signs[i], signs[j] = 1, -1
        assert analytic_w_probability(n, bases, signs) == 0
