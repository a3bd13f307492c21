import itertools
import math

import numpy as np
import pytest
from conftest import random_scenario
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import ams_bruteforce, nonadaptive_min

from dimbound.bounds import (
    AmsOptions,
    ams,
    dimension_bound,
    dimension_bound_grouped,
    fidelity_bound_ams,
    fidelity_bound_trivial,
    purity_bound,
    round_bound,
)
from dimbound.correlation import bell_to_pd, new_correlation, reorder_bobs, tensor_product
from dimbound.generators import eq19_correlation, ghz_correlation, maxent_cb_correlation, prbox_correlation
from dimbound.quantum import (
    MeasurementSet,
    PureState,
    QuantumScenario,
    born_correlation,
    builtin_state,
    computational,
    fidelity,
    partial_trace,
    pd_correlation,
    purity,
    random_measurement_set,
    random_pure_state,
)

# frozen from tests/oracles.py (explicit strategy-tree enumeration)
GHZ3_AMS = 2 ** -1.5
MAXENT_2x3_BOUND = 6.0
GHZ3_SQUARED_BOUND = 4.0


def uniform(settings, outcomes):
    return new_correlation(settings, outcomes, np.full(int(np.prod(settings + outcomes)), 1 / np.prod(outcomes)))


@st.composite
def weight_pairs(draw, max_bobs=2, max_card=2):
    k = draw(st.integers(1, max_bobs))
    ys = tuple(draw(st.integers(1, max_card)) for _ in range(k))
    bs = tuple(draw(st.integers(1, max_card)) for _ in range(k))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    f = rng.random(ys + bs) * (rng.random(ys + bs) > 0.3)
    g = rng.random(ys + bs) * (rng.random(ys + bs) > 0.3)
    return f, g


class TestAms:
    def test_deterministic_single_branch(self):
        f = np.zeros((2, 3, 2, 2))
        f[:, :, 1, 0] = 1.0
        assert ams(f, f) == 1.0

    def test_disjoint_supports(self):
        f = np.zeros((2, 2, 2, 2))
        g = np.zeros((2, 2, 2, 2))
        f[:, 0, 0, :] = 0.5
        g[:, 0, 1, :] = 0.5
        f[:, 1] = g[:, 1] = 0.25
        assert ams(f, g) == 0.0

    def test_ghz_joint_slices(self):
        p = ghz_correlation(3).probs
        assert ams(p[0, :, :, 0], p[1, :, :, 0]) == pytest.approx(GHZ3_AMS, abs=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            ams(np.ones((2, 2)), np.ones((2, 3)))

    def test_rejects_negative_and_bad_order(self):
        with pytest.raises(ValueError):
            ams(-np.ones((2, 2)), np.ones((2, 2)))
        with pytest.raises(ValueError):
            ams(np.ones((2, 2, 2, 2)), np.ones((2, 2, 2, 2)), (1, 1))

    def test_adaptivity_matters(self):
        # y2 must track b1 to reach zero
        f = np.zeros((1, 2, 2, 2))
        g = np.zeros((1, 2, 2, 2))
        for b1 in range(2):
            f[0, b1, b1, 0] = f[0, 1 - b1, b1, :] = 0.25
            g[0, b1, b1, 1] = g[0, 1 - b1, b1, :] = 0.25
        assert ams(f, g, (1, 2)) == 0.0
        assert nonadaptive_min(f, g) > 0

    @settings(max_examples=200, deadline=None)
    @given(weight_pairs(), st.data())
    def test_matches_strategy_tree_oracle(self, fg, data):
        f, g = fg
        k = f.ndim // 2
        order = tuple(data.draw(st.permutations(range(1, k + 1))))
        assert ams(f, g, order) == pytest.approx(ams_bruteforce(f, g, order), abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(weight_pairs(max_bobs=3))
    def test_adaptive_never_worse_than_nonadaptive(self, fg):
        f, g = fg
        assert ams(f, g) <= nonadaptive_min(f, g) + 1e-12


class TestFidelityBounds:
    def test_same_preparation(self):
        pd = bell_to_pd(born_correlation(random_scenario((2, 2, 2), 0)))
        assert fidelity_bound_trivial(pd, 0, 0) == pytest.approx(pd.probs[0].sum(axis=(2, 3)).min())
        p = pd_correlation([random_pure_state((2, 3), 1)] * 2, (random_measurement_set(2, 2, 1), random_measurement_set(3, 2, 2)))
        assert fidelity_bound_trivial(p, 0, 1) == pytest.approx(1.0, abs=1e-12)
        assert fidelity_bound_ams(p, 0, 1) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_deterministic(self):
        s0 = PureState((2, 2), [1, 0, 0, 0])
        s1 = PureState((2, 2), [0, 0, 0, 1])
        pd = pd_correlation([s0, s1], (computational(2), computational(2)))
        assert fidelity_bound_trivial(pd, 0, 1) == 0.0
        assert fidelity_bound_ams(pd, 0, 1) == 0.0

    def test_zero_plus(self):
        z = PureState((2,), [1, 0])
        plus = PureState((2,), [2**-0.5, 2**-0.5])
        s = 2**-0.5
        m = MeasurementSet.projective([np.eye(2), [[s, s], [s, -s]]])
        pd = pd_correlation([z, plus], (m,))
        val = fidelity_bound_ams(pd, 0, 1)
        assert val >= fidelity(z, plus) - 1e-12
        assert val <= fidelity_bound_trivial(pd, 0, 1) + 1e-15

    def test_index_error(self):
        pd = pd_correlation([random_pure_state((2,), 0)], (computational(2),))
        with pytest.raises(IndexError):
            fidelity_bound_ams(pd, 0, 1)

    @pytest.mark.parametrize("block", range(4))
    def test_sound_and_dominated(self, block):
        for seed in range(block * 25, block * 25 + 25):
            dims = [(2, 2), (2, 3), (3, 3)][seed % 3]
            ss = np.random.SeedSequence(seed).spawn(4)
            states = [random_pure_state(dims, ss[0]), random_pure_state(dims, ss[1])]
            ms = tuple(random_measurement_set(d, 2, s, hermitian=True) for d, s in zip(dims, ss[2:]))
            pd = pd_correlation(states, ms)
            bound = fidelity_bound_ams(pd, 0, 1)
            assert fidelity(states[0], states[1]) <= bound + 1e-9
            assert bound <= fidelity_bound_trivial(pd, 0, 1) + 1e-12


class TestPurityBound:
    def test_deterministic(self):
        values = np.zeros((2, 2, 2, 2))
        values[:, :, 1, 0] = 1.0
        assert purity_bound(new_correlation((2, 2), (2, 2), values), 0, 1) == 1.0

    def test_ghz3(self):
        val = purity_bound(ghz_correlation(3), 0, 1)
        assert val == pytest.approx(0.5, abs=1e-12)
        reduced = purity(partial_trace(builtin_state("ghz-qubit", 2, 3), [1, 2]))
        assert val == pytest.approx(reduced, abs=1e-12)

    def test_uniform(self):
        assert purity_bound(uniform((2, 2, 2), (2, 2, 2)), 0, 1) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("seed", range(20))
    def test_sound(self, seed):
        s = random_scenario((2, 2, 2) if seed % 2 else (3, 2, 2), seed, settings=2)
        c = born_correlation(s)
        target = purity(partial_trace(s.state, [1, 2]))
        for x, x2 in itertools.product(range(2), repeat=2):
            assert purity_bound(c, x, x2) >= target - 1e-9


class TestDimensionBound:
    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    @pytest.mark.parametrize("parties", [2, 3, 4])
    def test_maxent_cb(self, d, parties):
        assert dimension_bound(maxent_cb_correlation(d, parties)).bound == pytest.approx(d, abs=1e-9)

    @pytest.mark.parametrize("parties", [3, 4, 5])
    def test_ghz(self, parties):
        r = dimension_bound(ghz_correlation(parties))
        assert r.bound == pytest.approx(2.0, abs=1e-9)
        assert r.rounded == 2

    @pytest.mark.parametrize("parties", [3, 4])
    def test_prbox_infinite(self, parties):
        r = dimension_bound(prbox_correlation(parties))
        assert math.isinf(r.bound) and r.denominator == 0.0

    def test_prbox_explicit_zero_strategy(self):
        # x=0, x'=1; all Bobs use setting 1 when a == a', setting 0 otherwise
        for parties in (3, 4):
            p = prbox_correlation(parties).probs
            k = parties - 1
            for a, a2 in itertools.product(range(2), repeat=2):
                y = (1,) * k if a == a2 else (0,) * k
                h = np.sqrt(p[(0,) + y + (a,)]) * np.sqrt(p[(1,) + y + (a2,)])
                assert h.sum() == 0.0

    def test_uniform(self):
        assert dimension_bound(uniform((2, 2, 2), (2, 2, 2))).bound == pytest.approx(1.0, abs=1e-12)

    def test_eq19_orderings(self):
        c = eq19_correlation()
        assert math.isinf(dimension_bound(c, opts=AmsOptions.fixed((1, 2))).bound)
        finite = dimension_bound(c, opts=AmsOptions.fixed((2, 1))).bound
        assert math.isfinite(finite)
        # same as swapping the Bobs in the data
        assert dimension_bound(reorder_bobs(c, (2, 1)), opts=AmsOptions.fixed((1, 2))).bound == finite
        assert math.isinf(dimension_bound(c).bound)

    def test_report_contents(self):
        r = dimension_bound(ghz_correlation(3))
        assert r.ams_table.shape == (2, 2)
        assert r.denominator == pytest.approx(np.sum(r.ams_table**2))
        # (0, 0) ties with (0, 1); the first pair in scan order is reported
        assert r.argmin == (0, 0)
        assert r.pair_denominators[0, 1] == pytest.approx(0.5)
        assert len(r.orderings) == 2 and all(len(row) == 2 for row in r.orderings)
        doc = r.to_document()
        assert doc["rounded"] == 2 and doc["strategy"] == "per-term"
        assert "denominator" in r.format_table()
        inf_doc = dimension_bound(prbox_correlation(3)).to_document()
        assert inf_doc["bound"] == "inf"

    def test_includes_equal_pairs(self):
        r = dimension_bound(maxent_cb_correlation(3, 3))
        assert r.argmin == (0, 0)

    def test_target_party(self):
        c = eq19_correlation()
        for i in range(3):
            r = dimension_bound(c, i)
            assert r.target_party == i
        # Bob-2 is a deterministic function of the others: finite with any target
        assert dimension_bound(ghz_correlation(4), 3).bound == pytest.approx(2.0)

    def test_inf_threshold(self):
        r = dimension_bound(ghz_correlation(3), inf_threshold=0.6)
        assert math.isinf(r.bound)
        assert r.denominator == pytest.approx(0.5)

    def test_rounding(self):
        assert round_bound(2.0000000001) == 2
        assert round_bound(2.01) == 3
        assert round_bound(1.9999999999) == 2
        assert math.isinf(round_bound(math.inf))

    def test_many_bobs_falls_back_with_warning(self):
        c = maxent_cb_correlation(2, 7)
        with pytest.warns(RuntimeWarning):
            r = dimension_bound(c)
        assert r.bound == pytest.approx(2.0)

    def test_option_parsing(self):
        assert AmsOptions.parse("fixed:2,1") == AmsOptions.fixed((2, 1))
        assert AmsOptions.parse("global").strategy == "global"
        with pytest.raises(ValueError):
            AmsOptions.parse("random")
        with pytest.raises(ValueError):
            dimension_bound(eq19_correlation(), opts=AmsOptions.fixed((1, 3)))


class TestGrouped:
    def test_eq19(self):
        r = dimension_bound_grouped(eq19_correlation())
        assert r.bound == pytest.approx(4.0, abs=1e-12) and r.grouped

    @pytest.mark.parametrize("seed", range(10))
    def test_bipartite_identical(self, seed):
        c = born_correlation(random_scenario((3, 2), seed, settings=3))
        assert dimension_bound(c).bound == dimension_bound_grouped(c).bound

    @pytest.mark.parametrize("seed", range(20))
    def test_multiparty_dominates(self, seed):
        s = random_scenario((2, 2, 2), seed, settings=2)
        c = born_correlation(s)
        for party in range(3):
            assert dimension_bound(c, party).bound >= dimension_bound_grouped(c, party).bound - 1e-12


class TestOrderingMonotonicity:
    @pytest.mark.parametrize("seed", range(15))
    def test_denominators(self, seed):
        dims = (2, 2, 2, 2) if seed % 3 == 0 else (2, 3, 2)
        c = born_correlation(random_scenario(dims, seed, settings=2))
        k = c.bobs
        per_term = dimension_bound(c, opts=AmsOptions("per-term")).denominator
        glob = dimension_bound(c, opts=AmsOptions("global")).denominator
        for perm in itertools.permutations(range(1, k + 1)):
            fixed = dimension_bound(c, opts=AmsOptions.fixed(perm)).denominator
            assert per_term <= glob + 1e-15 <= fixed + 2e-15


class TestSoundness:
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_bound_at_most_local_dimension(self, d):
        for seed in range(30):
            dims = (d, 2, 3) if seed % 2 else (d, d, 2)
            c = born_correlation(random_scenario(dims, 1000 * d + seed, settings=d))
            assert dimension_bound(c).bound <= d + 1e-9

    def test_mixed_state(self):
        rho = builtin_state("classical", 3, 3)
        for seed in range(10):
            ss = np.random.SeedSequence(seed).spawn(3)
            ms = tuple(random_measurement_set(3, 3, s) for s in ss)
            c = born_correlation(QuantumScenario(rho, ms))
            assert dimension_bound(c).bound <= 3 + 1e-9


class TestMultiplicativity:
    def test_maxent_2_3(self):
        c = tensor_product(maxent_cb_correlation(2, 3), maxent_cb_correlation(3, 3))
        assert dimension_bound(c).bound == pytest.approx(MAXENT_2x3_BOUND, abs=1e-9)

    def test_ghz3_squared(self):
        g = ghz_correlation(3)
        assert dimension_bound(tensor_product(g, g)).bound == pytest.approx(GHZ3_SQUARED_BOUND, abs=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_products(self, seed):
        c1 = born_correlation(random_scenario((2, 2, 2), seed, settings=2))
        c2 = born_correlation(random_scenario((2, 2, 2), seed + 50, settings=2))
        opts = AmsOptions.fixed((1, 2))
        prod = dimension_bound(tensor_product(c1, c2), opts=opts).bound
        assert prod == pytest.approx(dimension_bound(c1, opts=opts).bound * dimension_bound(c2, opts=opts).bound, rel=1e-9)
