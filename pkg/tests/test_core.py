import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbo.core import (
    Instance,
    Keyword,
    aggregate,
    apply_click_weights,
    canonical_order,
    canonicalize,
    value,
    weighted_value,
)
from sbo.dist import Fixed
from sbo.errors import DimensionError, InvalidWeightError, ValidationError


def fixed_instance(cpcs, clicks, budget, weights=None):
    weights = weights or [1.0] * len(cpcs)
    keywords = tuple(
        Keyword(f"k{i}", cpc=c, weight=w) for i, (c, w) in enumerate(zip(cpcs, weights))
    )
    return Instance(keywords=keywords, budget=budget, model=Fixed(tuple(clicks)))


class TestCanonicalize:
    def test_sorts_by_cpc(self):
        inst = canonicalize(fixed_instance([2.0, 1.0], [5.0, 7.0], 10.0))
        assert inst.cpcs() == (1.0, 2.0)
        assert inst.model.clicks == (7.0, 5.0)

    def test_identity_when_sorted(self):
        inst = fixed_instance([1.0, 2.0], [5.0, 7.0], 10.0)
        assert canonicalize(inst) is inst

    def test_stable_on_ties(self):
        inst = fixed_instance([1.0, 1.0], [5.0, 7.0], 10.0)
        out = canonicalize(inst)
        assert [k.id for k in out.keywords] == ["k0", "k1"]

    def test_idempotent(self):
        inst = canonicalize(fixed_instance([3.0, 1.0, 2.0], [1.0, 2.0, 3.0], 5.0))
        assert canonicalize(inst) == inst

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            fixed_instance([1.0, 2.0], [5.0], 10.0)


class TestAggregate:
    def test_direct_sums(self):
        inst = fixed_instance([1.0, 2.0], [0.0, 0.0], 30.0)
        assert aggregate((1, 1), (10, 10), inst) == (20.0, 30.0)

    def test_zero_bids(self):
        inst = fixed_instance([1.0, 2.0], [0.0, 0.0], 30.0)
        assert aggregate((0, 0), (10, 10), inst) == (0.0, 0.0)

    def test_fractional_scaling(self):
        inst = fixed_instance([1.0, 2.0], [0.0, 0.0], 30.0)
        assert aggregate((0.5, 0), (10, 10), inst) == (5.0, 5.0)

    def test_length_mismatch(self):
        inst = fixed_instance([1.0, 2.0], [0.0, 0.0], 30.0)
        with pytest.raises(DimensionError):
            aggregate((1,), (10, 10), inst)


class TestValue:
    def test_cost_exactly_budget(self):
        inst = fixed_instance([1.0, 2.0], [0.0, 0.0], 30.0)
        assert value((1, 1), (10, 10), inst) == 20.0

    def test_over_budget_halves(self):
        inst = fixed_instance([1.0, 2.0], [0.0, 0.0], 15.0)
        assert value((1, 1), (10, 10), inst) == 10.0

    def test_nonprefix_realization(self):
        # free first keyword, skip the middle one, B=1: two clicks, one paid
        inst = fixed_instance([0.0, 1.0, 1.0], [0.0, 0.0, 0.0], 1.0)
        assert value((1, 0, 1), (1, 1, 1), inst) == 2.0

    def test_zero_clicks(self):
        inst = fixed_instance([1.0], [0.0], 1.0)
        assert value((1,), (0,), inst) == 0.0

    def test_free_clicks_not_limited(self):
        inst = fixed_instance([0.0], [0.0], 1.0)
        assert value((1,), (100,), inst) == 100.0

    @given(
        st.lists(
            st.tuples(
                st.floats(0, 1),
                st.floats(0, 10),
                st.floats(0, 5),
            ),
            min_size=1,
            max_size=6,
        ),
        st.floats(0.1, 20),
    )
    @settings(max_examples=200, deadline=None)
    def test_branch_forms_agree(self, rows, budget):
        # value = min(clicks, B/cpc) whenever cost > 0
        bids = [b for b, _, _ in rows]
        clicks = [c for _, c, _ in rows]
        cpcs = [p for _, _, p in rows]
        inst = fixed_instance(cpcs, [0.0] * len(rows), budget)
        clk, cost = aggregate(bids, clicks, inst)
        v = value(bids, clicks, inst)
        if cost > 0 and clk > 0:
            alt = min(clk, budget * clk / cost)
            assert v == pytest.approx(alt, rel=1e-12)
        else:
            assert v == clk

    @given(st.permutations(list(range(4))))
    @settings(deadline=None)
    def test_permutation_invariance(self, perm):
        bids = [0.5, 1.0, 0.0, 0.25]
        clicks = [3.0, 1.0, 4.0, 1.5]
        cpcs = [1.0, 2.0, 0.5, 3.0]
        inst = fixed_instance(cpcs, [0.0] * 4, 5.0)
        pinst = fixed_instance([cpcs[i] for i in perm], [0.0] * 4, 5.0)
        v1 = value(bids, clicks, inst)
        v2 = value([bids[i] for i in perm], [clicks[i] for i in perm], pinst)
        assert v2 == pytest.approx(v1, rel=1e-12)


class TestApplyClickWeights:
    def test_identity_weights(self):
        inst = fixed_instance([2.0, 1.0], [5.0, 7.0], 10.0)
        out = apply_click_weights(inst)
        assert out == canonicalize(inst)

    def test_single_keyword_substitution(self):
        inst = fixed_instance([1.0], [5.0], 10.0, weights=[2.0])
        out = apply_click_weights(inst)
        assert out.keywords[0].cpc == 0.5
        assert out.model.clicks == (10.0,)
        assert out.keywords[0].weight == 1.0

    def test_invalid_weight_rejected(self):
        with pytest.raises(InvalidWeightError):
            Keyword("k", cpc=1.0, weight=0.0)

    def test_preserves_objective_on_random_pairs(self):
        import numpy as np

        rng = np.random.default_rng(7)
        for _ in range(100):
            n = int(rng.integers(1, 6))
            cpcs = rng.uniform(0.1, 5, n).tolist()
            weights = rng.uniform(0.2, 3, n).tolist()
            clicks = rng.uniform(0, 10, n).tolist()
            bids = rng.uniform(0, 1, n).tolist()
            budget = float(rng.uniform(1, 30))
            inst = fixed_instance(cpcs, clicks, budget, weights=weights)
            out = apply_click_weights(inst)
            # map bids and realizations through keyword ids across reordering
            by_id = {k.id: i for i, k in enumerate(inst.keywords)}
            tbids = [bids[by_id[k.id]] for k in out.keywords]
            trealization = [
                clicks[by_id[k.id]] * inst.keywords[by_id[k.id]].weight
                for k in out.keywords
            ]
            lhs = weighted_value(bids, clicks, inst)
            rhs = value(tbids, trealization, out)
            assert rhs == pytest.approx(lhs, rel=1e-9, abs=1e-12)


class TestValidation:
    def test_negative_cpc(self):
        with pytest.raises(ValidationError):
            Keyword("k", cpc=-1.0)

    def test_nonpositive_budget(self):
        with pytest.raises(ValidationError):
            fixed_instance([1.0], [1.0], 0.0)

    def test_bid_out_of_range(self):
        inst = fixed_instance([1.0], [1.0], 1.0)
        with pytest.raises(ValidationError):
            value((1.5,), (1.0,), inst)

    def test_canonical_order_is_permutation(self):
        inst = fixed_instance([3.0, 1.0, 1.0, 2.0], [0.0] * 4, 1.0)
        assert sorted(canonical_order(inst)) == [0, 1, 2, 3]
