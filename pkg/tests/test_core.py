import itertools
import random

import pytest

from porel.core import (
    BudgetExceeded,
    InvalidRelation,
    ListRelation,
    PoRelation,
    env_budgets,
    is_linear_extension,
    is_possible_world_oracle,
    linear_extensions,
    possible_worlds,
    realize_world,
    semantically_equal,
    some_linear_extension,
    underlying_bag,
    validate,
)
from porel import algebra as A
from porel.testkit import random_porelation


def perm_extensions(r):
    """Oracle: filter all permutations by the order pairs."""
    pairs = r.order_pairs()
    out = []
    for p in itertools.permutations(range(len(r))):
        pos = {x: k for k, x in enumerate(p)}
        if all(pos[a] < pos[b] for a, b in pairs):
            out.append(p)
    return out


class TestConstruction:
    def test_closure_is_transitive(self):
        r = PoRelation.build([("a",), ("b",), ("c",)], [(0, 1), (1, 2)])
        assert r.less(0, 2)
        assert r.cover_edges() == [(0, 1), (1, 2)]
        assert sorted(r.order_pairs()) == [(0, 1), (0, 2), (1, 2)]

    def test_pred_mirrors_succ(self):
        r = random_porelation(7, seed=3, density=0.5)
        for i in range(len(r)):
            for j in range(len(r)):
                assert bool(r.pred[j] >> i & 1) == r.less(i, j)

    def test_reflexive_pair_rejected(self):
        with pytest.raises(InvalidRelation, match="reflexivity"):
            PoRelation.build([("a",)], [(0, 0)])

    def test_two_cycle_rejected(self):
        with pytest.raises(InvalidRelation, match="antisymmetry"):
            PoRelation.build([("a",), ("b",)], [(0, 1), (1, 0)])

    def test_unknown_identifier_rejected(self):
        with pytest.raises(InvalidRelation):
            PoRelation.build([("a",)], [(0, 3)])

    def test_non_domain_values_reported(self):
        r = PoRelation.build([(1.5,), (True,)], check=False)
        problems = validate(r)
        assert len(problems) == 2

    def test_arity_mismatch_reported(self):
        r = PoRelation.build([(1,), (1, 2)], arity=1, check=False)
        assert any("arity" in p for p in validate(r))

    def test_valid_total_order_has_no_problems(self, fig1):
        assert validate(fig1["Rest"]) == []
        assert fig1["Rest"].is_total()

    def test_restrict_keeps_induced_order(self):
        r = PoRelation.chain([(1,), (2,), (3,)])
        s = r.restrict([0, 2])
        assert s.labels == ((1,), (3,))
        assert s.less(0, 1)

    def test_list_relation_checks_arity(self):
        with pytest.raises(ValueError):
            ListRelation.of([(1,), (1, 2)])


class TestWorlds:
    def test_unordered_pair_gives_both_orders(self):
        r = PoRelation.unordered([("a",), ("b",)])
        assert possible_worlds(r) == {(("a",), ("b",)), (("b",), ("a",))}

    @pytest.mark.parametrize(
        "n, pairs, count",
        [
            (4, [(0, 2), (1, 2), (1, 3)], 5),  # [DERIVED: permutation filter]
            (6, [(0, 2), (1, 2), (2, 4), (3, 4), (3, 5)], 28),  # [DERIVED: permutation filter]
            (4, [], 24),
            (6, [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)], 5),  # 2x3 grid, [DERIVED]
        ],
    )
    def test_linear_extension_counts(self, n, pairs, count):
        r = PoRelation.build([(i,) for i in range(n)], pairs)
        assert len(list(linear_extensions(r))) == count

    def test_extensions_match_permutation_oracle(self):
        rng = random.Random(1)
        for k in range(60):
            r = random_porelation(rng.randint(0, 6), seed=k, density=rng.random())
            assert sorted(linear_extensions(r)) == sorted(perm_extensions(r))

    def test_worlds_are_deduplicated_values(self):
        rng = random.Random(2)
        for k in range(60):
            r = random_porelation(rng.randint(0, 6), alphabet=2, seed=k, density=rng.random())
            want = {tuple(r.labels[i] for i in p) for p in perm_extensions(r)}
            assert possible_worlds(r) == want

    def test_union_with_itself_doubles_identifiers(self):
        r = PoRelation.chain([(1,), (2,)])
        u = A.op_union(r, r)
        assert len(u) == 4
        assert possible_worlds(u) != possible_worlds(r)

    def test_union_with_empty_is_equivalent(self):
        r = random_porelation(5, seed=4, density=0.4)
        assert semantically_equal(A.op_union(r, PoRelation.empty(1)), r)

    def test_budget_carries_partial_results(self):
        r = PoRelation.unordered([(i,) for i in range(5)])
        with pytest.raises(BudgetExceeded) as e:
            possible_worlds(r, limit=10)
        assert len(e.value.partial) == 11

    def test_some_extension_is_valid_and_smallest_first(self):
        r = PoRelation.build([(0,), (1,), (2,)], [(1, 0)])
        ext = some_linear_extension(r)
        assert ext == [1, 0, 2]
        assert is_linear_extension(r, ext)
        assert not is_linear_extension(r, [0, 1, 2])
        assert not is_linear_extension(r, [1, 0])

    def test_underlying_bag_counts_duplicates(self):
        r = PoRelation.unordered([(1,), (1,), (2,)])
        assert underlying_bag(r) == {(1,): 2, (2,): 1}


class TestRealize:
    def test_realized_extension_spells_candidate(self):
        rng = random.Random(5)
        for k in range(80):
            r = random_porelation(rng.randint(1, 7), alphabet=2, seed=k, density=rng.random())
            w = rng.choice(sorted(possible_worlds(r)))
            ext = realize_world(r, w)
            assert is_linear_extension(r, ext)
            assert tuple(r.labels[i] for i in ext) == w

    def test_oracle_agrees_with_enumeration(self):
        rng = random.Random(6)
        for k in range(80):
            r = random_porelation(rng.randint(0, 6), alphabet=2, seed=k, density=rng.random())
            rows = list(r.labels)
            rng.shuffle(rows)
            assert is_possible_world_oracle(r, rows) == (tuple(rows) in possible_worlds(r))

    def test_wrong_bag_is_rejected(self):
        r = PoRelation.chain([(1,), (2,)])
        assert realize_world(r, [(1,), (1,)]) is None
        assert realize_world(r, [(1,)]) is None

    def test_node_budget(self):
        # a long antichain of equal values with the last value impossible: the memo keeps this small
        r = PoRelation.unordered([(0,)] * 12 + [(1,)])
        assert not is_possible_world_oracle(r, [(0,)] * 11 + [(1,), (1,)])
        with pytest.raises(BudgetExceeded):
            realize_world(PoRelation.unordered([(i % 2,) for i in range(10)]), [(0,), (1,)] * 5, node_budget=3)


class TestBudgetsFromEnvironment:
    def test_default(self, monkeypatch):
        monkeypatch.delenv("PO_ENGINE_BUDGET", raising=False)
        assert env_budgets() == (10**6, 10**7)

    def test_single_value(self, monkeypatch):
        monkeypatch.setenv("PO_ENGINE_BUDGET", "50")
        assert env_budgets() == (50, 50)

    def test_pair(self, monkeypatch):
        monkeypatch.setenv("PO_ENGINE_BUDGET", "5,70")
        assert env_budgets() == (5, 70)
