import random

import pytest

from porel import algebra as A
from porel.core import PoDatabase, PoRelation, linear_extensions
from porel.order import (
    FragmentError,
    ia_partition,
    ia_width,
    ia_width_bound_noprod,
    index_interval,
    is_antichain,
    is_ia,
    is_order_ideal,
    min_chain_partition,
    possible_ranks,
    width,
    width_bound_lex,
)
from porel.testkit import (
    max_antichain_bruteforce,
    min_ia_partition_bruteforce,
    random_database,
    random_porelation,
    random_query,
    realized_positions,
)


class TestChains:
    def test_running_example_diamond_has_width_two(self, fig1):
        hotel = A.op_select(A.Atom(2, "!=", A.Const(12)), fig1["Hotel"])
        assert width(A.op_prod_dir(fig1["Rest"], hotel)) == 2

    def test_chains_cover_and_are_ordered(self):
        rng = random.Random(1)
        for k in range(100):
            r = random_porelation(rng.randint(0, 9), seed=k, density=rng.random())
            chains = min_chain_partition(r).chains
            assert sorted(i for c in chains for i in c) == list(range(len(r)))
            for c in chains:
                assert all(r.less(a, b) for a, b in zip(c, c[1:]))

    def test_width_matches_largest_antichain(self):
        rng = random.Random(2)
        for k in range(150):
            r = random_porelation(rng.randint(0, 10), seed=k, density=rng.random())
            assert width(r) == max_antichain_bruteforce(r)

    def test_width_of_target_generator(self):
        for k in range(40):
            r = random_porelation(8, target_width=3, seed=k)
            assert width(r) <= 3

    def test_grid_width(self):
        # chain_n dirprod chain_n has the anti-diagonal as largest antichain
        for n in range(1, 5):
            c = A.const_chain(n)
            assert width(A.op_prod_dir(c, c)) == n

    def test_empty(self):
        assert width(PoRelation.empty(1)) == 0
        assert ia_width(PoRelation.empty(1)) == 0


class TestIaPartition:
    def test_classes_are_indistinguishable_antichains(self):
        rng = random.Random(3)
        for k in range(100):
            r = random_porelation(rng.randint(0, 8), target_ia_width=rng.randint(1, 4), seed=k)
            for c in ia_partition(r).classes:
                assert is_ia(r, sum(1 << i for i in c))

    def test_greedy_is_minimum(self):
        rng = random.Random(4)
        for k in range(120):
            r = random_porelation(rng.randint(0, 7), seed=k, density=rng.random())
            assert ia_width(r) == min_ia_partition_bruteforce(r)

    def test_order_only(self):
        # equal values are not required for indistinguishability
        r = PoRelation.build([("a",), ("b",), ("c",)], [(0, 2), (1, 2)])
        assert ia_partition(r).classes == ((0, 1), (2,))

    def test_chain_is_all_singletons(self):
        assert ia_width(A.const_chain(4)) == 4

    def test_antichain_check(self):
        r = PoRelation.build([(0,), (1,), (2,)], [(0, 1)])
        assert is_antichain(r, 0b101)
        assert not is_antichain(r, 0b011)
        # 0 and 2 are incomparable but 1 lies above 0 only
        assert not is_ia(r, 0b101)


class TestRanks:
    def test_index_interval_matches_realized_positions(self):
        rng = random.Random(5)
        for k in range(80):
            r = random_porelation(rng.randint(1, 7), seed=k, density=rng.random())
            for i in range(len(r)):
                iv = index_interval(r, i)
                assert realized_positions(r, i) == set(range(iv.lo, iv.hi + 1))

    def test_possible_ranks_match_adjacent_placements(self):
        rng = random.Random(6)
        seen = 0
        for k in range(80):
            r = random_porelation(rng.randint(2, 7), seed=k, density=rng.random())
            exts = list(linear_extensions(r))
            for x in range(len(r)):
                for y in range(x + 1, len(r)):
                    if r.comparable(x, y):
                        continue
                    iv = possible_ranks(r, x, y)
                    got = set()
                    for e in exts:
                        px, py = e.index(x), e.index(y)
                        if abs(px - py) == 1:
                            got.add(min(px, py) + 1)
                    assert got == set(range(iv.lo, iv.hi))
                    seen += 1
        assert seen > 100

    def test_possible_ranks_rejects_comparable(self):
        r = A.const_chain(2)
        with pytest.raises(ValueError):
            possible_ranks(r, 0, 1)
        with pytest.raises(ValueError):
            index_interval(r, 5)

    def test_order_ideals(self):
        r = PoRelation.build([(0,), (1,), (2,)], [(0, 1)])
        assert is_order_ideal(r, {0, 2})
        assert is_order_ideal(r, 0b011)
        assert not is_order_ideal(r, {1})


class TestStaticBounds:
    def test_width_bound_formula(self):
        q = A.ProdLex(A.RelationRef("R"), A.RelationRef("R"))
        assert width_bound_lex(q, 1) == 2**4
        assert width_bound_lex(q, 3) == 3**4

    def test_width_bound_needs_no_dirprod(self):
        with pytest.raises(FragmentError):
            width_bound_lex(A.ProdDir(A.RelationRef("R"), A.RelationRef("R")), 2)

    def test_width_bound_holds(self):
        rng = random.Random(7)
        for _ in range(100):
            db = random_database(rng, max_width=2)
            q = random_query(rng, db.schema, rng.randint(0, 4), dirprod=False)
            k = max(width(r) for r in db.relations.values())
            assert width(A.eval_query(q, db)) <= width_bound_lex(q, k)

    def test_ia_bound_holds(self):
        rng = random.Random(8)
        for k in range(150):
            rels = {
                name: random_porelation(rng.randint(0, 5), target_ia_width=2, arity=2, seed=rng.randrange(1 << 20))
                for name in ("R", "S")
            }
            db = PoDatabase(rels)
            q = random_query(rng, db.schema, rng.randint(0, 4), dirprod=False, lexprod=False, chain_max=3)
            kk = max(ia_width(r) for r in rels.values())
            assert ia_width(A.eval_query(q, db)) <= ia_width_bound_noprod(q, kk)

    def test_ia_bound_fragment(self):
        with pytest.raises(FragmentError):
            ia_width_bound_noprod(A.ProdLex(A.RelationRef("R"), A.RelationRef("R")), 2)
        with pytest.raises(FragmentError):
            ia_width_bound_noprod(A.DupElim(A.RelationRef("R")), 2)
        assert ia_width_bound_noprod(A.Union(A.ChainConst(5), A.RelationRef("R")), 2) == 15
