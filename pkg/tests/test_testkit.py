import itertools
import random
from collections import Counter

import pytest

from porel import algebra as A
from porel.core import PoRelation
from porel.order import ia_width, width
from porel.testkit import (
    PartitionInstance,
    _set_partitions,
    all_partition_instances,
    bag_eval,
    gen_grid_instance,
    gen_unary3partition,
    max_antichain_bruteforce,
    random_database,
    random_porelation,
    random_query,
    solve_3partition_oracle,
    world_prefixes,
)


def permutation_oracle(inst):
    """Try every ordering of E and cut it into consecutive triples."""
    return any(
        all(sum(p[i : i + 3]) == inst.B for i in range(0, len(p), 3))
        for p in set(itertools.permutations(inst.E))
    )


class TestPartitionInstances:
    def test_oracle_agrees_with_permutations(self):
        n = 0
        for inst in all_partition_instances(max_m=2, max_n=4):
            assert solve_3partition_oracle(inst) == permutation_oracle(inst)
            n += 1
        assert n > 100

    def test_validation(self):
        with pytest.raises(ValueError):
            PartitionInstance((1, 2), 3)
        with pytest.raises(ValueError):
            PartitionInstance((0, 1, 2), 3)
        with pytest.raises(ValueError):
            PartitionInstance((1, 1, 1), -1)

    def test_both_answers_occur(self):
        answers = {solve_3partition_oracle(i) for i in all_partition_instances(max_m=1, max_n=3)}
        assert answers == {True, False}


class TestGadgets:
    def test_unary_gadget_sizes(self):
        inst = PartitionInstance((1, 2, 3), 6)
        rel, cand = gen_unary3partition(inst)
        assert len(rel) == len(cand) == sum(k + 2 for k in inst.E)
        assert width(rel) == 3
        assert Counter(rel.labels) == Counter(cand.rows)

    def test_grid_gadget_sizes(self):
        inst = PartitionInstance((1, 1, 2), 4)
        db, q, cand = gen_grid_instance(inst)
        r = A.eval_query(q, db)
        assert len(r) == len(cand) == 3 * sum(k + 2 for k in inst.E)
        assert Counter(r.labels) == Counter(cand.rows)


class TestGenerators:
    def test_seeded(self):
        a = random_porelation(6, seed=5, density=0.4)
        b = random_porelation(6, seed=5, density=0.4)
        assert a.labels == b.labels and a.succ == b.succ

    def test_width_target(self):
        hit = 0
        for k in range(100):
            r = random_porelation(8, target_width=3, seed=k)
            assert width(r) <= 3
            hit += width(r) == 3
        assert hit > 20

    def test_ia_width_target(self):
        for k in range(100):
            assert ia_width(random_porelation(7, target_ia_width=2, seed=k, density=0.7)) <= 2

    def test_rejects_bad_targets(self):
        with pytest.raises(ValueError):
            random_porelation(-1)
        with pytest.raises(ValueError):
            random_porelation(3, target_width=0)

    def test_random_queries_are_well_typed(self):
        rng = random.Random(1)
        for _ in range(200):
            db = random_database(rng)
            q = random_query(rng, db.schema, rng.randint(0, 5))
            r = A.eval_query(q, db)
            assert Counter(r.labels) == bag_eval(q, {n: rel.labels for n, rel in db.relations.items()})


class TestOracles:
    def test_set_partitions_follow_bell_numbers(self):
        assert [sum(1 for _ in _set_partitions(list(range(n)))) for n in range(6)] == [1, 1, 2, 5, 15, 52]

    def test_antichain_of_known_shapes(self):
        assert max_antichain_bruteforce(A.const_chain(4)) == 1
        assert max_antichain_bruteforce(PoRelation.unordered([(0,)] * 4)) == 4
        assert max_antichain_bruteforce(PoRelation.empty(1)) == 0

    def test_prefixes(self):
        r = PoRelation.unordered([("a",), ("b",)])
        assert world_prefixes(r, 1) == {(("a",),), (("b",),)}

    def test_bag_eval_rejects_dupelim(self):
        with pytest.raises(TypeError):
            bag_eval(A.DupElim(A.RelationRef("R")), {"R": []})
