import random

import pytest

from porel import algebra as A
from porel.accumulation import concat_accumulator
from porel.core import PoDatabase, PoRelation, possible_worlds, semantically_equal, underlying_bag
from porel.testkit import bag_eval, random_database, random_porelation, random_query


def worlds(r):
    return possible_worlds(r)


class TestPredicates:
    def test_atoms(self):
        t = ("a", 3, 3)
        assert A.eval_pred(A.Atom(2, "=", A.Attr(3)), t)
        assert A.eval_pred(A.Atom(1, "!=", A.Const("b")), t)
        assert not A.eval_pred(A.Atom(1, "=", A.Const(3)), t)

    def test_connectives(self):
        t = (1, 2)
        yes, no = A.TrueP(), A.FalseP()
        assert A.eval_pred(A.And(yes, A.Not(no)), t)
        assert A.eval_pred(A.Or(no, yes), t)
        assert not A.eval_pred(A.And(yes, no), t)

    def test_index_range(self):
        p = A.And(A.Atom(2, "=", A.Attr(4)), A.Atom(1, "!=", A.Const(0)))
        assert A.pred_max_index(p) == 4
        assert A.pred_min_index(p) == 1


class TestOperators:
    def test_select_keeps_induced_order(self, fig1):
        r = A.op_select(A.Atom(2, "!=", A.Const(12)), fig1["Hotel"])
        assert r.labels == (("Mercure", 5), ("Balzac", 8))
        assert r.less(0, 1)

    def test_project_on_hotel2(self, fig1):
        r = A.op_project((1,), fig1["Hotel2"])
        assert worlds(r) == {(("Balzac",), ("Mercure",), ("Mercure",))}

    def test_project_may_repeat_attributes(self):
        r = A.op_project((2, 2, 1), PoRelation.chain([(1, 2)]))
        assert r.labels == ((2, 2, 1),)

    def test_union_is_parallel_composition(self):
        a, b = PoRelation.chain([("a",)]), PoRelation.chain([("b",)])
        assert worlds(A.op_union(a, b)) == {(("a",), ("b",)), (("b",), ("a",))}

    def test_concat_is_series_composition(self):
        a = PoRelation.unordered([("a",), ("b",)])
        b = PoRelation.chain([("c",)])
        got = worlds(A.op_concat(a, b))
        assert got == {w1 + w2 for w1 in worlds(a) for w2 in worlds(b)}

    def test_dirprod_on_running_example_is_a_diamond(self, fig1):
        hotel = A.op_select(A.Atom(2, "!=", A.Const(12)), fig1["Hotel"])
        r = A.op_prod_dir(fig1["Rest"], hotel)
        assert len(r) == 4
        assert sorted(r.cover_edges()) == [(0, 1), (0, 2), (1, 3), (2, 3)]

    def test_dirprod_of_chains_is_the_grid(self):
        r = A.op_prod_dir(A.const_chain(2), A.const_chain(3))
        for i1 in range(2):
            for j1 in range(3):
                for i2 in range(2):
                    for j2 in range(3):
                        want = i1 <= i2 and j1 <= j2 and (i1, j1) != (i2, j2)
                        assert r.less(i1 * 3 + j1, i2 * 3 + j2) == want

    def test_lexprod_of_chains_is_total(self):
        r = A.op_prod_lex(A.const_chain(2), A.const_chain(2))
        assert worlds(r) == {((1, 1), (1, 2), (2, 1), (2, 2))}

    def test_lexprod_of_unordered(self):
        r = A.op_prod_lex(PoRelation.unordered([(1,), (2,)]), PoRelation.unordered([(3,), (4,)]))
        assert r.order_pairs() == []

    def test_product_with_singleton_pads_values(self):
        r = random_porelation(5, seed=2, density=0.4)
        for op in (A.op_prod_dir, A.op_prod_lex):
            p = op(r, A.const_singleton(("x",)))
            assert semantically_equal(A.op_project((1,), p), r)

    def test_constants(self):
        assert worlds(A.const_chain(3)) == {((1,), (2,), (3,))}
        assert A.const_chain(0).labels == ()
        assert A.const_singleton((1, "a")).labels == ((1, "a"),)

    def test_selection_out_of_range(self):
        with pytest.raises(A.QueryError):
            A.op_select(A.Atom(3, "=", A.Const(1)), PoRelation.chain([(1,)]))


class TestEvaluation:
    def test_reference_returns_stored_relation(self, fig1):
        assert A.eval_query(A.RelationRef("Rest"), fig1) is fig1["Rest"]

    def test_check_query_arity(self, fig1):
        q = A.ProdDir(A.RelationRef("Rest"), A.Project((1,), A.RelationRef("Hotel")))
        assert A.check_query(q, fig1.schema) == 3

    @pytest.mark.parametrize(
        "q",
        [
            A.RelationRef("Nope"),
            A.Union(A.RelationRef("Rest"), A.RelationRef("Rest2")),
            A.Project((3,), A.RelationRef("Rest")),
            A.Select(A.Atom(1, "=", A.Attr(5)), A.RelationRef("Rest")),
            A.Union(A.Accum(concat_accumulator(), A.RelationRef("Rest")), A.RelationRef("Rest")),
        ],
    )
    def test_ill_formed_queries(self, fig1, q):
        with pytest.raises(A.QueryError):
            A.check_query(q, fig1.schema)

    def test_accumulation_root_needs_decision_layer(self, fig1):
        with pytest.raises(A.QueryError):
            A.eval_query(A.Accum(concat_accumulator(), A.RelationRef("Rest")), fig1)

    def test_complete_failure_propagates(self, fig1):
        q = A.Union(A.DupElim(A.Project((1,), A.RelationRef("Hotel"))), A.RelationRef("Rest2"))
        out = A.eval_query(q, fig1)
        assert isinstance(out, A.CompleteFailure)
        assert out.arity == 1

    def test_bag_semantics_commute(self):
        rng = random.Random(3)
        for _ in range(100):
            db = random_database(rng)
            q = random_query(rng, db.schema, rng.randint(0, 4))
            bags = {n: list(r.labels) for n, r in db.relations.items()}
            assert underlying_bag(A.eval_query(q, db)) == bag_eval(q, bags)

    def test_size_and_fragments(self):
        q = A.Select(A.TrueP(), A.ProdLex(A.RelationRef("R"), A.ChainConst(2)))
        assert A.size(q) == 4
        assert A.is_posra(q)
        assert not A.has_dirprod(q)
        assert not A.is_product_free(q)
        assert not A.is_posra(A.DupElim(q))


class TestProductFreeRewrite:
    def test_products_are_outside(self):
        assert A.rewrite_product_free(A.ProdDir(A.RelationRef("R"), A.RelationRef("R"))) is None

    def test_branches_preserve_worlds(self):
        rng = random.Random(8)
        checked = 0
        for _ in range(150):
            db = random_database(rng, max_size=3, arity=2)
            q = random_query(rng, db.schema, rng.randint(0, 4), dirprod=False, lexprod=False)
            branches = A.rewrite_product_free(q)
            assert branches is not None
            parts = [A.eval_query(b.as_query(), db) for b in branches]
            u = parts[0]
            for p in parts[1:]:
                u = A.op_union(u, p)
            assert semantically_equal(u, A.eval_query(q, db))
            checked += 1
        assert checked == 150

    def test_selection_through_projection(self):
        q = A.Select(A.Atom(1, "=", A.Const(5)), A.Project((2,), A.RelationRef("R")))
        [br] = A.rewrite_product_free(q)
        assert br.attrs == (2,)
        assert br.pred == A.Atom(2, "=", A.Const(5))

    def test_empty_database_relation(self):
        db = PoDatabase({"R": PoRelation.empty(2)})
        assert len(A.eval_query(A.ProdDir(A.RelationRef("R"), A.ChainConst(3)), db)) == 0
