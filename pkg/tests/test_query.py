import random

import pytest

from porel import algebra as A
from porel.accumulation import make_accumulator, sum_accumulator
from porel.query import ParseError, parse_query, to_text, tokenize
from porel.testkit import random_database, random_query


class TestParsing:
    def test_running_example_query(self, fig1):
        q = parse_query('Rest dirprod (select .2 != "12" (Hotel))', fig1)
        assert q == A.ProdDir(A.RelationRef("Rest"), A.Select(A.Atom(2, "!=", A.Const(12)), A.RelationRef("Hotel")))

    def test_chain_and_singleton(self):
        assert parse_query("chain(3)") == A.ChainConst(3)
        assert parse_query("singleton(1, 'a')") == A.Singleton((1, "a"))
        assert parse_query("singleton()") == A.Singleton(())

    def test_accumulation_root(self):
        q = parse_query("accum concat (project 1 (R))")
        assert isinstance(q, A.Accum) and q.acc.name == "concat"
        q2 = parse_query("accum sum[1, (2, 1)] (R)")
        assert q2.acc == sum_accumulator(1, (2, 1))

    def test_group_by(self):
        q = parse_query("accumgby sum[2] 1 (R)")
        assert q == A.AccumGroupBy(make_accumulator("sum", (2,)), (1,), A.RelationRef("R"))

    def test_binary_operators_are_left_associative(self):
        q = parse_query("R union S concat T")
        assert q == A.Concat(A.Union(A.RelationRef("R"), A.RelationRef("S")), A.RelationRef("T"))

    def test_predicate_precedence(self):
        q = parse_query("select .1 = 1 or .1 = 2 and not .2 = .1 (R)")
        one, two = A.Atom(1, "=", A.Const(1)), A.Atom(1, "=", A.Const(2))
        assert q.pred == A.Or(one, A.And(two, A.Not(A.Atom(2, "=", A.Attr(1)))))

    def test_quoted_digits(self):
        assert tokenize('"12"')[0].value == 12
        assert tokenize("'12'")[0].value == "12"
        assert tokenize('"a\\"b"')[0].value == 'a"b'

    def test_named_attributes(self, fig1):
        q = parse_query("project .restname, .Hotel.distr (Rest dirprod Hotel)", fig1)
        assert q.attrs == (1, 4)
        with pytest.raises(ParseError, match="ambiguous"):
            parse_query("project .distr (Rest dirprod Hotel)", fig1)
        with pytest.raises(ParseError, match="unknown attribute"):
            parse_query("project .stars (Rest)", fig1)


class TestErrors:
    @pytest.mark.parametrize(
        "text, line, col",
        [
            ("select .1 = (R)", 1, 13),
            ("R union", 1, 8),
            ("project 1\n  (R", 2, 5),
            ("R )", 1, 3),
            ("R $", 1, 3),
            ("chain(x)", 1, 7),
        ],
    )
    def test_positions(self, text, line, col):
        with pytest.raises(ParseError) as e:
            parse_query(text)
        assert (e.value.line, e.value.col) == (line, col)

    def test_unknown_accumulator(self):
        with pytest.raises(ParseError, match="unknown accumulator"):
            parse_query("accum median (R)")

    def test_bad_accumulator_arguments(self):
        with pytest.raises(ParseError):
            parse_query("accum topk['x'] (R)")

    def test_arity_checked_with_database(self, fig1):
        with pytest.raises(ParseError, match="arity|union"):
            parse_query("Rest union Rest2", fig1)


class TestRoundTrip:
    def test_random_queries(self):
        rng = random.Random(1)
        accs = [
            make_accumulator("concat"),
            make_accumulator("sum", (1, (3, 0, 1))),
            make_accumulator("firstwins", ((1,), ("it's",))),
            make_accumulator("topk", (2,)),
            make_accumulator("balanced"),
        ]
        for _ in range(300):
            db = random_database(rng)
            q = random_query(rng, db.schema, rng.randint(0, 5))
            if rng.random() < 0.3:
                q = A.Accum(rng.choice(accs), q)
            assert parse_query(to_text(q)) == q

    def test_string_constants(self):
        q = A.Select(A.Atom(1, "=", A.Const("a 'quoted' \\ value")), A.Singleton(("x", 3)))
        assert parse_query(to_text(q)) == q

    def test_boolean_constants(self):
        q = A.Select(A.Or(A.TrueP(), A.Not(A.FalseP())), A.RelationRef("R"))
        assert parse_query(to_text(q)) == q
