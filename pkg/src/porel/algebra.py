"""Query ASTs and operator semantics for positive relational algebra over po-relations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union as _U

from .core import PoDatabase, PoRelation, bits, is_domain_value


class QueryError(ValueError):
    """Ill-formed query: unknown relation, bad attribute index, arity clash."""


# predicates -----------------------------------------------------------------


@dataclass(frozen=True)
class Attr:
    index: int  # 1-based


@dataclass(frozen=True)
class Const:
    value: object


@dataclass(frozen=True)
class Atom:
    left: int  # 1-based attribute
    op: str  # "=" or "!="
    right: _U[Attr, Const]

    def __post_init__(self):
        if self.op not in ("=", "!="):
            raise QueryError(f"unsupported comparison {self.op!r}")


@dataclass(frozen=True)
class And:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Or:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Not:
    inner: "Predicate"


@dataclass(frozen=True)
class TrueP:
    pass


@dataclass(frozen=True)
class FalseP:
    pass


Predicate = _U[Atom, And, Or, Not, TrueP, FalseP]


def eval_pred(p: Predicate, t: tuple) -> bool:
    if isinstance(p, Atom):
        lhs = t[p.left - 1]
        rhs = t[p.right.index - 1] if isinstance(p.right, Attr) else p.right.value
        # naturals and strings never compare equal; `1 == "1"` is already False
        same = lhs == rhs and type(lhs) is type(rhs)
        return same if p.op == "=" else not same
    if isinstance(p, And):
        return eval_pred(p.left, t) and eval_pred(p.right, t)
    if isinstance(p, Or):
        return eval_pred(p.left, t) or eval_pred(p.right, t)
    if isinstance(p, Not):
        return not eval_pred(p.inner, t)
    if isinstance(p, TrueP):
        return True
    if isinstance(p, FalseP):
        return False
    raise TypeError(f"not a predicate: {p!r}")


def pred_max_index(p: Predicate) -> int:
    if isinstance(p, Atom):
        return max(p.left, p.right.index if isinstance(p.right, Attr) else 0)
    if isinstance(p, (And, Or)):
        return max(pred_max_index(p.left), pred_max_index(p.right))
    if isinstance(p, Not):
        return pred_max_index(p.inner)
    return 0


def pred_min_index(p: Predicate) -> int:
    if isinstance(p, Atom):
        return min(p.left, p.right.index if isinstance(p.right, Attr) else p.left)
    if isinstance(p, (And, Or)):
        return min(pred_min_index(p.left), pred_min_index(p.right))
    if isinstance(p, Not):
        return pred_min_index(p.inner)
    return 1


# query AST -------------------------------------------------------------------


@dataclass(frozen=True)
class RelationRef:
    name: str


@dataclass(frozen=True)
class Select:
    pred: Predicate
    q: "Query"


@dataclass(frozen=True)
class Project:
    attrs: tuple  # 1-based, repetition and reordering allowed
    q: "Query"


@dataclass(frozen=True)
class Union:
    q1: "Query"
    q2: "Query"


@dataclass(frozen=True)
class ProdDir:
    q1: "Query"
    q2: "Query"


@dataclass(frozen=True)
class ProdLex:
    q1: "Query"
    q2: "Query"


@dataclass(frozen=True)
class Singleton:
    values: tuple


@dataclass(frozen=True)
class ChainConst:
    n: int


@dataclass(frozen=True)
class Concat:
    q1: "Query"
    q2: "Query"


@dataclass(frozen=True)
class DupElim:
    q: "Query"


@dataclass(frozen=True)
class Accum:
    acc: object  # accumulation.Accumulator
    q: "Query"


@dataclass(frozen=True)
class AccumGroupBy:
    acc: object
    attrs: tuple
    q: "Query"


Query = _U[RelationRef, Select, Project, Union, ProdDir, ProdLex, Singleton, ChainConst, Concat, DupElim, Accum, AccumGroupBy]

BINARY = (Union, ProdDir, ProdLex, Concat)


def children(q) -> tuple:
    if isinstance(q, BINARY):
        return (q.q1, q.q2)
    if isinstance(q, (Select, Project, DupElim, Accum, AccumGroupBy)):
        return (q.q,)
    return ()


def walk(q):
    yield q
    for c in children(q):
        yield from walk(c)


def size(q) -> int:
    """Number of operator and leaf symbols."""
    return sum(1 for _ in walk(q))


def check_query(q, schema: dict) -> int:
    """Arity of ``q`` against ``schema``; raises :class:`QueryError` when ill-formed."""
    return _arity(q, schema, root=True)


def _arity(q, schema: dict, root: bool) -> int:
    if isinstance(q, RelationRef):
        if q.name not in schema:
            raise QueryError(f"unknown relation {q.name!r}")
        return schema[q.name]
    if isinstance(q, Singleton):
        for v in q.values:
            if not is_domain_value(v):
                raise QueryError(f"singleton value {v!r} is neither a natural number nor a string")
        return len(q.values)
    if isinstance(q, ChainConst):
        if q.n < 0:
            raise QueryError("chain length must be non-negative")
        return 1
    if isinstance(q, Select):
        a = _arity(q.q, schema, False)
        if pred_max_index(q.pred) > a or pred_min_index(q.pred) < 1:
            raise QueryError(f"selection references an attribute outside 1..{a}")
        return a
    if isinstance(q, Project):
        a = _arity(q.q, schema, False)
        for i in q.attrs:
            if not 1 <= i <= a:
                raise QueryError(f"projection attribute {i} outside 1..{a}")
        return len(q.attrs)
    if isinstance(q, (Union, Concat)):
        a1, a2 = _arity(q.q1, schema, False), _arity(q.q2, schema, False)
        if a1 != a2:
            kind = "union" if isinstance(q, Union) else "concat"
            raise QueryError(f"{kind} of arities {a1} and {a2}")
        return a1
    if isinstance(q, (ProdDir, ProdLex)):
        return _arity(q.q1, schema, False) + _arity(q.q2, schema, False)
    if isinstance(q, DupElim):
        return _arity(q.q, schema, False)
    if isinstance(q, (Accum, AccumGroupBy)):
        if not root:
            raise QueryError("accumulation is only allowed as the outermost operator")
        a = _arity(q.q, schema, False)
        need = getattr(q.acc, "min_arity", 0)
        if a < need:
            raise QueryError(f"accumulator {q.acc.name} needs arity >= {need}, got {a}")
        if isinstance(q, AccumGroupBy):
            for i in q.attrs:
                if not 1 <= i <= a:
                    raise QueryError(f"group-by attribute {i} outside 1..{a}")
        return 1 if isinstance(q, Accum) else len(q.attrs) + 1
    raise QueryError(f"not a query node: {q!r}")


# operators -------------------------------------------------------------------


@dataclass(frozen=True)
class CompleteFailure:
    """Duplicate elimination admitted no safe world: the world set is empty."""

    arity: int


EvalResult = _U[PoRelation, CompleteFailure]


def op_select(p: Predicate, r: PoRelation) -> PoRelation:
    if pred_max_index(p) > r.arity:
        raise QueryError(f"selection references an attribute outside 1..{r.arity}")
    return r.restrict([i for i, t in enumerate(r.labels) if eval_pred(p, t)])


def op_project(attrs, r: PoRelation) -> PoRelation:
    attrs = tuple(attrs)
    for i in attrs:
        if not 1 <= i <= r.arity:
            raise QueryError(f"projection attribute {i} outside 1..{r.arity}")
    return r.with_labels([tuple(t[i - 1] for i in attrs) for t in r.labels], len(attrs))


def op_union(r1: PoRelation, r2: PoRelation) -> PoRelation:
    if r1.arity != r2.arity:
        raise QueryError(f"union of arities {r1.arity} and {r2.arity}")
    n1 = len(r1)
    succ = list(r1.succ) + [row << n1 for row in r2.succ]
    return PoRelation._trusted(r1.labels + r2.labels, succ, r1.arity)


def op_concat(r1: PoRelation, r2: PoRelation) -> PoRelation:
    if r1.arity != r2.arity:
        raise QueryError(f"concat of arities {r1.arity} and {r2.arity}")
    n1 = len(r1)
    above = r2.full_mask << n1
    succ = [row | above for row in r1.succ] + [row << n1 for row in r2.succ]
    return PoRelation._trusted(r1.labels + r2.labels, succ, r1.arity)


def _product_labels(r1: PoRelation, r2: PoRelation) -> list:
    return [a + b for a in r1.labels for b in r2.labels]


def op_prod_dir(r1: PoRelation, r2: PoRelation) -> PoRelation:
    """Identifier (i, j) becomes ``i * |r2| + j``; ordered when both components
    are <= and the pair differs."""
    n2 = len(r2)
    succ = []
    for i in range(len(r1)):
        for j in range(n2):
            row = r2.succ[j] << (i * n2)
            up = r2.succ[j] | (1 << j)
            for i2 in bits(r1.succ[i]):
                row |= up << (i2 * n2)
            succ.append(row)
    return PoRelation._trusted(_product_labels(r1, r2), succ, r1.arity + r2.arity)


def op_prod_lex(r1: PoRelation, r2: PoRelation) -> PoRelation:
    n2 = len(r2)
    full2 = r2.full_mask
    succ = []
    for i in range(len(r1)):
        higher = 0
        for i2 in bits(r1.succ[i]):
            higher |= full2 << (i2 * n2)
        for j in range(n2):
            succ.append(higher | (r2.succ[j] << (i * n2)))
    return PoRelation._trusted(_product_labels(r1, r2), succ, r1.arity + r2.arity)


def const_singleton(values) -> PoRelation:
    values = tuple(values)
    return PoRelation._trusted([values], [0], len(values))


def const_chain(n: int) -> PoRelation:
    if n < 0:
        raise QueryError("chain length must be non-negative")
    return PoRelation._trusted([(i + 1,) for i in range(n)], [((1 << n) - 1) & ~((1 << (i + 1)) - 1) for i in range(n)], 1)


# evaluation ------------------------------------------------------------------


def eval_query(q, db: PoDatabase) -> EvalResult:
    """Materialize ``q`` bottom-up; accumulation roots are handled by the decision layer."""
    check_query(q, db.schema)
    if isinstance(q, (Accum, AccumGroupBy)):
        raise QueryError("accumulation queries produce results, not po-relations; use the decision module")
    return _eval(q, db)


def _eval(q, db: PoDatabase) -> EvalResult:
    if isinstance(q, RelationRef):
        return db.relations[q.name]
    if isinstance(q, Singleton):
        return const_singleton(q.values)
    if isinstance(q, ChainConst):
        return const_chain(q.n)
    if isinstance(q, DupElim):
        from .dedup import dup_elim

        inner = _eval(q.q, db)
        return inner if isinstance(inner, CompleteFailure) else dup_elim(inner)
    if isinstance(q, (Select, Project)):
        inner = _eval(q.q, db)
        if isinstance(inner, CompleteFailure):
            return CompleteFailure(len(q.attrs) if isinstance(q, Project) else inner.arity)
        return op_select(q.pred, inner) if isinstance(q, Select) else op_project(q.attrs, inner)
    if isinstance(q, BINARY):
        a, b = _eval(q.q1, db), _eval(q.q2, db)
        if isinstance(a, CompleteFailure) or isinstance(b, CompleteFailure):
            arity = a.arity + b.arity if isinstance(q, (ProdDir, ProdLex)) else a.arity
            return CompleteFailure(arity)
        op = {Union: op_union, ProdDir: op_prod_dir, ProdLex: op_prod_lex, Concat: op_concat}[type(q)]
        return op(a, b)
    raise QueryError(f"cannot evaluate {type(q).__name__} as a po-relation")


def is_posra(q) -> bool:
    """Only the core operators: no concat, duplicate elimination or accumulation."""
    return not any(isinstance(n, (Concat, DupElim, Accum, AccumGroupBy)) for n in walk(q))


def has_dirprod(q) -> bool:
    return any(isinstance(n, ProdDir) for n in walk(q))


def is_product_free(q) -> bool:
    return not any(isinstance(n, (ProdDir, ProdLex)) for n in walk(q))


# product-free rewriting into a union of projections of selections ---------------


@dataclass(frozen=True)
class Branch:
    """``project(attrs, select(pred, leaf))``; attrs None means identity."""

    leaf: object  # RelationRef, Singleton or ChainConst
    pred: Predicate
    attrs: tuple | None

    def as_query(self):
        q = self.leaf
        if not isinstance(self.pred, TrueP):
            q = Select(self.pred, q)
        if self.attrs is not None:
            q = Project(self.attrs, q)
        return q


def _compose_pred_through_projection(p: Predicate, attrs: tuple | None) -> Predicate:
    """Rewrite a predicate over projected positions into one over the leaf positions."""
    if attrs is None:
        return p
    if isinstance(p, Atom):
        right = Attr(attrs[p.right.index - 1]) if isinstance(p.right, Attr) else p.right
        return Atom(attrs[p.left - 1], p.op, right)
    if isinstance(p, And):
        return And(_compose_pred_through_projection(p.left, attrs), _compose_pred_through_projection(p.right, attrs))
    if isinstance(p, Or):
        return Or(_compose_pred_through_projection(p.left, attrs), _compose_pred_through_projection(p.right, attrs))
    if isinstance(p, Not):
        return Not(_compose_pred_through_projection(p.inner, attrs))
    return p


def rewrite_product_free(q) -> list[Branch] | None:
    """Union-of-projections-of-selections normal form, or None outside the fragment.

    Selection and projection both commute with union, and a selection below a
    projection absorbs one above it once its attributes are mapped back.
    """
    if isinstance(q, (RelationRef, Singleton, ChainConst)):
        return [Branch(q, TrueP(), None)]
    if isinstance(q, Union):
        a, b = rewrite_product_free(q.q1), rewrite_product_free(q.q2)
        return None if a is None or b is None else a + b
    if isinstance(q, Select):
        inner = rewrite_product_free(q.q)
        if inner is None:
            return None
        out = []
        for br in inner:
            p = _compose_pred_through_projection(q.pred, br.attrs)
            pred = p if isinstance(br.pred, TrueP) else And(br.pred, p)
            out.append(Branch(br.leaf, pred, br.attrs))
        return out
    if isinstance(q, Project):
        inner = rewrite_product_free(q.q)
        if inner is None:
            return None
        return [
            Branch(br.leaf, br.pred, tuple(q.attrs) if br.attrs is None else tuple(br.attrs[i - 1] for i in q.attrs))
            for br in inner
        ]
    return None
