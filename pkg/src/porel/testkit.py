"""Instance generators and independent oracles for differential testing."""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass

from . import algebra as A
from .core import ListRelation, PoDatabase, PoRelation, bits

GADGET_S, GADGET_N, GADGET_E = "s", "n", "e"


@dataclass(frozen=True)
class PartitionInstance:
    """Integers ``E`` (3m of them, each >= 1) and a target triple sum ``B``."""

    E: tuple
    B: int

    def __post_init__(self):
        if len(self.E) % 3:
            raise ValueError("the number of integers must be a multiple of 3")
        if any(not isinstance(x, int) or x < 1 for x in self.E):
            raise ValueError("all integers must be at least 1")
        if self.B < 0:
            raise ValueError("B must be non-negative")

    @property
    def m(self) -> int:
        return len(self.E) // 3


def solve_3partition_oracle(inst: PartitionInstance) -> bool:
    """Exhaustive search for a split of ``E`` into triples each summing to ``B``."""
    if sum(inst.E) != inst.m * inst.B:
        return False

    def rec(rest: tuple) -> bool:
        if not rest:
            return True
        first, tail = rest[0], rest[1:]
        for i, j in itertools.combinations(range(len(tail)), 2):
            if first + tail[i] + tail[j] == inst.B:
                left = tuple(x for k, x in enumerate(tail) if k not in (i, j))
                if rec(left):
                    return True
        return False

    return rec(tuple(sorted(inst.E)))


def _block(n: int) -> list:
    return [GADGET_S] + [GADGET_N] * n + [GADGET_E]


def gen_unary3partition(inst: PartitionInstance) -> tuple[PoRelation, ListRelation]:
    """Parallel chains ``s n^k e`` (one per integer) and the candidate ``(s^3 n^B e^3)^m``."""
    rel = PoRelation.empty(1)
    for k in inst.E:
        rel = A.op_union(rel, PoRelation.chain([(v,) for v in _block(k)]))
    cand = ([GADGET_S] * 3 + [GADGET_N] * inst.B + [GADGET_E] * 3) * inst.m
    return rel, ListRelation.of([(v,) for v in cand], 1)


def gen_grid_instance(inst: PartitionInstance) -> tuple[PoDatabase, object, ListRelation]:
    """Grid-shaped instance: ``project 2 (S dirprod Sp)`` with ``S`` a chain of 3m rows.

    ``Sp`` is the total order of all blocks ``s n^k e``.  The candidate lists, per
    row i, 3m-i copies of block i, then m copies of ``s^3 n^B e^3``, then i-1
    copies of block i again.
    """
    m3 = len(inst.E)
    sp = [v for k in inst.E for v in _block(k)]
    db = PoDatabase({"S": A.const_chain(m3), "Sp": PoRelation.chain([(v,) for v in sp])})
    q = A.Project((2,), A.ProdDir(A.RelationRef("S"), A.RelationRef("Sp")))
    l1 = [v for i, k in enumerate(inst.E, start=1) for _ in range(m3 - i) for v in _block(k)]
    mid = ([GADGET_S] * 3 + [GADGET_N] * inst.B + [GADGET_E] * 3) * inst.m
    l2 = [v for i, k in enumerate(inst.E, start=1) for _ in range(i - 1) for v in _block(k)]
    return db, q, ListRelation.of([(v,) for v in l1 + mid + l2], 1)


def all_partition_instances(max_m: int = 2, max_n: int = 4):
    """Every multiset ``E`` with m <= max_m and entries in 1..max_n, with matching and off-by-one ``B``."""
    for m in range(1, max_m + 1):
        for E in itertools.combinations_with_replacement(range(1, max_n + 1), 3 * m):
            total = sum(E)
            targets = {total // m, total // m + 1} if total % m == 0 else {total // m}
            for B in sorted(targets):
                yield PartitionInstance(E, B)


# random relations ---------------------------------------------------------------------


def _labels(rng: random.Random, n: int, alphabet: int, arity: int) -> list:
    return [tuple(rng.randrange(alphabet) for _ in range(arity)) for _ in range(n)]


def random_porelation(
    size: int,
    target_width: int | None = None,
    target_ia_width: int | None = None,
    alphabet: int = 3,
    seed: int = 0,
    arity: int = 1,
    density: float = 0.3,
) -> PoRelation:
    """Seeded random po-relation.

    Width mode spreads identifiers over ``target_width`` chains laid along a
    random interleaving and adds forward cross edges.  ia mode places identifiers
    into ``target_ia_width`` antichain blocks ordered by a random DAG on blocks.
    With neither target, the order is a random DAG of the given density.
    """
    if size < 0:
        raise ValueError("size must be non-negative")
    rng = random.Random(seed)
    labels = _labels(rng, size, alphabet, arity)
    if size == 0:
        return PoRelation.empty(arity)
    pairs = []
    if target_width is not None:
        if target_width < 1:
            raise ValueError("a non-empty relation has width at least 1")
        k = min(target_width, size)
        chain_of = [rng.randrange(k) for _ in range(size)]
        last = {}
        for i, c in enumerate(chain_of):
            if c in last:
                pairs.append((last[c], i))
            last[c] = i
        for i in range(size):
            for j in range(i + 1, size):
                if chain_of[i] != chain_of[j] and rng.random() < density / 2:
                    pairs.append((i, j))
    elif target_ia_width is not None:
        if target_ia_width < 1:
            raise ValueError("a non-empty relation has ia-width at least 1")
        k = min(target_ia_width, size)
        block = list(range(k)) + [rng.randrange(k) for _ in range(size - k)]
        rng.shuffle(block)
        above = [[b2 for b2 in range(b + 1, k) if rng.random() < density] for b in range(k)]
        for i in range(size):
            for j in range(size):
                if block[j] in above[block[i]]:
                    pairs.append((i, j))
    else:
        pairs = [(i, j) for i in range(size) for j in range(i + 1, size) if rng.random() < density]
    # hide the construction order behind a random renaming
    perm = list(range(size))
    rng.shuffle(perm)
    inv_labels = [None] * size
    for old, new in enumerate(perm):
        inv_labels[new] = labels[old]
    return PoRelation.build(inv_labels, [(perm[a], perm[b]) for a, b in pairs], arity)


def random_database(rng: random.Random, names=("R", "S"), max_size: int = 4, max_width: int = 2, arity: int = 2, alphabet: int = 3) -> PoDatabase:
    rels = {}
    for name in names:
        n = rng.randint(0, max_size)
        rels[name] = random_porelation(n, target_width=max_width, alphabet=alphabet, seed=rng.randrange(1 << 30), arity=arity)
    return PoDatabase(rels)


def random_predicate(rng: random.Random, arity: int, alphabet: int = 3):
    def atom():
        left = rng.randint(1, arity)
        op = rng.choice(["=", "!="])
        if rng.random() < 0.5 and arity > 1:
            return A.Atom(left, op, A.Attr(rng.randint(1, arity)))
        return A.Atom(left, op, A.Const(rng.randrange(alphabet + 1)))

    p = atom()
    r = rng.random()
    if r < 0.2:
        p = A.And(p, atom())
    elif r < 0.35:
        p = A.Or(p, atom())
    elif r < 0.45:
        p = A.Not(p)
    return p


def random_query(
    rng: random.Random,
    schema: dict,
    ops: int,
    dirprod: bool = True,
    lexprod: bool = True,
    max_arity: int = 4,
    chain_max: int = 2,
):
    """Random query with at most ``ops`` operator nodes over relations of ``schema``."""

    def leaf():
        r = rng.random()
        if r < 0.75 or not schema:
            name = rng.choice(sorted(schema))
            return A.RelationRef(name), schema[name]
        if r < 0.9:
            return A.ChainConst(rng.randint(0, chain_max)), 1
        return A.Singleton((rng.randrange(3),)), 1

    def build(k):
        if k == 0:
            return leaf()
        kinds = ["select", "project", "union"]
        if k >= 1 and lexprod:
            kinds.append("lexprod")
        if k >= 1 and dirprod:
            kinds.append("dirprod")
        kind = rng.choice(kinds)
        if kind in ("select", "project"):
            q, a = build(k - 1)
            if a == 0:
                return q, a
            if kind == "select":
                return A.Select(random_predicate(rng, a), q), a
            width_ = rng.randint(1, min(a, 3))
            return A.Project(tuple(rng.randint(1, a) for _ in range(width_)), q), width_
        split = rng.randint(0, k - 1)
        (q1, a1), (q2, a2) = build(split), build(k - 1 - split)
        if kind == "union":
            if a1 != a2:
                target = min(a1, a2)
                if target == 0:
                    return q1, a1
                q1 = A.Project(tuple(range(1, target + 1)), q1) if a1 != target else q1
                q2 = A.Project(tuple(range(1, target + 1)), q2) if a2 != target else q2
                a1 = target
            return A.Union(q1, q2), a1
        if a1 + a2 > max_arity:
            return (A.Union(q1, q2), a1) if a1 == a2 else (q1, a1)
        node = A.ProdLex if kind == "lexprod" else A.ProdDir
        return node(q1, q2), a1 + a2

    return build(ops)[0]


# independent oracles ---------------------------------------------------------------------


def bag_eval(q, bags: dict) -> Counter:
    """Bag-semantics evaluation over plain multisets, ignoring order entirely."""
    if isinstance(q, A.RelationRef):
        return Counter(bags[q.name])
    if isinstance(q, A.Singleton):
        return Counter({tuple(q.values): 1})
    if isinstance(q, A.ChainConst):
        return Counter({(i,): 1 for i in range(1, q.n + 1)})
    if isinstance(q, A.Select):
        return Counter({t: c for t, c in bag_eval(q.q, bags).items() if A.eval_pred(q.pred, t)})
    if isinstance(q, A.Project):
        out = Counter()
        for t, c in bag_eval(q.q, bags).items():
            out[tuple(t[i - 1] for i in q.attrs)] += c
        return out
    if isinstance(q, (A.Union, A.Concat)):
        return bag_eval(q.q1, bags) + bag_eval(q.q2, bags)
    if isinstance(q, (A.ProdDir, A.ProdLex)):
        out = Counter()
        for t1, c1 in bag_eval(q.q1, bags).items():
            for t2, c2 in bag_eval(q.q2, bags).items():
                out[t1 + t2] += c1 * c2
        return out
    raise TypeError(f"bag evaluation does not cover {type(q).__name__}")


def max_antichain_bruteforce(r: PoRelation) -> int:
    n = len(r)
    best = 0
    for mask in range(1 << n):
        c = mask.bit_count()
        if c > best and all(r.succ[i] & mask == 0 for i in bits(mask)):
            best = c
    return best


def _set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1 :]
        yield [[first]] + part


def min_ia_partition_bruteforce(r: PoRelation) -> int:
    from .order import is_ia

    best = len(r)
    for part in _set_partitions(list(range(len(r)))):
        if len(part) < best and all(is_ia(r, sum(1 << i for i in cls)) for cls in part):
            best = len(part)
    return best


def realized_positions(r: PoRelation, i: int) -> set:
    from .core import linear_extensions

    return {ext.index(i) + 1 for ext in linear_extensions(r)}


def world_prefixes(r: PoRelation, k: int) -> set:
    from .core import possible_worlds

    return {w[:k] for w in possible_worlds(r)}
