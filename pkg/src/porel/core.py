"""Po-relations: bags of tuples carrying a strict partial order.

Identifiers are the integers ``0..n-1``; ``names`` optionally keeps the
external identifiers a relation was loaded with.  The order is stored as its
transitive closure, one bitmask per element (``succ[i]`` has bit ``j`` set iff
``i < j``), which gives O(1) comparability queries and cheap ideal checks.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Sequence

DEFAULT_WORLD_LIMIT = 10**6
DEFAULT_NODE_BUDGET = 10**7

Tuple = tuple  # a tuple value: a Python tuple of ints (naturals) and strs


class BudgetExceeded(RuntimeError):
    """An exhaustive search hit its configured budget.

    ``partial`` holds whatever was collected before the cut-off.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class InvalidRelation(ValueError):
    pass


def env_budgets() -> tuple[int, int]:
    """World and node budgets, overridable through ``PO_ENGINE_BUDGET``.

    The variable holds either one integer (used for both) or ``worlds,nodes``.
    """
    raw = os.environ.get("PO_ENGINE_BUDGET")
    if not raw:
        return DEFAULT_WORLD_LIMIT, DEFAULT_NODE_BUDGET
    parts = [int(p) for p in raw.split(",")]
    if len(parts) == 1:
        return parts[0], parts[0]
    return parts[0], parts[1]


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def is_domain_value(v) -> bool:
    if isinstance(v, bool):
        return False
    return (isinstance(v, int) and v >= 0) or isinstance(v, str)


def _close(n: int, pairs: Iterable[tuple[int, int]]) -> list[int]:
    succ = [0] * n
    for a, b in pairs:
        succ[a] |= 1 << b
    # Warshall over bitsets
    for k in range(n):
        kbit = 1 << k
        row = succ[k]
        for i in range(n):
            if succ[i] & kbit:
                succ[i] |= row
    return succ


@dataclass(frozen=True, eq=False)
class PoRelation:
    labels: tuple
    succ: tuple
    arity: int
    names: tuple | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # construction ---------------------------------------------------------

    @classmethod
    def build(
        cls,
        labels: Sequence[Sequence],
        pairs: Iterable[tuple[int, int]] = (),
        arity: int | None = None,
        names: Sequence[Hashable] | None = None,
        check: bool = True,
    ) -> "PoRelation":
        """Close ``pairs`` transitively; raise on a cycle unless ``check`` is off."""
        labels = tuple(tuple(t) for t in labels)
        if arity is None:
            arity = len(labels[0]) if labels else 0
        n = len(labels)
        pairs = list(pairs)
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise InvalidRelation(f"order pair ({a}, {b}) references an unknown identifier")
        rel = cls(labels, tuple(_close(n, pairs)), arity, tuple(names) if names is not None else None)
        if check:
            problems = validate(rel)
            if problems:
                raise InvalidRelation("; ".join(problems))
        return rel

    @classmethod
    def chain(cls, labels: Sequence[Sequence], arity: int | None = None) -> "PoRelation":
        return cls.build(labels, [(i, i + 1) for i in range(len(labels) - 1)], arity)

    @classmethod
    def unordered(cls, labels: Sequence[Sequence], arity: int | None = None) -> "PoRelation":
        return cls.build(labels, (), arity)

    @classmethod
    def empty(cls, arity: int) -> "PoRelation":
        return cls((), (), arity)

    @classmethod
    def _trusted(cls, labels, succ, arity, names=None) -> "PoRelation":
        # for operators whose output order is closed by construction
        return cls(tuple(labels), tuple(succ), arity, tuple(names) if names is not None else None)

    # basic queries --------------------------------------------------------

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1

    def less(self, a: int, b: int) -> bool:
        return bool(self.succ[a] >> b & 1)

    def comparable(self, a: int, b: int) -> bool:
        return self.less(a, b) or self.less(b, a)

    @property
    def pred(self) -> tuple:
        """Ancestor bitmask per element."""
        p = self._cache.get("pred")
        if p is None:
            n = len(self.labels)
            lst = [0] * n
            for i, row in enumerate(self.succ):
                for j in bits(row):
                    lst[j] |= 1 << i
            p = self._cache["pred"] = tuple(lst)
        return p

    def ancestors(self, i: int) -> int:
        return self.pred[i]

    def descendants(self, i: int) -> int:
        return self.succ[i]

    def order_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, row in enumerate(self.succ) for j in bits(row)]

    def cover_edges(self) -> list[tuple[int, int]]:
        """Hasse diagram edges: pairs not implied by transitivity."""
        c = self._cache.get("cover")
        if c is None:
            c = []
            for i, row in enumerate(self.succ):
                implied = 0
                for j in bits(row):
                    implied |= self.succ[j]
                c.extend((i, j) for j in bits(row & ~implied))
            self._cache["cover"] = c
        return list(c)

    def name_of(self, i: int):
        return self.names[i] if self.names is not None else i

    def is_total(self) -> bool:
        n = len(self)
        return all(self.comparable(i, j) for i in range(n) for j in range(i + 1, n))

    def restrict(self, keep: Sequence[int]) -> "PoRelation":
        """Sub-po-relation on ``keep`` (in that order), order restricted."""
        keep = list(keep)
        index = {old: new for new, old in enumerate(keep)}
        succ = []
        for old in keep:
            row = 0
            for j in bits(self.succ[old]):
                if j in index:
                    row |= 1 << index[j]
            succ.append(row)
        names = [self.name_of(i) for i in keep] if self.names is not None else None
        return PoRelation._trusted([self.labels[i] for i in keep], succ, self.arity, names)

    def with_labels(self, labels: Sequence[tuple], arity: int) -> "PoRelation":
        return PoRelation._trusted(labels, self.succ, arity, self.names)

    def __repr__(self) -> str:
        return f"PoRelation(n={len(self)}, arity={self.arity}, cover={self.cover_edges()}, labels={list(self.labels)})"


@dataclass(frozen=True)
class ListRelation:
    rows: tuple
    arity: int = 0

    @classmethod
    def of(cls, rows: Iterable[Sequence], arity: int | None = None) -> "ListRelation":
        rows = tuple(tuple(r) for r in rows)
        if arity is None:
            arity = len(rows[0]) if rows else 0
        if any(len(r) != arity for r in rows):
            raise ValueError("rows of a list relation must share one arity")
        return cls(rows, arity)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


@dataclass
class PoDatabase:
    relations: dict = field(default_factory=dict)
    attributes: dict = field(default_factory=dict)

    @property
    def schema(self) -> dict:
        return {name: r.arity for name, r in self.relations.items()}

    def __getitem__(self, name: str) -> PoRelation:
        return self.relations[name]


# validation ---------------------------------------------------------------


def validate(r: PoRelation) -> list[str]:
    problems = []
    n = len(r.labels)
    if len(r.succ) != n:
        problems.append(f"order has {len(r.succ)} rows for {n} identifiers")
        return problems
    for i, t in enumerate(r.labels):
        if len(t) != r.arity:
            problems.append(f"identifier {r.name_of(i)} has arity {len(t)}, expected {r.arity}")
        for v in t:
            if not is_domain_value(v):
                problems.append(f"identifier {r.name_of(i)} carries non-domain value {v!r}")
    for i in range(n):
        if r.succ[i] >> i & 1:
            problems.append(f"reflexivity violation: {r.name_of(i)} < {r.name_of(i)} after closure")
    for i in range(n):
        for j in range(i + 1, n):
            if r.less(i, j) and r.less(j, i):
                problems.append(f"antisymmetry violation: {r.name_of(i)} and {r.name_of(j)} precede each other")
    return problems


def underlying_bag(r: PoRelation) -> Counter:
    return Counter(r.labels)


# possible worlds ------------------------------------------------------------


def linear_extensions(r: PoRelation) -> Iterator[tuple[int, ...]]:
    """All linear extensions as identifier sequences, ascending identifier first."""
    n = len(r)
    pred = r.pred
    order: list[int] = []

    def rec(used: int):
        if len(order) == n:
            yield tuple(order)
            return
        for i in range(n):
            if not used >> i & 1 and pred[i] & ~used == 0:
                order.append(i)
                yield from rec(used | 1 << i)
                order.pop()

    yield from rec(0)


def possible_worlds(r: PoRelation, limit: int | None = DEFAULT_WORLD_LIMIT) -> set[tuple]:
    """Distinct value sequences over all linear extensions.

    Raises :class:`BudgetExceeded` (with the worlds found so far) once more than
    ``limit`` distinct worlds exist.
    """
    n = len(r)
    pred = r.pred
    labels = r.labels
    worlds: set[tuple] = set()
    seen: set[tuple[int, tuple]] = set()
    prefix: list = []
    has_dups = len(set(labels)) < n

    def rec(used: int):
        if len(prefix) == n:
            worlds.add(tuple(prefix))
            if limit is not None and len(worlds) > limit:
                raise BudgetExceeded(f"more than {limit} possible worlds", partial=worlds)
            return
        if has_dups:
            key = (used, tuple(prefix))
            if key in seen:
                return
            seen.add(key)
        for i in range(n):
            if not used >> i & 1 and pred[i] & ~used == 0:
                prefix.append(labels[i])
                rec(used | 1 << i)
                prefix.pop()

    rec(0)
    return worlds


def world_of(r: PoRelation, extension: Sequence[int]) -> ListRelation:
    return ListRelation(tuple(r.labels[i] for i in extension), r.arity)


def some_linear_extension(r: PoRelation) -> list[int]:
    """Deterministic topological sort (smallest available identifier first)."""
    n = len(r)
    pred = r.pred
    used = 0
    out = []
    for _ in range(n):
        for i in range(n):
            if not used >> i & 1 and pred[i] & ~used == 0:
                out.append(i)
                used |= 1 << i
                break
    return out


def is_linear_extension(r: PoRelation, seq: Sequence[int]) -> bool:
    if sorted(seq) != list(range(len(r))):
        return False
    used = 0
    for i in seq:
        if r.pred[i] & ~used:
            return False
        used |= 1 << i
    return True


def realize_world(r: PoRelation, rows: Sequence[tuple], node_budget: int = DEFAULT_NODE_BUDGET) -> list[int] | None:
    """A linear extension of ``r`` whose labels spell ``rows``, or None.

    Backtracks over minimal identifiers carrying the next value, memoizing
    failed ideals (the prefix length is the ideal's size, so failure depends on
    the ideal alone).
    """
    n = len(r)
    rows = [tuple(x) for x in rows]
    if len(rows) != n or Counter(rows) != Counter(r.labels):
        return None
    pred = r.pred
    labels = r.labels
    failed: set[int] = set()
    order: list[int] = []
    nodes = 0

    def rec(used: int) -> bool:
        nonlocal nodes
        pos = len(order)
        if pos == n:
            return True
        if used in failed:
            return False
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded(f"possibility search exceeded {node_budget} nodes")
        want = rows[pos]
        for i in range(n):
            if not used >> i & 1 and labels[i] == want and pred[i] & ~used == 0:
                order.append(i)
                if rec(used | 1 << i):
                    return True
                order.pop()
        failed.add(used)
        return False

    return list(order) if rec(0) else None


def is_possible_world_oracle(r: PoRelation, l, node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    rows = l.rows if isinstance(l, ListRelation) else l
    return realize_world(r, rows, node_budget) is not None


def semantically_equal(r1: PoRelation, r2: PoRelation, limit: int | None = DEFAULT_WORLD_LIMIT) -> bool:
    if r1.arity != r2.arity or underlying_bag(r1) != underlying_bag(r2):
        return False
    return possible_worlds(r1, limit) == possible_worlds(r2, limit)
