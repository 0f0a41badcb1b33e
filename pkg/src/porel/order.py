"""Width, chain partitions, ia-partitions, rank intervals and ideals."""

from __future__ import annotations

from dataclasses import dataclass

from . import algebra as A
from .core import PoRelation, bits


class FragmentError(ValueError):
    """The query lies outside the fragment a static bound is stated for."""


@dataclass(frozen=True)
class ChainPartition:
    chains: tuple  # tuple of identifier tuples, each ascending

    def __len__(self) -> int:
        return len(self.chains)


@dataclass(frozen=True)
class IaPartition:
    classes: tuple  # tuple of sorted identifier tuples

    def __len__(self) -> int:
        return len(self.classes)


@dataclass(frozen=True)
class RankInterval:
    lo: int
    hi: int

    def __contains__(self, p: int) -> bool:
        return self.lo <= p <= self.hi


def _max_matching(n: int, succ) -> list[int]:
    """Maximum matching of the comparability bipartite graph (left i -> right j iff i < j).

    Returns ``match_right[j]`` = matched left vertex or -1.  Kuhn's augmenting paths.
    """
    match_right = [-1] * n

    def augment(u: int, seen: list) -> bool:
        for v in bits(succ[u]):
            if seen[v]:
                continue
            seen[v] = True
            if match_right[v] == -1 or augment(match_right[v], seen):
                match_right[v] = u
                return True
        return False

    for u in range(n):
        augment(u, [False] * n)
    return match_right


def min_chain_partition(r: PoRelation) -> ChainPartition:
    cached = r._cache.get("chains")
    if cached is not None:
        return cached
    n = len(r)
    match_right = _max_matching(n, r.succ)
    nxt = [-1] * n
    has_prev = [False] * n
    for v, u in enumerate(match_right):
        if u != -1:
            nxt[u] = v
            has_prev[v] = True
    chains = []
    for start in range(n):
        if has_prev[start]:
            continue
        chain = [start]
        while nxt[chain[-1]] != -1:
            chain.append(nxt[chain[-1]])
        chains.append(tuple(chain))
    out = ChainPartition(tuple(chains))
    r._cache["chains"] = out
    return out


def width(r: PoRelation) -> int:
    return len(min_chain_partition(r))


def is_antichain(r: PoRelation, mask: int) -> bool:
    return all(r.succ[i] & mask == 0 for i in bits(mask))


def is_indistinguishable(r: PoRelation, mask: int) -> bool:
    outside = r.full_mask & ~mask
    members = list(bits(mask))
    if not members:
        return True
    up, down = r.succ[members[0]] & outside, r.pred[members[0]] & outside
    return all(r.succ[i] & outside == up and r.pred[i] & outside == down for i in members[1:])


def is_ia(r: PoRelation, mask: int) -> bool:
    return is_antichain(r, mask) and is_indistinguishable(r, mask)


def ia_partition(r: PoRelation) -> IaPartition:
    """Greedy merging from singletons until no two classes unite into an indistinguishable antichain."""
    cached = r._cache.get("ia")
    if cached is not None:
        return cached
    n = len(r)
    cls = [1 << i for i in range(n)]  # cls[i]: mask of i's class
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(i + 1, n):
                if cls[i] == cls[j]:
                    continue
                merged = cls[i] | cls[j]
                if is_ia(r, merged):
                    for k in bits(merged):
                        cls[k] = merged
                    changed = True
    seen, classes = set(), []
    for i in range(n):
        if cls[i] not in seen:
            seen.add(cls[i])
            classes.append(tuple(bits(cls[i])))
    out = IaPartition(tuple(classes))
    r._cache["ia"] = out
    return out


def ia_width(r: PoRelation) -> int:
    return len(ia_partition(r))


def possible_ranks(r: PoRelation, x: int, y: int) -> RankInterval:
    if x == y or r.comparable(x, y):
        raise ValueError(f"identifiers {x} and {y} must be distinct and incomparable")
    a = (r.pred[x] | r.pred[y]).bit_count()
    d = (r.succ[x] | r.succ[y]).bit_count()
    return RankInterval(a + 1, len(r) - d)


def index_interval(r: PoRelation, i: int) -> RankInterval:
    if not 0 <= i < len(r):
        raise ValueError(f"unknown identifier {i}")
    return RankInterval(r.pred[i].bit_count() + 1, len(r) - r.succ[i].bit_count())


def is_order_ideal(r: PoRelation, s) -> bool:
    mask = s if isinstance(s, int) else sum(1 << i for i in set(s))
    return all(r.pred[i] & ~mask == 0 for i in bits(mask))


# static bounds -------------------------------------------------------------------


def width_bound_lex(q, k: int) -> int:
    """Width bound for results of a query without direct products on width-``k`` inputs."""
    if A.has_dirprod(q):
        raise FragmentError("the width bound only covers queries without direct products")
    return max(k, 2) ** (A.size(q) + 1)


def ia_width_bound_noprod(q, k: int, qmax: int | None = None) -> int:
    """ia-width bound for product-free queries; ``qmax`` defaults to the largest chain constant."""
    if not A.is_product_free(q) or any(isinstance(n, A.DupElim) for n in A.walk(q)):
        raise FragmentError("the ia-width bound only covers product-free queries without dupelim")
    if qmax is None:
        qmax = max((n.n for n in A.walk(q) if isinstance(n, A.ChainConst)), default=0)
    return max(k, qmax, 2) * A.size(q)
