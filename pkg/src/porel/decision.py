"""POSS and CERT: which candidate results are possible, or certain, for a query on a po-database.

:func:`poss` and :func:`cert` route each instance to the cheapest exact
procedure that applies and fall back to budgeted exhaustive search.  The
routing is conservative: an instance that fits no tractable pattern is still
answered exactly when the search stays within budget.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field

from . import algebra as A
from .accumulation import (
    FW_BOT,
    FW_EPS,
    FW_TOP,
    Accumulator,
    CapabilityError,
    _ia_layout,
    _chain_steps,
    accum_dp_mixed,
    accum_dp_width,
    accum_list,
    unsafe_swap,
)
from .core import (
    BudgetExceeded,
    ListRelation,
    PoDatabase,
    PoRelation,
    bits,
    env_budgets,
    possible_worlds,
    realize_world,
    some_linear_extension,
)
from .dedup import dup_elim, poss_dupelim_relation
from .order import ia_partition, ia_width, index_interval, min_chain_partition, possible_ranks, width


class MalformedCandidate(ValueError):
    pass


@dataclass(frozen=True)
class DecisionConfig:
    max_width: int = 6
    max_ia_classes: int = 5
    max_topk: int = 4
    world_limit: int = field(default_factory=lambda: env_budgets()[0])
    node_budget: int = field(default_factory=lambda: env_budgets()[1])

    def __post_init__(self):
        for name in ("max_width", "max_ia_classes", "max_topk", "world_limit", "node_budget"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")


@dataclass(frozen=True)
class Answer:
    verdict: bool
    strategy: str
    witness: object = None  # ListRelation: realizing world (POSS) or distinguishing world (CERT)
    exact: bool = True

    def __bool__(self) -> bool:
        return self.verdict


# shared helpers ------------------------------------------------------------------------


def parse_rows(candidate, arity: int | None = None) -> tuple:
    if isinstance(candidate, ListRelation):
        rows = candidate.rows
    else:
        if not isinstance(candidate, (list, tuple)):
            raise MalformedCandidate("a list candidate must be a sequence of rows")
        rows = tuple(tuple(r) if isinstance(r, (list, tuple)) else (r,) for r in candidate)
    if arity is not None:
        for r in rows:
            if len(r) != arity:
                raise MalformedCandidate(f"candidate row {list(r)} does not have arity {arity}")
    return rows


def _bag_matches(r: PoRelation, rows) -> bool:
    return len(rows) == len(r) and Counter(rows) == Counter(r.labels)


def _world(r: PoRelation, ext) -> ListRelation:
    return ListRelation(tuple(r.labels[i] for i in ext), r.arity)


def place(r: PoRelation, fixed: dict) -> list[int]:
    """A linear extension putting each identifier of ``fixed`` at its 1-based position.

    The fixed identifiers must be pairwise incomparable and every position must
    lie in their joint rank interval: the union of their ancestors goes first,
    the union of their descendants last, and the rest is interleaved.
    """
    anc = desc = 0
    fmask = 0
    for x in fixed:
        anc |= r.pred[x]
        desc |= r.succ[x]
        fmask |= 1 << x
    rest = r.full_mask & ~anc & ~desc & ~fmask

    def topo(mask):
        sub = sorted(bits(mask))
        return [sub[i] for i in some_linear_extension(r.restrict(sub))]

    head, middle, tail = topo(anc), topo(rest), topo(desc)
    at = {p: x for x, p in fixed.items()}
    out = list(head)
    it = iter(middle)
    for pos in range(len(head) + 1, len(r) - len(tail) + 1):
        out.append(at[pos] if pos in at else next(it))
    return out + tail


def _complete(r: PoRelation, prefix) -> list[int]:
    """Extend a valid linear-extension prefix to a full one."""
    used = sum(1 << i for i in prefix)
    out = list(prefix)
    while len(out) < len(r):
        for i in range(len(r)):
            if not used >> i & 1 and r.pred[i] & ~used == 0:
                out.append(i)
                used |= 1 << i
                break
    return out


# possibility on bounded width --------------------------------------------------------------


def poss_width_witness(r: PoRelation, rows) -> list[int] | None:
    """Linear extension realizing ``rows``, by dynamic programming over chain-position vectors."""
    rows = [tuple(x) for x in rows]
    if not _bag_matches(r, rows):
        return None
    chains = min_chain_partition(r).chains
    start = tuple(0 for _ in chains)
    level = {start: 0}  # vector -> ideal mask
    back = [{}]
    for pos in range(len(r)):
        nxt: dict = {}
        step_back = {}
        for vec, mask in level.items():
            for c, x in _chain_steps(r, chains, vec, mask):
                if r.labels[x] != rows[pos]:
                    continue
                nv = vec[:c] + (vec[c] + 1,) + vec[c + 1 :]
                if nv not in nxt:
                    nxt[nv] = mask | 1 << x
                    step_back[nv] = (vec, x)
        if not nxt:
            return None
        level = nxt
        back.append(step_back)
    vec = tuple(len(c) for c in chains)
    seq = []
    for pos in range(len(r), 0, -1):
        vec, x = back[pos][vec]
        seq.append(x)
    return seq[::-1]


def poss_bounded_width_dp(r: PoRelation, l) -> bool:
    return poss_width_witness(r, parse_rows(l)) is not None


# possibility on a union of a bounded-width and a bounded-ia-width relation -------------------


def poss_mixed_witness(rw: PoRelation, ria: PoRelation, rows) -> list[int] | None:
    """Linear extension of ``rw ∪ ria`` realizing ``rows`` (``ria`` identifiers offset by ``|rw|``).

    For every finishing order of the indistinguishable classes of ``ria``, the
    elements matched to ``ria`` are picked greedily from the open class that
    finishes first; the ``rw`` side is explored over chain-position vectors.
    """
    rows = [tuple(x) for x in rows]
    n = len(rw) + len(ria)
    if len(rows) != n or Counter(rows) != Counter(rw.labels + ria.labels):
        return None
    chains = min_chain_partition(rw).chains
    lay = _ia_layout(ria, lambda i: ria.labels[i])
    k = len(lay.classes)
    group_of = [{val: g for g, (val, _) in enumerate(groups)} for groups in lay.groups]
    off = len(rw)
    vec0 = tuple(0 for _ in chains)
    used0 = tuple(tuple(0 for _ in g) for g in lay.groups)
    goal_vec = tuple(len(c) for c in chains)

    for pi in itertools.permutations(range(k)):
        masks = {vec0: 0}
        level = {(vec0, used0, 0)}
        back = [{}]
        for pos in range(n):
            want = rows[pos]
            step_back: dict = {}
            for state in level:
                vec, used, fin = state
                mask = masks[vec]
                for c, x in _chain_steps(rw, chains, vec, mask):
                    if rw.labels[x] != want:
                        continue
                    nv = vec[:c] + (vec[c] + 1,) + vec[c + 1 :]
                    masks.setdefault(nv, mask | 1 << x)
                    step_back.setdefault((nv, used, fin), (state, x))
                exhausted = 0
                for c, u in enumerate(used):
                    if sum(u) == lay.sizes[c]:
                        exhausted |= 1 << c
                for c in pi:
                    if exhausted >> c & 1 or lay.below[c] & ~exhausted:
                        continue
                    g = group_of[c].get(want)
                    if g is None or used[c][g] == len(lay.groups[c][g][1]):
                        continue
                    u = used[c]
                    nu_c = u[:g] + (u[g] + 1,) + u[g + 1 :]
                    nfin = fin
                    if sum(nu_c) == lay.sizes[c]:
                        if pi[fin] != c:
                            break
                        nfin = fin + 1
                    nu = used[:c] + (nu_c,) + used[c + 1 :]
                    step_back.setdefault((vec, nu, nfin), (state, off + lay.groups[c][g][1][u[g]]))
                    break
            if not step_back:
                break
            level = set(step_back)
            back.append(step_back)
        else:
            finals = [s for s in level if s[0] == goal_vec and s[2] == k]
            if finals:
                state = finals[0]
                seq = []
                for pos in range(n, 0, -1):
                    state, x = back[pos][state]
                    seq.append(x)
                return seq[::-1]
    return None


def poss_mixed(rw: PoRelation, ria: PoRelation, l) -> bool:
    return poss_mixed_witness(rw, ria, parse_rows(l)) is not None


# certainty ------------------------------------------------------------------------------


def _distinguishing_pair(r: PoRelation):
    for i in range(len(r)):
        for j in range(i + 1, len(r)):
            if not r.comparable(i, j) and r.labels[i] != r.labels[j]:
                return i, j
    return None


def cert_posra_counter(r: PoRelation, rows) -> ListRelation | None:
    """None if ``rows`` is the only possible world, else a different possible world."""
    rows = tuple(tuple(x) for x in rows)
    ext = some_linear_extension(r)
    w = _world(r, ext)
    if w.rows != rows:
        return w
    pair = _distinguishing_pair(r)
    if pair is None:
        return None
    i, j = pair
    lo = possible_ranks(r, i, j).lo  # any consecutive ranks in the joint interval will do
    for fixed in ({i: lo, j: lo + 1}, {j: lo, i: lo + 1}):
        w = _world(r, place(r, fixed))
        if w.rows != rows:
            return w
    raise AssertionError("swapping distinct incomparable values must change the world")


def cert_posra(r: PoRelation, l) -> bool:
    """Certain iff every incomparable pair carries equal values and one world equals ``l``."""
    return cert_posra_counter(r, parse_rows(l)) is None


def cert_safe_swaps_counter(r: PoRelation, acc: Accumulator, v):
    """None if ``v`` is the certain result, else a world accumulating to something else."""
    if not acc.monoid.cancellative:
        raise CapabilityError(f"accumulator {acc.spec()} is not declared cancellative")
    w = _world(r, some_linear_extension(r))
    if accum_list(w.rows, acc) != v:
        return w
    bad = unsafe_swap(r, acc)
    if bad is None:
        return None
    i, j, p = bad
    for fixed in ({i: p, j: p + 1}, {j: p, i: p + 1}):
        w = _world(r, place(r, fixed))
        if accum_list(w.rows, acc) != v:
            return w
    raise AssertionError("an unsafe swap in a cancellative monoid must change the result")


def cert_safe_swaps(r: PoRelation, acc: Accumulator, v) -> bool:
    return cert_safe_swaps_counter(r, acc, v) is None


# position-based specializations ---------------------------------------------------------------


def _placement_witness(r: PoRelation, i: int, k: int) -> ListRelation:
    return _world(r, place(r, {i: k}))


def poss_cert_select_at_k(r: PoRelation, t, k: int) -> tuple[bool, bool]:
    """(possible, certain) that position ``k`` carries value ``t``."""
    t = tuple(t)
    if not 1 <= k <= len(r):
        raise ValueError(f"position {k} outside 1..{len(r)}")
    poss = any(r.labels[i] == t and k in index_interval(r, i) for i in range(len(r)))
    cert = not any(r.labels[i] != t and k in index_interval(r, i) for i in range(len(r)))
    return poss, cert


def _valid_prefixes(r: PoRelation, m: int):
    prefix: list[int] = []

    def rec(used):
        if len(prefix) == m:
            yield list(prefix)
            return
        for i in range(len(r)):
            if not used >> i & 1 and r.pred[i] & ~used == 0:
                prefix.append(i)
                yield from rec(used | 1 << i)
                prefix.pop()

    yield from rec(0)


def top_k_search(r: PoRelation, rows, k: int):
    """(possible witness prefix or None, differing prefix or None) for the top-``k`` result ``rows``."""
    rows = tuple(tuple(x) for x in rows)
    m = min(k, len(r))
    hit = miss = None
    for pre in _valid_prefixes(r, m):
        labels = tuple(r.labels[i] for i in pre)
        if labels == rows:
            hit = hit or pre
        else:
            miss = miss or pre
        if hit and miss:
            break
    return hit, miss


def poss_cert_top_k(r: PoRelation, l, k: int, cap: int = DecisionConfig.max_topk) -> tuple[bool, bool]:
    if k > cap:
        raise ValueError(f"k={k} is above the configured cap {cap}")
    rows = parse_rows(l)
    if len(rows) != min(k, len(r)):
        return False, False
    hit, miss = top_k_search(r, rows, k)
    return hit is not None, miss is None


def _first_before(r: PoRelation, t1: tuple, t2: tuple):
    """An identifier of value ``t1`` that can precede every ``t2``, or None."""
    t2_mask = sum(1 << i for i, t in enumerate(r.labels) if t == t2)
    for i, t in enumerate(r.labels):
        if t == t1 and r.pred[i] & t2_mask == 0:
            return i
    return None


def poss_cert_tuple_compare(r: PoRelation, t1, t2) -> tuple[bool, bool]:
    """(possible, certain) that the first ``t1`` precedes every ``t2``."""
    t1, t2 = tuple(t1), tuple(t2)
    if t1 == t2:
        raise ValueError("tuple comparison needs two distinct tuples")
    for t in (t1, t2):
        if t not in r.labels:
            raise ValueError(f"value {list(t)} does not occur")
    return _first_before(r, t1, t2) is not None, _first_before(r, t2, t1) is None


def _before_witness(r: PoRelation, first: int, other: tuple) -> ListRelation:
    extra = [(first, j) for j, t in enumerate(r.labels) if t == other]
    forced = PoRelation.build(r.labels, r.order_pairs() + extra, r.arity, check=False)
    return _world(r, some_linear_extension(forced))


# group-by ---------------------------------------------------------------------------------


def _groups(r: PoRelation, attrs) -> dict:
    out: dict = {}
    for i, t in enumerate(r.labels):
        out.setdefault(tuple(t[a - 1] for a in attrs), []).append(i)
    return out


def group_by_list(rows, acc: Accumulator, attrs) -> frozenset:
    groups: dict = {}
    for t in rows:
        groups.setdefault(tuple(t[a - 1] for a in attrs), []).append(t)
    return frozenset((g, accum_list(ts, acc)) for g, ts in groups.items())


def eval_accum_group_by(q: A.AccumGroupBy, db: PoDatabase, limit: int | None = None) -> set:
    """All group-by results (one frozenset of ``(group, value)`` pairs per distinct outcome)."""
    inner = A.eval_query(q.q, db)
    if isinstance(inner, A.CompleteFailure):
        return set()
    return {group_by_list(w, q.acc, q.attrs) for w in possible_worlds(inner, limit)}


def parse_group_candidate(candidate, acc: Accumulator, nattrs: int) -> frozenset:
    if isinstance(candidate, frozenset):
        return candidate
    out = []
    for row in candidate:
        if not isinstance(row, (list, tuple)) or len(row) != nattrs + 1:
            raise MalformedCandidate(f"group-by rows need {nattrs} group values and one result")
        out.append((tuple(row[:nattrs]), acc.parse_candidate(row[nattrs])))
    result = frozenset(out)
    if len(result) != len(out):
        raise MalformedCandidate("group-by candidate lists a group twice")
    return result


def cert_group_by(q: A.AccumGroupBy, db: PoDatabase, candidate, cfg: DecisionConfig | None = None) -> Answer:
    """Certain iff each group's restriction certainly accumulates to the candidate's value."""
    cfg = cfg or DecisionConfig()
    want = parse_group_candidate(candidate, q.acc, len(q.attrs))
    inner = A.eval_query(q.q, db)
    if isinstance(inner, A.CompleteFailure):
        return Answer(False, "complete-failure")
    groups = _groups(inner, q.attrs)
    wanted = dict(want)
    if set(wanted) != set(groups):
        w = _world(inner, some_linear_extension(inner))
        return Answer(False, "group-decomposition", ListRelation(w.rows, inner.arity))
    strategies, exact = set(), True
    for g, ids in sorted(groups.items(), key=repr):
        sub = inner.restrict(ids)
        ans = _cert_accum_relation(sub, q.acc, wanted[g], cfg, query=None)
        strategies.add(ans.strategy)
        exact &= ans.exact
        if not ans.verdict:
            if not ans.exact:
                return Answer(False, "group-decomposition/" + ans.strategy, exact=False)
            # put the failing group first; the others keep any order
            sub_ext = [ids[i] for i in _ids_for(sub, ans.witness)]
            w = _world(inner, _merge_first(inner, sub_ext))
            return Answer(False, "group-decomposition/" + ans.strategy, w)
    return Answer(True, "group-decomposition/" + "+".join(sorted(strategies)), exact=exact)


def _ids_for(r: PoRelation, world: ListRelation) -> list[int]:
    ext = realize_world(r, world.rows)
    assert ext is not None
    return ext


def _merge_first(r: PoRelation, group_order: list[int]) -> list[int]:
    """Linear extension of ``r`` whose restriction to a group follows ``group_order``."""
    pairs = r.order_pairs() + list(zip(group_order, group_order[1:]))
    return some_linear_extension(PoRelation.build(r.labels, pairs, r.arity, check=False))


# mixed-fragment detection ------------------------------------------------------------------


def split_mixed(q, db: PoDatabase, cfg: DecisionConfig):
    """``(rw, ria)`` if ``q`` rewrites to branches each of small width or small ia-width."""
    branches = A.rewrite_product_free(q)
    if branches is None:
        return None
    rw_parts, ria_parts = [], []
    for br in branches:
        rb = A.eval_query(br.as_query(), db)
        if width(rb) <= cfg.max_width:
            rw_parts.append(rb)
        elif ia_width(rb) <= cfg.max_ia_classes:
            ria_parts.append(rb)
        else:
            return None
    arity = A.check_query(q, db.schema)
    rw = ria = PoRelation.empty(arity)
    for p in rw_parts:
        rw = A.op_union(rw, p)
    for p in ria_parts:
        ria = A.op_union(ria, p)
    if len(ia_partition(ria)) > cfg.max_ia_classes:
        return None
    return rw, ria


# dispatch: lists ------------------------------------------------------------------------------


def poss_relation(r, rows, cfg: DecisionConfig | None = None, query=None, db=None) -> Answer:
    """POSS for a materialized po-relation; ``query``/``db`` enable the product-free route."""
    cfg = cfg or DecisionConfig()
    if isinstance(r, A.CompleteFailure):
        return Answer(False, "complete-failure")
    rows = parse_rows(rows, r.arity)
    if not _bag_matches(r, rows):
        return Answer(False, "bag-check")
    witness = ListRelation(rows, r.arity)
    if width(r) <= cfg.max_width:
        ok = poss_width_witness(r, rows) is not None
        return Answer(ok, "width-dp", witness if ok else None)
    if query is not None and db is not None:
        split = split_mixed(query, db, cfg)
        if split is not None:
            ok = poss_mixed_witness(*split, rows) is not None
            return Answer(ok, "mixed-dp", witness if ok else None)
    try:
        ok = realize_world(r, rows, cfg.node_budget) is not None
    except BudgetExceeded:
        return Answer(False, "brute-force", exact=False)
    return Answer(ok, "brute-force", witness if ok else None)


def cert_relation(r, rows) -> Answer:
    if isinstance(r, A.CompleteFailure):
        return Answer(False, "complete-failure")
    rows = parse_rows(rows, r.arity)
    counter = cert_posra_counter(r, rows)
    return Answer(counter is None, "certainty-pairs", counter)


# dispatch: accumulation -----------------------------------------------------------------------


def _finite_results(r: PoRelation, acc: Accumulator, cfg: DecisionConfig, query, db):
    """(results dict value -> world, strategy) via a finite-monoid DP, or None if none applies."""
    if not acc.monoid.finite:
        return None
    if width(r) <= cfg.max_width:
        return {v: _world(r, ext) for v, ext in accum_dp_width(r, acc).items()}, "finite-dp-width"
    if acc.position_invariant and query is not None and db is not None:
        split = split_mixed(query, db, cfg)
        if split is not None:
            rw, ria = split
            u = A.op_union(rw, ria)
            return {v: _world(u, ext) for v, ext in accum_dp_mixed(rw, ria, acc).items()}, "finite-dp-mixed"
    return None


def _brute_results(r: PoRelation, acc: Accumulator, cfg: DecisionConfig):
    """(results dict, exact) from enumerating worlds; partial on budget exhaustion."""
    try:
        worlds = possible_worlds(r, cfg.world_limit)
        exact = True
    except BudgetExceeded as e:
        worlds, exact = e.partial, False
    out: dict = {}
    for w in sorted(worlds, key=repr):
        out.setdefault(accum_list(w, acc), ListRelation(w, r.arity))
    return out, exact


def _poss_accum_relation(r: PoRelation, acc: Accumulator, v, cfg: DecisionConfig, query=None, db=None) -> Answer:
    n = len(r)
    if acc.kind == "concat":
        ans = poss_relation(r, v, cfg, query, db)
        return Answer(ans.verdict, "concat/" + ans.strategy, ans.witness, ans.exact)
    if acc.kind == "selectat":
        k = acc.args[0]
        rows = parse_rows(v, r.arity)
        if k > n:
            return Answer(rows == (), "select-at-k", _world(r, some_linear_extension(r)) if rows == () else None)
        if len(rows) != 1:
            return Answer(False, "select-at-k")
        for i in range(n):
            if r.labels[i] == rows[0] and k in index_interval(r, i):
                return Answer(True, "select-at-k", _placement_witness(r, i, k))
        return Answer(False, "select-at-k")
    if acc.kind == "topk" and acc.args[0] <= cfg.max_topk:
        k = acc.args[0]
        rows = parse_rows(v, r.arity)
        if len(rows) != min(k, n):
            return Answer(False, "top-k")
        hit, _ = top_k_search(r, rows, k)
        return Answer(hit is not None, "top-k", _world(r, _complete(r, hit)) if hit is not None else None)
    if acc.kind == "firstwins":
        return _firstwins(r, acc, v, certain=False)
    if acc.monoid.cancellative and unsafe_swap(r, acc) is None:
        # a single result: any world decides
        w = _world(r, some_linear_extension(r))
        ok = accum_list(w.rows, acc) == v
        return Answer(ok, "safe-swaps", w if ok else None)
    fin = _finite_results(r, acc, cfg, query, db)
    if fin is not None:
        results, strategy = fin
        return Answer(v in results, strategy, results.get(v))
    results, exact = _brute_results(r, acc, cfg)
    if v in results:
        return Answer(True, "brute-force", results[v])
    return Answer(False, "brute-force", exact=exact)


def _cert_accum_relation(r: PoRelation, acc: Accumulator, v, cfg: DecisionConfig, query=None, db=None) -> Answer:
    n = len(r)
    if acc.kind == "concat":
        ans = cert_relation(r, v)
        return Answer(ans.verdict, "concat/" + ans.strategy, ans.witness, ans.exact)
    if acc.kind == "selectat":
        k = acc.args[0]
        rows = parse_rows(v, r.arity)
        if k > n:
            ok = rows == ()
            return Answer(ok, "select-at-k", None if ok else _world(r, some_linear_extension(r)))
        for i in range(n):
            if (len(rows) != 1 or r.labels[i] != rows[0]) and k in index_interval(r, i):
                return Answer(False, "select-at-k", _placement_witness(r, i, k))
        return Answer(True, "select-at-k")
    if acc.kind == "topk" and acc.args[0] <= cfg.max_topk:
        k = acc.args[0]
        rows = parse_rows(v, r.arity)
        _, miss = top_k_search(r, rows, k)
        if len(rows) != min(k, n) and miss is None:
            miss = next(_valid_prefixes(r, min(k, n)))
        return Answer(miss is None, "top-k", _world(r, _complete(r, miss)) if miss is not None else None)
    if acc.kind == "firstwins":
        return _firstwins(r, acc, v, certain=True)
    if acc.monoid.cancellative:
        counter = cert_safe_swaps_counter(r, acc, v)
        return Answer(counter is None, "safe-swaps", counter)
    fin = _finite_results(r, acc, cfg, query, db)
    if fin is not None:
        results, strategy = fin
        other = next((w for val, w in results.items() if val != v), None)
        return Answer(other is None and v in results, strategy, other)
    results, exact = _brute_results(r, acc, cfg)
    other = next((w for val, w in results.items() if val != v), None)
    if other is not None:
        return Answer(False, "brute-force", other)
    return Answer(v in results, "brute-force", exact=exact)


def _firstwins(r: PoRelation, acc: Accumulator, v, certain: bool) -> Answer:
    t1, t2 = acc.args
    has1, has2 = t1 in r.labels, t2 in r.labels
    if not (has1 and has2):
        fixed = FW_TOP if has1 else FW_BOT if has2 else FW_EPS
        w = _world(r, some_linear_extension(r))
        ok = v == fixed
        return Answer(ok, "tuple-compare", (w if ok else None) if not certain else (None if ok else w))
    if v == FW_EPS:
        return Answer(False, "tuple-compare", None if not certain else _world(r, some_linear_extension(r)))
    first, other = (t1, t2) if v == FW_TOP else (t2, t1)
    i = _first_before(r, first, other)
    if not certain:
        return Answer(i is not None, "tuple-compare", _before_witness(r, i, other) if i is not None else None)
    j = _first_before(r, other, first)
    return Answer(j is None, "tuple-compare", _before_witness(r, j, first) if j is not None else None)


# public entry points ----------------------------------------------------------------------------


def _accum_candidate(acc: Accumulator, candidate):
    try:
        return acc.parse_candidate(candidate)
    except ValueError as e:
        raise MalformedCandidate(str(e)) from e


def poss(q, db: PoDatabase, candidate, cfg: DecisionConfig | None = None) -> Answer:
    cfg = cfg or DecisionConfig()
    arity = A.check_query(q, db.schema)
    if isinstance(q, A.AccumGroupBy):
        want = parse_group_candidate(candidate, q.acc, len(q.attrs))
        inner = A.eval_query(q.q, db)
        if isinstance(inner, A.CompleteFailure):
            return Answer(False, "complete-failure")
        try:
            worlds, exact = possible_worlds(inner, cfg.world_limit), True
        except BudgetExceeded as e:
            worlds, exact = e.partial, False
        for w in sorted(worlds, key=repr):
            if group_by_list(w, q.acc, q.attrs) == want:
                return Answer(True, "brute-force", ListRelation(w, inner.arity))
        return Answer(False, "brute-force", exact=exact)
    if isinstance(q, A.Accum):
        v = _accum_candidate(q.acc, candidate)
        inner = A.eval_query(q.q, db)
        if isinstance(inner, A.CompleteFailure):
            return Answer(False, "complete-failure")
        return _poss_accum_relation(inner, q.acc, v, cfg, q.q, db)
    rows = parse_rows(candidate, arity)
    if isinstance(q, A.DupElim):
        inner = A.eval_query(q.q, db)
        if isinstance(inner, A.CompleteFailure):
            return Answer(False, "complete-failure")
        ok = poss_dupelim_relation(inner, rows)
        return Answer(ok, "dupelim-quotient", ListRelation(rows, arity) if ok else None)
    return poss_relation(A.eval_query(q, db), rows, cfg, q, db)


def cert(q, db: PoDatabase, candidate, cfg: DecisionConfig | None = None) -> Answer:
    cfg = cfg or DecisionConfig()
    arity = A.check_query(q, db.schema)
    if isinstance(q, A.AccumGroupBy):
        return cert_group_by(q, db, candidate, cfg)
    if isinstance(q, A.Accum):
        v = _accum_candidate(q.acc, candidate)
        inner = A.eval_query(q.q, db)
        if isinstance(inner, A.CompleteFailure):
            return Answer(False, "complete-failure")
        return _cert_accum_relation(inner, q.acc, v, cfg, q.q, db)
    rows = parse_rows(candidate, arity)
    if isinstance(q, A.DupElim):
        inner = A.eval_query(q.q, db)
        if isinstance(inner, A.CompleteFailure):
            return Answer(False, "complete-failure")
        out = dup_elim(inner)
        if isinstance(out, A.CompleteFailure):
            return Answer(False, "complete-failure")
        counter = cert_posra_counter(out, rows)
        return Answer(counter is None, "dupelim-quotient", counter)
    return cert_relation(A.eval_query(q, db), rows)


def accumulation_results(q, db: PoDatabase, cfg: DecisionConfig | None = None) -> tuple[dict, str, bool]:
    """All results of an accumulation query: (value -> witness world, strategy, exact)."""
    cfg = cfg or DecisionConfig()
    A.check_query(q, db.schema)
    if isinstance(q, A.AccumGroupBy):
        inner = A.eval_query(q.q, db)
        if isinstance(inner, A.CompleteFailure):
            return {}, "complete-failure", True
        try:
            worlds, exact = possible_worlds(inner, cfg.world_limit), True
        except BudgetExceeded as e:
            worlds, exact = e.partial, False
        out: dict = {}
        for w in sorted(worlds, key=repr):
            out.setdefault(group_by_list(w, q.acc, q.attrs), ListRelation(w, inner.arity))
        return out, "brute-force", exact
    if not isinstance(q, A.Accum):
        raise ValueError("expected an accumulation query")
    inner = A.eval_query(q.q, db)
    if isinstance(inner, A.CompleteFailure):
        return {}, "complete-failure", True
    if q.acc.monoid.cancellative and unsafe_swap(inner, q.acc) is None:
        w = _world(inner, some_linear_extension(inner))
        return {accum_list(w.rows, q.acc): w}, "safe-swaps", True
    fin = _finite_results(inner, q.acc, cfg, q.q, db)
    if fin is not None:
        return fin[0], fin[1], True
    results, exact = _brute_results(inner, q.acc, cfg)
    return results, "brute-force", exact
