"""Monoids, accumulators, and the procedures computing possible accumulation results."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .core import DEFAULT_WORLD_LIMIT, PoRelation, bits, possible_worlds
from .order import ia_partition, min_chain_partition, possible_ranks


class CapabilityError(ValueError):
    """An accumulator lacks a property (finite, cancellative, ...) a procedure relies on."""


@dataclass(frozen=True, eq=False)
class Monoid:
    name: str
    neutral: Any
    combine: Callable[[Any, Any], Any]
    cancellative: bool = False
    finite: bool = False
    elements: tuple | None = None  # enumeration for finite monoids, when cheap


@dataclass(frozen=True, eq=False)
class Accumulator:
    """An accumulation map ``h(tuple, position)`` into a monoid.

    ``kind`` tells the decision layer which specialised procedure applies
    (``concat``, ``topk``, ``selectat``, ``firstwins``, or ``generic``).
    Equality is by ``name`` and ``args`` so ASTs holding accumulators compare
    structurally.
    """

    name: str
    args: tuple
    h: Callable[[tuple, int], Any]
    monoid: Monoid
    position_invariant: bool = False
    kind: str = "generic"
    min_arity: int = 0
    parse_candidate: Callable[[Any], Any] = field(default=lambda x: x)
    format_result: Callable[[Any], Any] = field(default=lambda x: x)

    def __eq__(self, other) -> bool:
        return isinstance(other, Accumulator) and (self.name, self.args) == (other.name, other.args)

    def __hash__(self) -> int:
        return hash((self.name, self.args))

    def spec(self) -> str:
        """Query-language spelling, e.g. ``sum[2]``."""
        if not self.args:
            return self.name
        return f"{self.name}[{', '.join(_fmt_arg(a) for a in self.args)}]"


def _fmt_arg(a) -> str:
    if isinstance(a, tuple):
        return "(" + ", ".join(_fmt_arg(x) for x in a) + ")"
    if isinstance(a, str):
        return "'" + a.replace("\\", "\\\\").replace("'", "\\'") + "'"
    return str(a)


# folding ---------------------------------------------------------------------


def accum_list(rows: Sequence[tuple], acc: Accumulator, offset: int = 0):
    """``h(t1, 1+offset) + ... + h(tn, n+offset)``; the neutral element on empty input."""
    m = acc.monoid
    out = m.neutral
    for p, t in enumerate(rows, start=1 + offset):
        out = m.combine(out, acc.h(tuple(t), p))
    return out


def accum_results_with_worlds(r: PoRelation, acc: Accumulator, limit: int | None = DEFAULT_WORLD_LIMIT) -> dict:
    """Each possible accumulation result mapped to one world producing it."""
    out: dict = {}
    for w in sorted(possible_worlds(r, limit), key=repr):
        out.setdefault(accum_list(w, acc), w)
    return out


def accum_results_bruteforce(r: PoRelation, acc: Accumulator, limit: int | None = DEFAULT_WORLD_LIMIT) -> set:
    return set(accum_results_with_worlds(r, acc, limit))


# dynamic programs over ideals ------------------------------------------------------


def _require_finite(acc: Accumulator):
    if not acc.monoid.finite:
        raise CapabilityError(f"accumulator {acc.spec()} does not use a finite monoid")


def _chain_steps(r: PoRelation, chains, vec: tuple, mask: int):
    """Chains whose next element may be appended to the ideal ``mask``."""
    for c, chain in enumerate(chains):
        if vec[c] < len(chain):
            x = chain[vec[c]]
            if r.pred[x] & ~mask == 0:
                yield c, x


def accum_dp_width(r: PoRelation, acc: Accumulator) -> dict:
    """All accumulation results over ``r`` with a witnessing identifier sequence each.

    States are chain-position vectors whose prefixes form an ideal; each state
    keeps, per reachable monoid value, a back-pointer to one predecessor.
    """
    _require_finite(acc)
    chains = min_chain_partition(r).chains
    m = acc.monoid
    start = tuple(0 for _ in chains)
    level = {start: {m.neutral: None}}
    masks = {start: 0}
    history = [level]
    for pos in range(1, len(r) + 1):
        nxt: dict = {}
        for vec, vals in level.items():
            mask = masks[vec]
            for c, x in _chain_steps(r, chains, vec, mask):
                nv = vec[:c] + (vec[c] + 1,) + vec[c + 1 :]
                masks.setdefault(nv, mask | 1 << x)
                slot = nxt.setdefault(nv, {})
                step = acc.h(r.labels[x], pos)
                for v in vals:
                    slot.setdefault(m.combine(v, step), (vec, v, x))
        level = nxt
        history.append(level)
    final = level.get(tuple(len(c) for c in chains), {}) if len(r) else level[start]
    out = {}
    for v in final:
        seq, vec, cur = [], tuple(len(c) for c in chains), v
        for lv in range(len(r), 0, -1):
            pvec, pv, x = history[lv][vec][cur]
            seq.append(x)
            vec, cur = pvec, pv
        out[v] = seq[::-1]
    return out


def accum_results_dp_width(r: PoRelation, acc: Accumulator) -> set:
    return set(accum_dp_width(r, acc))


@dataclass
class _IaLayout:
    classes: tuple  # identifier tuples
    groups: list  # per class: list of (monoid element, identifier list)
    below: list  # per class: bitmask of classes that must be exhausted first
    sizes: list


def _ia_layout(r: PoRelation, key) -> _IaLayout:
    part = ia_partition(r)
    cls_of = {}
    for c, members in enumerate(part.classes):
        for i in members:
            cls_of[i] = c
    groups, below, sizes = [], [], []
    for c, members in enumerate(part.classes):
        g: dict = {}
        for i in members:
            g.setdefault(key(i), []).append(i)
        groups.append(list(g.items()))
        mask = 0
        for i in members:
            for j in bits(r.pred[i]):
                mask |= 1 << cls_of[j]
        below.append(mask)
        sizes.append(len(members))
    return _IaLayout(part.classes, groups, below, sizes)


def accum_dp_mixed(rw: PoRelation, ria: PoRelation, acc: Accumulator) -> dict:
    """Accumulation results over ``rw ∪ ria`` with witnesses (identifiers of ``ria`` offset by ``|rw|``).

    ``rw`` is walked chain by chain; ``ria`` is tracked per indistinguishable
    class by how many identifiers of each monoid value were consumed, which is
    sound because ``h`` ignores positions.
    """
    _require_finite(acc)
    if not acc.position_invariant:
        raise CapabilityError(f"accumulator {acc.spec()} is not position-invariant")
    m = acc.monoid
    chains = min_chain_partition(rw).chains
    lay = _ia_layout(ria, lambda i: acc.h(ria.labels[i], 1))
    off = len(rw)
    n = len(rw) + len(ria)
    start = (tuple(0 for _ in chains), tuple(tuple(0 for _ in g) for g in lay.groups))
    masks = {start[0]: 0}
    level = {start: {m.neutral: None}}
    history = [level]
    for pos in range(1, n + 1):
        nxt: dict = {}
        for (vec, used), vals in level.items():
            mask = masks[vec]
            for c, x in _chain_steps(rw, chains, vec, mask):
                nv = vec[:c] + (vec[c] + 1,) + vec[c + 1 :]
                masks.setdefault(nv, mask | 1 << x)
                step = acc.h(rw.labels[x], pos)
                slot = nxt.setdefault((nv, used), {})
                for v in vals:
                    slot.setdefault(m.combine(v, step), ((vec, used), v, x))
            exhausted = 0
            for c, u in enumerate(used):
                if sum(u) == lay.sizes[c]:
                    exhausted |= 1 << c
            for c, u in enumerate(used):
                if exhausted >> c & 1 or lay.below[c] & ~exhausted:
                    continue
                for g, (elem, ids) in enumerate(lay.groups[c]):
                    if u[g] == len(ids):
                        continue
                    nu = used[:c] + (u[:g] + (u[g] + 1,) + u[g + 1 :],) + used[c + 1 :]
                    slot = nxt.setdefault((vec, nu), {})
                    for v in vals:
                        slot.setdefault(m.combine(v, elem), ((vec, used), v, off + ids[u[g]]))
        level = nxt
        history.append(level)
    goal = (tuple(len(c) for c in chains), tuple(tuple(len(ids) for _, ids in g) for g in lay.groups))
    final = level.get(goal, {}) if n else level[start]
    out = {}
    for v in final:
        seq, key, cur = [], goal, v
        for lv in range(n, 0, -1):
            pkey, pv, x = history[lv][key][cur]
            seq.append(x)
            key, cur = pkey, pv
        out[v] = seq[::-1]
    return out


def accum_results_mixed(rw: PoRelation, ria: PoRelation, acc: Accumulator) -> set:
    return set(accum_dp_mixed(rw, ria, acc))


# safe swaps --------------------------------------------------------------------


def unsafe_swap(r: PoRelation, acc: Accumulator):
    """First incomparable pair and rank ``p`` violating the swap condition, or None."""
    m = acc.monoid
    h = acc.h
    n = len(r)
    for i in range(n):
        ti = r.labels[i]
        for j in range(i + 1, n):
            if r.comparable(i, j):
                continue
            tj = r.labels[j]
            if ti == tj:
                continue
            iv = possible_ranks(r, i, j)
            for p in range(iv.lo, iv.hi):
                if m.combine(h(ti, p), h(tj, p + 1)) != m.combine(h(tj, p), h(ti, p + 1)):
                    return i, j, p
    return None


def safe_swaps(r: PoRelation, acc: Accumulator) -> bool:
    return unsafe_swap(r, acc) is None


# spot checks of declared monoid properties ---------------------------------------


def check_monoid_laws(acc: Accumulator, samples: Sequence, trials: int = 200, seed: int = 0) -> list[str]:
    """Sampled checks of neutrality, associativity, cancellativity and position invariance.

    ``samples`` are tuple values fed to ``h`` to produce monoid elements.
    """
    rng = random.Random(seed)
    m = acc.monoid
    elems = [acc.h(tuple(t), p) for t in samples for p in (1, 2, 3)] or [m.neutral]
    problems = []
    for e in elems:
        if m.combine(m.neutral, e) != e or m.combine(e, m.neutral) != e:
            problems.append(f"neutral element fails on {e!r}")
            break
    for _ in range(trials):
        a, b, c = (rng.choice(elems) for _ in range(3))
        if m.combine(m.combine(a, b), c) != m.combine(a, m.combine(b, c)):
            problems.append(f"combine is not associative on {a!r}, {b!r}, {c!r}")
            break
        if m.cancellative and b != c and (m.combine(a, b) == m.combine(a, c) or m.combine(b, a) == m.combine(c, a)):
            problems.append(f"declared cancellative but {a!r} does not cancel")
            break
    if acc.position_invariant:
        for t in samples:
            if len({acc.h(tuple(t), p) for p in (1, 2, 5)}) > 1:
                problems.append(f"declared position-invariant but h varies on {t!r}")
                break
    return problems


# built-in accumulators ------------------------------------------------------------


def _rows(x) -> tuple:
    if not isinstance(x, (list, tuple)):
        raise ValueError("expected a list of rows")
    return tuple(tuple(r) if isinstance(r, (list, tuple)) else (r,) for r in x)


def _rows_out(x) -> list:
    return [list(r) for r in x]


LIST_MONOID = Monoid("list-concat", (), lambda a, b: a + b, cancellative=True)


def concat_accumulator() -> Accumulator:
    """Accumulation into the list of rows: the result is the world itself."""
    return Accumulator(
        "concat", (), lambda t, p: (t,), LIST_MONOID, position_invariant=True, kind="concat",
        parse_candidate=_rows, format_result=_rows_out,
    )


def _int_candidate(x) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ValueError(f"expected an integer candidate, got {x!r}")
    return x


def sum_accumulator(attr: int, weights: Sequence[int] | None = None) -> Accumulator:
    """Integer addition of attribute ``attr``; with ``weights`` the row at position p is scaled by ``weights[p-1]``.

    Positions past the end of the weight table weigh zero.
    """
    weights = tuple(weights) if weights is not None else None

    def value(t):
        v = t[attr - 1]
        if not isinstance(v, int):
            raise ValueError(f"sum[{attr}] needs natural numbers, got {v!r}")
        return v

    if weights is None:
        h = lambda t, p: value(t)  # noqa: E731
    else:
        h = lambda t, p: value(t) * (weights[p - 1] if p <= len(weights) else 0)  # noqa: E731
    args = (attr,) if weights is None else (attr, weights)
    return Accumulator(
        "sum", args, h, Monoid("int-add", 0, lambda a, b: a + b, cancellative=True),
        position_invariant=weights is None, min_arity=attr, parse_candidate=_int_candidate,
    )


def strconcat_accumulator(attr: int) -> Accumulator:
    def h(t, p):
        return str(t[attr - 1])

    def parse(x):
        if not isinstance(x, str):
            raise ValueError(f"expected a string candidate, got {x!r}")
        return x

    return Accumulator(
        "strconcat", (attr,), h, Monoid("str-concat", "", lambda a, b: a + b, cancellative=True),
        position_invariant=True, min_arity=attr, parse_candidate=parse,
    )


FW_EPS, FW_TOP, FW_BOT = "eps", "top", "bot"


def firstwins_accumulator(t1: tuple, t2: tuple) -> Accumulator:
    """``top`` iff the first occurrence of ``t1`` precedes every ``t2``; ``eps`` if neither occurs."""
    t1, t2 = tuple(t1), tuple(t2)
    if t1 == t2:
        raise ValueError("tuple comparison needs two distinct tuples")

    def h(t, p):
        return FW_TOP if t == t1 else FW_BOT if t == t2 else FW_EPS

    def parse(x):
        if x not in (FW_EPS, FW_TOP, FW_BOT):
            raise ValueError(f"expected one of eps/top/bot, got {x!r}")
        return x

    monoid = Monoid("first-wins", FW_EPS, lambda a, b: a if a != FW_EPS else b, finite=True, elements=(FW_EPS, FW_TOP, FW_BOT))
    return Accumulator(
        "firstwins", (t1, t2), h, monoid, position_invariant=True, kind="firstwins",
        min_arity=len(t1), parse_candidate=parse,
    )


def topk_accumulator(k: int) -> Accumulator:
    if k < 0:
        raise ValueError("k must be non-negative")
    return Accumulator(
        "topk", (k,), lambda t, p: (t,) if p <= k else (), LIST_MONOID, kind="topk",
        parse_candidate=_rows, format_result=_rows_out,
    )


def selectat_accumulator(k: int) -> Accumulator:
    if k < 1:
        raise ValueError("positions start at 1")
    return Accumulator(
        "selectat", (k,), lambda t, p: (t,) if p == k else (), LIST_MONOID, kind="selectat",
        parse_candidate=_rows, format_result=_rows_out,
    )


# automata and their transition monoids ---------------------------------------------


@dataclass(frozen=True)
class Dfa:
    states: tuple
    alphabet: tuple
    delta: dict  # (state, symbol) -> state
    initial: object
    accepting: frozenset = frozenset()

    def run(self, word, start=None):
        q = self.initial if start is None else start
        for a in word:
            q = self.delta[(q, a)]
        return q


def _compose(f: tuple, g: tuple) -> tuple:
    # apply f, then g
    return tuple(g[x] for x in f)


def dfa_transition_monoid(dfa: Dfa, attr: int = 1, name: str = "dfa", args: tuple = ()) -> Accumulator:
    """Transition monoid of a complete DFA; ``h`` reads the symbol at attribute ``attr``.

    Elements are state-to-state functions encoded as tuples over state indices.
    """
    idx = {q: i for i, q in enumerate(dfa.states)}
    missing = [(q, a) for q in dfa.states for a in dfa.alphabet if (q, a) not in dfa.delta]
    if missing:
        raise ValueError(f"automaton is incomplete: no transition for {missing[0]!r}")
    table = {a: tuple(idx[dfa.delta[(q, a)]] for q in dfa.states) for a in dfa.alphabet}
    identity = tuple(range(len(dfa.states)))
    # close the generators under composition
    elements = {identity}
    frontier = [identity]
    while frontier:
        f = frontier.pop()
        for g in table.values():
            fg = _compose(f, g)
            if fg not in elements:
                elements.add(fg)
                frontier.append(fg)

    def h(t, p):
        sym = t[attr - 1]
        if sym not in table:
            raise ValueError(f"symbol {sym!r} is outside the automaton's alphabet")
        return table[sym]

    monoid = Monoid("transition", identity, _compose, finite=True, elements=tuple(sorted(elements)))
    acc = Accumulator(name, args, h, monoid, position_invariant=True, min_arity=attr)
    return acc


BAL_L, BAL_R = "l", "r"
BAL_MINUS = ("s-", "n-", "e-")
BAL_PLUS = ("s+", "n+", "e+")
BAL_ALPHABET = (BAL_L, BAL_R) + BAL_MINUS + BAL_PLUS
BAL_STATES = ("qi", "q", "qf", "qs", "qn", "qe", "sink")


def balanced_dfa() -> Dfa:
    """Recognizes ``l (s- s+ | n- n+ | e- e+)* r``; all other transitions fall into ``sink``."""
    delta = {(q, a): "sink" for q in BAL_STATES for a in BAL_ALPHABET}
    delta[("qi", BAL_L)] = "q"
    delta[("q", BAL_R)] = "qf"
    for mid, minus, plus in zip(("qs", "qn", "qe"), BAL_MINUS, BAL_PLUS):
        delta[("q", minus)] = mid
        delta[(mid, plus)] = "q"
    return Dfa(BAL_STATES, BAL_ALPHABET, delta, "qi", frozenset({"qf"}))


def balanced_accumulator(attr: int = 1) -> Accumulator:
    """Transition monoid of the balanced-word automaton.

    Candidates ``accept`` / ``reject`` stand for the function sending the initial
    state to the final state (everything else to the sink), and the constant
    sink function; other elements are written as ``{state: state}`` objects.
    """
    dfa = balanced_dfa()
    base = dfa_transition_monoid(dfa, attr)
    n = len(BAL_STATES)
    sink = BAL_STATES.index("sink")
    f0 = tuple(sink for _ in range(n))
    f1 = tuple(BAL_STATES.index("qf") if q == "qi" else sink for q in BAL_STATES)

    def parse(x):
        if x == "accept":
            return f1
        if x == "reject":
            return f0
        if isinstance(x, dict) and set(x) == set(BAL_STATES):
            return tuple(BAL_STATES.index(x[q]) for q in BAL_STATES)
        raise ValueError("expected 'accept', 'reject', or a complete state map")

    def fmt(f):
        if f == f1:
            return "accept"
        if f == f0:
            return "reject"
        return {q: BAL_STATES[f[i]] for i, q in enumerate(BAL_STATES)}

    return Accumulator(
        "balanced", (attr,), base.h, base.monoid, position_invariant=True, min_arity=attr,
        parse_candidate=parse, format_result=fmt,
    )


# registry ---------------------------------------------------------------------------


def _need_ints(name, args, count):
    if len(args) != count or not all(isinstance(a, int) and not isinstance(a, bool) for a in args):
        raise ValueError(f"{name} takes {count} integer argument(s)")


def make_accumulator(name: str, args: Sequence = ()) -> Accumulator:
    """Build a built-in accumulator from its query-language name and arguments."""
    args = tuple(args)
    if name == "concat":
        if args:
            raise ValueError("concat takes no arguments")
        return concat_accumulator()
    if name == "sum":
        if len(args) == 2 and isinstance(args[1], tuple):
            _need_ints(name, args[:1], 1)
            if not all(isinstance(w, int) for w in args[1]):
                raise ValueError("sum weights must be integers")
            return sum_accumulator(args[0], args[1])
        _need_ints(name, args, 1)
        return sum_accumulator(args[0])
    if name == "strconcat":
        _need_ints(name, args, 1)
        return strconcat_accumulator(args[0])
    if name == "firstwins":
        if len(args) != 2 or not all(isinstance(a, tuple) for a in args):
            raise ValueError("firstwins takes two tuple arguments")
        return firstwins_accumulator(args[0], args[1])
    if name == "topk":
        _need_ints(name, args, 1)
        return topk_accumulator(args[0])
    if name == "selectat":
        _need_ints(name, args, 1)
        return selectat_accumulator(args[0])
    if name == "balanced":
        if not args:
            return balanced_accumulator()
        _need_ints(name, args, 1)
        return balanced_accumulator(args[0])
    raise KeyError(f"unknown accumulator {name!r}")


BUILTIN_ACCUMULATORS = ("concat", "sum", "strconcat", "firstwins", "topk", "selectat", "balanced")
