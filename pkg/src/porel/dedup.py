"""Duplicate elimination: value-equality quotient, complete failure, quotient po-relation."""

from __future__ import annotations

from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter

from .algebra import CompleteFailure, DupElim, eval_query
from .core import PoDatabase, PoRelation, bits


@dataclass(frozen=True)
class QuotientGraph:
    values: tuple  # one tuple value per node, in order of first occurrence
    members: tuple  # identifier tuples per node
    edges: frozenset  # (node, node) pairs, never self-loops

    def successors(self, node: int) -> list[int]:
        return sorted(b for a, b in self.edges if a == node)


def value_equality_quotient(r: PoRelation) -> QuotientGraph:
    index: dict = {}
    members: list[list[int]] = []
    values: list = []
    for i, t in enumerate(r.labels):
        if t not in index:
            index[t] = len(values)
            values.append(t)
            members.append([])
        members[index[t]].append(i)
    node_of = [index[t] for t in r.labels]
    edges = set()
    for i, row in enumerate(r.succ):
        for j in bits(row):
            if node_of[i] != node_of[j]:
                edges.add((node_of[i], node_of[j]))
    return QuotientGraph(tuple(values), tuple(tuple(m) for m in members), frozenset(edges))


def quotient_is_acyclic(g: QuotientGraph, extra=()) -> bool:
    ts = TopologicalSorter({v: set() for v in range(len(g.values))})
    for a, b in list(g.edges) + list(extra):
        ts.add(b, a)
    try:
        ts.prepare()
    except CycleError:
        return False
    return True


def dup_elim(r: PoRelation):
    """One identifier per distinct value, or :class:`CompleteFailure` if the quotient has a cycle."""
    g = value_equality_quotient(r)
    if not quotient_is_acyclic(g):
        return CompleteFailure(r.arity)
    names = [min(m) for m in g.members]
    if r.names is not None:
        names = [r.names[i] for i in names]
    return PoRelation.build(g.values, g.edges, arity=r.arity, names=names, check=False)


def _dedup_target(q, db: PoDatabase):
    if not isinstance(q, DupElim):
        raise ValueError("expected a query whose root is dupelim")
    return eval_query(q.q, db)


def poss_dupelim_relation(r: PoRelation, rows) -> bool:
    """Is ``rows`` a possible world of ``dupElim(r)``?"""
    rows = [tuple(x) for x in rows]
    if len(set(rows)) != len(rows):
        return False
    g = value_equality_quotient(r)
    if set(rows) != set(g.values) or not quotient_is_acyclic(g):
        return False
    node = {v: k for k, v in enumerate(g.values)}
    chain = [(node[a], node[b]) for a, b in zip(rows, rows[1:])]
    return quotient_is_acyclic(g, chain)


def cert_dupelim_relation(r: PoRelation, rows) -> bool:
    from .decision import cert_posra

    out = dup_elim(r)
    if isinstance(out, CompleteFailure):
        return False
    return cert_posra(out, rows)


def poss_dupelim(q, db: PoDatabase, rows) -> bool:
    inner = _dedup_target(q, db)
    if isinstance(inner, CompleteFailure):
        return False
    return poss_dupelim_relation(inner, rows)


def cert_dupelim(q, db: PoDatabase, rows) -> bool:
    inner = _dedup_target(q, db)
    if isinstance(inner, CompleteFailure):
        return False
    return cert_dupelim_relation(inner, rows)
