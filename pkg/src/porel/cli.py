"""Command-line front end.

Every subcommand prints JSON (or DOT / TSV where asked) on stdout.  Exit
status is 0 when the question was decided, 2 when a brute-force search ran out
of budget and the answer is only a lower bound, and 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import algebra as A
from .core import BudgetExceeded, ListRelation, PoDatabase, possible_worlds
from .dbfile import DatabaseError, load_database, relation_to_json, serialize_database
from .decision import Answer, DecisionConfig, MalformedCandidate, accumulation_results, cert, poss
from .accumulation import CapabilityError
from .order import FragmentError, ia_partition, ia_width, ia_width_bound_noprod, min_chain_partition, width, width_bound_lex
from .query import ParseError, parse_query, to_text
from .testkit import PartitionInstance, gen_grid_instance, gen_unary3partition

EXIT_DECIDED, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class CliError(Exception):
    pass


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")


def _rows(rows) -> list:
    return [list(t) for t in rows]


def _load(args) -> tuple[PoDatabase, object]:
    db = load_database(args.db)
    return db, parse_query(args.query, db)


def _relation(db: PoDatabase, q):
    if isinstance(q, (A.Accum, A.AccumGroupBy)):
        raise CliError("this command needs a query without accumulation")
    return A.eval_query(q, db)


def _format_value(acc, v):
    if isinstance(v, frozenset):
        return sorted(([*g, acc.format_result(x)] for g, x in v), key=repr)
    return acc.format_result(v)


def _read_candidate(text: str):
    if os.path.exists(text):
        with open(text, encoding="utf-8") as f:
            text = f.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise CliError(f"candidate is not valid JSON: {e.msg}") from None


def _answer_json(ans: Answer) -> dict:
    wit = ans.witness
    if isinstance(wit, ListRelation):
        wit = _rows(wit.rows)
    return {"verdict": ans.verdict, "strategy": ans.strategy, "exact": ans.exact, "witness": wit}


# subcommands ---------------------------------------------------------------------------


def cmd_eval(args) -> int:
    db, q = _load(args)
    cfg = DecisionConfig()
    if isinstance(q, (A.Accum, A.AccumGroupBy)):
        results, strategy, exact = accumulation_results(q, db, cfg)
        vals = sorted((_format_value(q.acc, v) for v in results), key=repr)
        _emit({"query": to_text(q), "results": vals, "strategy": strategy, "exact": exact})
        return EXIT_DECIDED if exact else EXIT_INCONCLUSIVE
    r = A.eval_query(q, db)
    if isinstance(r, A.CompleteFailure):
        _emit({"query": to_text(q), "complete_failure": True, "arity": r.arity})
        return EXIT_DECIDED
    if args.out == "hasse":
        from .plotting import to_dot

        sys.stdout.write(to_dot(r))
        return EXIT_DECIDED
    if args.out == "worlds":
        return _print_worlds(r, args.limit or cfg.world_limit, "json")
    _emit({"query": to_text(q), "relation": relation_to_json(r)})
    return EXIT_DECIDED


def _print_worlds(r, limit: int, fmt: str) -> int:
    try:
        worlds, exact = possible_worlds(r, limit), True
    except BudgetExceeded as e:
        worlds, exact = e.partial, False
    worlds = sorted(worlds, key=repr)
    if fmt == "tsv":
        for k, w in enumerate(worlds, start=1):
            for pos, t in enumerate(w, start=1):
                print("\t".join(str(x) for x in (k, pos, *t)))
    else:
        _emit({"count": len(worlds), "exact": exact, "worlds": [_rows(w) for w in worlds]})
    return EXIT_DECIDED if exact else EXIT_INCONCLUSIVE


def cmd_worlds(args) -> int:
    db, q = _load(args)
    r = _relation(db, q)
    if isinstance(r, A.CompleteFailure):
        _emit({"count": 0, "exact": True, "worlds": [], "complete_failure": True})
        return EXIT_DECIDED
    return _print_worlds(r, args.limit, args.format)


def _decide(args, fn) -> int:
    db, q = _load(args)
    ans = fn(q, db, _read_candidate(args.candidate), DecisionConfig())
    _emit(_answer_json(ans))
    return EXIT_DECIDED if ans.exact else EXIT_INCONCLUSIVE


def cmd_poss(args) -> int:
    return _decide(args, poss)


def cmd_cert(args) -> int:
    return _decide(args, cert)


def cmd_analyze(args) -> int:
    db, q = _load(args)
    r = _relation(db, q)
    if isinstance(r, A.CompleteFailure):
        raise CliError("the query fails completely; there is no relation to analyze")
    out = {
        "size": len(r),
        "width": width(r),
        "ia_width": ia_width(r),
        "chains": [[r.name_of(i) for i in c] for c in min_chain_partition(r).chains],
        "ia_classes": [[r.name_of(i) for i in c] for c in ia_partition(r).classes],
    }
    k = max((width(rel) for rel in db.relations.values()), default=1)
    bounds = {}
    try:
        bounds["width_bound"] = width_bound_lex(q, k)
    except FragmentError:
        pass
    try:
        kia = max((ia_width(rel) for rel in db.relations.values()), default=1)
        bounds["ia_width_bound"] = ia_width_bound_noprod(q, kia)
    except FragmentError:
        pass
    out["bounds"] = bounds
    if args.figure:
        from .plotting import save_hasse_figure

        save_hasse_figure(r, args.figure, title=to_text(q))
        out["figure"] = args.figure
    _emit(out)
    return EXIT_DECIDED


def cmd_dedup(args) -> int:
    db, q = _load(args)
    r = A.eval_query(A.DupElim(q), db)
    if isinstance(r, A.CompleteFailure):
        _emit({"complete_failure": True, "arity": r.arity})
    else:
        _emit({"complete_failure": False, "relation": relation_to_json(r)})
    return EXIT_DECIDED


def _ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_gen(args) -> int:
    inst = PartitionInstance(args.E, args.B)
    if args.kind == "3part":
        rel, cand = gen_unary3partition(inst)
        db, query = PoDatabase({"R": rel}), "R"
    else:
        db, q, cand = gen_grid_instance(inst)
        query = to_text(q)
    _emit({"database": json.loads(serialize_database(db)), "query": query, "candidate": _rows(cand.rows)})
    return EXIT_DECIDED


# entry point -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="porel", description="Queries over partially ordered relations.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_query(sp):
        sp.add_argument("-d", "--db", required=True, help="database JSON file")
        sp.add_argument("-q", "--query", required=True, help="query text")
        return sp

    sp = with_query(sub.add_parser("eval", help="evaluate a query"))
    sp.add_argument("--out", choices=["relation", "worlds", "hasse"], default="relation")
    sp.add_argument("--limit", type=int, default=None, help="world budget for --out worlds")
    sp.set_defaults(func=cmd_eval)

    sp = with_query(sub.add_parser("worlds", help="enumerate possible worlds of a query result"))
    sp.add_argument("--limit", type=int, default=1000)
    sp.add_argument("--format", choices=["json", "tsv"], default="json")
    sp.set_defaults(func=cmd_worlds)

    for name, fn in (("poss", cmd_poss), ("cert", cmd_cert)):
        sp = with_query(sub.add_parser(name, help=f"decide {name.upper()} for a candidate result"))
        sp.add_argument("--candidate", required=True, help="JSON file or inline JSON")
        sp.set_defaults(func=fn)

    sp = with_query(sub.add_parser("analyze", help="width, ia-width, partitions and static bounds"))
    sp.add_argument("--figure", default=None, help="write a Hasse diagram image to this path")
    sp.set_defaults(func=cmd_analyze)

    sp = with_query(sub.add_parser("dedup", help="duplicate elimination of a query result"))
    sp.set_defaults(func=cmd_dedup)

    sp = sub.add_parser("gen", help="generate a 3-partition gadget instance")
    sp.add_argument("kind", choices=["3part", "grid"])
    sp.add_argument("--E", type=_ints, required=True, help="comma-separated integers")
    sp.add_argument("--B", type=int, required=True)
    sp.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse uses 2 for usage errors, which would read as "inconclusive"
        return EXIT_DECIDED if e.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except ParseError as e:
        print(f"error: query syntax: {e}", file=sys.stderr)
    except (DatabaseError, OSError) as e:
        print(f"error: database: {e}", file=sys.stderr)
    except (A.QueryError, MalformedCandidate, CapabilityError, CliError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
