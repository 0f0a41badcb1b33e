"""Textual query language: tokenizer, recursive-descent parser and printer.

Grammar (binary operators are left-associative and share one precedence)::

    query  := term (("union" | "dirprod" | "lexprod" | "concat") term)*
    term   := "select" pred "(" query ")"
            | "project" attrs "(" query ")"
            | "dupelim" "(" query ")"
            | "singleton" "(" [value ("," value)*] ")"
            | "chain" "(" int ")"
            | "accum" acc "(" query ")"
            | "accumgby" acc attrs "(" query ")"
            | "(" query ")" | NAME
    pred   := disj ;  disj := conj ("or" conj)* ;  conj := neg ("and" neg)*
    neg    := "not" neg | "(" pred ")" | "true" | "false" | attr ("=" | "!=") (attr | value)
    attrs  := attr ("," attr)*          attr := int | "." int | "." NAME ("." NAME)?
    acc    := NAME ["[" arg ("," arg)* "]"]    arg := value | "(" [arg ("," arg)*] ")"

A double-quoted literal made only of digits denotes a natural number, so
``"12"`` and ``12`` are the same value; single-quoted literals are always strings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import algebra as A
from .accumulation import make_accumulator


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


KEYWORDS = {
    "select", "project", "union", "dirprod", "lexprod", "concat", "dupelim",
    "singleton", "chain", "accum", "accumgby", "and", "or", "not", "true", "false",
}
BINOPS = {"union": A.Union, "dirprod": A.ProdDir, "lexprod": A.ProdLex, "concat": A.Concat}

_TOKEN = re.compile(
    r"""(?P<ws>\s+)
      | (?P<int>\d+)
      | (?P<dq>"(?:[^"\\]|\\.)*")
      | (?P<sq>'(?:[^'\\]|\\.)*')
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<op>!=|[=().,\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # int, str, name, op, eof
    value: object
    line: int
    col: int


def _unescape(body: str) -> str:
    return re.sub(r"\\(.)", r"\1", body)


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "int":
            out.append(Token("int", int(s), line, col))
        elif kind == "dq":
            body = _unescape(s[1:-1])
            out.append(Token("int" if body.isdigit() and body.isascii() else "str", int(body) if body.isdigit() and body.isascii() else body, line, col))
        elif kind == "sq":
            out.append(Token("str", _unescape(s[1:-1]), line, col))
        elif kind == "name":
            out.append(Token("kw" if s in KEYWORDS else "name", s, line, col))
        elif kind == "op":
            out.append(Token("op", s, line, col))
        newlines = s.count("\n")
        if newlines:
            line += newlines
            line_start = pos + s.rfind("\n") + 1
        pos = m.end()
    out.append(Token("eof", None, line, pos - line_start + 1))
    return out


@dataclass(frozen=True)
class _Named:
    """An attribute written by name, resolved once the schema is known."""

    parts: tuple
    line: int
    col: int


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def is_(self, kind: str, value=None) -> bool:
        return self.tok.kind == kind and (value is None or self.tok.value == value)

    def expect(self, kind: str, value=None) -> Token:
        if not self.is_(kind, value):
            want = repr(value) if value is not None else kind
            got = "end of input" if self.tok.kind == "eof" else repr(self.tok.value)
            self.error(f"expected {want}, found {got}")
        return self.next()

    # queries

    def query(self):
        q = self.term()
        while self.tok.kind == "kw" and self.tok.value in BINOPS:
            op = BINOPS[self.next().value]
            q = op(q, self.term())
        return q

    def term(self):
        t = self.tok
        if t.kind == "name":
            self.next()
            return A.RelationRef(t.value)
        if self.is_("op", "("):
            self.next()
            q = self.query()
            self.expect("op", ")")
            return q
        if t.kind != "kw":
            self.error("expected a query")
        kw = t.value
        if kw == "select":
            self.next()
            p = self.pred()
            return A.Select(p, self.paren_query())
        if kw == "project":
            self.next()
            attrs = self.attrs()
            return A.Project(attrs, self.paren_query())
        if kw == "dupelim":
            self.next()
            return A.DupElim(self.paren_query())
        if kw == "singleton":
            self.next()
            self.expect("op", "(")
            vals = []
            if not self.is_("op", ")"):
                vals.append(self.value())
                while self.is_("op", ","):
                    self.next()
                    vals.append(self.value())
            self.expect("op", ")")
            return A.Singleton(tuple(vals))
        if kw == "chain":
            self.next()
            self.expect("op", "(")
            n = self.expect("int").value
            self.expect("op", ")")
            return A.ChainConst(n)
        if kw in ("accum", "accumgby"):
            self.next()
            acc = self.accumulator()
            if kw == "accum":
                return A.Accum(acc, self.paren_query())
            attrs = self.attrs()
            return A.AccumGroupBy(acc, attrs, self.paren_query())
        self.error(f"unexpected keyword {kw!r}")

    def paren_query(self):
        self.expect("op", "(")
        q = self.query()
        self.expect("op", ")")
        return q

    # attributes, values, accumulators

    def attr(self):
        t = self.tok
        if t.kind == "int":
            self.next()
            return t.value
        self.expect("op", ".")
        if self.is_("int"):
            return self.next().value
        parts = [self.expect("name").value]
        if self.is_("op", ".") and self.toks[self.i + 1].kind == "name":
            self.next()
            parts.append(self.next().value)
        return _Named(tuple(parts), t.line, t.col)

    def attrs(self) -> tuple:
        out = [self.attr()]
        while self.is_("op", ","):
            self.next()
            out.append(self.attr())
        return tuple(out)

    def value(self):
        t = self.tok
        if t.kind in ("int", "str"):
            self.next()
            return t.value
        self.error("expected a number or a quoted string")

    def acc_arg(self):
        if self.is_("op", "("):
            self.next()
            items = []
            if not self.is_("op", ")"):
                items.append(self.acc_arg())
                while self.is_("op", ","):
                    self.next()
                    items.append(self.acc_arg())
            self.expect("op", ")")
            return tuple(items)
        return self.value()

    def accumulator(self):
        # accumulator names may coincide with operator keywords ("concat")
        t = self.next() if self.is_("kw") else self.expect("name")
        args = []
        if self.is_("op", "["):
            self.next()
            args.append(self.acc_arg())
            while self.is_("op", ","):
                self.next()
                args.append(self.acc_arg())
            self.expect("op", "]")
        try:
            return make_accumulator(t.value, args)
        except KeyError:
            raise ParseError(f"unknown accumulator {t.value!r}", t.line, t.col) from None
        except ValueError as e:
            raise ParseError(str(e), t.line, t.col) from None

    # predicates

    def pred(self):
        p = self.conj()
        while self.is_("kw", "or"):
            self.next()
            p = A.Or(p, self.conj())
        return p

    def conj(self):
        p = self.neg()
        while self.is_("kw", "and"):
            self.next()
            p = A.And(p, self.neg())
        return p

    def neg(self):
        if self.is_("kw", "not"):
            self.next()
            return A.Not(self.neg())
        if self.is_("kw", "true"):
            self.next()
            return A.TrueP()
        if self.is_("kw", "false"):
            self.next()
            return A.FalseP()
        if self.is_("op", "("):
            self.next()
            p = self.pred()
            self.expect("op", ")")
            return p
        left = self.attr()
        op = self.tok
        if not (op.kind == "op" and op.value in ("=", "!=")):
            self.error("expected '=' or '!='")
        self.next()
        if self.is_("op", "."):
            right = A.Attr(self.attr())
        else:
            right = A.Const(self.value())
        return A.Atom(left, op.value, right)


def parse_query(text: str, db=None):
    """Parse ``text``; with ``db`` given, resolve attribute names and check arities."""
    p = _Parser(text)
    q = p.query()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.value!r} after the query")
    attributes = db.attributes if db is not None else {}
    schema = db.schema if db is not None else None
    q = _resolve(q, attributes, schema)[0]
    if db is not None:
        try:
            A.check_query(q, db.schema)
        except A.QueryError as e:
            raise ParseError(str(e), 1, 1) from None
    return q


# attribute-name resolution ---------------------------------------------------------------


def _lookup(names: list, ref, line=1, col=1) -> int:
    if isinstance(ref, int):
        return ref
    hits = [i for i, n in enumerate(names, start=1) if n is not None and (n == ref.parts or n[-1:] == ref.parts)]
    spelled = ".".join(ref.parts)
    if not hits:
        raise ParseError(f"unknown attribute {spelled!r}", ref.line, ref.col)
    if len(hits) > 1:
        raise ParseError(f"ambiguous attribute {spelled!r}", ref.line, ref.col)
    return hits[0]


def _resolve_pred(p, names):
    if isinstance(p, A.Atom):
        left = _lookup(names, p.left)
        right = A.Attr(_lookup(names, p.right.index)) if isinstance(p.right, A.Attr) else p.right
        return A.Atom(left, p.op, right)
    if isinstance(p, (A.And, A.Or)):
        return type(p)(_resolve_pred(p.left, names), _resolve_pred(p.right, names))
    if isinstance(p, A.Not):
        return A.Not(_resolve_pred(p.inner, names))
    return p


def _resolve(q, attributes: dict, schema):
    """(query with positional attributes, attribute names as (relation, name) pairs or None)."""
    if isinstance(q, A.RelationRef):
        if q.name in attributes:
            return q, [(q.name, a) for a in attributes[q.name]]
        arity = schema.get(q.name, 0) if schema else 0
        return q, [None] * arity
    if isinstance(q, A.Singleton):
        return q, [None] * len(q.values)
    if isinstance(q, A.ChainConst):
        return q, [None]
    if isinstance(q, A.Select):
        inner, names = _resolve(q.q, attributes, schema)
        return A.Select(_resolve_pred(q.pred, names), inner), names
    if isinstance(q, A.Project):
        inner, names = _resolve(q.q, attributes, schema)
        attrs = tuple(_lookup(names, a) for a in q.attrs)
        return A.Project(attrs, inner), [names[a - 1] if 0 < a <= len(names) else None for a in attrs]
    if isinstance(q, A.DupElim):
        inner, names = _resolve(q.q, attributes, schema)
        return A.DupElim(inner), names
    if isinstance(q, A.BINARY):
        l, ln = _resolve(q.q1, attributes, schema)
        r, rn = _resolve(q.q2, attributes, schema)
        names = ln + rn if isinstance(q, (A.ProdDir, A.ProdLex)) else ln
        return type(q)(l, r), names
    if isinstance(q, A.Accum):
        inner, _ = _resolve(q.q, attributes, schema)
        return A.Accum(q.acc, inner), [None]
    if isinstance(q, A.AccumGroupBy):
        inner, names = _resolve(q.q, attributes, schema)
        attrs = tuple(_lookup(names, a) for a in q.attrs)
        return A.AccumGroupBy(q.acc, attrs, inner), [None] * (len(attrs) + 1)
    raise TypeError(q)


# printing -----------------------------------------------------------------------------------


def _lit(v) -> str:
    if isinstance(v, str):
        return "'" + v.replace("\\", "\\\\").replace("'", "\\'") + "'"
    return str(v)


def pred_to_text(p) -> str:
    if isinstance(p, A.Atom):
        right = f".{p.right.index}" if isinstance(p.right, A.Attr) else _lit(p.right.value)
        return f".{p.left} {p.op} {right}"
    if isinstance(p, A.And):
        return f"({pred_to_text(p.left)}) and ({pred_to_text(p.right)})"
    if isinstance(p, A.Or):
        return f"({pred_to_text(p.left)}) or ({pred_to_text(p.right)})"
    if isinstance(p, A.Not):
        return f"not ({pred_to_text(p.inner)})"
    if isinstance(p, A.TrueP):
        return "true"
    if isinstance(p, A.FalseP):
        return "false"
    raise TypeError(p)


def to_text(q) -> str:
    """Fully parenthesized rendering that parses back to an equal AST."""
    if isinstance(q, A.RelationRef):
        return q.name
    if isinstance(q, A.Singleton):
        return "singleton(" + ", ".join(_lit(v) for v in q.values) + ")"
    if isinstance(q, A.ChainConst):
        return f"chain({q.n})"
    if isinstance(q, A.Select):
        return f"select {pred_to_text(q.pred)} ({to_text(q.q)})"
    if isinstance(q, A.Project):
        return f"project {', '.join(str(a) for a in q.attrs)} ({to_text(q.q)})"
    if isinstance(q, A.DupElim):
        return f"dupelim ({to_text(q.q)})"
    if isinstance(q, A.BINARY):
        word = {v: k for k, v in BINOPS.items()}[type(q)]
        return f"({to_text(q.q1)}) {word} ({to_text(q.q2)})"
    if isinstance(q, A.Accum):
        return f"accum {q.acc.spec()} ({to_text(q.q)})"
    if isinstance(q, A.AccumGroupBy):
        return f"accumgby {q.acc.spec()} {', '.join(str(a) for a in q.attrs)} ({to_text(q.q)})"
    raise TypeError(q)
