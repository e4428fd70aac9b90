"""Terms of the object language, with a parser and a printer for its concrete syntax.

Concrete syntax, loosest to tightest::

    expr   := "fun" "(" ident [":" qtype] ")" "=>" expr
            | "let" ident "=" expr "in" expr
            | binop
    binop  := put (("&&" | "||") put)*          left-associative
    put    := app [":=" app]
    app    := unary atom*                        left-associative
    unary  := "!" unary | "ref" unary | atom
    atom   := "true" | "false" | ident | "[]" | "(" expr ")"

    qtype  := stype [qual]
    stype  := "Bool" | "Ref" | "(" qtype "->" ["[" eff "]"] qtype ")"
    qual   := "^" mark | "<" mark "," mark ">"
    eff    := mark
    mark   := "bot" | "top"

``let`` never reaches the AST: it is rewritten into an immediately applied
abstraction. ``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Optional, Union

from .types import BOT, TOP, Mark, Qual


# ---------------------------------------------------------------- surface types


@dataclass(frozen=True, slots=True)
class SBool:
    def __str__(self) -> str:
        return "Bool"


@dataclass(frozen=True, slots=True)
class SRef:
    def __str__(self) -> str:
        return "Ref"


QualAnnot = Union[Mark, Qual]


@dataclass(frozen=True, slots=True)
class SFun:
    param: SurfaceType
    param_qual: Optional[QualAnnot]
    result: SurfaceType
    result_qual: Optional[QualAnnot]
    effect: Optional[Mark]

    def __str__(self) -> str:
        eff = f" [{self.effect.keyword}]" if self.effect is not None else ""
        return (
            f"({self.param}{_qual_text(self.param_qual)} ->{eff} "
            f"{self.result}{_qual_text(self.result_qual)})"
        )


SurfaceType = Union[SBool, SRef, SFun]


def _qual_text(q: Optional[QualAnnot]) -> str:
    if q is None:
        return ""
    if isinstance(q, Mark):
        return "^" + q.keyword
    return q.keyword


# ------------------------------------------------------------------------ terms


@dataclass(frozen=True, slots=True)
class Cst:
    value: bool


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Abs:
    """``fun (param: annot qual) => body``; ``annot`` and ``qual`` are optional."""

    param: str
    annot: Optional[SurfaceType]
    body: Term
    qual: Optional[QualAnnot] = None


@dataclass(frozen=True, slots=True)
class App:
    fn: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class Ref:
    init: Term


@dataclass(frozen=True, slots=True)
class Get:
    target: Term


@dataclass(frozen=True, slots=True)
class Put:
    target: Term
    value: Term


AND = "&&"
OR = "||"


@dataclass(frozen=True, slots=True)
class Bin:
    op: str
    lhs: Term
    rhs: Term

    def __post_init__(self) -> None:
        if self.op not in (AND, OR):
            raise ValueError(f"unknown Boolean operator {self.op!r}")


@dataclass(frozen=True, slots=True)
class Hole:
    """The hole of a context. Never produced by ``let`` or by evaluation."""


Term = Union[Cst, Var, Abs, App, Ref, Get, Put, Bin, Hole]

TRUE = Cst(True)
FALSE = Cst(False)
HOLE = Hole()


def desugar_let(name: str, bound: Term, body: Term) -> Term:
    return App(Abs(name, None, body), bound)


def as_let(t: Term) -> Optional[tuple[str, Term, Term]]:
    """Recognise ``App(Abs(x, <no annotation>, body), bound)`` as ``let``."""
    if (
        isinstance(t, App)
        and isinstance(t.fn, Abs)
        and t.fn.annot is None
        and t.fn.qual is None
    ):
        return t.fn.param, t.arg, t.fn.body
    return None


def children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, Abs):
        return (t.body,)
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, (Ref,)):
        return (t.init,)
    if isinstance(t, Get):
        return (t.target,)
    if isinstance(t, Put):
        return (t.target, t.value)
    if isinstance(t, Bin):
        return (t.lhs, t.rhs)
    return ()


def size(t: Term) -> int:
    """Number of AST nodes."""
    return 1 + sum(size(c) for c in children(t))


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Abs):
        return free_vars(t.body) - {t.param}
    out: frozenset[str] = frozenset()
    for c in children(t):
        out |= free_vars(c)
    return out


def count_holes(t: Term) -> int:
    if isinstance(t, Hole):
        return 1
    return sum(count_holes(c) for c in children(t))


def replace_holes(t: Term, filler: Term) -> Term:
    """Fill every hole with ``filler``; binders in ``t`` may capture its variables."""
    if isinstance(t, Hole):
        return filler
    if isinstance(t, (Cst, Var)):
        return t
    if isinstance(t, Abs):
        return Abs(t.param, t.annot, replace_holes(t.body, filler), t.qual)
    if isinstance(t, App):
        return App(replace_holes(t.fn, filler), replace_holes(t.arg, filler))
    if isinstance(t, Ref):
        return Ref(replace_holes(t.init, filler))
    if isinstance(t, Get):
        return Get(replace_holes(t.target, filler))
    if isinstance(t, Put):
        return Put(replace_holes(t.target, filler), replace_holes(t.value, filler))
    return Bin(t.op, replace_holes(t.lhs, filler), replace_holes(t.rhs, filler))


def _fresh_name(base: str, avoid: frozenset[str]) -> str:
    for i in itertools.count(1):
        cand = f"{base}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def substitute(t: Term, name: str, repl: Term) -> Term:
    """Capture-avoiding ``t[repl/name]``; binders are renamed when they would capture."""
    repl_fv = free_vars(repl)

    def go(t: Term) -> Term:
        if isinstance(t, Var):
            return repl if t.name == name else t
        if isinstance(t, (Cst, Hole)):
            return t
        if isinstance(t, Abs):
            if t.param == name or name not in free_vars(t.body):
                return t
            if t.param in repl_fv:
                fresh = _fresh_name(t.param, repl_fv | free_vars(t.body) | {name})
                body = substitute(t.body, t.param, Var(fresh))
                return Abs(fresh, t.annot, go(body), t.qual)
            return Abs(t.param, t.annot, go(t.body), t.qual)
        if isinstance(t, App):
            return App(go(t.fn), go(t.arg))
        if isinstance(t, Ref):
            return Ref(go(t.init))
        if isinstance(t, Get):
            return Get(go(t.target))
        if isinstance(t, Put):
            return Put(go(t.target), go(t.value))
        return Bin(t.op, go(t.lhs), go(t.rhs))

    return go(t)


# ---------------------------------------------------------------------- printer

# precedence levels: larger binds tighter
_EXPR, _BIN, _PUT, _APP, _UNARY, _ATOM = range(6)


def _level(t: Term) -> int:
    if isinstance(t, Abs) or as_let(t) is not None:
        return _EXPR
    if isinstance(t, Bin):
        return _BIN
    if isinstance(t, Put):
        return _PUT
    if isinstance(t, App):
        return _APP
    if isinstance(t, (Ref, Get)):
        return _UNARY
    return _ATOM


def type_text(ty: SurfaceType, qual: Optional[QualAnnot] = None) -> str:
    return f"{ty}{_qual_text(qual)}"


def print_term(t: Term) -> str:
    return _show(t, _EXPR)


def _show(t: Term, need: int) -> str:
    text = _show_bare(t)
    return text if _level(t) >= need else f"({text})"


def _show_bare(t: Term) -> str:
    let = as_let(t)
    if let is not None:
        name, bound, body = let
        return f"let {name} = {_show(bound, _EXPR)} in {_show(body, _EXPR)}"
    if isinstance(t, Cst):
        return "true" if t.value else "false"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Hole):
        return "[]"
    if isinstance(t, Abs):
        annot = "" if t.annot is None else ": " + type_text(t.annot, t.qual)
        return f"fun ({t.param}{annot}) => {_show(t.body, _EXPR)}"
    if isinstance(t, App):
        return f"{_show(t.fn, _APP)} {_show(t.arg, _ATOM)}"
    if isinstance(t, Ref):
        return f"ref {_show(t.init, _ATOM)}"
    if isinstance(t, Get):
        return f"!{_show(t.target, _ATOM)}"
    if isinstance(t, Put):
        return f"{_show(t.target, _APP)} := {_show(t.value, _APP)}"
    assert isinstance(t, Bin)
    return f"{_show(t.lhs, _BIN)} {t.op} {_show(t.rhs, _PUT)}"


# ----------------------------------------------------------------------- parser


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


KEYWORDS = frozenset(
    {"true", "false", "fun", "ref", "let", "in", "Bool", "Ref", "bot", "top"}
)

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*)
  | (?P<sym>=>|->|:=|&&|\|\||\[\]|[()\[\]:=!^<>,])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class _Tok:
    kind: str  # "ident", "kw", "sym", "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            if kind == "ident" and chunk in KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str) -> None:
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, what: str) -> ParseError:
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        return ParseError(f"expected {what}, found {found}", t.line, t.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("kw", "sym") and self.tok.text == text

    def eat(self, text: str) -> None:
        if not self.at(text):
            raise self.fail(repr(text))
        self.i += 1

    def ident(self) -> str:
        if self.tok.kind != "ident":
            raise self.fail("identifier")
        name = self.tok.text
        self.i += 1
        return name

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind == "ident":
            return True
        return t.text in ("true", "false", "(", "[]") and t.kind in ("kw", "sym")

    # terms

    def expr(self) -> Term:
        if self.at("fun"):
            self.i += 1
            self.eat("(")
            name = self.ident()
            annot, qual = None, None
            if self.at(":"):
                self.i += 1
                annot, qual = self.qtype()
            self.eat(")")
            self.eat("=>")
            return Abs(name, annot, self.expr(), qual)
        if self.at("let"):
            self.i += 1
            name = self.ident()
            self.eat("=")
            bound = self.expr()
            self.eat("in")
            return desugar_let(name, bound, self.expr())
        return self.binop()

    def binop(self) -> Term:
        t = self.put()
        while self.at(AND) or self.at(OR):
            op = self.tok.text
            self.i += 1
            t = Bin(op, t, self.put())
        return t

    def put(self) -> Term:
        t = self.app()
        if self.at(":="):
            self.i += 1
            t = Put(t, self.app())
        return t

    def app(self) -> Term:
        t = self.unary()
        while self.starts_atom():
            t = App(t, self.atom())
        return t

    def unary(self) -> Term:
        if self.at("!"):
            self.i += 1
            return Get(self.unary())
        if self.at("ref"):
            self.i += 1
            return Ref(self.unary())
        return self.atom()

    def atom(self) -> Term:
        t = self.tok
        if self.at("true"):
            self.i += 1
            return TRUE
        if self.at("false"):
            self.i += 1
            return FALSE
        if self.at("[]"):
            self.i += 1
            return HOLE
        if t.kind == "ident":
            self.i += 1
            return Var(t.text)
        if self.at("("):
            self.i += 1
            inner = self.expr()
            self.eat(")")
            return inner
        raise self.fail("a term")

    # types

    def mark(self) -> Mark:
        if self.at("bot"):
            self.i += 1
            return BOT
        if self.at("top"):
            self.i += 1
            return TOP
        raise self.fail("'bot' or 'top'")

    def qual(self) -> Optional[QualAnnot]:
        if self.at("^"):
            self.i += 1
            return self.mark()
        if self.at("<"):
            self.i += 1
            fresh = self.mark()
            self.eat(",")
            stored = self.mark()
            self.eat(">")
            return Qual(fresh, stored)
        return None

    def qtype(self) -> tuple[SurfaceType, Optional[QualAnnot]]:
        return self.stype(), self.qual()

    def stype(self) -> SurfaceType:
        if self.at("Bool"):
            self.i += 1
            return SBool()
        if self.at("Ref"):
            self.i += 1
            return SRef()
        if self.at("("):
            self.i += 1
            param, pq = self.qtype()
            self.eat("->")
            eff = None
            if self.at("["):
                self.i += 1
                eff = self.mark()
                self.eat("]")
            result, rq = self.qtype()
            self.eat(")")
            return SFun(param, pq, result, rq, eff)
        raise self.fail("a type")


def parse(text: str) -> Term:
    p = _Parser(text)
    t = p.expr()
    if p.tok.kind != "eof":
        raise p.fail("end of input")
    return t


def parse_type(text: str) -> tuple[SurfaceType, Optional[QualAnnot]]:
    p = _Parser(text)
    ty = p.qtype()
    if p.tok.kind != "eof":
        raise p.fail("end of input")
    return ty
