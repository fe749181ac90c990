"""Concrete syntax for types, terms, formulas, and formula documents.

Grammar sketch (precedence low to high):

    formula  :=  or ('->' formula)?              right-associative
    or       :=  and ('\\/' and)*
    and      :=  unary ('/\\' unary)*
    unary    :=  '~' unary | quantified | atom
    atom     :=  st(t) | eq[T](s,t) | approx[T](s,t) | true | false
               | term REL term | '(' formula ')' | name(args)  (reference)
    REL      :=  '=' | '!=' | '<=' | '<' | 'in'

Quantifier prefixes are parenthesized: ``(forall x:1)``, ``(exists^st
y:0)``, ``(forall n <= t)``, ``(exists v in s)``.  A quantifier's body
extends as far right as possible; to keep that readable, a quantifier
is rejected directly under ``~`` or as the right operand of ``/\\`` or
``\\/`` — wrap it in parentheses instead.

Documents are stanzas ``name := formula`` or ``name(x:T, ...) :=
formula``; later stanzas may reference earlier ones by name.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .formulas import (And, ApproxEq, Atom, BExists, BForall, Eq, Exists,
                       ExistsSt, FALSE, Forall, ForallSt, Formula, Implies,
                       Not, Or, St, TRUE, free_vars_f, subst_f)
from .terms import (Abs, App, CONST_NAMES, Const, INITSEG, MAX2, MONUS,
                    MUSCAN, NPAIR, NUNL, NUNR, PLUS, RUN, SEQMAX, SUCC, Term,
                    TypeCheckError, Var, app, append_c, empty_c, fresh_name,
                    fst_c, get_c, infer_type, len_c, num, pair_c, rec_c,
                    seqapp_c, snd_c)
from .types import Arrow, FiniteType, N, Product, Seq, pure


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


KEYWORDS = frozenset(["forall", "exists", "st", "in", "eq", "approx",
                      "true", "false"])

_SYMBOLS = ["->", "/\\", "\\/", "!=", "<=", ":=", "^st",
            "(", ")", "[", "]", ",", ":", ".", "*", "~", "<", "=", "\\"]


@dataclass
class Token:
    kind: str  # "num" | "ident" | "sym" | "eof"
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and src[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(Token("num", src[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] in "_'"):
                j += 1
            toks.append(Token("ident", src[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if src.startswith(sym, i):
                toks.append(Token("sym", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


@dataclass
class _P:
    toks: list[Token]
    pos: int = 0
    env: dict[str, Var] = field(default_factory=dict)
    defs: dict[str, tuple[list[Var], Formula]] = field(default_factory=dict)

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at_sym(self, s: str, ahead: int = 0) -> bool:
        t = self.peek(ahead)
        return t.kind == "sym" and t.text == s

    def at_kw(self, w: str, ahead: int = 0) -> bool:
        t = self.peek(ahead)
        return t.kind == "ident" and t.text == w

    def expect_sym(self, s: str) -> Token:
        t = self.peek()
        if not self.at_sym(s):
            raise ParseError(f"expected {s!r}, found {t.text or 'end of input'!r}",
                             t.line, t.col)
        return self.next()

    def fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # -- types --------------------------------------------------------------

    def parse_type(self) -> FiniteType:
        left = self._type_prod()
        if self.at_sym("->"):
            self.next()
            return Arrow(left, self.parse_type())
        return left

    def _type_prod(self) -> FiniteType:
        left = self._type_post()
        while self.at_kw("x"):
            self.next()
            left = Product(left, self._type_post())
        return left

    def _type_post(self) -> FiniteType:
        t = self._type_atom()
        while self.at_sym("*"):
            self.next()
            t = Seq(t)
        return t

    def _type_atom(self) -> FiniteType:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return pure(int(tok.text))
        if self.at_sym("("):
            self.next()
            ty = self.parse_type()
            self.expect_sym(")")
            return ty
        self.fail(f"expected a type, found {tok.text!r}")

    # -- terms --------------------------------------------------------------

    def _type_env(self) -> dict[str, FiniteType]:
        return {name: v.ty for name, v in self.env.items()}

    def parse_term(self) -> Term:
        if self.at_sym("\\"):
            self.next()
            tok = self.peek()
            if tok.kind != "ident":
                self.fail("expected a variable after '\\'")
            self.next()
            self.expect_sym(":")
            ty = self.parse_type()
            v = Var(tok.text, ty)
            self.expect_sym(".")
            old = self.env.get(tok.text)
            self.env[tok.text] = v
            body = self.parse_term()
            if old is None:
                del self.env[tok.text]
            else:
                self.env[tok.text] = old
            return Abs(v, body)
        return self._term_app()

    def _term_app(self) -> Term:
        t = self._term_primary()
        while True:
            if self.at_sym("("):
                self.next()
                args = [self.parse_term()]
                while self.at_sym(","):
                    self.next()
                    args.append(self.parse_term())
                self.expect_sym(")")
                t = app(t, *args)
            elif self.at_sym("["):
                open_tok = self.peek()
                self.next()
                args = [self.parse_term()]
                while self.at_sym(","):
                    self.next()
                    args.append(self.parse_term())
                self.expect_sym("]")
                for a in args:
                    t = self._mk_seqapp(t, a, open_tok)
            else:
                return t

    def _mk_seqapp(self, fn: Term, arg: Term, tok: Token) -> Term:
        try:
            fty = infer_type(fn, self._type_env())
            aty = infer_type(arg, self._type_env())
        except TypeCheckError as e:
            raise ParseError(str(e), tok.line, tok.col) from None
        if not isinstance(fty, Arrow) or fty.dom != aty:
            raise ParseError("candidate application Y[x] needs a function "
                             "matching the argument type", tok.line, tok.col)
        return app(seqapp_c(fty.dom, fty.cod), fn, arg)

    def _const_type_args(self, name: str, tok: Token) -> Term:
        def tyargs(k: int) -> list[FiniteType]:
            self.expect_sym("[")
            out = [self.parse_type()]
            while self.at_sym(","):
                self.next()
                out.append(self.parse_type())
            self.expect_sym("]")
            if len(out) != k:
                raise ParseError(f"{name} takes {k} type argument(s)",
                                 tok.line, tok.col)
            return out

        if name == "succ":
            return SUCC
        if name == "plus":
            return PLUS
        if name == "monus":
            return MONUS
        if name == "max":
            return MAX2
        if name == "npair":
            return NPAIR
        if name == "nunl":
            return NUNL
        if name == "nunr":
            return NUNR
        if name == "seqmax":
            return SEQMAX
        if name == "initseg":
            return INITSEG
        if name == "run":
            return RUN
        if name == "muscan":
            return MUSCAN
        if name == "rec":
            return rec_c(*tyargs(1))
        if name == "empty":
            return empty_c(*tyargs(1))
        if name == "append":
            return append_c(*tyargs(1))
        if name == "len":
            return len_c(*tyargs(1))
        if name == "get":
            return get_c(*tyargs(1))
        if name == "pair":
            return pair_c(*tyargs(2))
        if name == "fst":
            return fst_c(*tyargs(2))
        if name == "snd":
            return snd_c(*tyargs(2))
        if name == "seqapp":
            return seqapp_c(*tyargs(2))
        raise ParseError(f"unknown constant {name}", tok.line, tok.col)

    def _term_primary(self) -> Term:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return num(int(tok.text))
        if tok.kind == "ident":
            name = tok.text
            if name in CONST_NAMES:
                self.next()
                return self._const_type_args(name, tok)
            if name in self.env:
                self.next()
                return self.env[name]
            if name in KEYWORDS:
                self.fail(f"keyword {name!r} is not a term")
            self.fail(f"unbound variable {name!r}")
        if self.at_sym("("):
            self.next()
            t = self.parse_term()
            self.expect_sym(")")
            return t
        if self.at_sym("\\"):
            return self.parse_term()
        self.fail(f"expected a term, found {tok.text or 'end of input'!r}")

    # -- formulas -----------------------------------------------------------

    def parse_formula(self, allow_quant: bool = True) -> Formula:
        left = self._f_or(allow_quant)
        if self.at_sym("->"):
            self.next()
            return Implies(left, self.parse_formula(True))
        return left

    def _f_or(self, aq: bool) -> Formula:
        left = self._f_and(aq)
        while self.at_sym("\\/"):
            self.next()
            self._reject_bare_quant("\\/")
            left = Or(left, self._f_and(False))
        return left

    def _f_and(self, aq: bool) -> Formula:
        left = self._f_unary(aq)
        while self.at_sym("/\\"):
            self.next()
            self._reject_bare_quant("/\\")
            left = And(left, self._f_unary(False))
        return left

    def _at_quant(self) -> bool:
        return (self.at_sym("(") and
                (self.at_kw("forall", 1) or self.at_kw("exists", 1)))

    def _reject_bare_quant(self, op: str) -> None:
        if self._at_quant():
            t = self.peek()
            raise ParseError(
                f"ambiguous quantifier scope after {op!r}; parenthesize the "
                "quantified formula", t.line, t.col)

    def _f_unary(self, aq: bool) -> Formula:
        if self.at_sym("~"):
            tok = self.next()
            if self._at_quant():
                raise ParseError(
                    "ambiguous quantifier scope under '~'; parenthesize the "
                    "quantified formula", tok.line, tok.col)
            return Not(self._f_unary(False))
        if self._at_quant():
            if not aq:
                self._reject_bare_quant("operand")
            return self._f_quant()
        return self._f_atom()

    def _f_quant(self) -> Formula:
        self.expect_sym("(")
        kw = self.next()  # forall | exists
        is_forall = kw.text == "forall"
        is_st = False
        if self.at_sym("^st"):
            self.next()
            is_st = True

        binders: list[tuple[Var, str | None, Term | None]] = []
        pending: list[str] = []
        while True:
            vt = self.peek()
            if vt.kind != "ident":
                self.fail("expected a variable in quantifier")
            self.next()
            if not pending and not binders and (
                    self.at_sym("<=") or self.at_sym("<") or self.at_kw("in")):
                if is_st:
                    raise ParseError("bounded quantifiers cannot carry ^st",
                                     vt.line, vt.col)
                if self.at_kw("in"):
                    self.next()
                    bound = self.parse_term()
                    try:
                        bty = infer_type(bound, self._type_env())
                    except TypeCheckError as e:
                        raise ParseError(str(e), vt.line, vt.col) from None
                    if not isinstance(bty, Seq):
                        raise ParseError("'in' bound must be a sequence",
                                         vt.line, vt.col)
                    binders.append((Var(vt.text, bty.elem), "mem", bound))
                else:
                    kind = "le" if self.at_sym("<=") else "lt"
                    self.next()
                    bound = self.parse_term()
                    binders.append((Var(vt.text, N), kind, bound))
                break  # one bounded binder per prefix
            if self.at_sym(","):
                self.next()
                pending.append(vt.text)  # more names share the coming type
                continue
            self.expect_sym(":")
            ty = self.parse_type()
            for name in pending:
                binders.append((Var(name, ty), None, None))
            pending = []
            binders.append((Var(vt.text, ty), None, None))
            if self.at_sym(","):
                self.next()
                continue
            break
        self.expect_sym(")")

        old: dict[str, Var | None] = {}
        for v, _, _ in binders:
            old[v.name] = self.env.get(v.name)
            self.env[v.name] = v
        body = self.parse_formula(True)
        for name, prev in old.items():
            if prev is None:
                del self.env[name]
            else:
                self.env[name] = prev

        for v, kind, bound in reversed(binders):
            if kind is None:
                node = (ForallSt if is_st else Forall) if is_forall else \
                       (ExistsSt if is_st else Exists)
                body = node(v, body)
            else:
                node = BForall if is_forall else BExists
                body = node(v, kind, bound, body)
        return body

    def _f_atom(self) -> Formula:
        tok = self.peek()
        if self.at_kw("true"):
            self.next()
            return TRUE
        if self.at_kw("false"):
            self.next()
            return FALSE
        if self.at_kw("st"):
            self.next()
            self.expect_sym("(")
            t = self.parse_term()
            self.expect_sym(")")
            return St(t)
        if self.at_kw("eq") or self.at_kw("approx"):
            node = Eq if tok.text == "eq" else ApproxEq
            self.next()
            self.expect_sym("[")
            ty = self.parse_type()
            self.expect_sym("]")
            self.expect_sym("(")
            l = self.parse_term()
            self.expect_sym(",")
            r = self.parse_term()
            self.expect_sym(")")
            return node(ty, l, r)
        # formula reference name(args...)
        if (tok.kind == "ident" and tok.text in self.defs
                and tok.text not in self.env):
            return self._f_ref()
        # try a relation; fall back to a parenthesized formula
        save = self.pos
        env_save = dict(self.env)
        rel_err: ParseError | None = None
        try:
            return self._f_relation()
        except ParseError as e:
            rel_err = e
            self.pos = save
            self.env = env_save
        if self.at_sym("("):
            self.next()
            f = self.parse_formula(True)
            self.expect_sym(")")
            return f
        raise rel_err

    def _f_ref(self) -> Formula:
        tok = self.next()
        params, body = self.defs[tok.text]
        args: list[Term] = []
        if self.at_sym("("):
            self.next()
            if not self.at_sym(")"):
                args.append(self.parse_term())
                while self.at_sym(","):
                    self.next()
                    args.append(self.parse_term())
            self.expect_sym(")")
        if len(args) != len(params):
            raise ParseError(
                f"{tok.text} takes {len(params)} argument(s), got {len(args)}",
                tok.line, tok.col)
        tenv = self._type_env()
        for p, a in zip(params, args):
            try:
                aty = infer_type(a, tenv)
            except TypeCheckError as e:
                raise ParseError(str(e), tok.line, tok.col) from None
            if aty != p.ty:
                raise ParseError(
                    f"argument for {p.name} has type {aty}, expected {p.ty}",
                    tok.line, tok.col)
        # simultaneous substitution via fresh intermediates
        temps = [Var(f"%{i}", p.ty) for i, p in enumerate(params)]
        out = body
        for p, tmp in zip(params, temps):
            out = subst_f(out, p, tmp)
        for tmp, a in zip(temps, args):
            out = subst_f(out, tmp, a)
        return out

    def _f_relation(self) -> Formula:
        l = self.parse_term()
        tok = self.peek()
        if self.at_sym("="):
            self.next()
            return Atom("=", (l, self.parse_term()))
        if self.at_sym("!="):
            self.next()
            return Not(Atom("=", (l, self.parse_term())))
        if self.at_sym("<="):
            self.next()
            return Atom("<=", (l, self.parse_term()))
        if self.at_sym("<"):
            self.next()
            return Atom("<", (l, self.parse_term()))
        if self.at_kw("in"):
            self.next()
            return Atom("in", (l, self.parse_term()))
        raise ParseError(
            f"expected a relation, found {tok.text or 'end of input'!r}",
            tok.line, tok.col)


# ---------------------------------------------------------------------------
# public entry points

def _params_env(params: dict[str, FiniteType] | None) -> dict[str, Var]:
    return {name: Var(name, ty) for name, ty in (params or {}).items()}


def parse_type(src: str) -> FiniteType:
    p = _P(tokenize(src))
    ty = p.parse_type()
    if p.peek().kind != "eof":
        p.fail("trailing input after type")
    return ty


def parse_term(src: str, params: dict[str, FiniteType] | None = None) -> Term:
    p = _P(tokenize(src), env=_params_env(params))
    t = p.parse_term()
    if p.peek().kind != "eof":
        p.fail("trailing input after term")
    return t


def parse_formula(src: str, params: dict[str, FiniteType] | None = None,
                  defs: dict[str, tuple[list[Var], Formula]] | None = None) -> Formula:
    p = _P(tokenize(src), env=_params_env(params), defs=dict(defs or {}))
    f = p.parse_formula(True)
    if p.peek().kind != "eof":
        p.fail("trailing input after formula")
    return f


@dataclass
class Document:
    """Named formula stanzas, in definition order."""
    stanzas: dict[str, tuple[list[Var], Formula]]
    order: list[str]

    def formula(self, name: str) -> Formula:
        params, body = self.stanzas[name]
        if params:
            raise KeyError(f"stanza {name} takes parameters")
        return body

    def __contains__(self, name: str) -> bool:
        return name in self.stanzas


def parse_document(src: str) -> Document:
    p = _P(tokenize(src))
    stanzas: dict[str, tuple[list[Var], Formula]] = {}
    order: list[str] = []
    while p.peek().kind != "eof":
        tok = p.peek()
        if tok.kind != "ident":
            p.fail("expected a stanza name")
        name = tok.text
        p.next()
        params: list[Var] = []
        if p.at_sym("("):
            p.next()
            while True:
                vt = p.peek()
                if vt.kind != "ident":
                    p.fail("expected a parameter name")
                p.next()
                p.expect_sym(":")
                ty = p.parse_type()
                params.append(Var(vt.text, ty))
                if p.at_sym(","):
                    p.next()
                    continue
                break
            p.expect_sym(")")
        p.expect_sym(":=")
        if name in stanzas:
            raise ParseError(f"duplicate stanza {name}", tok.line, tok.col)
        p.env = {v.name: v for v in params}
        p.defs = stanzas
        body = p.parse_formula(True)
        p.env = {}
        stanzas[name] = (params, body)
        order.append(name)
    return Document(stanzas, order)


def parse(src: str, kind: str = "formula",
          params: dict[str, FiniteType] | None = None):
    """Parse src as a 'formula', 'term', 'type', or 'document'."""
    if kind == "formula":
        return parse_formula(src, params)
    if kind == "term":
        return parse_term(src, params)
    if kind == "type":
        return parse_type(src)
    if kind == "document":
        return parse_document(src)
    raise ValueError(f"unknown parse kind {kind!r}")
