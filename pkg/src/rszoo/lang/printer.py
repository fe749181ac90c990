"""Canonical display of terms and formulas.

The output re-parses to an alpha-equal object: parentheses follow the
grammar's precedence, quantified operands of binary connectives are
always parenthesized, and polymorphic constants regain their bracketed
type index.
"""
from __future__ import annotations

from .formulas import (And, ApproxEq, Atom, BExists, BForall, BQUANTS, Eq,
                       Exists, ExistsSt, Forall, ForallSt, Formula, Implies,
                       Not, Or, QUANTS, St)
from .terms import Abs, App, Const, Term, Var, is_numeral, spine
from .types import Arrow, FiniteType, Product, Seq, show_type


def _const_str(c: Const) -> str:
    if is_numeral(c) or c.name in ("succ", "seqmax", "initseg", "run", "muscan"):
        return c.name
    ty = c.ty
    if c.name == "rec":
        assert isinstance(ty, Arrow)
        return f"rec[{show_type(ty.dom)}]"
    if c.name == "empty":
        assert isinstance(ty, Seq)
        return f"empty[{show_type(ty.elem)}]"
    if c.name in ("append", "len", "get"):
        assert isinstance(ty, Arrow) and isinstance(ty.dom, Seq)
        return f"{c.name}[{show_type(ty.dom.elem)}]"
    if c.name == "pair":
        assert isinstance(ty, Arrow) and isinstance(ty.cod, Arrow)
        return f"pair[{show_type(ty.dom)},{show_type(ty.cod.dom)}]"
    if c.name in ("fst", "snd"):
        assert isinstance(ty, Arrow) and isinstance(ty.dom, Product)
        return f"{c.name}[{show_type(ty.dom.left)},{show_type(ty.dom.right)}]"
    if c.name == "seqapp":
        assert isinstance(ty, Arrow) and isinstance(ty.dom, Arrow)
        return f"seqapp[{show_type(ty.dom.dom)},{show_type(ty.dom.cod)}]"
    return c.name


def _is_seqapp(t: Term) -> bool:
    return isinstance(t, Const) and t.name == "seqapp"


def show_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return _const_str(t)
    if isinstance(t, Abs):
        return f"\\{t.var.name}:{show_type(t.var.ty)}. {show_term(t.body)}"
    head, args = spine(t)
    # candidate application: seqapp chains display as Y[x1,...,xn]
    if _is_seqapp(head) and len(args) == 2:
        fn, arg = args
        idx = [arg]
        inner_head, inner_args = spine(fn)
        while _is_seqapp(inner_head) and len(inner_args) == 2:
            fn = inner_args[0]
            idx.append(inner_args[1])
            inner_head, inner_args = spine(fn)
        idx.reverse()
        return f"{_show_head(fn)}[{', '.join(show_term(a) for a in idx)}]"
    return f"{_show_head(head)}({', '.join(show_term(a) for a in args)})"


def _show_head(t: Term) -> str:
    # only abstraction heads need parentheses: (\x:T. b)(a)
    s = show_term(t)
    return f"({s})" if isinstance(t, Abs) else s


_REL = {"=": "=", "<=": "<=", "<": "<", "in": "in"}


def show_formula(f: Formula) -> str:
    return _show_f(f, 0)


# precedence levels: 0 = implies, 1 = or, 2 = and, 3 = unary/atom
def _show_f(f: Formula, level: int) -> str:
    if isinstance(f, Atom):
        a, b = f.args
        return f"{show_term(a)} {_REL[f.rel]} {show_term(b)}"
    if isinstance(f, Not) and isinstance(f.body, Atom) and f.body.rel == "=":
        a, b = f.body.args
        return f"{show_term(a)} != {show_term(b)}"
    if isinstance(f, Eq):
        return f"eq[{show_type(f.ty)}]({show_term(f.left)}, {show_term(f.right)})"
    if isinstance(f, ApproxEq):
        return f"approx[{show_type(f.ty)}]({show_term(f.left)}, {show_term(f.right)})"
    if isinstance(f, St):
        return f"st({show_term(f.arg)})"
    if isinstance(f, Not):
        if isinstance(f.body, Atom) and f.body.rel != "=":
            return f"~({_show_f(f.body, 0)})"
        return f"~{_show_f(f.body, 3)}"
    if isinstance(f, Implies):
        s = f"{_show_f(f.left, 1)} -> {_show_f(f.right, 0)}"
        return f"({s})" if level > 0 else s
    if isinstance(f, Or):
        s = f"{_show_f(f.left, 1)} \\/ {_show_f(f.right, 2)}"
        return f"({s})" if level > 1 else s
    if isinstance(f, And):
        s = f"{_show_f(f.left, 2)} /\\ {_show_f(f.right, 3)}"
        return f"({s})" if level > 2 else s
    if isinstance(f, QUANTS):
        kw = "forall" if isinstance(f, (Forall, ForallSt)) else "exists"
        st = "^st" if isinstance(f, (ForallSt, ExistsSt)) else ""
        groups = [(f.var, kw, st)]
        body = f.body
        while isinstance(body, QUANTS) and _quant_tag(body) == (kw, st):
            groups.append((body.var, kw, st))
            body = body.body
        names = ", ".join(f"{v.name}:{show_type(v.ty)}" for v, _, _ in groups)
        s = f"({kw}{st} {names}) {_show_f(body, 0)}"
        return f"({s})" if level > 0 else s
    if isinstance(f, BQUANTS):
        kw = "forall" if isinstance(f, BForall) else "exists"
        op = {"le": "<=", "lt": "<", "mem": "in"}[f.kind]
        s = (f"({kw} {f.var.name} {op} {show_term(f.bound)}) "
             f"{_show_f(f.body, 0)}")
        return f"({s})" if level > 0 else s
    raise TypeError(f"not a formula: {f!r}")


def _quant_tag(f: Formula) -> tuple[str, str]:
    kw = "forall" if isinstance(f, (Forall, ForallSt, BForall)) else "exists"
    st = "^st" if isinstance(f, (ForallSt, ExistsSt)) else ""
    return (kw, st)
