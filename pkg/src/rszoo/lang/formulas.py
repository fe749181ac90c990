"""Formulas over finite-type terms.

The language distinguishes internal formulas (no standardness predicate
anywhere) from external ones.  Quantifiers come in four flavours:
plain, standard-relativized (``forall^st``), and bounded (by <=, <, or
membership in a sequence value).  ``Eq`` is extensional equality at a
type; ``ApproxEq`` is equality on standard arguments and is external.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .terms import (App, Term, Var, app, free_vars as term_fvs, fresh_name,
                    fst_c, num, snd_c, substitute as term_subst)
from .types import Arrow, FiniteType, N, Product, Seq, show_type


@dataclass(frozen=True)
class Atom:
    rel: str  # "=", "<=", "<" on type 0; "in" for set membership
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Eq:
    ty: FiniteType
    left: Term
    right: Term


@dataclass(frozen=True)
class ApproxEq:
    ty: FiniteType
    left: Term
    right: Term


@dataclass(frozen=True)
class St:
    arg: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class ForallSt:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class ExistsSt:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class BForall:
    var: Var
    kind: str  # "le" | "lt" | "mem"
    bound: Term
    body: "Formula"


@dataclass(frozen=True)
class BExists:
    var: Var
    kind: str
    bound: Term
    body: "Formula"


Formula = Union[Atom, Eq, ApproxEq, St, Not, And, Or, Implies,
                Forall, Exists, ForallSt, ExistsSt, BForall, BExists]

TRUE = Atom("=", (num(0), num(0)))
FALSE = Atom("<", (num(0), num(0)))

QUANTS = (Forall, Exists, ForallSt, ExistsSt)
BQUANTS = (BForall, BExists)


def neq(a: Term, b: Term) -> Formula:
    return Not(Atom("=", (a, b)))


def conj(parts: list[Formula]) -> Formula:
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: list[Formula]) -> Formula:
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def foralls(vars_: list[Var], body: Formula, node=Forall) -> Formula:
    for v in reversed(vars_):
        body = node(v, body)
    return body


def is_internal(f: Formula) -> bool:
    """True iff f mentions no standardness: no st, forall^st/exists^st, approx."""
    if isinstance(f, (St, ForallSt, ExistsSt, ApproxEq)):
        return False
    if isinstance(f, (Atom, Eq)):
        return True
    if isinstance(f, Not):
        return is_internal(f.body)
    if isinstance(f, (And, Or, Implies)):
        return is_internal(f.left) and is_internal(f.right)
    if isinstance(f, (Forall, Exists)):
        return is_internal(f.body)
    if isinstance(f, BQUANTS):
        return is_internal(f.body)
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.body)
    elif isinstance(f, (And, Or, Implies)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, QUANTS + BQUANTS):
        yield from subformulas(f.body)


def formula_terms(f: Formula) -> Iterator[Term]:
    for g in subformulas(f):
        if isinstance(g, Atom):
            yield from g.args
        elif isinstance(g, (Eq, ApproxEq)):
            yield g.left
            yield g.right
        elif isinstance(g, St):
            yield g.arg
        elif isinstance(g, BQUANTS):
            yield g.bound


def free_vars_f(f: Formula) -> frozenset[Var]:
    if isinstance(f, Atom):
        out: frozenset[Var] = frozenset()
        for t in f.args:
            out |= term_fvs(t)
        return out
    if isinstance(f, (Eq, ApproxEq)):
        return term_fvs(f.left) | term_fvs(f.right)
    if isinstance(f, St):
        return term_fvs(f.arg)
    if isinstance(f, Not):
        return free_vars_f(f.body)
    if isinstance(f, (And, Or, Implies)):
        return free_vars_f(f.left) | free_vars_f(f.right)
    if isinstance(f, QUANTS):
        return free_vars_f(f.body) - {f.var}
    if isinstance(f, BQUANTS):
        return term_fvs(f.bound) | (free_vars_f(f.body) - {f.var})
    raise TypeError(f"not a formula: {f!r}")


def subst_f(f: Formula, var: Var, repl: Term) -> Formula:
    """Capture-avoiding substitution in a formula."""
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(term_subst(t, var, repl) for t in f.args))
    if isinstance(f, Eq):
        return Eq(f.ty, term_subst(f.left, var, repl), term_subst(f.right, var, repl))
    if isinstance(f, ApproxEq):
        return ApproxEq(f.ty, term_subst(f.left, var, repl), term_subst(f.right, var, repl))
    if isinstance(f, St):
        return St(term_subst(f.arg, var, repl))
    if isinstance(f, Not):
        return Not(subst_f(f.body, var, repl))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(subst_f(f.left, var, repl), subst_f(f.right, var, repl))
    if isinstance(f, QUANTS):
        if f.var == var:
            return f
        if f.var in term_fvs(repl) and var in free_vars_f(f.body):
            taken = {v.name for v in free_vars_f(f.body) | term_fvs(repl)}
            nv = Var(fresh_name(f.var.name, taken), f.var.ty)
            return type(f)(nv, subst_f(subst_f(f.body, f.var, nv), var, repl))
        return type(f)(f.var, subst_f(f.body, var, repl))
    if isinstance(f, BQUANTS):
        bound = term_subst(f.bound, var, repl)
        if f.var == var:
            return type(f)(f.var, f.kind, bound, f.body)
        if f.var in term_fvs(repl) and var in free_vars_f(f.body):
            taken = {v.name for v in free_vars_f(f.body) | term_fvs(repl)}
            nv = Var(fresh_name(f.var.name, taken), f.var.ty)
            return type(f)(nv, f.kind, bound, subst_f(subst_f(f.body, f.var, nv), var, repl))
        return type(f)(f.var, f.kind, bound, subst_f(f.body, var, repl))
    raise TypeError(f"not a formula: {f!r}")


def rename_bound(f: Formula, taken: set[str]) -> Formula:
    """Rename bound variables (term and formula level) away from taken names."""
    if isinstance(f, QUANTS):
        if f.var.name in taken:
            nv = Var(fresh_name(f.var.name, taken | {v.name for v in free_vars_f(f.body)}), f.var.ty)
            return type(f)(nv, rename_bound(subst_f(f.body, f.var, nv), taken))
        return type(f)(f.var, rename_bound(f.body, taken))
    if isinstance(f, BQUANTS):
        if f.var.name in taken:
            nv = Var(fresh_name(f.var.name, taken | {v.name for v in free_vars_f(f.body)}), f.var.ty)
            return type(f)(nv, f.kind, f.bound, rename_bound(subst_f(f.body, f.var, nv), taken))
        return type(f)(f.var, f.kind, f.bound, rename_bound(f.body, taken))
    if isinstance(f, Not):
        return Not(rename_bound(f.body, taken))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(rename_bound(f.left, taken), rename_bound(f.right, taken))
    return f


# ---------------------------------------------------------------------------
# typechecking

class FormulaTypeError(Exception):
    pass


def typecheck_f(f: Formula, env: dict[str, FiniteType] | None = None) -> None:
    """Check well-typedness: relation arguments at type 0, bounds matching."""
    env = dict(env or {})

    def tty(t: Term) -> FiniteType:
        from .terms import infer_type, TypeCheckError
        try:
            return infer_type(t, env)
        except TypeCheckError as e:
            raise FormulaTypeError(str(e)) from None

    if isinstance(f, Atom):
        if f.rel in ("=", "<=", "<"):
            for t in f.args:
                if tty(t) != N:
                    raise FormulaTypeError(
                        f"relation {f.rel} needs type-0 arguments")
        elif f.rel == "in":
            elem, s = f.args
            ety, sty = tty(elem), tty(s)
            if ety != N or sty != Arrow(N, N):
                raise FormulaTypeError("membership needs a number and a type-1 set")
        else:
            raise FormulaTypeError(f"unknown relation {f.rel}")
        return
    if isinstance(f, (Eq, ApproxEq)):
        for side in (f.left, f.right):
            got = tty(side)
            if got != f.ty:
                raise FormulaTypeError(
                    f"equality at {show_type(f.ty)} applied to {show_type(got)}")
        return
    if isinstance(f, St):
        tty(f.arg)
        return
    if isinstance(f, Not):
        typecheck_f(f.body, env)
        return
    if isinstance(f, (And, Or, Implies)):
        typecheck_f(f.left, env)
        typecheck_f(f.right, env)
        return
    if isinstance(f, QUANTS):
        env2 = dict(env)
        env2[f.var.name] = f.var.ty
        typecheck_f(f.body, env2)
        return
    if isinstance(f, BQUANTS):
        bty = tty(f.bound)
        if f.kind in ("le", "lt"):
            if f.var.ty != N or bty != N:
                raise FormulaTypeError("<=-bounded quantifier needs type 0")
        elif f.kind == "mem":
            if bty != Seq(f.var.ty):
                raise FormulaTypeError(
                    f"membership bound of type {show_type(bty)} does not match "
                    f"variable of type {show_type(f.var.ty)}")
        else:
            raise FormulaTypeError(f"unknown bound kind {f.kind}")
        env2 = dict(env)
        env2[f.var.name] = f.var.ty
        typecheck_f(f.body, env2)
        return
    raise FormulaTypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# alpha-equality and canonical renaming

def alpha_eq_f(a: Formula, b: Formula) -> bool:
    return canon(a) == canon(b)


def canon(f: Formula) -> Formula:
    """Rename all bound variables to v0, v1, ... in traversal order."""
    counter = [0]

    def fresh(ty: FiniteType) -> Var:
        v = Var(f"v{counter[0]}", ty)
        counter[0] += 1
        return v

    def go(g: Formula) -> Formula:
        if isinstance(g, (Atom, Eq, ApproxEq, St)):
            return g
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, QUANTS):
            nv = fresh(g.var.ty)
            return type(g)(nv, go(subst_f(g.body, g.var, nv)))
        if isinstance(g, BQUANTS):
            nv = fresh(g.var.ty)
            return type(g)(nv, g.kind, g.bound, go(subst_f(g.body, g.var, nv)))
        raise TypeError(f"not a formula: {g!r}")

    return go(f)


# ---------------------------------------------------------------------------
# desugaring

def desugar_approx(f: Formula) -> Formula:
    """Expand ApproxEq into its standard-quantifier form, recursively."""
    if isinstance(f, ApproxEq):
        return _approx_at(f.ty, f.left, f.right)
    if isinstance(f, (Atom, Eq, St)):
        return f
    if isinstance(f, Not):
        return Not(desugar_approx(f.body))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(desugar_approx(f.left), desugar_approx(f.right))
    if isinstance(f, QUANTS):
        return type(f)(f.var, desugar_approx(f.body))
    if isinstance(f, BQUANTS):
        return type(f)(f.var, f.kind, f.bound, desugar_approx(f.body))
    raise TypeError(f"not a formula: {f!r}")


def _approx_at(ty: FiniteType, l: Term, r: Term) -> Formula:
    if ty == N:
        return Atom("=", (l, r))
    if isinstance(ty, Arrow):
        taken = {v.name for v in term_fvs(l) | term_fvs(r)}
        x = Var(fresh_name("u", taken), ty.dom)
        return ForallSt(x, _approx_at(ty.cod, App(l, x), App(r, x)))
    if isinstance(ty, Product):
        return And(_approx_at(ty.left, app(fst_c(ty.left, ty.right), l),
                              app(fst_c(ty.left, ty.right), r)),
                   _approx_at(ty.right, app(snd_c(ty.left, ty.right), l),
                              app(snd_c(ty.left, ty.right), r)))
    if isinstance(ty, Seq):
        return Eq(ty, l, r)
    raise TypeError(f"not a finite type: {ty!r}")
