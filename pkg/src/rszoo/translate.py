"""Two-block normal forms and the standardness translation.

A NormalForm packages ``(forall^st xs)(exists^st ys) matrix`` with an
internal matrix.  The translation maps every formula of the external
language to such a shape by five primitive clauses:

  (i)   internal formulas pass through untouched;
  (ii)  st(t) becomes (exists^st w)(w = t);
  (iii) negation trades the existential block for candidate
        functionals: from [xs; ys; m] to [Ys; xs; (forall ys in
        Ys[xs]) ~m], where each Y maps the old universals to a finite
        sequence of candidates;
  (iv)  disjunction concatenates blocks (renaming collisions apart);
  (v)   a plain universal quantifier weakens each existential to a
        sequence of candidates: from [xs; ys; m] to [xs; ys';
        (forall z)(exists ys in ys') m].

Everything else is derived: /\\, ->, exists, and the relativized
quantifiers unfold to the primitives.  With ``simplify_steps=True``
each intermediate result is normalized by ``simplify``, whose rule set
(negation pushing, vacuous-quantifier deletion, sequence-quantifier
collapse, singleton-membership collapse, and equality-guard
instantiation) is documented on the rule functions below; every rule
preserves truth in every model and strictly decreases term size, so
simplification terminates and is idempotent.
"""
from __future__ import annotations

from dataclasses import dataclass

from .lang.formulas import (And, ApproxEq, Atom, BExists, BForall, BQUANTS,
                            Eq, Exists, ExistsSt, FALSE, Forall, ForallSt,
                            Formula, Implies, Not, Or, QUANTS, St, TRUE,
                            canon, desugar_approx, free_vars_f, is_internal,
                            subst_f)
from .lang.parser import parse_formula, parse_type
from .lang.printer import show_formula
from .lang.terms import (App, Const, Term, Var, app, free_vars, get_c,
                         infer_type, len_c, seqapp_c, spine)
from .lang.types import Arrow, FiniteType, N, Seq, arrows, show_type


@dataclass(frozen=True)
class NormalForm:
    """(forall^st universals)(exists^st existentials) matrix."""
    universals: tuple[Var, ...]
    existentials: tuple[Var, ...]
    matrix: Formula

    def __post_init__(self):
        names = [v.name for v in self.universals + self.existentials]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate names in blocks: {names}")

    def show(self) -> str:
        return show_nf(self)


class TranslateError(Exception):
    pass


def nf_to_formula(nf: NormalForm) -> Formula:
    f = nf.matrix
    for v in reversed(nf.existentials):
        f = ExistsSt(v, f)
    for v in reversed(nf.universals):
        f = ForallSt(v, f)
    return f


def show_nf(nf: NormalForm) -> str:
    parts = []
    if nf.universals:
        vs = ", ".join(f"{v.name}:{show_type(v.ty)}" for v in nf.universals)
        parts.append(f"(forall^st {vs})")
    if nf.existentials:
        vs = ", ".join(f"{v.name}:{show_type(v.ty)}" for v in nf.existentials)
        parts.append(f"(exists^st {vs})")
    parts.append(show_formula(nf.matrix))
    return " ".join(parts)


def canon_nf(nf: NormalForm) -> NormalForm:
    """Canonical variable naming: universals x0.., existentials y0..,
    then canonical bound names inside the matrix."""
    m = nf.matrix
    newu, newe = [], []
    blocks = {v.name for v in nf.universals + nf.existentials}
    taken = {v.name for v in free_vars_f(m)} - blocks
    for i, v in enumerate(nf.universals):
        nv = Var(f"x{i}", v.ty)
        while nv.name in taken:
            nv = Var(nv.name + "_", v.ty)
        newu.append(nv)
    for i, v in enumerate(nf.existentials):
        nv = Var(f"y{i}", v.ty)
        while nv.name in taken:
            nv = Var(nv.name + "_", v.ty)
        newe.append(nv)
    # two-phase rename to avoid collisions between old and new names
    temps = [Var(f"%t{i}", v.ty)
             for i, v in enumerate(nf.universals + nf.existentials)]
    for old, tmp in zip(nf.universals + nf.existentials, temps):
        m = subst_f(m, old, tmp)
    for tmp, new in zip(temps, tuple(newu) + tuple(newe)):
        m = subst_f(m, tmp, new)
    return NormalForm(tuple(newu), tuple(newe), canon(m))


def alpha_eq_nf(a: NormalForm, b: NormalForm) -> bool:
    """Structural equality modulo canonical renaming (order-sensitive)."""
    ca, cb = canon_nf(a), canon_nf(b)
    return (ca.universals == cb.universals
            and ca.existentials == cb.existentials
            and ca.matrix == cb.matrix)


def nf_signature(nf: NormalForm) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Quantifier signature: the two blocks' types, sorted (tuple order
    is irrelevant for comparisons)."""
    return (tuple(sorted(show_type(v.ty) for v in nf.universals)),
            tuple(sorted(show_type(v.ty) for v in nf.existentials)))


# ---------------------------------------------------------------------------
# fresh-name supply

class _Names:
    def __init__(self, forbidden: set[str]):
        self.used = set(forbidden)

    def fresh(self, base: str, ty: FiniteType) -> Var:
        if base not in self.used:
            self.used.add(base)
            return Var(base, ty)
        i = 1
        while f"{base}{i}" in self.used:
            i += 1
        self.used.add(f"{base}{i}")
        return Var(f"{base}{i}", ty)


def _all_names(f: Formula) -> set[str]:
    out: set[str] = set()

    def go_t(t: Term):
        if isinstance(t, Var):
            out.add(t.name)
        elif isinstance(t, App):
            go_t(t.fn)
            go_t(t.arg)
        elif hasattr(t, "var"):  # Abs
            out.add(t.var.name)
            go_t(t.body)

    def go(g: Formula):
        if isinstance(g, Atom):
            for t in g.args:
                go_t(t)
        elif isinstance(g, (Eq, ApproxEq)):
            go_t(g.left)
            go_t(g.right)
        elif isinstance(g, St):
            go_t(g.arg)
        elif isinstance(g, Not):
            go(g.body)
        elif isinstance(g, (And, Or, Implies)):
            go(g.left)
            go(g.right)
        elif isinstance(g, QUANTS):
            out.add(g.var.name)
            go(g.body)
        elif isinstance(g, BQUANTS):
            out.add(g.var.name)
            go_t(g.bound)
            go(g.body)

    go(f)
    return out


# ---------------------------------------------------------------------------
# the translation

def sst_translate(f: Formula, simplify_steps: bool = True,
                  trace: list | None = None) -> NormalForm:
    """Translate f into a NormalForm.

    With simplify_steps the intermediate result of every combining
    clause is normalized; the raw mode keeps every Herbrand functional
    for audit.  If trace is a list, (subformula, normal form) pairs are
    appended in evaluation order.

    Internal formulas come back verbatim, with empty blocks.
    """
    if is_internal(f):
        return _post(f, NormalForm((), (), f), False, trace)
    f = desugar_approx(f)
    names = _Names(_all_names(f))
    return _tr(f, simplify_steps, names, trace)


def _post(f: Formula, nf: NormalForm, simp: bool, trace) -> NormalForm:
    if simp:
        nf = simplify(nf)
    if trace is not None:
        trace.append((f, nf))
    return nf


def _tr(f: Formula, simp: bool, names: _Names, trace) -> NormalForm:
    if is_internal(f):
        return _post(f, NormalForm((), (), f), False, trace)
    if isinstance(f, St):
        ty = infer_type(f.arg, {})
        w = names.fresh("w", ty)
        eq: Formula = Atom("=", (w, f.arg)) if ty == N else Eq(ty, w, f.arg)
        return _post(f, NormalForm((), (w,), eq), False, trace)
    if isinstance(f, Not):
        nf = _tr(f.body, simp, names, trace)
        return _post(f, _negate(nf, names), simp, trace)
    if isinstance(f, Or):
        a = _tr(f.left, simp, names, trace)
        b = _tr(f.right, simp, names, trace)
        return _post(f, _disjoin(a, b, names), simp, trace)
    if isinstance(f, Forall):
        nf = _tr(f.body, simp, names, trace)
        return _post(f, _univ(f.var, nf, names), simp, trace)
    # derived connectives
    if isinstance(f, And):
        return _tr(Not(Or(Not(f.left), Not(f.right))), simp, names, trace)
    if isinstance(f, Implies):
        return _tr(Or(Not(f.left), f.right), simp, names, trace)
    if isinstance(f, Exists):
        return _tr(Not(Forall(f.var, Not(f.body))), simp, names, trace)
    if isinstance(f, ForallSt):
        return _tr(Forall(f.var, Or(Not(St(f.var)), f.body)), simp, names, trace)
    if isinstance(f, ExistsSt):
        return _tr(Not(Forall(f.var, Or(Not(St(f.var)), Not(f.body)))),
                   simp, names, trace)
    if isinstance(f, BForall):
        return _tr(Forall(f.var, Or(Not(_guard(f)), f.body)), simp, names, trace)
    if isinstance(f, BExists):
        return _tr(Not(Forall(f.var, Or(Not(_guard(f)), Not(f.body)))),
                   simp, names, trace)
    raise TranslateError(f"cannot translate: {f!r}")


def _guard(f) -> Formula:
    if f.kind == "le":
        return Atom("<=", (f.var, f.bound))
    if f.kind == "lt":
        return Atom("<", (f.var, f.bound))
    # membership in a sequence value
    i = Var("_i", N)
    entry = app(get_c(f.var.ty), f.bound, i)
    eq: Formula = (Atom("=", (entry, f.var)) if f.var.ty == N
                   else Eq(f.var.ty, entry, f.var))
    return BExists(i, "lt", App(len_c(f.var.ty), f.bound), eq)


def _negate(nf: NormalForm, names: _Names) -> NormalForm:
    """Clause (iii): Herbrandize the existential block."""
    xs, ys, m = nf.universals, nf.existentials, nf.matrix
    fns: list[Var] = []
    body: Formula = Not(m)
    for y in reversed(ys):
        fty = arrows([x.ty for x in xs], Seq(y.ty))
        Y = names.fresh(y.name.upper() if y.name.upper() != y.name else "W",
                        fty)
        fns.insert(0, Y)
        bound: Term = Y
        for x in xs:
            bty = infer_type(bound, {})
            assert isinstance(bty, Arrow)
            bound = app(seqapp_c(bty.dom, bty.cod), bound, x)
        body = BForall(y, "mem", bound, body)
    return NormalForm(tuple(fns), xs, body)


def _disjoin(a: NormalForm, b: NormalForm, names: _Names) -> NormalForm:
    """Clause (iv): concatenate blocks, disjoin matrices."""
    clash = ({v.name for v in a.universals + a.existentials}
             | {v.name for v in free_vars_f(a.matrix)})
    bu, be, bm = list(b.universals), list(b.existentials), b.matrix
    for i, v in enumerate(bu):
        if v.name in clash:
            nv = names.fresh(v.name, v.ty)
            bm = subst_f(bm, v, nv)
            bu[i] = nv
    for i, v in enumerate(be):
        if v.name in clash:
            nv = names.fresh(v.name, v.ty)
            bm = subst_f(bm, v, nv)
            be[i] = nv
    return NormalForm(a.universals + tuple(bu), a.existentials + tuple(be),
                      Or(a.matrix, bm))


def _univ(z: Var, nf: NormalForm, names: _Names) -> NormalForm:
    """Clause (v): candidates for each existential, z universal inside."""
    if z in nf.universals + nf.existentials:
        raise TranslateError(f"shadowed quantifier variable {z.name}")
    if not nf.existentials:
        return NormalForm(nf.universals, (), Forall(z, nf.matrix))
    lifts = [names.fresh(y.name + "s", Seq(y.ty)) for y in nf.existentials]
    body = nf.matrix
    for y, ys in zip(reversed(nf.existentials), reversed(lifts)):
        body = BExists(y, "mem", ys, body)
    return NormalForm(nf.universals, tuple(lifts), Forall(z, body))


# ---------------------------------------------------------------------------
# the simplifier

def simplify(nf: NormalForm) -> NormalForm:
    """Normalize: push negations, then apply size-decreasing rules to a
    fixpoint (vacuous deletion, sequence collapse, singleton
    membership, equality-guard instantiation)."""
    while True:
        m = push_neg(nf.matrix)
        nf = NormalForm(nf.universals, nf.existentials, m)
        out = _step(nf)
        if out is None:
            return nf
        nf = out


def _step(nf: NormalForm) -> NormalForm | None:
    out = rule_drop_unused(nf)
    if out is not None:
        return out
    out = rule_seq_collapse(nf)
    if out is not None:
        return out
    m = _rewrite_first(nf.matrix)
    if m is not None:
        return NormalForm(nf.universals, nf.existentials, m)
    return None


def push_neg(f: Formula) -> Formula:
    """Move negations inward; leaves positive implications alone and
    stops at atoms."""
    if isinstance(f, Not):
        g = f.body
        if isinstance(g, Not):
            return push_neg(g.body)
        if isinstance(g, And):
            return Or(push_neg(Not(g.left)), push_neg(Not(g.right)))
        if isinstance(g, Or):
            return And(push_neg(Not(g.left)), push_neg(Not(g.right)))
        if isinstance(g, Implies):
            # kept opaque so a second negation restores the displayed
            # implication verbatim
            return Not(Implies(push_neg(g.left), push_neg(g.right)))
        if isinstance(g, Forall):
            return Exists(g.var, push_neg(Not(g.body)))
        if isinstance(g, Exists):
            return Forall(g.var, push_neg(Not(g.body)))
        if isinstance(g, BForall):
            return BExists(g.var, g.kind, g.bound, push_neg(Not(g.body)))
        if isinstance(g, BExists):
            return BForall(g.var, g.kind, g.bound, push_neg(Not(g.body)))
        return Not(push_neg(g))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(push_neg(f.left), push_neg(f.right))
    if isinstance(f, QUANTS):
        return type(f)(f.var, push_neg(f.body))
    if isinstance(f, BQUANTS):
        return type(f)(f.var, f.kind, f.bound, push_neg(f.body))
    return f


def rule_drop_unused(nf: NormalForm) -> NormalForm | None:
    """Delete block variables that the matrix never mentions (every
    type is inhabited by a standard element, so this preserves truth)."""
    fv = free_vars_f(nf.matrix)
    keep_u = tuple(v for v in nf.universals if v in fv)
    keep_e = tuple(v for v in nf.existentials if v in fv)
    if keep_u != nf.universals or keep_e != nf.existentials:
        return NormalForm(keep_u, keep_e, nf.matrix)
    return None


def rule_seq_collapse(nf: NormalForm) -> NormalForm | None:
    """Collapse a candidate-sequence block variable whose only use is
    a membership bound along the root quantifier prefix:

        (forall^st W:s*) P (forall w in W) m   -->   (forall^st w:s) P m

    and dually for the existential block.  When the bound variable w
    actually occurs in m, the prefix P must consist of quantifiers of
    the same flavour only (every element of a standard sequence is
    standard, which gives the universal direction; a witness drawn
    from a standard sequence is standard, which gives the existential
    one) — across an opposite-flavour quantifier the collapse would
    trade a single candidate sequence for a per-instance choice.  When
    w does not occur in m the bounded quantifier is simply deleted,
    over any prefix: the singleton sequence <0> witnesses the block
    variable."""
    prefix: list = []
    m = nf.matrix
    names = {v.name for v in nf.universals + nf.existentials}
    while isinstance(m, (QUANTS, BQUANTS)):
        if isinstance(m, BQUANTS):
            W, v = m.bound, m.var
            is_univ = isinstance(m, BForall) and isinstance(W, Var) \
                and W in nf.universals
            is_exis = isinstance(m, BExists) and isinstance(W, Var) \
                and W in nf.existentials
            if ((is_univ or is_exis) and m.kind == "mem"
                    and W not in free_vars_f(m.body)
                    and W not in _prefix_fvs(prefix)
                    and all(p.var != W for p in prefix)):
                vacuous = v not in free_vars_f(m.body)
                flavor = (Forall, BForall) if is_univ else (Exists, BExists)
                pure = all(isinstance(p, flavor) for p in prefix)
                ok_names = (v not in free_vars_f(nf.matrix)
                            and v not in _prefix_fvs(prefix)
                            and v.name not in names - {W.name})
                if vacuous or (pure and ok_names):
                    rest = m.body
                    for p in reversed(prefix):
                        if isinstance(p, BQUANTS):
                            rest = type(p)(p.var, p.kind, p.bound, rest)
                        else:
                            rest = type(p)(p.var, rest)
                    if vacuous:
                        # W becomes unused and rule_drop_unused removes it
                        return NormalForm(nf.universals, nf.existentials,
                                          rest)
                    if is_univ:
                        us = tuple(v if u == W else u for u in nf.universals)
                        return NormalForm(us, nf.existentials, rest)
                    es = tuple(v if e == W else e for e in nf.existentials)
                    return NormalForm(nf.universals, es, rest)
        prefix.append(m)
        m = m.body
    return None


def _prefix_fvs(prefix: list) -> set[Var]:
    out: set[Var] = set()
    for p in prefix:
        if isinstance(p, BQUANTS):
            out |= set(free_vars(p.bound))
    return out


def _rewrite_first(f: Formula) -> Formula | None:
    """Apply the first applicable matrix rule anywhere in f (leftmost,
    outermost)."""
    out = _rw_here(f)
    if out is not None:
        return out
    if isinstance(f, Not):
        b = _rewrite_first(f.body)
        return Not(b) if b is not None else None
    if isinstance(f, (And, Or, Implies)):
        l = _rewrite_first(f.left)
        if l is not None:
            return type(f)(l, f.right)
        r = _rewrite_first(f.right)
        if r is not None:
            return type(f)(f.left, r)
        return None
    if isinstance(f, QUANTS):
        b = _rewrite_first(f.body)
        return type(f)(f.var, b) if b is not None else None
    if isinstance(f, BQUANTS):
        b = _rewrite_first(f.body)
        return type(f)(f.var, f.kind, f.bound, b) if b is not None else None
    return None


def _rw_here(f: Formula) -> Formula | None:
    # vacuous quantifier deletion (unbounded and <=-bounded: domains
    # are never empty)
    if isinstance(f, (Forall, Exists)) and f.var not in free_vars_f(f.body):
        return f.body
    if isinstance(f, BQUANTS) and f.kind == "le" \
            and f.var not in free_vars_f(f.body):
        return f.body
    # singleton membership collapse
    if isinstance(f, BQUANTS) and f.kind == "mem":
        t = _singleton_entry(f.bound)
        if t is not None:
            return subst_f(f.body, f.var, t)
    # equality-guard instantiation
    if isinstance(f, Exists):
        out = _guard_exists(f)
        if out is not None:
            return out
    if isinstance(f, Forall):
        out = _guard_forall(f)
        if out is not None:
            return out
    # re-bounding: a numeric bound guard turns a plain quantifier back
    # into a bounded one.  For the universal case with a strict bound
    # the prefix must be empty: the domain below the bound may then be
    # empty, and a bounded-exists prefix would not survive that.
    if isinstance(f, Forall) and f.var.ty == N:
        prefix, core = _walk_prefix(f.body, f.var)
        if prefix is not None:
            for g in _disjuncts(core):
                kt = _is_bound_guard(g.body, f.var) \
                    if isinstance(g, Not) else None
                if kt is None or (kt[0] == "lt" and prefix):
                    continue
                if free_vars(kt[1]) & _bound_vars_of_prefix(prefix):
                    continue
                _, rest = _drop_leaf(core, g, Or)
                if rest is None:
                    rest = FALSE
                return BForall(f.var, kt[0], kt[1],
                               _rebuild_prefix(prefix, rest))
    if isinstance(f, Exists) and f.var.ty == N:
        prefix, core = _walk_prefix(f.body, f.var)
        if prefix is not None:
            for g in _conjuncts(core):
                kt = _is_bound_guard(g, f.var)
                if kt is None:
                    continue
                if free_vars(kt[1]) & _bound_vars_of_prefix(prefix):
                    continue
                _, rest = _drop_leaf(core, g, And)
                if rest is None:
                    rest = TRUE
                return BExists(f.var, kt[0], kt[1],
                               _rebuild_prefix(prefix, rest))
    return None


def _is_bound_guard(g: Formula, v: Var) -> tuple[str, Term] | None:
    """g is (v <= t) or (v < t) with v not free in t."""
    if isinstance(g, Atom) and g.rel in ("<=", "<") and g.args[0] == v:
        t = g.args[1]
        if v not in free_vars(t):
            return ("le" if g.rel == "<=" else "lt", t)
    return None


def _singleton_entry(bound: Term) -> Term | None:
    head, args = spine(bound)
    if (isinstance(head, Const) and head.name == "append" and len(args) == 2
            and isinstance(args[0], Const) and args[0].name == "empty"):
        return args[1]
    return None


def _walk_prefix(body: Formula, x: Var):
    """Quantifier prefix (not binding x, bounds avoiding x) and core."""
    prefix = []
    while True:
        if isinstance(body, QUANTS):
            if body.var == x:
                return None, None
            prefix.append(("q", body))
            body = body.body
        elif isinstance(body, BQUANTS):
            if body.var == x or x in free_vars(body.bound):
                return None, None
            prefix.append(("b", body))
            body = body.body
        else:
            return prefix, body


def _rebuild_prefix(prefix, core: Formula) -> Formula:
    for tag, p in reversed(prefix):
        if tag == "q":
            core = type(p)(p.var, core)
        else:
            core = type(p)(p.var, p.kind, p.bound, core)
    return core


def _bound_vars_of_prefix(prefix) -> set[Var]:
    return {p.var for _, p in prefix}


def _is_eq_guard(g: Formula, x: Var):
    """g is (x = t) or (t = x) with t a variable other than x; returns t."""
    if isinstance(g, Atom) and g.rel == "=":
        a, b = g.args
    elif isinstance(g, Eq):
        a, b = g.left, g.right
    else:
        return None
    for l, r in ((a, b), (b, a)):
        if l == x and isinstance(r, Var) and r != x:
            return r
    return None


def _conjuncts(f: Formula) -> list[Formula]:
    return _conjuncts(f.left) + _conjuncts(f.right) if isinstance(f, And) else [f]


def _disjuncts(f: Formula) -> list[Formula]:
    return _disjuncts(f.left) + _disjuncts(f.right) if isinstance(f, Or) else [f]


def _drop_leaf(tree: Formula, leaf: Formula, cls) -> tuple[bool, Formula | None]:
    """Remove one occurrence (by identity) of leaf from an And/Or tree,
    keeping the remaining associativity intact."""
    if tree is leaf:
        return True, None
    if isinstance(tree, cls):
        found, nl = _drop_leaf(tree.left, leaf, cls)
        if found:
            return True, tree.right if nl is None else cls(nl, tree.right)
        found, nr = _drop_leaf(tree.right, leaf, cls)
        if found:
            return True, tree.left if nr is None else cls(tree.left, nr)
    return False, tree


def _guard_exists(f: Exists) -> Formula | None:
    """(exists x) Q [(x = t) /\\ m]  ->  Q m[x := t]   (t a variable)."""
    x = f.var
    prefix, core = _walk_prefix(f.body, x)
    if prefix is None:
        return None
    bound = _bound_vars_of_prefix(prefix)
    for g in _conjuncts(core):
        t = _is_eq_guard(g, x)
        if t is not None and t not in bound:
            _, new_core = _drop_leaf(core, g, And)
            if new_core is None:
                new_core = TRUE
            return subst_f(_rebuild_prefix(prefix, new_core), x, t)
    return None


def _guard_forall(f: Forall) -> Formula | None:
    """(forall x) Q [(x != t) \\/ m]  ->  Q m[x := t]   (t a variable)."""
    x = f.var
    prefix, core = _walk_prefix(f.body, x)
    if prefix is None:
        return None
    bound = _bound_vars_of_prefix(prefix)
    for g in _disjuncts(core):
        if not isinstance(g, Not):
            continue
        t = _is_eq_guard(g.body, x)
        if t is not None and t not in bound:
            _, new_core = _drop_leaf(core, g, Or)
            if new_core is None:
                new_core = FALSE
            return subst_f(_rebuild_prefix(prefix, new_core), x, t)
    return None


# ---------------------------------------------------------------------------
# .nf files

def parse_nf(text: str, params: dict[str, FiniteType] | None = None
             ) -> NormalForm:
    """Parse the three-line normal-form format:

        universals: f:1, Psi:1 -> 1
        existentials: y:0
        matrix: <formula>

    Block lines may be omitted when empty; '#' starts a comment."""
    keys = {"universals": [], "existentials": [], "matrix": None}
    current = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        head, _, rest = line.partition(":")
        if head.strip() in keys and _ == ":":
            current = head.strip()
            if current == "matrix":
                keys["matrix"] = rest.strip()
            else:
                keys[current].extend(
                    p.strip() for p in rest.split(",") if p.strip())
            continue
        if current == "matrix":
            keys["matrix"] = (keys["matrix"] + " " + line.strip()).strip()
        elif current is not None:
            keys[current].extend(p.strip() for p in line.split(",")
                                 if p.strip())
        else:
            raise TranslateError(f"unexpected line in normal form: {raw!r}")
    if keys["matrix"] is None:
        raise TranslateError("normal form needs a matrix: line")

    def decls(items: list[str]) -> tuple[Var, ...]:
        out = []
        for it in items:
            name, sep, ty = it.partition(":")
            if not sep:
                raise TranslateError(f"expected name:type, got {it!r}")
            out.append(Var(name.strip(), parse_type(ty.strip())))
        return tuple(out)

    us = decls(keys["universals"])
    es = decls(keys["existentials"])
    env = dict(params or {})
    env.update({v.name: v.ty for v in us + es})
    m = parse_formula(keys["matrix"], params=env)
    if not is_internal(m):
        raise TranslateError("normal-form matrix must be internal")
    return NormalForm(us, es, m)


def show_nf_file(nf: NormalForm) -> str:
    lines = []
    if nf.universals:
        lines.append("universals: " + ", ".join(
            f"{v.name}:{show_type(v.ty)}" for v in nf.universals))
    if nf.existentials:
        lines.append("existentials: " + ", ".join(
            f"{v.name}:{show_type(v.ty)}" for v in nf.existentials))
    lines.append("matrix: " + show_formula(nf.matrix))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# the worked chain

def golden_chain_check() -> list[dict]:
    """Trace the translation through a fixed ladder of formulas about a
    unary predicate P(.) = 0 and check every stage against a frozen
    expectation.

    Stages marked ``raw`` apply a single translation clause without
    simplification, stages marked ``mid`` apply one named simplifier
    rule, and unmarked stages are the fully simplified output; the
    ladder ends by checking that the closed two-block form is a
    fixpoint of the whole translation.  Returns one record per stage
    with the computed and expected forms and an ``ok`` flag."""
    P1 = {"P": parse_type("1")}
    P2 = {"Q": parse_type("0 -> 0 -> 0")}
    y0 = {"y": N}
    x0 = {"x": N}

    def nf(us: str, es: str, m: str, params: dict) -> NormalForm:
        text = ""
        if us:
            text += f"universals: {us}\n"
        if es:
            text += f"existentials: {es}\n"
        text += f"matrix: {m}\n"
        return parse_nf(text, params)

    records: list[dict] = []

    def check(name: str, got: NormalForm, expected: NormalForm,
              shown: str) -> None:
        records.append({
            "name": name,
            "source": shown,
            "got": show_nf(got),
            "expected": show_nf(expected),
            "ok": alpha_eq_nf(got, expected),
        })

    # 1. a bare standardness assertion
    f1 = parse_formula("st(y)", params=y0)
    check("st", sst_translate(f1), nf("", "w:0", "w = y", y0),
          show_formula(f1))

    # 2. its negation: the raw form quantifies over candidate
    #    sequences, the simplified form collapses the sequence to a
    #    single excluded point
    f2 = parse_formula("~st(y)", params=y0)
    check("not-st-raw", sst_translate(f2, simplify_steps=False),
          nf("W:0*", "", "(forall w in W) w != y", y0), show_formula(f2))
    check("not-st", sst_translate(f2), nf("w:0", "", "w != y", y0),
          show_formula(f2))

    # 3. disjunction with an internal side
    f3 = parse_formula("~st(y) \\/ ~(P(y) = 0)", params={**y0, **P1})
    nf3 = sst_translate(f3)
    check("or", nf3, nf("w:0", "", "w != y \\/ P(y) != 0", {**y0, **P1}),
          show_formula(f3))

    # 4. a plain universal over the disjunction.  There is no witness
    #    block to lift, so the clause output is already the readable
    #    excluded-point form; the full simplifier goes one step further
    #    and instantiates the guard.
    f4 = parse_formula("(forall y:0) (~st(y) \\/ ~(P(y) = 0))", params=P1)
    supply4 = _Names(_all_names(f4)
                     | {v.name for v in nf3.universals + nf3.existentials})
    raw4 = _univ(Var("y", N), nf3, supply4)
    check("forall-mid", raw4,
          nf("w:0", "", "(forall y:0) (w != y \\/ P(y) != 0)", P1),
          show_formula(f4))
    check("forall", sst_translate(f4), nf("w:0", "", "P(w) != 0", P1),
          show_formula(f4))

    # 5. a relativized existential: negating stage forall-mid swaps the
    #    blocks, and pushing the negation inward exposes an equality
    #    guard that instantiation then removes
    f5 = parse_formula("(exists^st y:0) P(y) = 0", params=P1)
    neg5 = _negate(raw4, _Names({"y", "w", "P"}))
    mid5 = NormalForm(neg5.universals, neg5.existentials,
                      push_neg(neg5.matrix))
    check("exists-st-mid", mid5,
          nf("", "w:0", "(exists y:0) (w = y /\\ P(y) = 0)", P1),
          show_formula(f5))
    check("exists-st", sst_translate(f5), nf("", "w:0", "P(w) = 0", P1),
          show_formula(f5))

    # 6. the body of a relativized universal
    f6 = parse_formula("~st(x) \\/ ((exists^st y:0) Q(x, y) = 0)",
                       params={**x0, **P2})
    nf6 = sst_translate(f6)
    check("body", nf6,
          nf("v:0", "w:0", "v != x \\/ Q(x, w) = 0", {**x0, **P2}),
          show_formula(f6))

    # 7. closing the universal: raw lift, one guard instantiation
    #    (take x equal to the excluded point), and the final sequence
    #    collapse, which lands back on the shape we started from
    f7 = parse_formula(
        "(forall x:0) (~st(x) \\/ ((exists^st y:0) Q(x, y) = 0))",
        params=P2)
    supply = _Names(_all_names(f7)
                    | {v.name for v in nf6.universals + nf6.existentials})
    raw7 = _univ(Var("x", N), nf6, supply)
    check("close-raw", raw7,
          nf("v:0", "ws:0*",
             "(forall x:0) (exists w in ws) (v != x \\/ Q(x, w) = 0)",
             P2),
          show_formula(f7))
    mid_m = _rewrite_first(push_neg(raw7.matrix))
    assert mid_m is not None
    mid7 = NormalForm(raw7.universals, raw7.existentials, mid_m)
    check("close-mid", mid7,
          nf("v:0", "ws:0*", "(exists w in ws) Q(v, w) = 0", P2),
          show_formula(f7))
    final7 = simplify(mid7)
    check("close", final7, nf("v:0", "w:0", "Q(v, w) = 0", P2),
          show_formula(f7))
    check("close-direct", sst_translate(f7), final7, show_formula(f7))

    # the closed form is a fixpoint: translating it again changes
    # nothing
    back = sst_translate(nf_to_formula(final7))
    check("fixpoint", back, final7, show_nf(final7))

    return records

