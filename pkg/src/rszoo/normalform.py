"""Shape pipeline: problem statements to two-block normal forms.

A *problem statement* is a formula (forall X..)(exists Y..) phi with phi
internal: for every instance there is a solution.  The pipeline turns
such a statement into the two-block normal form that the proof scripts
and the extractor work with:

1. ``uniformize``       - flip the quantifiers through a solution
                          functional: (exists Psi)(forall X) phi(X, Psi(X));
                          then relativize both blocks to standard objects
                          and conjoin extensionality of Psi up to ``approx``.
2. ``resolve_approx``   - expand the approx-implications into explicit
                          prefix comparisons with a modulus: for each
                          output position k some agreement length N.
3. ``herbrandize_choice`` - trade the inner standard existential for a
                          standard functional (candidate sequences first,
                          then a max-collapse at numeric type).
4. ``prenex_to_normal`` - pull every standard quantifier of the final
                          implication to the front, flipping those in
                          negative position, consequent first.

The pipeline refuses anything outside this grammar; implication-shaped
statements (hypothesis to bounded conclusion) enter through
``contrapose_accept`` instead.

The quantifier exchanges in step 4 are classical equivalences over
nonempty finite ranges, so the output stays truth-equivalent to its
input in any MiniModel whose standard populations at the quantified
types are nonempty; tests check this by brute force at small caps.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .lang.formulas import (And, ApproxEq, Atom, BExists, BForall, Eq,
                            Exists, ExistsSt, Forall, ForallSt, Formula,
                            Implies, Not, Or, St, conj, free_vars_f,
                            is_internal, subformulas, subst_f)
from .lang.terms import (Abs, App, Term, Var, app, fresh_name, num,
                         INITSEG, NUNL, NUNR)
from .lang.types import Arrow, FiniteType, N, Product, Seq, arrows, show_type
from .translate import NormalForm, _all_names, nf_to_formula


class NormalFormError(Exception):
    pass


# ---------------------------------------------------------------------------
# the fixed target: bounded-zero transfer

@dataclass
class TransferInstance:
    """The transfer statement for zeros of a standard table, in its raw
    implication shape and its two-block normal shape.

    The two are classically equivalent; ``check_equivalence`` confirms
    the equivalence at finite scale by evaluating both in a model and
    records the outcome.
    """
    transfer: Formula
    normal: NormalForm
    equivalence_checked: bool = False

    def check_equivalence(self, model) -> bool:
        from .interp import eval_formula
        a = eval_formula(model, self.transfer)
        b = eval_formula(model, nf_to_formula(self.normal))
        self.equivalence_checked = (a == b)
        return self.equivalence_checked


def trans_instance() -> TransferInstance:
    f, x, y, z = (Var("f", Arrow(N, N)), Var("x", N), Var("y", N),
                  Var("z", N))
    fx0 = Atom("=", (App(f, x), num(0)))
    fz0 = Atom("=", (App(f, z), num(0)))
    transfer = ForallSt(f, Implies(
        ForallSt(x, Not(fx0)),
        Forall(x, Not(fx0))))
    matrix = Implies(Exists(x, fx0), BExists(z, "le", y, fz0))
    return TransferInstance(transfer, NormalForm((f,), (y,), matrix))


# ---------------------------------------------------------------------------
# step 1: uniformize

@dataclass
class UniformPrinciple:
    """A problem statement with its functional and relativized variants.

    ``functionals`` lists the solution functionals introduced for the
    original existentials (empty when the statement had none)."""
    base: Formula
    uniform: Formula
    strong: Formula
    functionals: tuple[Var, ...] = ()


def _strip(f: Formula, node) -> tuple[list[Var], Formula]:
    out: list[Var] = []
    while isinstance(f, node):
        out.append(f.var)
        f = f.body
    return out, f


def uniformize(base: Formula) -> UniformPrinciple:
    """Build the functional and relativized-strong variants of a
    (forall X..)(exists Y..) phi problem statement."""
    xs, rest = _strip(base, Forall)
    ys, matrix = _strip(rest, Exists)
    if not xs:
        raise NormalFormError(
            "expected a statement opening with plain universal "
            "quantifiers; implication-shaped statements go through "
            "contrapose_accept")
    if not is_internal(matrix):
        bad = next(g for g in subformulas(matrix)
                   if isinstance(g, (St, ForallSt, ExistsSt)))
        raise NormalFormError(
            f"matrix must be internal; found {type(bad).__name__}")

    if not ys:
        uniform = base
        strong = matrix
        for v in reversed(xs):
            strong = ForallSt(v, strong)
        return UniformPrinciple(base, uniform, strong)

    taken = _all_names(base)
    fns: list[Var] = []
    for i, y in enumerate(ys):
        base_name = "Psi" if i == 0 else f"Psi{i + 1}"
        name = fresh_name(base_name, taken)
        taken.add(name)
        fns.append(Var(name, arrows([x.ty for x in xs], y.ty)))

    inner = matrix
    for y, fn in zip(ys, fns):
        inner = subst_f(inner, y, app(fn, *[x for x in xs]))

    uniform = inner
    for x in reversed(xs):
        uniform = Forall(x, uniform)
    for fn in reversed(fns):
        uniform = Exists(fn, uniform)

    core = inner
    for x in reversed(xs):
        core = ForallSt(x, core)
    ext = [_extensionality(fn, [x.ty for x in xs], taken) for fn in fns]
    strong = conj([core] + ext)
    for fn in reversed(fns):
        strong = ExistsSt(fn, strong)
    return UniformPrinciple(base, uniform, strong, tuple(fns))


def _extensionality(fn: Var, arg_tys: list[FiniteType],
                    taken: set[str]) -> Formula:
    """(forall^st C, D)(C approx D -> fn(C) approx fn(D)), one C/D pair
    per argument position."""
    cs, ds = [], []
    for ty in arg_tys:
        c = Var(fresh_name("X", taken), ty)
        taken.add(c.name)
        d = Var(fresh_name("Y", taken), ty)
        taken.add(d.name)
        cs.append(c)
        ds.append(d)
    out_ty = fn.ty
    for _ in arg_tys:
        out_ty = out_ty.cod
    prem = conj([ApproxEq(c.ty, c, d) for c, d in zip(cs, ds)])
    ccl = ApproxEq(out_ty, app(fn, *cs), app(fn, *ds))
    body: Formula = Implies(prem, ccl)
    for v in reversed(cs + ds):
        body = ForallSt(v, body)
    return body


# ---------------------------------------------------------------------------
# alternative entrance: implication-shaped statements

def contrapose_accept(base: Formula) -> UniformPrinciple:
    """Accept a hypothesis-to-conclusion statement directly.

    Grammar: optional plain universal parameters, then an implication
    of internal formulas.  When the conclusion opens with an existential
    (plain or bounded) that witness is what the solution functional
    returns; a bound becomes an explicit conjunct.  Everything else is
    left in place.
    """
    xs, rest = _strip(base, Forall)
    if not isinstance(rest, Implies):
        raise NormalFormError("contrapose_accept needs an implication "
                              "after the parameters")
    hyp, ccl = rest.left, rest.right
    if not is_internal(hyp) or not is_internal(ccl):
        raise NormalFormError("both sides of the implication must be "
                              "internal")

    y = None
    bound = None
    if isinstance(ccl, Exists):
        y, inner = ccl.var, ccl.body
    elif isinstance(ccl, BExists) and ccl.kind == "le":
        y, bound, inner = ccl.var, ccl.bound, ccl.body
    if y is None:
        strong = Implies(hyp, ccl)
        for v in reversed(xs):
            strong = ForallSt(v, strong)
        return UniformPrinciple(base, base, strong)

    taken = _all_names(base)
    fn = Var(fresh_name("Psi", taken), arrows([x.ty for x in xs], y.ty))
    taken.add(fn.name)
    wit = app(fn, *[x for x in xs]) if xs else fn
    got = subst_f(inner, y, wit)
    if bound is not None:
        got = And(Atom("<=", (wit, bound)), got)
    body = Implies(hyp, got)

    uniform = body
    for x in reversed(xs):
        uniform = Forall(x, uniform)
    uniform = Exists(fn, uniform)

    core = body
    for x in reversed(xs):
        core = ForallSt(x, core)
    ext = _extensionality(fn, [x.ty for x in xs], taken) if xs else None
    strong = And(core, ext) if ext is not None else core
    strong = ExistsSt(fn, strong)
    return UniformPrinciple(base, uniform, strong, (fn,))


# ---------------------------------------------------------------------------
# step 2: resolve approx

def _numeric_arity(ty: FiniteType) -> int | None:
    """k when ty is 0 -> 0 -> ... -> 0 with k arguments, else None."""
    k = 0
    while isinstance(ty, Arrow):
        if ty.dom != N:
            return None
        k += 1
        ty = ty.cod
    return k if ty == N else None


def _diag(t: Term, k: int, taken: set[str]) -> Term:
    """View a k-argument numeric function as a single table by pairing
    the arguments along the diagonal."""
    if k == 1:
        return t
    i = Var(fresh_name("i", taken), N)
    args: list[Term] = []
    cur: Term = i
    for pos in range(k - 1):
        args.append(App(NUNL, cur))
        cur = App(NUNR, cur)
    args.append(cur)
    return Abs(i, app(t, *args))


def _prefix_eq(ty: FiniteType, l: Term, r: Term, n: Var,
               taken: set[str]) -> tuple[Formula, bool]:
    """Compare l and r of the given type up to prefix length n; the
    second component says whether n was actually used."""
    if ty == N:
        return Atom("=", (l, r)), False
    if isinstance(ty, Seq):
        return Eq(ty, l, r), False
    if isinstance(ty, Product):
        fl, ul = _prefix_eq(ty.left, app_fst(ty, l), app_fst(ty, r), n, taken)
        fr, ur = _prefix_eq(ty.right, app_snd(ty, l), app_snd(ty, r), n, taken)
        return And(fl, fr), ul or ur
    k = _numeric_arity(ty)
    if k is None:
        raise NormalFormError(
            f"no prefix encoding at type {show_type(ty)}")
    dl, dr = _diag(l, k, taken), _diag(r, k, taken)
    return Atom("=", (app(INITSEG, dl, n), app(INITSEG, dr, n))), True


def app_fst(ty: Product, t: Term) -> Term:
    from .lang.terms import fst_c
    return App(fst_c(ty.left, ty.right), t)


def app_snd(ty: Product, t: Term) -> Term:
    from .lang.terms import snd_c
    return App(snd_c(ty.left, ty.right), t)


def _approx_leaves(f: Formula) -> list[ApproxEq] | None:
    if isinstance(f, ApproxEq):
        return [f]
    if isinstance(f, And):
        l = _approx_leaves(f.left)
        r = _approx_leaves(f.right)
        if l is not None and r is not None:
            return l + r
    return None


def resolve_approx(f: Formula) -> Formula:
    """Expand approx-implications into prefix comparisons.

    An implication whose sides are conjunctions of approx-atoms becomes

        (forall^st k)(exists^st N)(prefixes agree at N -> images agree at k)

    with k or N omitted when the corresponding side is purely numeric.
    Approx-atoms anywhere else are rejected: the grammar covers exactly
    the extensionality conjuncts that uniformize builds.
    """
    taken = _all_names(f)

    def go(g: Formula) -> Formula:
        if isinstance(g, Implies):
            prem = _approx_leaves(g.left)
            ccl = _approx_leaves(g.right)
            if prem is not None and ccl is not None:
                return rewrite(prem, ccl)
        if isinstance(g, ApproxEq):
            raise NormalFormError(
                "approx atom outside an extensionality implication")
        if isinstance(g, (Atom, Eq, St)):
            return g
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, (Forall, Exists, ForallSt, ExistsSt)):
            return type(g)(g.var, go(g.body))
        if isinstance(g, (BForall, BExists)):
            return type(g)(g.var, g.kind, g.bound, go(g.body))
        raise NormalFormError(f"cannot resolve inside {type(g).__name__}")

    def rewrite(prem: list[ApproxEq], ccl: list[ApproxEq]) -> Formula:
        nv = Var(fresh_name("N", taken), N)
        taken.add(nv.name)
        kv = Var(fresh_name("k", taken), N)
        taken.add(kv.name)
        ps, pused = [], False
        for a in prem:
            g, used = _prefix_eq(a.ty, a.left, a.right, nv, taken)
            ps.append(g)
            pused = pused or used
        cs, cused = [], False
        for a in ccl:
            g, used = _prefix_eq(a.ty, a.left, a.right, kv, taken)
            cs.append(g)
            cused = cused or used
        out: Formula = Implies(conj(ps), conj(cs))
        if pused:
            out = ExistsSt(nv, out)
        if cused:
            out = ForallSt(kv, out)
        return out

    return go(f)


# ---------------------------------------------------------------------------
# step 3: herbrandized choice

def herbrandize_choice(f: Formula, steps: list | None = None) -> Formula:
    """Trade inner standard existentials for standard functionals.

    Each conjunct of shape (forall^st xs)(exists^st y) phi, phi internal,
    first becomes a candidate-sequence functional,

        (exists^st W: xs -> (ty of y)*)(forall^st xs)(exists y in W(xs)) phi,

    and at numeric witness type the sequence collapses to its maximum:

        (exists^st Xi: xs -> 0)(forall^st xs) phi[y := Xi(xs)].

    The collapse assumes phi gets no harder as the witness grows, which
    holds for every prefix-agreement matrix this pipeline produces (the
    premise only strengthens); at non-numeric types the sequence form is
    kept.  Conjunctions and the standard-existential context are
    traversed; anything already functional is left alone.
    """
    taken = _all_names(f)

    def go(g: Formula) -> Formula:
        if isinstance(g, ExistsSt):
            return ExistsSt(g.var, go(g.body))
        if isinstance(g, And):
            return And(go(g.left), go(g.right))
        got = _try_choice(g, taken, steps)
        return got if got is not None else g

    return go(f)


def _try_choice(g: Formula, taken: set[str],
                steps: list | None) -> Formula | None:
    xs, rest = _strip(g, ForallSt)
    if not xs or not isinstance(rest, ExistsSt):
        return None
    y, matrix = rest.var, rest.body
    if not is_internal(matrix):
        return None
    seq_ty = arrows([x.ty for x in xs], Seq(y.ty))
    w = Var(fresh_name("W", taken), seq_ty)
    taken.add(w.name)
    seq_form: Formula = BExists(y, "mem", app(w, *[x for x in xs]), matrix)
    for x in reversed(xs):
        seq_form = ForallSt(x, seq_form)
    seq_form = ExistsSt(w, seq_form)
    if steps is not None:
        steps.append(("candidate-sequence", seq_form))
    if y.ty != N:
        return seq_form
    xi = Var(fresh_name("Xi", taken), arrows([x.ty for x in xs], N))
    taken.add(xi.name)
    out: Formula = subst_f(matrix, y, app(xi, *[x for x in xs]))
    for x in reversed(xs):
        out = ForallSt(x, out)
    return ExistsSt(xi, out)


# ---------------------------------------------------------------------------
# step 4: prenex

def prenex_to_normal(f: Formula) -> NormalForm:
    """Pull all standard quantifiers to the front of an implication,
    consequent first, flipping polarity through antecedents.

    Every exchange is a classical equivalence over nonempty ranges.
    A standard quantifier (or st-atom) under a plain quantifier blocks
    the algorithm and is reported.
    """
    taken = _all_names(f)
    blocks: set[str] = set()
    univ: list[Var] = []
    exis: list[Var] = []

    def bind(v: Var, body: Formula) -> tuple[Var, Formula]:
        if v.name in blocks:
            nv = Var(fresh_name(v.name, taken), v.ty)
            taken.add(nv.name)
            body = subst_f(body, v, nv)
            v = nv
        blocks.add(v.name)
        return v, body

    def walk(g: Formula, pos: bool) -> Formula:
        if is_internal(g):
            return g
        if isinstance(g, (ForallSt, ExistsSt)):
            v, body = bind(g.var, g.body)
            goes_univ = (pos == isinstance(g, ForallSt))
            (univ if goes_univ else exis).append(v)
            return walk(body, pos)
        if isinstance(g, Implies):
            right = walk(g.right, pos)
            left = walk(g.left, not pos)
            return Implies(left, right)
        if isinstance(g, (And, Or)):
            return type(g)(walk(g.left, pos), walk(g.right, pos))
        if isinstance(g, Not):
            return Not(walk(g.body, not pos))
        if isinstance(g, (Forall, Exists, BForall, BExists)):
            trapped = next(h for h in subformulas(g.body)
                           if isinstance(h, (St, ForallSt, ExistsSt)))
            raise NormalFormError(
                f"standard structure ({type(trapped).__name__}) trapped "
                f"under plain quantifier binding {g.var.name!r}")
        if isinstance(g, St):
            raise NormalFormError(
                "bare standardness atom cannot be prenexed; translate "
                "it first")
        raise NormalFormError(f"cannot prenex {type(g).__name__}")

    matrix = walk(f, True)
    return NormalForm(tuple(univ), tuple(exis), matrix)


# ---------------------------------------------------------------------------
# monotonicity guard (for witness collapses and least-witness rewrites)

def monotone_in_witness(model, nf: NormalForm, name: str) -> bool:
    """Brute-force check that the matrix never flips from true to false
    as the named existential witness grows, over the model's standard
    populations for the other block variables."""
    from .interp import eval_formula
    wit = next((v for v in nf.existentials if v.name == name), None)
    if wit is None or wit.ty != N:
        raise NormalFormError(f"{name!r} is not a numeric existential")
    others = [v for v in nf.universals + nf.existentials if v.name != name]
    pops = [model.population(v.ty, standard=True) for v in others]
    types = dict(model.types())
    for v in nf.universals + nf.existentials:
        types[v.name] = v.ty
    for combo in itertools.product(*pops):
        env = dict(model.env())
        env.update({v.name: val for v, val in zip(others, combo)})
        prev = None
        for w in range(model.cap + 1):
            env[wit.name] = w
            cur = eval_formula(model, nf.matrix, env, types)
            if prev is True and cur is False:
                return False
            prev = cur
    return True


# ---------------------------------------------------------------------------
# the composed pipeline

def normalize_principle(base: Formula,
                        steps: list | None = None,
                        accept: str = "direct") -> NormalForm:
    """Full pipeline: problem statement to the two-block implication
    normal form against the bounded-zero transfer target.

    ``accept`` picks the uniformization reading: ``direct`` for
    solver-shaped statements, ``contrapose`` for implications whose
    conclusion's lead witness is to be uniformized.
    """
    if accept not in ("direct", "contrapose"):
        raise NormalFormError(f"unknown acceptance mode {accept!r}")
    if steps is not None:
        steps.append(("input", base))
    up = contrapose_accept(base) if accept == "contrapose" else uniformize(base)
    if steps is not None:
        steps.append(("uniform", up.uniform))
        steps.append(("strong", up.strong))
    resolved = resolve_approx(up.strong)
    if steps is not None:
        steps.append(("prefix-resolved", resolved))
    herb = herbrandize_choice(resolved, steps=steps)
    if steps is not None:
        steps.append(("choice-collapsed", herb))
    target = nf_to_formula(trans_instance().normal)
    imp = Implies(herb, target)
    if steps is not None:
        steps.append(("implication", imp))
    nf = prenex_to_normal(imp)
    if steps is not None:
        steps.append(("normal-form", nf))
    return nf
