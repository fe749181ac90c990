"""Seeded random generators for property tests.

Everything draws from a caller-supplied random.Random so test runs are
reproducible; SEED is the suite-wide default.
"""
from __future__ import annotations

import random

from rszoo.lang import (Abs, And, Atom, BExists, BForall, Eq, Exists, Forall,
                        Formula, Implies, Not, Or, Term, Var, app, append_c,
                        empty_c, fresh_name, free_vars_f, get_c, len_c, num,
                        pair_c, fst_c, snd_c)
from rszoo.lang import Arrow, FiniteType, N, Product, Seq, pure
from rszoo.lang.terms import MAX2, MONUS, PLUS, SUCC
from rszoo.translate import NormalForm

SEED = 20260815


def default_term(ty: FiniteType) -> Term:
    """A closed inhabitant of any type."""
    if ty == N:
        return num(0)
    if isinstance(ty, Arrow):
        return Abs(Var("_d", ty.dom), default_term(ty.cod))
    if isinstance(ty, Product):
        return app(pair_c(ty.left, ty.right),
                   default_term(ty.left), default_term(ty.right))
    if isinstance(ty, Seq):
        return empty_c(ty.elem)
    raise ValueError(f"no default for {ty!r}")


class Gen:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self._n = 0

    def name(self, base: str = "v") -> str:
        self._n += 1
        return f"{base}{self._n}"

    # -- types -------------------------------------------------------------

    def type(self, depth: int = 2) -> FiniteType:
        r = self.rng.random()
        if depth <= 0 or r < 0.55:
            return N
        if r < 0.8:
            return Arrow(self.type(depth - 1), self.type(depth - 1))
        if r < 0.9:
            return Product(self.type(depth - 1), self.type(depth - 1))
        return Seq(self.type(depth - 1))

    def small_type(self) -> FiniteType:
        return self.rng.choice([N, N, N, pure(1), Seq(N)])

    # -- terms ---------------------------------------------------------------

    def term(self, ty: FiniteType, env: dict[str, FiniteType],
             depth: int = 3) -> Term:
        candidates = [n for n, t in env.items() if t == ty]
        r = self.rng.random()
        if candidates and (depth <= 0 or r < 0.4):
            return Var(self.rng.choice(candidates), ty)
        if depth <= 0:
            return default_term(ty)
        if ty == N:
            return self._num_term(env, depth)
        if isinstance(ty, Arrow):
            x = Var(fresh_name("x", set(env)), ty.dom)
            body = self.term(ty.cod, {**env, x.name: x.ty}, depth - 1)
            return Abs(x, body)
        if isinstance(ty, Product):
            return app(pair_c(ty.left, ty.right),
                       self.term(ty.left, env, depth - 1),
                       self.term(ty.right, env, depth - 1))
        if isinstance(ty, Seq):
            n = self.rng.randrange(0, 3)
            t: Term = empty_c(ty.elem)
            for _ in range(n):
                t = app(append_c(ty.elem), t,
                        self.term(ty.elem, env, depth - 1))
            return t
        return default_term(ty)

    def _num_term(self, env: dict[str, FiniteType], depth: int) -> Term:
        r = self.rng.random()
        if r < 0.3:
            return num(self.rng.randrange(0, 4))
        if r < 0.45:
            return app(SUCC, self.term(N, env, depth - 1))
        if r < 0.6:
            op = self.rng.choice([PLUS, MONUS, MAX2])
            return app(op, self.term(N, env, depth - 1),
                       self.term(N, env, depth - 1))
        if r < 0.75:
            # apply a function variable if one is around
            fns = [(n, t) for n, t in env.items()
                   if isinstance(t, Arrow) and t.cod == N]
            if fns:
                n, t = self.rng.choice(fns)
                return app(Var(n, t), self.term(t.dom, env, depth - 1))
        if r < 0.85:
            seqs = [(n, t) for n, t in env.items() if isinstance(t, Seq)]
            if seqs:
                n, t = self.rng.choice(seqs)
                if self.rng.random() < 0.5:
                    return app(len_c(t.elem), Var(n, t))
                if t.elem == N:
                    return app(get_c(N), Var(n, t),
                               self.term(N, env, depth - 1))
        return num(self.rng.randrange(0, 4))

    # -- internal formulas ---------------------------------------------------

    def internal_formula(self, env: dict[str, FiniteType],
                         depth: int = 6) -> Formula:
        r = self.rng.random()
        if depth <= 0 or r < 0.35:
            return self._atom(env, depth)
        r = self.rng.random()
        if r < 0.2:
            return Not(self.internal_formula(env, depth - 1))
        if r < 0.4:
            cls = self.rng.choice([And, Or, Implies])
            return cls(self.internal_formula(env, depth - 1),
                       self.internal_formula(env, depth - 1))
        if r < 0.7:
            v = Var(fresh_name("q", set(env)), self.small_type())
            cls = self.rng.choice([Forall, Exists])
            return cls(v, self.internal_formula({**env, v.name: v.ty},
                                                depth - 1))
        v = Var(fresh_name("i", set(env)), N)
        kind = self.rng.choice(["le", "lt"])
        bound = self.term(N, env, 2)
        cls = self.rng.choice([BForall, BExists])
        return cls(v, kind, bound,
                   self.internal_formula({**env, v.name: v.ty}, depth - 1))

    def _atom(self, env: dict[str, FiniteType], depth: int) -> Formula:
        r = self.rng.random()
        if r < 0.75:
            rel = self.rng.choice(["=", "=", "<=", "<"])
            return Atom(rel, (self.term(N, env, 2), self.term(N, env, 2)))
        ty = self.small_type()
        if ty == N:
            return Atom("=", (self.term(N, env, 2), self.term(N, env, 2)))
        return Eq(ty, self.term(ty, env, 1), self.term(ty, env, 1))

    # -- normal forms ----------------------------------------------------------

    def normal_form(self, params: dict[str, FiniteType] | None = None
                    ) -> NormalForm:
        env = dict(params or {})
        us, es = [], []
        for _ in range(self.rng.randrange(0, 3)):
            v = Var(self.name("x"), self.small_type())
            us.append(v)
            env[v.name] = v.ty
        for _ in range(self.rng.randrange(0, 3)):
            v = Var(self.name("y"), self.small_type())
            es.append(v)
            env[v.name] = v.ty
        matrix = self.internal_formula(env, depth=4)
        return NormalForm(tuple(us), tuple(es), matrix)


def generator(seed: int = SEED) -> Gen:
    return Gen(random.Random(seed))
