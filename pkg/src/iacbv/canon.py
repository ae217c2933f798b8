"""Canonical forms of IAloop terms.

Canonical terms use only base-typed identifiers as terms; non-base values
are taken apart through `let x = z a in C` with z an identifier and a an
identifier of base type, a mkvar of λs, or a λ. Conversion proceeds by
induction on the term, η-expanding identifiers, naming intermediate results
with base-typed lets and pushing `if`/`let` outwards until a λ or mkvar is
exposed. A let of non-base type is removed by substituting its value into
the (canonical) body, one rightmost occurrence at a time.
"""

from __future__ import annotations

from .syntax import (
    COM, EXP, VAR, App, Arrow, Assign, BinOp, Com, Deref, Exp, Fix, FreshNames,
    Hole, Ident, If, IntLit, Lambda, Let, Loc, MkVar, New, Ref, Term, Type, Unit,
    Var, While, annotate, children, freshen, is_base, rebuild, substitute, typecheck,
)


class CanonError(ValueError):
    """Input outside IAloop (fix, ref, locations, holes) or ill-typed."""


# ---------------------------------------------------------------- recognition


def is_canonical(t: Term, ctx=()) -> bool:
    """Grammar membership; identifiers not bound in t are typed by ctx when given."""
    return _canon_ok(t, dict(ctx))


def _base_ident(t: Term, env: dict) -> bool:
    if not isinstance(t, Ident):
        return False
    ty = env.get(t.name)
    return ty is None or is_base(ty)


def _typed_ident(t: Term, env: dict, want: Type) -> bool:
    if not isinstance(t, Ident):
        return False
    ty = env.get(t.name)
    return ty is None or ty == want


def _canon_ok(t: Term, env: dict) -> bool:
    if isinstance(t, (Unit, IntLit)):
        return True
    if isinstance(t, Ident):
        return _base_ident(t, env)
    if isinstance(t, BinOp):
        return _base_ident(t.left, env) and _base_ident(t.right, env)
    if isinstance(t, If):
        return (_base_ident(t.cond, env) and _canon_ok(t.then, env)
                and _canon_ok(t.orelse, env))
    if isinstance(t, Assign):
        return _typed_ident(t.target, env, VAR) and _typed_ident(t.value, env, EXP)
    if isinstance(t, Deref):
        return _typed_ident(t.target, env, VAR)
    if isinstance(t, Lambda):
        return _canon_ok(t.body, {**env, t.var: t.ty})
    if isinstance(t, MkVar):
        return _canon_mkvar(t, env)
    if isinstance(t, New):
        return _canon_ok(t.body, {**env, t.var: VAR})
    if isinstance(t, While):
        return _canon_ok(t.guard, env) and _canon_ok(t.body, env)
    if isinstance(t, Let):
        inner = {**env, t.var: t.ty} if t.ty is not None else {k: v for k, v in env.items() if k != t.var}
        if not _canon_ok(t.body, inner):
            return False
        b = t.bound
        if isinstance(b, App):
            if not isinstance(b.fn, Ident):
                return False
            a = b.arg
            if isinstance(a, Ident):
                return _base_ident(a, env)
            if isinstance(a, MkVar):
                return _canon_mkvar(a, env)
            if isinstance(a, Lambda):
                return _canon_ok(a, env)
            return False
        return (t.ty is None or is_base(t.ty)) and _canon_ok(b, env)
    return False


def _canon_mkvar(t: MkVar, env: dict) -> bool:
    r, w = t.read, t.write
    return (isinstance(r, Lambda) and r.ty == COM and isinstance(w, Lambda) and w.ty == EXP
            and _canon_ok(r, env) and _canon_ok(w, env))


# ---------------------------------------------------------------- conversion


class _Canon:
    def __init__(self, fresh: FreshNames):
        self.fresh = fresh

    def copy(self, t: Term) -> Term:
        """A duplicate of t with its binders renamed apart."""
        return freshen(t, self.fresh)

    # -- identifiers

    def expand(self, x: str, ty: Type) -> Term:
        if is_base(ty):
            return Ident(x)
        if isinstance(ty, Var):
            u, v = self.fresh(), self.fresh()
            return MkVar(Lambda(u, COM, Deref(Ident(x))), Lambda(v, EXP, Assign(Ident(x), Ident(v))))
        z, r = self.fresh(), self.fresh()
        return Lambda(z, ty.param, Let(r, ty.result, App(Ident(x), self.expand(z, ty.param)),
                                        self.expand(r, ty.result)))

    # -- main recursion; returns (canonical term, type)

    def run(self, env: dict, t: Term) -> tuple:
        if isinstance(t, Unit):
            return t, COM
        if isinstance(t, IntLit):
            return t, EXP
        if isinstance(t, Ident):
            ty = env[t.name]
            return self.expand(t.name, ty), ty
        if isinstance(t, BinOp):
            c1, _ = self.run(env, t.left)
            c2, _ = self.run(env, t.right)
            return self.name_base(c1, EXP, lambda a: self.name_base(
                c2, EXP, lambda b: BinOp(t.op, a, b))), EXP
        if isinstance(t, If):
            c, _ = self.run(env, t.cond)
            d1, ty = self.run(env, t.then)
            d0, _ = self.run(env, t.orelse)
            return self.name_base(c, EXP, lambda x: If(x, d1, d0)), ty
        if isinstance(t, Deref):
            if isinstance(t.target, Ident):
                return t, EXP
            c, _ = self.run(env, t.target)
            return self.deref(c), EXP
        if isinstance(t, Assign):
            rhs, _ = self.run(env, t.value)
            if isinstance(t.target, Ident):
                return self.name_base(rhs, EXP, lambda v: Assign(t.target, v)), COM
            c, _ = self.run(env, t.target)
            return self.assign(c, rhs), COM
        if isinstance(t, MkVar):
            r, _ = self.run(env, t.read)
            w, _ = self.run(env, t.write)
            return self.mkvar_read(r, w), VAR
        if isinstance(t, Lambda):
            body, bty = self.run({**env, t.var: t.ty}, t.body)
            return Lambda(t.var, t.ty, body), Arrow(t.ty, bty)
        if isinstance(t, New):
            body, bty = self.run({**env, t.var: VAR}, t.body)
            return New(t.var, body), bty
        if isinstance(t, While):
            g, _ = self.run(env, t.guard)
            b, _ = self.run(env, t.body)
            return While(g, b), COM
        if isinstance(t, Let):
            c1, ty = self.run(env, t.bound)
            c2, bty = self.run({**env, t.var: ty}, t.body)
            return self.let(t.var, ty, c1, c2), bty
        if isinstance(t, App):
            f, fty = self.run(env, t.fn)
            a, _ = self.run(env, t.arg)
            return self.apply(f, fty, a), fty.result
        if isinstance(t, (Fix, Ref, Loc, Hole)):
            raise CanonError(f"{type(t).__name__} is outside IAloop")
        raise CanonError(f"unknown term {t!r}")

    def name_base(self, c: Term, ty: Type, k) -> Term:
        """let x = c in k(x), skipping the let when c is already an identifier."""
        if isinstance(c, Ident):
            return k(c)
        x = self.fresh()
        return Let(x, ty, c, k(Ident(x)))

    # -- pushing if/let outwards

    def deref(self, c: Term) -> Term:
        if isinstance(c, MkVar):
            return Let(c.read.var, COM, Unit(), c.read.body)
        if isinstance(c, If):
            return If(c.cond, self.deref(c.then), self.deref(c.orelse))
        if isinstance(c, Let):
            return Let(c.var, c.ty, c.bound, self.deref(c.body))
        if isinstance(c, Ident):
            return Deref(c)
        raise CanonError(f"unexpected var-typed canonical form {type(c).__name__}")

    def assign(self, c: Term, rhs: Term) -> Term:
        if isinstance(c, MkVar):
            return Let(c.write.var, EXP, rhs, c.write.body)
        if isinstance(c, If):
            return If(c.cond, self.assign(c.then, rhs), self.assign(c.orelse, self.copy(rhs)))
        if isinstance(c, Let):
            return Let(c.var, c.ty, c.bound, self.assign(c.body, rhs))
        if isinstance(c, Ident):
            return self.name_base(rhs, EXP, lambda v: Assign(c, v))
        raise CanonError(f"unexpected var-typed canonical form {type(c).__name__}")

    def mkvar_read(self, r: Term, w: Term) -> Term:
        if isinstance(r, If):
            return If(r.cond, self.mkvar_read(r.then, w), self.mkvar_read(r.orelse, self.copy(w)))
        if isinstance(r, Let):
            return Let(r.var, r.ty, r.bound, self.mkvar_read(r.body, w))
        return self.mkvar_write(r, w)

    def mkvar_write(self, r: Lambda, w: Term) -> Term:
        if isinstance(w, If):
            return If(w.cond, self.mkvar_write(r, w.then), self.mkvar_write(self.copy(r), w.orelse))
        if isinstance(w, Let):
            return Let(w.var, w.ty, w.bound, self.mkvar_write(r, w.body))
        return MkVar(r, w)

    def apply(self, f: Term, fty: Arrow, a: Term) -> Term:
        if isinstance(f, If):
            return If(f.cond, self.apply(f.then, fty, a), self.apply(f.orelse, fty, self.copy(a)))
        if isinstance(f, Let):
            return Let(f.var, f.ty, f.bound, self.apply(f.body, fty, a))
        if isinstance(f, Lambda):
            return self.let(f.var, fty.param, a, f.body)
        raise CanonError(f"unexpected function-typed canonical form {type(f).__name__}")

    # -- let elimination at non-base types

    def let(self, x: str, ty: Type, c1: Term, c2: Term) -> Term:
        if is_base(ty):
            if isinstance(c1, Ident):
                return substitute(c2, x, c1)
            if c2 == Ident(x) and not isinstance(c1, App):
                return c1
            return Let(x, ty, c1, c2)
        if isinstance(c1, If):
            return If(c1.cond, self.let(x, ty, c1.then, c2),
                      self.let(x, ty, c1.orelse, self.copy(c2)))
        if isinstance(c1, Let):
            return Let(c1.var, c1.ty, c1.bound, self.let(x, ty, c1.body, c2))
        if isinstance(c1, MkVar):
            return self.subst_var(x, c1, c2)
        if isinstance(c1, Lambda):
            while True:
                nxt = self.subst_rightmost(x, ty, c1, c2)
                if nxt is None:
                    return c2
                c2 = nxt
        raise CanonError(f"cannot bind {type(c1).__name__} at type {ty}")

    def subst_var(self, x: str, mv: MkVar, t: Term) -> Term:
        if isinstance(t, Deref) and t.target == Ident(x):
            r = self.copy(mv.read)
            return Let(r.var, COM, Unit(), r.body)
        if isinstance(t, Assign) and t.target == Ident(x):
            w = self.copy(mv.write)
            return Let(w.var, EXP, t.value, w.body)
        kids = children(t)
        if not kids:
            return t
        return rebuild(t, [self.subst_var(x, mv, k) for k in kids])

    def subst_rightmost(self, x: str, ty: Arrow, lam: Lambda, t: Term):
        """Replace the rightmost `let w = x a in C5` in t; None if x is unused."""
        if isinstance(t, Let):
            inner = self.subst_rightmost(x, ty, lam, t.body)
            if inner is not None:
                return Let(t.var, t.ty, t.bound, inner)
            b = t.bound
            if isinstance(b, App) and b.fn == Ident(x):
                arg_side = self.subst_rightmost(x, ty, lam, b.arg)
                if arg_side is not None:
                    return Let(t.var, t.ty, App(b.fn, arg_side), t.body)
                fn = self.copy(lam)
                c6 = self.let(fn.var, ty.param, b.arg, fn.body)
                return self.let(t.var, ty.result, c6, t.body)
            inner = self.subst_rightmost(x, ty, lam, b)
            if inner is not None:
                return Let(t.var, t.ty, inner, t.body)
            return None
        kids = list(children(t))
        for i in range(len(kids) - 1, -1, -1):
            inner = self.subst_rightmost(x, ty, lam, kids[i])
            if inner is not None:
                kids[i] = inner
                return rebuild(t, kids)
        if t == Ident(x):
            raise CanonError(f"non-canonical occurrence of {x}")
        return None


def canonicalize(ctx, t: Term, fresh: FreshNames | None = None) -> Term:
    """A canonical term denotationally equal to t (same context and type)."""
    fresh = fresh or FreshNames("$")
    env = dict(ctx)
    try:
        ty = typecheck(ctx, t)
    except Exception as e:
        raise CanonError(str(e)) from e
    t = freshen(annotate(ctx, t), fresh)
    out, oty = _Canon(fresh).run(env, t)
    assert oty == ty, (oty, ty)
    return out
