"""Bounded search for contexts that tell two terms apart, using the interpreter.

Contexts are enumerated in a normal form: up to two fresh cells, then one
binding per free identifier of the hole (a `let` for values, `new` or
`mkvar` for variables), then a command containing the hole exactly once.
Inside that command the grammar is call-by-value IA with atoms in condition
and assignment positions, right-nested sequencing, and calls only through
identifiers or the hole. Omega counts as a single node.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from . import interp
from .interp import _arith
from .syntax import (
    COM, EXP, VAR, App, Arrow, Assign, BinOp, Com, Deref, Exp, Hole, Ident, If, IntLit, Lambda,
    Let, MkVar, New, SEQ, Term, Type, Unit, Var, While, children, is_base, omega, pretty,
    free_vars, rebuild, subterms, typecheck,
)

DEFAULT_MAX_SIZE = 14
DEFAULT_FUEL = 10_000
FUEL_FACTOR = 10
OPS = ("+", "-")
CELLS = ("c", "d")


OMEGA = omega(COM)


def _is_omega(t: Term) -> bool:
    return t == OMEGA


_DIV = (None, False)


def _then(first: tuple, rest: tuple) -> tuple:
    """Outcome of running `first` and then, if it converged, `rest`."""
    if first[0] is None:
        return _DIV
    if rest[0] is None:
        return _DIV
    return (rest[0], first[1] or rest[1])


def _pure(t: Term) -> bool:
    """No hole, state access, calls or loops: evaluation has no effect and terminates."""
    return not any(isinstance(s, (Hole, Deref, Assign, App, While)) for s in subterms(t))


def node_size(t: Term) -> int:
    """AST nodes, counting Omega as one."""
    if _is_omega(t):
        return 1
    return 1 + sum(node_size(c) for c in children(t))


def fill(ctx_term: Term, t: Term) -> Term:
    """Plug t into the hole (no renaming: the context binds the hole's identifiers by name)."""
    if isinstance(ctx_term, Hole):
        return t
    kids = children(ctx_term)
    if not kids:
        return ctx_term
    return rebuild(ctx_term, [fill(k, t) for k in kids])


@dataclass(frozen=True)
class ContextTemplate:
    term: Term
    hole_ctx: tuple
    hole_ty: Type
    size: int

    def fill(self, t: Term) -> Term:
        return fill(self.term, t)

    def __str__(self) -> str:
        return pretty(self.term)


# ---------------------------------------------------------------- enumeration


class _Gen:
    def __init__(self, hole_ctx: tuple, hole_ty: Type, n: int, avoid: frozenset):
        self.hole_ctx = hole_ctx
        self.hole_ty = hole_ty
        self.n = n
        self.avoid = avoid
        self.terms = lru_cache(maxsize=None)(self._terms)
        self.seen: dict = {}
        self.fps: dict = {}
        self.fvs: dict = {}
        self._contexts: dict = {}
        # a base-typed subterm over base identifiers is a function of their values
        # and of the hole's outcome, so terms can be deduplicated by that function
        self.base_hole = is_base(hole_ty)

    def name(self, prefix: str, env: tuple) -> str:
        k = len(env)
        while f"{prefix}{k}" in self.avoid:
            k += 1
        return f"{prefix}{k}"

    def _splits(self, total: int, parts: int):
        if parts == 1:
            if total >= 1:
                yield (total,)
            return
        for first in range(1, total - parts + 2):
            for rest in self._splits(total - first, parts - 1):
                yield (first,) + rest

    def _holes(self, hole: bool, parts: int):
        if not hole:
            yield (False,) * parts
            return
        for k in range(parts):
            yield tuple(i == k for i in range(parts))

    def _combine(self, env, specs, size, hole):
        """All tuples of subterms for specs [(env, ty)], sizes summing to size, hole in one."""
        for sizes in self._splits(size, len(specs)):
            for holes in self._holes(hole, len(specs)):
                yield from self._product(specs, sizes, holes, 0)

    def _product(self, specs, sizes, holes, i):
        if i == len(specs):
            yield ()
            return
        env, ty = specs[i]
        firsts = self.terms(env, ty, sizes[i], holes[i])
        if not firsts:
            return
        for rest in self._product(specs, sizes, holes, i + 1):
            for f in firsts:
                yield (f,) + rest

    def _terms(self, env: tuple, ty: Type, size: int, hole: bool) -> tuple:
        if size < 1:
            return ()
        for smaller in range(1, size):
            self.terms(env, ty, smaller, hole)
        out = self._gen(env, ty, size, hole)
        if is_base(ty) and not hole and size > 1:
            # a closed effect-free base term equals a literal or Omega
            out = (t for t in out if not (_pure(t) and not self.free(t)))
        if is_base(ty) and (self.base_hole or not hole):
            seen = self.seen.setdefault((env, ty, hole), set())
            kept = []
            for t in out:
                fp = self.fingerprint(env, t, hole)
                if fp is None:
                    kept.append(t)
                elif fp not in seen:
                    seen.add(fp)
                    kept.append(t)
            return tuple(kept)
        return tuple(out)

    def _outcomes(self) -> list:
        if isinstance(self.hole_ty, Com):
            return [None, "*"]
        return [None] + list(range(self.n + 1))

    def _radix(self, ty: Type) -> list:
        if isinstance(ty, Com):
            return ["*"]
        if isinstance(ty, Exp):
            return list(range(self.n + 1))
        return [None]  # non-base identifiers never occur in fingerprinted terms

    def free(self, t: Term) -> frozenset:
        fv = self.fvs.get(t)
        if fv is None:
            fv = self.fvs[t] = free_vars(t)
        return fv

    def fingerprint(self, env: tuple, t: Term, hole: bool):
        """A key such that terms with equal keys are interchangeable, or None.

        Hole-free terms over base identifiers and context cells are state
        transformers; terms with the hole over base identifiers only are
        functions of the hole's outcome.
        """
        fv = self.free(t)
        if hole:
            if all(is_base(ty) for x, ty in env if x in fv):
                return ("hole", self.hole_fp(env, t))
            return None
        if all(is_base(ty) or (isinstance(ty, Var) and x in CELLS) for x, ty in env if x in fv):
            return ("state", self.state_fp(env, t))
        return None

    def hole_fp(self, env: tuple, t: Term) -> tuple:
        """(result, hole evaluated) per hole outcome and valuation of the base identifiers.

        Only terms whose free identifiers are base-typed are fingerprinted; their
        one effect is evaluating the hole (at most once), so equal fingerprints mean
        interchangeable terms. Divergence hides everything, so it is recorded
        as (None, False).
        """
        key = (env, t)
        fp = self.fps.get(key)
        if fp is None:
            fp = self.fps[key] = self._hole_fp(env, t)
        return fp

    def _hole_fp(self, env: tuple, t: Term) -> tuple:
        width = 1
        for _, ty in env:
            width *= len(self._radix(ty))
        hs = self._outcomes()
        size = len(hs) * width
        if isinstance(t, Hole):
            return tuple((h, True) if h is not None else (None, False) for h in hs for _ in range(width))
        if isinstance(t, Unit):
            return (("*", False),) * size
        if isinstance(t, IntLit):
            return ((t.value, False),) * size
        if _is_omega(t):
            return ((None, False),) * size
        if isinstance(t, Ident):
            vals = list(itertools.product(*[self._radix(ty) for _, ty in env]))
            k = [x for x, _ in env].index(t.name)
            return tuple((v[k], False) for _ in hs for v in vals)
        if isinstance(t, BinOp):
            ls, rs = self.hole_fp(env, t.left), self.hole_fp(env, t.right)
            return tuple(
                _DIV if a[0] is None or b[0] is None else (_arith(t.op, a[0], b[0], self.n), a[1] or b[1])
                for a, b in zip(ls, rs)
            )
        if isinstance(t, If):
            cs = self.hole_fp(env, t.cond)
            ts, es = self.hole_fp(env, t.then), self.hole_fp(env, t.orelse)
            return tuple(_then(c, a if c[0] != 0 else b) for c, a, b in zip(cs, ts, es))
        if isinstance(t, Let) and t.var == SEQ:
            fs, rs = self.hole_fp(env, t.bound), self.hole_fp(env, t.body)
            return tuple(_then(f, r) for f, r in zip(fs, rs))
        if isinstance(t, Let):
            bs = self.hole_fp(env, t.bound)
            body = self.hole_fp(env + ((t.var, t.ty),), t.body)
            k = len(self._radix(t.ty))
            return tuple(
                _then(b, body[i * k + (0 if b[0] == "*" else b[0])] if b[0] is not None else _DIV)
                for i, b in enumerate(bs)
            )
        raise ValueError(f"no fingerprint for {type(t).__name__}")

    def state_fp(self, env: tuple, t: Term) -> tuple:
        """(result, final cell state) per valuation and initial cell state; divergence is (None, None)."""
        key = ("state", env, t)
        fp = self.fps.get(key)
        if fp is None:
            fp = self.fps[key] = self._state_fp(env, t)
        return fp

    def _state_fp(self, env: tuple, t: Term) -> tuple:
        n = self.n
        cells = [x for x, ty in env if isinstance(ty, Var) and x in CELLS]
        states = list(itertools.product(range(n + 1), repeat=len(cells)))
        nst = len(states)
        sidx = {st: i for i, st in enumerate(states)}
        vals = list(itertools.product(*[self._radix(ty) for x, ty in env if not isinstance(ty, Var)]))
        base = [x for x, ty in env if not isinstance(ty, Var)]
        div = (None, None)
        if isinstance(t, Unit):
            return tuple(("*", j) for _ in vals for j in range(nst))
        if isinstance(t, IntLit):
            return tuple((t.value, j) for _ in vals for j in range(nst))
        if _is_omega(t):
            return (div,) * (len(vals) * nst)
        if isinstance(t, Ident):
            k = base.index(t.name)
            return tuple((v[k], j) for v in vals for j in range(nst))
        if isinstance(t, Deref):
            c = cells.index(t.target.name)
            return tuple((states[j][c], j) for _ in vals for j in range(nst))

        def then(first, rest_at):
            out = []
            for vi in range(len(vals)):
                for j in range(nst):
                    r, j1 = first[vi * nst + j]
                    out.append(div if r is None else rest_at(vi, r, j1))
            return tuple(out)

        if isinstance(t, Assign):
            c = cells.index(t.target.name)
            es = self.state_fp(env, t.value)

            def write(vi, r, j1):
                st = list(states[j1])
                st[c] = r
                return ("*", sidx[tuple(st)])
            return then(es, write)
        if isinstance(t, BinOp):
            ls, rs = self.state_fp(env, t.left), self.state_fp(env, t.right)

            def arith(vi, a, j1):
                b, j2 = rs[vi * nst + j1]
                return div if b is None else (_arith(t.op, a, b, n), j2)
            return then(ls, arith)
        if isinstance(t, If):
            cs = self.state_fp(env, t.cond)
            ts, es = self.state_fp(env, t.then), self.state_fp(env, t.orelse)
            return then(cs, lambda vi, c, j1: (ts if c != 0 else es)[vi * nst + j1])
        if isinstance(t, Let) and t.var == SEQ:
            fs, rs = self.state_fp(env, t.bound), self.state_fp(env, t.body)
            return then(fs, lambda vi, _, j1: rs[vi * nst + j1])
        if isinstance(t, Let):
            bs = self.state_fp(env, t.bound)
            body = self.state_fp(env + ((t.var, t.ty),), t.body)
            k = len(self._radix(t.ty))
            # the new identifier is the last base identifier, so it is the fastest-varying digit
            return then(bs, lambda vi, b, j1: body[(vi * k + (0 if b == "*" else b)) * nst + j1])
        raise ValueError(f"no fingerprint for {type(t).__name__}")

    def _gen(self, env: tuple, ty: Type, size: int, hole: bool) -> Iterator[Term]:
        n = self.n
        if size == 1:
            if hole:
                if ty == self.hole_ty:
                    yield Hole()
                return
            if isinstance(ty, Com):
                yield Unit()
                yield OMEGA
            if isinstance(ty, Exp):
                yield from (IntLit(j) for j in range(n + 1))
            yield from (Ident(x) for x, t in env if t == ty)
            return
        vars_ = [x for x, t in env if isinstance(t, Var)]
        if isinstance(ty, Exp) and size == 2 and not hole:
            yield from (Deref(Ident(v)) for v in vars_)
        if isinstance(ty, Com):
            for v in vars_:
                for a in self.terms(env, EXP, size - 2, hole):
                    yield Assign(Ident(v), a)
        if isinstance(ty, Exp):
            for l, r in self._combine(env, [(env, EXP), (env, EXP)], size - 1, hole):
                if isinstance(l, IntLit) and isinstance(r, IntLit):
                    continue
                for op in OPS:
                    yield BinOp(op, l, r)
        for c, a, b in self._combine(env, [(env, EXP), (env, ty), (env, ty)], size - 1, hole):
            if isinstance(c, IntLit) or a == b:
                continue
            yield If(c, a, b)
        for first, rest in self._combine(env, [(env, COM), (env, ty)], size - 1, hole):
            if _pure(first) or _is_omega(first):
                continue
            if isinstance(first, Let) and first.var == SEQ:
                continue
            yield Let(SEQ, COM, first, rest)
        k = self.name("k", env)
        inner = env + ((k, EXP),)
        for bound, body in self._combine(env, [(env, EXP), (inner, ty)], size - 1, hole):
            if _pure(bound):
                continue
            yield Let(k, EXP, bound, body)
        yield from self._apps(env, ty, size, hole)
        if isinstance(ty, Arrow):
            u = self.name("u", env)
            for body in self.terms(env + ((u, ty.param),), ty.result, size - 1, hole):
                yield Lambda(u, ty.param, body)

    def _apps(self, env, ty, size, hole):
        heads = [(Ident(f), t, False) for f, t in env if isinstance(t, Arrow) and t.result == ty]
        if isinstance(self.hole_ty, Arrow) and self.hole_ty.result == ty:
            heads.append((Hole(), self.hole_ty, True))
        for head, fty, uses_hole in heads:
            if uses_hole and not hole:
                continue
            for a in self.terms(env, fty.param, size - 2, hole and not uses_hole):
                if is_base(fty.param) and not isinstance(a, (Unit, IntLit, Ident, Deref)):
                    continue
                yield App(head, a)

    def contexts(self, size: int) -> list:
        if size not in self._contexts:
            self._contexts[size] = list(self._make_contexts(size))
        return self._contexts[size]

    def _make_contexts(self, size: int) -> Iterator[ContextTemplate]:
        # cells only matter when the hole can reach them through an identifier
        reach = any(not is_base(ty) for _, ty in self.hole_ctx)
        cells = [c for c in CELLS if c not in self.avoid] if reach else []
        for ncells in range(len(cells) + 1):
            env0 = tuple((c, VAR) for c in cells[:ncells])
            for t in _bind(self, env0, list(self.hole_ctx), size - ncells):
                if ncells and not _assigns(t, cells[:ncells]):
                    continue  # a cell never written reads 0 everywhere: a smaller context does the same
                for c in reversed(cells[:ncells]):
                    t = New(c, t)
                yield ContextTemplate(t, self.hole_ctx, self.hole_ty, size)

    def values(self, env: tuple, ty: Type, size: int) -> Iterator[Term]:
        """Closed-over-env values of type ty with exactly `size` nodes."""
        if isinstance(ty, Com):
            if size == 1:
                yield Unit()
            return
        if isinstance(ty, Exp):
            if size == 1:
                yield from (IntLit(j) for j in range(self.n + 1))
            return
        if isinstance(ty, Var):
            # mkvar(fn u:com => E, fn v:exp => C)
            u, v = self.name("u", env), self.name("v", env)
            for e, c in self._combine(env, [(env + ((u, COM),), EXP), (env + ((v, EXP),), COM)],
                                      size - 3, False):
                yield MkVar(Lambda(u, COM, e), Lambda(v, EXP, c))
            return
        yield from (t for t in self.terms(env, ty, size, False) if isinstance(t, Lambda))


def enumerate_contexts(hole_ctx, hole_ty: Type, max_size: int = DEFAULT_MAX_SIZE,
                       fragment: str = "IAcbv", n: int = 2) -> Iterator[ContextTemplate]:
    """Contexts C[-] : com for the hole (hole_ctx ⊢ - : hole_ty), by increasing size."""
    if fragment not in ("IAcbv", "IAloop"):
        raise ValueError(f"unsupported fragment {fragment}")
    hole_ctx = tuple(hole_ctx)
    g = _generator(hole_ctx, hole_ty, n)
    for size in range(1, max_size + 1):
        yield from g.contexts(size)


_GENERATORS: dict = {}


def _generator(hole_ctx: tuple, hole_ty: Type, n: int) -> "_Gen":
    """Generators are cached per hole signature, so repeated searches share their work."""
    key = (hole_ctx, hole_ty, n)
    if key not in _GENERATORS:
        _GENERATORS[key] = _Gen(hole_ctx, hole_ty, n, frozenset(x for x, _ in hole_ctx))
    return _GENERATORS[key]


def _assigns(t: Term, cells) -> bool:
    written = {s.target.name for s in subterms(t) if isinstance(s, Assign) and isinstance(s.target, Ident)}
    return all(c in written for c in cells)


def _bind(g: _Gen, env: tuple, todo: list, size: int) -> Iterator[Term]:
    if not todo:
        if size >= 1:
            yield from g.terms(env, COM, size, True)
        return
    (x, ty), rest = todo[0], todo[1:]
    if isinstance(ty, Var):
        for body in _bind(g, env + ((x, VAR),), rest, size - 1):
            yield New(x, body)
    for vsize in range(1, size - 1):
        for v in g.values(env, ty, vsize):
            for body in _bind(g, env + ((x, ty),), rest, size - 1 - vsize):
                yield Let(x, ty, v, body)


# ---------------------------------------------------------------- distinguishing


@dataclass(frozen=True)
class Witness:
    context: ContextTemplate
    converges: tuple  # (bool, bool) for the two fills
    fuel_used: tuple

    def __str__(self) -> str:
        return str(self.context)


def _run(t: Term, fuel: int, n: int):
    r = interp.evaluate({}, t, fuel, n)
    return isinstance(r, interp.Converged), r.fuel_used


def separates(ctx: ContextTemplate, m1: Term, m2: Term, fuel: int = DEFAULT_FUEL, n: int = 2):
    """The witness if exactly one fill converges and the other exhausts a generous budget."""
    t1, t2 = ctx.fill(m1), ctx.fill(m2)
    c1, u1 = _run(t1, fuel, n)
    c2, u2 = _run(t2, fuel, n)
    if c1 == c2:
        return None
    if c1 and not c2 and fuel < FUEL_FACTOR * u1:
        c2, u2 = _run(t2, FUEL_FACTOR * u1, n)
    if c2 and not c1 and fuel < FUEL_FACTOR * u2:
        c1, u1 = _run(t1, FUEL_FACTOR * u2, n)
    if c1 == c2:
        return None
    return Witness(ctx, (c1, c2), (u1, u2))


def distinguish(ctx, m1: Term, m2: Term, ty: Type | None = None, max_size: int = DEFAULT_MAX_SIZE,
                fuel: int = DEFAULT_FUEL, n: int = 2, fragment: str = "IAcbv") -> Witness | None:
    """First context (in enumeration order) whose fills disagree on convergence, if any."""
    ctx = tuple(ctx)
    t1, t2 = typecheck(ctx, m1), typecheck(ctx, m2)
    if t1 != t2 or (ty is not None and ty != t1):
        raise TypeError(f"terms have different types: {t1} vs {t2}")
    for c in enumerate_contexts(ctx, t1, max_size, fragment, n):
        w = separates(c, m1, m2, fuel, n)
        if w is not None:
            return w
    return None
