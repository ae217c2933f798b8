"""Regular languages of complete plays for canonical IA2+ terms.

For each initial move of the judgment prearena (one value per base-typed
context identifier) a term denotes a regular language of the moves that
follow it. Symbols are moves of the prearena, written as tuple paths, with
an optional mark: ∘ on an O-answer that is the target of a pointer and • on
a P-question pointing to it. Every play is represented both with and without
each such pointer, so comparing the encoded languages compares plays.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import lang
from .canon import canonicalize
from .games import denote_type, render_element, render_move
from .lang import Nfa
from .syntax import (
    COM, EXP, VAR, App, Arrow, Assign, BinOp, Com, Deref, Exp, Fragment, Ident, If, IntLit,
    Judgment, Lambda, Let, MkVar, New, Term, Type, Unit, Var, While, check_judgment,
    classify_fragment, is_base, pretty_judgment, subterms,
)


class TranslateError(ValueError):
    """The judgment is outside IA2+ or the term is not canonical."""


@dataclass(frozen=True, order=True)
class Symbol:
    path: tuple
    mark: str = ""  # "", "o" (pointer target) or "b" (pointer source)

    def __str__(self) -> str:
        return render_move(self.path) + {"": "", "o": "°", "b": "•"}[self.mark]


def sym(*path, mark: str = "") -> Symbol:
    return Symbol(tuple(path), mark)


STAR = sym("", "*")


def base_values(ty: Type, n: int) -> list:
    """Payloads of the initial moves of a base type."""
    return ["*"] if isinstance(ty, Com) else list(range(n + 1))


def _arith(op: str, a: int, b: int, n: int) -> int:
    if op == "+":
        r = a + b
    elif op == "-":
        r = a - b
    elif op == "*":
        r = a * b
    else:
        raise TranslateError(f"unknown operator {op}")
    return r % (n + 1)


# ---------------------------------------------------------------- NFA helpers


def _word(*syms: Symbol) -> Nfa:
    return lang.lit(syms)


def _union(ms) -> Nfa:
    ms = list(ms)
    return lang.union(*ms) if ms else lang.empty()


def split(m: Nfa, last: Symbol) -> Nfa:
    """Words w with w·last in L(m)."""
    m = lang.remove_epsilon(m)
    acc = frozenset(p for p in range(m.n) if m.delta[p].get(last, frozenset()) & m.accept)
    delta = tuple({a: qs for a, qs in row.items() if a != last} for row in m.delta)
    return lang.trim(Nfa(m.n, m.start, acc, delta, m.alphabet - {last}))


def _small(m: Nfa) -> Nfa:
    return lang.minimize(m)


def cell_discipline(x: str, n: int, others) -> Nfa:
    """Good-variable behaviour of x (initially 0), with any other symbol allowed anywhere."""
    b = lang.nfa._Builder()
    val = [b.state() for _ in range(n + 1)]
    rd = [b.state() for _ in range(n + 1)]
    wr = [b.state() for _ in range(n + 1)]
    for v in range(n + 1):
        b.add(val[v], sym(x, "read"), rd[v])
        b.add(rd[v], sym(x, v), val[v])
        for j in range(n + 1):
            b.add(val[v], sym(x, f"write({j})"), wr[j])
        b.add(wr[v], sym(x, "ok"), val[v])
    for st in val + rd + wr:
        for a in others:
            b.add(st, a, st)
    return b.build(val[0], val)


# ---------------------------------------------------------------- clauses


class _Translator:
    def __init__(self, n: int):
        self.n = n

    def tr(self, t: Term, T: dict, V: dict) -> Nfa:
        return _small(self._tr(t, T, V))

    def _tr(self, t: Term, T: dict, V: dict) -> Nfa:
        n = self.n
        if isinstance(t, Unit):
            return _word(STAR)
        if isinstance(t, IntLit):
            if not 0 <= t.value <= n:
                raise TranslateError(f"literal {t.value} outside 0..{n}")
            return _word(sym("", t.value))
        if isinstance(t, Ident):
            if t.name not in V:
                raise TranslateError(f"non-canonical occurrence of {t.name}")
            return _word(sym("", V[t.name]))
        if isinstance(t, BinOp):
            return _word(sym("", _arith(t.op, self._val(t.left, V), self._val(t.right, V), n)))
        if isinstance(t, If):
            branch = t.then if self._val(t.cond, V) != 0 else t.orelse
            return self.tr(branch, T, V)
        if isinstance(t, Assign):
            x = self._name(t.target)
            return _word(sym(x, f"write({self._val(t.value, V)})"), sym(x, "ok"), STAR)
        if isinstance(t, Deref):
            x = self._name(t.target)
            return _union(_word(sym(x, "read"), sym(x, j), sym("", j)) for j in range(n + 1))
        if isinstance(t, MkVar):
            return self._mkvar(t, T, V)
        if isinstance(t, Lambda):
            return self._lambda(t, T, V)
        if isinstance(t, New):
            return self._new(t, T, V)
        if isinstance(t, While):
            guard = self.tr(t.guard, T, V)
            body = split(self.tr(t.body, T, V), STAR)
            loop = _union(lang.concat(split(guard, sym("", j)), body) for j in range(1, n + 1))
            return lang.concat(lang.star(loop), split(guard, sym("", 0)), _word(STAR))
        if isinstance(t, Let):
            if t.ty is None:
                raise TranslateError("unannotated let")
            if isinstance(t.bound, App):
                return self._let_app(t, T, V)
            if not is_base(t.ty):
                raise TranslateError(f"non-canonical let at type {t.ty}")
            m = self.tr(t.bound, T, V)
            return _union(
                lang.concat(split(m, sym("", v)), self.tr(t.body, {**T, t.var: t.ty}, {**V, t.var: v}))
                for v in base_values(t.ty, n)
            )
        raise TranslateError(f"non-canonical term {type(t).__name__}")

    def _val(self, t: Term, V: dict):
        if not isinstance(t, Ident) or t.name not in V:
            raise TranslateError("expected a base-typed identifier")
        return V[t.name]

    @staticmethod
    def _name(t: Term) -> str:
        if not isinstance(t, Ident):
            raise TranslateError("expected an identifier")
        return t.name

    def _mkvar(self, t: MkVar, T: dict, V: dict) -> Nfa:
        r, w = t.read, t.write
        read = lang.concat(
            _word(sym("", "read")), self.tr(r.body, {**T, r.var: COM}, {**V, r.var: "*"}))
        writes = []
        for j in range(self.n + 1):
            body = self.tr(w.body, {**T, w.var: EXP}, {**V, w.var: j})
            body = lang.rename(body, lambda a: sym("", "ok", mark=a.mark) if a.path == STAR.path else a)
            writes.append(lang.concat(_word(sym("", f"write({j})")), body))
        return lang.concat(_word(STAR), lang.optional(_union([read] + writes)))

    def _lambda(self, t: Lambda, T: dict, V: dict) -> Nfa:
        x, ty = t.var, t.ty

        def move(a: Symbol) -> Symbol:
            if a.path[0] == "":
                return Symbol(("", "res") + a.path[1:], a.mark)
            if a.path[0] == x:
                return Symbol(("", "arg") + a.path[1:], a.mark)
            return a

        alts = []
        if is_base(ty):
            for v in base_values(ty, self.n):
                body = self.tr(t.body, {**T, x: ty}, {**V, x: v})
                alts.append(lang.concat(_word(sym("", "arg", v)), lang.rename(body, move)))
        else:
            body = self.tr(t.body, {**T, x: ty}, V)
            alts.append(lang.concat(_word(sym("", "arg", "*")), lang.rename(body, move)))
        return lang.concat(_word(STAR), lang.optional(_union(alts)))

    def _new(self, t: New, T: dict, V: dict) -> Nfa:
        x = t.var
        body = self.tr(t.body, {**T, x: VAR}, V)
        others = [a for a in body.symbols_used() if a.path[0] != x]
        inter = lang.intersect(body, cell_discipline(x, self.n, others))
        return lang.erase(inter, lambda a: a.path[0] == x)

    # -- let x = z a in N

    def _detours(self, z: str, arg: Term, zty: Arrow, T: dict, V: dict) -> tuple:
        """(call, C'): the moves calling z with arg, and the detour language."""
        n = self.n
        if isinstance(arg, Ident):
            return _word(sym(z, "arg", self._val(arg, V))), lang.epsilon()
        if isinstance(arg, Lambda):
            y, b1 = arg.var, arg.ty
            b2 = zty.param.result
            alts = []
            for i in base_values(b1, n):
                m = self.tr(arg.body, {**T, y: b1}, {**V, y: i})
                alts.append(lang.concat(_word(sym(z, "arg", "arg", i)), _union(
                    lang.concat(split(m, sym("", j)), _word(sym(z, "arg", "res", j)))
                    for j in base_values(b2, n)
                )))
            return _word(sym(z, "arg", "*")), _small(lang.star(_union(alts)))
        if isinstance(arg, MkVar):
            r, w = arg.read, arg.write
            m1 = self.tr(r.body, {**T, r.var: COM}, {**V, r.var: "*"})
            alts = [lang.concat(_word(sym(z, "arg", "read")), _union(
                lang.concat(split(m1, sym("", j)), _word(sym(z, "arg", j))) for j in range(n + 1)
            ))]
            for j in range(n + 1):
                m2 = self.tr(w.body, {**T, w.var: EXP}, {**V, w.var: j})
                alts.append(lang.concat(
                    _word(sym(z, "arg", f"write({j})")), split(m2, STAR), _word(sym(z, "arg", "ok"))))
            return _word(sym(z, "arg", "*")), _small(lang.star(_union(alts)))
        raise TranslateError(f"non-canonical argument {type(arg).__name__}")

    def _let_app(self, t: Let, T: dict, V: dict) -> Nfa:
        z = self._name(t.bound.fn)
        zty = T.get(z)
        if not isinstance(zty, Arrow):
            raise TranslateError(f"{z} is not a function")
        x, ty = t.var, t.ty
        call, detour = self._detours(z, t.bound.arg, zty, T, V)
        start = lang.concat(call, detour)
        if is_base(ty):
            after = _union(
                lang.concat(_word(sym(z, "res", k)), self.tr(t.body, {**T, x: ty}, {**V, x: k}))
                for k in base_values(ty, self.n)
            )
            return lang.concat(start, after)
        body = self.tr(t.body, {**T, x: ty}, V)
        ar = denote_type(ty, self.n)
        firsts = {m for m in ar.moves if any(ar.enables(i, m) for i in ar.initial)}
        plain, marked = {}, {}
        for a in body.symbols_used():
            if a.path[0] != x:
                continue
            p = a.path[1:]
            moved = Symbol((z, "res") + p, a.mark)
            if p in firsts and not a.mark:
                plain[a] = lang.concat(_word(moved), detour)
                marked[a] = lang.concat(_word(Symbol(moved.path, "b")), detour)
            elif ar.is_o(p):  # an O-move of x's arena is a P-move in the judgment
                plain[a] = marked[a] = lang.concat(_word(moved), detour)
            else:
                plain[a] = marked[a] = _word(moved)
        target = sym(z, "res", "*")
        return lang.union(
            lang.concat(start, _word(Symbol(target.path, "o")), lang.subst(body, marked)),
            lang.concat(start, _word(target), lang.subst(body, plain)),
        )


# ---------------------------------------------------------------- public API


@dataclass
class ComponentLang:
    """Languages per initial move; keys are tuples of context payloads."""

    ctx: tuple
    ty: Type
    n: int
    components: dict = field(default_factory=dict)

    def initial_name(self, key: tuple) -> str:
        return render_initial(self.ctx, key)


def render_initial(ctx, key: tuple) -> str:
    if not ctx:
        return "*"
    return "(" + ",".join(render_element(v) for v in key) + ")"


def context_components(ctx, n: int) -> list:
    """All initial moves of the context as payload tuples (non-base identifiers give "*")."""
    return list(itertools.product(*[base_values(ty, n) if is_base(ty) else ["*"] for _, ty in ctx]))


def translate(ctx, c: Term, ty: Type, n: int = 2) -> ComponentLang:
    """Languages of complete spinal plays for the canonical judgment ctx ⊢ c : ty."""
    ctx = tuple(ctx)
    tr = _Translator(n)
    T = dict(ctx)
    out = ComponentLang(ctx, ty, n)
    for key in context_components(ctx, n):
        V = {x: v for (x, xty), v in zip(ctx, key) if is_base(xty)}
        out.components[key] = tr.tr(c, T, V)
    return out


def split_components(cl: ComponentLang) -> dict:
    """(initial key, j) -> words of the component ending in the result answer j, j stripped."""
    if not is_base(cl.ty):
        raise TranslateError(f"split_components needs a base result type, got {cl.ty}")
    return {(key, j): lang.minimize(split(m, sym("", j)))
            for key, m in cl.components.items() for j in base_values(cl.ty, cl.n)}


def max_literal(*terms: Term) -> int:
    return max([s.value for t in terms for s in subterms(t) if isinstance(s, IntLit)] + [0])


def check_ia2plus(ctx, t: Term, n: int) -> None:
    if Fragment.IA2plus not in classify_fragment(ctx, t, n):
        raise TranslateError(f"not an IA2+ judgment: {pretty_judgment(ctx, t)}")


@dataclass
class Verdict:
    equivalent: bool
    n: int
    initial: str | None = None
    word: tuple | None = None
    accepted_by: int | None = None  # 1 or 2: which term has the witness play

    @property
    def witness(self) -> str | None:
        if self.word is None:
            return None
        return " ".join([self.initial] + [str(a) for a in self.word])


def decide_equiv(j1: Judgment, j2: Judgment, n: int = 2) -> Verdict:
    """Contextual equivalence of two IA2+ judgments over the same context and type.

    Literals above n raise the bound to the largest literal in either term.
    """
    if dict(j1.ctx) != dict(j2.ctx):
        raise TranslateError("judgments have different contexts")
    ty1, ty2 = check_judgment(j1), check_judgment(j2)
    if ty1 != ty2:
        raise TranslateError(f"judgments have different types: {ty1} vs {ty2}")
    ctx = tuple(j1.ctx)
    n = max(n, max_literal(j1.term, j2.term))
    langs = []
    for j in (j1, j2):
        check_ia2plus(j.ctx, j.term, n)
        c = canonicalize(j.ctx, j.term)
        check_ia2plus(j.ctx, c, n)
        langs.append(translate(ctx, c, ty1, n))
    best = None
    for key in context_components(ctx, n):
        a, b = langs[0].components[key], langs[1].components[key]
        w = lang.difference_witness(a, b)
        if w is not None and (best is None or len(w) < len(best[1])):
            best = (key, w, 1 if lang.member(a, w) else 2)
    if best is None:
        return Verdict(True, n)
    key, w, side = best
    return Verdict(False, n, render_initial(ctx, key), w, side)
