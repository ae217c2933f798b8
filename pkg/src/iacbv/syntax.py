"""Abstract syntax, surface grammar, typing and fragment classification."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Union


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class Com:
    def __str__(self) -> str:
        return "com"


@dataclass(frozen=True)
class Exp:
    def __str__(self) -> str:
        return "exp"


@dataclass(frozen=True)
class Var:
    def __str__(self) -> str:
        return "var"


@dataclass(frozen=True)
class Arrow:
    param: "Type"
    result: "Type"

    def __str__(self) -> str:
        p = str(self.param)
        if isinstance(self.param, Arrow):
            p = f"({p})"
        return f"{p}->{self.result}"


Type = Union[Com, Exp, Var, Arrow]

COM = Com()
EXP = Exp()
VAR = Var()


def arrow(*tys: Type) -> Type:
    """Right-associated arrow chain: arrow(a, b, c) = a -> (b -> c)."""
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = Arrow(t, out)
    return out


def is_base(ty: Type) -> bool:
    return isinstance(ty, (Com, Exp))


def type_order(ty: Type) -> int:
    if is_base(ty):
        return 0
    if isinstance(ty, Var):
        return 1
    return max(type_order(ty.param) + 1, type_order(ty.result))


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # "+", "-", "*"
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class If:
    cond: "Term"
    then: "Term"
    orelse: "Term"


@dataclass(frozen=True)
class Deref:
    target: "Term"


@dataclass(frozen=True)
class Assign:
    target: "Term"
    value: "Term"


@dataclass(frozen=True)
class MkVar:
    read: "Term"
    write: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Lambda:
    var: str
    ty: Type
    body: "Term"


@dataclass(frozen=True)
class Fix:
    body: "Term"


@dataclass(frozen=True)
class New:
    var: str
    body: "Term"


@dataclass(frozen=True)
class Ref:
    pass


@dataclass(frozen=True)
class While:
    guard: "Term"
    body: "Term"


@dataclass(frozen=True)
class Let:
    """Display form of App(Lambda(var, ty, body), bound).

    A binder named "_" is the sequencing sugar M;N and is printed as such.
    """

    var: str
    ty: Type | None
    bound: "Term"
    body: "Term"


@dataclass(frozen=True)
class Loc:
    ident: int


@dataclass(frozen=True)
class Hole:
    """The hole of a context; only the oracle builds these."""


Term = Union[
    Unit, IntLit, Ident, BinOp, If, Deref, Assign, MkVar, App, Lambda, Fix,
    New, Ref, While, Let, Loc, Hole,
]

SEQ = "_"

Context = tuple  # tuple[tuple[str, Type], ...]


def seq(*terms: Term, ty: Type = COM) -> Term:
    """M1; M2; ...; Mk as nested lets with unused binders (all but the last of type ty)."""
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = Let(SEQ, ty, t, out)
    return out


def omega(ty: Type = COM) -> Term:
    """The divergent term Omega_ty: `while 1 do skip`, sequenced into ty."""
    loop = While(IntLit(1), Unit())
    if isinstance(ty, Com):
        return loop
    return Let(SEQ, COM, loop, _default_value(ty))


def _default_value(ty: Type) -> Term:
    if isinstance(ty, Com):
        return Unit()
    if isinstance(ty, Exp):
        return IntLit(0)
    if isinstance(ty, Var):
        return MkVar(Lambda("u", COM, IntLit(0)), Lambda("v", EXP, Unit()))
    return Lambda("u", ty.param, _default_value(ty.result))


def is_value(t: Term) -> bool:
    if isinstance(t, (Unit, IntLit, Loc, Lambda)):
        return True
    if isinstance(t, MkVar):
        return isinstance(t.read, Lambda) and isinstance(t.write, Lambda)
    return False


def children(t: Term) -> tuple:
    if isinstance(t, BinOp):
        return (t.left, t.right)
    if isinstance(t, If):
        return (t.cond, t.then, t.orelse)
    if isinstance(t, (Deref,)):
        return (t.target,)
    if isinstance(t, Assign):
        return (t.target, t.value)
    if isinstance(t, MkVar):
        return (t.read, t.write)
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, (Lambda, New)):
        return (t.body,)
    if isinstance(t, Fix):
        return (t.body,)
    if isinstance(t, While):
        return (t.guard, t.body)
    if isinstance(t, Let):
        return (t.bound, t.body)
    return ()


def size(t: Term) -> int:
    """Number of AST nodes."""
    return 1 + sum(size(c) for c in children(t))


def subterms(t: Term) -> Iterator[Term]:
    yield t
    for c in children(t):
        yield from subterms(c)


# ---------------------------------------------------------------- names


def free_vars(t: Term) -> frozenset:
    if isinstance(t, Ident):
        return frozenset([t.name])
    if isinstance(t, (Lambda, New)):
        return free_vars(t.body) - {t.var}
    if isinstance(t, Let):
        return free_vars(t.bound) | (free_vars(t.body) - {t.var})
    out: frozenset = frozenset()
    for c in children(t):
        out |= free_vars(c)
    return out


def bound_names(t: Term) -> set:
    out = set()
    for s in subterms(t):
        if isinstance(s, (Lambda, New, Let)):
            out.add(s.var)
    return out


class FreshNames:
    """Supply of names `$k` that never clash with user identifiers."""

    def __init__(self, prefix: str = "$"):
        self.prefix = prefix
        self._counter = itertools.count()

    def __call__(self) -> str:
        return f"{self.prefix}{next(self._counter)}"


_global_fresh = FreshNames()


def fresh_name() -> str:
    return _global_fresh()


def rebuild(t: Term, kids: list) -> Term:
    """Same node as t with its children replaced (in children() order)."""
    if isinstance(t, BinOp):
        return BinOp(t.op, kids[0], kids[1])
    if isinstance(t, If):
        return If(*kids)
    if isinstance(t, Deref):
        return Deref(kids[0])
    if isinstance(t, Assign):
        return Assign(kids[0], kids[1])
    if isinstance(t, MkVar):
        return MkVar(kids[0], kids[1])
    if isinstance(t, App):
        return App(kids[0], kids[1])
    if isinstance(t, Lambda):
        return Lambda(t.var, t.ty, kids[0])
    if isinstance(t, New):
        return New(t.var, kids[0])
    if isinstance(t, Fix):
        return Fix(kids[0])
    if isinstance(t, While):
        return While(kids[0], kids[1])
    if isinstance(t, Let):
        return Let(t.var, t.ty, kids[0], kids[1])
    return t


def substitute(t: Term, x: str, v: Term) -> Term:
    """Capture-avoiding t[v/x]."""
    return substitute_many(t, {x: v})


def substitute_many(t: Term, sub: dict) -> Term:
    if not sub:
        return t
    if isinstance(t, Ident):
        return sub.get(t.name, t)
    if isinstance(t, (Lambda, New, Let)):
        inner = {k: val for k, val in sub.items() if k != t.var}
        bound = t.bound if isinstance(t, Let) else None
        if bound is not None:
            bound = substitute_many(bound, sub)
        name = t.var
        body = t.body
        if inner:
            fv = free_vars(body)
            clash = set()
            for k, val in inner.items():
                if k in fv:
                    clash |= free_vars(val)
            if name in clash:
                new = fresh_name()
                body = substitute_many(body, {name: Ident(new)})
                name = new
            body = substitute_many(body, inner)
        if isinstance(t, Lambda):
            return Lambda(name, t.ty, body)
        if isinstance(t, New):
            return New(name, body)
        return Let(name, t.ty, bound, body)
    kids = children(t)
    if not kids:
        return t
    return rebuild(t, [substitute_many(c, sub) for c in kids])


def freshen(t: Term, fresh: FreshNames | None = None) -> Term:
    """Rename every binder in t to a fresh name (sequencing binders too)."""
    fresh = fresh or _global_fresh
    return _freshen(t, {}, fresh)


def _freshen(t: Term, ren: dict, fresh: FreshNames) -> Term:
    if isinstance(t, Ident):
        return Ident(ren.get(t.name, t.name))
    if isinstance(t, (Lambda, New, Let)):
        new = SEQ if isinstance(t, Let) and t.var == SEQ else fresh()
        body = _freshen(t.body, {**ren, t.var: new}, fresh)
        if isinstance(t, Lambda):
            return Lambda(new, t.ty, body)
        if isinstance(t, New):
            return New(new, body)
        return Let(new, t.ty, _freshen(t.bound, ren, fresh), body)
    kids = children(t)
    if not kids:
        return t
    return rebuild(t, [_freshen(c, ren, fresh) for c in kids])


def alpha_eq(a: Term, b: Term) -> bool:
    return _debruijn(a, ()) == _debruijn(b, ())


def _debruijn(t: Term, env: tuple):
    if isinstance(t, Ident):
        for i, n in enumerate(reversed(env)):
            if n == t.name:
                return ("bv", i)
        return ("fv", t.name)
    if isinstance(t, Lambda):
        return ("lam", t.ty, _debruijn(t.body, env + (t.var,)))
    if isinstance(t, New):
        return ("new", _debruijn(t.body, env + (t.var,)))
    if isinstance(t, Let):
        return ("let", t.ty, _debruijn(t.bound, env), _debruijn(t.body, env + (t.var,)))
    kids = children(t)
    head = (type(t).__name__,)
    if isinstance(t, BinOp):
        head += (t.op,)
    elif isinstance(t, IntLit):
        head += (t.value,)
    elif isinstance(t, Loc):
        head += (t.ident,)
    return head + tuple(_debruijn(c, env) for c in kids)


# ---------------------------------------------------------------- typing


class TypeError_(Exception):
    """Typing failure; `rule` names the rule that failed and `term` the subterm."""

    def __init__(self, message: str, term: Term | None = None, rule: str = ""):
        super().__init__(message)
        self.term = term
        self.rule = rule


def ctx_lookup(ctx, name: str) -> Type | None:
    for x, ty in reversed(tuple(ctx)):
        if x == name:
            return ty
    return None


def typecheck(ctx, t: Term, hole: tuple | None = None) -> Type:
    """The unique type of t in ctx. `hole` = (hole_ctx, hole_ty) when t is a context."""
    return _tc(dict(ctx), t, hole)


def _expect(ty: Type, want: Type, t: Term, rule: str) -> None:
    if ty != want:
        raise TypeError_(f"{rule}: expected {want}, got {ty} in {pretty(t)}", t, rule)


def _tc(env: dict, t: Term, hole) -> Type:
    if isinstance(t, Unit):
        return COM
    if isinstance(t, IntLit):
        return EXP
    if isinstance(t, Ident):
        if t.name not in env:
            raise TypeError_(f"unbound identifier {t.name}", t, "var")
        return env[t.name]
    if isinstance(t, Loc):
        return VAR
    if isinstance(t, Ref):
        return VAR
    if isinstance(t, Hole):
        if hole is None:
            raise TypeError_("hole outside a context", t, "hole")
        hctx, hty = hole
        for x, ty in hctx:
            if env.get(x) != ty:
                raise TypeError_(f"hole needs {x}:{ty} in scope", t, "hole")
        return hty
    if isinstance(t, BinOp):
        _expect(_tc(env, t.left, hole), EXP, t, "arith")
        _expect(_tc(env, t.right, hole), EXP, t, "arith")
        return EXP
    if isinstance(t, If):
        _expect(_tc(env, t.cond, hole), EXP, t, "if")
        a = _tc(env, t.then, hole)
        b = _tc(env, t.orelse, hole)
        _expect(b, a, t, "if")
        return a
    if isinstance(t, Deref):
        _expect(_tc(env, t.target, hole), VAR, t, "deref")
        return EXP
    if isinstance(t, Assign):
        _expect(_tc(env, t.target, hole), VAR, t, "assign")
        _expect(_tc(env, t.value, hole), EXP, t, "assign")
        return COM
    if isinstance(t, MkVar):
        _expect(_tc(env, t.read, hole), Arrow(COM, EXP), t, "mkvar")
        _expect(_tc(env, t.write, hole), Arrow(EXP, COM), t, "mkvar")
        return VAR
    if isinstance(t, App):
        f = _tc(env, t.fn, hole)
        if not isinstance(f, Arrow):
            raise TypeError_(f"app: not a function: {pretty(t.fn)} : {f}", t, "app")
        _expect(_tc(env, t.arg, hole), f.param, t, "app")
        return f.result
    if isinstance(t, Lambda):
        return Arrow(t.ty, _tc({**env, t.var: t.ty}, t.body, hole))
    if isinstance(t, Fix):
        f = _tc(env, t.body, hole)
        if not (isinstance(f, Arrow) and isinstance(f.param, Arrow) and f.param == f.result):
            raise TypeError_(f"fix: expected (a->b)->(a->b), got {f}", t, "fix")
        return f.param
    if isinstance(t, New):
        body = _tc({**env, t.var: VAR}, t.body, hole)
        if not is_base(body):
            raise TypeError_(f"new: body must have base type, got {body}", t, "new")
        return body
    if isinstance(t, While):
        _expect(_tc(env, t.guard, hole), EXP, t, "while")
        _expect(_tc(env, t.body, hole), COM, t, "while")
        return COM
    if isinstance(t, Let):
        b = _tc(env, t.bound, hole)
        if t.ty is not None:
            _expect(b, t.ty, t, "let")
        return _tc({**env, t.var: b}, t.body, hole)
    raise TypeError_(f"unknown term {t!r}", t, "?")


def annotate(ctx, t: Term, hole=None) -> Term:
    """Fill in the binder types of Let nodes (the parser leaves them empty)."""
    return _annotate(dict(ctx), t, hole)


def _annotate(env: dict, t: Term, hole) -> Term:
    if isinstance(t, Let):
        bound = _annotate(env, t.bound, hole)
        ty = _tc(env, bound, hole)
        if t.ty is not None and t.ty != ty:
            raise TypeError_(f"let: annotated {t.ty}, bound has {ty}", t, "let")
        return Let(t.var, ty, bound, _annotate({**env, t.var: ty}, t.body, hole))
    if isinstance(t, Lambda):
        return Lambda(t.var, t.ty, _annotate({**env, t.var: t.ty}, t.body, hole))
    if isinstance(t, New):
        return New(t.var, _annotate({**env, t.var: VAR}, t.body, hole))
    kids = children(t)
    if not kids:
        return t
    return rebuild(t, [_annotate(env, c, hole) for c in kids])


# ---------------------------------------------------------------- fragments


class Fragment(Enum):
    PCFplus = "PCF+"
    IAcbv = "IAcbv"
    RML = "RML"
    FullL = "L"
    IAloop = "IAloop"
    IA2plus = "IA2+"


def is_phi(ty: Type) -> bool:
    """Context types of IA2+: β | var | β→Φ | var→Φ | (β→β)→Φ."""
    if is_base(ty) or isinstance(ty, Var):
        return True
    p = ty.param
    ok_param = (
        is_base(p)
        or isinstance(p, Var)
        or (isinstance(p, Arrow) and is_base(p.param) and is_base(p.result))
    )
    return ok_param and is_phi(ty.result)


def is_theta(ty: Type) -> bool:
    """Result types of IA2+: β | var | Φ→Θ."""
    if is_base(ty) or isinstance(ty, Var):
        return True
    return is_phi(ty.param) and is_theta(ty.result)


def judgments(ctx, t: Term) -> Iterator[tuple]:
    """Every judgment (context types, type) in the typing derivation of t."""
    env = dict(ctx)
    yield from _judgments(env, t)


def _judgments(env: dict, t: Term):
    ty = _tc(env, t, None)
    yield (tuple(env.values()), ty)
    if isinstance(t, Lambda):
        yield from _judgments({**env, t.var: t.ty}, t.body)
    elif isinstance(t, New):
        yield from _judgments({**env, t.var: VAR}, t.body)
    elif isinstance(t, Let):
        yield from _judgments(env, t.bound)
        yield from _judgments({**env, t.var: _tc(env, t.bound, None)}, t.body)
    else:
        for c in children(t):
            yield from _judgments(env, c)


def classify_fragment(ctx, t: Term, n: int = 2) -> set:
    """All fragments the judgment ctx |- t inhabits (t must typecheck)."""
    typecheck(ctx, t)
    nodes = list(subterms(t))
    has_new = any(isinstance(s, New) for s in nodes)
    has_ref = any(isinstance(s, Ref) for s in nodes)
    has_fix = any(isinstance(s, Fix) for s in nodes)
    has_loc = any(isinstance(s, Loc) for s in nodes)
    small_ints = all(s.value <= n for s in nodes if isinstance(s, IntLit))
    out = set()
    if has_loc:
        return out
    # while counts as part of L (it is definable with fix)
    out.add(Fragment.FullL)
    if not has_ref:
        out.add(Fragment.IAcbv)
    if not has_new:
        out.add(Fragment.RML)
    if not has_ref and not has_new:
        out.add(Fragment.PCFplus)
    if not has_fix and not has_ref and small_ints:
        out.add(Fragment.IAloop)
        if all(
            all(is_phi(c) for c in cts) and is_theta(ty)
            for cts, ty in judgments(ctx, t)
        ):
            out.add(Fragment.IA2plus)
    return out


# ---------------------------------------------------------------- printing


_PREC_SEQ, _PREC_EXPR, _PREC_ASSIGN, _PREC_ADD, _PREC_MUL, _PREC_APP, _PREC_UNARY, _PREC_ATOM = range(8)


def pretty(t: Term) -> str:
    return _pp(t, _PREC_SEQ, True)


def _open_ended(t: Term) -> bool:
    """Does the printed form end in a construct whose body extends rightwards?"""
    if isinstance(t, (Lambda, New)):
        return True
    if isinstance(t, Let):
        return t.var != SEQ or _open_ended(t.body)
    if isinstance(t, If):
        return _open_ended(t.orelse)
    if isinstance(t, While):
        return _open_ended(t.body)
    if isinstance(t, Assign):
        return _open_ended(t.value)
    return False


def _paren(s: str, inner: int, outer: int) -> str:
    return f"({s})" if inner < outer else s


def _pp(t: Term, prec: int, tail: bool) -> str:
    if not tail and _open_ended(t):
        return "(" + _pp(t, _PREC_SEQ, True) + ")"
    if isinstance(t, Unit):
        return "skip"
    if isinstance(t, IntLit):
        return str(t.value)
    if isinstance(t, Ident):
        return t.name
    if isinstance(t, Loc):
        return f"loc{t.ident}"
    if isinstance(t, Ref):
        return "ref"
    if isinstance(t, Hole):
        return "[-]"
    if isinstance(t, BinOp):
        p = _PREC_MUL if t.op == "*" else _PREC_ADD
        s = f"{_pp(t.left, p, False)} {t.op} {_pp(t.right, p + 1, False)}"
        return _paren(s, p, prec)
    if isinstance(t, Deref):
        return _paren("!" + _pp(t.target, _PREC_UNARY, False), _PREC_UNARY, prec)
    if isinstance(t, Fix):
        return _paren("fix " + _pp(t.body, _PREC_UNARY, False), _PREC_UNARY, prec)
    if isinstance(t, App):
        arg = "()" if isinstance(t.arg, Unit) else _pp(t.arg, _PREC_UNARY, False)
        return _paren(f"{_pp(t.fn, _PREC_APP, False)} {arg}", _PREC_APP, prec)
    if isinstance(t, MkVar):
        return f"mkvar({pretty(t.read)}, {pretty(t.write)})"
    if isinstance(t, Assign):
        s = f"{_pp(t.target, _PREC_ADD, False)} := {_pp(t.value, _PREC_EXPR, True)}"
        return _paren(s, _PREC_ASSIGN, prec)
    if isinstance(t, If):
        s = (
            f"if {pretty(t.cond)} then {_pp(t.then, _PREC_EXPR, True)}"
            f" else {_pp(t.orelse, _PREC_EXPR, True)}"
        )
        return _paren(s, _PREC_EXPR, prec)
    if isinstance(t, While):
        s = f"while {pretty(t.guard)} do {_pp(t.body, _PREC_EXPR, True)}"
        return _paren(s, _PREC_EXPR, prec)
    if isinstance(t, Lambda):
        return _paren(f"fn {t.var}:{t.ty} => {pretty(t.body)}", _PREC_EXPR, prec)
    if isinstance(t, New):
        return _paren(f"new {t.var} in {pretty(t.body)}", _PREC_EXPR, prec)
    if isinstance(t, Let):
        if t.var == SEQ:
            s = f"{_pp(t.bound, _PREC_EXPR, False)}; {_pp(t.body, _PREC_SEQ, True)}"
            return _paren(s, _PREC_SEQ, prec)
        s = f"let {t.var} = {pretty(t.bound)} in {pretty(t.body)}"
        return _paren(s, _PREC_EXPR, prec)
    raise ValueError(f"cannot print {t!r}")


def pretty_context(ctx) -> str:
    return ", ".join(f"{x}:{ty}" for x, ty in ctx)


def pretty_judgment(ctx, t: Term, ty: Type | None = None) -> str:
    head = pretty_context(ctx)
    out = f"{head} |- {pretty(t)}" if head else f"|- {pretty(t)}"
    if ty is not None:
        out += f" : {ty}"
    return out


# ---------------------------------------------------------------- parsing


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>\d+)
  | (?P<hole>\[-\])
  | (?P<op>\|-|->|=>|:=|[()\[\],:;=!+\-*])
  | (?P<id>[A-Za-z_$][A-Za-z0-9_$']*)
    """,
    re.VERBOSE,
)

KEYWORDS = {
    "skip", "if", "then", "else", "fn", "fix", "new", "in", "ref", "while",
    "do", "let", "mkvar", "com", "exp", "var",
}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list:
    toks = []
    pos = 0
    line, col = 1, 1
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        text = m.group(0)
        kind = m.lastgroup
        if kind != "ws":
            if kind == "id" and text in KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, text, line, col))
        for ch in text:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str):
        t = self.tok
        raise ParseError(f"{msg} (found {t.text or 'end of input'!r})", t.line, t.col)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "kw", "hole")

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.eat(text):
            self.error(f"expected {text!r}")

    def ident(self) -> str:
        if self.tok.kind != "id" or self.tok.text == SEQ:
            self.error("expected identifier")
        name = self.tok.text
        self.i += 1
        return name

    # types: atom ('->' type)?
    def type_(self) -> Type:
        if self.eat("("):
            t = self.type_()
            self.expect(")")
        elif self.eat("com"):
            t = COM
        elif self.eat("exp"):
            t = EXP
        elif self.eat("var"):
            t = VAR
        else:
            self.error("expected a type")
        if self.eat("->"):
            return Arrow(t, self.type_())
        return t

    def context(self) -> tuple:
        ctx = []
        if self.at("|-"):
            return ()
        while True:
            tok = self.tok
            x = self.ident()
            self.expect(":")
            ty = self.type_()
            if any(x == y for y, _ in ctx):
                raise ParseError(f"duplicate context name {x}", tok.line, tok.col)
            ctx.append((x, ty))
            if not self.eat(","):
                return tuple(ctx)

    def seq(self) -> Term:
        t = self.expr()
        if self.eat(";"):
            return Let(SEQ, None, t, self.seq())
        return t

    def expr(self) -> Term:
        if self.eat("fn"):
            x = self.ident()
            self.expect(":")
            ty = self.type_()
            self.expect("=>")
            return Lambda(x, ty, self.seq())
        if self.eat("let"):
            x = self.ident()
            self.expect("=")
            m = self.seq()
            self.expect("in")
            return Let(x, None, m, self.seq())
        if self.eat("new"):
            x = self.ident()
            self.expect("in")
            return New(x, self.seq())
        if self.eat("while"):
            g = self.seq()
            self.expect("do")
            return While(g, self.expr())
        if self.eat("if"):
            c = self.seq()
            self.expect("then")
            a = self.expr()
            self.expect("else")
            return If(c, a, self.expr())
        return self.assign()

    def assign(self) -> Term:
        t = self.arith()
        if self.eat(":="):
            return Assign(t, self.expr())
        return t

    def arith(self) -> Term:
        t = self.term()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            t = BinOp(op, t, self.term())
        return t

    def term(self) -> Term:
        t = self.app()
        while self.eat("*"):
            t = BinOp("*", t, self.app())
        return t

    def _starts_atom(self) -> bool:
        tok = self.tok
        if tok.kind in ("num", "id", "hole"):
            return True
        return tok.text in ("(", "skip", "ref", "mkvar", "!", "fix") and tok.kind in ("op", "kw")

    def app(self) -> Term:
        t = self.unary()
        while self._starts_atom():
            t = App(t, self.unary())
        return t

    def unary(self) -> Term:
        if self.eat("!"):
            return Deref(self.unary())
        if self.eat("fix"):
            return Fix(self.unary())
        return self.atom()

    def atom(self) -> Term:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return IntLit(int(tok.text))
        if tok.kind == "id":
            return Ident(self.ident())
        if tok.kind == "hole":
            self.i += 1
            return Hole()
        if self.eat("skip"):
            return Unit()
        if self.eat("ref"):
            return Ref()
        if self.eat("mkvar"):
            self.expect("(")
            r = self.seq()
            self.expect(",")
            w = self.seq()
            self.expect(")")
            return MkVar(r, w)
        if self.eat("("):
            if self.eat(")"):
                return Unit()
            t = self.seq()
            self.expect(")")
            return t
        self.error("expected a term")


def parse_type(src: str) -> Type:
    p = _Parser(src)
    t = p.type_()
    if p.tok.kind != "eof":
        p.error("trailing input after type")
    return t


def parse_expr(src: str) -> Term:
    """A bare term (no context, no annotation); Let binder types left empty."""
    p = _Parser(src)
    t = p.seq()
    if p.tok.kind != "eof":
        p.error("trailing input after term")
    return t


@dataclass(frozen=True)
class Judgment:
    ctx: tuple
    term: Term
    ty: Type | None

    def __str__(self) -> str:
        return pretty_judgment(self.ctx, self.term, self.ty)


def parse_term(src: str) -> Judgment:
    """Parse `Γ |- M : θ` (the `: θ` part is optional).

    Let binder types are filled in by typing when the term typechecks;
    otherwise they stay empty so that typing errors surface later.
    """
    p = _Parser(src)
    ctx = p.context()
    p.expect("|-")
    term = p.seq()
    ty = None
    if p.eat(":"):
        ty = p.type_()
    if p.tok.kind != "eof":
        p.error("trailing input")
    try:
        term = annotate(ctx, term)
    except TypeError_:
        pass
    return Judgment(ctx, term, ty)


def check_judgment(j: Judgment) -> Type:
    """Typecheck a parsed judgment against its annotation (if any)."""
    ty = typecheck(j.ctx, j.term)
    if j.ty is not None and ty != j.ty:
        raise TypeError_(f"declared type {j.ty} but term has type {ty}", j.term, "judgment")
    return ty
