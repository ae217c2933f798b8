from __future__ import annotations

import pytest
from hypothesis import HealthCheck, given, settings

from gen import closed, terms
from iacbv.syntax import (
    COM, EXP, VAR, App, Arrow, Assign, Deref, Fragment, Ident, IntLit, Lambda, MkVar, New,
    ParseError, TypeError_, Unit, alpha_eq, annotate, arrow, classify_fragment, free_vars,
    parse_expr, parse_term, parse_type, pretty, substitute, type_order, typecheck,
)

SETTINGS = settings(max_examples=150, deadline=None, suppress_health_check=list(HealthCheck))


def test_parse_skip():
    j = parse_term("|- skip : com")
    assert (j.ctx, j.term, j.ty) == ((), Unit(), COM)


def test_parse_deref():
    j = parse_term("x:var |- !x : exp")
    assert j.ctx == (("x", VAR),)
    assert j.term == Deref(Ident("x"))
    assert j.ty == EXP


def test_parse_intro_lambda():
    j = parse_term("f:(com->exp)->(com->exp) |- fn y:com => 0 : com->exp")
    assert j.ctx == (("f", arrow(arrow(COM, EXP), COM, EXP)),)
    assert j.term == Lambda("y", COM, IntLit(0))
    assert j.ty == Arrow(COM, EXP)


def test_arrow_right_associative():
    assert parse_type("com->com->exp") == Arrow(COM, Arrow(COM, EXP))
    assert parse_type("(com->com)->exp") == Arrow(Arrow(COM, COM), EXP)


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_term("|- fn x => skip")
    with pytest.raises(ParseError):
        parse_term("|- skip skip )")


def test_typecheck_mkvar():
    t = MkVar(Lambda("x", COM, IntLit(1)), Lambda("y", EXP, Unit()))
    assert typecheck((), t) == VAR


def test_typecheck_mkvar_orientation():
    t = MkVar(Lambda("y", EXP, Unit()), Lambda("x", COM, IntLit(1)))
    with pytest.raises(TypeError_):
        typecheck((), t)


def test_typecheck_assign():
    assert typecheck((("x", VAR),), Assign(Ident("x"), IntLit(3))) == COM


def test_typecheck_not_a_function():
    with pytest.raises(TypeError_):
        typecheck((), App(IntLit(1), Unit()))


def test_typecheck_unbound():
    with pytest.raises(TypeError_):
        typecheck((), Ident("x"))


@pytest.mark.parametrize("ty,order", [
    (COM, 0), (EXP, 0), (VAR, 1), (arrow(arrow(COM, COM), COM), 2),
    (arrow(VAR, COM), 2), (arrow(COM, COM, COM), 1),
])
def test_type_order(ty, order):
    assert type_order(ty) == order


def test_classify_new_while():
    j = parse_term("|- new x in (while !x do x := 0; x := !x + 1; !x)")
    fr = classify_fragment(j.ctx, j.term)
    assert fr == {Fragment.IAcbv, Fragment.FullL, Fragment.IAloop, Fragment.IA2plus}


def test_classify_intro_context_is_ia2plus():
    j = parse_term("f:(com->exp)->(com->exp) |- fn y:com => 0")
    assert Fragment.IA2plus in classify_fragment(j.ctx, j.term)


def test_classify_third_order_context_is_not_ia2plus():
    j = parse_term("f:((com->com)->com)->com |- f (fn g:com->com => g skip)")
    fr = classify_fragment(j.ctx, j.term)
    assert Fragment.IAloop in fr
    assert Fragment.IA2plus not in fr


def test_classify_ref_and_literals():
    j = parse_term("|- let x = ref in !x")
    fr = classify_fragment(j.ctx, j.term)
    assert Fragment.RML in fr and Fragment.IAcbv not in fr and Fragment.IAloop not in fr
    big = parse_term("|- 7")
    assert Fragment.IA2plus not in classify_fragment(big.ctx, big.term, n=2)
    assert Fragment.IA2plus in classify_fragment(big.ctx, big.term, n=7)


def test_substitute_ident():
    assert substitute(Ident("x"), "x", IntLit(2)) == IntLit(2)


def test_substitute_shadowed():
    t = Lambda("x", EXP, Ident("x"))
    assert substitute(t, "x", IntLit(2)) == t


def test_substitute_avoids_capture():
    t = Lambda("y", EXP, Ident("x"))
    out = substitute(t, "x", Ident("y"))
    assert free_vars(out) == {"y"}
    assert not alpha_eq(out, Lambda("y", EXP, Ident("y")))


def test_free_vars_binder():
    assert free_vars(New("x", Deref(Ident("x")))) == frozenset()


def test_alpha_eq():
    assert alpha_eq(Lambda("x", EXP, Ident("x")), Lambda("y", EXP, Ident("y")))
    assert not alpha_eq(Lambda("x", EXP, Ident("z")), Lambda("y", EXP, Ident("y")))


@SETTINGS
@given(closed(COM))
def test_pretty_parse_roundtrip(t):
    assert annotate((), parse_expr(pretty(t))) == t


@SETTINGS
@given(terms({"f": Arrow(EXP, COM), "v": VAR}, EXP))
def test_typecheck_deterministic(t):
    ctx = (("f", Arrow(EXP, COM)), ("v", VAR))
    assert typecheck(ctx, t) == typecheck(ctx, t) == EXP


@SETTINGS
@given(closed(EXP))
def test_ia2plus_implies_iacbv_and_ialoop(t):
    fr = classify_fragment((), t)
    if Fragment.IA2plus in fr:
        assert Fragment.IAloop in fr and Fragment.IAcbv in fr
