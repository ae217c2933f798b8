from __future__ import annotations

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from gen import closed
from iacbv.interp import Converged, OutOfFuel, converges, evaluate
from iacbv.syntax import COM, EXP, IntLit, Loc, Ref, Unit, While, omega, parse_expr

SETTINGS = settings(max_examples=150, deadline=None, suppress_health_check=list(HealthCheck))


def test_ref_allocates():
    r = evaluate({}, Ref(), 10)
    assert isinstance(r, Converged)
    assert r.heap == {0: 0}
    assert r.value == Loc(0)


def test_new_increment():
    r = evaluate({}, parse_expr("new x in (x := !x + 1; !x)"), 100)
    assert isinstance(r, Converged)
    assert r.value == IntLit(1)
    assert r.heap == {}


def test_while_one_out_of_fuel():
    assert isinstance(evaluate({}, While(IntLit(1), Unit()), 50), OutOfFuel)


def test_converges_skip():
    assert converges(Unit())


def test_omega_unknown():
    for fuel in (10, 1000, 100_000):
        assert not converges(omega(COM), fuel)


def test_converges_new_if():
    assert converges(parse_expr("new x in (x := 1; if !x then skip else while 1 do skip)"))


def test_evaluation_order_left_to_right():
    t = parse_expr("new x in ((x := 1; 0) + (x := !x + 1; !x))")
    assert evaluate({}, t).value == IntLit(2)


def test_finitary_arithmetic():
    assert evaluate({}, parse_expr("2 + 2"), n=2).value == IntLit(1)
    assert evaluate({}, parse_expr("0 - 1"), n=2).value == IntLit(2)
    assert evaluate({}, parse_expr("2 + 2")).value == IntLit(4)


def test_fix_factorial_like():
    t = parse_expr("(fix (fn f:exp->exp => fn k:exp => if k then k + f (k - 1) else 0)) 3")
    assert evaluate({}, t).value == IntLit(6)


def test_mkvar_value():
    t = parse_expr("new c in (mkvar(fn u:com => !c + 1, fn v:exp => c := v) := 1; !c)")
    assert evaluate({}, t).value == IntLit(1)


@SETTINGS
@given(closed(EXP), st.integers(1, 400))
def test_fuel_monotone(t, k):
    r = evaluate({}, t, k, 2)
    if isinstance(r, Converged):
        assert evaluate({}, t, k * 3, 2) == r
        assert evaluate({}, t, 100_000, 2) == r


@SETTINGS
@given(closed(EXP))
def test_heap_frame(t):
    heap = {0: 1, 1: 2}
    r = evaluate(heap, t, 10_000, 2)
    if isinstance(r, Converged):
        assert set(r.heap) == set(heap)


@SETTINGS
@given(closed(EXP))
def test_deterministic(t):
    assert evaluate({}, t, 5_000, 2) == evaluate({}, t, 5_000, 2)


@SETTINGS
@given(closed(EXP))
def test_finitary_values_in_range(t):
    r = evaluate({}, t, 5_000, 2)
    if isinstance(r, Converged):
        assert 0 <= r.value.value <= 2
