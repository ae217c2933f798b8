from __future__ import annotations

import pytest
from hypothesis import HealthCheck, given, settings

from gen import closed
from iacbv import lang
from iacbv.canon import canonicalize
from iacbv.games import prearena_of_judgment
from iacbv.interp import Converged, evaluate
from iacbv.syntax import EXP, Fragment, check_judgment, classify_fragment, parse_term
from iacbv.translate import (
    STAR, Symbol, TranslateError, cell_discipline, decide_equiv, split_components, sym, translate,
)

G1 = "f:com->com->com |- let g1 = f skip in let g2 = f skip in g1 skip"
G2 = "f:com->com->com |- let g1 = f skip in let g2 = f skip in g2 skip"


def tr(src: str, n: int = 2):
    j = parse_term(src)
    ty = check_judgment(j)
    return translate(j.ctx, canonicalize(j.ctx, j.term), ty, n)


def words(m, k: int = 10) -> set:
    return lang.enumerate_up_to(m, k)


def strip(w: tuple) -> tuple:
    return tuple(Symbol(a.path) for a in w)


def check(a: str, b: str, n: int = 2):
    return decide_equiv(parse_term(a), parse_term(b), n)


# ---------------------------------------------------------------- clauses


def test_literal():
    cl = tr("|- 3 : exp", n=3)
    assert words(cl.components[()]) == {(sym("", 3),)}


def test_assign_per_component():
    cl = tr("x:var, y:exp |- x := y")
    for j in range(3):
        want = (sym("x", f"write({j})"), sym("x", "ok"), STAR)
        assert words(cl.components[("*", j)]) == {want}


def test_deref():
    cl = tr("x:var |- !x")
    assert words(cl.components[("*",)]) == {(sym("x", "read"), sym("x", j), sym("", j)) for j in range(3)}


def test_new_deref_is_zero():
    cl = tr("|- new x in !x")
    assert words(cl.components[()]) == {(sym("", 0),)}


def test_if_selects_branch():
    cl = tr("b:exp |- if b then 1 else 2")
    assert words(cl.components[(0,)]) == {(sym("", 2),)}
    assert words(cl.components[(1,)]) == words(cl.components[(2,)]) == {(sym("", 1),)}


def test_lambda_threads_one_argument():
    cl = tr("|- fn y:exp => y + 1")
    ws = words(cl.components[()])
    assert (STAR,) in ws
    assert (STAR, sym("", "arg", 2), sym("", "res", 0)) in ws
    assert all(len(w) in (1, 3) for w in ws)


def test_while_guard_from_context():
    cl = tr("c:exp |- while c do skip")
    assert words(cl.components[(0,)]) == {(STAR,)}
    assert words(cl.components[(1,)]) == set()


def test_while_reading_a_cell():
    cl = tr("x:var |- while !x do x := 0")
    ws = words(cl.components[("*",)], 8)
    assert (sym("x", "read"), sym("x", 0), STAR) in ws
    assert (sym("x", "read"), sym("x", 1), sym("x", "write(0)"), sym("x", "ok"),
            sym("x", "read"), sym("x", 0), STAR) in ws


def test_mkvar():
    cl = tr("|- mkvar(fn u:com => 1, fn v:exp => skip)")
    ws = words(cl.components[()])
    assert ws == {(STAR,), (STAR, sym("", "read"), sym("", 1))} | {
        (STAR, sym("", f"write({j})"), sym("", "ok")) for j in range(3)}


def test_base_application():
    cl = tr("f:exp->exp |- let r = f 1 in r + r")
    ws = words(cl.components[("*",)])
    assert ws == {(sym("f", "arg", 1), sym("f", "res", j), sym("", (2 * j) % 3)) for j in range(3)}


def test_rejects_non_ia2plus():
    j = parse_term("f:((com->com)->com)->com |- f (fn g:com->com => g skip)")
    with pytest.raises(TranslateError):
        decide_equiv(j, j)


# ---------------------------------------------------------------- cell discipline


def _cell(n=1):
    return cell_discipline("x", n, [STAR])


def test_cell_accepts_write_then_read():
    w = [sym("x", "read"), sym("x", 0), sym("x", "write(1)"), sym("x", "ok"), sym("x", "read"), sym("x", 1)]
    assert lang.member(_cell(), w)


def test_cell_first_read_is_zero():
    assert not lang.member(_cell(), [sym("x", "read"), sym("x", 1)])


def test_cell_accepts_empty_and_other_symbols():
    assert lang.member(_cell(), [])
    assert lang.member(_cell(), [STAR, STAR])


# ---------------------------------------------------------------- split


def test_split_literal():
    parts = split_components(tr("|- 3 : exp", n=3))
    assert words(parts[((), 3)]) == {()}
    assert all(lang.is_empty(parts[((), j)]) for j in range(3))


def test_split_deref_guard():
    parts = split_components(tr("x:var |- !x"))
    assert words(parts[(("*",), 0)]) == {(sym("x", "read"), sym("x", 0))}


def test_split_empty_language():
    parts = split_components(tr("|- while 1 do skip; 1"))
    assert all(lang.is_empty(m) for m in parts.values())


def test_split_needs_base_type():
    with pytest.raises(TranslateError):
        split_components(tr("|- fn y:exp => y"))


# ---------------------------------------------------------------- hygiene


@pytest.mark.parametrize("src", [
    "|- new x in (x := 1; !x)",
    "f:(com->com)->com |- new x in f (fn u:com => x := 1)",
    "f:exp->com |- new x in (f !x; x := 2; f !x)",
])
def test_new_erases_local_moves(src):
    cl = tr(src)
    for m in cl.components.values():
        assert all(a.path[0] != "x" for a in m.symbols_used())


@pytest.mark.parametrize("src", [G1, G2, "f:com->exp->com |- let g = f skip in g 1; g 2",
                                 "f:com->com->com |- let g = f skip in g skip; g skip"])
def test_marks_only_on_pointer_ends(src):
    j = parse_term(src)
    ar = prearena_of_judgment(j.ctx, check_judgment(j), 2)
    cl = tr(src)
    for m in cl.components.values():
        for a in m.symbols_used():
            if a.mark == "o":
                assert ar.labels[a.path] == ("O", "A")
            elif a.mark == "b":
                assert ar.labels[a.path] == ("P", "Q")


@pytest.mark.parametrize("src", [G1, G2, "f:com->exp->com |- let g = f skip in g 1; g 2"])
def test_stripping_marks_stays_in_language(src):
    for m in tr(src).components.values():
        for w in words(m):
            assert lang.member(m, strip(w))


def test_g1_g2_equal_up_to_pointers():
    a, b = tr(G1).components[("*",)], tr(G2).components[("*",)]
    assert not lang.equivalent(a, b)
    plain = lambda m: {strip(w) for w in words(m)}
    assert plain(a) == plain(b)
    assert {w for w in words(a) if w == strip(w)} == {w for w in words(b) if w == strip(w)}


# ---------------------------------------------------------------- decide_equiv


def test_equiv_new_five():
    assert check("|- new x in 5", "|- 5").equivalent


def test_one_two_witness():
    v = check("|- 1", "|- 2")
    assert not v.equivalent
    assert v.witness == "* 1"
    assert v.accepted_by == 1


def test_g1_g2_inequivalent():
    v = check(G1, G2)
    assert not v.equivalent
    assert any(a.mark for a in v.word)


def test_context_mismatch():
    with pytest.raises(TranslateError):
        check("x:exp |- 1", "y:exp |- 1")


@settings(max_examples=150, deadline=None, suppress_health_check=list(HealthCheck))
@given(closed(EXP, depth=3))
def test_closed_terms_match_interpreter(t):
    if Fragment.IA2plus not in classify_fragment((), t, 2):
        return
    cl = translate((), canonicalize((), t), EXP, 2)
    r = evaluate({}, t, 20_000, 2)
    got = words(cl.components[()], 4)
    if isinstance(r, Converged):
        assert got == {(sym("", r.value.value),)}
    else:
        assert got == set()
