from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from brute import SYMS, accepts, erased_words, language, shuffled_words, substituted_words, words
from iacbv import lang
from iacbv.lang import EPS, Nfa


@st.composite
def nfas(draw, states: int = 5, syms: str = SYMS, eps: bool = True):
    n = draw(st.integers(1, states))
    labels = list(syms) + ([EPS] if eps else [])
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.sampled_from(labels), st.integers(0, n - 1)),
                          max_size=3 * n))
    accept = draw(st.frozensets(st.integers(0, n - 1)))
    delta = [dict() for _ in range(n)]
    for p, a, q in edges:
        delta[p].setdefault(a, set()).add(q)
    delta = tuple({a: frozenset(qs) for a, qs in row.items()} for row in delta)
    return Nfa(n, 0, accept, delta, frozenset(syms))


# ---------------------------------------------------------------- examples


def test_concat_star_member():
    m = lang.concat(lang.lit("a"), lang.star(lang.lit("b")))
    assert lang.member(m, "abb")
    assert not lang.member(m, "ba")


def test_intersect_stars_is_epsilon():
    m = lang.intersect(lang.star(lang.lit("a")), lang.star(lang.lit("b")))
    assert lang.enumerate_up_to(m, 5) == {()}


def test_star_of_empty():
    assert lang.equivalent(lang.star(lang.empty()), lang.epsilon())


def test_shuffle_examples():
    assert lang.enumerate_up_to(lang.shuffle(lang.lit("ab"), lang.lit("c")), 3) == {
        tuple("cab"), tuple("acb"), tuple("abc")}
    m = lang.star(lang.lit("ab"))
    assert lang.equivalent(lang.shuffle(m, lang.epsilon()), m)
    assert len(lang.enumerate_up_to(lang.shuffle(lang.lit("ab"), lang.lit("cd")), 4)) == 6


def test_erase_example():
    m = lang.erase(lang.lit(["read_x", "0_x", "0"]), {"read_x", "0_x"})
    assert lang.enumerate_up_to(m, 3) == {("0",)}


def test_rename_identity():
    m = lang.star(lang.lit("ab"))
    assert lang.equivalent(lang.rename(m, lambda a: a), m)


def test_subst_single_symbol():
    c = lang.star(lang.lit("c"))
    m = lang.subst(lang.lit("q"), {"q": lang.concat(lang.lit("r"), c)})
    assert lang.equivalent(m, lang.concat(lang.lit("r"), c))


def test_equivalent_examples():
    a, b = lang.lit("a"), lang.lit("b")
    lhs = lang.concat(lang.star(lang.concat(a, b)), a)
    rhs = lang.concat(a, lang.star(lang.concat(b, a)))
    assert lang.equivalent(lhs, rhs)
    assert not lang.equivalent(lang.empty(), lang.epsilon())


def test_difference_witness_is_shortest():
    lhs = lang.star(lang.lit("a"))
    rhs = lang.union(lang.epsilon(), lang.lit("a"), lang.lit("aa"))
    assert lang.difference_witness(lhs, rhs) == tuple("aaa")


def test_complement_within_alphabet():
    m = lang.complement(lang.star(lang.lit("a")), "ab")
    assert lang.member(m, "ab")
    assert not lang.member(m, "aa")


def test_text_roundtrip():
    m = lang.concat(lang.lit("ab"), lang.star(lang.lit("c")))
    assert lang.equivalent(lang.from_text(lang.to_text(m)), m)
    assert lang.to_dot(m).startswith("digraph")


def test_kernel_backend_known():
    assert lang.BACKEND in ("cython", "python")


# ---------------------------------------------------------------- properties


@settings(max_examples=200, deadline=None)
@given(nfas())
def test_enumerate_matches_simulation(m):
    assert lang.enumerate_up_to(m, 5) == language(m, 5)


@settings(max_examples=200, deadline=None)
@given(nfas(), st.lists(st.sampled_from(SYMS), max_size=6))
def test_determinize_and_minimize_preserve_membership(m, w):
    assert lang.member(lang.determinize(m), w) == lang.member(m, w) == accepts(m, w)
    assert lang.member(lang.minimize(m), w) == accepts(m, w)


@settings(max_examples=100, deadline=None)
@given(nfas(3), nfas(3), nfas(3))
def test_equivalence_is_an_equivalence(a, b, c):
    assert lang.equivalent(a, a)
    assert lang.equivalent(a, b) == lang.equivalent(b, a)
    if lang.equivalent(a, b) and lang.equivalent(b, c):
        assert lang.equivalent(a, c)


@settings(max_examples=100, deadline=None)
@given(nfas(3), nfas(3))
def test_shuffle_brute_force(l, r):
    got = lang.enumerate_up_to(lang.shuffle(l, r), 6)
    assert got == shuffled_words(l, r, 6)


@settings(max_examples=50, deadline=None)
@given(nfas(3), nfas(3), nfas(2))
def test_shuffle_commutative_associative(a, b, c):
    assert lang.equivalent(lang.shuffle(a, b), lang.shuffle(b, a))
    assert lang.equivalent(lang.shuffle(lang.shuffle(a, b), c), lang.shuffle(a, lang.shuffle(b, c)))


@settings(max_examples=100, deadline=None)
@given(nfas(), st.sets(st.sampled_from(SYMS), max_size=2))
def test_erase_brute_force(m, kill):
    got = lang.enumerate_up_to(lang.erase(m, kill), 6)
    assert got == erased_words(m, kill, 6)


_rule_words = st.sets(st.text("xyz", min_size=1, max_size=2).map(tuple), min_size=1, max_size=3)


@settings(max_examples=100, deadline=None)
@given(nfas(eps=False), st.dictionaries(st.sampled_from("ab"), _rule_words, max_size=2))
def test_subst_brute_force(m, rules):
    got = lang.enumerate_up_to(lang.subst(m, {a: lang.finite(ws) for a, ws in rules.items()}), 6)
    assert got == substituted_words(m, rules, 6)


@settings(max_examples=100, deadline=None)
@given(nfas())
def test_subst_identity(m):
    assert lang.equivalent(lang.subst(m, {a: lang.lit([a]) for a in SYMS}), m)


@settings(max_examples=100, deadline=None)
@given(nfas(), nfas())
def test_intersect_union_complement(l, r):
    for w in words(SYMS, 4):
        a, b = accepts(l, w), accepts(r, w)
        assert lang.member(lang.intersect(l, r), w) == (a and b)
        assert lang.member(lang.union(l, r), w) == (a or b)
        assert lang.member(lang.complement(l, SYMS), w) == (not a)
