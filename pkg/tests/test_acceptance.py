"""Acceptance suite: one test per criterion, each with its time limit."""

from __future__ import annotations

import random
import time

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from brute import erased_words, random_nfa, random_rules, shuffled_words, substituted_words
from gen import closed, new_to_ref
from plays import (
    corpus, curated_triples, intro_arena, intro_first, intro_second_erased, playcomp_pair,
    playcomp_shared_pair,
)
from iacbv import lang
from iacbv.interp import Converged, evaluate
from iacbv.oracle import distinguish
from iacbv.splays import compose, derived_checks, innocence_violation, mix, search_decorations, validate_splay
from iacbv.syntax import COM, EXP, New, parse_term, subterms

G1 = "f:com->com->com |- let g1 = f skip in let g2 = f skip in g1 skip"
G2 = "f:com->com->com |- let g1 = f skip in let g2 = f skip in g2 skip"

# (left, right, equivalent)
CURATED = [
    ("|- new x in 5", "|- 5", True),
    ("|- new x in (x := 1; !x)", "|- 1", True),
    ("|- new x in (x := 1; x := 2; !x)", "|- 2", True),
    ("|- skip; skip", "|- skip", True),
    ("|- 1", "|- 2", False),
    (G1, G2, False),
    ("c:exp |- while c do skip", "c:exp |- if c then (skip; while c do skip) else skip", True),
    ("c:exp |- while c do skip", "c:exp |- if c then (while 1 do skip) else skip", True),
    ("f:com->com |- f skip; f skip", "f:com->com |- f skip", False),
    ("x:var |- x := !x", "x:var |- skip", False),
    ("f:(com->com)->com |- new x in f (fn u:com => x := 1)", "f:(com->com)->com |- f (fn u:com => skip)", True),
]
ORACLE_MAX_SIZE = 15


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def test_criterion_1_composition_fixtures():
    with Clock() as c:
        s, t = playcomp_pair()
        u = compose(s, t)
        s2, t2 = playcomp_shared_pair()
        u2 = compose(s2, t2)
    assert [(m.move, m.store, m.justifier) for m in u] == [(("*",), (), None), (("", 2), (), 0)]
    assert [(m.move, m.store, m.justifier) for m in u2] == [(("*",), (), None), (("", 3), (), 0)]
    assert c.seconds < 1


def test_criterion_2_motivating_plays():
    with Clock() as c:
        assert validate_splay(intro_first(), 2) is None
        # every decoration either fails an S-play condition (pruned by the search) or is not innocent
        decos = list(search_decorations(intro_arena(), intro_second_erased(), pool=(0, 1), values=range(3), n=2))
        assert all(innocence_violation(d) is not None for d in decos)
    assert c.seconds < 10


def test_criterion_3_equivalence_suite():
    from iacbv.translate import decide_equiv

    assert len(CURATED) >= 10
    with Clock() as c:
        got = [decide_equiv(parse_term(a), parse_term(b), 2).equivalent for a, b, _ in CURATED]
    assert got == [e for _, _, e in CURATED]
    assert c.seconds < 60


def test_criterion_4_oracle_consistency():
    with Clock() as c:
        for a, b, equivalent in CURATED:
            ja, jb = parse_term(a), parse_term(b)
            w = distinguish(ja.ctx, ja.term, jb.term, max_size=ORACLE_MAX_SIZE, n=2)
            if equivalent:
                assert w is None, (a, b, str(w))
                continue
            assert w is not None, (a, b)
            fuel = 10 * max(w.fuel_used)
            replay = tuple(isinstance(evaluate({}, w.context.fill(m), fuel, 2), Converged) for m in (ja.term, jb.term))
            assert replay == w.converges and replay[0] != replay[1]
    assert c.seconds < 300


def test_criterion_5_automata_engine():
    rng = random.Random(0)
    with Clock() as c:
        equal = 0
        for k in range(1000):
            a = random_nfa(rng, 5, "abc")
            # half the partners are re-encodings of a, so both verdicts are exercised
            b = random_nfa(rng, 5, "abc") if k % 2 else rng.choice([lang.minimize, lang.determinize])(a)
            brute = lang.enumerate_up_to(a, 8) == lang.enumerate_up_to(b, 8)
            assert lang.equivalent(a, b) == brute
            equal += brute
        assert 400 < equal < 1000
        for _ in range(100):
            l, r = random_nfa(rng, 3), random_nfa(rng, 3)
            assert lang.enumerate_up_to(lang.shuffle(l, r), 6) == shuffled_words(l, r, 6)
            m = random_nfa(rng, 5)
            kill = set(rng.sample("abc", rng.randint(0, 2)))
            assert lang.enumerate_up_to(lang.erase(m, kill), 6) == erased_words(m, kill, 6)
            m = random_nfa(rng, 5, eps=False)
            rules = random_rules(rng)
            got = lang.enumerate_up_to(lang.subst(m, {x: lang.finite(ws) for x, ws in rules.items()}), 6)
            assert got == substituted_words(m, rules, 6)
    assert c.seconds < 60


def test_criterion_6_splay_theorems():
    with Clock() as c:
        plays, pairs = corpus()
        assert len(plays) >= 500
        assert all(len(p) <= 12 and validate_splay(p, 2) is None for p in plays)
        assert all(derived_checks(p) == [] for p in plays)
        assert all(validate_splay(compose(s, t), 2) is None for s, t in pairs)
        for a, b, t in curated_triples(pairs):
            assert compose(compose(a, b), t) == compose(a, compose(b, t))
            assert mix(compose(a, b), t) == mix(a, compose(b, t))
    assert c.seconds < 120


def test_criterion_7_new_vs_ref():
    seen = set()

    @settings(max_examples=600, derandomize=True, deadline=None, database=None,
              suppress_health_check=list(HealthCheck))
    @given(st.sampled_from([COM, EXP]).flatmap(closed))
    def check(t):
        if not any(isinstance(s, New) for s in subterms(t)):
            return
        seen.add(t)
        a = evaluate({}, t, 20_000, 2)
        b = evaluate({}, new_to_ref(t), 20_000, 2)
        assert isinstance(a, Converged) == isinstance(b, Converged)

    with Clock() as c:
        check()
    assert len(seen) >= 200
    assert c.seconds < 120
