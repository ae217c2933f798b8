"""Brute-force word-set semantics for NFAs, independent of the library's algorithms."""

from __future__ import annotations

import itertools
import random

from iacbv.lang import EPS, Nfa

SYMS = "abc"


def _closure(m: Nfa, states, skip=frozenset()) -> set:
    seen, todo = set(states), list(states)
    while todo:
        p = todo.pop()
        for a, qs in m.delta[p].items():
            if a is EPS or a in skip:
                for q in qs - seen:
                    seen.add(q)
                    todo.append(q)
    return seen


def accepts(m: Nfa, word, skip=frozenset()) -> bool:
    """Direct simulation; symbols in `skip` act as ε."""
    cur = _closure(m, [m.start], skip)
    for a in word:
        cur = _closure(m, {q for p in cur for q in m.delta[p].get(a, ())}, skip)
    return bool(cur & m.accept)


def words(syms, k: int):
    for n in range(k + 1):
        yield from itertools.product(syms, repeat=n)


def language(m: Nfa, k: int, syms=SYMS) -> set:
    return {w for w in words(syms, k) if accepts(m, w)}


def interleavings(u: tuple, v: tuple) -> set:
    if not u or not v:
        return {u + v}
    return {(u[0],) + w for w in interleavings(u[1:], v)} | {(v[0],) + w for w in interleavings(u, v[1:])}


def shuffled_words(l: Nfa, r: Nfa, k: int) -> set:
    return {w for u in language(l, k) for v in language(r, k - len(u)) for w in interleavings(u, v)}


def erased_words(m: Nfa, kill, k: int) -> set:
    keep = [a for a in SYMS if a not in kill]
    return {w for w in words(keep, k) if accepts(m, w, skip=frozenset(kill))}


def substituted_words(m: Nfa, rules: dict, k: int) -> set:
    """Words of m with each symbol a replaced by any word of the finite set rules[a]."""
    out = set()
    for w in language(m, k):
        choices = [sorted(rules[a]) if a in rules else [(a,)] for a in w]
        for parts in itertools.product(*choices):
            u = tuple(x for p in parts for x in p)
            if len(u) <= k:
                out.add(u)
    return out


def random_nfa(rng: random.Random, states: int = 5, syms: str = SYMS, eps: bool = True) -> Nfa:
    n = rng.randint(1, states)
    labels = list(syms) + ([EPS] if eps else [])
    delta = [dict() for _ in range(n)]
    for _ in range(rng.randint(0, 3 * n)):
        p, a, q = rng.randrange(n), rng.choice(labels), rng.randrange(n)
        delta[p].setdefault(a, set()).add(q)
    accept = frozenset(q for q in range(n) if rng.random() < 0.4)
    return Nfa(n, 0, accept, tuple({a: frozenset(qs) for a, qs in row.items()} for row in delta), frozenset(syms))


def random_rules(rng: random.Random, syms: str = "ab", out: str = "xyz") -> dict:
    rules = {}
    for a in rng.sample(syms, rng.randint(0, len(syms))):
        rules[a] = {tuple(rng.choice(out) for _ in range(rng.randint(1, 2))) for _ in range(rng.randint(1, 3))}
    return rules
