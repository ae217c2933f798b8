"""Play builders shared by the S-play tests.

The client side lives in 1 → (var ⇒ Z): it calls its argument variable
with read/write operations. The cell side lives in (var ⇒ Z) → Z: each
call of f allocates (or reuses) a store name holding the variable.
"""

from __future__ import annotations

import itertools
import random

from iacbv.games import arrow_arena, flat_arena, prearena, prearena_of_judgment, unit_arena, var_arena
from iacbv.splays import SMove, SPlay
from iacbv.syntax import parse_type

N = 3


def middle(n: int = N):
    return arrow_arena(var_arena(n), flat_arena(n))


def client_arena(n: int = N):
    return prearena(unit_arena(), middle(n))


def cell_arena(n: int = N):
    return prearena(middle(n), flat_arena(n))


def client_play(calls, n: int = N) -> SPlay:
    """calls: list of (ops, result); ops are ("read", v) or ("write", w)."""
    ms = [SMove(("*",), (), None), SMove(("", "*"), (), 0)]
    for ops, result in calls:
        c = len(ms)
        ms.append(SMove(("", "arg", "*"), (), 1))
        for op, v in ops:
            q = len(ms)
            if op == "read":
                ms.append(SMove(("", "arg", "read"), (), c))
                ms.append(SMove(("", "arg", v), (), q))
            else:
                ms.append(SMove(("", "arg", f"write({v})"), (), c))
                ms.append(SMove(("", "arg", "ok"), (), q))
        ms.append(SMove(("", "res", result), (), c))
    return SPlay(client_arena(n), tuple(ms))


def cell_play(calls, final=None, shared=False, n: int = N, names=("a", "b", "c", "d")) -> SPlay:
    """The cell side answering `calls`; reads return the current value.

    Each call gets a fresh name starting at 0 unless `shared`, in which case
    one name lives across calls. `final` is the last answer (omitted if None).
    """
    ms = [SMove(("*",), (), None)]
    value = 0
    for k, (ops, result) in enumerate(calls):
        name = names[0] if shared else names[k]
        if not shared:
            value = 0
        c = len(ms)
        ms.append(SMove(("arg", "*"), ((name, value),), 0))
        for op, v in ops:
            q = len(ms)
            if op == "read":
                ms.append(SMove(("arg", "read"), ((name, value),), c))
                ms.append(SMove(("arg", value), ((name, value),), q))
            else:
                ms.append(SMove(("arg", f"write({v})"), ((name, value),), c))
                value = v
                ms.append(SMove(("arg", "ok"), ((name, value),), q))
        ms.append(SMove(("res", result), ((name, value),), c))
    if final is not None:
        ms.append(SMove(("", final), (), 0))
    return SPlay(cell_arena(n), tuple(ms))


INC = [("read", 0), ("write", 1), ("read", 1)]


def playcomp_pair():
    """σ = λx. x:=!x+1; !x against two separately allocated cells."""
    s = client_play([(INC, 1), (INC, 1)])
    t = cell_play([(INC, 1), (INC, 1)], final=2)
    return s, t


def playcomp_shared_pair():
    """The same client against one cell shared by both calls."""
    s = client_play([(INC, 1), ([("read", 1), ("write", 2), ("read", 2)], 2)])
    t = cell_play([(INC, 1), ([("read", 1), ("write", 2), ("read", 2)], 2)], final=3, shared=True)
    return s, t


# f:(com→exp)→(com→exp) ⊢ M : com→exp


def intro_arena(n: int = 2):
    return prearena_of_judgment([("f", parse_type("(com->exp)->(com->exp)"))], parse_type("com->exp"), n)


def intro_first(n: int = 2) -> SPlay:
    ar = intro_arena(n)
    a = "a"
    rows = [
        (ar.initial and sorted(ar.initial, key=repr)[0], (), None),
        ("f.arg.*", ((a, 0),), 0),
        ("f.arg.arg.*", ((a, 0),), 1),
        ("f.arg.res.1", ((a, 1),), 2),
        ("f.arg.arg.*", ((a, 1),), 1),
        ("f.arg.res.2", ((a, 2),), 4),
        ("f.res.*", ((a, 2),), 1),
        ("*", (), 0),
        ("arg.*", (), 7),
        ("res.0", (), 8),
        ("arg.*", (), 7),
        ("res.0", (), 10),
    ]
    return _rows(ar, rows)


def intro_second_erased(n: int = 2) -> list:
    """(move, justifier) pairs of the play no block-structured term produces."""
    ar = intro_arena(n)
    init = sorted(ar.initial, key=repr)[0]
    names = [
        (init, None), ("f.arg.*", 0), ("f.arg.arg.*", 1), ("f.arg.res.0", 2),
        ("f.arg.arg.*", 1), ("f.arg.res.1", 4), ("f.res.*", 1), ("*", 0),
        ("arg.*", 7), ("f.res.arg.*", 6),
    ]
    return [(m if isinstance(m, tuple) else ar.move(m), j) for m, j in names]


def _rows(ar, rows) -> SPlay:
    ms = []
    for mv, st, j in rows:
        if isinstance(mv, str):
            mv = ar.move(mv)
        ms.append(SMove(mv, tuple(st), j))
    return SPlay(ar, tuple(ms))


# ---------------------------------------------------------------- corpus

OPS = [("read",)] + [("write", w) for w in range(3)]


def _run_ops(ops, value):
    out = []
    for op in ops:
        if op[0] == "read":
            out.append(("read", value))
        else:
            value = op[1]
            out.append(("write", value))
    return out, value


def call_lists(n: int = 2, max_calls: int = 2, max_ops: int = 2, shared: bool = False):
    """Every call list (ops with consistent read values, result) within the bounds."""
    seqs = [s for k in range(max_ops + 1) for s in itertools.product(OPS, repeat=k)]
    for k in range(1, max_calls + 1):
        for combo in itertools.product(seqs, repeat=k):
            value, calls = 0, []
            for ops in combo:
                if not shared:
                    value = 0
                done, value = _run_ops(ops, value)
                calls.append(done)
            for results in itertools.product(range(n + 1), repeat=k):
                yield [(ops, r) for ops, r in zip(calls, results)]


def corpus(n: int = 2, max_len: int = 12, per_mode: int = 60, seed: int = 0):
    """Valid S-plays from cell/client interactions: (plays, compatible pairs).

    A seeded sample of `per_mode` call lists per allocation mode (fresh or
    shared cell); every prefix of every play is included.
    """
    rng = random.Random(seed)
    plays, pairs = {}, []
    for shared in (False, True):
        lists = list(call_lists(n, shared=shared))
        for calls in rng.sample(lists, per_mode):
            s = client_play(calls, n)
            for final in [None] + list(range(n + 1)):
                t = cell_play(calls, final=final, shared=shared, n=n)
                for p in (s, t):
                    if len(p) <= max_len:
                        for k in range(1, len(p) + 1):
                            plays.setdefault(p.prefix(k).moves, p.prefix(k))
                if len(s) <= max_len and len(t) <= max_len and final is not None:
                    pairs.append((s, t))
    return list(plays.values()), pairs


def _unit_copycat():
    ar = prearena(unit_arena(), unit_arena())
    return SPlay(ar, (SMove(("*",), (), None), SMove(("", "*"), (), 0)))


def _answer(j, k, n=3):
    return SPlay(prearena(flat_arena(n), flat_arena(n)), (SMove((j,), (), None), SMove(("", k), (), 0)))


def curated_triples(pairs) -> list:
    """Composable (a, b, c): the composition fixtures extended by a Z->Z answer, and a unit
    copycat in front of the fixtures and of every corpus pair."""
    triples = []
    for s, t in [playcomp_pair(), playcomp_shared_pair()]:
        j = t[-1].move[-1]
        triples += [(s, t, _answer(j, k)) for k in range(4)]
        triples.append((_unit_copycat(), s, t))
    for s, t in pairs:
        triples.append((_unit_copycat(), s, t))
    return triples
