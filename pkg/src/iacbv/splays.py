"""Stores, S-plays and their composition.

A store is a tuple of (name, value) pairs with distinct names, kept in
allocation order. An S-play is a justified sequence of moves of a prearena,
each carrying a store; `validate_splay` checks the block-allocation
discipline and `compose` computes the interaction of two S-plays.

Names are any hashable values (ints by default); justifiers are absolute
indices into the play, None for the initial move.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

from .games import Arena, Move, prearena, prearena_of_judgment, render_move

Store = tuple


class StoreError(ValueError):
    """Raised when Σ+T is undefined (overlapping domains)."""


class IncompatibleError(ValueError):
    """Raised when two S-plays cannot be composed."""


# ---------------------------------------------------------------- stores


def dom(st: Store) -> tuple:
    return tuple(a for a, _ in st)


def names(st: Store) -> frozenset:
    return frozenset(a for a, _ in st)


def lookup(st: Store, a):
    for b, v in st:
        if b == a:
            return v
    raise KeyError(a)


def restrict(s: Store, t: Store) -> Store:
    """Σ∖T: Σ restricted to the names not in T."""
    drop = names(t)
    return tuple((a, v) for a, v in s if a not in drop)


def update(s: Store, t: Store) -> Store:
    """Σ[T]: overwrite values of Σ with those of T, keeping Σ's domain."""
    vals = dict(t)
    return tuple((a, vals.get(a, v)) for a, v in s)


def update_from_seq(s: Store, seq: Iterable) -> Store:
    """Σ[s]: each name takes its value from the last move of `seq` holding it.

    `seq` may contain S-moves or bare stores.
    """
    vals: dict = {}
    for m in seq:
        st = m.store if isinstance(m, SMove) else m
        vals.update(st)
    return update(s, tuple(vals.items()))


def append(s: Store, t: Store) -> Store:
    """Σ+T, defined only for disjoint domains."""
    clash = names(s) & names(t)
    if clash:
        raise StoreError(f"append on overlapping names {sorted(clash, key=repr)}")
    return tuple(s) + tuple(t)


def _is_subseq(x: tuple, y: tuple) -> bool:
    it = iter(y)
    return all(any(a == b for b in it) for a in x)


def rel(s: Store, t: Store, kind: str = "subseq") -> bool:
    """Σ ⊑ T on domains; kind is "subseq", "prefix" or "suffix"."""
    x, y = dom(s), dom(t)
    if kind == "subseq":
        return _is_subseq(x, y)
    if kind == "prefix":
        return y[: len(x)] == x
    if kind == "suffix":
        return len(x) <= len(y) and y[len(y) - len(x):] == x
    raise ValueError(f"unknown relation {kind!r}")


def nice(s0: Store, s1: Store, s2: Store) -> Store:
    """Update Σ0 from Σ2, drop what Σ2 dropped from Σ1, add what Σ2 introduced."""
    return append(restrict(update(s0, s2), restrict(s1, s2)), restrict(s2, s1))


def format_store(st: Store) -> str:
    return "{" + ",".join(f"{_name_str(a)}={v}" for a, v in st) + "}"


def _name_str(a) -> str:
    return f"a{a}" if isinstance(a, int) else str(a)


# ---------------------------------------------------------------- S-plays


@dataclass(frozen=True)
class SMove:
    move: Move
    store: Store = ()
    justifier: Optional[int] = None


@dataclass(frozen=True)
class SPlay:
    arena: Arena = field(compare=False, repr=False)
    moves: tuple = ()

    def __len__(self) -> int:
        return len(self.moves)

    def __getitem__(self, k):
        return self.moves[k]

    def __iter__(self):
        return iter(self.moves)

    def prefix(self, k: int) -> "SPlay":
        return SPlay(self.arena, self.moves[:k])

    def erase(self) -> tuple:
        return tuple((m.move, m.justifier) for m in self.moves)

    def names(self) -> frozenset:
        return frozenset(a for m in self.moves for a, _ in m.store)

    def __str__(self) -> str:
        return format_trace(self)


def splay(arena: Arena, entries: Iterable) -> SPlay:
    """Build an S-play from (move-name-or-path, store, justifier) triples.

    A justifier of None on a non-initial move means "the previous move".
    """
    out = []
    for k, e in enumerate(entries):
        mv, st, j = (tuple(e) + ((), None)[len(e) - 1:])[:3]
        if isinstance(mv, str):
            mv = arena.move(mv)
        if j is None and mv not in arena.initial:
            j = k - 1
        out.append(SMove(mv, tuple(st), j))
    return SPlay(arena, tuple(out))


def nu(moves: Iterable) -> frozenset:
    """All names occurring in a sequence of S-moves."""
    return frozenset(a for m in moves for a, _ in m.store)


# ---------------------------------------------------------------- views


def _pv_indices(ar: Arena, ms: tuple, k: int) -> list:
    out = []
    i = k - 1
    while i >= 0:
        m = ms[i]
        out.append(i)
        if ar.is_p(m.move):
            i -= 1
            continue
        if m.justifier is None:
            break
        out.append(m.justifier)
        i = m.justifier - 1
    out.reverse()
    return out


def _ov_indices(ar: Arena, ms: tuple, k: int) -> list:
    out = []
    i = k - 1
    while i >= 0:
        m = ms[i]
        out.append(i)
        if ar.is_o(m.move) or m.justifier is None:
            i -= 1
            continue
        out.append(m.justifier)
        i = m.justifier - 1
    out.reverse()
    return out


def _reanchor(s: SPlay, idx: list) -> SPlay:
    pos = {i: k for k, i in enumerate(idx)}
    return SPlay(s.arena, tuple(
        SMove(s.moves[i].move, s.moves[i].store, pos.get(s.moves[i].justifier))
        for i in idx
    ))


def pview(s: SPlay) -> SPlay:
    return _reanchor(s, _pv_indices(s.arena, s.moves, len(s.moves)))


def oview(s: SPlay) -> SPlay:
    return _reanchor(s, _ov_indices(s.arena, s.moves, len(s.moves)))


# ---------------------------------------------------------------- names


def canonical_names(s: SPlay) -> SPlay:
    """Rename names to 0, 1, ... in order of first introduction."""
    ren: dict = {}
    for m in s.moves:
        for a, _ in m.store:
            ren.setdefault(a, len(ren))
    return SPlay(s.arena, tuple(
        SMove(m.move, tuple((ren[a], v) for a, v in m.store), m.justifier) for m in s.moves
    ))


def nominal_eq(s: SPlay, t: SPlay) -> bool:
    """s ~ t: equal up to a permutation of names."""
    return canonical_names(s).moves == canonical_names(t).moves


def rename(s: SPlay, perm: dict) -> SPlay:
    return SPlay(s.arena, tuple(
        SMove(m.move, tuple((perm.get(a, a), v) for a, v in m.store), m.justifier)
        for m in s.moves
    ))


# ---------------------------------------------------------------- validity


@dataclass(frozen=True)
class Violation:
    condition: str
    position: int
    message: str

    def __str__(self) -> str:
        return f"{self.condition} at move {self.position}: {self.message}"


def _open_questions(ar: Arena, ms: tuple, k: int) -> list:
    answered = {m.justifier for m in ms[:k] if ar.is_answer(m.move)}
    return [i for i in range(k) if ar.is_question(ms[i].move) and i not in answered]


def _check_position(s: SPlay, k: int, n: Optional[int]) -> Optional[Violation]:
    ar, ms = s.arena, s.moves
    m = ms[k]
    mv, st, j = m.move, m.store, m.justifier

    def bad(cond, msg):
        return Violation(cond, k, msg)

    # erasure is a play
    if mv not in ar:
        return bad("Justified", f"{mv!r} is not a move of the arena")
    if len(set(dom(st))) != len(st):
        return bad("Store", "repeated name in store")
    if k == 0:
        if mv not in ar.initial or j is not None:
            return bad("Justified", "a play starts with an unjustified initial move")
    else:
        if j is None or not 0 <= j < k:
            return bad("Justified", "missing or forward justifier")
        if not ar.enables(ms[j].move, mv):
            return bad("Justified", f"{render_move(ms[j].move)} does not enable {render_move(mv)}")
    if ar.is_o(mv) != (k % 2 == 0):
        return bad("Alternation", "O and P moves must alternate, starting with O")
    if ar.is_answer(mv):
        opens = _open_questions(ar, ms, k)
        if not opens or opens[-1] != j:
            return bad("Well-bracketing", "an answer must point to the pending question")
    if k > 0:
        view = _pv_indices(ar, ms, k) if ar.is_p(mv) else _ov_indices(ar, ms, k)
        if j not in view:
            return bad("Visibility", "justifier not in the current view")
    if n is not None and any(not 0 <= v <= n for _, v in st):
        return bad("Range", f"store value outside 0..{n}")

    # store conditions
    if k == 0:
        if st:
            return bad("Init", "the first store must be empty")
        return None
    js = ms[j].store
    if ar.is_p(mv):
        if not rel(js, st, "prefix"):
            return bad("Just-P", "justifier store is not a prefix of the P-move store")
        if ar.is_answer(mv) and not rel(st, js, "prefix"):
            return bad("Just-P", "a P-answer must keep its justifier's names exactly")
        if ar.is_question(mv):
            prev = ms[k - 1].store
            dropped = restrict(prev, st)
            if not rel(dropped, prev, "suffix"):
                return bad("Prev-PQ", "dropped names must form a suffix")
            if not rel(restrict(prev, dropped), st, "prefix"):
                return bad("Prev-PQ", "kept names must form a prefix")
            seen = nu(ms[:k])
            fresh = names(restrict(st, prev))
            if fresh & seen:
                return bad("Prev-PQ", "introduced name is not fresh")
            if dropped:
                gone = names(dropped)
                for q in _open_questions(ar, ms, k):
                    if names(ms[q].store) & gone:
                        return bad("Prev-PQ", "dropped name is not closed")
    else:
        if not (rel(js, st, "prefix") and rel(st, js, "prefix")):
            return bad("Just-O", "an O-move must carry its justifier's names")
        for a, v in st:
            for i in range(k - 1, -1, -1):
                if a in names(ms[i].store):
                    if ar.is_p(ms[i].move) and lookup(ms[i].store, a) != v:
                        return bad("Val-O", f"O changed the value of {_name_str(a)}")
                    break
    return None


def validate_splay(s: SPlay, n: Optional[int] = None) -> Optional[Violation]:
    """None if s is an S-play, else the first violation found.

    With `n` set, store values must lie in 0..n (finitary mode).
    """
    for k in range(len(s.moves)):
        v = _check_position(s, k, n)
        if v is not None:
            return v
    return None


def is_splay(s: SPlay, n: Optional[int] = None) -> bool:
    return validate_splay(s, n) is None


def innocence_violation(s: SPlay) -> Optional[tuple]:
    """A pair (i, j) of P-moves with equal P-views before them but
    inequivalent P-views after, or None."""
    ps = [k for k, m in enumerate(s.moves) if s.arena.is_p(m.move)]
    for a, i in enumerate(ps):
        for j in ps[a + 1:]:
            v = _innocence_pair(s, i, j)
            if v:
                return v
    return None


def _innocence_pair(s: SPlay, i: int, j: int) -> Optional[tuple]:
    ar, ms = s.arena, s.moves
    before_i = _reanchor(s, _pv_indices(ar, ms, i))
    before_j = _reanchor(s, _pv_indices(ar, ms, j))
    if not nominal_eq(before_i, before_j):
        return None
    after_i = _reanchor(s, _pv_indices(ar, ms, i + 1))
    after_j = _reanchor(s, _pv_indices(ar, ms, j + 1))
    if nominal_eq(after_i, after_j):
        return None
    return (i, j)


def derived_checks(s: SPlay) -> list:
    """Prev-PA, Block form (on the P-view of every prefix) and Close.

    Returns the list of failures; empty when all hold.
    """
    ar, ms = s.arena, s.moves
    out = []
    for k in range(1, len(ms)):
        prev, st = ms[k - 1].store, ms[k].store
        mv = ms[k].move
        if ar.is_p(mv) and ar.is_answer(mv):
            dropped = restrict(prev, st)
            ok = rel(dropped, prev, "suffix") and rel(restrict(prev, dropped), st, "prefix")
            ok = ok and names(st) <= names(prev)
            gone = names(dropped)
            ok = ok and not any(names(ms[q].store) & gone for q in _open_questions(ar, ms, k))
            if not ok:
                out.append(Violation("Prev-PA", k, "answer store discipline broken"))
        if ar.is_o(ms[k - 1].move) and ar.is_p(mv):
            gone = names(prev) - names(st)
            if gone & nu(ms[k + 1:]):
                out.append(Violation("Close", k, "closed name reused later"))
    first: dict = {}
    for k, m in enumerate(ms):
        for a, _ in m.store:
            first.setdefault(a, k)
    for k in range(1, len(ms) + 1):
        view = _pv_indices(ar, ms, k)
        for a in nu(ms[:k]):
            hits = [p for p, i in enumerate(view) if a in names(ms[i].store)]
            if not hits:
                continue
            if hits != list(range(hits[0], hits[-1] + 1)) or view[hits[0]] != first[a]:
                out.append(Violation("Block form", k - 1, f"name {_name_str(a)} not in block form"))
    return out


# ---------------------------------------------------------------- spines


def is_complete(s: SPlay) -> bool:
    """Every question has been answered."""
    return not _open_questions(s.arena, s.moves, len(s.moves))


def is_spinal(s: SPlay, spine: list) -> bool:
    """spine = [q0, a0, q1, a1, ...]; each q_i (i>0) must directly follow a_{i-1}."""
    qs = spine[0::2]
    as_ = spine[1::2]
    for k, m in enumerate(s.moves):
        for i in range(1, len(qs)):
            if m.move == qs[i]:
                if k == 0 or i - 1 >= len(as_) or s.moves[k - 1].move != as_[i - 1]:
                    return False
    return True


# ---------------------------------------------------------------- composition


@dataclass(frozen=True)
class IMove:
    """A move of an interaction sequence: component is "A", "B" or "C"."""

    component: str
    move: Move
    store: Store
    justifier: Optional[int]
    s_index: Optional[int] = None
    t_index: Optional[int] = None


@dataclass(frozen=True)
class Interaction:
    a: Arena = field(repr=False)
    b: Arena = field(repr=False)
    c: Arena = field(repr=False)
    moves: tuple = ()

    def __len__(self) -> int:
        return len(self.moves)


def _restrict_b(s: SPlay, in_b: Callable) -> tuple:
    pos = {}
    out = []
    for k, m in enumerate(s.moves):
        if in_b(m.move):
            pos[k] = len(out)
            out.append(((m.move[1:] if m.move[0] == "" else m.move), pos.get(m.justifier)))
    return tuple(out)


def _sides(s: SPlay, t: SPlay):
    if s.arena.left is None or s.arena.right is None or t.arena.left is None:
        raise IncompatibleError("both plays must live in prearenas built by games.prearena")
    if s.arena.right != t.arena.left:
        raise IncompatibleError("middle arenas differ")
    return s.arena.left, s.arena.right, t.arena.right


def _s_in_b(m: Move) -> bool:
    return m[0] == ""


def _t_in_b(m: Move) -> bool:
    return m[0] != ""


def compatible(s: SPlay, t: SPlay) -> Optional[str]:
    """None if s ≍ t, else the reason they are not."""
    _sides(s, t)
    sb, tb = _restrict_b(s, _s_in_b), _restrict_b(t, _t_in_b)
    if sb != tb:
        k = next((i for i, (x, y) in enumerate(zip(sb, tb)) if x != y), min(len(sb), len(tb)))
        return f"B-restrictions first disagree at B-move {k}"
    clash = s.names() & t.names()
    if clash:
        return f"shared names {sorted(clash, key=repr)}"
    return None


def interact(s: SPlay, t: SPlay) -> Interaction:
    """The interaction sequence s∥t with stores given by the mix."""
    a, b, c = _sides(s, t)
    why = compatible(s, t)
    if why:
        raise IncompatibleError(why)
    sm, tm = s.moves, t.moves
    sar, tar = s.arena, t.arena
    i = j = 0
    smap: dict = {}
    tmap: dict = {}
    u: list = []

    def prev_store():
        return u[-1].store if u else ()

    def ext_o(jst):
        tilde = u[jst].store if jst is not None else ()
        return update_from_seq(tilde, [x.store for x in u])

    while i < len(sm) or j < len(tm):
        s_next = sm[i] if i < len(sm) else None
        t_next = tm[j] if j < len(tm) else None
        s_a = s_next is not None and not _s_in_b(s_next.move)
        t_c = t_next is not None and not _t_in_b(t_next.move)
        if s_a and t_c:
            raise IncompatibleError(f"both plays move outside B at interaction step {len(u)}")
        if s_a:
            m = s_next
            jj = smap.get(m.justifier) if m.justifier is not None else None
            if sar.is_p(m.move):
                st = nice(prev_store(), sm[i - 1].store, m.store)
            else:
                st = ext_o(jj)
            smap[i] = len(u)
            u.append(IMove("A", m.move, st, jj, s_index=i))
            i += 1
        elif t_c:
            m = t_next
            jj = tmap.get(m.justifier) if m.justifier is not None else None
            if tar.is_p(m.move):
                st = nice(prev_store(), tm[j - 1].store, m.store)
            else:
                st = ext_o(jj)
            tmap[j] = len(u)
            u.append(IMove("C", m.move[1:], st, jj, t_index=j))
            j += 1
        else:
            if s_next is None or t_next is None:
                raise IncompatibleError(f"one play ended early at interaction step {len(u)}")
            bm = s_next.move[1:]
            if bm != t_next.move:
                raise IncompatibleError(f"B-moves disagree at interaction step {len(u)}")
            jj = smap.get(s_next.justifier) if s_next.justifier is not None else None
            if sar.is_p(s_next.move) == tar.is_p(t_next.move):
                raise IncompatibleError("a shared B-move must be P on exactly one side")
            if sar.is_p(s_next.move):
                st = nice(prev_store(), sm[i - 1].store, s_next.store)
            else:
                st = nice(prev_store(), tm[j - 1].store, t_next.store)
            smap[i] = tmap[j] = len(u)
            u.append(IMove("B", bm, st, jj, s_index=i, t_index=j))
            i += 1
            j += 1
    return Interaction(a, b, c, tuple(u))


def restrict_ac(it: Interaction) -> SPlay:
    """(s∥t)↾AC with justifiers followed through B."""
    ar = prearena(it.a, it.c)
    pos: dict = {}
    out = []
    for k, m in enumerate(it.moves):
        if m.component == "B":
            continue
        jj = m.justifier
        while jj is not None and it.moves[jj].component == "B":
            jj = it.moves[jj].justifier
        mv = m.move if m.component == "A" else ("",) + m.move
        pos[k] = len(out)
        out.append(SMove(mv, m.store, pos.get(jj) if jj is not None else None))
    return SPlay(ar, tuple(out))


def compose(s: SPlay, t: SPlay) -> SPlay:
    """s;t over the prearena A→C."""
    return restrict_ac(interact(s, t))


def mix(s: SPlay, t: SPlay) -> Store:
    """s∣t: the store of the last move of s∥t."""
    u = interact(s, t).moves
    return u[-1].store if u else ()


# ---------------------------------------------------------------- decorations


def all_stores(pool: Iterable, values: Iterable) -> list:
    """Every store over a subset of `pool` in every order, with values from `values`."""
    pool, values = list(pool), list(values)
    out = []
    for r in range(len(pool) + 1):
        for perm in itertools.permutations(pool, r):
            for vs in itertools.product(values, repeat=r):
                out.append(tuple(zip(perm, vs)))
    return out


def search_decorations(
    arena: Arena,
    erased: Iterable,
    pool: Iterable = (0, 1),
    values: Iterable = range(3),
    n: Optional[int] = None,
    keep: Optional[Callable] = None,
) -> Iterator[SPlay]:
    """Yield every store decoration of `erased` that is an S-play.

    `erased` holds (move, justifier) pairs. Prefixes failing validation are
    pruned; `keep(prefix)` may prune further (it is called on each new
    prefix). Decorations are exhaustive, not quotiented by renaming.
    """
    erased = list(erased)
    stores = all_stores(pool, values)

    def go(prefix: tuple):
        k = len(prefix)
        if k == len(erased):
            yield SPlay(arena, prefix)
            return
        mv, j = erased[k]
        for st in stores:
            cand = SPlay(arena, prefix + (SMove(mv, st, j),))
            if _check_position(cand, k, n) is not None:
                continue
            if keep is not None and not keep(cand):
                continue
            yield from go(cand.moves)

    yield from go(())


def innocent_so_far(s: SPlay) -> bool:
    """Incremental innocence check on the last move, for search pruning."""
    k = len(s.moves) - 1
    if k < 0 or not s.arena.is_p(s.moves[k].move):
        return True
    for i in range(k):
        if s.arena.is_p(s.moves[i].move) and _innocence_pair(s, i, k):
            return False
    return True


# ---------------------------------------------------------------- traces

_LINE = re.compile(r"^\s*(\d+)\s+(\S+)\s+(j=\d+|init)\s*(\{[^}]*\})?\s*$")


def format_trace(s: SPlay) -> str:
    lines = []
    for k, m in enumerate(s.moves):
        j = "init" if m.justifier is None else f"j={m.justifier}"
        lines.append(f"{k} {s.arena.name_of(m.move)} {j} {format_store(m.store)}")
    return "\n".join(lines)


def _parse_name(tok: str):
    if re.fullmatch(r"a\d+", tok):
        return int(tok[1:])
    return tok


def parse_trace(text: str, arena: Optional[Arena] = None, n: int = 2) -> SPlay:
    """Read the line format `<idx> <move> [j=<idx>|init] {a1=v1,...}`.

    Blank lines and `#` comments are skipped, except a header
    `# prearena: x:T, ... |- T` which fixes the arena when none is given.
    """
    moves = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            hm = re.match(r"#\s*prearena:\s*(.*)$", line)
            if hm and arena is None:
                arena = parse_prearena(hm.group(1), n)
            continue
        mt = _LINE.match(line)
        if not mt:
            raise ValueError(f"bad trace line: {raw!r}")
        if arena is None:
            raise ValueError("no arena: pass one or add a '# prearena:' header")
        idx, name, jtok, stok = mt.groups()
        if int(idx) != len(moves):
            raise ValueError(f"trace index {idx} out of order")
        j = None if jtok == "init" else int(jtok[2:])
        st = []
        body = (stok or "{}")[1:-1].strip()
        if body:
            for pair in body.split(","):
                a, v = pair.split("=")
                st.append((_parse_name(a.strip()), int(v)))
        moves.append(SMove(arena.move(name), tuple(st), j))
    if arena is None:
        raise ValueError("empty trace and no arena")
    return SPlay(arena, tuple(moves))


def parse_prearena(text: str, n: int = 2) -> Arena:
    """Prearena of a typing judgment `x:T, y:U |- V` (context may be empty)."""
    from .syntax import parse_type

    if "|-" not in text:
        raise ValueError("expected 'context |- type'")
    left, right = text.split("|-", 1)
    ctx = []
    for part in left.split(","):
        part = part.strip()
        if not part:
            continue
        x, ty = part.split(":", 1)
        ctx.append((x.strip(), parse_type(ty.strip())))
    return prearena_of_judgment(ctx, parse_type(right.strip()), n)
