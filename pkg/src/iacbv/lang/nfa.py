"""Nondeterministic finite automata over arbitrary hashable symbols.

Automata are immutable. ε-transitions are stored under the key None and
are removed lazily, only when an operation needs an ε-free automaton.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from . import kernels

EPS = None


def _sym_key(a) -> str:
    return repr(a)


@dataclass(frozen=True, eq=False)
class Nfa:
    n: int
    start: int
    accept: frozenset
    delta: tuple  # per state: dict symbol-or-None -> frozenset of states
    alphabet: frozenset

    def transitions(self):
        for p, row in enumerate(self.delta):
            for a, qs in row.items():
                for q in qs:
                    yield p, a, q

    def symbols_used(self) -> frozenset:
        out = set()
        for row in self.delta:
            out.update(a for a in row if a is not EPS)
        return frozenset(out)

    def has_epsilon(self) -> bool:
        return any(EPS in row for row in self.delta)

    def num_transitions(self) -> int:
        return sum(len(qs) for row in self.delta for qs in row.values())

    def __repr__(self) -> str:
        return f"Nfa(states={self.n}, transitions={self.num_transitions()}, accept={len(self.accept)})"


class _Builder:
    def __init__(self):
        self.delta: list = []
        self.alphabet: set = set()

    def state(self) -> int:
        self.delta.append({})
        return len(self.delta) - 1

    def add(self, p: int, a, q: int) -> None:
        self.delta[p].setdefault(a, set()).add(q)
        if a is not EPS:
            self.alphabet.add(a)

    def embed(self, m: Nfa, relabel: Callable | None = None) -> int:
        off = len(self.delta)
        for row in m.delta:
            new = {}
            for a, qs in row.items():
                b = a if (a is EPS or relabel is None) else relabel(a)
                new.setdefault(b, set()).update(q + off for q in qs)
            self.delta.append(new)
        self.alphabet |= set(m.alphabet)
        return off

    def build(self, start: int, accept: Iterable[int], alphabet: Iterable = ()) -> Nfa:
        delta = tuple({a: frozenset(qs) for a, qs in row.items()} for row in self.delta)
        return Nfa(len(delta), start, frozenset(accept), delta, frozenset(self.alphabet) | frozenset(alphabet))


# ---------------------------------------------------------------- constructors


def empty(alphabet: Iterable = ()) -> Nfa:
    b = _Builder()
    s = b.state()
    return b.build(s, [], alphabet)


def epsilon(alphabet: Iterable = ()) -> Nfa:
    b = _Builder()
    s = b.state()
    return b.build(s, [s], alphabet)


def lit(word: Iterable) -> Nfa:
    b = _Builder()
    s = cur = b.state()
    for a in word:
        nxt = b.state()
        b.add(cur, a, nxt)
        cur = nxt
    return b.build(s, [cur])


def any_of(symbols: Iterable) -> Nfa:
    """Words of length one over the given symbols."""
    b = _Builder()
    s, t = b.state(), b.state()
    syms = list(symbols)
    for a in syms:
        b.add(s, a, t)
    return b.build(s, [t], syms)


def sigma_star(symbols: Iterable) -> Nfa:
    b = _Builder()
    s = b.state()
    syms = list(symbols)
    for a in syms:
        b.add(s, a, s)
    return b.build(s, [s], syms)


def finite(words: Iterable) -> Nfa:
    return union(*[lit(w) for w in words]) if words else empty()


# ---------------------------------------------------------------- regular ops


def union(*ms: Nfa) -> Nfa:
    if not ms:
        return empty()
    if len(ms) == 1:
        return ms[0]
    b = _Builder()
    s = b.state()
    accept = []
    for m in ms:
        off = b.embed(m)
        b.add(s, EPS, m.start + off)
        accept += [q + off for q in m.accept]
    return b.build(s, accept)


def concat(*ms: Nfa) -> Nfa:
    if not ms:
        return epsilon()
    if len(ms) == 1:
        return ms[0]
    b = _Builder()
    s = b.state()
    ends = [s]
    for m in ms:
        off = b.embed(m)
        for e in ends:
            b.add(e, EPS, m.start + off)
        ends = [q + off for q in m.accept]
    return b.build(s, ends)


def star(m: Nfa) -> Nfa:
    b = _Builder()
    s = b.state()
    off = b.embed(m)
    b.add(s, EPS, m.start + off)
    for q in m.accept:
        b.add(q + off, EPS, s)
    return b.build(s, [s])


def optional(m: Nfa) -> Nfa:
    return union(epsilon(), m)


def eps_closure(m: Nfa, states: Iterable[int]) -> frozenset:
    seen = set(states)
    stack = list(seen)
    while stack:
        p = stack.pop()
        for q in m.delta[p].get(EPS, ()):
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return frozenset(seen)


def remove_epsilon(m: Nfa) -> Nfa:
    """Equivalent ε-free automaton restricted to reachable states."""
    if not m.has_epsilon():
        return trim_reachable(m)
    closures = [eps_closure(m, [p]) for p in range(m.n)]
    b = _Builder()
    ids = {m.start: b.state()}
    order = [m.start]
    accept = []
    i = 0
    while i < len(order):
        p = order[i]
        i += 1
        cl = closures[p]
        if cl & m.accept:
            accept.append(ids[p])
        for r in cl:
            for a, qs in m.delta[r].items():
                if a is EPS:
                    continue
                for q in qs:
                    if q not in ids:
                        ids[q] = b.state()
                        order.append(q)
                    b.add(ids[p], a, ids[q])
    return b.build(ids[m.start], accept, m.alphabet)


def trim_reachable(m: Nfa) -> Nfa:
    seen = {m.start}
    stack = [m.start]
    while stack:
        p = stack.pop()
        for qs in m.delta[p].values():
            for q in qs:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
    if len(seen) == m.n:
        return m
    return _restrict(m, seen)


def trim(m: Nfa) -> Nfa:
    """Keep only states both reachable and co-reachable (plus the start)."""
    m = trim_reachable(m)
    back: dict = {p: set() for p in range(m.n)}
    for p, _a, q in m.transitions():
        back[q].add(p)
    live = set(m.accept)
    stack = list(live)
    while stack:
        q = stack.pop()
        for p in back[q]:
            if p not in live:
                live.add(p)
                stack.append(p)
    live.add(m.start)
    if len(live) == m.n:
        return m
    return _restrict(m, live)


def _restrict(m: Nfa, keep: set) -> Nfa:
    order = sorted(keep)
    ids = {p: k for k, p in enumerate(order)}
    delta = []
    for p in order:
        row = {}
        for a, qs in m.delta[p].items():
            kept = frozenset(ids[q] for q in qs if q in ids)
            if kept:
                row[a] = kept
        delta.append(row)
    return Nfa(len(order), ids[m.start], frozenset(ids[q] for q in m.accept if q in ids), tuple(delta), m.alphabet)


def _product(l: Nfa, r: Nfa, step) -> tuple:
    """Reachable product built by `step((p, q)) -> [(symbol, (p', q'))]`."""
    b = _Builder()
    start = (l.start, r.start)
    ids = {start: b.state()}
    queue = deque([start])
    while queue:
        pq = queue.popleft()
        for a, nxt in step(pq):
            if nxt not in ids:
                ids[nxt] = b.state()
                queue.append(nxt)
            b.add(ids[pq], a, ids[nxt])
    return b, ids


def intersect(l: Nfa, r: Nfa) -> Nfa:
    l, r = remove_epsilon(l), remove_epsilon(r)

    def step(pq):
        p, q = pq
        rq = r.delta[q]
        for a, ps in l.delta[p].items():
            qs = rq.get(a)
            if qs:
                for p2 in ps:
                    for q2 in qs:
                        yield a, (p2, q2)

    b, ids = _product(l, r, step)
    accept = [i for (p, q), i in ids.items() if p in l.accept and q in r.accept]
    return trim(b.build(ids[(l.start, r.start)], accept, l.alphabet | r.alphabet))


def shuffle(l: Nfa, r: Nfa) -> Nfa:
    """All interleavings of a word of l with a word of r (asynchronous product)."""
    l, r = remove_epsilon(l), remove_epsilon(r)

    def step(pq):
        p, q = pq
        for a, ps in l.delta[p].items():
            for p2 in ps:
                yield a, (p2, q)
        for a, qs in r.delta[q].items():
            for q2 in qs:
                yield a, (p, q2)

    b, ids = _product(l, r, step)
    accept = [i for (p, q), i in ids.items() if p in l.accept and q in r.accept]
    return b.build(ids[(l.start, r.start)], accept, l.alphabet | r.alphabet)


def complement(m: Nfa, alphabet: Iterable) -> Nfa:
    """alphabet* minus L(m); symbols of m outside the alphabet are irrelevant."""
    syms = sorted(set(alphabet), key=_sym_key)
    table, acc = _determinize(m, syms)
    b = _Builder()
    states = [b.state() for _ in table]
    sink = b.state()
    for d, row in enumerate(table):
        for k, t in enumerate(row):
            b.add(states[d], syms[k], states[t] if t >= 0 else sink)
    for a in syms:
        b.add(sink, a, sink)
    accept = [states[d] for d in range(len(table)) if not acc[d]] + [sink]
    return b.build(states[0], accept, syms)


def rename(m: Nfa, f: Mapping | Callable) -> Nfa:
    """Relabel every symbol; f must be injective on the symbols in use."""
    fn = f.get if isinstance(f, Mapping) else f
    mapping = {}
    for a in m.symbols_used():
        b = fn(a, a) if isinstance(f, Mapping) else fn(a)
        mapping[a] = b
    images = {}
    for a, b in mapping.items():
        if b in images and images[b] != a:
            raise ValueError(f"rename is not injective: {images[b]!r} and {a!r} both map to {b!r}")
        images[b] = a
    rest = [fn(a, a) if isinstance(f, Mapping) else fn(a) for a in m.alphabet - m.symbols_used()]
    delta = tuple({(mapping[a] if a is not EPS else EPS): qs for a, qs in row.items()} for row in m.delta)
    return Nfa(m.n, m.start, m.accept, delta, frozenset(mapping.values()) | frozenset(rest))


def relabel(m: Nfa, fn: Callable) -> Nfa:
    """Homomorphic relabelling that may merge symbols (no injectivity check)."""
    b = _Builder()
    b.embed(m, relabel=fn)
    return b.build(m.start, m.accept, (fn(a) for a in m.alphabet))


def erase(m: Nfa, kill) -> Nfa:
    """Replace every transition on a killed symbol by ε.

    `kill` is a set of symbols or a predicate on symbols.
    """
    pred = kill if callable(kill) else (lambda a, s=frozenset(kill): a in s)
    b = _Builder()
    for row in m.delta:
        new = {}
        for a, qs in row.items():
            key = EPS if (a is not EPS and pred(a)) else a
            new.setdefault(key, set()).update(qs)
        b.delta.append(new)
        b.alphabet.update(a for a in new if a is not EPS)
    return b.build(m.start, m.accept, (a for a in m.alphabet if not pred(a)))


def subst(m: Nfa, rules: Mapping) -> Nfa:
    """Regular substitution: each a-transition with a rule is replaced by a copy of rules[a]."""
    b = _Builder()
    for row in m.delta:
        b.state()
    for p, a, q in list(m.transitions()):
        if a is not EPS and a in rules:
            r = rules[a]
            off = b.embed(r)
            b.add(p, EPS, r.start + off)
            for f in r.accept:
                b.add(f + off, EPS, q)
        else:
            b.add(p, a, q)
    alphabet = {a for a in m.alphabet if a not in rules}
    for r in rules.values():
        alphabet |= r.alphabet
    out = b.build(m.start, m.accept)
    return Nfa(out.n, out.start, out.accept, out.delta, frozenset(alphabet) | out.symbols_used())


# ---------------------------------------------------------------- deciding


def _coded(m: Nfa, syms: list) -> tuple:
    m = remove_epsilon(m)
    idx = {a: k for k, a in enumerate(syms)}
    k = len(syms)
    delta = [[0] * k for _ in range(m.n)]
    for p, a, q in m.transitions():
        j = idx.get(a)
        if j is not None:
            delta[p][j] |= 1 << q
    accept = 0
    for q in m.accept:
        accept |= 1 << q
    return m.n, k, delta, 1 << m.start, accept


def _determinize(m: Nfa, syms: list) -> tuple:
    n, k, delta, start, accept = _coded(m, syms)
    return kernels.subset_construction(n, k, delta, start, accept)


def _prune_dead(table: list, acc: list) -> tuple:
    """Drop DFA states that cannot reach acceptance (state 0 is always kept)."""
    n = len(table)
    back = [[] for _ in range(n)]
    for p, row in enumerate(table):
        for t in row:
            if t >= 0:
                back[t].append(p)
    live = {p for p in range(n) if acc[p]}
    stack = list(live)
    while stack:
        q = stack.pop()
        for p in back[q]:
            if p not in live:
                live.add(p)
                stack.append(p)
    live.add(0)
    order = sorted(live)
    ids = {p: i for i, p in enumerate(order)}
    new_table = [[ids.get(t, -1) if t >= 0 else -1 for t in table[p]] for p in order]
    return new_table, [acc[p] for p in order]


def minimal_dfa(m: Nfa, syms: list | None = None) -> tuple:
    """(symbols, table, accepting) of the minimal partial DFA for L(m)."""
    if syms is None:
        syms = sorted(m.symbols_used(), key=_sym_key)
    table, acc = _determinize(m, syms)
    table, acc = _prune_dead(table, acc)
    k = len(syms)
    block = kernels.refine_partition(table, acc, k)
    # renumber blocks so that the start state is 0, in BFS order
    order = {block[0]: 0}
    queue = deque([0])
    rep = {block[0]: 0}
    while queue:
        s = queue.popleft()
        for t in table[s]:
            if t >= 0 and block[t] not in order:
                order[block[t]] = len(order)
                rep[block[t]] = t
                queue.append(t)
    new_table = [None] * len(order)
    new_acc = [False] * len(order)
    for bl, i in order.items():
        s = rep[bl]
        new_table[i] = [order[block[t]] if t >= 0 else -1 for t in table[s]]
        new_acc[i] = acc[s]
    return syms, new_table, new_acc


def _from_table(syms: list, table: list, acc: list, alphabet: Iterable = ()) -> Nfa:
    b = _Builder()
    states = [b.state() for _ in table]
    if not states:
        states = [b.state()]
    for d, row in enumerate(table):
        for k, t in enumerate(row):
            if t >= 0:
                b.add(states[d], syms[k], states[t])
    return b.build(states[0], [states[d] for d in range(len(table)) if acc[d]], alphabet)


def determinize(m: Nfa) -> Nfa:
    syms = sorted(m.symbols_used(), key=_sym_key)
    table, acc = _determinize(m, syms)
    return _from_table(syms, table, acc, m.alphabet)


def minimize(m: Nfa) -> Nfa:
    syms, table, acc = minimal_dfa(m)
    return _from_table(syms, table, acc, m.alphabet)


def difference_witness(l: Nfa, r: Nfa):
    """A shortest word in the symmetric difference of L(l) and L(r), or None."""
    syms = sorted(l.symbols_used() | r.symbols_used(), key=_sym_key)
    _, t1, a1 = minimal_dfa(l, syms)
    _, t2, a2 = minimal_dfa(r, syms)
    w = kernels.product_witness(t1, a1, t2, a2, len(syms))
    if w is None:
        return None
    return tuple(syms[i] for i in w)


def equivalent(l: Nfa, r: Nfa) -> bool:
    return difference_witness(l, r) is None


def is_empty(m: Nfa) -> bool:
    return not trim(remove_epsilon(m)).accept


def member(m: Nfa, word: Iterable) -> bool:
    cur = eps_closure(m, [m.start])
    for a in word:
        nxt = set()
        for p in cur:
            nxt |= m.delta[p].get(a, frozenset())
        if not nxt:
            return False
        cur = eps_closure(m, nxt)
    return bool(cur & m.accept)


def enumerate_up_to(m: Nfa, k: int) -> set:
    """All accepted words of length at most k (as tuples)."""
    syms = sorted(m.symbols_used(), key=_sym_key)
    table, acc = _determinize(m, syms)
    table, acc = _prune_dead(table, acc)
    out = set()
    frontier = [(0, ())]
    for length in range(k + 1):
        nxt = []
        for s, w in frontier:
            if acc[s]:
                out.add(w)
            if length == k:
                continue
            for j, t in enumerate(table[s]):
                if t >= 0:
                    nxt.append((t, w + (syms[j],)))
        frontier = nxt
    return out


# ---------------------------------------------------------------- formats


def to_text(m: Nfa, show: Callable = str) -> str:
    """Compact golden-file format: states/start/accept/trans lines."""
    lines = [f"states {m.n}", f"start {m.start}", "accept " + " ".join(str(q) for q in sorted(m.accept))]
    rows = []
    for p, a, q in m.transitions():
        rows.append((p, "eps" if a is EPS else show(a), q))
    for p, a, q in sorted(rows):
        lines.append(f"trans {p} {a} {q}")
    return "\n".join(lines) + "\n"


def from_text(text: str, parse: Callable = str) -> Nfa:
    n = start = None
    accept: list = []
    trans = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        if head == "states":
            n = int(rest)
        elif head == "start":
            start = int(rest)
        elif head == "accept":
            accept = [int(x) for x in rest.split()]
        elif head == "trans":
            p, sym, q = rest.split(" ")
            trans.append((int(p), EPS if sym == "eps" else parse(sym), int(q)))
        else:
            raise ValueError(f"bad automaton line: {raw!r}")
    if n is None or start is None:
        raise ValueError("automaton text needs `states` and `start` lines")
    b = _Builder()
    for _ in range(n):
        b.state()
    for p, a, q in trans:
        b.add(p, a, q)
    return b.build(start, accept)


def to_dot(m: Nfa, show: Callable = str, name: str = "nfa") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  init [shape=point label=""];']
    for p in range(m.n):
        shape = "doublecircle" if p in m.accept else "circle"
        lines.append(f"  s{p} [shape={shape} label=\"{p}\"];")
    lines.append(f"  init -> s{m.start};")
    for p, a, q in m.transitions():
        lab = "ε" if a is EPS else show(a).replace('"', '\\"')
        lines.append(f'  s{p} -> s{q} [label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
