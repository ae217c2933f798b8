"""Pure-Python automata kernels (the fallback twin of _ckernels.pyx).

Automata reach the kernels integer-coded: states 0..n-1, symbols 0..k-1.
NFA transitions are bitmasks (Python ints) and DFA tables use -1 for a
missing transition.
"""

from __future__ import annotations

from collections import deque


def subset_construction(n: int, k: int, delta: list, start: int, accept: int):
    """Determinize an ε-free NFA given as delta[state][symbol] = target bitmask.

    Returns (table, accepting) where table[d][a] is a DFA state or -1, and
    DFA state 0 is the start subset. The empty subset is never created.
    """
    index = {start: 0}
    subsets = [start]
    table = []
    accepting = []
    i = 0
    while i < len(subsets):
        s = subsets[i]
        accepting.append(bool(s & accept))
        row = [-1] * k
        for a in range(k):
            t = 0
            m = s
            while m:
                low = m & -m
                t |= delta[low.bit_length() - 1][a]
                m ^= low
            if t:
                d = index.get(t)
                if d is None:
                    d = len(subsets)
                    index[t] = d
                    subsets.append(t)
                row[a] = d
        table.append(row)
        i += 1
    return table, accepting


def refine_partition(table: list, accepting: list, k: int) -> list:
    """Moore refinement on a (partial) DFA; -1 is an implicit rejecting sink.

    Returns the block index of each state; equal blocks are language-equal.
    """
    n = len(table)
    block = [1 if a else 0 for a in accepting]
    count = len(set(block))
    while True:
        sigs = {}
        new = [0] * n
        for s in range(n):
            row = table[s]
            key = (block[s],) + tuple(block[t] if t >= 0 else -1 for t in row)
            b = sigs.get(key)
            if b is None:
                b = len(sigs)
                sigs[key] = b
            new[s] = b
        if len(sigs) == count:
            return new
        block = new
        count = len(sigs)


def product_witness(t1: list, a1: list, t2: list, a2: list, k: int):
    """Shortest word accepted by exactly one of two DFAs (start state 0), or None."""
    start = (0 if t1 else -1, 0 if t2 else -1)
    parent = {start: None}
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        acc1 = p >= 0 and a1[p]
        acc2 = q >= 0 and a2[q]
        if acc1 != acc2:
            word = []
            node = (p, q)
            while parent[node] is not None:
                node, sym = parent[node]
                word.append(sym)
            word.reverse()
            return word
        for a in range(k):
            np_ = t1[p][a] if p >= 0 else -1
            nq = t2[q][a] if q >= 0 else -1
            if np_ < 0 and nq < 0:
                continue
            nxt = (np_, nq)
            if nxt not in parent:
                parent[nxt] = ((p, q), a)
                queue.append(nxt)
    return None
