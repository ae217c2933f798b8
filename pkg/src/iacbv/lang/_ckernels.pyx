# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled automata kernels; same contracts as _pykernels."""

from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, calloc, realloc, free
from libc.string cimport memset, memcpy
from cpython.bytes cimport PyBytes_FromStringAndSize

cdef extern from *:
    int __builtin_ctzll(unsigned long long x) nogil

cdef uint64_t MASK64 = 0xFFFFFFFFFFFFFFFF


cdef void _to_words(object mask, uint64_t* out, int W):
    cdef int w
    for w in range(W):
        out[w] = <uint64_t>((mask >> (64 * w)) & 0xFFFFFFFFFFFFFFFF)


def subset_construction(int n, int k, list delta, object start, object accept):
    cdef int W = (n + 63) // 64 if n > 0 else 1
    cdef uint64_t* dw = <uint64_t*>malloc(max(1, n * k * W) * sizeof(uint64_t))
    cdef uint64_t* accw = <uint64_t*>malloc(W * sizeof(uint64_t))
    cdef uint64_t* tmp = <uint64_t*>malloc(W * sizeof(uint64_t))
    cdef Py_ssize_t cap = 64
    cdef uint64_t* store = <uint64_t*>malloc(cap * W * sizeof(uint64_t))
    cdef Py_ssize_t count = 1
    cdef Py_ssize_t i
    cdef int s, a, w, w2, bit
    cdef uint64_t word
    cdef uint64_t* src
    cdef bint nonzero, acc
    cdef dict index = {}
    cdef list table = []
    cdef list accepting = []
    cdef list row
    cdef bytes key
    cdef object d
    try:
        for s in range(n):
            for a in range(k):
                _to_words(delta[s][a], dw + (s * k + a) * W, W)
        _to_words(accept, accw, W)
        _to_words(start, store, W)
        index[PyBytes_FromStringAndSize(<char*>store, W * 8)] = 0
        i = 0
        while i < count:
            acc = False
            for w in range(W):
                if store[i * W + w] & accw[w]:
                    acc = True
                    break
            accepting.append(acc)
            row = [-1] * k
            for a in range(k):
                memset(tmp, 0, W * sizeof(uint64_t))
                for w in range(W):
                    word = store[i * W + w]
                    while word:
                        bit = __builtin_ctzll(word)
                        s = w * 64 + bit
                        src = dw + (s * k + a) * W
                        for w2 in range(W):
                            tmp[w2] |= src[w2]
                        word &= word - 1
                nonzero = False
                for w in range(W):
                    if tmp[w]:
                        nonzero = True
                        break
                if not nonzero:
                    continue
                key = PyBytes_FromStringAndSize(<char*>tmp, W * 8)
                d = index.get(key)
                if d is None:
                    if count == cap:
                        cap *= 2
                        store = <uint64_t*>realloc(store, cap * W * sizeof(uint64_t))
                    memcpy(store + count * W, tmp, W * sizeof(uint64_t))
                    d = count
                    index[key] = d
                    count += 1
                row[a] = d
            table.append(row)
            i += 1
    finally:
        free(dw)
        free(accw)
        free(tmp)
        free(store)
    return table, accepting


def refine_partition(list table, list accepting, int k):
    cdef Py_ssize_t n = len(table)
    cdef Py_ssize_t s
    cdef int a, t
    cdef int* block = <int*>malloc(max(1, n) * sizeof(int))
    cdef int* trans = <int*>malloc(max(1, n * k) * sizeof(int))
    cdef int* new = <int*>malloc(max(1, n) * sizeof(int))
    cdef Py_ssize_t count, nb
    cdef dict sigs
    cdef list key
    cdef list out
    try:
        for s in range(n):
            block[s] = 1 if accepting[s] else 0
            for a in range(k):
                trans[s * k + a] = table[s][a]
        count = len(set(accepting))
        while True:
            sigs = {}
            for s in range(n):
                key = [block[s]]
                for a in range(k):
                    t = trans[s * k + a]
                    key.append(block[t] if t >= 0 else -1)
                nb = sigs.setdefault(tuple(key), len(sigs))
                new[s] = nb
            for s in range(n):
                block[s] = new[s]
            if len(sigs) == count:
                break
            count = len(sigs)
        out = [block[s] for s in range(n)]
    finally:
        free(block)
        free(trans)
        free(new)
    return out


cdef struct _Seen:
    long long* keys     # node + 1, 0 = empty slot
    long long* parent   # parent node, -1 for the start
    int* via
    Py_ssize_t cap, used


cdef Py_ssize_t _slot(_Seen* h, long long key) nogil:
    cdef Py_ssize_t i = <Py_ssize_t>((<unsigned long long>key * 11400714819323198485ULL) >> 20) & (h.cap - 1)
    while h.keys[i] != 0 and h.keys[i] != key + 1:
        i = (i + 1) & (h.cap - 1)
    return i


cdef int _seen_init(_Seen* h, Py_ssize_t cap):
    h.cap = cap
    h.used = 0
    h.keys = <long long*>calloc(cap, sizeof(long long))
    h.parent = <long long*>malloc(cap * sizeof(long long))
    h.via = <int*>malloc(cap * sizeof(int))
    return 0 if h.keys and h.parent and h.via else -1


cdef void _seen_free(_Seen* h):
    free(h.keys)
    free(h.parent)
    free(h.via)


cdef int _seen_grow(_Seen* h) except -1:
    cdef _Seen old = h[0]
    cdef Py_ssize_t i, j
    if _seen_init(h, old.cap * 2) < 0:
        _seen_free(h)
        h[0] = old
        raise MemoryError()
    for i in range(old.cap):
        if old.keys[i] != 0:
            j = _slot(h, old.keys[i] - 1)
            h.keys[j] = old.keys[i]
            h.parent[j] = old.parent[i]
            h.via[j] = old.via[i]
    h.used = old.used
    _seen_free(&old)
    return 0


cdef inline void _load_row(list row, object acc, int* out, char* flag, int k):
    cdef int a
    for a in range(k):
        out[a] = row[a]
    flag[0] = 2 if acc else 1


def product_witness(list t1, list a1, list t2, list a2, int k):
    cdef int n1 = len(t1)
    cdef int n2 = len(t2)
    cdef int* tr1 = <int*>malloc(max(1, n1 * k) * sizeof(int))
    cdef int* tr2 = <int*>malloc(max(1, n2 * k) * sizeof(int))
    # rows are copied on first visit (0 = not loaded), since the search often stops early
    cdef char* ac1 = <char*>calloc(max(1, n1), 1)
    cdef char* ac2 = <char*>calloc(max(1, n2), 1)
    # pair (p, q) with -1 for the sink, encoded as (p+1)*(n2+1)+(q+1)
    cdef _Seen seen
    cdef Py_ssize_t qcap = 64
    cdef long long* queue = <long long*>malloc(qcap * sizeof(long long))
    cdef long long* grown
    cdef Py_ssize_t head = 0, tail = 0, i
    cdef long long node, nxt, start
    cdef int p, q, np_, nq, a
    cdef bint acc1, acc2
    cdef list word = None
    if _seen_init(&seen, 64) < 0 or not (tr1 and tr2 and ac1 and ac2 and queue):
        _seen_free(&seen)
        free(tr1); free(tr2); free(ac1); free(ac2); free(queue)
        raise MemoryError()
    try:
        p = 0 if n1 > 0 else -1
        q = 0 if n2 > 0 else -1
        start = (p + 1) * (n2 + 1) + (q + 1)
        i = _slot(&seen, start)
        seen.keys[i] = start + 1
        seen.parent[i] = -1
        seen.used = 1
        queue[tail] = start
        tail += 1
        while head < tail:
            node = queue[head]
            head += 1
            p = <int>(node // (n2 + 1)) - 1
            q = <int>(node % (n2 + 1)) - 1
            if p >= 0 and ac1[p] == 0:
                _load_row(t1[p], a1[p], tr1 + p * k, &ac1[p], k)
            if q >= 0 and ac2[q] == 0:
                _load_row(t2[q], a2[q], tr2 + q * k, &ac2[q], k)
            acc1 = p >= 0 and ac1[p] == 2
            acc2 = q >= 0 and ac2[q] == 2
            if acc1 != acc2:
                word = []
                i = _slot(&seen, node)
                while seen.parent[i] != -1:
                    word.append(seen.via[i])
                    i = _slot(&seen, seen.parent[i])
                word.reverse()
                break
            for a in range(k):
                np_ = tr1[p * k + a] if p >= 0 else -1
                nq = tr2[q * k + a] if q >= 0 else -1
                if np_ < 0 and nq < 0:
                    continue
                nxt = (np_ + 1) * (n2 + 1) + (nq + 1)
                i = _slot(&seen, nxt)
                if seen.keys[i] == 0:
                    seen.keys[i] = nxt + 1
                    seen.parent[i] = node
                    seen.via[i] = a
                    seen.used += 1
                    if 2 * seen.used > seen.cap:
                        _seen_grow(&seen)
                    if tail == qcap:
                        grown = <long long*>realloc(queue, 2 * qcap * sizeof(long long))
                        if not grown:
                            raise MemoryError()
                        queue = grown
                        qcap *= 2
                    queue[tail] = nxt
                    tail += 1
    finally:
        free(tr1)
        free(tr2)
        free(ac1)
        free(ac2)
        free(queue)
        _seen_free(&seen)
    return word
