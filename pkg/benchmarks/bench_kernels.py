"""Compare the compiled automata kernels with the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat 5] [--states 18]

Runs each kernel on the same seeded random inputs with both backends and
prints the best-of-N time per kernel, plus an end-to-end decide_equiv run
with the kernels module switched to each backend.
"""

from __future__ import annotations

import argparse
import random
import time
from contextlib import contextmanager

from iacbv.lang import _pykernels, kernels

try:
    from iacbv.lang import _ckernels
except ImportError:  # extension not built
    _ckernels = None

PAIRS = [
    ("f:com->com->com |- let g1 = f skip in let g2 = f skip in g1 skip",
     "f:com->com->com |- let g1 = f skip in let g2 = f skip in g2 skip"),
    ("f:(com->com)->com |- new x in f (fn u:com => x := 1)",
     "f:(com->com)->com |- f (fn u:com => skip)"),
    ("x:var |- while !x do x := !x - 1",
     "x:var |- if !x then (x := !x - 1; while !x do x := !x - 1) else skip"),
]


def random_nfa(rng: random.Random, n: int, k: int, density: float):
    delta = [[0] * k for _ in range(n)]
    for p in range(n):
        for a in range(k):
            for q in range(n):
                if rng.random() < density:
                    delta[p][a] |= 1 << q
    accept = sum(1 << q for q in range(n) if rng.random() < 0.3)
    return n, k, delta, 1, accept


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


@contextmanager
def backend(impl):
    saved = (kernels.subset_construction, kernels.refine_partition, kernels.product_witness)
    kernels.subset_construction = impl.subset_construction
    kernels.refine_partition = impl.refine_partition
    kernels.product_witness = impl.product_witness
    try:
        yield
    finally:
        kernels.subset_construction, kernels.refine_partition, kernels.product_witness = saved


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--states", type=int, default=18)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    nfas = [random_nfa(rng, args.states, 3, 0.12) for _ in range(20)]
    dfas = [_pykernels.subset_construction(*m) for m in nfas]
    impls = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    if _ckernels is None:
        print("compiled kernels not built; timing the pure-Python backend only")

    print(f"{'kernel':<22}" + "".join(f"{name:>12}" for name, _ in impls) + "     speedup")
    rows = {
        "subset_construction": lambda impl: [impl.subset_construction(*m) for m in nfas],
        "refine_partition": lambda impl: [impl.refine_partition(t, a, 3) for t, a in dfas],
        "product_witness": lambda impl: [impl.product_witness(t1, a1, t2, a2, 3)
                                         for (t1, a1), (t2, a2) in zip(dfas, dfas[1:])],
    }
    for name, run in rows.items():
        times = [best_of(lambda impl=impl: run(impl), args.repeat) for _, impl in impls]
        print(_row(name, times))

    from iacbv.syntax import parse_term
    from iacbv.translate import decide_equiv

    judgments = [(parse_term(a), parse_term(b)) for a, b in PAIRS]
    times = []
    for _, impl in impls:
        with backend(impl):
            times.append(best_of(lambda: [decide_equiv(a, b) for a, b in judgments], args.repeat))
    print(_row("decide_equiv (3 pairs)", times))


def _row(name: str, times: list) -> str:
    cells = "".join(f"{t * 1000:>10.2f}ms" for t in times)
    speed = f"{times[0] / times[1]:>10.1f}x" if len(times) == 2 and times[1] > 0 else ""
    return f"{name:<22}{cells}{speed}"


if __name__ == "__main__":
    main()
