"""Big-step evaluator with fuel, run as an explicit-stack machine.

Each rule application (one judgment in the derivation) costs one unit of
fuel, so a diverging program is reported as OutOfFuel instead of looping.
The machine keeps its continuation on a Python list, which lets deep
recursion through fix or long while loops run without touching the
interpreter's recursion limit. A while loop whose iteration leaves the store
and the allocator exactly as it found them is reported as OutOfFuel at once,
since every later iteration repeats it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .syntax import (
    App, Assign, BinOp, Deref, Fix, Ident, If, IntLit, Lambda, Let, Loc,
    MkVar, New, Ref, Term, Unit, While, is_value, substitute,
)

DEFAULT_FUEL = 100_000


@dataclass(frozen=True)
class Converged:
    heap: dict = field(compare=True)
    value: Term = Unit()
    fuel_used: int = 0


@dataclass(frozen=True)
class OutOfFuel:
    fuel_used: int = 0


EvalResult = Union[Converged, OutOfFuel]


class StuckError(RuntimeError):
    """A closed well-typed term can never get stuck; this signals a bug or bad input."""


def _arith(op: str, a: int, b: int, n: int | None) -> int:
    if op == "+":
        r = a + b
    elif op == "-":
        r = a - b
    elif op == "*":
        r = a * b
    else:
        raise StuckError(f"unknown operator {op}")
    return r % (n + 1) if n is not None else r


def evaluate(heap: dict | None, t: Term, fuel: int = DEFAULT_FUEL, n: int | None = None) -> EvalResult:
    """Evaluate closed t from heap; n selects finitary arithmetic modulo n+1."""
    heap = dict(heap or {})
    next_loc = max(heap) + 1 if heap else 0
    stack: list = []
    used = 0
    term: Term | None = t
    value: Term | None = None

    while True:
        if term is not None:
            if used >= fuel:
                return OutOfFuel(used)
            used += 1
            c, term = term, None
            if isinstance(c, (Unit, IntLit, Loc, Lambda)):
                value = c
            elif isinstance(c, BinOp):
                stack.append(("binl", c.op, c.right))
                term = c.left
            elif isinstance(c, If):
                stack.append(("if", c.then, c.orelse))
                term = c.cond
            elif isinstance(c, Deref):
                stack.append(("deref",))
                term = c.target
            elif isinstance(c, Assign):
                stack.append(("assign", c.value))
                term = c.target
            elif isinstance(c, MkVar):
                if is_value(c):
                    value = c
                else:
                    stack.append(("mkvar", c.write))
                    term = c.read
            elif isinstance(c, App):
                stack.append(("app", c.arg))
                term = c.fn
            elif isinstance(c, Let):
                stack.append(("app", c.bound))
                term = Lambda(c.var, c.ty, c.body)
            elif isinstance(c, Fix):
                stack.append(("fix",))
                term = c.body
            elif isinstance(c, New):
                loc = next_loc
                next_loc += 1
                heap[loc] = 0
                stack.append(("new", loc))
                term = substitute(c.body, c.var, Loc(loc))
            elif isinstance(c, Ref):
                loc = next_loc
                next_loc += 1
                heap[loc] = 0
                value = Loc(loc)
            elif isinstance(c, While):
                stack.append(("while", c.guard, c.body, None))
                term = c.guard
            elif isinstance(c, Ident):
                raise StuckError(f"free identifier {c.name}")
            else:
                raise StuckError(f"cannot evaluate {c!r}")
            continue

        # return mode: hand value to the top frame
        if not stack:
            return Converged(heap, value, used)
        frame = stack.pop()
        v, value = value, None
        tag = frame[0]
        if tag == "binl":
            stack.append(("binr", frame[1], v))
            term = frame[2]
        elif tag == "binr":
            value = IntLit(_arith(frame[1], _int(frame[2]), _int(v), n))
        elif tag == "if":
            term = frame[1] if _int(v) != 0 else frame[2]
        elif tag == "deref":
            if isinstance(v, Loc):
                value = IntLit(heap[v.ident])
            elif isinstance(v, MkVar):
                term = App(v.read, Unit())
            else:
                raise StuckError(f"dereferencing {v!r}")
        elif tag == "assign":
            stack.append(("assign2", v))
            term = frame[1]
        elif tag == "assign2":
            target = frame[1]
            if isinstance(target, Loc):
                heap[target.ident] = _int(v)
                value = Unit()
            elif isinstance(target, MkVar):
                term = App(target.write, v)
            else:
                raise StuckError(f"assigning to {target!r}")
        elif tag == "mkvar":
            stack.append(("mkvar2", v))
            term = frame[1]
        elif tag == "mkvar2":
            value = MkVar(frame[1], v)
        elif tag == "app":
            stack.append(("app2", v))
            term = frame[1]
        elif tag == "app2":
            f = frame[1]
            if not isinstance(f, Lambda):
                raise StuckError(f"applying non-function {f!r}")
            term = substitute(f.body, f.var, v)
        elif tag == "fix":
            if not isinstance(v, Lambda) or not hasattr(v.ty, "param"):
                raise StuckError(f"fix of {v!r}")
            x = "$fix"
            value = Lambda(x, v.ty.param, App(App(v, Fix(v)), Ident(x)))
        elif tag == "new":
            heap.pop(frame[1], None)
            value = v
        elif tag == "while":
            if _int(v) == 0:
                value = Unit()
            else:
                stack.append(("whilebody", frame[1], frame[2], frame[3]))
                term = frame[2]
        elif tag == "whilebody":
            # one unit per loop iteration, on top of guard and body
            if used >= fuel:
                return OutOfFuel(used)
            used += 1
            # an iteration that left the store and allocator untouched repeats forever
            state = (tuple(sorted(heap.items())), next_loc)
            if state == frame[3]:
                return OutOfFuel(fuel)
            stack.append(("while", frame[1], frame[2], state))
            term = frame[1]
        else:
            raise StuckError(f"bad frame {frame!r}")


def _int(v: Term) -> int:
    if not isinstance(v, IntLit):
        raise StuckError(f"expected an integer, got {v!r}")
    return v.value


eval = evaluate  # noqa: A001 - the module's public name for the evaluator


def converges(t: Term, fuel: int = DEFAULT_FUEL, n: int | None = None) -> bool:
    """True iff t evaluates to a value within fuel ("unknown" is reported as False)."""
    return isinstance(evaluate({}, t, fuel, n), Converged)
