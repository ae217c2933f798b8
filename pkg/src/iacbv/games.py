"""Arenas and prearenas for types and typing judgments.

A move is a tuple path. Arrow arenas tag their moves with "arg"/"res",
binary tensors with "l"/"r", and the judgment prearena tags context moves
with the identifier and result moves with "". The initial move of a tensor
is the one-element path holding the tuple of component initial moves.
`render_move` turns a path into the dotted strings used in traces and
witnesses: result moves print bare ("1", "arg.*"), context moves as "x.read".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .syntax import Arrow, Com, Exp, Type, Var

O, P, Q, A = "O", "P", "Q", "A"

Move = tuple


def _flip(label: tuple) -> tuple:
    return (P if label[0] == O else O, label[1])


@dataclass(frozen=True, eq=False)
class Arena:
    moves: tuple
    initial: frozenset
    enabling: frozenset
    labels: dict = field(repr=False)
    # for prearenas built by `prearena`: the two sides
    left: "Arena | None" = field(default=None, repr=False)
    right: "Arena | None" = field(default=None, repr=False)

    def __post_init__(self):
        enablers: dict = {m: [] for m in self.moves}
        for a, b in self.enabling:
            enablers[b].append(a)
        object.__setattr__(self, "_enablers", {m: frozenset(v) for m, v in enablers.items()})
        by_name: dict = {}
        for m in self.moves:
            by_name.setdefault(render_move(m), m)
            if m and m[0] == "":
                # result moves also answer to ".name", unambiguous when the
                # left arena is not a tagged tensor
                by_name[".%s" % render_move(m)] = m
        object.__setattr__(self, "_by_name", by_name)

    def label(self, m: Move) -> tuple:
        return self.labels[m]

    def is_question(self, m: Move) -> bool:
        return self.labels[m][1] == Q

    def is_answer(self, m: Move) -> bool:
        return self.labels[m][1] == A

    def is_o(self, m: Move) -> bool:
        return self.labels[m][0] == O

    def is_p(self, m: Move) -> bool:
        return self.labels[m][0] == P

    def enables(self, m: Move, n: Move) -> bool:
        return m in self._enablers.get(n, ())

    def enablers(self, n: Move) -> frozenset:
        return self._enablers[n]

    def enabled_by(self, m: Move) -> list:
        return [n for n in self.moves if m in self._enablers[n]]

    def move(self, name: str) -> Move:
        """Look a move up by its rendered name."""
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"no move named {name!r}") from None

    def name_of(self, m: Move) -> str:
        """Rendered name that `move` maps back to m."""
        name = render_move(m)
        return name if self._by_name.get(name) == m else "." + name

    def __contains__(self, m) -> bool:
        return m in self.labels

    def __len__(self) -> int:
        return len(self.moves)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Arena):
            return NotImplemented
        return (
            set(self.moves) == set(other.moves)
            and self.initial == other.initial
            and self.enabling == other.enabling
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return hash((frozenset(self.moves), self.initial, self.enabling))


Prearena = Arena


def _make(moves, initial, enabling, labels, **kw) -> Arena:
    return Arena(tuple(moves), frozenset(initial), frozenset(enabling), dict(labels), **kw)


def _tag(prefix: tuple, m: Move) -> Move:
    return prefix + m


# ---------------------------------------------------------------- base arenas


def unit_arena() -> Arena:
    m = ("*",)
    return _make([m], [m], [], {m: (P, A)})


def flat_arena(n: int) -> Arena:
    ms = [(j,) for j in range(n + 1)]
    return _make(ms, ms, [], {m: (P, A) for m in ms})


def var_arena(n: int) -> Arena:
    """⟦var⟧ = (1⇒Z)⊗(Z⇒1), with its moves named ∗, read, j, write(j), ok."""
    star = ("*",)
    read = ("read",)
    ok = ("ok",)
    answers = [(j,) for j in range(n + 1)]
    writes = [(f"write({j})",) for j in range(n + 1)]
    labels = {star: (P, A), read: (O, Q), ok: (P, A)}
    enabling = [(star, read)] + [(read, a) for a in answers]
    enabling += [(star, w) for w in writes] + [(w, ok) for w in writes]
    for a in answers:
        labels[a] = (P, A)
    for w in writes:
        labels[w] = (O, Q)
    moves = [star, read] + answers + writes + [ok]
    return _make(moves, [star], enabling, labels)


def arrow_arena(a: Arena, b: Arena) -> Arena:
    """A⇒B: a fresh initial ∗ enabling I_A, each i_A enabling I_B."""
    star = ("*",)
    moves = [star]
    labels = {star: (P, A)}
    enabling = []
    for m in a.moves:
        t = _tag(("arg",), m)
        moves.append(t)
        labels[t] = (O, Q) if m in a.initial else _flip(a.labels[m])
    for m in b.moves:
        t = _tag(("res",), m)
        moves.append(t)
        labels[t] = b.labels[m]
    for ia in a.initial:
        enabling.append((star, _tag(("arg",), ia)))
        for ib in b.initial:
            enabling.append((_tag(("arg",), ia), _tag(("res",), ib)))
    enabling += [(_tag(("arg",), x), _tag(("arg",), y)) for x, y in a.enabling]
    enabling += [(_tag(("res",), x), _tag(("res",), y)) for x, y in b.enabling]
    return _make(moves, [star], enabling, labels)


def named_tensor(parts: list) -> Arena:
    """Tensor of [(tag, arena), ...]; an empty list gives 1."""
    if not parts:
        return unit_arena()
    inits = [sorted(ar.initial, key=repr) for _, ar in parts]
    initial = [(combo,) for combo in itertools.product(*inits)]
    moves = list(initial)
    labels = {m: (P, A) for m in initial}
    enabling = []
    for k, (tag, ar) in enumerate(parts):
        for m in ar.moves:
            if m in ar.initial:
                continue
            t = (tag,) + m
            moves.append(t)
            labels[t] = ar.labels[m]
        for x, y in ar.enabling:
            if x in ar.initial:
                for i in initial:
                    if i[0][k] == x:
                        enabling.append((i, (tag,) + y))
            else:
                enabling.append(((tag,) + x, (tag,) + y))
    return _make(moves, initial, enabling, labels)


def tensor(a: Arena, b: Arena) -> Arena:
    return named_tensor([("l", a), ("r", b)])


def prearena(a: Arena, b: Arena) -> Arena:
    """A→B: I_A as O-questions, A's other moves flipped, B tagged with ""."""
    moves = []
    labels = {}
    for m in a.moves:
        moves.append(m)
        labels[m] = (O, Q) if m in a.initial else _flip(a.labels[m])
    for m in b.moves:
        t = ("",) + m
        moves.append(t)
        labels[t] = b.labels[m]
    enabling = list(a.enabling)
    enabling += [(("",) + x, ("",) + y) for x, y in b.enabling]
    enabling += [(ia, ("",) + ib) for ia in a.initial for ib in b.initial]
    return _make(moves, a.initial, enabling, labels, left=a, right=b)


def denote_type(ty: Type, n: int = 2) -> Arena:
    if isinstance(ty, Com):
        return unit_arena()
    if isinstance(ty, Exp):
        return flat_arena(n)
    if isinstance(ty, Var):
        return var_arena(n)
    if isinstance(ty, Arrow):
        return arrow_arena(denote_type(ty.param, n), denote_type(ty.result, n))
    raise TypeError(f"not a type: {ty!r}")


def context_arena(ctx, n: int = 2) -> Arena:
    return named_tensor([(x, denote_type(ty, n)) for x, ty in ctx])


def prearena_of_judgment(ctx, ty: Type, n: int = 2) -> Arena:
    return prearena(context_arena(ctx, n), denote_type(ty, n))


# ---------------------------------------------------------------- helpers


def initial_moves(ty: Type, n: int = 2) -> list:
    """Payloads of the initial moves of ⟦ty⟧: integers for exp, "*" otherwise."""
    if isinstance(ty, Exp):
        return list(range(n + 1))
    return ["*"]


def type_labels(ty: Type, n: int = 2) -> dict:
    """Labels of ⟦ty⟧'s moves by path."""
    return denote_type(ty, n).labels


def context_initial_moves(ctx, n: int = 2) -> list:
    """All initial moves of the judgment prearena, as tuples of payloads per identifier."""
    return list(itertools.product(*[initial_moves(ty, n) for _, ty in ctx]))


def render_element(e) -> str:
    if isinstance(e, tuple):
        return "(" + ",".join(render_move(x) for x in e) + ")"
    return str(e)


def render_move(m: Move) -> str:
    if len(m) == 1 and isinstance(m[0], tuple):
        return render_element(m[0])
    parts = list(m)
    if parts and parts[0] == "":
        parts = parts[1:]
    return ".".join(render_element(e) for e in parts)


def move_name(m: Move) -> str:
    return render_move(m)


def to_dot(ar: Arena, name: str = "arena") -> str:
    lines = [f"digraph {name} {{"]
    ids = {m: f"m{k}" for k, m in enumerate(ar.moves)}
    for m in ar.moves:
        pol, kind = ar.labels[m]
        shape = "box" if m in ar.initial else "ellipse"
        lab = render_move(m).replace('"', '\\"')
        lines.append(f'  {ids[m]} [label="{lab}\\n{pol}{kind}" shape={shape}];')
    for a, b in sorted(ar.enabling, key=repr):
        lines.append(f"  {ids[a]} -> {ids[b]};")
    lines.append("}")
    return "\n".join(lines)


def to_text(ar: Arena) -> str:
    lines = []
    for m in ar.moves:
        pol, kind = ar.labels[m]
        init = " initial" if m in ar.initial else ""
        lines.append(f"move {render_move(m)} {pol}{kind}{init}")
    for a, b in sorted(ar.enabling, key=repr):
        lines.append(f"enable {render_move(a)} {render_move(b)}")
    return "\n".join(lines)


def check_arena(ar: Arena, pre: bool = False) -> list:
    """Structural well-formedness problems (empty list when fine)."""
    problems = []
    for m in ar.initial:
        want = (O, Q) if pre else (P, A)
        if ar.labels[m] != want:
            problems.append(f"initial {render_move(m)} labelled {ar.labels[m]}")
    for a, b in ar.enabling:
        if b in ar.initial:
            problems.append(f"initial move {render_move(b)} is enabled")
        if ar.labels[a][0] == ar.labels[b][0]:
            problems.append(f"{render_move(a)} ⊢ {render_move(b)} keeps polarity")
        if ar.labels[b][1] == A and ar.labels[a][1] != Q:
            problems.append(f"answer {render_move(b)} enabled by an answer")
    return problems


__all__ = [
    "Arena", "Prearena", "Move", "O", "P", "Q", "A", "unit_arena", "flat_arena",
    "var_arena", "arrow_arena", "tensor", "named_tensor", "prearena", "denote_type",
    "context_arena", "prearena_of_judgment", "initial_moves", "render_move",
    "to_dot", "to_text", "check_arena",
]
