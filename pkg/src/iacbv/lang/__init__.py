"""Finite automata over pointer-encoded moves."""

from .kernels import BACKEND
from .nfa import (
    EPS, Nfa, any_of, complement, concat, determinize, difference_witness, empty,
    enumerate_up_to, epsilon, equivalent, erase, finite, from_text, intersect,
    is_empty, lit, member, minimal_dfa, minimize, optional, relabel,
    remove_epsilon, rename, shuffle, sigma_star, star, subst, to_dot, to_text,
    trim, union,
)

__all__ = [
    "BACKEND", "EPS", "Nfa", "any_of", "complement", "concat", "determinize",
    "difference_witness", "empty", "enumerate_up_to", "epsilon", "equivalent",
    "erase", "finite", "from_text", "intersect", "is_empty", "lit", "member",
    "minimal_dfa", "minimize", "optional", "relabel", "remove_epsilon", "rename",
    "shuffle", "sigma_star", "star", "subst", "to_dot", "to_text", "trim", "union",
]
