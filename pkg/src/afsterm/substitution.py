"""Simultaneous substitutions and De Bruijn shifting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .syntax import (
    App, Env, Lam, Signature, Term, TypedTerm, Var, free_indices, infer,
)


class EnvMismatch(Exception):
    pass


@dataclass(frozen=True)
class Substitution:
    """Total map from the source environment to terms over the target environment.

    ``terms[i]`` is the image of ``Var(i)`` and must have type ``source[i]`` in ``target``.
    """

    source: Env
    target: Env
    terms: tuple

    def __post_init__(self):
        if len(self.terms) != len(self.source):
            raise EnvMismatch(
                f"substitution assigns {len(self.terms)} terms to an environment of length {len(self.source)}"
            )

    def check(self, sig: Signature) -> bool:
        """Type preservation, checked with ``infer``."""
        return all(
            infer(sig, self.target, u) == ty for u, ty in zip(self.terms, self.source)
        )

    def __getitem__(self, i: int) -> Term:
        return self.terms[i]


def id_sub(env: Env) -> Substitution:
    env = tuple(env)
    return Substitution(env, env, tuple(Var(i) for i in range(len(env))))


def lift_term(t: Term, k: int = 1, cutoff: int = 0) -> Term:
    if k == 0:
        return t
    if isinstance(t, Var):
        return Var(t.index + k) if t.index >= cutoff else t
    if isinstance(t, App):
        return App(lift_term(t.fn, k, cutoff), lift_term(t.arg, k, cutoff))
    if isinstance(t, Lam):
        return Lam(t.dom, lift_term(t.body, k, cutoff + 1))
    return t


def lower_term(t: Term, k: int, cutoff: int = 0) -> Optional[Term]:
    """Inverse of ``lift_term``: remove ``k`` unused entries at ``cutoff``.

    Returns None when ``t`` mentions one of the removed indices.
    """
    if k == 0:
        return t
    if isinstance(t, Var):
        if t.index < cutoff:
            return t
        if t.index < cutoff + k:
            return None
        return Var(t.index - k)
    if isinstance(t, App):
        fn = lower_term(t.fn, k, cutoff)
        if fn is None:
            return None
        arg = lower_term(t.arg, k, cutoff)
        return None if arg is None else App(fn, arg)
    if isinstance(t, Lam):
        body = lower_term(t.body, k, cutoff + 1)
        return None if body is None else Lam(t.dom, body)
    return t


def _apply(terms: tuple, t: Term, depth: int) -> Term:
    if isinstance(t, Var):
        if t.index < depth:
            return t
        return lift_term(terms[t.index - depth], depth)
    if isinstance(t, App):
        return App(_apply(terms, t.fn, depth), _apply(terms, t.arg, depth))
    if isinstance(t, Lam):
        return Lam(t.dom, _apply(terms, t.body, depth + 1))
    return t


def apply_sub(sub: Substitution, t):
    """Capture-avoiding simultaneous substitution.

    Accepts a bare term (whose free indices must lie in the source env) or a
    ``TypedTerm`` (whose env must equal the source env); the latter is
    returned retyped over the target env.
    """
    if isinstance(t, TypedTerm):
        if tuple(t.env) != tuple(sub.source):
            raise EnvMismatch("term environment differs from the substitution's source")
        return TypedTerm(sub.target, _apply(sub.terms, t.term, 0), t.type)
    free = free_indices(t)
    if free and max(free) >= len(sub.source):
        raise EnvMismatch(f"free index {max(free)} outside the substitution's source")
    return _apply(sub.terms, t, 0)


def compose(delta: Substitution, gamma: Substitution) -> Substitution:
    """``delta . gamma``: first gamma, then delta."""
    if tuple(gamma.target) != tuple(delta.source):
        raise EnvMismatch("cannot compose: gamma's target is not delta's source")
    return Substitution(gamma.source, delta.target, tuple(_apply(delta.terms, u, 0) for u in gamma.terms))


def _beta(t: Term, arg: Term, depth: int) -> Term:
    if isinstance(t, Var):
        if t.index < depth:
            return t
        if t.index == depth:
            return lift_term(arg, depth)
        return Var(t.index - 1)
    if isinstance(t, App):
        return App(_beta(t.fn, arg, depth), _beta(t.arg, arg, depth))
    if isinstance(t, Lam):
        return Lam(t.dom, _beta(t.body, arg, depth + 1))
    return t


def beta_subst(body: Term, arg: Term) -> Term:
    """``body[0 := arg]`` with the remaining indices shifted down by one."""
    return _beta(body, arg, 0)


def beta_substitution(env: Env, dom, arg: Term) -> Substitution:
    """The substitution ``(0 -> arg, i+1 -> Var i)`` from ``dom ,, env`` to ``env``."""
    env = tuple(env)
    return Substitution((dom,) + env, env, (arg,) + tuple(Var(i) for i in range(len(env))))


__all__ = [
    "Substitution", "EnvMismatch", "id_sub", "lift_term", "lower_term", "apply_sub",
    "compose", "beta_subst", "beta_substitution",
]
