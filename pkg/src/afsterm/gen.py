"""Random and exhaustive generation of well-typed terms."""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Collection, Optional, Sequence

from .syntax import App, Base, Env, Fun, Lam, Signature, SimpleType, Sym, Term, Var, arity_decompose


def _heads(sig: Signature, env: Env, ty: SimpleType):
    """Heads (symbol or variable) together with the argument types needed to reach ``ty``."""
    out = []
    for f, fty in sig.ar.items():
        args = _args_to(fty, ty)
        if args is not None:
            out.append((Sym(f), args))
    for i, vty in enumerate(env):
        args = _args_to(vty, ty)
        if args is not None:
            out.append((Var(i), args))
    return out


def _args_to(head_ty: SimpleType, target: SimpleType) -> Optional[list]:
    args = []
    while True:
        if head_ty == target:
            return args
        if not isinstance(head_ty, Fun):
            return None
        args.append(head_ty.dom)
        head_ty = head_ty.cod


def _spine_min(args) -> int:
    # one node for the spine, one for the head, at least one per argument
    return 2 + len(args) if args else 1


def _split(rng: random.Random, total: int, parts: int) -> list[int]:
    """Random composition of ``total`` into ``parts`` positive sizes."""
    if parts == 0:
        return []
    cuts = sorted(rng.sample(range(1, total), parts - 1)) if parts > 1 else []
    bounds = [0] + cuts + [total]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


def random_term(
    rng: random.Random,
    sig: Signature,
    env: Env,
    ty: SimpleType,
    size: int,
    beta_types: Sequence[SimpleType] = (),
    tries: int = 20,
    prefer: Collection[str] = (),
) -> Optional[Term]:
    """A random well-typed term of type ``ty`` with ``term_size`` at most ``size``.

    ``beta_types`` lists the binder types allowed for generated beta-redexes
    (none are generated when empty).  Symbols in ``prefer`` are picked as
    heads four times as often as others.  Returns None if nothing was found.
    """
    env = tuple(env)
    gen = _Gen(rng, sig, tuple(beta_types), frozenset(prefer))
    for _ in range(tries):
        t = gen(env, ty, size)
        if t is not None:
            return t
    return None


class _Gen:
    def __init__(self, rng, sig, beta_types, prefer):
        self.rng, self.sig, self.beta_types, self.prefer = rng, sig, beta_types, prefer

    def __call__(self, env, ty, size):
        return _gen(self, env, ty, size)

    def pick_head(self, heads):
        weights = [4 if isinstance(h, Sym) and h.name in self.prefer else 1 for h, _ in heads]
        return self.rng.choices(heads, weights)[0]


def _gen(g: _Gen, env, ty, size) -> Optional[Term]:
    rng, sig, beta_types = g.rng, g.sig, g.beta_types
    if size <= 0:
        return None
    options = []
    if isinstance(ty, Fun) and size >= 2:
        options.append("lam")
    heads = [(h, a) for h, a in _heads(sig, env, ty) if _spine_min(a) <= size]
    if heads:
        options.extend(["head"] * 3)
    if beta_types and size >= 4:
        options.append("beta")
    rng.shuffle(options)
    for opt in options:
        if opt == "lam":
            body = _gen(g, (ty.dom,) + env, ty.cod, rng.randint(1, size - 1))
            if body is not None:
                return Lam(ty.dom, body)
        elif opt == "head":
            head, args = g.pick_head(heads)
            budget = size if rng.random() < 0.5 else rng.randint(_spine_min(args), size)
            sizes = _split(rng, budget - 2, len(args)) if args else []
            built = []
            for a_ty, a_size in zip(args, sizes):
                a = _gen(g, env, a_ty, a_size)
                if a is None:
                    break
                built.append(a)
            else:
                t = head
                for a in built:
                    t = App(t, a)
                return t
        else:
            b_ty = rng.choice(beta_types)
            body_size, arg_size = _split(rng, rng.randint(4, size) - 2, 2)
            body = _gen(g, (b_ty,) + env, ty, body_size)
            arg = _gen(g, env, b_ty, arg_size)
            if body is not None and arg is not None:
                return App(Lam(b_ty, body), arg)
    return None


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_terms(sig: Signature, env: Env, ty: SimpleType, size: int, arg_types: Sequence[SimpleType]) -> list[Term]:
    """All terms of type ``ty`` whose ``term_size`` is exactly ``size``.

    Lambda-headed spines (beta-redexes) take their argument types from
    ``arg_types``, which must be finite; symbol- and variable-headed spines
    are enumerated completely.
    """
    universe = tuple(arg_types)

    @lru_cache(maxsize=None)
    def go(env: tuple, ty, n: int) -> tuple:
        out = []
        if n == 1:
            out.extend(Sym(f) for f, fty in sig.ar.items() if fty == ty)
            out.extend(Var(i) for i, vty in enumerate(env) if vty == ty)
            return tuple(out)
        if isinstance(ty, Fun):
            out.extend(Lam(ty.dom, b) for b in go((ty.dom,) + env, ty.cod, n - 1))
        heads = [(h, args) for h, args in _heads(sig, env, ty) if args]
        for head, args in heads:
            out.extend(spines((head,), args, n - 2, env))
        # lambda-headed spines with j arguments drawn from the universe
        for j in range(1, n - 1):
            for arg_tys in itertools.product(universe, repeat=j):
                head_ty = ty
                for a in reversed(arg_tys):
                    head_ty = Fun(a, head_ty)
                for hs in range(2, n - j):
                    lams = tuple(h for h in go(env, head_ty, hs) if isinstance(h, Lam))
                    if lams:
                        out.extend(spines(lams, list(arg_tys), n - 1 - hs, env))
        return tuple(out)

    def spines(heads, arg_tys, budget, env):
        for sizes in _compositions(budget, len(arg_tys)):
            choices = [go(env, a, k) for a, k in zip(arg_tys, sizes)]
            if all(choices):
                for head in heads:
                    for args in itertools.product(*choices):
                        t = head
                        for a in args:
                            t = App(t, a)
                        yield t

    return list(go(tuple(env), ty, size))


def random_first_order_type(rng: random.Random, bases: Sequence[str], max_args: int = 2) -> SimpleType:
    """A base type or an arrow whose arguments are all base types."""
    k = rng.randint(0, max_args)
    ty: SimpleType = Base(rng.choice(bases))
    for _ in range(k):
        ty = Fun(Base(rng.choice(bases)), ty)
    return ty


def inhabited_types(sig: Signature) -> list[SimpleType]:
    seen = []
    for fty in sig.ar.values():
        args, head = arity_decompose(fty)
        for t in [fty, Base(head)] + args:
            if t not in seen:
                seen.append(t)
    return seen
