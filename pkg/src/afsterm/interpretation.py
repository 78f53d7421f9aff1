"""Term interpretation into higher-order polynomials.

A term ``t : A1 -> ... -> Am -> b`` in environment ``env`` (length n) is
interpreted as a polynomial over the context ``env + (A1, ..., Am)``: the
first n variables are the environment entries (by De Bruijn index), the
remaining m are the arguments of the functional.

Application is interpreted strictly in both arguments::

    @(f, x) = f(x) + nu(x) + 1

where ``nu(x)`` is ``x`` with all its arguments at the bottom element.
Abstraction is plain functional abstraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .hopoly import (
    ZERO, Abstraction, ContextMismatch, HOPoly, b_add, b_const, b_eval, b_rename, b_subst,
    b_var, body_gt, check_ctx, strongly_monotone, var_arity,
)
from .rewriting import Afs, RewriteRule
from .syntax import Env, Fun, Lam, Signature, SimpleType, Sym, Term, Var, arity_decompose, infer


@dataclass(frozen=True)
class Algebra:
    """Symbol interpretations: ``interps[f]`` is a polynomial over the argument types of ``f``."""

    sig: Signature
    interps: Mapping[str, HOPoly] = field(hash=False)

    def __post_init__(self):
        for f, ty in self.sig.ar.items():
            if f not in self.interps:
                raise ContextMismatch(f"no interpretation for symbol {f}")
            args, _ = arity_decompose(ty)
            if tuple(self.interps[f].ctx) != tuple(args):
                raise ContextMismatch(f"interpretation of {f} has the wrong context")

    def not_strongly_monotone(self) -> list[str]:
        return [
            f for f, p in self.interps.items() if not strongly_monotone(p, range(len(p.ctx)))
        ]

    def __getitem__(self, f: str) -> HOPoly:
        return self.interps[f]


@dataclass(frozen=True)
class OpenInterp:
    env: Env
    type: SimpleType
    poly: HOPoly

    @property
    def nargs(self) -> int:
        return len(self.poly.ctx) - len(self.env)


def _ctx(env: Env, ty: SimpleType) -> tuple:
    args, _ = arity_decompose(ty)
    return tuple(env) + tuple(args)


def _nu_body(ub: tuple, n: int, k: int) -> tuple:
    # arguments of a first-order value are base typed, so bottom is 0
    if k == 0:
        return ub
    return b_subst(ub, list(range(n)) + [ZERO] * k, n)


def _app_body(n: int, fn_ty: Fun, sb: tuple, ub: tuple) -> tuple:
    dom, cod = fn_ty.dom, fn_ty.cod
    k = var_arity(dom)
    m = len(arity_decompose(cod)[0])
    entries: list = list(range(n))
    if k == 0:
        entries.append(ub)
    else:
        ren = list(range(n)) + [n + m + j for j in range(k)]
        entries.append(Abstraction(k, b_rename(ub, ren)))
    entries.extend(n + j for j in range(m))
    applied = b_subst(sb, entries, n + m)
    return b_add(applied, _nu_body(ub, n, k), b_const(1))


def app_interp(f: OpenInterp, x: OpenInterp) -> OpenInterp:
    """``f(x) + nu(x) + 1``, the added part constant in the remaining arguments."""
    if not isinstance(f.type, Fun) or f.type.dom != x.type or tuple(f.env) != tuple(x.env):
        raise ContextMismatch("ill-typed application of interpretations")
    body = _app_body(len(f.env), f.type, f.poly.body, x.poly.body)
    return OpenInterp(f.env, f.type.cod, HOPoly(_ctx(f.env, f.type.cod), body))


def _interp(alg: Algebra, env: tuple, t: Term, cache: dict) -> tuple:
    key = (env, t)
    hit = cache.get(key)
    if hit is not None:
        return hit
    n = len(env)
    if isinstance(t, Sym):
        ty = alg.sig.ar[t.name]
        k = len(arity_decompose(ty)[0])
        res = ty, b_rename(alg.interps[t.name].body, [n + j for j in range(k)])
    elif isinstance(t, Var):
        ty = env[t.index]
        k = var_arity(ty)
        res = ty, b_var(t.index, tuple(b_var(n + j) for j in range(k)))
    elif isinstance(t, Lam):
        var_arity(t.dom)
        bty, bb = _interp(alg, (t.dom,) + env, t.body, cache)
        m = len(arity_decompose(bty)[0])
        ren = [n] + list(range(n)) + [n + 1 + j for j in range(m)]
        res = Fun(t.dom, bty), b_rename(bb, ren)
    else:
        fty, sb = _interp(alg, env, t.fn, cache)
        _, ub = _interp(alg, env, t.arg, cache)
        res = fty.cod, _app_body(n, fty, sb, ub)
    cache[key] = res
    return res


def interp_term(alg: Algebra, env: Env, t: Term, _cache: dict | None = None) -> OpenInterp:
    env = tuple(env)
    ty = infer(alg.sig, env, t)
    ctx = _ctx(env, ty)
    check_ctx(ctx)
    _, body = _interp(alg, env, t, {} if _cache is None else _cache)
    return OpenInterp(env, ty, HOPoly(ctx, body))


def check_rule_oriented(alg: Algebra, rule: RewriteRule) -> bool:
    """True iff the conservative comparison proves ``[[lhs]] > [[rhs]]``; False is inconclusive."""
    cache: dict = {}
    left = interp_term(alg, rule.env, rule.lhs, cache)
    right = interp_term(alg, rule.env, rule.rhs, cache)
    return body_gt(left.poly.body, right.poly.body)


@dataclass(frozen=True)
class Verdict:
    yes: bool
    unoriented: tuple = ()
    not_monotone: tuple = ()

    def __str__(self) -> str:
        if self.yes:
            return "YES"
        reasons = [f"rule {i} not oriented" for i in self.unoriented]
        reasons += [f"symbol {f} not strongly monotone" for f in self.not_monotone]
        return "MAYBE (" + "; ".join(reasons) + ")"


def sn_verdict(afs: Afs, alg: Algebra) -> Verdict:
    bad_syms = tuple(alg.not_strongly_monotone())
    bad_rules = tuple(i for i, r in enumerate(afs.rules) if not check_rule_oriented(alg, r))
    return Verdict(not bad_syms and not bad_rules, bad_rules, bad_syms)


# ---------------------------------------------------------------------------
# Numeric evaluation helpers (used by tests and the search's cheap filter)


def eval_interp(oi: OpenInterp, theta: Sequence, args: Sequence = ()) -> int:
    """Value of an interpretation at an env valuation and, for functional
    types, at the given argument values."""
    vals = list(theta) + list(args)
    if len(vals) != len(oi.poly.ctx):
        raise ContextMismatch(f"valuation has {len(vals)} entries, context has {len(oi.poly.ctx)}")
    return b_eval(oi.poly.body, vals)
