"""Higher-order polynomials over a typed context.

A context is a tuple of types; each entry is either a base type (a
numeric variable ``x<i>``) or a first-order arrow ``b1 -> ... -> bk -> b``
(a function variable ``F<i>`` that only ever occurs fully applied).

Internally a polynomial body is a canonical nested tuple::

    body     = ((monomial, coeff), ...)   sorted by (degree, monomial)
    monomial = (factor, ...)              sorted, repeated for powers
    factor   = (var_index, args)          args == () for base variables,
                                          otherwise a tuple of bodies

All coefficients are positive Python ints, so every polynomial denotes a
weakly monotonic functional.  Canonical bodies are hashable and compare
structurally, which is what ``normalize`` relies on.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Sequence, Union

from .syntax import Base, Fun, SimpleType, arity_decompose


class PolyError(Exception):
    pass


class ContextMismatch(PolyError):
    pass


class UnsupportedOrder(PolyError):
    pass


class MissingVariable(PolyError):
    pass


class PolySyntaxError(PolyError):
    pass


# ---------------------------------------------------------------------------
# Raw bodies


def _mono_key(item):
    return (len(item[0]), item[0])


def _canon(acc: dict) -> tuple:
    return tuple(sorted(((m, c) for m, c in acc.items() if c), key=_mono_key))


ZERO: tuple = ()


def b_const(n: int) -> tuple:
    if n < 0:
        raise PolyError("coefficients are natural numbers")
    return (((), n),) if n else ()


def b_var(i: int, args: tuple = ()) -> tuple:
    return ((((i, tuple(args)),), 1),)


def b_add(*bodies) -> tuple:
    acc: dict = {}
    for b in bodies:
        for m, c in b:
            acc[m] = acc.get(m, 0) + c
    return _canon(acc)


def b_scale(b: tuple, k: int) -> tuple:
    if k == 0:
        return ()
    return tuple((m, c * k) for m, c in b)


def b_mul(a: tuple, b: tuple) -> tuple:
    if not a or not b:
        return ()
    acc: dict = {}
    for m1, c1 in a:
        for m2, c2 in b:
            m = tuple(sorted(m1 + m2)) if m1 and m2 else (m1 or m2)
            acc[m] = acc.get(m, 0) + c1 * c2
    return _canon(acc)


def b_constant_part(b: tuple) -> int:
    return b[0][1] if b and b[0][0] == () else 0


def b_degree(b: tuple) -> int:
    return max((len(m) for m, _ in b), default=0)


def normalize_body(raw) -> tuple:
    """Canonicalize an arbitrary iterable of ``(monomial, coeff)`` pairs.

    Factor arguments are canonicalized recursively, like monomials are
    merged and zero coefficients dropped.  Idempotent on canonical bodies.
    """
    acc: dict = {}
    for m, c in raw:
        if c < 0:
            raise PolyError("negative coefficient")
        m = tuple(sorted((i, tuple(normalize_body(a) for a in args)) for i, args in m))
        acc[m] = acc.get(m, 0) + c
    return _canon(acc)


@dataclass(frozen=True)
class Abstraction:
    """``lambda p_0 ... p_{k-1}. body`` where the parameters are the base
    variables at positions ``n, ..., n+k-1`` of a context of length ``n + k``."""

    arity: int
    body: tuple


# substitution entries: int (rename), body (base variable), Abstraction (function variable)
SubEntry = Union[int, tuple, Abstraction]


def b_rename(body: tuple, ren: Sequence[int]) -> tuple:
    """Rename variables by index; ``ren`` must be injective on used variables."""

    def fac(f):
        i, args = f
        return (ren[i], tuple(b_rename(a, ren) for a in args)) if args else (ren[i], ())

    return _canon({tuple(sorted(fac(f) for f in m)): c for m, c in body})


def b_subst(body: tuple, sub: Sequence[SubEntry], ntarget: int) -> tuple:
    """Simultaneous substitution; the result lives in a context of length ``ntarget``."""
    cache: dict = {}

    def fac(f):
        r = cache.get(f)
        if r is not None:
            return r
        i, args = f
        e = sub[i]
        if isinstance(e, int):
            r = ((((e, tuple(go(a) for a in args)),), 1),)
        elif isinstance(e, Abstraction):
            if len(args) != e.arity:
                raise ContextMismatch(f"function variable {i} applied to {len(args)} arguments, expects {e.arity}")
            inner: list = list(range(ntarget))
            inner.extend(go(a) for a in args)
            r = b_subst(e.body, inner, ntarget)
        else:
            r = e
        cache[f] = r
        return r

    def go(b):
        acc: dict = {}
        for m, c in b:
            prod = (((), c),)
            for f in m:
                prod = b_mul(prod, fac(f))
                if not prod:
                    break
            for pm, pc in prod:
                acc[pm] = acc.get(pm, 0) + pc
        return _canon(acc)

    return go(body)


def b_eval(body: tuple, theta: Sequence) -> int:
    total = 0
    for m, c in body:
        v = c
        for i, args in m:
            if args:
                v *= theta[i](*[b_eval(a, theta) for a in args])
            else:
                v *= theta[i]
            if not v:
                break
        total += v
    return total


def b_vars(body: tuple) -> set[int]:
    out: set[int] = set()
    for m, _ in body:
        for i, args in m:
            out.add(i)
            for a in args:
                out |= b_vars(a)
    return out


# ---------------------------------------------------------------------------
# Conservative comparison


def _augment(j, adj, rem_cap, flow, need):
    """Find an augmenting path from right node ``j`` in the residual graph.

    Returns the path as ``[(right, left), ...]`` alternating hops, or None.
    """
    # BFS over right nodes; from right node r we may go to any left node i in
    # adj[r]; from a saturated left node i we may reroute some right node r'
    # that currently sends flow through i.
    parent = {("R", j): None}
    queue = [("R", j)]
    while queue:
        node = queue.pop(0)
        kind, x = node
        if kind == "R":
            for i in adj[x]:
                nxt = ("L", i)
                if nxt not in parent:
                    parent[nxt] = node
                    if rem_cap[i] > 0:
                        path = []
                        cur = nxt
                        while cur is not None:
                            path.append(cur)
                            cur = parent[cur]
                        return path[::-1]
                    queue.append(nxt)
        else:
            for r, amount in flow[x].items():
                nxt = ("R", r)
                if amount > 0 and nxt not in parent:
                    parent[nxt] = node
                    queue.append(nxt)
    return None


def _transport(caps: list, demands: list, adj: list) -> bool:
    """Can every demand be routed to a covering supplier within its capacity?"""
    if sum(demands) > sum(caps):
        return False
    rem_cap = list(caps)
    flow = [dict() for _ in caps]  # flow[i][j]
    for j, d in enumerate(demands):
        need = d
        while need:
            path = _augment(j, adj, rem_cap, flow, need)
            if path is None:
                return False
            # path = R_j, L_i1, R_r1, L_i2, ..., L_ik
            amount = min(need, rem_cap[path[-1][1]])
            for k in range(2, len(path) - 1, 2):
                amount = min(amount, flow[path[k - 1][1]][path[k][1]])
            for k in range(1, len(path), 2):
                i = path[k][1]
                r = path[k - 1][1]
                flow[i][r] = flow[i].get(r, 0) + amount
                if k + 1 < len(path):
                    r_next = path[k + 1][1]
                    flow[i][r_next] -= amount
            rem_cap[path[-1][1]] -= amount
            need -= amount
    return True


def _factor_ge(f, g) -> bool:
    if f[0] != g[0] or len(f[1]) != len(g[1]):
        return False
    return all(f_a == g_a or body_ge(f_a, g_a) for f_a, g_a in zip(f[1], g[1]))


def _mono_ge(m, n) -> bool:
    # monomials of different degree are incomparable: extra factors may be 0
    if len(m) != len(n):
        return False
    if m == n:
        return True
    if len(m) <= 6:
        return any(all(_factor_ge(a, b) for a, b in zip(perm, n)) for perm in itertools.permutations(m))
    return all(_factor_ge(a, b) for a, b in zip(m, n))


@lru_cache(maxsize=1 << 16)
def _covers(p: tuple, q: tuple) -> bool:
    """Every non-constant monomial of q dominated by monomials of p, with multiplicity."""
    lhs = [(m, c) for m, c in p if m]
    rhs = [(m, c) for m, c in q if m]
    if not rhs:
        return True
    # exact matches first keep the flow problem small
    lhs_caps = {m: c for m, c in lhs}
    residual = []
    for m, c in rhs:
        have = lhs_caps.get(m, 0)
        take = min(have, c)
        if take:
            lhs_caps[m] = have - take
        if c - take:
            residual.append((m, c - take))
    if not residual:
        return True
    suppliers = [(m, c) for m, c in lhs_caps.items() if c]
    adj = [[i for i, (m, _) in enumerate(suppliers) if _mono_ge(m, n)] for n, _ in residual]
    if any(not a for a in adj):
        return False
    return _transport([c for _, c in suppliers], [c for _, c in residual], adj)


def body_ge(p: tuple, q: tuple) -> bool:
    return b_constant_part(p) >= b_constant_part(q) and _covers(p, q)


def body_gt(p: tuple, q: tuple) -> bool:
    return b_constant_part(p) > b_constant_part(q) and _covers(p, q)


# ---------------------------------------------------------------------------
# Contexts


def var_arity(ty: SimpleType) -> int:
    """Number of arguments of a context variable; raises for higher orders."""
    args, _ = arity_decompose(ty)
    if any(isinstance(a, Fun) for a in args):
        raise UnsupportedOrder(f"variables of type {ty} are beyond the supported fragment")
    return len(args)


def check_ctx(ctx: Sequence[SimpleType]) -> None:
    for ty in ctx:
        var_arity(ty)


# ---------------------------------------------------------------------------
# Public polynomial type


@dataclass(frozen=True)
class HOPoly:
    ctx: tuple
    body: tuple = ()

    # constructors -------------------------------------------------------
    @classmethod
    def const(cls, n: int, ctx=()) -> "HOPoly":
        return cls(tuple(ctx), b_const(n))

    @classmethod
    def var(cls, ctx, i: int, *args: "HOPoly") -> "HOPoly":
        ctx = tuple(ctx)
        k = var_arity(ctx[i])
        if len(args) != k:
            raise ContextMismatch(f"variable {i} takes {k} arguments, got {len(args)}")
        for a in args:
            _same_ctx(ctx, a.ctx)
        return cls(ctx, b_var(i, tuple(a.body for a in args)))

    @classmethod
    def from_terms(cls, ctx, raw) -> "HOPoly":
        return cls(tuple(ctx), normalize_body(raw))

    # algebra --------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int):
            other = HOPoly.const(other, self.ctx)
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, int):
            return HOPoly(self.ctx, b_scale(self.body, other))
        return mul(self, other)

    __rmul__ = __mul__

    def normalize(self) -> "HOPoly":
        return HOPoly(self.ctx, normalize_body(self.body))

    # queries --------------------------------------------------------------
    @property
    def constant(self) -> int:
        return b_constant_part(self.body)

    @property
    def degree(self) -> int:
        return b_degree(self.body)

    def coefficients(self) -> list[int]:
        return [c for _, c in self.body]

    def eval(self, theta: Sequence) -> int:
        return eval_poly(self, theta)

    def __str__(self) -> str:
        return format_poly(self)


def _same_ctx(a, b):
    if tuple(a) != tuple(b):
        raise ContextMismatch("polynomials live in different contexts")


def const(n: int, ctx=()) -> HOPoly:
    return HOPoly.const(n, ctx)


def add(p: HOPoly, q: HOPoly) -> HOPoly:
    _same_ctx(p.ctx, q.ctx)
    return HOPoly(p.ctx, b_add(p.body, q.body))


def mul(p: HOPoly, q: HOPoly) -> HOPoly:
    _same_ctx(p.ctx, q.ctx)
    return HOPoly(p.ctx, b_mul(p.body, q.body))


def eval_poly(p: HOPoly, theta: Sequence) -> int:
    """Evaluate under ``theta``: ints for base variables, callables of
    the right arity for function variables."""
    used = b_vars(p.body)
    if used and (len(theta) <= max(used) or any(theta[i] is None for i in used)):
        raise MissingVariable(f"valuation does not cover variables {sorted(used)}")
    return b_eval(p.body, theta)


@dataclass(frozen=True)
class PolyLambda:
    """A polynomial abstracted over parameters, used as the image of a function variable.

    ``poly`` lives in ``outer_ctx + params``; the parameters are base typed.
    """

    poly: HOPoly
    nparams: int


def subst_poly(p: HOPoly, sigma: Mapping[int, Union[HOPoly, PolyLambda]]) -> HOPoly:
    """Replace variables of ``p`` by polynomials over the same context.

    Unmapped variables stay in place.  Function variables must be mapped to
    ``PolyLambda`` values whose parameter count matches their arity.
    """
    n = len(p.ctx)
    entries: list = list(range(n))
    for i, img in sigma.items():
        ty = p.ctx[i]
        if isinstance(ty, Base):
            if not isinstance(img, HOPoly):
                raise ContextMismatch(f"base variable {i} must be mapped to a polynomial")
            _same_ctx(p.ctx, img.ctx)
            entries[i] = img.body
        else:
            k = var_arity(ty)
            if not isinstance(img, PolyLambda) or img.nparams != k:
                raise ContextMismatch(f"function variable {i} must be mapped to a {k}-ary abstraction")
            _same_ctx(tuple(p.ctx) + tuple(img.poly.ctx[n:]), img.poly.ctx)
            entries[i] = Abstraction(k, img.poly.body)
    return HOPoly(p.ctx, b_subst(p.body, entries, n))


def strongly_monotone(p: HOPoly, arg_vars: Sequence[int]) -> bool:
    """Sufficient check: each listed variable occurs alone in a monomial.

    For a base variable the monomial must be exactly ``x_i``; for a
    function variable it must be a single application ``F_i(...)``.
    """
    singles = {m[0][0] for m, c in p.body if len(m) == 1 and c >= 1}
    return all(i in singles for i in arg_vars)


def poly_ge(p: HOPoly, q: HOPoly) -> bool:
    _same_ctx(p.ctx, q.ctx)
    return body_ge(p.body, q.body)


def poly_gt(p: HOPoly, q: HOPoly) -> bool:
    """Conservative strict comparison: True implies p > q under every valuation."""
    _same_ctx(p.ctx, q.ctx)
    return body_gt(p.body, q.body)


# ---------------------------------------------------------------------------
# Text syntax: ``3 + 2*x0 + x1*F0(x1)``


def var_name(ctx, i: int) -> str:
    return f"F{i}" if isinstance(ctx[i], Fun) else f"x{i}"


def format_body(body: tuple, ctx) -> str:
    if not body:
        return "0"
    parts = []
    for m, c in body:
        factors = []
        for i, args in m:
            name = var_name(ctx, i)
            if args:
                name += "(" + ", ".join(format_body(a, ctx) for a in args) + ")"
            factors.append(name)
        if not factors:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(factors))
        else:
            parts.append(f"{c}*" + "*".join(factors))
    return " + ".join(parts)


def format_poly(p: HOPoly) -> str:
    return format_body(p.body, p.ctx)


_TOKEN = re.compile(r"\s*(?:(\d+)|([xF])(\d+)|([-+*^(),]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        if m.group(1) is not None:
            out.append(("int", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            out.append(("var", (m.group(2), int(m.group(3))), m.start(2)))
        else:
            out.append((m.group(4), None, m.start(4)))
        pos = m.end()
    out.append(("eof", None, len(text)))
    return out


def parse_poly(text: str, ctx) -> HOPoly:
    """Parse the textual syntax over ``ctx``; raises PolySyntaxError."""
    ctx = tuple(ctx)
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos][0]

    def take(kind):
        nonlocal pos
        tok = toks[pos]
        if tok[0] != kind:
            raise PolySyntaxError(f"expected {kind!r} at offset {tok[2]}, found {tok[0]!r}")
        pos += 1
        return tok

    def p_sum():
        acc = p_prod()
        while peek() == "+":
            take("+")
            acc = b_add(acc, p_prod())
        return acc

    def p_prod():
        acc = p_pow()
        while peek() == "*":
            take("*")
            acc = b_mul(acc, p_pow())
        return acc

    def p_pow():
        base = p_atom()
        if peek() == "^":
            take("^")
            k = take("int")[1]
            acc = b_const(1)
            for _ in range(k):
                acc = b_mul(acc, base)
            return acc
        return base

    def p_atom():
        kind, val, off = toks[pos]
        if kind == "int":
            take("int")
            return b_const(val)
        if kind == "(":
            take("(")
            b = p_sum()
            take(")")
            return b
        if kind == "var":
            take("var")
            letter, i = val
            if i >= len(ctx):
                raise PolySyntaxError(f"variable {letter}{i} outside a context of length {len(ctx)}")
            is_fun = isinstance(ctx[i], Fun)
            if is_fun != (letter == "F"):
                raise PolySyntaxError(f"variable {letter}{i} has the wrong kind for type {ctx[i]}")
            if not is_fun:
                return b_var(i)
            k = var_arity(ctx[i])
            take("(")
            args = [p_sum()]
            while peek() == ",":
                take(",")
                args.append(p_sum())
            take(")")
            if len(args) != k:
                raise PolySyntaxError(f"F{i} expects {k} arguments, got {len(args)}")
            return b_var(i, tuple(args))
        raise PolySyntaxError(f"unexpected token {kind!r} at offset {off}")

    body = p_sum()
    take("eof")
    return HOPoly(ctx, body)


# ---------------------------------------------------------------------------
# Functionals


def as_callable(value, ty: SimpleType) -> Callable:
    """Adapt a curried semantic value of first-order type to a k-ary int function."""
    k = var_arity(ty)

    def call(*vs):
        v = value
        for a in vs:
            v = v(a)
        return v

    return call if k else value
