"""Extended well-founded sets over the naturals and their function spaces.

Semantic values are plain ints at base types and ``Functional`` objects
(curried, one argument at a time) at arrow types.  Orders on function
spaces are pointwise; since they quantify over all arguments they can
only be checked on a probe set.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .hopoly import HOPoly, b_eval
from .syntax import Base, Fun, SimpleType, arity_decompose


@dataclass(frozen=True)
class Functional:
    type: Fun
    fn: Callable = field(compare=False)
    label: str = field(default="", compare=False)

    def __call__(self, x):
        return self.fn(x)

    def __repr__(self) -> str:
        return f"Functional({self.label or '?'} : {self.type})"


SemValue = Union[int, Functional]


def _curry(ty: SimpleType, k: int, collect: Callable, label: str = "") -> SemValue:
    if k == 0:
        return collect(())

    def build(ty, got):
        if len(got) == k:
            return collect(got)
        return Functional(ty, lambda a: build(ty.cod, got + (a,)), label)

    return build(ty, ())


def functional_from_poly(p: HOPoly, ty: SimpleType, label: str = "") -> SemValue:
    """Curried semantic value of a closed polynomial over the argument types of ``ty``."""
    args, _ = arity_decompose(ty)
    if tuple(args) != tuple(p.ctx):
        raise ValueError("polynomial context does not match the argument types")

    def collect(vals):
        theta = [as_kary(v, a) for v, a in zip(vals, args)]
        return b_eval(p.body, theta)

    return _curry(ty, len(args), collect, label or str(p))


def function_of(ty: SimpleType, f: Callable, label: str = "") -> SemValue:
    """Wrap an uncurried Python function on ints as a semantic value of a first-order type."""
    k = len(arity_decompose(ty)[0])
    return _curry(ty, k, lambda vals: f(*vals), label)


def as_kary(v: SemValue, ty: SimpleType):
    """View a first-order semantic value as an uncurried int function."""
    if isinstance(ty, Base):
        return v

    def call(*xs):
        r = v
        for x in xs:
            r = r(x)
        return r

    return call


def bottom(ty: SimpleType) -> SemValue:
    if isinstance(ty, Base):
        return 0
    cod_bottom = bottom(ty.cod)
    return Functional(ty, lambda _x: cod_bottom, "bottom")


def nu(v: SemValue) -> int:
    """Flatten a value to a natural by feeding bottom to every argument."""
    while isinstance(v, Functional):
        v = v(bottom(v.type.dom))
    return v


# ---------------------------------------------------------------------------
# Orders


@dataclass(frozen=True)
class ExtWfOrders:
    gt: Callable
    ge: Callable
    name: str = ""


NATURALS = ExtWfOrders(operator.gt, operator.ge, "nat")


class PointwiseOrder:
    """Pointwise orders on ``A -> B`` over a finite probe set of ``A`` values.

    Value vectors are memoized per element, so repeated comparisons in the
    axiom checker stay cheap.
    """

    def __init__(self, ty: Fun, probes: Sequence[SemValue], cod_order=None):
        self.type = ty
        self.probes = list(probes)
        self.cod = cod_order or NATURALS
        self._memo: dict = {}
        self.name = f"pointwise[{ty}]"

    def _values(self, f):
        key = id(f)
        hit = self._memo.get(key)
        if hit is None or hit[0] is not f:
            hit = (f, [f(p) for p in self.probes])
            self._memo[key] = hit
        return hit[1]

    def gt(self, f, g) -> bool:
        return all(self.cod.gt(a, b) for a, b in zip(self._values(f), self._values(g)))

    def ge(self, f, g) -> bool:
        return all(self.cod.ge(a, b) for a, b in zip(self._values(f), self._values(g)))


@dataclass
class OrderReport:
    checked: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _bool_compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def check_order_axioms(order, elements: Sequence, chain_bound: int = 10_000) -> OrderReport:
    """Check the compatibility conditions on all pairs/triples of ``elements``.

    Conditions: gt implies ge; gt;ge in gt; ge;gt in gt; ge reflexive and
    transitive.  Well-foundedness is smoke-tested by following gt-descents
    through the sample set; a cycle (or a chain longer than ``chain_bound``)
    is reported.
    """
    n = len(elements)
    gt = np.array([[bool(order.gt(x, y)) for y in elements] for x in elements], dtype=bool).reshape(n, n)
    ge = np.array([[bool(order.ge(x, y)) for y in elements] for x in elements], dtype=bool).reshape(n, n)
    report = OrderReport(checked=n)

    def first(mask, what):
        idx = np.argwhere(mask)
        if len(idx):
            report.violations.append((what, tuple(elements[k] for k in idx[0])))

    first(gt & ~ge, "gt not contained in ge")
    gt_ge = _bool_compose(gt, ge)
    ge_gt = _bool_compose(ge, gt)
    for mask, what in ((gt_ge & ~gt, "gt;ge not contained in gt"), (ge_gt & ~gt, "ge;gt not contained in gt")):
        idx = np.argwhere(mask)
        if len(idx):
            x, z = idx[0]
            y = next(k for k in range(n) if (gt[x, k] and ge[k, z]) or (ge[x, k] and gt[k, z]))
            report.violations.append((what, (elements[x], elements[y], elements[z])))
    irreflexive = np.flatnonzero(~np.diag(ge))
    if len(irreflexive):
        report.violations.append(("ge not reflexive", (elements[irreflexive[0]],)))
    first(_bool_compose(ge, ge) & ~ge, "ge not transitive")
    length = longest_descent(gt, chain_bound)
    if length is None or length > chain_bound:
        report.violations.append(("gt admits an unbounded descending chain", ()))
    return report


def longest_descent(gt: np.ndarray, bound: int):
    """Length of the longest gt-chain in a finite relation, or None if it has a cycle."""
    n = gt.shape[0]
    state = [0] * n  # 0 new, 1 on stack, 2 done
    depth = [0] * n
    for root in range(n):
        if state[root]:
            continue
        stack = [(root, iter(np.flatnonzero(gt[root])))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                state[node] = 2
                depth[node] = 1 + max((depth[k] for k in np.flatnonzero(gt[node])), default=0)
                continue
            if state[nxt] == 1:
                return None
            if state[nxt] == 0:
                state[nxt] = 1
                stack.append((nxt, iter(np.flatnonzero(gt[nxt]))))
    best = max(depth, default=0)
    return best if best <= bound else bound + 1
