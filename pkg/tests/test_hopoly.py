import random

import pytest
from hypothesis import given, settings, strategies as st

from afsterm.hopoly import (
    HOPoly, MissingVariable, PolyLambda, PolySyntaxError, UnsupportedOrder, add, check_ctx, const,
    eval_poly, format_poly, mul, parse_poly, poly_ge, poly_gt, strongly_monotone, subst_poly,
)
from afsterm.syntax import Base, Fun

from _support import monotone_fn, valuation

NAT, LIST = Base("nat"), Base("list")
F1 = Fun(NAT, NAT)


def P(text, ctx):
    return parse_poly(text, ctx)


def test_eval_examples():
    assert eval_poly(P("2*x0 + 1", [NAT]), [3]) == 7
    assert eval_poly(P("F0(x1) + x1", [F1, NAT]), [lambda v: v + 1, 2]) == 5
    assert eval_poly(P("x1*F0(x1) + 1", [F1, LIST]), [lambda v: 2 * v, 3]) == 19


def test_eval_missing_variable():
    with pytest.raises(MissingVariable):
        eval_poly(P("x0 + x1", [NAT, NAT]), [1])


def test_arithmetic():
    x = HOPoly.var([NAT], 0)
    assert add(x, x) == 2 * x == P("2*x0", [NAT])
    assert mul(x + 1, x) == P("x0*x0 + x0", [NAT])
    fx = HOPoly.var([F1, NAT], 0, HOPoly.var([F1, NAT], 1))
    assert mul(fx, const(0, [F1, NAT])) == const(0, [F1, NAT])


def test_substitution_examples():
    ctx = [NAT, NAT]
    got = subst_poly(P("2*x0", ctx), {0: P("x1 + 1", ctx)})
    assert got == P("2*x1 + 2", ctx)
    ctx = [F1, NAT]
    inc = PolyLambda(P("x2 + 1", ctx + [NAT]), 1)
    assert subst_poly(P("F0(x1) + x1", ctx), {0: inc}) == P("2*x1 + 1", ctx)
    sq = PolyLambda(P("x2*x2", ctx + [NAT]), 1)
    got = subst_poly(P("F0(x1 + 1)", ctx), {0: sq})
    assert got == P("x1^2 + 2*x1 + 1", ctx)
    for v in range(6):
        assert got.eval([None, v]) == (v + 1) ** 2


def test_strong_monotonicity_criterion():
    ctx = [NAT, LIST]
    assert strongly_monotone(P("x0 + x1 + 1", ctx), [0, 1])
    assert not strongly_monotone(P("x0*x1", ctx), [0])
    ctx = [F1, LIST]
    p = P("F0(x1) + x1", ctx)
    assert strongly_monotone(p, [1])
    # a lone application of F counts as a strict occurrence of F: if F > G
    # pointwise then F(e) > G(e) for every argument e
    assert strongly_monotone(p, [0])
    rng = random.Random(0)
    for _ in range(200):
        g = monotone_fn(rng, 1)
        q = rng.randint(0, 20)
        assert p.eval([lambda v: g(v) + 1, q]) > p.eval([g, q])


def test_comparison_examples():
    ctx = [NAT]
    assert poly_gt(P("x0 + 1", ctx), P("x0", ctx))
    assert not poly_gt(P("x0", ctx), P("x0", ctx))
    assert poly_ge(P("x0", ctx), P("x0", ctx))
    ctx = [F1, NAT]
    lhs, rhs = P("F0(x1) + x1 + 1", ctx), P("F0(x1)", ctx)
    assert poly_gt(lhs, rhs)
    rng = random.Random(1)
    for _ in range(200):
        theta = valuation(rng, ctx)
        assert lhs.eval(theta) > rhs.eval(theta)


def test_comparison_uses_argument_dominance():
    ctx = [F1, NAT]
    assert poly_gt(P("1 + F0(2*x1 + 1)", ctx), P("F0(x1)", ctx))
    assert not poly_ge(P("F0(x1)", ctx), P("F0(x1 + 1)", ctx))
    # x*x and x are incomparable at x = 0 vs the conservative rule: degrees differ
    assert not poly_ge(P("x1*x1", ctx), P("x1", ctx))


def test_format_and_parse_roundtrip():
    ctx = [F1, NAT]
    p = P("3 + 2*x1 + x1*F0(x1 + 1) + F0(2*x1)", ctx)
    assert format_poly(p) == "3 + F0(2*x1) + 2*x1 + F0(1 + x1)*x1"
    assert P(format_poly(p), ctx) == p
    assert format_poly(const(0)) == "0"


@pytest.mark.parametrize("text", ["x0 +", "F0", "x5", "F1(x0)", "x0(", "2**x0", "y0", "F0(x1, x1)"])
def test_parse_errors(text):
    with pytest.raises(PolySyntaxError):
        parse_poly(text, [F1, NAT])


def test_higher_order_context_rejected():
    with pytest.raises(UnsupportedOrder):
        check_ctx([Fun(F1, NAT)])


# -- property: the conservative comparison is sound --------------------------

CTX = (F1, NAT, NAT)


def _rand_body(rng, depth=0):
    terms = [str(rng.randint(0, 3))]
    for _ in range(rng.randint(0, 3)):
        kind = rng.randrange(3 if depth == 0 else 2)
        c = rng.randint(1, 3)
        if kind == 0:
            terms.append(f"{c}*x{rng.choice([1, 2])}")
        elif kind == 1:
            terms.append(f"{c}*x1*x2" if rng.random() < 0.5 else f"{c}*x{rng.choice([1, 2])}^2")
        else:
            terms.append(f"{c}*F0({_rand_body(rng, 1)})")
    return " + ".join(terms)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_poly_gt_is_sound(seed):
    rng = random.Random(seed)
    p, q = P(_rand_body(rng), CTX), P(_rand_body(rng), CTX)
    if rng.random() < 0.5:
        p = p + q + rng.randint(0, 2)  # make comparable pairs common
    gt, ge = poly_gt(p, q), poly_ge(p, q)
    assert not gt or ge
    for _ in range(30 if ge else 0):
        theta = valuation(rng, CTX)
        a, b = p.eval(theta), q.eval(theta)
        assert a >= b
        assert not gt or a > b


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_canonical_form_is_unique(seed):
    rng = random.Random(seed)
    p = P(_rand_body(rng), CTX)
    assert p.normalize() == p
    assert P(format_poly(p), CTX) == p
    assert add(p, p) == mul(p, const(2, CTX))
