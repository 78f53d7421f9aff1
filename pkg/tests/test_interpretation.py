import random

import pytest

from afsterm.certificate import algebra_of
from afsterm.frontend import load_corpus, parse_afs, parse_term
from afsterm.hopoly import ContextMismatch, HOPoly, parse_poly
from afsterm.interpretation import (
    Algebra, OpenInterp, app_interp, check_rule_oriented, eval_interp, interp_term, sn_verdict,
)
from afsterm.rewriting import Afs
from afsterm.search import find_interpretation
from afsterm.syntax import App, Base, Fun, Lam, Sym, Var

from _support import decrease_counterexample, random_algebra

NAT, LIST = Base("nat"), Base("list")
MAP = load_corpus("map")


def closed(text_poly, ty, ctx):
    return OpenInterp((), ty, parse_poly(text_poly, ctx))


def test_application_adds_flattened_argument_and_one():
    f = closed("x0 + 1", Fun(NAT, NAT), [NAT])
    assert eval_interp(app_interp(f, closed("2", NAT, [])), []) == 6
    zero_fn = closed("0", Fun(NAT, NAT), [NAT])
    assert eval_interp(app_interp(zero_fn, closed("0", NAT, [])), []) == 1


def test_application_is_strict_in_argument():
    ident = closed("x0", Fun(NAT, NAT), [NAT])
    big = app_interp(ident, closed("3", NAT, []))
    small = app_interp(ident, closed("2", NAT, []))
    assert (eval_interp(big, []), eval_interp(small, [])) == (7, 5)


def test_application_type_errors():
    f = closed("x0", Fun(NAT, NAT), [NAT])
    with pytest.raises(ContextMismatch):
        app_interp(f, closed("0", LIST, []))


def _alg(afs, **polys):
    interps = {}
    for f, ty in afs.sig.ar.items():
        ctx = []
        t = ty
        while isinstance(t, Fun):
            ctx.append(t.dom)
            t = t.cod
        interps[f] = parse_poly(polys.get(f, "0"), ctx)
    return Algebra(afs.sig, interps)


def test_interp_cons():
    alg = _alg(MAP, cons="x0 + x1 + 1", s="x0", map="x1 + F0(x1)")
    assert eval_interp(interp_term(alg, (), Sym("nil")), []) == 0
    t = parse_term("cons 0 nil", MAP.sig)
    assert eval_interp(interp_term(alg, (), t), []) == 3


def test_beta_pair_decreases():
    alg = _alg(MAP, cons="x0 + x1", s="x0", map="x1 + F0(x1)")
    redex = App(Lam(NAT, Var(0)), Sym("0"))
    assert eval_interp(interp_term(alg, (), redex), []) == 1
    assert eval_interp(interp_term(alg, (), Sym("0")), []) == 0


def test_open_term_interpretation_has_env_and_argument_variables():
    alg = _alg(MAP, cons="x0 + x1", s="x0", map="x1 + F0(x1)")
    oi = interp_term(alg, (NAT,), App(Sym("cons"), Var(0)))
    assert oi.poly.ctx == (NAT, LIST) and oi.nargs == 1
    # cons x = (x + q) + x + 1 as a function of q
    assert str(oi.poly) == "1 + 2*x0 + x1"


def test_rule_orientation_examples():
    afs = parse_afs("SIG\n 0 : nat\n f : nat -> nat\nVARS\n x : nat\nRULES\n f x => x\n")
    alg = _alg(afs, f="x0 + 1")
    lhs = interp_term(alg, afs.rules[0].env, afs.rules[0].lhs)
    assert str(lhs.poly) == "2 + 2*x0"
    assert check_rule_oriented(alg, afs.rules[0])
    loop = load_corpus("loop")
    for j in ["x0", "x0 + 1", "3 + 2*x0 + x0*x0"]:
        alg = _alg(loop, f=j)
        assert not check_rule_oriented(alg, loop.rules[0])
        assert str(sn_verdict(loop, alg)) == "MAYBE (rule 0 not oriented)"


def test_verdicts():
    cert = find_interpretation(MAP)
    assert sn_verdict(MAP, algebra_of(MAP, cert)).yes
    empty = Afs(MAP.sig, ())
    assert str(sn_verdict(empty, _alg(MAP, cons="x0 + x1", s="x0", map="x1 + F0(x1)"))) == "YES"
    weak = _alg(MAP, cons="x0", s="x0", map="x1 + F0(x1)")
    v = sn_verdict(empty, weak)
    assert not v.yes and v.not_monotone == ("cons",)


def test_algebra_requires_matching_contexts():
    with pytest.raises(ContextMismatch):
        Algebra(MAP.sig, {"0": HOPoly.const(0)})
    interps = {f: HOPoly.const(0, ()) for f in MAP.sig.ar}
    with pytest.raises(ContextMismatch):
        Algebra(MAP.sig, interps)


def test_random_algebras_decrease_on_beta_steps():
    rng = random.Random(7)
    afs = Afs(load_corpus("combinators").sig, ())  # no rules: only beta steps exist
    checked = 0
    for _ in range(20):
        alg = random_algebra(rng, afs.sig)
        for _ in range(10):
            env, s, t = _beta_step(afs, rng)
            assert decrease_counterexample(alg, env, s, t, rng, 10) is None
            checked += 1
    assert checked == 200


def _beta_step(afs, rng):
    from afsterm.gen import random_term
    from afsterm.rewriting import redexes

    while True:
        t = random_term(rng, afs.sig, (), NAT, 10, [NAT])
        steps = [s for s in redexes(afs, t)] if t is not None else []
        if steps:
            return (), t, rng.choice(steps).result


def test_decrease_checker_catches_unoriented_rules():
    # cons interpreted too cheaply: map's cons rule is not decreasing
    alg = _alg(MAP, cons="x0 + x1", s="x0", map="x1 + F0(x1)")
    rule = MAP.rules[1]
    rng = random.Random(3)
    assert decrease_counterexample(alg, rule.env, rule.lhs, rule.rhs, rng) is not None
