import pytest

from afsterm.frontend import load_corpus, parse_afs, parse_term
from afsterm.rewriting import (
    Afs, FuelExhausted, RewriteRule, check_afs, match_lhs, normalize, positions, redexes,
)
from afsterm.substitution import apply_sub
from afsterm.syntax import App, Base, Fun, Lam, Signature, Sym, Var, mk_app

NAT, LIST = Base("nat"), Base("list")
MAP = load_corpus("map")
SIG = MAP.sig
LOOP = load_corpus("loop")


def term(text, names=(), types=()):
    return parse_term(text, SIG, names, types)


def test_match_binds_function_variable():
    lhs = mk_app(Sym("map"), Var(0), Sym("nil"))
    subject = term(r"map (\x:nat. s x) nil")
    gamma = match_lhs(lhs, (Fun(NAT, NAT),), subject, (), SIG)
    assert gamma is not None
    assert gamma.terms == (term(r"\x:nat. s x"),)
    assert apply_sub(gamma, lhs) == subject


def test_match_constructor_clash():
    lhs = mk_app(Sym("map"), Var(0), Sym("nil"))
    subject = term(r"map (\x:nat. s x) (cons 0 nil)")
    assert match_lhs(lhs, (Fun(NAT, NAT),), subject, (), SIG) is None


def test_match_non_linear_requires_equal_images():
    # cons x (cons x q), with q innermost (index 0)
    lhs = mk_app(Sym("cons"), Var(1), mk_app(Sym("cons"), Var(1), Var(0)))
    env = (LIST, NAT)
    same = term("cons 0 (cons 0 nil)")
    diff = term("cons 0 (cons (s 0) nil)")
    assert match_lhs(lhs, env, same, (), SIG) is not None
    assert match_lhs(lhs, env, diff, (), SIG) is None


def test_match_under_binder_refuses_escaping_variable():
    sig = Signature(frozenset({"nat"}), {"0": NAT, "ap": Fun(Fun(NAT, NAT), Fun(NAT, NAT))})
    # ap (\y. z) x  with z a rule variable: z may not mention y
    lhs = mk_app(Sym("ap"), Lam(NAT, Var(2)), Var(0))
    env = (NAT, NAT)
    ok = mk_app(Sym("ap"), Lam(NAT, Sym("0")), Sym("0"))
    bad = mk_app(Sym("ap"), Lam(NAT, Var(0)), Sym("0"))
    assert match_lhs(lhs, env, ok, (), sig).terms == (Sym("0"), Sym("0"))
    assert match_lhs(lhs, env, bad, (), sig) is None


def test_positions_preorder():
    t = term(r"cons ((\x:nat. x) 0) nil")
    paths = [p for p, _, _ in positions(t)]
    assert paths == [(), (0,), (0, 0), (0, 1), (0, 1, 0), (0, 1, 0, 2), (0, 1, 1), (1,)]


def test_redexes_map_cons_root():
    f = r"(\x:nat. s x)"
    t = term(f"map {f} (cons 0 nil)")
    steps = redexes(MAP, t)
    assert len(steps) == 1
    (step,) = steps
    assert step.rule == 1 and step.position == ()
    assert step.result == term(f"cons ({f} 0) (map {f} nil)")


def test_redexes_normal_form_and_beta():
    assert redexes(MAP, term("nil")) == []
    (step,) = redexes(MAP, App(Lam(NAT, Var(0)), Sym("0")))
    assert step.is_beta and step.result == Sym("0")
    assert step.describe() == "beta at []"


def test_redex_order_rules_before_beta_and_outer_first():
    afs = parse_afs(
        "SIG\n 0 : nat\n s : nat -> nat\n f : nat -> nat\nVARS\n x : nat\n"
        "RULES\n f x => x\n f x => s x\n"
    )
    t = parse_term(r"f ((\y:nat. f y) 0)", afs.sig)
    steps = redexes(afs, t)
    kinds = [(s.position, s.rule) for s in steps]
    assert kinds == [((), 0), ((), 1), ((1,), None), ((1, 0, 2), 0), ((1, 0, 2), 1)]


def test_normalize_map():
    nf, trace = normalize(MAP, term(r"map (\x:nat. s x) (cons 0 nil)"), 100)
    assert nf == term("cons (s 0) nil")
    assert [s.rule for s in trace] == [1, None, 0]
    assert normalize(MAP, term("nil"), 10) == (term("nil"), [])


def test_normalize_fuel():
    t = parse_term("f 0", LOOP.sig)
    with pytest.raises(FuelExhausted) as e:
        normalize(LOOP, t, 50)
    assert len(e.value.trace) == 50 and e.value.term == t


def test_check_afs_ok_and_violations():
    assert check_afs(MAP) == []
    assert check_afs(Afs(SIG, ())) == []
    F = Fun(NAT, NAT)
    var_head = RewriteRule((NAT, F), App(Var(1), Var(0)), Var(0), NAT)
    mismatch = RewriteRule((), Sym("0"), Sym("nil"), NAT)
    unbound = RewriteRule((NAT, NAT), App(Sym("s"), Var(0)), Var(1), NAT)
    lam_head = RewriteRule((), App(Lam(NAT, Var(0)), Sym("0")), Sym("0"), NAT)
    ill = RewriteRule((), App(Sym("nil"), Sym("0")), Sym("0"), NAT)
    afs = Afs(SIG, (var_head, mismatch, unbound, lam_head, ill))
    kinds = [(v.kind, v.rule) for v in check_afs(afs)]
    assert kinds == [
        ("VariableHeadedLhs", 0), ("TypeMismatch", 1), ("UnboundRhsVariable", 2),
        ("NonSymbolHeadedLhs", 3), ("IllTyped", 4),
    ]


def test_check_afs_unknown_base_type():
    sig = Signature(frozenset({"nat"}), {"0": NAT, "b": Base("bool")})
    assert [v.kind for v in check_afs(Afs(sig, ()))] == ["UnknownBaseType"]


def test_redex_results_preserve_types():
    from afsterm.syntax import infer

    t = term(r"map (\x:nat. s x) (cons 0 (cons (s 0) nil))")
    seen = 0
    while True:
        steps = redexes(MAP, t)
        if not steps:
            break
        for s in steps:
            assert infer(SIG, (), s.result) == LIST
            seen += 1
        t = steps[0].result
    assert seen >= 5
