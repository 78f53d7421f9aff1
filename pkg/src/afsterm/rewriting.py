"""Rewrite rules, AFS container, matching, one-step reducts and normalization.

Enumeration order of one-step reducts is fixed: positions in pre-order
(which is lexicographic on paths, function child before argument child),
and at each position the rules in declaration order followed by beta.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .substitution import Substitution, apply_sub, beta_subst, lower_term
from .syntax import (
    ARG, BODY, FN, App, Env, Lam, Signature, SimpleType, Sym, Term, TypingError, Var,
    app_spine, base_names, free_indices, infer, replace_at,
)


@dataclass(frozen=True)
class RewriteRule:
    env: Env
    lhs: Term
    rhs: Term
    type: SimpleType
    # surface names of the env entries, only used for printing
    names: tuple = field(default=(), compare=False)


@dataclass(frozen=True)
class Afs:
    sig: Signature
    rules: tuple

    @property
    def symbols(self) -> list[str]:
        return self.sig.symbols


@dataclass(frozen=True)
class RewriteStep:
    position: tuple
    rule: Optional[int]  # None for a beta step
    sub: Optional[Substitution]
    result: Term

    @property
    def is_beta(self) -> bool:
        return self.rule is None

    def describe(self) -> str:
        kind = "beta" if self.rule is None else f"rule {self.rule}"
        return f"{kind} at {list(self.position)}"


class FuelExhausted(Exception):
    def __init__(self, trace: list, term: Term):
        super().__init__(f"fuel exhausted after {len(trace)} steps")
        self.trace = trace
        self.term = term


# ---------------------------------------------------------------------------
# Matching


def _match(p: Term, s: Term, depth: int, binding: list) -> bool:
    if isinstance(p, Var):
        if p.index < depth:
            return s == p
        u = lower_term(s, depth)
        if u is None:
            # the image would mention a variable bound inside the pattern
            return False
        i = p.index - depth
        if binding[i] is None:
            binding[i] = u
            return True
        return binding[i] == u
    if isinstance(p, Sym):
        return s == p
    if isinstance(p, App):
        return isinstance(s, App) and _match(p.fn, s.fn, depth, binding) and _match(p.arg, s.arg, depth, binding)
    return (
        isinstance(s, Lam) and p.dom == s.dom and _match(p.body, s.body, depth + 1, binding)
    )


def match_lhs(
    lhs: Term, rule_env: Env, subject: Term, subject_env: Env, sig: Signature | None = None
) -> Optional[Substitution]:
    """Syntactic matching; returns ``gamma`` with ``apply_sub(gamma, lhs) == subject`` or None.

    When ``sig`` is given, bindings are also checked against the declared
    types of the rule variables.
    """
    binding = [None] * len(rule_env)
    if not _match(lhs, subject, 0, binding):
        return None
    if any(b is None for b in binding):
        return None
    if sig is not None:
        try:
            if any(infer(sig, subject_env, u) != ty for u, ty in zip(binding, rule_env)):
                return None
        except TypingError:
            return None
    return Substitution(tuple(rule_env), tuple(subject_env), tuple(binding))


# ---------------------------------------------------------------------------
# Redexes


def positions(t: Term, env: Env = ()) -> Iterator[tuple[tuple, Term, Env]]:
    """Pre-order traversal yielding ``(path, subterm, env at subterm)``."""
    stack = [((), t, tuple(env))]
    while stack:
        path, s, senv = stack.pop()
        yield path, s, senv
        if isinstance(s, App):
            stack.append((path + (ARG,), s.arg, senv))
            stack.append((path + (FN,), s.fn, senv))
        elif isinstance(s, Lam):
            stack.append((path + (BODY,), s.body, (s.dom,) + senv))


def _rule_key(rule: RewriteRule):
    head, args = app_spine(rule.lhs)
    return head, len(args)


def _steps_at(afs: Afs, t: Term, path: tuple, s: Term, senv: Env) -> Iterator[RewriteStep]:
    head, args = app_spine(s)
    for ri, rule in enumerate(afs.rules):
        rhead, rn = _rule_key(rule)
        if rhead != head or rn != len(args):
            continue
        gamma = match_lhs(rule.lhs, rule.env, s, senv, afs.sig)
        if gamma is not None:
            yield RewriteStep(path, ri, gamma, replace_at(t, path, apply_sub(gamma, rule.rhs)))
    if isinstance(s, App) and isinstance(s.fn, Lam):
        yield RewriteStep(path, None, None, replace_at(t, path, beta_subst(s.fn.body, s.arg)))


def iter_redexes(afs: Afs, t: Term, env: Env = ()) -> Iterator[RewriteStep]:
    for path, s, senv in positions(t, env):
        yield from _steps_at(afs, t, path, s, senv)


def redexes(afs: Afs, t: Term, env: Env = ()) -> list[RewriteStep]:
    """All one-step reducts of ``t``, in the documented enumeration order."""
    return list(iter_redexes(afs, t, env))


def normalize(afs: Afs, t: Term, fuel: int = 10_000, env: Env = ()) -> tuple[Term, list[RewriteStep]]:
    """Leftmost-outermost normalization; raises FuelExhausted with the partial trace."""
    trace: list[RewriteStep] = []
    while True:
        step = next(iter_redexes(afs, t, env), None)
        if step is None:
            return t, trace
        if len(trace) >= fuel:
            raise FuelExhausted(trace, t)
        trace.append(step)
        t = step.result


# ---------------------------------------------------------------------------
# Well-formedness


@dataclass(frozen=True)
class Violation:
    kind: str
    rule: Optional[int]
    message: str

    def __str__(self) -> str:
        where = f"rule {self.rule}: " if self.rule is not None else ""
        return f"{self.kind}: {where}{self.message}"


def check_afs(afs: Afs) -> list[Violation]:
    """Return the list of well-formedness violations (empty means ok)."""
    out: list[Violation] = []
    sig = afs.sig
    for f, ty in sig.ar.items():
        missing = base_names(ty) - set(sig.base_types)
        if missing:
            out.append(Violation("UnknownBaseType", None, f"symbol {f} uses {sorted(missing)}"))
    for i, rule in enumerate(afs.rules):
        for ty in rule.env:
            missing = base_names(ty) - set(sig.base_types)
            if missing:
                out.append(Violation("UnknownBaseType", i, f"rule variable uses {sorted(missing)}"))
        head, _ = app_spine(rule.lhs)
        if isinstance(head, Var):
            out.append(Violation("VariableHeadedLhs", i, "left-hand side is headed by a variable"))
            continue
        if not isinstance(head, Sym):
            out.append(Violation("NonSymbolHeadedLhs", i, "left-hand side must be headed by a function symbol"))
            continue
        try:
            lt = infer(sig, rule.env, rule.lhs)
            rt = infer(sig, rule.env, rule.rhs)
        except TypingError as e:
            out.append(Violation("IllTyped", i, str(e)))
            continue
        if lt != rt:
            out.append(Violation("TypeMismatch", i, f"left-hand side has type {lt}, right-hand side {rt}"))
        elif lt != rule.type:
            out.append(Violation("TypeMismatch", i, f"declared type {rule.type} but sides have {lt}"))
        unmatched = set(range(len(rule.env))) - free_indices(rule.lhs)
        if unmatched & free_indices(rule.rhs):
            out.append(Violation("UnboundRhsVariable", i, "right-hand side variable not bound by the left-hand side"))
        elif unmatched:
            out.append(Violation("UnusedRuleVariable", i, "rule environment declares a variable the rule never uses"))
    return out
