"""Simple types, nameless terms and the syntax-directed typechecker.

Variables are De Bruijn indices into a variable environment, which is a
tuple of types whose position 0 is the most recently bound variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Fun:
    dom: "SimpleType"
    cod: "SimpleType"

    def __str__(self) -> str:
        dom = f"({self.dom})" if isinstance(self.dom, Fun) else str(self.dom)
        return f"{dom} -> {self.cod}"


SimpleType = Union[Base, Fun]
Env = tuple  # tuple[SimpleType, ...], index 0 = innermost binder


def arrow(*types: SimpleType) -> SimpleType:
    """Right-associated arrow: ``arrow(a, b, c)`` is ``a -> (b -> c)``."""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Fun(t, result)
    return result


def arity_decompose(ty: SimpleType) -> tuple[list[SimpleType], str]:
    args = []
    while isinstance(ty, Fun):
        args.append(ty.dom)
        ty = ty.cod
    return args, ty.name


def type_order(ty: SimpleType) -> int:
    if isinstance(ty, Base):
        return 0
    return max(type_order(ty.dom) + 1, type_order(ty.cod))


def base_names(ty: SimpleType) -> set[str]:
    if isinstance(ty, Base):
        return {ty.name}
    return base_names(ty.dom) | base_names(ty.cod)


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Lam:
    dom: SimpleType
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


Term = Union[Sym, Var, Lam, App]


def mk_app(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def app_spine(t: Term) -> tuple[Term, list[Term]]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def term_eq(s: Term, t: Term) -> bool:
    # alpha-equivalence is structural equality on nameless terms
    return s == t


def term_size(t: Term) -> int:
    """Constructor count where an application spine ``h a1 .. an`` is one node."""
    if isinstance(t, App):
        head, args = app_spine(t)
        return 1 + term_size(head) + sum(term_size(a) for a in args)
    if isinstance(t, Lam):
        return 1 + term_size(t.body)
    return 1


def free_indices(t: Term, depth: int = 0) -> set[int]:
    """Free De Bruijn indices of ``t``, relative to the outside of ``depth`` binders."""
    if isinstance(t, Var):
        return {t.index - depth} if t.index >= depth else set()
    if isinstance(t, App):
        return free_indices(t.fn, depth) | free_indices(t.arg, depth)
    if isinstance(t, Lam):
        return free_indices(t.body, depth + 1)
    return set()


def symbols_of(t: Term) -> set[str]:
    if isinstance(t, Sym):
        return {t.name}
    if isinstance(t, App):
        return symbols_of(t.fn) | symbols_of(t.arg)
    if isinstance(t, Lam):
        return symbols_of(t.body)
    return set()


# ---------------------------------------------------------------------------
# Signatures and typing


@dataclass(frozen=True)
class Signature:
    """Base types plus the arity map; symbol order is declaration order."""

    base_types: frozenset
    ar: Mapping[str, SimpleType] = field(hash=False)

    @property
    def symbols(self) -> list[str]:
        return list(self.ar)


class TypingError(Exception):
    """A typing failure located by ``path``, a list of child steps from the root."""

    def __init__(self, message: str, path: tuple = ()):
        super().__init__(message)
        self.path = tuple(path)

    def __str__(self) -> str:
        msg = super().__str__()
        return f"{msg} at path {list(self.path)}" if self.path else msg


class UnboundVariable(TypingError):
    pass


class UnknownSymbol(TypingError):
    pass


class IllTypedApplication(TypingError):
    pass


# child steps used in paths and positions
FN, ARG, BODY = 0, 1, 2


def infer(sig: Signature, env: Env, t: Term, _path: tuple = ()) -> SimpleType:
    if isinstance(t, Sym):
        try:
            return sig.ar[t.name]
        except KeyError:
            raise UnknownSymbol(f"unknown symbol {t.name!r}", _path) from None
    if isinstance(t, Var):
        if not 0 <= t.index < len(env):
            raise UnboundVariable(
                f"variable index {t.index} unbound in environment of length {len(env)}", _path
            )
        return env[t.index]
    if isinstance(t, Lam):
        return Fun(t.dom, infer(sig, (t.dom,) + tuple(env), t.body, _path + (BODY,)))
    fn_ty = infer(sig, env, t.fn, _path + (FN,))
    arg_ty = infer(sig, env, t.arg, _path + (ARG,))
    if not isinstance(fn_ty, Fun):
        raise IllTypedApplication(f"cannot apply a term of base type {fn_ty}", _path)
    if fn_ty.dom != arg_ty:
        raise IllTypedApplication(f"expected argument of type {fn_ty.dom}, got {arg_ty}", _path)
    return fn_ty.cod


@dataclass(frozen=True)
class TypedTerm:
    """A term with its environment and type carried as re-checkable data."""

    env: Env
    term: Term
    type: SimpleType

    @classmethod
    def of(cls, sig: Signature, env: Env, t: Term) -> "TypedTerm":
        env = tuple(env)
        return cls(env, t, infer(sig, env, t))

    def check(self, sig: Signature) -> bool:
        try:
            return infer(sig, self.env, self.term) == self.type
        except TypingError:
            return False


def subterm_at(t: Term, path) -> Term:
    for step in path:
        if step == FN:
            t = t.fn
        elif step == ARG:
            t = t.arg
        else:
            t = t.body
    return t


def replace_at(t: Term, path, new: Term) -> Term:
    if not path:
        return new
    step, rest = path[0], path[1:]
    if step == FN:
        return App(replace_at(t.fn, rest, new), t.arg)
    if step == ARG:
        return App(t.fn, replace_at(t.arg, rest, new))
    return Lam(t.dom, replace_at(t.body, rest, new))
