"""Reader and printer for the AFS text format.

A file has three sections, in this order::

    SIG
      nil  : list
      cons : nat -> list -> list
      map  : (nat -> nat) -> list -> list
    VARS
      F : nat -> nat
      x : nat
      q : list
    RULES
      map F nil => nil
      map F (cons x q) => cons (F x) (map F q)

``->`` builds types (right-associative), ``=>`` separates rule sides,
``\\x:T. s`` is an annotated abstraction and juxtaposition is
left-associative application.  ``#`` starts a comment.  One declaration
per line; a line continues while parentheses are open.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .rewriting import Afs, RewriteRule, check_afs
from .syntax import (
    App, Base, Fun, Lam, Signature, SimpleType, Sym, Term, TypingError, Var, app_spine, base_names,
    infer,
)

SECTIONS = ("SIG", "VARS", "RULES")


class AfsSyntaxError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class AfsCheckError(Exception):
    """Well-formedness violations, each paired with the source line of its rule."""

    def __init__(self, violations: list):
        self.violations = violations
        lines = []
        for v, line in violations:
            where = f"line {line}: " if line else ""
            lines.append(where + str(v))
        super().__init__("; ".join(lines))


# ---------------------------------------------------------------------------
# Lexing

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<comment>#[^\n]*)|(?P<nl>\n)|(?P<arrow>->)|(?P<rule>=>)"
    r"|(?P<ident>[A-Za-z0-9_'][A-Za-z0-9_']*)|(?P<punct>[\\:.(),])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise AfsSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            out.append(Token("nl", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind == "punct":
            out.append(Token(m.group(), m.group(), line, col))
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, col))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


def _logical_lines(tokens: list[Token]) -> list[list[Token]]:
    lines, cur, depth = [], [], 0
    for tok in tokens:
        if tok.kind == "eof":
            break
        if tok.kind == "nl":
            if depth == 0:
                if cur:
                    lines.append(cur)
                cur = []
            continue
        if tok.kind == "(":
            depth += 1
        elif tok.kind == ")":
            depth -= 1
        cur.append(tok)
    if cur:
        lines.append(cur)
    return lines


class _Stream:
    def __init__(self, toks: list[Token], end: Token):
        self.toks = toks
        self.pos = 0
        self.end = end

    def peek(self) -> Token:
        return self.toks[self.pos] if self.pos < len(self.toks) else self.end

    def take(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            what = tok.text or "end of line"
            raise AfsSyntaxError(f"expected {kind!r}, found {what!r}", tok.line, tok.col)
        self.pos += 1
        return tok

    def at_end(self) -> bool:
        return self.pos >= len(self.toks)


# ---------------------------------------------------------------------------
# Named syntax


@dataclass(frozen=True)
class NName:
    name: str
    line: int
    col: int


@dataclass(frozen=True)
class NLam:
    name: str
    dom: SimpleType
    body: "NTerm"
    line: int
    col: int


@dataclass(frozen=True)
class NApp:
    fn: "NTerm"
    arg: "NTerm"


NTerm = object


def _parse_type(s: _Stream) -> SimpleType:
    tok = s.peek()
    if tok.kind == "(":
        s.take("(")
        dom = _parse_type(s)
        s.take(")")
    elif tok.kind == "ident":
        dom = Base(s.take("ident").text)
    else:
        raise AfsSyntaxError(f"expected a type, found {tok.text or 'end of line'!r}", tok.line, tok.col)
    if s.peek().kind == "arrow":
        s.take("arrow")
        return Fun(dom, _parse_type(s))
    return dom


def _parse_term(s: _Stream) -> NTerm:
    tok = s.peek()
    if tok.kind == "\\":
        return _parse_lambda(s)
    head = _parse_atom(s)
    while True:
        tok = s.peek()
        if tok.kind in ("ident", "("):
            head = NApp(head, _parse_atom(s))
        elif tok.kind == "\\":
            return NApp(head, _parse_lambda(s))
        else:
            return head


def _parse_lambda(s: _Stream) -> NTerm:
    lam = s.take("\\")
    name = s.take("ident")
    s.take(":")
    dom = _parse_type(s)
    s.take(".")
    return NLam(name.text, dom, _parse_term(s), lam.line, lam.col)


def _parse_atom(s: _Stream) -> NTerm:
    tok = s.peek()
    if tok.kind == "(":
        s.take("(")
        t = _parse_term(s)
        s.take(")")
        return t
    if tok.kind == "ident":
        s.take("ident")
        return NName(tok.text, tok.line, tok.col)
    raise AfsSyntaxError(f"expected a term, found {tok.text or 'end of line'!r}", tok.line, tok.col)


@dataclass
class AfsDocument:
    """Raw sections with source locations; names are not yet resolved."""

    sig: list = field(default_factory=list)    # (name, type, line, col)
    vars: list = field(default_factory=list)   # (name, type, line, col)
    rules: list = field(default_factory=list)  # (lhs, rhs, line, col)


def parse_document(text: str) -> AfsDocument:
    tokens = tokenize(text)
    doc = AfsDocument()
    section: Optional[str] = None
    seen: list[str] = []
    for line in _logical_lines(tokens):
        first = line[0]
        if first.kind == "ident" and first.text in SECTIONS and len(line) == 1:
            if first.text in seen or (seen and SECTIONS.index(first.text) < SECTIONS.index(seen[-1])):
                raise AfsSyntaxError(f"section {first.text} out of order or repeated", first.line, first.col)
            seen.append(first.text)
            section = first.text
            continue
        if section is None:
            raise AfsSyntaxError("expected a section header (SIG, VARS or RULES)", first.line, first.col)
        end = Token("eol", "", line[-1].line, line[-1].col + len(line[-1].text))
        s = _Stream(line, end)
        if section in ("SIG", "VARS"):
            names = [s.take("ident")]
            while s.peek().kind == ",":
                s.take(",")
                names.append(s.take("ident"))
            s.take(":")
            ty = _parse_type(s)
            target = doc.sig if section == "SIG" else doc.vars
            for n in names:
                target.append((n.text, ty, n.line, n.col))
        else:
            lhs = _parse_term(s)
            s.take("rule")
            rhs = _parse_term(s)
            doc.rules.append((lhs, rhs, first.line, first.col))
        if not s.at_end():
            tok = s.peek()
            raise AfsSyntaxError(f"unexpected {tok.text!r}", tok.line, tok.col)
    return doc


# ---------------------------------------------------------------------------
# Name resolution


def _resolve(t: NTerm, bound: list, free: Optional[dict], free_order: list, symbols) -> Term:
    """``bound`` is innermost-last; ``free`` maps rule-variable names to types."""
    if isinstance(t, NName):
        for depth, name in enumerate(reversed(bound)):
            if name == t.name:
                return Var(depth)
        if free is not None and t.name in free:
            if t.name not in free_order:
                free_order.append(t.name)
            return Var(len(bound) + free_order.index(t.name))
        if t.name in symbols:
            return Sym(t.name)
        raise AfsSyntaxError(f"unknown name {t.name!r}", t.line, t.col)
    if isinstance(t, NLam):
        return Lam(t.dom, _resolve(t.body, bound + [t.name], free, free_order, symbols))
    return App(
        _resolve(t.fn, bound, free, free_order, symbols),
        _resolve(t.arg, bound, free, free_order, symbols),
    )


def _first_loc(t: NTerm):
    while isinstance(t, NApp):
        t = t.fn
    return t.line, t.col


def build_afs(doc: AfsDocument) -> Afs:
    ar: dict = {}
    for name, ty, line, col in doc.sig:
        if name in ar:
            raise AfsSyntaxError(f"symbol {name!r} declared twice", line, col)
        ar[name] = ty
    var_types: dict = {}
    for name, ty, line, col in doc.vars:
        if name in var_types:
            raise AfsSyntaxError(f"variable {name!r} declared twice", line, col)
        if name in ar:
            raise AfsSyntaxError(f"variable {name!r} clashes with a symbol", line, col)
        var_types[name] = ty
    bases = set()
    for ty in list(ar.values()) + list(var_types.values()):
        bases |= base_names(ty)
    sig = Signature(frozenset(bases), ar)
    rules = []
    lines = []
    for lhs, rhs, line, _ in doc.rules:
        order: list = []
        l_term = _resolve(lhs, [], var_types, order, ar)
        r_term = _resolve(rhs, [], var_types, order, ar)
        env = tuple(var_types[n] for n in order)
        try:
            ty = infer(sig, env, l_term)
        except TypingError:
            ty = None
        rules.append(RewriteRule(env, l_term, r_term, ty, tuple(order)))
        lines.append(line)
    afs = Afs(sig, tuple(rules))
    violations = check_afs(afs)
    if violations:
        raise AfsCheckError([(v, lines[v.rule] if v.rule is not None else None) for v in violations])
    return afs


def parse_afs(text: str) -> Afs:
    """Parse and check an AFS file; raises AfsSyntaxError or AfsCheckError."""
    return build_afs(parse_document(text))


def corpus_names() -> list[str]:
    """Names of the bundled example systems (without the ``.afs`` suffix)."""
    root = resources.files("afsterm") / "corpus"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".afs"))


def corpus_text(name: str) -> str:
    return (resources.files("afsterm") / "corpus" / f"{name}.afs").read_text()


def load_corpus(name: str) -> Afs:
    return parse_afs(corpus_text(name))


def parse_type(text: str) -> SimpleType:
    toks = [t for t in tokenize(text) if t.kind not in ("nl",)]
    s = _Stream(toks[:-1], toks[-1])
    ty = _parse_type(s)
    if not s.at_end():
        tok = s.peek()
        raise AfsSyntaxError(f"unexpected {tok.text!r}", tok.line, tok.col)
    return ty


def parse_term(text: str, sig: Signature, env_names=(), env_types=()) -> Term:
    """Parse a term over ``sig``; free names must come from ``env_names``
    (listed innermost-first, matching De Bruijn order)."""
    toks = [t for t in tokenize(text) if t.kind != "nl"]
    s = _Stream(toks[:-1], toks[-1])
    nt = _parse_term(s)
    if not s.at_end():
        tok = s.peek()
        raise AfsSyntaxError(f"unexpected {tok.text!r}", tok.line, tok.col)
    # free variables behave like outermost binders
    bound = list(reversed(list(env_names)))
    return _resolve(nt, bound, None, [], sig.ar)


# ---------------------------------------------------------------------------
# Printing


def print_type(ty: SimpleType) -> str:
    return str(ty)


def print_term(t: Term, env_names=(), reserved=()) -> str:
    """Named rendering; binders get fresh names v0, v1, ... by depth."""
    taken = set(env_names) | set(reserved)
    return _show(t, list(env_names), taken, top=True)


def _fresh(depth_names: list, taken: set) -> str:
    k = 0
    while True:
        name = f"v{k}"
        if name not in taken and name not in depth_names:
            return name
        k += 1


def _show(t: Term, names: list, taken: set, top: bool = False) -> str:
    # names: innermost-first list matching De Bruijn indices
    if isinstance(t, Sym):
        return t.name
    if isinstance(t, Var):
        if t.index < len(names):
            return names[t.index]
        return f"#{t.index}"
    if isinstance(t, Lam):
        name = _fresh(names, taken)
        body = _show(t.body, [name] + names, taken, top=True)
        text = f"\\{name}:{t.dom}. {body}"
        return text if top else f"({text})"
    head, args = app_spine(t)
    parts = [_show(head, names, taken)]
    for a in args:
        s = _show(a, names, taken)
        if isinstance(a, App):
            s = f"({s})"
        parts.append(s)
    return " ".join(parts)


def print_afs(afs: Afs) -> str:
    lines = ["SIG"]
    for f, ty in afs.sig.ar.items():
        lines.append(f"  {f} : {ty}")
    # give every rule variable a globally consistent name
    var_types: dict = {}
    rule_names = []
    for rule in afs.rules:
        names = list(rule.names) if len(rule.names) == len(rule.env) else [f"x{i}" for i in range(len(rule.env))]
        fixed = []
        for n, ty in zip(names, rule.env):
            cand, k = n, 0
            while (cand in var_types and var_types[cand] != ty) or cand in afs.sig.ar:
                k += 1
                cand = f"{n}_{k}"
            var_types[cand] = ty
            fixed.append(cand)
        rule_names.append(fixed)
    lines.append("VARS")
    for n, ty in var_types.items():
        lines.append(f"  {n} : {ty}")
    lines.append("RULES")
    reserved = set(afs.sig.ar) | set(var_types)
    for rule, names in zip(afs.rules, rule_names):
        lines.append(
            f"  {print_term(rule.lhs, names, reserved)} => {print_term(rule.rhs, names, reserved)}"
        )
    return "\n".join(lines) + "\n"
