"""Bounded search for polynomial interpretations.

Each symbol gets a parametric template whose coefficients range over
``0..max_coeff`` (strict occurrences start at 1, which is exactly the
strong-monotonicity filter).  Symbols are enumerated depth-first in
declaration order, each over its coefficient vectors in lexicographic
order, so the first hit is the lexicographically least concatenated
vector.  A rule is checked as soon as all of its symbols are fixed.
"""

from __future__ import annotations

import itertools
import multiprocessing
import os
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

from . import __version__
from .hopoly import HOPoly, b_add, b_const, b_mul, b_var, body_gt, strongly_monotone, var_arity
from .interpretation import _interp
from .rewriting import Afs, check_afs
from .syntax import SimpleType, arity_decompose, symbols_of


@dataclass(frozen=True)
class SearchConfig:
    max_coeff: int = 3
    degree: int = 2
    allow_fun_args: bool = True
    timeout: float = 10.0
    parallelism: int = field(default_factory=lambda: os.cpu_count() or 1)

    def __post_init__(self):
        if self.max_coeff < 1:
            raise ValueError("max_coeff must be at least 1")
        if self.degree not in (1, 2):
            raise ValueError("degree must be 1 or 2")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


# ---------------------------------------------------------------------------
# Templates


@dataclass(frozen=True)
class Template:
    """A parametric polynomial; ``slots`` name the coefficients in vector order."""

    symbol: str
    ctx: tuple
    slots: tuple
    lows: tuple
    max_coeff: int
    # per slot: how it contributes, see _build
    _plan: tuple = field(repr=False, default=())

    def size(self) -> int:
        n = 1
        for lo in self.lows:
            n *= self.max_coeff - lo + 1
        return n

    def vectors(self) -> Iterator[tuple]:
        return itertools.product(*(range(lo, self.max_coeff + 1) for lo in self.lows))

    def instantiate(self, vec) -> HOPoly:
        return HOPoly(self.ctx, _build(self._plan, vec))

    def candidates(self) -> Iterator[tuple[tuple, HOPoly]]:
        strict = range(len(self.ctx))
        for vec in self.vectors():
            p = self.instantiate(vec)
            if strongly_monotone(p, strict):
                yield vec, p

    def minimal(self) -> HOPoly:
        """Sum of the base arguments plus ``F(sum of base arguments)`` for each function argument."""
        vec = []
        for name in self.slots:
            if name.startswith(("c_", "d_")) or (name.startswith("e_") and not name.endswith("_0")):
                vec.append(1)
            else:
                vec.append(0)
        return self.instantiate(vec)


def _build(plan: tuple, vec) -> tuple:
    const_part, linear, funs, quads, crosses = plan
    acc = [b_const(vec[const_part])]
    for slot, i in linear:
        if vec[slot]:
            acc.append(((((i, ()),), vec[slot]),))
    fun_atoms = {}
    for j, d_slot, arg_plans in funs:
        args = []
        for e0_slot, e_slots in arg_plans:
            parts = [b_const(vec[e0_slot])]
            parts.extend(((((i, ()),), vec[s]),) for s, i in e_slots if vec[s])
            args.append(b_add(*parts))
        atom = b_var(j, tuple(args))
        fun_atoms[j] = atom
        if vec[d_slot]:
            acc.append(tuple((m, c * vec[d_slot]) for m, c in atom))
    for slot, i, k in quads:
        if vec[slot]:
            acc.append(((tuple(sorted(((i, ()), (k, ())))), vec[slot]),))
    for slot, i, j in crosses:
        if vec[slot]:
            prod = b_mul(b_var(i), fun_atoms[j])
            acc.append(tuple((m, c * vec[slot]) for m, c in prod))
    return b_add(*acc)


def templates_for_symbol(symbol: str, ty: SimpleType, cfg: SearchConfig) -> Template:
    """The coefficient family for a symbol of type ``ty``; raises UnsupportedOrder."""
    args, _ = arity_decompose(ty)
    ctx = tuple(args)
    bases = [i for i, a in enumerate(ctx) if var_arity(a) == 0]
    funs = [(j, var_arity(a)) for j, a in enumerate(ctx) if var_arity(a) > 0]
    slots, lows = [], []

    def slot(name, lo=0):
        slots.append(name)
        lows.append(lo)
        return len(slots) - 1

    const_part = slot("c0")
    linear = tuple((slot(f"c_x{i}", 1), i) for i in bases)
    fun_plan = []
    for j, k in funs:
        d = slot(f"d_F{j}", 1)
        arg_plans = []
        for pos in range(k):
            e0 = slot(f"e_F{j}_{pos}_0")
            e_slots = tuple((slot(f"e_F{j}_{pos}_x{i}"), i) for i in bases) if cfg.allow_fun_args else ()
            arg_plans.append((e0, e_slots))
        fun_plan.append((j, d, tuple(arg_plans)))
    quads, crosses = [], []
    if cfg.degree >= 2:
        for a, i in enumerate(bases):
            for k in bases[a:]:
                quads.append((slot(f"q_x{i}x{k}"), i, k))
        if cfg.allow_fun_args:
            for i in bases:
                for j, _ in funs:
                    crosses.append((slot(f"q_x{i}F{j}"), i, j))
    plan = (const_part, linear, tuple(fun_plan), tuple(quads), tuple(crosses))
    return Template(symbol, ctx, tuple(slots), tuple(lows), cfg.max_coeff, plan)


# ---------------------------------------------------------------------------
# Results


@dataclass(frozen=True)
class Certificate:
    interps: dict = field(hash=False)  # symbol -> HOPoly, declaration order
    config: SearchConfig = field(default_factory=SearchConfig)
    version: str = f"afsterm {__version__}"

    def to_text(self) -> str:
        from .certificate import format_certificate

        return format_certificate(self)


@dataclass(frozen=True)
class NotFound:
    reason: str  # "exhausted" or "timeout"
    checked: int = 0
    elapsed: float = 0.0

    def __str__(self) -> str:
        return f"no interpretation found ({self.reason} after {self.checked} candidates, {self.elapsed:.2f}s)"


class _Partial:
    """Duck-typed stand-in for Algebra during search (only some symbols fixed)."""

    def __init__(self, sig, interps):
        self.sig = sig
        self.interps = interps


class _Search:
    def __init__(self, afs: Afs, cfg: SearchConfig):
        self.afs = afs
        self.cfg = cfg
        syms = afs.sig.symbols
        used = set()
        rule_syms = []
        for r in afs.rules:
            s = symbols_of(r.lhs) | symbols_of(r.rhs)
            rule_syms.append(s)
            used |= s
        self.templates = {f: templates_for_symbol(f, afs.sig.ar[f], cfg) for f in syms}
        self.levels = [f for f in syms if f in used]
        self.fixed = {f: self.templates[f].minimal() for f in syms if f not in used}
        self.candidates = [list(self.templates[f].candidates()) for f in self.levels]
        self.checks_at = [[] for _ in self.levels]
        for ri, s in enumerate(rule_syms):
            lvl = max(self.levels.index(f) for f in s)
            self.checks_at[lvl].append(ri)
        self.checked = 0

    def space(self) -> int:
        n = 1
        for c in self.candidates:
            n *= len(c)
        return n

    def rule_ok(self, interps: dict, ri: int) -> bool:
        rule = self.afs.rules[ri]
        part = _Partial(self.afs.sig, interps)
        env = tuple(rule.env)
        cache: dict = {}
        _, lb = _interp(part, env, rule.lhs, cache)
        _, rb = _interp(part, env, rule.rhs, cache)
        return body_gt(lb, rb)

    def _accept(self, interps: dict, level: int) -> bool:
        self.checked += 1
        return all(self.rule_ok(interps, ri) for ri in self.checks_at[level])

    def prefixes(self, depth: int) -> Iterator[tuple]:
        """Candidate-index prefixes for the first ``depth`` levels that pass their rule checks, in lex order."""
        interps: dict = {}

        def go(level, acc):
            if level == depth:
                yield tuple(acc)
                return
            f = self.levels[level]
            for idx, (_, poly) in enumerate(self.candidates[level]):
                interps[f] = poly
                if self._accept(interps, level):
                    yield from go(level + 1, acc + [idx])
            interps.pop(f, None)

        return go(0, [])

    def run(self, prefix: tuple = (), deadline: float = float("inf")):
        """DFS below a fixed (already validated) prefix of candidate indices.

        Returns ``("found", vectors)``, ``("exhausted", None)`` or ``("timeout", None)``.
        """
        if not self.levels:
            return "found", []
        interps: dict = {}
        chosen: list = []
        for level, idx in enumerate(prefix):
            vec, poly = self.candidates[level][idx]
            interps[self.levels[level]] = poly
            chosen.append(vec)
        n = len(self.levels)
        if len(prefix) == n:
            return "found", chosen

        def dfs(level: int) -> Optional[str]:
            f = self.levels[level]
            for vec, poly in self.candidates[level]:
                if time.time() > deadline:
                    return "timeout"
                interps[f] = poly
                if self._accept(interps, level):
                    chosen.append(vec)
                    if level + 1 == n:
                        return "found"
                    r = dfs(level + 1)
                    if r is not None:
                        return r
                    chosen.pop()
            del interps[f]
            return None

        r = dfs(len(prefix))
        if r == "found":
            return "found", list(chosen)
        return r or "exhausted", None

    def certificate(self, vectors: list) -> Certificate:
        out = {}
        for f in self.afs.sig.symbols:
            if f in self.fixed:
                out[f] = self.fixed[f]
            else:
                lvl = self.levels.index(f)
                out[f] = self.templates[f].instantiate(vectors[lvl])
        return Certificate(out, self.cfg)


_WORKER: Optional[_Search] = None


def _init_worker(afs: Afs, cfg: SearchConfig):
    global _WORKER
    _WORKER = _Search(afs, cfg)


def _run_prefix(args):
    prefix, deadline = args
    _WORKER.checked = 0
    status, vecs = _WORKER.run(prefix, deadline)
    return status, vecs, _WORKER.checked


def find_interpretation(afs: Afs, cfg: SearchConfig | None = None):
    """Return a Certificate, or NotFound("exhausted" | "timeout")."""
    cfg = cfg or SearchConfig()
    violations = check_afs(afs)
    if violations:
        raise ValueError("ill-formed AFS: " + "; ".join(map(str, violations)))
    start = time.time()
    deadline = start + cfg.timeout
    search = _Search(afs, cfg)
    workers = max(1, cfg.parallelism)
    if workers == 1 or search.space() < 20_000:
        status, vecs = search.run((), deadline)
        checked = search.checked
    else:
        status, vecs, checked = _parallel(afs, cfg, search, workers, deadline)
    if status == "found":
        return search.certificate(vecs)
    return NotFound(status, checked, time.time() - start)


def _parallel(afs: Afs, cfg: SearchConfig, search: _Search, workers: int, deadline: float):
    # Split on the shallowest depth giving enough validated prefixes; the
    # prefixes are consumed in lex order, so the first one whose subtree
    # holds a solution yields the lexicographically least certificate.
    depth, prefixes = 0, [()]
    while depth < len(search.levels) - 1 and len(prefixes) < 4 * workers:
        depth += 1
        prefixes = list(search.prefixes(depth))
    checked = search.checked
    if not prefixes:
        return "exhausted", None, checked
    ctx = multiprocessing.get_context("fork")
    pool = ctx.Pool(workers, initializer=_init_worker, initargs=(afs, cfg))
    try:
        for status, vecs, n in pool.imap(_run_prefix, [(p, deadline) for p in prefixes]):
            checked += n
            if status != "exhausted":
                return status, vecs, checked
        return "exhausted", None, checked
    finally:
        pool.terminate()
        pool.join()
