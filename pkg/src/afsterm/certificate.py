"""Certificate text format and the independent verifier.

::

    CERT v1
    symbol nil = 0
    symbol cons(x0, x1) = x0 + x1 + 1
    symbol map(F0, x1) = ...
    config degree=2 max_coeff=3
    version afsterm 0.1.0

Parameters are named by kind (``x`` base, ``F`` function) and position.
The verifier only re-parses polynomials and re-runs the monotonicity and
orientation checks; it shares no state with the search.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .hopoly import HOPoly, PolySyntaxError, UnsupportedOrder, format_poly, parse_poly, var_name
from .interpretation import Algebra, check_rule_oriented
from .rewriting import Afs
from .search import Certificate, SearchConfig
from .syntax import Signature, arity_decompose


class CertificateError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


def format_certificate(cert: Certificate) -> str:
    lines = ["CERT v1"]
    for f, p in cert.interps.items():
        params = ", ".join(var_name(p.ctx, i) for i in range(len(p.ctx)))
        head = f"{f}({params})" if params else f
        lines.append(f"symbol {head} = {format_poly(p)}")
    cfg = cert.config
    lines.append(f"config degree={cfg.degree} max_coeff={cfg.max_coeff}")
    lines.append(f"version {cert.version}")
    return "\n".join(lines) + "\n"


_SYMBOL = re.compile(r"^symbol\s+(\S+?)(?:\(([^)]*)\))?\s*=\s*(.*)$")


def parse_certificate(text: str, sig: Signature) -> Certificate:
    """Parse against ``sig``; raises CertificateError(ParseError | SignatureMismatch)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines or lines[0] != "CERT v1":
        raise CertificateError("ParseError", "missing 'CERT v1' header")
    interps: dict = {}
    cfg_kw: dict = {}
    version = ""
    for ln in lines[1:]:
        if ln.startswith("symbol"):
            m = _SYMBOL.match(ln)
            if not m:
                raise CertificateError("ParseError", f"malformed symbol line: {ln}")
            f, params, poly_text = m.group(1), m.group(2), m.group(3)
            if f not in sig.ar:
                raise CertificateError("SignatureMismatch", f"unknown symbol {f}")
            if f in interps:
                raise CertificateError("ParseError", f"symbol {f} interpreted twice")
            ctx = tuple(arity_decompose(sig.ar[f])[0])
            given = [p.strip() for p in params.split(",")] if params and params.strip() else []
            try:
                expected = [var_name(ctx, i) for i in range(len(ctx))]
            except UnsupportedOrder as e:
                raise CertificateError("SignatureMismatch", str(e)) from None
            if given != expected:
                raise CertificateError(
                    "SignatureMismatch", f"{f} has parameters ({', '.join(expected)}), certificate says ({', '.join(given)})"
                )
            try:
                interps[f] = parse_poly(poly_text, ctx)
            except (PolySyntaxError, UnsupportedOrder) as e:
                raise CertificateError("ParseError", f"{f}: {e}") from None
        elif ln.startswith("config"):
            for item in ln.split()[1:]:
                key, _, val = item.partition("=")
                if key in ("degree", "max_coeff"):
                    try:
                        cfg_kw[key] = int(val)
                    except ValueError:
                        raise CertificateError("ParseError", f"bad config value {item}") from None
        elif ln.startswith("version"):
            version = ln[len("version"):].strip()
        else:
            raise CertificateError("ParseError", f"unrecognised line: {ln}")
    missing = [f for f in sig.ar if f not in interps]
    if missing:
        raise CertificateError("SignatureMismatch", f"no interpretation for {', '.join(missing)}")
    try:
        cfg = SearchConfig(**cfg_kw)
    except ValueError as e:
        raise CertificateError("ParseError", str(e)) from None
    return Certificate(interps, cfg, version or "unknown")


@dataclass(frozen=True)
class VerifyResult:
    accepted: bool
    reason: Optional[str] = None  # ParseError, NotStronglyMonotone, RuleNotOriented, SignatureMismatch
    detail: str = ""

    def __str__(self) -> str:
        if self.accepted:
            return "ACCEPT"
        return f"REJECT {self.reason}" + (f" ({self.detail})" if self.detail else "")


def verify_certificate(afs: Afs, cert: Union[str, Certificate]) -> VerifyResult:
    """Check a certificate from scratch: parse, strong monotonicity, rule orientation."""
    text = cert if isinstance(cert, str) else format_certificate(cert)
    try:
        parsed = parse_certificate(text, afs.sig)
    except CertificateError as e:
        return VerifyResult(False, e.kind, str(e))
    alg = Algebra(afs.sig, parsed.interps)
    bad = alg.not_strongly_monotone()
    if bad:
        return VerifyResult(False, "NotStronglyMonotone", bad[0])
    for i, rule in enumerate(afs.rules):
        try:
            ok = check_rule_oriented(alg, rule)
        except UnsupportedOrder as e:
            return VerifyResult(False, "RuleNotOriented", f"rule {i}: {e}")
        if not ok:
            return VerifyResult(False, "RuleNotOriented", f"rule {i}")
    return VerifyResult(True)


def algebra_of(afs: Afs, cert: Union[str, Certificate]) -> Algebra:
    text = cert if isinstance(cert, str) else format_certificate(cert)
    return Algebra(afs.sig, parse_certificate(text, afs.sig).interps)


__all__ = [
    "CertificateError", "VerifyResult", "format_certificate", "parse_certificate",
    "verify_certificate", "algebra_of", "HOPoly",
]
