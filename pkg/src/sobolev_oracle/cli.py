"""Command-line front end: ``decide``, ``scan``, ``verify`` and ``refute``.

Exit codes: 0 success, 2 invalid input or unmet precondition, 3 a check
failed (verification spread or refutation budget), 4 output not writable.
Rationals are accepted as ``num/den``, integers or exact decimals, and are
printed as ``num/den``.  ``SOBOLEV_ORACLE_THREADS`` sets the number of worker
threads for ``scan`` (0 or unset means one per CPU); output order does not
depend on it.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .decision import PreconditionViolated, Verdict, decide_embedding
from .params import INF, EmbeddingParams, InvalidParams, Q, to_rational, validate
from .verify import (
    BudgetExhausted,
    EmptyFamily,
    auto_family,
    best_constant_estimate,
    cutoff_power_family,
    refute,
    scale_invariance_check,
)

EXIT_OK, EXIT_INVALID, EXIT_CHECK, EXIT_IO = 0, 2, 3, 4
SPREAD_LIMIT = 1 + 1e-6


class UsageError(Exception):
    pass


def fmt_rational(x) -> str:
    if x is None:
        return ""
    if x == INF:
        return "inf"
    q = to_rational(x)
    return f"{q.numerator}/{q.denominator}"


def parse_extended(s: str):
    return INF if s == "inf" else to_rational(s)


# -- verdict records -----------------------------------------------------------

@dataclass(frozen=True)
class VerdictRecord:
    params: tuple
    holds: bool
    case_label: Optional[str]
    failure_reason: Optional[str]
    scaling_exponent_k: Optional[Q]
    c0: Q
    c1: Q
    theta_c: Optional[Q]
    p_star: object
    c_star1: Optional[Q]
    inequality: Optional[tuple]  # (kind, equation, theta)

    @classmethod
    def from_verdict(cls, params: EmbeddingParams, v: Verdict) -> "VerdictRecord":
        d = v.derived
        ineq = None
        if v.inequality is not None:
            ineq = (v.inequality.kind.value, v.inequality.equation.value, v.inequality.theta)
        return cls(
            params=params.as_tuple(),
            holds=v.holds,
            case_label=v.case_label.value if v.case_label else None,
            failure_reason=v.failure.tag.value if v.failure else None,
            scaling_exponent_k=v.failure.scaling_exponent_k if v.failure else None,
            c0=d.c0,
            c1=d.c1,
            theta_c=d.theta_c,
            p_star=d.p_star,
            c_star1=d.star.c_star1 if d.star else None,
            inequality=ineq,
        )

    def to_json(self) -> dict:
        n, a, b, c, p, r = self.params
        out = {
            "params": {"dim": n, "a": fmt_rational(a), "b": fmt_rational(b), "c": fmt_rational(c),
                       "p": fmt_rational(p), "r": fmt_rational(r)},
            "holds": self.holds,
            "case_label": self.case_label,
            "failure_reason": self.failure_reason,
            "scaling_exponent_k": fmt_rational(self.scaling_exponent_k) or None,
            "c0": fmt_rational(self.c0),
            "c1": fmt_rational(self.c1),
            "theta_c": fmt_rational(self.theta_c) or None,
            "p_star": fmt_rational(self.p_star),
            "c_star1": fmt_rational(self.c_star1) or None,
            "inequality": None,
        }
        if self.inequality is not None:
            kind, eq, theta = self.inequality
            out["inequality"] = {"kind": kind, "equation": eq, "theta": fmt_rational(theta)}
        return out

    @classmethod
    def from_json(cls, d: dict) -> "VerdictRecord":
        pr = d["params"]
        opt = lambda x: None if x is None else to_rational(x)
        ineq = None
        if d.get("inequality"):
            i = d["inequality"]
            ineq = (i["kind"], i["equation"], to_rational(i["theta"]))
        return cls(
            params=(int(pr["dim"]), *(to_rational(pr[k]) for k in ("a", "b", "c", "p", "r"))),
            holds=bool(d["holds"]),
            case_label=d.get("case_label"),
            failure_reason=d.get("failure_reason"),
            scaling_exponent_k=opt(d.get("scaling_exponent_k")),
            c0=to_rational(d["c0"]),
            c1=to_rational(d["c1"]),
            theta_c=opt(d.get("theta_c")),
            p_star=parse_extended(d["p_star"]),
            c_star1=opt(d.get("c_star1")),
            inequality=ineq,
        )

    def human(self) -> str:
        n, a, b, c, p, r = self.params
        head = (f"N={n} a={fmt_rational(a)} b={fmt_rational(b)} c={fmt_rational(c)} "
                f"p={fmt_rational(p)} r={fmt_rational(r)}")
        lines = [head]
        if self.holds:
            kind, eq, theta = self.inequality
            lines.append(f"embedding holds (case {self.case_label}); {kind} inequality, "
                         f"theta = {fmt_rational(theta)}")
        else:
            reason = self.failure_reason
            if self.scaling_exponent_k is not None:
                reason += f" (k = {fmt_rational(self.scaling_exponent_k)})"
            lines.append(f"embedding fails: {reason}")
        lines.append(f"c0 = {fmt_rational(self.c0)}  c1 = {fmt_rational(self.c1)}  "
                     f"p* = {fmt_rational(self.p_star)}")
        if self.theta_c is not None:
            lines.append(f"theta_c = {fmt_rational(self.theta_c)}")
        return "\n".join(lines)


def verdict_record(params: EmbeddingParams) -> VerdictRecord:
    return VerdictRecord.from_verdict(params, decide_embedding(params))


# -- scan ----------------------------------------------------------------------

def parse_range(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range {text!r} must be lo:hi:n")
    try:
        lo, hi, n = to_rational(parts[0]), to_rational(parts[1]), int(parts[2])
    except (ValueError, TypeError):
        raise UsageError(f"range {text!r} must be lo:hi:n") from None
    if n < 2 or not lo < hi:
        raise UsageError(f"range {text!r} needs lo < hi and n >= 2")
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _threads() -> int:
    raw = os.environ.get("SOBOLEV_ORACLE_THREADS", "0").strip() or "0"
    try:
        k = int(raw)
    except ValueError:
        raise UsageError("SOBOLEV_ORACLE_THREADS must be an integer") from None
    if k < 0:
        raise UsageError("SOBOLEV_ORACLE_THREADS must be >= 0")
    return k or (os.cpu_count() or 1)


def scan_grid(dim, a, p, r, bs, cs, threads: int = 1):
    """Verdicts on the ``b x c`` grid, row-major in ``b`` then ``c``."""
    def row(b):
        out = []
        for c in cs:
            v = decide_embedding(EmbeddingParams(dim, a, b, c, p, r))
            out.append((b, c, v))
        return out

    if threads <= 1:
        rows = [row(b) for b in bs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, bs))
    return [cell for r_ in rows for cell in r_]


def case_of(v: Verdict) -> str:
    return v.case_label.value if v.holds else v.failure.tag.value


def scan_csv(cells) -> str:
    lines = ["b,c,holds,case,theta"]
    for b, c, v in cells:
        theta = fmt_rational(v.inequality.theta) if v.holds else ""
        lines.append(f"{fmt_rational(b)},{fmt_rational(c)},{'true' if v.holds else 'false'},"
                     f"{case_of(v)},{theta}")
    return "\n".join(lines) + "\n"


PALETTE = {
    "i": "#4e79a7",
    "ii": "#59a14f",
    "iii": "#f28e2b",
    "iv": "#b07aa1",
    "fails": "#d9d9d9",
}


def scan_svg(cells, bs, cs, title: str = "") -> str:
    cell = 8
    nb, nc = len(bs), len(cs)
    margin = 40
    legend_w = 120
    width = margin + nb * cell + 20 + legend_w
    height = margin + nc * cell + margin
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<text x="{margin}" y="20" font-family="monospace" font-size="12">{title}</text>')
    for i, (b, c, v) in enumerate(cells):
        ib, ic = divmod(i, nc)
        x = margin + ib * cell
        y = margin + (nc - 1 - ic) * cell  # c grows upward
        color = PALETTE[v.case_label.value] if v.holds else PALETTE["fails"]
        out.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{color}"/>')
    fx = margin + nb * cell + 20
    for j, (name, color) in enumerate(PALETTE.items()):
        y = margin + j * 18
        label = name if name == "fails" else f"case {name}"
        out.append(f'<rect x="{fx}" y="{y}" width="12" height="12" fill="{color}"/>')
        out.append(f'<text x="{fx + 18}" y="{y + 10}" font-family="monospace" font-size="11">{label}</text>')
    out.append(f'<text x="{margin}" y="{height - 12}" font-family="monospace" font-size="11">'
               f'b: {fmt_rational(bs[0])} .. {fmt_rational(bs[-1])}   '
               f'c: {fmt_rational(cs[0])} .. {fmt_rational(cs[-1])} (upward)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- argument handling -----------------------------------------------------------

def _tuple_args(sp, with_bc=True):
    sp.add_argument("--dim", required=True)
    sp.add_argument("--a", required=True)
    if with_bc:
        sp.add_argument("--b", required=True)
        sp.add_argument("--c", required=True)
    sp.add_argument("--p", required=True)
    sp.add_argument("--r", required=True)


def _params(ns) -> EmbeddingParams:
    try:
        dim = int(ns.dim)
    except ValueError:
        raise InvalidParams("dim", "must be an integer") from None
    prm = EmbeddingParams(dim, ns.a, ns.b, ns.c, ns.p, ns.r)
    validate(prm)
    return prm


def _write(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc.strerror}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_decide(ns) -> int:
    rec = verdict_record(_params(ns))
    print(_dump(rec.to_json()) if ns.json else rec.human(), end="" if ns.json else "\n")
    return EXIT_OK


def cmd_scan(ns) -> int:
    try:
        dim = int(ns.dim)
    except ValueError:
        raise InvalidParams("dim", "must be an integer") from None
    bs, cs = parse_range(ns.b_range), parse_range(ns.c_range)
    validate(EmbeddingParams(dim, ns.a, bs[0], cs[0], ns.p, ns.r))
    a, p, r = to_rational(ns.a), to_rational(ns.p), to_rational(ns.r)
    cells = scan_grid(dim, a, p, r, bs, cs, _threads())
    _write(ns.out, scan_csv(cells))
    if ns.svg:
        title = f"N={dim} a={fmt_rational(a)} p={fmt_rational(p)} r={fmt_rational(r)}"
        _write(ns.svg, scan_svg(cells, bs, cs, title))
    return EXIT_OK


def cmd_verify(ns) -> int:
    prm = _params(ns)
    rec = verdict_record(prm)
    if not rec.holds:
        raise PreconditionViolated("embedding does not hold; use refute")
    if ns.lambda_decades < 0:
        raise UsageError("--lambda-decades must be >= 0")
    k = ns.lambda_decades
    lambdas = [10.0 ** j for j in range(-k, k + 1)]
    if ns.family == "auto":
        fam = auto_family(prm)
    elif ns.family == "cutoff-power":
        fam = cutoff_power_family(prm, 8)
    else:
        names = [x.strip() for x in ns.family.split(",") if x.strip()]
        base = auto_family(prm)
        unknown = [x for x in names if x not in base]
        if unknown or not names:
            raise UsageError(f"unknown profile name(s) {unknown}; known: {sorted(base)}")
        fam = {x: base[x] for x in names}
    report = scale_invariance_check(prm, fam, lambdas)
    out = {"verdict": rec.to_json(), "theta": fmt_rational(rec.inequality[2]),
           "report": report.to_json()}
    try:
        best = best_constant_estimate(prm, fam)
        out["best_constant_lower_bound"] = {"value": best.value, "profile": best.argmax}
    except EmptyFamily:
        out["best_constant_lower_bound"] = None
    text = _dump(out)
    if ns.out:
        _write(ns.out, text)
    else:
        print(text, end="")
    ok = bool(report.ratios) and report.scale_invariance_spread <= SPREAD_LIMIT
    print(f"spread {report.scale_invariance_spread:.12g} "
          f"({'ok' if ok else 'FAILED'}, limit {SPREAD_LIMIT!r})", file=sys.stderr)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_refute(ns) -> int:
    prm = _params(ns)
    rec = verdict_record(prm)
    if rec.holds:
        raise PreconditionViolated("embedding holds; nothing to refute")
    if ns.budget < 1:
        raise UsageError("--budget must be >= 1")
    code = EXIT_OK
    try:
        ev = refute(prm, ns.budget)
    except BudgetExhausted as exc:
        ev, code = exc.evidence, EXIT_CHECK
    out = {"verdict": rec.to_json(), "evidence": ev.to_json(), "met": ev.met}
    text = _dump(out)
    if ns.out:
        _write(ns.out, text)
    else:
        print(text, end="")
    print(f"{ev.mechanism.value}: growth {ev.growth_factor:.6g} "
          f"({'met' if code == EXIT_OK else 'budget exhausted'})", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sobolev-oracle",
        description="Decide, scan, verify and refute weighted Sobolev embeddings.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("decide", help="verdict for one parameter tuple")
    _tuple_args(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_decide)

    sp = sub.add_parser("scan", help="verdicts on a (b, c) grid")
    _tuple_args(sp, with_bc=False)
    sp.add_argument("--b-range", required=True, help="lo:hi:n")
    sp.add_argument("--c-range", required=True, help="lo:hi:n")
    sp.add_argument("--out", required=True)
    sp.add_argument("--svg")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("verify", help="scale-invariance check for a holding tuple")
    _tuple_args(sp)
    sp.add_argument("--family", default="auto",
                    help="auto, cutoff-power, or comma-separated auto-family names")
    sp.add_argument("--lambda-decades", type=int, default=3)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("refute", help="counterexample sequence for a failing tuple")
    _tuple_args(sp)
    sp.add_argument("--budget", type=int, default=300)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_refute)
    return ap


_NEGATIVE = re.compile(r"^-[0-9.]")


def _attach_negatives(argv):
    """Turn ``--a -1/2`` into ``--a=-1/2`` so argparse does not see a flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEGATIVE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_negatives(list(sys.argv[1:] if argv is None else argv))
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return ns.func(ns)
    except (InvalidParams, UsageError, PreconditionViolated, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except IOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
