"""Command-line interface.

Exit codes: 0 success, 1 a verification came out false, 2 usage error,
3 operator not hyperbolic, 4 sail growth did not terminate, 5 inconsistent
quotient, 6 resource guard, 7 non-unimodular intermediate, 8 invalid input.
Failures print a one-line JSON object ``{"error": ..., "message": ...}`` to
stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from pathlib import Path
from typing import Optional, Sequence

from .classify import (
    EXAMPLES,
    FAMILIES,
    WORKERS_ENV,
    NonUnimodularIntermediate,
    ResourceGuard,
    classify_norm,
    conjecture_scan,
    family,
    verify_conjugation,
)
from .linalg import Mat3, char_poly, mat_pow, parse_matrix
from .report import (
    analyze_operator,
    certificate_document,
    dumps,
    fraction_digest,
    invariant_table,
    svg_net,
)
from .sail import NonTermination
from .spectral import NotHyperbolic, Orthant, eigen_structure
from .torus import QuotientInconsistent

EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_NOT_HYPERBOLIC = 3
EXIT_NONTERMINATION = 4
EXIT_QUOTIENT = 5
EXIT_GUARD = 6
EXIT_NONUNIMODULAR = 7
EXIT_INVALID = 8

_ERRORS = (
    (NotHyperbolic, EXIT_NOT_HYPERBOLIC),
    (NonTermination, EXIT_NONTERMINATION),
    (QuotientInconsistent, EXIT_QUOTIENT),
    (ResourceGuard, EXIT_GUARD),
    (NonUnimodularIntermediate, EXIT_NONUNIMODULAR),
    (ValueError, EXIT_INVALID),
)


def parse_operator(spec: str) -> Mat3:
    """Matrix ``a,b,c;d,e,f;g,h,i``, a family ``name:k=v,...`` or an example name.

    A trailing ``^k`` raises the operator to the k-th power.
    """
    spec = spec.strip()
    power = 1
    m = re.fullmatch(r"(.*)\^(\d+)", spec)
    if m:
        spec, power = m.group(1), int(m.group(2))
        if power < 1:
            raise ValueError("power must be positive")
    if ";" in spec:
        a = parse_matrix(spec)
    else:
        name, _, rest = spec.partition(":")
        params = {}
        for item in filter(None, rest.split(",")):
            k, eq, v = item.partition("=")
            if not eq:
                raise ValueError(f"bad family parameter {item!r}")
            params[k.strip()] = int(v)
        a = family(name.strip(), **params)
    return mat_pow(a, power) if power > 1 else a


def _operator_from_args(args) -> Mat3:
    sources = [s for s in (args.matrix, args.family) if s is not None]
    if len(sources) != 1:
        raise ValueError("give exactly one of --matrix or --family")
    if args.matrix is not None:
        return parse_operator(args.matrix)
    params = {k: getattr(args, k) for k in ("m", "n", "a", "b") if getattr(args, k) is not None}
    return family(args.family, **params)


def _sail_kw(args) -> dict:
    kw = {}
    if args.bound is not None:
        kw["bound"] = args.bound
    if args.radius is not None:
        kw["radius"] = args.radius
    if args.max_steps is not None:
        kw["max_steps"] = args.max_steps
    return kw


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_analyze(args) -> int:
    a = _operator_from_args(args)
    eigen_structure(a)
    if args.orthant == "all":
        orthants = None
    else:
        orthants = [Orthant.parse(args.orthant)]
    results = analyze_operator(a, orthants, **_sail_kw(args))
    doc = certificate_document(a, results)
    if args.format == "json":
        _write(args.out, dumps(doc))
    elif args.format == "text":
        _write(args.out, invariant_table(a, results))
    elif args.format == "svg":
        _write(args.out, svg_net(results[0].decomposition))
    elif args.format == "obj":
        _write(args.out, results[0].patch.to_obj())
    if args.json:
        Path(args.json).write_text(dumps(doc))
    if args.svg:
        Path(args.svg).write_text(svg_net(results[0].decomposition))
    if args.obj:
        Path(args.obj).write_text(results[0].patch.to_obj())
    return 0


def cmd_classify(args) -> int:
    report = classify_norm(
        args.norm,
        det_filter=args.det_filter,
        jobs=args.jobs,
        max_norm=args.max_norm,
        exploratory=args.exploratory,
        **_sail_kw(args),
    )
    text = report.table() + "\n"
    if args.format == "json":
        _write(args.out, json.dumps(report.to_json(), indent=2) + "\n")
    else:
        _write(args.out, text)
    return 0


def cmd_equiv(args) -> int:
    a = parse_operator(args.first)
    b = parse_operator(args.second)
    kw = _sail_kw(args)
    ca = [r.certificate for r in analyze_operator(a, **kw)]
    cb = [r.certificate for r in analyze_operator(b, **kw)]
    same = fraction_digest(ca + ca) == fraction_digest(cb + cb)
    out = {
        "first": {"operator": [list(r) for r in a], "char_poly": str(char_poly(a)),
                  "fraction_certificate": fraction_digest(ca + ca)},
        "second": {"operator": [list(r) for r in b], "char_poly": str(char_poly(b)),
                   "fraction_certificate": fraction_digest(cb + cb)},
        "verdict": "equivalent (certificate match)" if same else "inequivalent (certificates differ)",
    }
    if args.format == "json":
        _write(args.out, json.dumps(out, indent=2) + "\n")
    else:
        _write(args.out, out["verdict"] + "\n")
    return 0


def _parse_t_range(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def cmd_verify_conjugation(args) -> int:
    ts = _parse_t_range(args.t)
    results = {t: verify_conjugation(t) for t in ts}
    if args.format == "json":
        _write(args.out, json.dumps({"results": {str(t): v for t, v in results.items()}}, indent=2) + "\n")
    else:
        _write(args.out, "".join(f"t={t}: {'true' if v else 'false'}\n" for t, v in results.items()))
    return 0 if all(results.values()) else EXIT_FALSE


def _load_corpus(directory: str) -> list:
    d = Path(directory)
    if not d.is_dir():
        raise ValueError(f"not a directory: {directory}")
    corpus = []
    for p in sorted(d.glob("*.json")):
        doc = json.loads(p.read_text())
        if doc.get("schema") != "cert-v1":
            continue
        for s in doc["sails"]:
            corpus.append((f"{p.stem}:{s['orthant']}", s["faces"]))
    return corpus


def cmd_conjecture_scan(args) -> int:
    summary = conjecture_scan(_load_corpus(args.directory))
    _write(args.out, json.dumps(summary, indent=2) + "\n")
    return 0


def cmd_family_list(args) -> int:
    lines = []
    for name, (fn, params, rng) in FAMILIES.items():
        lines.append(f"{name}: parameters {', '.join(params)} ({rng})")
    for name, m in EXAMPLES.items():
        lines.append(f"{name}: {';'.join(','.join(map(str, r)) for r in m)}")
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def _add_operator(p: argparse.ArgumentParser) -> None:
    p.add_argument("--matrix", help='operator as "a,b,c;d,e,f;g,h,i" (or family:k=v, optional ^k)')
    p.add_argument("--family", help="family or example name (see family-list)")
    for k in ("m", "n", "a", "b"):
        p.add_argument(f"--{k}", type=int, help=f"family parameter {k}")


def _add_growth(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bound", type=int, help="initial norm bound of the sample (default 16)")
    p.add_argument("--radius", type=int, help="initial translate radius (default 2)")
    p.add_argument("--max-steps", type=int, help="growth steps before giving up (default 8)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kleinsail", description=__doc__.split("\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="torus decompositions and certificates of one operator")
    _add_operator(p)
    _add_growth(p)
    p.add_argument("--orthant", default="all", help='"all" or a sign pattern such as "+-+"')
    p.add_argument("--format", choices=("text", "json", "svg", "obj"), default="text")
    p.add_argument("--out", help="output path for --format (default stdout)")
    p.add_argument("--json", help="also write the cert-v1 document here")
    p.add_argument("--svg", help="also write an SVG net (non-normative)")
    p.add_argument("--obj", help="also write the patch as OBJ text (non-normative)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("classify", help="classify hyperbolic operators of a given norm")
    p.add_argument("--norm", type=int, required=True)
    p.add_argument("--det-filter", choices=("all", "pm1", "p1"), default="all")
    p.add_argument("--jobs", type=int, default=None, help=f"worker processes (env {WORKERS_ENV} overrides)")
    p.add_argument("--max-norm", type=int, default=6)
    p.add_argument("--exploratory", action="store_true", help="allow norms above --max-norm")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    _add_growth(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("equiv", help="compare the fraction certificates of two operators")
    p.add_argument("first", help="operator spec")
    p.add_argument("second", help="operator spec")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    _add_growth(p)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("verify-conjugation", help="check M_t == X^-1 (I - A_t)^-1 X")
    p.add_argument("--t", default="0..10", help='values such as "0..10" or "1,3,5"')
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_conjugation)

    p = sub.add_parser("conjecture-scan", help="distance/triangle flags over a directory of cert-v1 files")
    p.add_argument("directory")
    p.add_argument("--out")
    p.set_defaults(func=cmd_conjecture_scan)

    p = sub.add_parser("family-list", help="list operator families and worked examples")
    p.add_argument("--out")
    p.set_defaults(func=cmd_family_list)
    return ap


def _glue_negative_matrix(argv: Sequence[str]) -> list[str]:
    # argparse reads "-3,1,0;..." as an option; bind it to --matrix explicitly
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok == "--matrix":
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and ("," in nxt or ";" in nxt):
                out.append(f"--matrix={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(_glue_negative_matrix(sys.argv[1:] if argv is None else argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except Exception as exc:  # mapped to documented exit codes below
        for cls, code in _ERRORS:
            if isinstance(exc, cls):
                err = {"error": type(exc).__name__, "message": str(exc)}
                sys.stderr.write(json.dumps(err) + "\n")
                return code
        raise


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
