"""Command-line entry point.

Every command validates its input before computing, writes one canonical
JSON (or LaTeX) document, and exits with 0 on success, 1 on a verification
mismatch and 2 on invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .algebra import (AlgebraError, Ambient, element_from_doc, element_to_doc, multiply,
                      to_latex)
from .dr import (CrossValidationError, DRError, DRRequest, Provenance, coefficient_ring,
                 compute_P_d_symbolic, interpolate_in_r, m_graded_parts_by_scaling, symbol_names)
from .graphs import GraphError, enumerate_graphs, graph_from_doc, graph_to_doc
from .oracle import OracleError, fixture_catalog, load_catalog, run_suites
from .stabilization import (StabilizationError, forget_leg, pullback_boundary, pullback_kappa1,
                            pullback_psi)
from .target import Target, TargetError, resolve_target

EXIT_OK, EXIT_MISMATCH, EXIT_INVALID = 0, 1, 2


class UsageError(ValueError):
    pass


def _int_list(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _beta_for(target: Target, text: Optional[str]) -> tuple:
    if text is None:
        raise UsageError("--beta is required")
    beta = _int_list(text)
    if target.curve_rank == 0 and all(b == 0 for b in beta):
        return ()
    if len(beta) != target.curve_rank:
        raise UsageError(f"--beta has {len(beta)} entries but the target has curve rank "
                         f"{target.curve_rank}")
    if any(b < 0 for b in beta):
        raise UsageError("--beta must be effective (nonnegative)")
    return beta


def _target(args) -> Target:
    if not args.target:
        raise UsageError("--target is required")
    return resolve_target(args.target)


def _ambient(args) -> Ambient:
    tg = _target(args)
    if args.g is None or args.n is None:
        raise UsageError("--g and --n are required")
    return Ambient(args.g, args.n, _beta_for(tg, args.beta), tg)


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _read_element(path: str, target: Target):
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise UsageError(f"{path} is not an element document")
    if "element" in doc and "terms" not in doc:
        doc = doc["element"]
    name = doc.get("ambient", {}).get("target")
    if name is not None and name != target.name:
        raise UsageError(f"{path} was written for target {name!r}, not {target.name!r}")
    symbols = tuple(doc.get("symbols", ()))
    return element_from_doc(doc, target, coefficient_ring(symbols)), symbols


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _element_output(element, args, symbols=(), extra=None, provenance=None) -> str:
    if getattr(args, "format", "json") == "latex":
        return to_latex(element) + "\n"
    doc = {"command": args.command, "element": element_to_doc(element, symbols)}
    if extra:
        doc.update(extra)
    if provenance is not None:
        doc["provenance"] = provenance
    return _dump(doc)


# -- commands ----------------------------------------------------------------

def cmd_graphs(args) -> tuple:
    if args.max_edges is None:
        raise UsageError("--max-edges is required")
    if args.g is None or args.n is None:
        raise UsageError("--g and --n are required")
    if args.shapes_only:
        beta = ()
        target_name = args.target
    else:
        tg = _target(args)
        beta = _beta_for(tg, args.beta)
        target_name = tg.name
    graphs = enumerate_graphs(args.g, args.n, beta, args.max_edges, shapes_only=args.shapes_only)
    doc = {"command": "graphs",
           "request": {"g": args.g, "n": args.n, "beta": list(beta), "target": target_name,
                       "max_edges": args.max_edges, "shapes_only": bool(args.shapes_only)},
           "count": len(graphs), "graphs": [graph_to_doc(gr) for gr in graphs]}
    return EXIT_OK, _dump(doc)


def cmd_multiply(args) -> tuple:
    tg = _target(args)
    a, sa = _read_element(args.a, tg)
    b, sb = _read_element(args.b, tg)
    if a.ambient != b.ambient:
        raise UsageError("the two elements live on different ambients")
    if sa and sb and sa != sb:
        raise UsageError("the two elements use different coefficient symbols")
    return EXIT_OK, _element_output(multiply(a, b), args, sa or sb)


def cmd_dr(args) -> tuple:
    amb = _ambient(args)
    if args.d is None:
        raise UsageError("--d is required")
    if args.symbolic == (args.A is not None):
        raise UsageError("give exactly one of --A and --symbolic")
    A = None if args.symbolic else _int_list(args.A)
    req = DRRequest(amb.g, amb.n, amb.target, amb.beta, args.k, args.d, A)
    prov = Provenance()
    request_doc = {"g": amb.g, "n": amb.n, "beta": list(amb.beta), "target": amb.target.name,
                   "d": args.d, "k": args.k, "A": list(A) if A is not None else "symbolic"}
    if args.m_parts:
        if A is not None or args.k != 0:
            raise UsageError("--m-parts needs --symbolic and k = 0")
        parts = m_graded_parts_by_scaling(amb.g, amb.n, amb.target, amb.beta, args.d,
                                          workers=args.workers, provenance=prov)
        symbols = symbol_names(amb.n)
        if args.format == "latex":
            text = "".join(f"% m^{j}\n{to_latex(el)}\n" for j, el in parts.items())
            return EXIT_OK, text
        doc = {"command": "dr", "request": request_doc,
               "m_parts": {str(j): element_to_doc(el, symbols) for j, el in parts.items()},
               "provenance": prov.as_doc()}
        return EXIT_OK, _dump(doc)
    if A is None:
        from .dr import check_dr_data
        problem = check_dr_data(req)
        if problem:
            raise DRError(problem)
        P = compute_P_d_symbolic(amb.g, amb.n, amb.target, amb.beta, args.k, args.d,
                                 workers=args.workers, provenance=prov)
        symbols = symbol_names(amb.n)
    else:
        P = interpolate_in_r(req, provenance=prov)
        symbols = ()
    return EXIT_OK, _element_output(P, args, symbols, {"request": request_doc}, prov.as_doc())


def cmd_pullback(args) -> tuple:
    amb = _ambient(args)
    chosen = [args.psi is not None, args.kappa1, args.boundary is not None]
    if sum(chosen) != 1:
        raise UsageError("give exactly one of --psi, --kappa1, --boundary")
    if args.psi is not None:
        el = pullback_psi(args.psi, amb)
    elif args.kappa1:
        el = pullback_kappa1(amb)
    else:
        el = pullback_boundary(graph_from_doc(_read_json(args.boundary)), amb)
    return EXIT_OK, _element_output(el, args)


def cmd_pushforward(args) -> tuple:
    tg = _target(args)
    el, symbols = _read_element(args.element, tg)
    i = args.forget if args.forget is not None else el.ambient.n
    return EXIT_OK, _element_output(forget_leg(el, i), args, symbols)


def cmd_verify_paper(args) -> tuple:
    if args.write_catalog:
        Path(args.write_catalog).write_text(_dump(fixture_catalog()), encoding="utf-8")
    scales = None
    if args.fixtures:
        scales = load_catalog(_read_json(args.fixtures))
    checks = run_suites(args.example, scales=scales)
    lines = [c.line() if c.ok else c.line() + "\n" + c.detail for c in checks]
    passed = sum(c.ok for c in checks)
    lines.append(f"{passed}/{len(checks)} checks passed")
    code = EXIT_OK if passed == len(checks) else EXIT_MISMATCH
    return code, "\n".join(lines) + "\n"


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stablemaps", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    amb = argparse.ArgumentParser(add_help=False)
    amb.add_argument("--g", type=int)
    amb.add_argument("--n", type=int)
    amb.add_argument("--beta", help="comma-separated curve class coordinates")
    amb.add_argument("--target", help='"point", "P1:s", "P2:s" or a target file')

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--out", help="write the document here instead of stdout")
    out.add_argument("--format", choices=("json", "latex"), default="json")

    p = sub.add_parser("graphs", parents=[amb, out], help="enumerate stable graphs")
    p.add_argument("--max-edges", type=int)
    p.add_argument("--shapes-only", action="store_true")
    p.set_defaults(func=cmd_graphs)

    p = sub.add_parser("multiply", parents=[out], help="product of two element documents")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--target")
    p.set_defaults(func=cmd_multiply)

    p = sub.add_parser("dr", parents=[amb, out], help="double-ramification relation")
    p.add_argument("--d", type=int)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--A", help="comma-separated ramification data")
    p.add_argument("--symbolic", action="store_true")
    p.add_argument("--m-parts", action="store_true", help="split by the m-grading (k = 0)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_dr)

    p = sub.add_parser("pullback", parents=[amb, out], help="pullback along stabilization")
    p.add_argument("--psi", type=int)
    p.add_argument("--kappa1", action="store_true")
    p.add_argument("--boundary", help="graph document of a stable curve graph")
    p.set_defaults(func=cmd_pullback)

    p = sub.add_parser("pushforward", parents=[out], help="forget a marking")
    p.add_argument("element")
    p.add_argument("--forget", type=int, help="leg to forget (default: the last)")
    p.add_argument("--target")
    p.set_defaults(func=cmd_pushforward)

    p = sub.add_parser("verify-paper", help="compare against the recorded fixtures")
    p.add_argument("example", help='"2.6", "2.7", "4.2", "4.3", "4.4", "4.5" or "all"')
    p.add_argument("--fixtures", help="fixture catalog document")
    p.add_argument("--write-catalog", help="also write the built-in catalog here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_paper)
    return parser


INVALID = (UsageError, TargetError, GraphError, AlgebraError, StabilizationError, OracleError,
           DRError)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", 1) is not None and getattr(args, "workers", 1) < 1:
        print("error: --workers must be positive", file=sys.stderr)
        return EXIT_INVALID
    try:
        code, text = args.func(args)
    except CrossValidationError as exc:
        print(f"self-check failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except INVALID as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
