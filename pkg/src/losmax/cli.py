"""Command line entry point.

Every command writes a JSON run report to stdout.  Streaming commands
(``brute-enum``, ``sweep``, ``lemmas``) first write one JSON line per item.
Exit status: 0 verified, 1 violation found, 2 usage or guard error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from typing import Any, Callable, Iterable, TextIO

from . import certificate, oracle, polytope, sequence
from .rational import fmt_rational, parse_rational

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _radius(text: str):
    try:
        value = parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}") from exc
    if value <= 0:
        raise argparse.ArgumentTypeError("radius must be positive")
    return value


class _Run:
    def __init__(self, command: str, params: dict[str, Any], out: TextIO):
        self.command = command
        self.params = params
        self.out = out

    def line(self, obj: dict) -> None:
        self.out.write(json.dumps(obj) + "\n")

    def stream(self, items: Iterable[dict]) -> None:
        for obj in items:
            self.line(obj)


def _cmd_seq(args, run: _Run) -> tuple[bool, dict | None]:
    table = sequence.build_table(args.n)
    bad = sequence.check_invariants(table)
    n = args.n
    if args.format == "csv":
        w = csv.writer(run.out, lineterminator="\n")
        w.writerow(["i", "a", "b", "c"])
        for i in range(1, n + 1):
            w.writerow([i, table.a[i], table.b[i], table.c[i]])
        return not bad, None
    payload = {
        "n": n,
        "a": list(table.a[1 : n + 1]),
        "b": list(table.b[1 : n + 1]),
        "c": list(table.c[: n + 1]),
        "invariant_failures": bad,
    }
    return not bad, payload


def _cmd_vertex(args, run: _Run) -> tuple[bool, dict]:
    report = polytope.verify_vertex(args.n)
    return report.is_vertex, report.to_json()


def _cmd_brute_enum(args, run: _Run) -> tuple[bool, dict]:
    verts = polytope.enumerate_vertices(args.n, guard=args.guard, threads=args.threads)
    run.stream(
        {"x": [fmt_rational(x) for x in v.point], "basis": [list(lab) for lab in v.basis]} for v in verts
    )
    above_one = all(x >= 1 for v in verts for x in v.point)
    return above_one, {"n": args.n, "vertex_count": len(verts), "all_coordinates_at_least_one": above_one}


def _cmd_certify(args, run: _Run) -> tuple[bool, dict]:
    cert = certificate.check_conjecture(args.n, args.mode)
    return cert.verified, cert.to_json(emit_xstar=args.emit_xstar)


def _cmd_sweep(args, run: _Run) -> tuple[bool, dict]:
    if args.to < args.from_:
        raise argparse.ArgumentTypeError("--to must be at least --from")
    failures = []
    count = 0
    for rec in certificate.sweep(args.from_, args.to, args.mode, threads=args.threads):
        run.line(rec.to_json())
        count += 1
        if not rec.verified:
            failures.append(rec.n)
    return not failures, {"from": args.from_, "to": args.to, "mode": args.mode, "checked": count, "violations": failures}


def _cmd_duality(args, run: _Run) -> tuple[bool, dict]:
    report = certificate.duality_check(args.n)
    return report.verified, report.to_json()


def _cmd_lemmas(args, run: _Run) -> tuple[bool, dict]:
    failed = []
    for rec in certificate.iter_lemma_two(args.jmax):
        run.line(rec.to_json())
        if not rec.holds:
            failed.append(rec.j)
    return not failed, {"jmax": args.jmax, "lemma_two_failures": failed}


def _cmd_brute(args, run: _Run) -> tuple[bool, dict]:
    result = oracle.global_max_bruteforce(args.n, guard=args.guard, threads=args.threads, keep_values=args.all_values)
    return result.alpha_is_unique_max, result.to_json()


def _cmd_probe(args, run: _Run) -> tuple[bool, dict]:
    report = oracle.local_probe(args.n, args.radius, args.samples, args.seed, signed=args.signed, grid=args.grid)
    return not report.exceeded, report.to_json()


COMMANDS: dict[str, Callable] = {
    "seq": _cmd_seq,
    "vertex": _cmd_vertex,
    "brute-enum": _cmd_brute_enum,
    "certify": _cmd_certify,
    "sweep": _cmd_sweep,
    "duality": _cmd_duality,
    "lemmas": _cmd_lemmas,
    "brute": _cmd_brute,
    "probe": _cmd_probe,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive, default=1, help="worker processes (results do not depend on it)")

    parser = argparse.ArgumentParser(prog="losmax", description="Exact checks for the self-generating maximizer.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seq", parents=[common], help="emit the a, b, c tables")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("vertex", parents=[common], help="check alpha is a feasible vertex of P")
    p.add_argument("--n", type=_positive, required=True)

    for name, helptext in (("brute-enum", "stream every vertex of P"), ("brute", "global max of f over vertices of P")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--n", type=_positive, required=True)
        p.add_argument("--guard", type=_positive, default=polytope.DEFAULT_GUARD)
        if name == "brute":
            p.add_argument("--all-values", action="store_true", help="include f at every vertex")

    p = sub.add_parser("certify", parents=[common], help="decide nonnegativity of xi*")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--mode", choices=["full", "reduced"], default="full")
    p.add_argument("--emit-xstar", action="store_true")

    p = sub.add_parser("sweep", parents=[common], help="certify every n in a range")
    p.add_argument("--from", dest="from_", type=_positive, required=True)
    p.add_argument("--to", type=_positive, required=True)
    p.add_argument("--mode", choices=["full", "reduced"], default="full")

    p = sub.add_parser("duality", parents=[common], help="dual feasibility and strong duality")
    p.add_argument("--n", type=_positive, required=True)

    p = sub.add_parser("lemmas", parents=[common], help="Lemma Two records for j <= jmax")
    p.add_argument("--jmax", type=_positive, required=True)

    p = sub.add_parser("probe", parents=[common], help="random perturbations of alpha inside P")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--radius", type=_radius, required=True)
    p.add_argument("--samples", type=_positive, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--grid", type=_positive, default=1000)
    p.add_argument("--signed", action="store_true", help="allow negative perturbations too")
    return parser


def _params(args: argparse.Namespace) -> dict[str, Any]:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key == "command":
            continue
        out[key.rstrip("_")] = fmt_rational(value) if key == "radius" else value
    return out


def run(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    run_ = _Run(args.command, _params(args), out)
    start = time.perf_counter()
    try:
        ok, payload = COMMANDS[args.command](args, run_)
    except (polytope.GuardError, argparse.ArgumentTypeError, ValueError) as exc:
        print(f"losmax {args.command}: {exc}", file=sys.stderr)
        verdict, payload, code = "error", {"error": str(exc)}, EXIT_USAGE
    else:
        verdict, code = ("verified", EXIT_OK) if ok else ("violation", EXIT_VIOLATION)
    if payload is not None:
        report = {
            "command": args.command,
            "parameters": run_.params,
            "verdict": verdict,
            "payload": payload,
            "elapsed_ms": round((time.perf_counter() - start) * 1000, 3),
        }
        run_.line(report)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
