"""Command line front end: file I/O, report emission, exit codes.

A thin client over the same report builders the HTTP service uses.
Exit codes: 0 for success (tractable, verified, reference match), 2 for
a hard verdict or a failed verification (the report says which), 1 for
usage and file errors.  ``--json`` emits the machine-readable report for
the shipped schemas; the default is a short human-readable summary.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pydantic import ValidationError

from . import __version__
from .service import models, ops


class CliError(Exception):
    """Usage or file problem; message goes to stderr, exit code 1."""


class Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 means "hard verdict"
    # here, so route usage problems to exit code 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def load_file(path: str, model):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror or exc}")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")
    try:
        return model.model_validate(payload)
    except ValidationError as exc:
        lines = [
            f"{path}: {'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        ]
        raise CliError("\n".join(lines))


def emit(payload: dict, as_json: bool, human: str) -> None:
    print(json.dumps(payload, indent=2) if as_json else human)


def format_chain(chain) -> str:
    return "<".join(str(v) for v in chain)


def classification_exit(report: dict, as_json: bool) -> int:
    if report["verdict"] == "tractable":
        emit(report, as_json, f"tractable, chain {format_chain(report['chain'])}")
        return 0
    w = report["witness"]
    emit(
        report,
        as_json,
        "apx_complete, witness sub-domain "
        f"{','.join(str(v) for v in w['sub_domain'])}"
        f" via {','.join(w['predicates'])}",
    )
    return 2


# ---------------------------------------------------------------------------
# handlers


def cmd_classify(args) -> int:
    language = load_file(args.file, models.LanguageFile).to_language()
    return classification_exit(ops.classify_language(language), args.json)


def cmd_monge_check(args) -> int:
    matrix = load_file(args.file, models.MatrixFile).to_matrix()
    report = ops.monge_check(matrix, args.method)
    if report["anti_monge"]:
        emit(report, args.json, f"anti-Monge ({args.method} check)")
        return 0
    i, j, k, l = report["violation"]
    emit(report, args.json, f"not anti-Monge, violation rows {i},{j} cols {k},{l}")
    return 2


def cmd_monge_permute(args) -> int:
    matrix = load_file(args.file, models.MatrixFile).to_matrix()
    report = ops.monge_permute(matrix)
    if report["found"]:
        emit(
            report,
            args.json,
            f"permutation {','.join(str(v) for v in report['permutation'])}",
        )
        return 0
    emit(
        report,
        args.json,
        "no permutation works, bad index set "
        + ",".join(str(v) for v in report["witness_indices"]),
    )
    return 2


def cmd_verify_impl(args) -> int:
    if args.catalog == (args.file is not None):
        raise CliError("give exactly one of an implementation file or --catalog")
    if args.catalog:
        report = ops.verify_catalog()
        if report["verified"]:
            emit(report, args.json, f"{report['passed']}/{report['total']} verified")
            return 0
        failing = [
            r["source"]
            for r in report["items"]
            if not (r["verified"] and r["consequence_holds"])
        ]
        emit(
            report,
            args.json,
            f"{report['passed']}/{report['total']} verified; "
            "failing: " + ", ".join(failing),
        )
        return 2
    impl = load_file(args.file, models.ImplementationFile).to_implementation()
    report = ops.verify_implementation(impl)
    if report["verified"]:
        emit(report, args.json, f"verified, alpha {report['alpha']}")
        return 0
    f = report["failure"]
    emit(
        report,
        args.json,
        f"verification failed at {f['assignment']}: "
        f"achieved {f['achieved']}, expected {f['expected']}",
    )
    return 2


def cmd_reproduce(args) -> int:
    payload = ops.reproduce(args.case, audit=args.audit)
    report, diff = payload["report"], payload["diff"]
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(
            f"{args.case}: {len(report['items'])} items "
            f"in {report['seconds']}s"
        )
        for name, count in report["stages"]:
            print(f"  {name}: {count}")
        expected = diff["matched"] + len(diff["missing"])
        print(f"reference match: {diff['matched']}/{expected}")
        for key in diff["missing"]:
            print(f"  missing: {key}")
        for key in diff["unexpected"]:
            print(f"  unexpected: {key}")
    return 0 if diff["agrees"] else 2


def cmd_solve(args) -> int:
    instance = load_file(args.file, models.InstanceFile).to_instance()
    report = ops.solve(instance, args.method)
    assignment = " ".join(f"{v}={a}" for v, a in report["assignment"].items())
    emit(
        report,
        args.json,
        f"cost {report['cost']} of total {report['total_weight']} "
        f"({report['method']})\n{assignment}",
    )
    return 0


def cmd_hcolor_classify(args) -> int:
    digraph = load_file(args.file, models.DigraphFile).to_digraph()
    return classification_exit(ops.classify_hcolor(digraph), args.json)


def cmd_hcolor_instance(args) -> int:
    payload = {
        "g": load_file(args.g, models.DigraphFile).model_dump(),
        "h": load_file(args.h, models.DigraphFile).model_dump(),
    }
    for key, path in (
        ("lists", args.lists),
        ("scores", args.scores),
        ("arc_weights", args.arc_weights),
    ):
        if path is not None:
            try:
                payload[key] = json.loads(Path(path).read_text())
            except OSError as exc:
                raise CliError(f"{path}: {exc.strerror or exc}")
            except json.JSONDecodeError as exc:
                raise CliError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")
    try:
        req = models.HcolorInstanceRequest.model_validate(payload)
    except ValidationError as exc:
        raise CliError(
            "\n".join(
                f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
                for err in exc.errors()
            )
        )
    report = ops.hcolor_instance(
        req.g.to_digraph(), req.h.to_digraph(), req.lists, req.scores, req.weight_map()
    )
    text = json.dumps(report, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("mcsp.service.app:app", host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> Parser:
    parser = Parser(prog="mcsp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_json(p):
        p.add_argument("--json", action="store_true", help="emit the JSON report")

    p = sub.add_parser("classify", help="dichotomy verdict for a language file")
    p.add_argument("file")
    add_json(p)
    p.set_defaults(handler=cmd_classify)

    monge = sub.add_parser("monge", help="anti-Monge checks on a matrix file")
    monge_sub = monge.add_subparsers(dest="subcommand", required=True)
    p = monge_sub.add_parser("check", help="is the matrix anti-Monge as given")
    p.add_argument("file")
    p.add_argument(
        "--method", choices=("adjacent", "full", "both"), default="adjacent"
    )
    add_json(p)
    p.set_defaults(handler=cmd_monge_check)
    p = monge_sub.add_parser("permute", help="search for an anti-Monge ordering")
    p.add_argument("file")
    add_json(p)
    p.set_defaults(handler=cmd_monge_permute)

    p = sub.add_parser("verify-impl", help="re-verify implementations")
    p.add_argument("file", nargs="?")
    p.add_argument(
        "--catalog", action="store_true", help="verify the whole shipped catalog"
    )
    add_json(p)
    p.set_defaults(handler=cmd_verify_impl)

    p = sub.add_parser("reproduce", help="re-run a case search against the reference")
    p.add_argument("case", choices=("case1", "case2", "case3"))
    p.add_argument("--audit", action="store_true", help="include per-item audit data")
    p.add_argument(
        "--jobs",
        type=int,
        default=1,
        help="accepted for compatibility; searches run single-process",
    )
    add_json(p)
    p.set_defaults(handler=cmd_reproduce)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("file")
    p.add_argument("--method", choices=("brute", "approx"), default="brute")
    add_json(p)
    p.set_defaults(handler=cmd_solve)

    hcolor = sub.add_parser("hcolor", help="digraph homomorphism front end")
    hcolor_sub = hcolor.add_subparsers(dest="subcommand", required=True)
    p = hcolor_sub.add_parser("classify", help="dichotomy verdict for a digraph file")
    p.add_argument("file")
    add_json(p)
    p.set_defaults(handler=cmd_hcolor_classify)
    p = hcolor_sub.add_parser(
        "instance", help="build a list-coloring instance from digraph files"
    )
    p.add_argument("g", help="input digraph file")
    p.add_argument("h", help="target digraph file")
    p.add_argument("--lists", help="JSON file of per-vertex value lists")
    p.add_argument("--scores", help="JSON file of per-vertex value scores")
    p.add_argument("--arc-weights", help="JSON file of [u, v, weight] triples")
    p.add_argument("-o", "--output", help="write the instance here instead of stdout")
    p.set_defaults(handler=cmd_hcolor_instance)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("mcsp: error: --jobs must be at least 1", file=sys.stderr)
        return 1
    try:
        return args.handler(args)
    except CliError as exc:
        print(f"mcsp: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"mcsp: error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
