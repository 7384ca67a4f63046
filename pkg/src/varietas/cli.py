"""Batch command-line front end.

A thin client over the service: requests go through an in-process ASGI
transport by default, or to a remote instance via ``--server``.  Verdicts
print one per line with machine-parseable prefixes; exit codes are a
function of the verdict alone (EQUAL 0, UNEQUAL 1, UNKNOWN 2), with 64 for
parse errors, 65 for bad machine files, and 66 for file I/O problems.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

import httpx

EX_PARSE = 64
EX_MACHINE = 65
EX_IO = 66


def _client(server: Optional[str]) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # in-process: drive the ASGI app directly through a sync portal
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app, raise_server_exceptions=False)


def _read(path: Optional[str]) -> Optional[str]:
    if path is None:
        return None
    try:
        return Path(path).read_text()
    except OSError as exc:
        print(f"IO-ERROR {exc}", file=sys.stderr)
        raise SystemExit(EX_IO)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code == 400:
        body = resp.json()
        kind = body.get("error", "parse")
        print(f"ERROR({kind}) {body.get('message', '')}", file=sys.stderr)
        raise SystemExit({"parse": EX_PARSE, "machine": EX_MACHINE,
                          "io": EX_IO}.get(kind, EX_PARSE))
    resp.raise_for_status()
    return resp.json()


def cmd_solve(args: argparse.Namespace) -> int:
    payload = {
        "variety": args.variety,
        "presentation": _read(args.presentation) or "",
        "query": args.query,
        "machine": _read(args.machine),
        "case": args.case,
        "trace": args.trace,
    }
    if args.stage_bound is not None:
        payload["stage_bound"] = args.stage_bound
    if args.time_window is not None:
        payload["time_window"] = args.time_window
    if args.space_window is not None:
        payload["space_window"] = args.space_window
    if args.base_table is not None:
        payload["base_table"] = (
            "derive" if args.base_table == "derive" else _read(args.base_table))
    if args.x_listing is not None:
        payload["x_listing"] = (
            args.x_listing if args.x_listing.startswith("builtin:")
            else _read(args.x_listing))
    with _client(args.server) as client:
        body = _post(client, "/solve", payload)
    verdict = body["verdict"]
    if verdict == "UNKNOWN":
        print(f"UNKNOWN({body.get('reason', '')})")
    else:
        print(verdict)
    extra = []
    if body.get("case"):
        extra.append(f"case={body['case']}")
    if body.get("table_mode") and body["table_mode"] != "none":
        extra.append(f"base-table={body['table_mode']}")
    if body.get("stage_used") is not None:
        extra.append(f"stage={body['stage_used']}")
    if extra:
        print("# " + " ".join(extra))
    if args.trace:
        for line in body.get("trace", []):
            print(f"trace: {line}")
    return {"EQUAL": 0, "UNEQUAL": 1, "UNKNOWN": 2}[verdict]


def cmd_simulate(args: argparse.Namespace) -> int:
    payload = {"machine": _read(args.machine), "tape": args.tape,
               "steps": args.steps}
    with _client(args.server) as client:
        body = _post(client, "/simulate", payload)
    for line in body["lines"]:
        print(line)
    return 0


def cmd_gen_presentation(args: argparse.Namespace) -> int:
    payload = {"machine": _read(args.machine), "tape": args.tape}
    with _client(args.server) as client:
        body = _post(client, "/presentation/from-tape", payload)
    sys.stdout.write(body["presentation"])
    return 0


def cmd_normalize(args: argparse.Namespace) -> int:
    payload = {"variety": args.variety, "term": args.term,
               "machine": _read(args.machine),
               "generators": args.generators.split() if args.generators else []}
    with _client(args.server) as client:
        body = _post(client, "/normalize", payload)
    print(body["normal_form"])
    print(f"# shape={body['shape']} time={body['time']} space={body['space']}")
    return 0


def cmd_check_laws(args: argparse.Namespace) -> int:
    payload = {"machine": _read(args.machine), "tape": args.tape,
               "time_window": args.time_window,
               "space_window": args.space_window}
    with _client(args.server) as client:
        body = _post(client, "/check-laws", payload)
    print(f"checked: {body['checked']}")
    print(f"skipped outside window: {body['skipped_outside_window']}")
    print(f"violations: {len(body['violations'])}")
    for v in body["violations"]:
        print(f"  {v}")
    print(f"0 != 1: {body['zero_one_separated']}")
    return 0 if not body["violations"] else 1


def cmd_demo(args: argparse.Namespace) -> int:
    if args.scenario not in ("halting", "looping"):
        print(f"ERROR(parse) unknown scenario {args.scenario!r}", file=sys.stderr)
        return EX_PARSE
    payload = {"scenario": args.scenario, "time_window": args.time_window,
               "space_window": args.space_window}
    with _client(args.server) as client:
        body = _post(client, "/demo", payload)
    for line in body["lines"]:
        print(line)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varietas",
        description="word-problem workbench for machine-encoding varieties",
    )
    parser.add_argument("--server", default=None,
                        help="remote service URL (default: in-process)")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("solve", help="decide a word-problem query")
    p.add_argument("--variety", required=True,
                   choices=["free", "fb", "const", "inf"])
    p.add_argument("-p", "--presentation", required=True)
    p.add_argument("--query", required=True, help="'<term> = <term>'")
    p.add_argument("--machine", default=None)
    p.add_argument("--case", default="auto",
                   choices=["auto", "degenerate", "nondegenerate"])
    p.add_argument("--stage-bound", type=int, default=None)
    p.add_argument("--base-table", default=None, help="FILE or 'derive'")
    p.add_argument("--time-window", type=int, default=None)
    p.add_argument("--space-window", type=int, default=None)
    p.add_argument("--x-listing", default=None, help="FILE or 'builtin:<name>'")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("simulate-tm", help="run a machine on a tape")
    p.add_argument("--machine", required=True)
    p.add_argument("--tape", required=True)
    p.add_argument("--steps", type=int, default=50)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("gen-presentation",
                       help="presentation encoding an initial tape")
    p.add_argument("--machine", required=True)
    p.add_argument("--tape", required=True)
    p.set_defaults(fn=cmd_gen_presentation)

    p = sub.add_parser("normalize", help="space-time normal form of a term")
    p.add_argument("--variety", default="fb", choices=["fb", "const"])
    p.add_argument("--term", required=True)
    p.add_argument("--machine", default=None)
    p.add_argument("--generators", default="")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("check-laws", help="law check on a separating slice")
    p.add_argument("--machine", required=True)
    p.add_argument("--tape", required=True)
    p.add_argument("--time-window", type=int, default=20)
    p.add_argument("--space-window", type=int, default=20)
    p.set_defaults(fn=cmd_check_laws)

    p = sub.add_parser("demo", help="run a bundled scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--time-window", type=int, default=20)
    p.add_argument("--space-window", type=int, default=20)
    p.set_defaults(fn=cmd_demo)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8109)
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code not in (0, None):
            raise SystemExit(EX_PARSE)
        raise
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
