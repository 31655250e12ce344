"""Command-line front end: a thin client of the computation service.

By default requests run against an in-process instance of the service (no
network); ``--server URL`` points the same client at a remote one.  Exit
status contract: 0 success, 1 verification failure, 2 parse/usage error,
3 inconclusive result.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import httpx

EXIT_OK = 0
EXIT_VERIFICATION_FAILURE = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


def _client(server: Optional[str]) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=600.0)
    # in-process: drive the ASGI app directly, no network involved
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from starlette.testclient import TestClient

        from .service import create_app
        return TestClient(create_app(), raise_server_exceptions=False)


def _read_document(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise SystemExit(_usage_error(f"cannot read document: {exc}"))


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _print_error(body) -> int:
    err = body.get("error", {}) if isinstance(body, dict) else {}
    msg = err.get("message", "request failed")
    loc = ""
    if err.get("line") is not None:
        loc = f" (line {err['line']}, column {err['column']})"
    elif err.get("where"):
        loc = f" (at {err['where']})"
    print(f"error: {msg}{loc}", file=sys.stderr)
    return EXIT_USAGE


def _post(client: httpx.Client, path: str, payload: dict):
    response = client.post(path, json=payload)
    if response.status_code == 200:
        return response.json(), None
    try:
        body = response.json()
    except ValueError:
        body = {"error": {"message": response.text}}
    return None, _print_error(body)


def _point_text(obj: dict) -> str:
    if "vertex" in obj:
        return obj["vertex"]
    return f"{obj['edge']}[{obj['offset']}]"


def _divisor_text(terms) -> str:
    if not terms:
        return "0"
    return ", ".join(f"{_point_text(t['point'])}:{t['coeff']}" for t in terms)


def _emit(args, record: dict, text: str) -> None:
    if args.output == "records":
        print(json.dumps(record, sort_keys=True))
    else:
        print(text)


def cmd_rank(args, client) -> int:
    payload = {"document": _read_document(args.document), "divisor": args.divisor,
               "scale_cap": args.scale_cap}
    body, err = _post(client, "/v1/rank", payload)
    if err is not None:
        return err
    lines = [f"rank: {body['rank']}",
             f"scales tested: {', '.join(map(str, body['scales_tested']))}",
             f"stabilized: {'yes' if body['stabilized'] else 'no'}"]
    if body.get("witness") is not None:
        lines.append(f"witness: {_divisor_text(body['witness'])}")
    _emit(args, body, "\n".join(lines))
    return EXIT_OK if body["stabilized"] else EXIT_INCONCLUSIVE


def cmd_rr(args, client) -> int:
    payload = {"document": _read_document(args.document), "divisor": args.divisor,
               "scale_cap": args.scale_cap}
    body, err = _post(client, "/v1/rr", payload)
    if err is not None:
        return err
    text = (f"{body['rank_d']} - {body['rank_kd']} = "
            f"{body['degree']} + 1 - {body['genus']} {body['status'].upper()}")
    _emit(args, body, text)
    if body["status"] == "pass":
        return EXIT_OK
    if body["status"] == "fail":
        return EXIT_VERIFICATION_FAILURE
    return EXIT_INCONCLUSIVE


def cmd_canonical(args, client) -> int:
    body, err = _post(client, "/v1/canonical",
                      {"document": _read_document(args.document)})
    if err is not None:
        return err
    _emit(args, body, _divisor_text(body["divisor"]))
    return EXIT_OK


def cmd_reduce(args, client) -> int:
    payload = {"document": _read_document(args.document), "divisor": args.divisor}
    if args.base:
        payload["base"] = args.base
    body, err = _post(client, "/v1/reduce", payload)
    if err is not None:
        return err
    text = (f"reduced: {_divisor_text(body['reduced'])}\n"
            f"base: {body['base']}\nscale: {body['scale']}")
    _emit(args, body, text)
    return EXIT_OK


def cmd_equiv(args, client) -> int:
    payload = {"document": _read_document(args.document),
               "divisor1": args.divisor1, "divisor2": args.divisor2}
    body, err = _post(client, "/v1/equiv", payload)
    if err is not None:
        return err
    text = "equivalent: yes" if body["equivalent"] else "equivalent: no"
    if body.get("witness"):
        text += f"\nwitness: {json.dumps(body['witness'])}"
    _emit(args, body, text)
    return EXIT_OK


def cmd_cells(args, client) -> int:
    payload = {
        "document": _read_document(args.document), "divisor": args.divisor,
        "caps": {"max_edges": args.caps_edges, "max_degree": args.caps_degree},
    }
    body, err = _post(client, "/v1/cells", payload)
    if err is not None:
        return err
    dims = ", ".join(f"{d}: {c}" for d, c in sorted(body["dims"].items(),
                                                    key=lambda kv: int(kv[0])))
    text = (f"cells: {len(body['cells'])}\ndims: {{{dims}}}\n"
            f"max dimension: {body['max_dimension']}")
    if body["truncated"]:
        text += "\ntruncated: yes (partial result)"
    _emit(args, body, text)
    return EXIT_INCONCLUSIVE if body["truncated"] else EXIT_OK


def cmd_ord(args, client) -> int:
    try:
        point = json.loads(args.point)
    except json.JSONDecodeError as exc:
        return _usage_error(f"bad point: {exc.msg}")
    payload = {"document": _read_document(args.document),
               "function": args.function, "point": point}
    body, err = _post(client, "/v1/ord", payload)
    if err is not None:
        return err
    _emit(args, body, f"order: {body['order']}")
    return EXIT_OK


def cmd_campaign(args, client) -> int:
    config = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                config = json.load(fh)
        except OSError as exc:
            return _usage_error(f"cannot read config: {exc}")
        except json.JSONDecodeError as exc:
            return _usage_error(f"bad config: {exc.msg} (line {exc.lineno})")
    config["seed"] = args.seed
    if args.scale_cap is not None:
        config["scale_cap"] = args.scale_cap
    body, err = _post(client, "/v1/campaign", {"config": config})
    if err is not None:
        return err
    if args.output == "records":
        for record in body["records"]:
            print(json.dumps(record, sort_keys=True))
        print(json.dumps({"summary": body["summary"]}, sort_keys=True))
    else:
        s = body["summary"]
        print(f"instances: {s['instances']}  passed: {s['passed']}  "
              f"failed: {s['failed']}  inconclusive: {s['inconclusive']}  "
              f"runtime: {s['runtime']}s")
        for record in body["records"]:
            if record["status"] != "pass":
                print(f"  instance {record['index']}: {record['status']} "
                      f"(lhs={record['lhs']}, rhs={record['rhs']})")
    if body["summary"]["failed"]:
        return EXIT_VERIFICATION_FAILURE
    if body["summary"]["inconclusive"]:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_serve(args, client) -> int:
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tropdiv",
        description="Exact divisor ranks on metric graphs and tropical curves")
    parser.add_argument("--server", default=None,
                        help="URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, divisor=True):
        p.add_argument("document", help="path to a document file")
        if divisor:
            p.add_argument("divisor", help="divisor name within the document")
        p.add_argument("--output", choices=["text", "records"], default="text")

    p = sub.add_parser("rank", help="rank of a divisor")
    common(p)
    p.add_argument("--scale-cap", type=int, default=4)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("rr", help="verify the rank identity for a divisor")
    common(p)
    p.add_argument("--scale-cap", type=int, default=4)
    p.set_defaults(func=cmd_rr)

    p = sub.add_parser("canonical", help="canonical divisor of the graph")
    common(p, divisor=False)
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("reduce", help="base-point reduced form of a divisor")
    common(p)
    p.add_argument("--base", default=None, help="base vertex id")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("equiv", help="decide linear equivalence of two divisors")
    p.add_argument("document")
    p.add_argument("divisor1")
    p.add_argument("divisor2")
    p.add_argument("--output", choices=["text", "records"], default="text")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("cells", help="enumerate configuration-space cells")
    common(p)
    p.add_argument("--caps-edges", type=int, default=4)
    p.add_argument("--caps-degree", type=int, default=3)
    p.set_defaults(func=cmd_cells)

    p = sub.add_parser("ord", help="order of a function at a point")
    p.add_argument("document")
    p.add_argument("function")
    p.add_argument("point", help='point as JSON, e.g. {"vertex": "P"}')
    p.add_argument("--output", choices=["text", "records"], default="text")
    p.set_defaults(func=cmd_ord)

    p = sub.add_parser("campaign", help="run a randomized verification campaign")
    p.add_argument("config", nargs="?", default=None, help="JSON config file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--scale-cap", type=int, default=None)
    p.add_argument("--output", choices=["text", "records"], default="text")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("serve", help="run the service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    if args.command == "serve":
        return cmd_serve(args, None)
    try:
        with _client(args.server) as client:
            return args.func(args, client)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except httpx.HTTPError as exc:
        return _usage_error(f"service unreachable: {exc}")


if __name__ == "__main__":
    sys.exit(main())
