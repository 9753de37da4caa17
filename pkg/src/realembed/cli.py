"""Command-line client for the embedding service.

By default commands run against an in-process instance of the HTTP
service; ``--server`` points them at a remote one instead.  Exit codes:
0 success, 1 input error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import httpx

from .serialize import ParseError, dump_json, load_document

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFY = 2


def make_client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app
    return TestClient(app, raise_server_exceptions=False)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code == 422:
        detail = resp.json().get("detail", resp.text)
        raise ParseError(str(detail))
    resp.raise_for_status()
    return resp.json()


def _emit(result: dict, args, text_renderer) -> None:
    if args.format == "json":
        out = dump_json(result, args.out)
        if args.out is None:
            print(out)
    else:
        text = text_renderer(result)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)


def _algebra_text(result: dict) -> str:
    lines = [f"{'check':<32} {'status':<8} {'worst residual':>15}"]
    for c in result["checks"]:
        status = "pass" if c["passed"] else "FAIL"
        lines.append(f"{c['name']:<32} {status:<8} {c['max_residual']:>15.3e}")
    lines.append(f"overall: {'pass' if result['passed'] else 'FAIL'}")
    return "\n".join(lines)


def _verify_text(result: dict) -> str:
    rep = result["report"]
    lines = [f"kind: {result['kind']}",
             f"max deviation: {rep['max_deviation']:.3e}",
             f"tolerance: {rep['tol']:.1e}"]
    indep = rep.get("independence")
    if indep:
        lines.append(f"operational independence: {indep['operational']} "
                     f"(residual {indep['operational_residual']:.3e})")
    lines.append(f"result: {'pass' if result['passed'] else 'FAIL'}")
    return "\n".join(lines)


def _witness_text(result: dict) -> str:
    w = result["witness"]
    lines = [
        f"local sweep max deviation: {w['local_max_deviation']:.3e}",
        f"global outcome distribution (Kronecker-composed): "
        f"({w['global_kron'][0]:.6f}, {w['global_kron'][1]:.6f})",
        f"global outcome distribution (R-composed):         "
        f"({w['global_r'][0]:.6f}, {w['global_r'][1]:.6f})",
        "phase-correlated family sweep:",
    ]
    for s in result["caves_sweep"]:
        lines.append(f"  alpha={s['alpha']:<5} product={s['product_state']!s:<6}"
                     f" operational={s['operational']}")
    lines.append(f"result: {'pass' if result['passed'] else 'FAIL'}")
    return "\n".join(lines)


def cmd_check_algebra(client, args) -> int:
    seed = os.environ.get("REALEMBED_SEED")
    payload = {"max_fold": args.max_fold,
               "seed": int(seed) if seed is not None else None,
               "inject_fault": args.inject_fault}
    result = _post(client, "/algebra/check", payload)
    _emit(result, args, _algebra_text)
    if not result["passed"]:
        print(f"failed checks: {', '.join(result['failed_checks'])}",
              file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(client, args) -> int:
    doc = load_document(args.input)
    result = _post(client, "/verify", {"document": doc, "tol": args.tol})
    _emit(result, args, _verify_text)
    return EXIT_OK if result["passed"] else EXIT_VERIFY


def cmd_embed(client, args) -> int:
    doc = load_document(args.input)
    result = _post(client, "/embed", {"document": doc, "tol": args.tol})
    _emit(result, args, lambda r: dump_json(r))
    return EXIT_OK


def cmd_witness(client, args) -> int:
    result = _post(client, "/witness", {"tol": args.tol})
    _emit(result, args, _witness_text)
    return EXIT_OK if result["passed"] else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="realembed",
        description="Embed complex quantum models into real quantum theory "
                    "and verify statistics preservation.")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; defaults to an "
                             "in-process instance")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=1e-9,
                       help="relative verification tolerance")
        p.add_argument("--out", default=None, help="write the report here")
        p.add_argument("--format", choices=("json", "text"), default="text")

    p = sub.add_parser("check-algebra",
                       help="run the algebraic property suite")
    common(p)
    p.add_argument("--max-fold", type=int, default=5,
                   help="largest fold count exercised")
    p.add_argument("--inject-fault", default=None,
                   help=argparse.SUPPRESS)  # test hook: e.g. 'phase-rep'
    p.set_defaults(fn=cmd_check_algebra)

    p = sub.add_parser("verify",
                       help="verify a scenario/protocol file (embedding it "
                            "first if it is complex)")
    common(p)
    p.add_argument("input", help="scenario, protocol, or embedded bundle "
                                 "JSON file")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("embed",
                       help="write the real counterpart of a complex model")
    common(p)
    p.add_argument("input", help="complex scenario or protocol JSON file")
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("witness",
                       help="run the local/global distinguishability "
                            "demonstration")
    common(p)
    p.set_defaults(fn=cmd_witness)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with make_client(args.server) as client:
            return args.fn(client, args)
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except httpx.HTTPError as exc:
        print(f"service error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except json.JSONDecodeError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
