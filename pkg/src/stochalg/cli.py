"""Batch driver, written as a thin client of the verification service.

`run` and `demo` POST the parsed config to the service and write the returned
reports/tables to disk. Without `--server` the service app is mounted
in-process over an ASGI transport, so no network or separate process is
needed; with `--server URL` the same requests hit a remote instance.

Exit codes: 0 all suites passed, 1 a suite failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

import httpx

from .serialize import canonical_json


def _post(path: str, payload: dict, server: str | None) -> tuple[int, dict]:
    def decode(r):
        try:
            return r.status_code, r.json()
        except Exception:
            return r.status_code, {"detail": r.text[:500]}

    async def go():
        if server:
            async with httpx.AsyncClient(base_url=server, timeout=600.0) as client:
                return decode(await client.post(path, json=payload))
        from .service.app import app
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://stochalg.local",
                                     timeout=600.0) as client:
            return decode(await client.post(path, json=payload))

    return asyncio.run(go())


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)


def cmd_run(args) -> int:
    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    status, body = _post("/run", config, args.server)
    if status == 422:
        print(f"error: {body.get('detail', body)}", file=sys.stderr)
        return 2
    if status != 200:
        print(f"error: service returned {status}: {body}", file=sys.stderr)
        return 2

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, report in body["reports"].items():
        (out / f"{name}.json").write_text(canonical_json(report))
    (out / "summary.json").write_text(canonical_json(body["summary"]))
    # timings vary run to run, so they live outside the deterministic reports
    (out / "timings.json").write_text(json.dumps(body["timings"], indent=2) + "\n")

    for name, passed in body["summary"]["suites"].items():
        print(f"{'PASS' if passed else 'FAIL'}  {name}")
    overall = body["summary"]["passed"]
    print(f"{'PASS' if overall else 'FAIL'}  overall -> {out}")
    return 0 if overall else 1


def cmd_demo(args) -> int:
    config = _load_config(args.config)
    if "seed" not in config:
        print("error: config must carry a seed", file=sys.stderr)
        return 2
    status, body = _post("/demo", {"seed": int(config["seed"])}, args.server)
    if status != 200:
        print(f"error: {body.get('detail', body)}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, csv_text in body["tables"].items():
        (out / name).write_text(csv_text)
        print(f"wrote {out / name}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stochalg",
        description="Run verification suites for stochastic products on quantum states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run verification suites from a config file")
    p_run.add_argument("--config", required=True, help="path to a JSON run config")
    p_run.add_argument("--out", default="reports", help="output directory for reports")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--server", default=None, help="remote service URL (default: in-process)")
    p_run.set_defaults(func=cmd_run)

    p_demo = sub.add_parser("demo", help="emit demonstration CSV tables")
    p_demo.add_argument("--config", required=True, help="path to a JSON config with a seed")
    p_demo.add_argument("--out", default="tables", help="output directory for CSVs")
    p_demo.add_argument("--server", default=None, help="remote service URL")
    p_demo.set_defaults(func=cmd_demo)

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
