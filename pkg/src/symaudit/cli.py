"""Thin command-line client for the audit service.

Every subcommand builds a request model, sends it through the HTTP layer --
in-process against the ASGI app by default, or to a running server with
--server -- and writes the response bytes unchanged.  Because the service
emits canonical JSON, re-running an identical invocation reproduces the
report byte for byte.

Exit codes: 0 when every requested pass-criterion holds, 2 when the report
was produced but an audit failed, 1 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import httpx

from .reports import SCHEMA_VERSION


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=3600.0)
    from .service.app import app

    return httpx.Client(transport=httpx.ASGITransport(app=app), base_url="http://symaudit.local", timeout=None)


def _post(args, endpoint: str, body: dict) -> int:
    t0 = time.perf_counter()
    with _client(args.server) as client:
        try:
            resp = client.post(endpoint, json=body)
        except httpx.HTTPError as exc:
            print(f"error: cannot reach service: {exc}", file=sys.stderr)
            return 1
    elapsed = time.perf_counter() - t0
    if resp.status_code in (400, 422):
        print(f"error: {resp.text}", file=sys.stderr)
        return 1
    if resp.status_code != 200:
        print(f"error: service returned {resp.status_code}: {resp.text[:500]}", file=sys.stderr)
        return 1
    data = resp.content
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        if not data.endswith(b"\n"):
            sys.stdout.write("\n")
    print(f"[{endpoint.strip('/')}] wall time {elapsed:.2f}s", file=sys.stderr)
    if resp.headers.get("content-type", "").startswith("text/csv"):
        return 0
    payload = json.loads(data).get("payload", {})
    passed = payload.get("passed")
    if passed is False:
        return 2
    return 0


def _add_common(p):
    p.add_argument("--server", help="URL of a running service; default runs in-process")
    p.add_argument("--output", "-o", help="write the report to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="symaudit", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("audit-symbol", help="audit A1/A2/difference conditions of a symbol family")
    p.add_argument("--group")
    p.add_argument("--symbol", required=True)
    p.add_argument("--cond", choices=["A1", "A2", "difference"], required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--eta", type=int, default=1)
    p.add_argument("--ball", type=int, default=4)
    p.add_argument("--k-max", type=int, default=16)
    p.add_argument("--n-lo", type=int, default=0)
    p.add_argument("--n-hi", type=int, default=6)
    p.add_argument("--t-min", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--beta", type=float, help="requested bound; enables pass/fail")
    p.add_argument("--cap", type=int)
    _add_common(p)

    p = sub.add_parser("check-pd", help="positive definiteness of a symbol on a ball")
    p.add_argument("--group", required=True)
    p.add_argument("--symbol", required=True)
    p.add_argument("--ball", type=int, default=3)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--cap", type=int)
    _add_common(p)

    p = sub.add_parser("check-cnd", help="conditional negative definiteness of the word length")
    p.add_argument("--group", required=True)
    p.add_argument("--ball", type=int, default=3)
    p.add_argument("--tol", type=float, default=1e-10)
    _add_common(p)

    p = sub.add_parser("schoenberg", help="e^{-t l} positive definite across a t-grid")
    p.add_argument("--group", required=True)
    p.add_argument("--ball", type=int, default=3)
    p.add_argument("--t-grid", type=float, nargs="+")
    p.add_argument("--tol", type=float, default=1e-10)
    _add_common(p)

    p = sub.add_parser("build-length", help="build the series length and audit its sqrt(2)^J comparison")
    p.add_argument("--group", required=True)
    p.add_argument("--mode", choices=["lacunary", "selected"], default="lacunary")
    p.add_argument("--j-max", type=int, default=4)
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--count", type=int)
    p.add_argument("--strict", action="store_true", help="use the strict selection inequality")
    p.add_argument("--domain", type=int, default=8)
    p.add_argument("--cap", type=int)
    _add_common(p)

    p = sub.add_parser("dirichlet", help="Dirichlet-difference symbol audit of a built length")
    p.add_argument("--group", choices=["zd:1", "heis3"], default="zd:1")
    p.add_argument("--n-lo", type=int, default=0)
    p.add_argument("--n-hi", type=int, default=10)
    p.add_argument("--domain", type=int, default=16)
    p.add_argument("--cap", type=int)
    _add_common(p)

    p = sub.add_parser("fejer-experiment", help="empirical maximal ratios of Fejer means on (Z/n)^d")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("fusion-fejer", help="quantum Fejer values and the boundary-ratio chain")
    p.add_argument("--ring", required=True)
    p.add_argument("--folner", default="upto:16", help="upto:<n> for K_n = {0..n}")
    p.add_argument("--pi-max", type=int)
    p.add_argument("--check-chain", action="store_true", default=True)
    p.add_argument("--no-check-chain", dest="check_chain", action="store_false")
    _add_common(p)

    p = sub.add_parser("validate-ring", help="exhaustive fusion-ring consistency check")
    p.add_argument("--ring", required=True)
    p.add_argument("--labels-upto", type=int)
    _add_common(p)

    p = sub.add_parser("bochner-riesz", help="composition identity quadrature check")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--s-points", type=int, default=64)
    _add_common(p)

    p = sub.add_parser("square-constant", help="square-function constant vs closed form")
    p.add_argument("--alphas", type=float, nargs="+", default=[0.0, 0.5, 1.0, 2.0])
    p.add_argument("--ks", type=int, nargs="+", default=[1, 8, 32])
    p.add_argument("--tolerance", type=float, default=1e-8)
    _add_common(p)

    p = sub.add_parser("convexbody-audit", help="dimension-free symbol bounds of a convex body")
    p.add_argument("--body", required=True)
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("dimension-sweep", help="constants across dimensions; CSV or JSON")
    p.add_argument("--family", choices=["cube", "ball", "lq"], default="lq")
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--dims", type=int, nargs="+", default=[2, 4, 8])
    p.add_argument("--v-max", type=int, default=1)
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    _add_common(p)

    p = sub.add_parser("acceptance", help="run the full pinned acceptance suite")
    p.add_argument("--skip-determinism", action="store_true")
    _add_common(p)

    p = sub.add_parser("schema-version", help="print the report schema version")
    _add_common(p)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cmd = args.command

    if cmd == "schema-version":
        print(SCHEMA_VERSION)
        return 0
    if cmd == "audit-symbol":
        body = {
            "group": args.group, "symbol": args.symbol, "condition": args.cond,
            "alpha": args.alpha, "eta": args.eta, "ball_radius": args.ball,
            "k_max": args.k_max, "n_lo": args.n_lo, "n_hi": args.n_hi,
            "t_min": args.t_min, "t_max": args.t_max, "beta_request": args.beta, "cap": args.cap,
        }
        return _post(args, "/audit-symbol", body)
    if cmd == "check-pd":
        return _post(args, "/check-pd", {
            "group": args.group, "symbol": args.symbol, "ball_radius": args.ball,
            "n": args.n, "t": args.t, "tol": args.tol, "cap": args.cap,
        })
    if cmd == "check-cnd":
        return _post(args, "/check-cnd", {"group": args.group, "ball_radius": args.ball, "tol": args.tol})
    if cmd == "schoenberg":
        body = {"group": args.group, "ball_radius": args.ball, "tol": args.tol}
        if args.t_grid:
            body["t_grid"] = args.t_grid
        return _post(args, "/schoenberg", body)
    if cmd == "build-length":
        return _post(args, "/build-length", {
            "group": args.group, "mode": args.mode, "j_max": args.j_max,
            "horizon": args.horizon, "verify_window": args.window, "count": args.count,
            "relaxed": not args.strict, "domain_radius": args.domain, "cap": args.cap,
        })
    if cmd == "dirichlet":
        return _post(args, "/dirichlet", {
            "group": args.group, "n_lo": args.n_lo, "n_hi": args.n_hi,
            "domain_radius": args.domain, "cap": args.cap,
        })
    if cmd == "fejer-experiment":
        return _post(args, "/fejer-experiment", {
            "n": args.n, "d": args.d, "p": args.p, "trials": args.trials, "seed": args.seed,
        })
    if cmd == "fusion-fejer":
        folner = args.folner
        if not folner.startswith("upto:"):
            print("error: --folner must look like upto:<n>", file=sys.stderr)
            return 1
        return _post(args, "/fusion-fejer", {
            "ring": args.ring, "folner_upto": int(folner[5:]),
            "pi_max": args.pi_max, "check_chain": args.check_chain,
        })
    if cmd == "validate-ring":
        return _post(args, "/validate-ring", {"ring": args.ring, "labels_upto": args.labels_upto})
    if cmd == "bochner-riesz":
        return _post(args, "/bochner-riesz", {
            "alpha": args.alpha, "beta": args.beta, "s_points": args.s_points,
        })
    if cmd == "square-constant":
        return _post(args, "/square-constant", {
            "alphas": args.alphas, "ks": args.ks, "tolerance": args.tolerance,
        })
    if cmd == "convexbody-audit":
        return _post(args, "/convexbody-audit", {
            "body": args.body, "budget": args.budget, "seed": args.seed,
        })
    if cmd == "dimension-sweep":
        return _post(args, "/dimension-sweep", {
            "family": args.family, "q": args.q, "dims": args.dims, "v_max": args.v_max,
            "budget": args.budget, "seed": args.seed, "format": args.format,
        })
    if cmd == "acceptance":
        return _post(args, "/acceptance", {"check_determinism": not args.skip_determinism})
    print(f"error: unknown command {cmd}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
