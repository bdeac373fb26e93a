"""FastAPI service exposing every audit as a POST endpoint.

Handlers parse the request (pydantic + spec-string grammars), run the core
package, and return the canonical JSON report bytes: the same request body
always yields the same response bytes (seeds make Monte Carlo reproducible;
wall time travels in the X-Elapsed-Seconds header, never in the body).
Grammar and domain errors map to HTTP 400 with the offending text.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, Request, Response

from .. import convexbody as cb
from .. import fourier as fo
from .. import fusion as fu
from .. import groups as gr
from .. import lengths as ln
from .. import positivity as pos
from .. import symbols as sym
from ..acceptance import run_acceptance
from ..errors import SymauditError
from ..reports import SCHEMA_VERSION, TOOL_VERSION, Stopwatch, canonical_json, envelope
from . import schemas as sch

app = FastAPI(
    title="symaudit",
    version=TOOL_VERSION,
    description="Fourier multiplier symbol audits on groups, fusion rings and convex bodies",
)


@app.exception_handler(SymauditError)
async def _bad_input(request: Request, exc: SymauditError):
    body = {"error": str(exc), "type": type(exc).__name__}
    if getattr(exc, "position", None) is not None:
        body["position"] = exc.position
    return Response(content=canonical_json(body), status_code=400, media_type="application/json")


def _reply(subcommand: str, config: dict, payload: dict, elapsed: float, media: str = "application/json") -> Response:
    if media != "application/json":
        return Response(content=payload["csv"], media_type=media, headers={"X-Elapsed-Seconds": f"{elapsed:.3f}"})
    env = envelope(subcommand, config, payload, wall_time_s=None)
    return Response(
        content=canonical_json(env),
        media_type="application/json",
        headers={"X-Elapsed-Seconds": f"{elapsed:.3f}"},
    )


@app.get("/health")
def health():
    return {"status": "ok", "tool_version": TOOL_VERSION}


@app.get("/schema-version")
def schema_version():
    return {"schema_version": SCHEMA_VERSION}


# ---------------------------------------------------------------------------


def _word_domain(G, radius, cap):
    ball = gr.ball(G, radius, cap=cap)
    return list(ball), sym.word_length_function(G), gr.identity(G)


@app.post("/audit-symbol")
def audit_symbol(req: sch.AuditSymbolRequest):
    with Stopwatch() as sw:
        G = gr.parse_group(req.group) if req.group else None
        name = req.symbol.strip()
        group_based = name.startswith("fejer") or name in ("heat", "poisson")
        if group_based and G is None:
            from ..errors import GrammarError

            raise GrammarError(req.symbol, "this symbol family needs a group")
        if group_based:
            domain, length, base = _word_domain(G, req.ball_radius, req.cap)
        else:
            domain = list(range(1, req.k_max + 1))
            length, base = sym.LengthFunction("k", lambda k: float(k)), None

        if req.condition == "A1":
            if name.startswith("fejer"):
                fam_n = sym.parse_symbol(name, G=G)
                fam = sym.SymbolFamily(
                    name=fam_n.name + "-lacunary",
                    index_kind="discrete",
                    eval_fn=lambda n, g: fam_n.eval_fn(2 ** int(n), g),
                    batch_fn=(lambda n, pts: fam_n.batch_fn(2 ** int(n), pts)) if fam_n.batch_fn else None,
                )
            elif name == "heat":
                fam = sym.lacunary_heat_family(length)
            else:
                cont = sym.parse_symbol(name, G=G, length=length)
                fam = sym.SymbolFamily(
                    name=cont.name + "-lacunary",
                    index_kind="discrete",
                    eval_fn=lambda n, p: cont.eval_fn(2.0 ** float(n), p),
                )
            rep = sym.audit_a1(fam, length, req.alpha, domain, range(req.n_lo, req.n_hi + 1),
                               base_point=base, beta_request=req.beta_request)
        elif req.condition == "difference":
            fam_c = sym.parse_symbol(name, G=G, length=length)
            if fam_c.index_kind == "continuous":
                fam = sym.SymbolFamily(fam_c.name + "@N", "discrete", lambda n, p: fam_c.eval_fn(float(n), p))
            else:
                fam = fam_c
            rep = sym.audit_difference(fam, length, req.alpha, domain,
                                       range(max(req.n_lo, 1), req.n_hi + 1),
                                       base_point=base, beta_request=req.beta_request)
        else:  # A2
            fam = sym.parse_symbol(name, G=G, length=length)
            if fam.index_kind != "continuous":
                from ..errors import GrammarError

                raise GrammarError(name, "A2 needs a continuous family (br, radial, heat, poisson)")
            t_min = req.t_min if req.t_min is not None else (
                sym.min_t0() * 1.01 if name.startswith("radial") else 0.5
            )
            t_max = req.t_max if req.t_max is not None else 64.0 * t_min
            grid = sym.geometric_grid(t_min, t_max)
            rep = sym.audit_a2(fam, length, req.alpha, req.eta, grid, domain,
                               base_point=base, beta_request=req.beta_request)
        payload = rep.to_dict()
    return _reply("audit-symbol", req.model_dump(), payload, sw.elapsed)


def _symbol_on_group(G, name: str, n, t):
    from ..errors import GrammarError

    if name.startswith("fejer"):
        if n is None:
            raise GrammarError(name, "fejer symbols need the index n")
        fam = name.split(":")[1]
        return lambda g: float(sym.fejer_symbol(G, fam, int(n), g))
    if t is None:
        raise GrammarError(name, "continuous symbols need the time t")
    if name.startswith("radial"):
        nu = sym.parse_measure(name[len("radial:"):])
        return lambda g: sym.radial_kernel_symbol(nu, float(t), gr.word_length(G, g))
    if name.startswith("br:delta="):
        delta = float(name[len("br:delta="):])
        return lambda g: sym.bochner_riesz_symbol(float(t), delta, gr.word_length(G, g))
    if name in ("heat", "poisson"):
        ell = sym.word_length_function(G)
        # approximate-identity normalization: time 1/t so t -> infinity approaches 1
        return lambda g: sym.semigroup_symbol(ell, 1.0 / float(t), name, g)
    raise GrammarError(name, "unknown symbol family")


@app.post("/check-pd")
def check_pd(req: sch.CheckPdRequest):
    with Stopwatch() as sw:
        G = gr.parse_group(req.group)
        ball = gr.ball(G, req.ball_radius, cap=req.cap)
        m = _symbol_on_group(G, req.symbol.strip(), req.n, req.t)
        ok, lam, _ = pos.is_positive_definite(m, ball, tol=req.tol)
        payload = {"passed": bool(ok), "min_eigenvalue": lam, "dimension": len(ball)}
    return _reply("check-pd", req.model_dump(), payload, sw.elapsed)


@app.post("/check-cnd")
def check_cnd(req: sch.CheckCndRequest):
    with Stopwatch() as sw:
        G = gr.parse_group(req.group)
        ball = gr.ball(G, req.ball_radius)
        ok, top = pos.is_cnd(sym.word_length_function(G), ball, tol=req.tol)
        payload = {"passed": bool(ok), "zero_sum_max": top, "dimension": len(ball)}
    return _reply("check-cnd", req.model_dump(), payload, sw.elapsed)


@app.post("/schoenberg")
def schoenberg(req: sch.SchoenbergRequest):
    with Stopwatch() as sw:
        G = gr.parse_group(req.group)
        ball = gr.ball(G, req.ball_radius)
        rep = pos.schoenberg_check(sym.word_length_function(G), ball, req.t_grid, tol=req.tol)
        payload = rep.to_dict()
    return _reply("schoenberg", req.model_dump(), payload, sw.elapsed)


@app.post("/build-length")
def build_length(req: sch.BuildLengthRequest):
    with Stopwatch() as sw:
        G = gr.parse_group(req.group)
        fam = (
            ln.z_cube_fejer_family()
            if G.kind == "free-abelian" and G.params[0] == 1
            else ln.fejer_approximating_family(G, cap=req.cap)
        )
        if req.mode == "lacunary":
            sub = ln.lacunary_powers(req.j_max)
            relaxed = req.relaxed
        else:
            sel = ln.select_subsequence(fam, req.horizon, req.verify_window, count=req.count, relaxed=req.relaxed)
            sub = sel.subsequence
            relaxed = sel.relaxed
        domain = [g for g in gr.ball(G, req.domain_radius, cap=req.cap) if g != gr.identity(G)]
        ell = ln.CndLength(fam, sub, relaxed=relaxed, base_point=gr.identity(G), max_eval_level=req.j_max)
        J = np.array([ell.j_index(p) for p in domain])
        env_c = ln.audit_relaxed_envelope(fam, ell, domain, J) if relaxed else 1.0
        ell = ln.CndLength(fam, sub, relaxed=relaxed, envelope_constant=env_c,
                           base_point=gr.identity(G), max_eval_level=req.j_max)
        rep = ln.verify_length_equivalence(ell, domain, j_levels=J)
        payload = {
            "passed": bool(math.isfinite(rep.best_constant)),
            "subsequence": sub,
            "relaxed": relaxed,
            "envelope_constant": env_c,
            "c1": rep.extras["c1"],
            "c2": rep.extras["c2"],
            "ratio": rep.best_constant,
        }
    return _reply("build-length", req.model_dump(), payload, sw.elapsed)


@app.post("/dirichlet")
def dirichlet(req: sch.DirichletRequest):
    with Stopwatch() as sw:
        G = gr.parse_group(req.group)
        if req.group == "zd:1":
            fam = ln.z_cube_fejer_family()
            ell = ln.CndLength(fam, ln.lacunary_powers(80), base_point=(0,))
        else:
            fam = ln.fejer_approximating_family(G, cap=req.cap)
            ell = ln.CndLength(fam, ln.lacunary_powers(4), relaxed=True,
                               base_point=gr.identity(G), max_eval_level=4)
        domain = list(gr.ball(G, req.domain_radius, cap=req.cap))
        rep = ln.dirichlet_symbol_audit(ell, range(req.n_lo, req.n_hi + 1), domain)
        payload = {"passed": bool(math.isfinite(rep.best_constant)), **rep.to_dict()}
    return _reply("dirichlet", req.model_dump(), payload, sw.elapsed)


@app.post("/fejer-experiment")
def fejer_experiment(req: sch.FejerExperimentRequest):
    with Stopwatch() as sw:
        rec = fo.fejer_maximal_experiment(req.n, req.d, req.p, req.trials, req.seed)
        payload = {"passed": True, **rec}
    return _reply("fejer-experiment", req.model_dump(), payload, sw.elapsed)


@app.post("/fusion-fejer")
def fusion_fejer(req: sch.FusionFejerRequest):
    with Stopwatch() as sw:
        ring = fu.parse_ring(req.ring)
        su2 = ring.name.startswith("su2")
        rows = []
        chain_ok = True
        for n in range(0, req.folner_upto + 1):
            if su2:
                K = list(range(0, n + 1))
                max_label = len(ring.labels) - 1
                pi_hi = min(req.pi_max if req.pi_max is not None else max_label - n, max_label - n)
                pis = range(0, max(pi_hi, 0) + 1)
            else:
                K = list(ring.labels[: n + 1]) if n + 1 <= len(ring.labels) else list(ring.labels)
                pis = ring.labels
            for p in pis:
                phi = fu.quantum_fejer(ring, K, p)
                row = {"n": n, "pi": repr(p), "phi": phi}
                if req.check_chain:
                    ratio = fu.folner_ratio(ring, K, p)
                    row["boundary_ratio"] = ratio
                    if 1 - phi > ratio:
                        chain_ok = False
                rows.append(row)
        payload = {"passed": bool(chain_ok), "chain_checked": req.check_chain, "values": rows}
    return _reply("fusion-fejer", req.model_dump(), payload, sw.elapsed)


@app.post("/validate-ring")
def validate_ring(req: sch.ValidateRingRequest):
    with Stopwatch() as sw:
        ring = fu.parse_ring(req.ring)
        labels = None
        if req.labels_upto is not None and ring.name.startswith("su2"):
            labels = range(0, req.labels_upto + 1)
        rep = fu.validate_ring(ring, labels=labels)
        payload = rep.to_dict()
    return _reply("validate-ring", req.model_dump(), payload, sw.elapsed)


@app.post("/bochner-riesz")
def bochner_riesz(req: sch.BochnerRieszRequest):
    with Stopwatch() as sw:
        grid = np.linspace(0.0, 1.0, req.s_points)
        err = sym.bochner_riesz_composition_check(req.alpha, req.beta, grid)
        payload = {"passed": bool(err <= 1e-8), "max_error": err, "tolerance": 1e-8}
    return _reply("bochner-riesz", req.model_dump(), payload, sw.elapsed)


@app.post("/square-constant")
def square_constant(req: sch.SquareConstantRequest):
    with Stopwatch() as sw:
        rows = []
        ok = True
        for alpha in req.alphas:
            cf = sym.square_function_closed_form(alpha)
            vals = [sym.square_function_constant(alpha, k) for k in req.ks]
            dev = max(abs(v - cf) for v in vals)
            rows.append({"alpha": alpha, "closed_form": cf, "quadrature": vals, "max_deviation": dev})
            ok = ok and dev <= req.tolerance
        payload = {"passed": bool(ok), "values": rows}
    return _reply("square-constant", req.model_dump(), payload, sw.elapsed)


@app.post("/convexbody-audit")
def convexbody_audit(req: sch.ConvexBodyAuditRequest):
    with Stopwatch() as sw:
        body = cb.parse_body(req.body)
        xis = cb.default_xi_samples(body, seed=req.seed, magnitudes=tuple(req.magnitudes))
        rep = cb.symbol_bound_audit(body, xis, budget=req.budget, seed=req.seed)
        payload = {"passed": True, **rep.to_dict()}
    return _reply("convexbody-audit", req.model_dump(), payload, sw.elapsed)


@app.post("/dimension-sweep")
def dimension_sweep(req: sch.DimensionSweepRequest):
    with Stopwatch() as sw:
        sweep = cb.dimension_sweep(req.family, req.q, req.dims, req.v_max, req.budget, req.seed)
        if req.format == "csv":
            return _reply("dimension-sweep", req.model_dump(), {"csv": cb.sweep_to_csv(sweep)}, sw.elapsed,
                          media="text/csv")
        payload = {"passed": True, **sweep}
    return _reply("dimension-sweep", req.model_dump(), payload, sw.elapsed)


@app.post("/acceptance")
def acceptance(req: sch.AcceptanceRequest):
    with Stopwatch() as sw:
        payload, _times = run_acceptance(check_determinism=req.check_determinism)
        payload["passed"] = payload["all_passed"]
    return _reply("acceptance", req.model_dump(), payload, sw.elapsed)
