"""FastAPI service exposing the package operations.

One endpoint per CLI subcommand; the CLI is a thin client of this app
(in-process by default, over HTTP against a running server with
--server).  Payloads mirror the JSON exchange formats of `serialize`;
numeric report fields carry the relevant truncation tail estimates.
Heavy state (coset tables, multiplier caches) lives for the process, so
repeated requests against the same group/bound stay cheap.
"""

from __future__ import annotations

import math
import random

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import serialize
from .automorphy import MultiplierSystem, growth_fit
from .cohomology import (Cocycle, coboundary_test, infinity_witness, parabolic_test)
from .eichler import (PeriodFitError, PeriodPolynomial, eichler_integral,
                      period_direct, period_integral)
from .forms import (FourierExpansion, classify, cuspform11_expansion,
                    delta_expansion, eisenstein_qexp, eta_product_expansion)
from .modgroup import GroupElement, Subgroup, parse_matrix, parse_word
from .poincare import (AutomorphicIntegral, EisensteinSeries, NearZeroDenominator,
                       PoincareSeries, SeriesConfig, construct_automorphic_integral,
                       select_kprime, threshold, transformation_residual)

app = FastAPI(title="gmfperiods", version="0.1.0")


def _bad_request(msg: str):
    raise HTTPException(status_code=400, detail=msg)


def _group(spec: str) -> Subgroup:
    try:
        return Subgroup.parse(spec)
    except ValueError as exc:
        _bad_request(str(exc))


def _complex(pair) -> complex:
    return complex(pair[0], pair[1])


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


NAMED_FORMS = {
    "delta": lambda n: delta_expansion(n),
    "eta": lambda n: eta_product_expansion(n),
    "cuspform11": lambda n: cuspform11_expansion(n),
}


def _named_form(name: str, terms: int) -> FourierExpansion:
    if name in NAMED_FORMS:
        return NAMED_FORMS[name](terms)
    if name.startswith("E") and name[1:].isdigit():
        return eisenstein_qexp(int(name[1:]), terms)
    _bad_request(f"unknown form {name!r}; use delta, eta, cuspform11 or E<k>")


def _element(group: Subgroup, matrix: list[int] | None, word: str | None) -> GroupElement:
    if (matrix is None) == (word is None):
        _bad_request("specify exactly one of matrix and word")
    try:
        if matrix is not None:
            m = GroupElement(*matrix)
        else:
            m = parse_word(word, group)
    except (ValueError, TypeError) as exc:
        _bad_request(str(exc))
    if not group.contains(m):
        _bad_request(f"element is not in {group.name}")
    return m


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "service": "gmfperiods"}


# -- cusps -----------------------------------------------------------------

class CuspsRequest(BaseModel):
    group: str


@app.post("/cusps")
def cusps(req: CuspsRequest) -> dict:
    g = _group(req.group)
    rows = []
    for c in g.cusp_classes():
        rows.append({
            "cusp": c.label(),
            "width": c.width,
            "scaling_matrix": list(c.scaling.tuple()),
            "parabolic_generator": list(c.parabolic.tuple()),
        })
    return {"group": g.name, "index": g.index(), "cusps": rows}


# -- forms -----------------------------------------------------------------

class FormRequest(BaseModel):
    name: str
    terms: int = Field(default=60, ge=1, le=100000)
    eval_point: list[float] | None = None


@app.post("/form")
def form(req: FormRequest) -> dict:
    e = _named_form(req.name, req.terms)
    out = {
        "name": req.name,
        "expansion": serialize.expansion_to_dict(e),
        "classification": e.classify().value,
    }
    if req.eval_point is not None:
        z = _complex(req.eval_point)
        if z.imag <= 0:
            _bad_request("evaluation point must have positive imaginary part")
        val, tail = e.eval_with_tail(z)
        out["value"] = _pair(val)
        out["tail_estimate"] = tail if math.isfinite(tail) else None
    return out


# -- period polynomials -------------------------------------------------------

class PeriodPolyRequest(BaseModel):
    group: str = "SL2Z"
    weight: int = Field(default=10, ge=0, description="the k of weight -k")
    multiplier: object = "trivial"
    form: str = "delta"
    terms: int = Field(default=150, ge=16, le=100000)
    matrix: list[int] | None = None
    word: str | None = None
    route: str = Field(default="both", pattern="^(direct|integral|both)$")


@app.post("/period-poly")
def period_poly(req: PeriodPolyRequest) -> dict:
    g = _group(req.group)
    k = req.weight
    try:
        v = serialize.parse_multiplier(req.multiplier, g, -float(k))
    except serialize.FormatError as exc:
        _bad_request(str(exc))
    m = _element(g, req.matrix, req.word)
    src = _named_form(req.form, req.terms)
    out = {"group": g.name, "weight": -k, "matrix": list(m.tuple())}
    if req.route in ("direct", "both"):
        try:
            f = eichler_integral(src, k)
            pd = period_direct(f, m, v)
        except (ValueError, PeriodFitError) as exc:
            _bad_request(str(exc))
        out["direct"] = serialize.period_to_dict(pd)
    if req.route in ("integral", "both"):
        try:
            pi_ = period_integral(src, m, v, k)
        except ValueError as exc:
            _bad_request(str(exc))
        out["integral"] = serialize.period_to_dict(pi_)
    if req.route == "both":
        a = np.array([complex(*c) for c in out["direct"]["coeffs"]])
        b = np.array([complex(*c) for c in out["integral"]["coeffs"]])
        scale = float(max(np.abs(a).max(), np.abs(b).max(), 1e-300))
        out["cross_residual"] = float(np.abs(a - b).max() / scale)
    return out


# -- cocycle certificates ------------------------------------------------------

class CocycleRequest(BaseModel):
    cocycle: dict
    trials: int = Field(default=20, ge=1, le=1000)
    seed: int = 0


def _load_cocycle(payload: dict) -> Cocycle:
    try:
        return serialize.cocycle_from_dict(payload)
    except serialize.FormatError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/cocycle/verify")
def cocycle_verify(req: CocycleRequest) -> dict:
    c = _load_cocycle(req.cocycle)
    resid = c.consistency_check(trials=req.trials, rng=random.Random(req.seed))
    return {"operation": "verify", "max_residual": resid, "trials": req.trials,
            "consistent": bool(resid < 1e-7)}


@app.post("/cocycle/coboundary")
def cocycle_coboundary(req: CocycleRequest) -> dict:
    c = _load_cocycle(req.cocycle)
    cert = coboundary_test(c)
    return {"operation": "coboundary", "certificate": serialize.certificate_to_dict(cert)}


@app.post("/cocycle/parabolic")
def cocycle_parabolic(req: CocycleRequest) -> dict:
    c = _load_cocycle(req.cocycle)
    certs = parabolic_test(c)
    labels = [cusp.label() for cusp in c.group.cusp_classes()]
    return {"operation": "parabolic",
            "certificates": {lab: serialize.certificate_to_dict(ct)
                             for lab, ct in zip(labels, certs)}}


# -- threshold -----------------------------------------------------------------

class ThresholdRequest(BaseModel):
    rho: float = Field(ge=0)
    sigma: float = Field(ge=0)
    k: float
    alpha: float


@app.post("/threshold")
def threshold_endpoint(req: ThresholdRequest) -> dict:
    rep = threshold(req.rho, req.sigma, req.k, req.alpha)
    out = rep.to_dict()
    out["kprime_suggested"] = select_kprime(rep.psi)
    return out


# -- poincare ---------------------------------------------------------------------

class PoincareRequest(BaseModel):
    cocycle: dict | None = None
    fixture: str | None = None          # "zero" | "coboundary-x2" | "delta"
    group: str = "SL2Z"
    weight: int = 10
    kprime: int | None = None
    bound: int = Field(default=10000, ge=1, le=2_000_000)
    z: list[float] | None = None
    points: list[list[float]] | None = None
    matrix: list[int] | None = None
    word: str | None = None
    terms: int = 150
    phi0_offset: float = 0.0


def _poincare_inputs(req: PoincareRequest) -> tuple[Cocycle, SeriesConfig]:
    from .fixtures import cocycle_fixture

    if (req.cocycle is None) == (req.fixture is None):
        _bad_request("specify exactly one of cocycle and fixture")
    if req.cocycle is not None:
        c = _load_cocycle(req.cocycle)
    else:
        try:
            c = cocycle_fixture(req.fixture, _group(req.group), req.weight,
                                terms=req.terms, offset=req.phi0_offset)
        except ValueError as exc:
            _bad_request(str(exc))
    profile = _cocycle_profile(c)
    alpha = growth_fit(c.v, n_samples=60)[1]
    try:
        cfg = SeriesConfig.for_cocycle(c, req.bound, profile, alpha, kprime=req.kprime)
    except ValueError as exc:
        _bad_request(str(exc))
    return c, cfg


def _cocycle_profile(c: Cocycle):
    from .cohomology import GrowthProfile

    if c.is_polynomial:
        deg = max((int(np.abs(p.coeffs).nonzero()[0].max()) if np.abs(p.coeffs).any() else 0)
                  for p in c.assignment.values())
        return GrowthProfile(K=1.0, rho=max(deg, 0.5), sigma=0.5)
    from .cohomology import fit_growth_profile

    return fit_growth_profile(lambda z: max(abs(p.eval(z)) for p in c.assignment.values()))


@app.post("/poincare/eval")
def poincare_eval_endpoint(req: PoincareRequest) -> dict:
    c, cfg = _poincare_inputs(req)
    if req.z is None:
        _bad_request("z is required")
    z = _complex(req.z)
    try:
        series = PoincareSeries(c, cfg)
    except ValueError as exc:
        _bad_request(str(exc))
    val, tail = series.eval_with_tail(z)
    return {"value": _pair(val), "B": cfg.bound,
            "tail_estimate": tail if math.isfinite(tail) else None,
            "kprime": cfg.kprime, "psi": cfg.threshold_report.psi}


@app.post("/poincare/transform")
def poincare_transform(req: PoincareRequest) -> dict:
    c, cfg = _poincare_inputs(req)
    m = _element(c.group, req.matrix, req.word)
    pts = [_complex(p) for p in (req.points or [[0.0, 2.0], [0.3, 2.0]])]
    try:
        series = PoincareSeries(c, cfg)
    except ValueError as exc:
        _bad_request(str(exc))
    eis = EisensteinSeries(cfg)
    resid = transformation_residual(c, cfg, m, pts, series=series, eis=eis)
    tails = [series.eval_with_tail(z)[1] for z in pts]
    return {"residual": resid, "B": cfg.bound, "kprime": cfg.kprime,
            "psi": cfg.threshold_report.psi,
            "tail_estimate": max(t for t in tails if math.isfinite(t)) if tails else None}


@app.post("/poincare/construct")
def poincare_construct(req: PoincareRequest) -> dict:
    c, cfg = _poincare_inputs(req)
    try:
        phi0 = infinity_witness(c)
        if req.phi0_offset and c.is_polynomial:
            phi0 = phi0 + PeriodPolynomial([req.phi0_offset], int(c.k))
        f = construct_automorphic_integral(c, phi0, cfg)
    except (ValueError, AssertionError) as exc:
        _bad_request(str(exc))
    pts = [_complex(p) for p in (req.points or [[0.3, 2.0], [-0.4, 2.5]])]
    from .modgroup import S, T

    point_reports = []
    worst = 0.0
    for z in pts:
        try:
            rep = f.eval_with_report(z)
            checks = {}
            for name, m in (("S", S), ("T", T)):
                if not c.group.contains(m):
                    continue
                rep_mz = f.eval_with_report(m.act(z))
                slash_scale = abs((m.c * z + m.d) ** int(c.k) / c.v.value(m))
                lhs = rep_mz["value"] / c.v.value(m) * (m.c * z + m.d) ** int(c.k) - rep["value"]
                phi_m = c.value(m).eval(z)
                checks[name] = {
                    "residual": abs(lhs - phi_m),
                    "allowance": 10.0 * (rep_mz["tail"] * slash_scale + rep["tail"]),
                }
                worst = max(worst, abs(lhs - phi_m))
        except NearZeroDenominator as exc:
            point_reports.append({"z": _pair(z), "refused": str(exc)})
            continue
        point_reports.append({"z": _pair(z), "value": _pair(rep["value"]),
                              "tail_estimate": rep["tail"], "eq20": checks})
    return {"B": cfg.bound, "kprime": cfg.kprime, "psi": cfg.threshold_report.psi,
            "points": point_reports, "max_eq20_residual": worst}
