"""Command-line front end: a thin client of the FastAPI service.

By default requests run against the in-process app (no server needed);
--server http://host:port targets a running instance instead.  Reports
are JSON (CSV only for coefficient tables).  Exit codes: 0 success or a
decided verdict, 1 an inconclusive verdict, 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, asdict

import httpx

from .serialize import FormatError, dumps

USAGE_ERROR = 2
INCONCLUSIVE = 1


@dataclass
class RunConfig:
    """Defaults shared by the subcommands; JSON round-trips unchanged."""

    group: str = "SL2Z"
    weight: float = 10.0
    multiplier: object = "trivial"
    form: str = "delta"
    terms: int = 150
    bound: int = 10000
    out: str | None = None
    format: str = "json"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        bad = set(d) - known
        if bad:
            raise FormatError("config", f"unknown keys {sorted(bad)}")
        return cls(**d)


class Client:
    """HTTP client over the in-process app or a remote server."""

    def __init__(self, server: str | None = None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            # sync-over-ASGI client against the in-process app
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app, raise_server_exceptions=False)

    def post(self, path: str, payload: dict) -> dict:
        resp = self._client.post(path, json=payload)
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except Exception:
                detail = resp.text
            raise FormatError(path, str(detail))
        return resp.json()


def _emit(report: dict, args, csv_rows=None) -> None:
    fmt = args.format
    if fmt == "csv":
        if csv_rows is None:
            raise FormatError("--format", "csv output is only available for coefficient tables")
        buf = io.StringIO()
        writer = csv.writer(buf)
        for row in csv_rows:
            writer.writerow(row)
        text = buf.getvalue()
    else:
        text = dumps(report) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _coeff_rows(header: str, coeffs: list) -> list:
    rows = [["index", f"{header}_re", f"{header}_im"]]
    for i, (re, im) in enumerate(coeffs):
        rows.append([i, repr(re), repr(im)])
    return rows


def _parse_z(text: str) -> list[float]:
    try:
        z = complex(text.replace(" ", ""))
    except ValueError as exc:
        raise FormatError("z", f"bad complex number {text!r}") from exc
    return [z.real, z.imag]


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(path, str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc


def _element_payload(args) -> dict:
    if getattr(args, "matrix", None):
        from .modgroup import parse_matrix

        return {"matrix": list(parse_matrix(args.matrix).tuple())}
    if getattr(args, "word", None):
        return {"word": args.word}
    raise FormatError("element", "need --matrix a,b,c,d or --word like 'T S^2'")


# -- subcommand handlers -------------------------------------------------------


def cmd_cusps(client: Client, args, cfg: RunConfig) -> int:
    report = client.post("/cusps", {"group": cfg.group})
    rows = [["cusp", "width", "scaling_matrix", "parabolic_generator"]]
    for c in report["cusps"]:
        rows.append([c["cusp"], c["width"],
                     " ".join(map(str, c["scaling_matrix"])),
                     " ".join(map(str, c["parabolic_generator"]))])
    _emit(report, args, rows)
    return 0


def cmd_form(client: Client, args, cfg: RunConfig) -> int:
    payload = {"name": args.name or cfg.form, "terms": cfg.terms}
    if args.eval_at:
        payload["eval_point"] = _parse_z(args.eval_at)
    report = client.post("/form", payload)
    _emit(report, args, _coeff_rows("a", report["expansion"]["coeffs"]))
    return 0


def cmd_period_poly(client: Client, args, cfg: RunConfig) -> int:
    if cfg.weight != int(cfg.weight):
        raise FormatError(
            "--weight", "polynomial output needs an integer weight; non-integer "
            "weights produce sampled functions (use the library API)")
    payload = {
        "group": cfg.group, "weight": int(cfg.weight), "multiplier": cfg.multiplier,
        "form": cfg.form, "terms": cfg.terms, "route": args.route,
    }
    payload.update(_element_payload(args))
    report = client.post("/period-poly", payload)
    key = "direct" if args.route == "direct" else "integral"
    _emit(report, args, _coeff_rows("c", report[key]["coeffs"]))
    return 0


def cmd_cocycle(client: Client, args, cfg: RunConfig) -> int:
    if args.action == "fixture":
        from . import serialize
        from .fixtures import cocycle_fixture
        from .modgroup import Subgroup

        c = cocycle_fixture(args.name, Subgroup.parse(cfg.group),
                            int(cfg.weight), terms=cfg.terms, offset=args.offset)
        report = serialize.cocycle_to_dict(c)
        _emit(report, args)
        return 0
    payload = {"cocycle": _load_json(args.file), "trials": args.trials, "seed": args.seed}
    report = client.post(f"/cocycle/{args.action}", payload)
    _emit(report, args)
    verdicts = []
    if "certificate" in report:
        verdicts.append(report["certificate"]["verdict"])
    if "certificates" in report:
        verdicts.extend(c["verdict"] for c in report["certificates"].values())
    return INCONCLUSIVE if "inconclusive" in verdicts else 0


def cmd_threshold(client: Client, args, cfg: RunConfig) -> int:
    report = client.post("/threshold", {"rho": args.rho, "sigma": args.sigma,
                                        "k": args.k, "alpha": args.alpha})
    _emit(report, args)
    return 0


def cmd_poincare(client: Client, args, cfg: RunConfig) -> int:
    payload = {
        "group": cfg.group, "weight": int(cfg.weight), "bound": cfg.bound,
        "terms": cfg.terms,
    }
    if args.kprime:
        payload["kprime"] = args.kprime
    if args.cocycle_file:
        payload["cocycle"] = _load_json(args.cocycle_file)
    else:
        payload["fixture"] = args.fixture or "zero"
        payload["phi0_offset"] = args.offset
    if args.action == "eval":
        payload["z"] = _parse_z(args.z or "0+2j")
        report = client.post("/poincare/eval", payload)
    elif args.action == "transform":
        payload.update(_element_payload(args))
        if args.z:
            payload["points"] = [_parse_z(args.z)]
        report = client.post("/poincare/transform", payload)
    else:
        if args.z:
            payload["points"] = [_parse_z(args.z)]
        report = client.post("/poincare/construct", payload)
    _emit(report, args)
    return 0


def cmd_serve(client: Client, args, cfg: RunConfig) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# -- parser ----------------------------------------------------------------------


def _global_flags(p: argparse.ArgumentParser, suppress: bool = False) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--group", default=d, help='subgroup: "SL2Z" or "Gamma0(N)"')
    p.add_argument("--weight", type=float, default=d, help="the k of weight -k actions")
    p.add_argument("--multiplier", default=d,
                   help='"trivial", "eta_power(s)", "gmf_example(c)" or a JSON table')
    p.add_argument("--terms", type=int, default=d, help="q-expansion truncation")
    p.add_argument("--bound", type=int, default=d, help="series truncation c^2+d^2 <= B")
    p.add_argument("--out", default=d, help="write the report to this path")
    p.add_argument("--format", choices=("json", "csv"), default=d)
    p.add_argument("--config", default=d, help="JSON RunConfig with defaults")
    p.add_argument("--server", default=d, help="URL of a running service (default: in-process)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gmfperiods",
        description="Eichler cohomology of generalized modular forms: "
                    "cusp data, period polynomials, cocycle certificates, "
                    "Poincare series.")
    _global_flags(p)

    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text)
        _global_flags(sp, suppress=True)
        return sp

    add("cusps", "cusp classes, widths, scaling matrices")

    f = add("form", "named expansion (delta, eta, cuspform11, E<k>)")
    f.add_argument("--name", default=None)
    f.add_argument("--eval-at", default=None, help="complex point like 0.3+2j")

    pp = add("period-poly", "period polynomial of a group element")
    pp.add_argument("--matrix", default=None, help='entries "a,b,c,d"')
    pp.add_argument("--word", default=None, help='generator word like "T S^2"')
    pp.add_argument("--route", choices=("direct", "integral", "both"), default="both")

    cc = add("cocycle", "verify / coboundary / parabolic / fixture")
    cc.add_argument("action", choices=("verify", "coboundary", "parabolic", "fixture"))
    cc.add_argument("file", nargs="?", help="serialized cocycle (for verify/coboundary/parabolic)")
    cc.add_argument("--name", default="zero", help="fixture name (for fixture)")
    cc.add_argument("--offset", type=float, default=0.0, help="fixture primitive offset")
    cc.add_argument("--trials", type=int, default=20)
    cc.add_argument("--seed", type=int, default=0)

    th = add("threshold", "e, eta, psi from (rho, sigma, k, alpha)")
    th.add_argument("rho", type=float)
    th.add_argument("sigma", type=float)
    th.add_argument("k", type=float)
    th.add_argument("alpha", type=float)

    po = add("poincare", "eval / transform / construct")
    po.add_argument("action", choices=("eval", "transform", "construct"))
    po.add_argument("--cocycle-file", default=None)
    po.add_argument("--fixture", default=None, help="zero | coboundary-x2 | delta")
    po.add_argument("--offset", type=float, default=0.0)
    po.add_argument("--kprime", type=int, default=None)
    po.add_argument("--z", default=None, help="complex point like 0.3+2j")
    po.add_argument("--matrix", default=None)
    po.add_argument("--word", default=None)

    sv = add("serve", "run the HTTP service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)

    return p


HANDLERS = {
    "cusps": cmd_cusps,
    "form": cmd_form,
    "period-poly": cmd_period_poly,
    "cocycle": cmd_cocycle,
    "threshold": cmd_threshold,
    "poincare": cmd_poincare,
    "serve": cmd_serve,
}


def merge_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = RunConfig.from_dict(_load_json(args.config))
    for name in ("group", "weight", "multiplier", "terms", "bound", "out", "format"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    if cfg.format not in ("json", "csv"):
        raise FormatError("config.format", f"bad format {cfg.format!r}")
    args.out = cfg.out
    args.format = cfg.format
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = merge_config(args)
        if args.command == "cocycle" and args.action != "fixture" and not args.file:
            raise FormatError("cocycle", f"{args.action} needs a cocycle file")
        server = getattr(args, "server", None)
        client = Client(server) if args.command != "serve" else None
        return HANDLERS[args.command](client, args, cfg)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
