"""Exchange formats: expansions, period elements, cocycles, certificates.

All floats are written in decimal with 17 significant digits, which
round-trips IEEE doubles exactly; reports built from the same inputs are
therefore bit-identical across runs.
"""

from __future__ import annotations

import json
import math

from .modgroup import GroupElement, Subgroup
from .automorphy import MultiplierSystem
from .cohomology import Cocycle, CoboundaryCertificate
from .eichler import PeriodPolynomial
from .forms import FourierExpansion


class FormatError(ValueError):
    """Malformed serialized object; message carries the offending location."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


def _f17(x: float) -> float:
    # normalize through the 17-significant-digit decimal form
    return float(format(float(x), ".17g"))


def _c17(z: complex) -> list[float]:
    return [_f17(z.real), _f17(z.imag)]


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


# -- multiplier specs ----------------------------------------------------------

def parse_multiplier(spec, group: Subgroup, weight: float) -> MultiplierSystem:
    """Multiplier grammar: "trivial" | "eta_power(s)" | "gmf_example(c)" |
    an explicit {generator name: [re, im]} table."""
    if isinstance(spec, dict):
        names = group.generator_names()
        vals = {}
        for name, pair in spec.items():
            if name not in names:
                raise FormatError(f"multiplier[{name}]", f"unknown generator for {group.name}")
            vals[names.index(name)] = complex(pair[0], pair[1])
        return MultiplierSystem(group, weight, vals, name="table")
    s = str(spec).strip()
    if s == "trivial":
        return MultiplierSystem.trivial(group, weight)
    if s.startswith("eta_power(") and s.endswith(")"):
        arg = float(s[len("eta_power("):-1])
        if group.level != 1:
            raise FormatError("multiplier", "eta_power lives on SL2Z")
        v = MultiplierSystem.eta_power(arg)
        if abs(v.weight - weight) > 1e-12:
            raise FormatError("multiplier", f"eta_power({arg}) has weight {v.weight}, not {weight}")
        return v
    if s.startswith("gmf_example(") and s.endswith(")"):
        arg = complex(s[len("gmf_example("):-1].replace(" ", ""))
        from .forms import gmf_example

        _, v = gmf_example(arg)
        if group.level != 11:
            raise FormatError("multiplier", "gmf_example lives on Gamma0(11)")
        return v
    raise FormatError("multiplier", f"bad multiplier spec {spec!r}")


def multiplier_to_spec(v: MultiplierSystem) -> object:
    if v.name in ("trivial",) or v.name.startswith(("eta_power(", "gmf_example(")):
        return v.name
    names = v.group.generator_names()
    return {names[i]: _c17(val) for i, val in v.generator_values.items()}


# -- period elements ------------------------------------------------------------

def period_to_dict(p: PeriodPolynomial) -> dict:
    return {
        "weight": _f17(-p.k),
        "matrix": list(p.matrix.tuple()) if p.matrix is not None else None,
        "coeffs": [_c17(c) for c in p.coeffs],
    }


def period_from_dict(d: dict, location: str = "period") -> PeriodPolynomial:
    try:
        k = -int(d["weight"])
        coeffs = [complex(re, im) for re, im in d["coeffs"]]
        mat = d.get("matrix")
        m = GroupElement(*mat) if mat else None
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(location, f"bad period element: {exc}") from exc
    if len(coeffs) != k + 1:
        raise FormatError(location, f"expected {k + 1} coefficients, got {len(coeffs)}")
    return PeriodPolynomial(coeffs, k, m)


# -- cocycles ---------------------------------------------------------------------

def cocycle_to_dict(c: Cocycle) -> dict:
    names = c.group.generator_names()
    return {
        "weight": _f17(-c.k),
        "group": c.group.name,
        "multiplier": multiplier_to_spec(c.v),
        "assignment": {names[i]: period_to_dict(p) for i, p in c.assignment.items()},
    }


def cocycle_from_dict(d: dict, location: str = "cocycle") -> Cocycle:
    try:
        group = Subgroup.parse(d["group"])
        k = -float(d["weight"])
        v = parse_multiplier(d["multiplier"], group, k)
        raw = d["assignment"]
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(location, f"bad cocycle: {exc}") from exc
    names = group.generator_names()
    assignment = {}
    for i, name in enumerate(names):
        if name not in raw:
            raise FormatError(f"{location}.assignment", f"missing generator {name}")
        p = period_from_dict(raw[name], f"{location}.assignment[{name}]")
        if p.k != int(k):
            raise FormatError(f"{location}.assignment[{name}]",
                              f"weight mismatch: {-p.k} vs {-k}")
        assignment[i] = p
    return Cocycle(group, k, v, assignment)


def load_cocycle(path: str) -> Cocycle:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise FormatError(path, str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc
    return cocycle_from_dict(data, location=path)


def certificate_to_dict(cert: CoboundaryCertificate) -> dict:
    return {
        "verdict": cert.verdict.value,
        "residual": _f17(cert.residual),
        "condition": _f17(cert.condition) if math.isfinite(cert.condition) else None,
        "evidence_only": cert.evidence_only,
        "rho": period_to_dict(cert.candidate) if isinstance(cert.candidate, PeriodPolynomial) else None,
    }


def expansion_to_dict(e: FourierExpansion) -> dict:
    return {
        "kappa": _f17(e.kappa),
        "lambda": _f17(e.lam),
        "start": e.start,
        "coeffs": [_c17(c) for c in e.coeffs],
    }


def expansion_from_dict(d: dict, location: str = "expansion") -> FourierExpansion:
    try:
        coeffs = [complex(re, im) for re, im in d["coeffs"]]
        return FourierExpansion(coeffs, d["kappa"], d["lambda"], d["start"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(location, f"bad expansion: {exc}") from exc
