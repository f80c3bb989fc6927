"""Cocycle algebra: consistency checks, coboundary and parabolicity tests,
shift normalization, and growth-space membership.

A cocycle is stored by its values on the group generators; values on
arbitrary words are derived through

    rho_{M1 M2} = rho_{M1} |_v^{-k} M2 + rho_{M2}

and cached per matrix.  All residuals are relative: the raw sup-norm of a
slashed polynomial scales like |cz+d|^k with the word, so an absolute
threshold would depend on the sampled words (and verdicts must survive
scaling a cocycle by 10^3).

Coboundary testing for integer k is a least-squares solve over the k+1
polynomial coefficients of a single primitive, stacked over all
generators; a certificate carries residual, conditioning and verdict,
with an explicit inconclusive band between the accept and reject
thresholds.  For non-integer k only a finite trial space built from
shifted period elements is searched, so a negative verdict is evidence,
never proof, and the certificate says so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .modgroup import GroupElement, IDENTITY, Subgroup
from .automorphy import MultiplierSystem
from .eichler import (FunctionPeriod, PeriodPolynomial, STANDARD_GRID, slash_matrix)

COBOUNDARY_RESIDUAL = 1e-8
NOT_COBOUNDARY_RESIDUAL = 1e-2
CONDITION_LIMIT = 1e8


class Verdict(Enum):
    COBOUNDARY = "coboundary"
    NOT_COBOUNDARY = "not-coboundary"
    INCONCLUSIVE = "inconclusive"


@dataclass
class CoboundaryCertificate:
    candidate: object            # PeriodPolynomial | FunctionPeriod | None
    residual: float
    condition: float
    verdict: Verdict
    evidence_only: bool = False  # set for the non-integer-weight trial-space test

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "residual": self.residual,
            "condition": self.condition,
            "evidence_only": self.evidence_only,
            "rho": self.candidate.to_dict() if isinstance(self.candidate, PeriodPolynomial) else None,
        }


def _classify(residual: float, condition: float) -> Verdict:
    if residual < COBOUNDARY_RESIDUAL:
        return Verdict.COBOUNDARY
    if residual > NOT_COBOUNDARY_RESIDUAL and condition < CONDITION_LIMIT:
        return Verdict.NOT_COBOUNDARY
    return Verdict.INCONCLUSIVE


@dataclass
class GrowthProfile:
    """Parameters of the bound |g(z)| < K (|z|^rho + y^{-sigma})."""

    K: float
    rho: float
    sigma: float

    def __post_init__(self):
        if self.K <= 0 or self.rho <= 0 or self.sigma <= 0:
            raise ValueError("growth profile parameters must be positive")

    def envelope(self, z: complex) -> float:
        y = float(np.imag(z))
        return abs(z) ** self.rho + y ** (-self.sigma)


class Cocycle:
    """Map from group generators to period elements, extended by the cocycle rule."""

    def __init__(self, group: Subgroup, k: float, v: MultiplierSystem,
                 assignment: dict[int, object]):
        self.group = group
        self.k = k
        self.v = v
        self.assignment = dict(assignment)
        if set(self.assignment) != set(range(len(group.generators))):
            raise ValueError("assignment must cover exactly the group generators")
        self.is_polynomial = all(isinstance(p, PeriodPolynomial)
                                 for p in self.assignment.values())
        self._cache: dict[tuple, object] = {IDENTITY.tuple(): self._zero()}

    def _zero(self):
        if all(isinstance(p, PeriodPolynomial) for p in self.assignment.values()):
            return PeriodPolynomial.zero(int(self.k))
        return FunctionPeriod.zero(self.k)

    @classmethod
    def zero(cls, group: Subgroup, k: float, v: MultiplierSystem) -> "Cocycle":
        if float(k) == int(k) and k >= 0:
            z = {i: PeriodPolynomial.zero(int(k)) for i in range(len(group.generators))}
        else:
            z = {i: FunctionPeriod.zero(k) for i in range(len(group.generators))}
        return cls(group, k, v, z)

    @classmethod
    def coboundary_of(cls, rho, group: Subgroup, k: float, v: MultiplierSystem) -> "Cocycle":
        """The coboundary rho|_v^{-k} g - rho on each generator."""
        assignment = {i: rho.slash(g, v) - rho for i, g in enumerate(group.generators)}
        return cls(group, k, v, assignment)

    # -- values -------------------------------------------------------------

    def generator_value(self, i: int):
        return self.assignment[i]

    def value(self, m: GroupElement):
        """rho_M for any group element, derived along a word decomposition."""
        key = m.tuple()
        if key in self._cache:
            return self._cache[key]
        word = self.group.word_decompose(m)
        gens = self.group.generators
        acc = self._zero()
        acc_m = IDENTITY
        for gi, e in word:
            base = gens[gi]
            rho_b = self.assignment[gi]
            if e < 0:
                inv = base.inverse()
                rho_b = -(rho_b.slash(inv, self.v))
                base = inv
                e = -e
            for _ in range(e):
                acc = acc.slash(base, self.v) + rho_b
                acc_m = acc_m * base
        if acc_m.tuple() != key:
            raise AssertionError("word recomposition mismatch in cocycle value")
        self._cache[key] = acc
        return acc

    def scaled(self, factor: complex) -> "Cocycle":
        return Cocycle(self.group, self.k, self.v,
                       {i: p * factor for i, p in self.assignment.items()})

    def __add__(self, other: "Cocycle") -> "Cocycle":
        return Cocycle(self.group, self.k, self.v,
                       {i: self.assignment[i] + other.assignment[i] for i in self.assignment})

    # -- checks ---------------------------------------------------------------

    def consistency_check(self, trials: int = 20, rng=None, max_len: int = 4) -> float:
        """Max relative sup-grid residual of the cocycle rule on random word pairs.

        Residuals are normalized per pair by 1 + the largest grid value of
        the three constituents, so the figure is scale-invariant.
        """
        import random as _random

        rng = rng or _random.Random(0)
        worst = 0.0
        for _ in range(trials):
            m1 = self.group.random_word_element(rng, max_len)
            m2 = self.group.random_word_element(rng, max_len)
            lhs = self.value(m1 * m2)
            t1 = self.value(m1).slash(m2, self.v)
            t2 = self.value(m2)
            vals = [p.grid_values() for p in (lhs, t1, t2)]
            resid = np.abs(vals[0] - vals[1] - vals[2]).max()
            scale = 1.0 + max(float(np.abs(v).max()) for v in vals)
            worst = max(worst, resid / scale)
        return worst


def cocycle_consistency_check(c: Cocycle, trials: int = 20, rng=None) -> float:
    return c.consistency_check(trials=trials, rng=rng)


def _svd_condition(a: np.ndarray) -> tuple[float, int]:
    s = np.linalg.svd(a, compute_uv=False)
    cutoff = s[0] * max(a.shape) * np.finfo(float).eps if len(s) else 0.0
    positive = s[s > cutoff]
    if len(positive) == 0:
        return 1.0, 0
    return float(positive[0] / positive[-1]), int(len(positive))


def coboundary_test(c: Cocycle, k: int | None = None) -> CoboundaryCertificate:
    """Least-squares search for a single rho with rho|g - rho = rho_g on all generators."""
    if c.is_polynomial:
        k = int(c.k if k is None else k)
        eye = np.eye(k + 1)
        blocks, rhs = [], []
        for i, g in enumerate(c.group.generators):
            r = slash_matrix(g, k, 1.0 / c.v.value(g))
            blocks.append(r - eye)
            rhs.append(c.assignment[i].coeffs)
        a = np.vstack(blocks)
        b = np.concatenate(rhs)
        x, *_ = np.linalg.lstsq(a, b, rcond=None)
        bnorm = float(np.linalg.norm(b))
        resid = float(np.linalg.norm(a @ x - b)) / bnorm if bnorm > 0 else 0.0
        cond, _rank = _svd_condition(a)
        return CoboundaryCertificate(PeriodPolynomial(x, k), resid, cond,
                                     _classify(resid, cond))
    return _coboundary_test_trial_space(c)


def _coboundary_test_trial_space(c: Cocycle, words=None) -> CoboundaryCertificate:
    """Non-integer weight: least squares over a finite trial space.

    The basis is the generator period elements shifted by a few short
    words; a failure to fit is evidence against being a coboundary, not
    proof (no computable basis of the growth space exists).
    """
    gens = c.group.generators
    basis: list[FunctionPeriod] = []
    for i in range(len(gens)):
        el = c.assignment[i]
        basis.append(el)
        for g in gens[:2]:
            basis.append(el.slash(g, c.v))
    grid = STANDARD_GRID
    cols, rhs = [], []
    for i, g in enumerate(gens):
        rows = [b.slash(g, c.v).grid_values(grid) - b.grid_values(grid) for b in basis]
        cols.append(np.array(rows).T)
        rhs.append(c.assignment[i].grid_values(grid))
    a = np.vstack(cols)
    b = np.concatenate(rhs)
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    bnorm = float(np.linalg.norm(b))
    resid = float(np.linalg.norm(a @ x - b)) / bnorm if bnorm > 0 else 0.0
    cond, _ = _svd_condition(a)
    verdict = _classify(resid, cond)
    cert = CoboundaryCertificate(None, resid, cond, verdict, evidence_only=True)
    return cert


def parabolic_test(c: Cocycle, cusps=None, k: int | None = None) -> list[CoboundaryCertificate]:
    """One single-relation solve rho_h|Q_h - rho_h = rho_{Q_h} per cusp class."""
    cusps = cusps if cusps is not None else c.group.cusp_classes()
    out = []
    for cusp in cusps:
        q = cusp.parabolic
        rho_q = c.value(q)
        if c.is_polynomial:
            kk = int(c.k if k is None else k)
            r = slash_matrix(q, kk, 1.0 / c.v.value(q))
            a = r - np.eye(kk + 1)
            b = rho_q.coeffs
            x, *_ = np.linalg.lstsq(a, b, rcond=None)
            bnorm = float(np.linalg.norm(b))
            resid = float(np.linalg.norm(a @ x - b)) / bnorm if bnorm > 0 else 0.0
            cond, _ = _svd_condition(a)
            out.append(CoboundaryCertificate(PeriodPolynomial(x, kk), resid, cond,
                                             _classify(resid, cond)))
        else:
            out.append(_single_relation_trial_space(c, q, rho_q))
    return out


def _single_relation_trial_space(c: Cocycle, q: GroupElement, rho_q) -> CoboundaryCertificate:
    """Non-integer weight single-relation solve rho|Q - rho = rho_Q on trial functions."""
    gens = c.group.generators
    basis: list[FunctionPeriod] = []
    for i in range(len(gens)):
        el = c.assignment[i]
        basis.append(el)
        basis.append(el.slash(gens[i], c.v))
    grid = STANDARD_GRID
    rows = [b.slash(q, c.v).grid_values(grid) - b.grid_values(grid) for b in basis]
    a = np.array(rows).T
    b = rho_q.grid_values(grid)
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    bnorm = float(np.linalg.norm(b))
    resid = float(np.linalg.norm(a @ x - b)) / bnorm if bnorm > 0 else 0.0
    cond, _ = _svd_condition(a)
    return CoboundaryCertificate(None, resid, cond, _classify(resid, cond),
                                 evidence_only=True)


def shift_by_phi0(c: Cocycle, phi0) -> Cocycle:
    """The shifted cocycle phi*_V = phi_V - (phi0|V - phi0).

    phi0 must witness parabolicity at infinity; the translation value of
    the output is set to the exact zero element after asserting it is
    numerically below 1e-10 (relative to the input's scale).
    """
    gens = c.group.generators
    assignment = {}
    s_index = None
    for i, g in enumerate(gens):
        shifted = c.assignment[i] - (phi0.slash(g, c.v) - phi0)
        assignment[i] = shifted
        if g.tuple() == c.group.translation.tuple():
            s_index = i
    if s_index is None:
        raise AssertionError("group generators do not contain the translation")
    scale = 1.0 + max(p.sup_grid_norm() for p in c.assignment.values())
    resid = assignment[s_index].sup_grid_norm() / scale
    if resid > 1e-10:
        raise AssertionError(
            f"phi0 does not witness parabolicity at infinity: |phi*_S| = {resid:.3e}")
    zero = PeriodPolynomial.zero(int(c.k)) if c.is_polynomial else FunctionPeriod.zero(c.k)
    assignment[s_index] = zero
    return Cocycle(c.group, c.k, c.v, assignment)


def infinity_witness(c: Cocycle, clean: float = 1e-10) -> object:
    """A phi0 solving phi_S = phi0|S - phi0 (least squares, minimum norm).

    Coefficients below `clean` times the largest one are zeroed: they sit
    at solver noise level but get amplified by slash factors downstream.
    """
    cusp_inf = c.group.cusp_classes()[0]
    cert = parabolic_test(c, [cusp_inf])[0]
    if cert.verdict is Verdict.NOT_COBOUNDARY:
        raise ValueError("cocycle is not parabolic at infinity")
    phi0 = cert.candidate
    if isinstance(phi0, PeriodPolynomial) and np.abs(phi0.coeffs).max() > 0:
        coeffs = phi0.coeffs.copy()
        coeffs[np.abs(coeffs) < clean * np.abs(coeffs).max()] = 0.0
        phi0 = PeriodPolynomial(coeffs, phi0.k)
    return phi0


# ---------------------------------------------------------------------------
# growth space

def default_growth_samples(n_x: int = 9, n_y: int = 13) -> np.ndarray:
    """Grid covering |x| <= 10 and heights y in [1e-2, 1e2] (log-spaced)."""
    xs = np.linspace(-10.0, 10.0, n_x)
    ys = np.logspace(-2.0, 2.0, n_y)
    return (xs[:, None] + 1j * ys[None, :]).ravel()


def growth_membership_check(f, profile: GrowthProfile, samples=None) -> tuple[bool, float]:
    """Check |f(z)| < K (|z|^rho + y^{-sigma}) at all samples.

    Returns (bound holds everywhere, worst ratio |f| / envelope).  A True
    answer is one-sided evidence of membership; False only reports that
    this profile fails on these samples.
    """
    samples = default_growth_samples() if samples is None else samples
    worst = 0.0
    for z in samples:
        worst = max(worst, abs(f(z)) / profile.envelope(z))
    return worst < profile.K, worst


def fit_growth_profile(f, samples=None, headroom: float = 2.0) -> GrowthProfile:
    """Estimate a profile from the boundary behavior of f on a training grid.

    rho comes from the slope of log|f| against log|z| at the largest
    sample moduli, sigma from the slope against log(1/y) at the smallest
    heights; both are clamped to at least 1/2 and rounded up, and K covers
    every training sample with the given headroom.  Membership claims
    based on this are one-sided (validate on a holdout grid).
    """
    samples = np.asarray(default_growth_samples() if samples is None else samples)
    vals = np.array([abs(f(z)) for z in samples])
    vals = np.maximum(vals, 1e-300)
    mods = np.abs(samples)
    ys = np.imag(samples)

    big = mods >= np.quantile(mods, 0.75)
    rho_slope = float(np.polyfit(np.log(mods[big]), np.log(vals[big]), 1)[0])
    rho = max(0.5, math.ceil(rho_slope * 2) / 2.0)

    low = ys <= np.quantile(ys, 0.25)
    sig_slope = float(np.polyfit(np.log(1.0 / ys[low]), np.log(vals[low]), 1)[0])
    sigma = max(0.5, math.ceil(sig_slope * 2) / 2.0)

    env = mods ** rho + ys ** (-sigma)
    ratio = float((vals / env).max())
    return GrowthProfile(K=max(ratio * headroom, 1e-300), rho=rho, sigma=sigma)
