"""Generalized Poincare and Eisenstein series, with the convergence threshold.

The series for a parabolic cocycle {phi_V} with phi_S = 0 and an auxiliary
multiplier w of even weight k' is

    Psi(z) = sum over Theta of phi_V(z) wbar(V) (cz+d)^{-k'},

where Theta holds one representative per translation coset, truncated at
c^2 + d^2 <= B in a fixed deterministic order.  phi_S = 0 makes the terms
left-translation invariant; the representative set identifies V with -V,
which halves the full sum and gives the Eisenstein series (phi == 1) the
classical normalization with constant term 1.  The reduction is a fixed
pairwise summation over the sorted representative order, so a result is
bit-stable for a given bound regardless of worker count.

Convergence: with a growth profile (K, rho, sigma) for the cocycle
elements and |w(V)| <= K mu(V)^alpha, set

    e = max(rho/2, sigma + k/2),   eta = 6e - 2k,   psi = 2e + 4 + 2 alpha;

the series converges absolutely for k' > psi, and each term obeys a bound
of the shape K1 (c^2+d^2)^{e+1+alpha} (|z|^eta + y^{-eta}) times the
(c^2+d^2)^{-k'/2}-type decay of the denominator.  The tail estimates
reported here fit that shape empirically on the computed terms.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .modgroup import GroupElement, IDENTITY, S, T, Subgroup
from .automorphy import MultiplierSystem, principal_power, principal_power_array
from .cohomology import Cocycle, GrowthProfile
from .eichler import PeriodPolynomial, slash_matrix


@dataclass(frozen=True)
class ThresholdReport:
    e: float
    eta: float
    psi: float

    def to_dict(self) -> dict:
        return {"e": self.e, "eta": self.eta, "psi": self.psi}


def threshold(rho: float, sigma: float, k: float, alpha: float) -> ThresholdReport:
    """e = max(rho/2, sigma + k/2); eta = 6e - 2k; psi = 2e + 4 + 2 alpha."""
    if rho < 0 or sigma < 0:
        raise ValueError("rho and sigma must be nonnegative")
    e = max(rho / 2.0, sigma + k / 2.0)
    return ThresholdReport(e=e, eta=6.0 * e - 2.0 * k, psi=2.0 * e + 4.0 + 2.0 * alpha)


def select_kprime(psi: float, margin: float = 2.0) -> int:
    """Smallest even integer exceeding psi + margin."""
    k = math.floor(psi + margin) + 1
    return k if k % 2 == 0 else k + 1


@dataclass
class SeriesConfig:
    """Truncation and twist data for the series sums.

    w must have even integer weight kprime; kappa(w) != 0 breaks the
    coset-invariance of the terms and is flagged.  threshold_report, when
    provided, is checked against kprime (violation warns, to allow
    divergence demonstrations).
    """

    group: Subgroup
    kprime: int
    w: MultiplierSystem
    bound: int
    tol: float = 1e-10
    threshold_report: ThresholdReport | None = None

    def __post_init__(self):
        if self.kprime % 2 or self.kprime <= 0:
            raise ValueError("kprime must be a positive even integer")
        if self.bound < 1:
            raise ValueError("bound must be >= 1")
        if abs(self.w.weight - self.kprime) > 1e-12:
            raise ValueError("w must have weight kprime")
        if self.w.kappa() > 1e-12:
            warnings.warn("w has kappa != 0: series terms are not coset-invariant",
                          stacklevel=2)
        if self.threshold_report is not None and self.kprime <= self.threshold_report.psi:
            warnings.warn(
                f"kprime = {self.kprime} does not exceed psi = {self.threshold_report.psi}; "
                "the series may diverge", stacklevel=2)

    @classmethod
    def for_cocycle(cls, cocycle: Cocycle, bound: int, profile: GrowthProfile,
                    alpha: float = 0.0, w: MultiplierSystem | None = None,
                    kprime: int | None = None, tol: float = 1e-10) -> "SeriesConfig":
        rep = threshold(profile.rho, profile.sigma, cocycle.k, alpha)
        kp = kprime if kprime is not None else select_kprime(rep.psi)
        wm = w if w is not None else MultiplierSystem.trivial(cocycle.group, kp)
        return cls(cocycle.group, kp, wm, bound, tol, rep)


def _pairwise_sum(terms: np.ndarray) -> complex:
    """Fixed-order pairwise reduction (deterministic for a given order)."""
    n = len(terms)
    if n == 0:
        return 0.0 + 0j
    block = terms
    while len(block) > 1:
        m = len(block)
        if m % 2:
            block = np.concatenate([block[:-1].reshape(-1, 2).sum(axis=1), block[-1:]])
        else:
            block = block.reshape(-1, 2).sum(axis=1)
    return complex(block[0])


def _wbar_values(group: Subgroup, w: MultiplierSystem, rows: np.ndarray) -> np.ndarray:
    """conj w(V) per representative row; fast path for the trivial system."""
    all_ones = all(v == 1.0 for v in w.generator_values.values())
    if all_ones and w.weight == int(w.weight) and int(w.weight) % 2 == 0:
        # even integer weight: consistency factors are exactly 1, so w == 1
        return np.ones(len(rows), dtype=complex)
    out = np.empty(len(rows), dtype=complex)
    from .modgroup import _xgcd

    for i, (c, d) in enumerate(rows.tolist()):
        if (c, d) == (0, 1):
            out[i] = 1.0
            continue
        _, x, y = _xgcd(d, c)
        out[i] = np.conj(w.value(GroupElement(x, -y, c, d)))
    return out


class EisensteinSeries:
    """g(z) = sum wbar(V) (cz+d)^{-k'} over the truncated representative set."""

    def __init__(self, cfg: SeriesConfig):
        self.cfg = cfg
        self.rows = cfg.group.coset_bottom_rows(cfg.bound)
        self._wbar = _wbar_values(cfg.group, cfg.w, self.rows)

    def terms(self, z: complex) -> np.ndarray:
        cz = self.rows[:, 0] * z + self.rows[:, 1]
        if self.cfg.kprime == int(self.cfg.kprime):
            denom = cz ** (-int(self.cfg.kprime))
        else:
            denom = principal_power_array(cz, -self.cfg.kprime)
        return self._wbar * denom

    def eval(self, z: complex) -> complex:
        return _pairwise_sum(self.terms(z))

    def abs_term_sum(self, z: complex) -> float:
        return float(np.abs(self.terms(z)).sum())

    def tail_estimate(self, z: complex) -> float:
        return _fitted_tail(self.rows, self.terms(z), self.cfg.bound)

    def eval_with_tail(self, z: complex) -> tuple[complex, float]:
        t = self.terms(z)
        return _pairwise_sum(t), _fitted_tail(self.rows, t, self.cfg.bound)


def _fitted_tail(rows: np.ndarray, terms: np.ndarray, bound: int) -> float:
    """Uncertainty estimate: truncation tail plus summation roundoff.

    The truncation part fits |term| <= K1 n^p on the outer norm decade
    (n = c^2 + d^2) and integrates the envelope past the bound: about
    pi K1 B^{p+1} / (-1-p) for p < -1 (inf otherwise).  The roundoff part
    is the pairwise-summation bound eps (log2 N + 2) sum |term|, which
    dominates at large bounds; reporting it keeps downstream residual
    allowances honest.
    """
    mags = np.abs(terms)
    n = len(terms)
    roundoff = np.finfo(float).eps * (math.log2(n) + 2.0) * float(mags.sum()) if n else 0.0
    norms = (rows[:, 0].astype(float)) ** 2 + (rows[:, 1].astype(float)) ** 2
    sel = (norms >= max(bound / 10.0, 2.0)) & (mags > 0)
    if sel.sum() < 8:
        sel = (norms >= 2.0) & (mags > 0)
    if sel.sum() == 0:
        return roundoff
    ln, lm = np.log(norms[sel]), np.log(mags[sel])
    p = float(np.polyfit(ln, lm, 1)[0])
    k1 = float(np.exp(np.max(lm - p * ln)))
    if p >= -1.0:
        return math.inf
    return math.pi * k1 * bound ** (p + 1.0) / (-1.0 - p) + roundoff


class PoincareSeries:
    """Psi(z) for a cocycle with phi_S = 0, truncated at c^2 + d^2 <= bound.

    Integer weight on SL2(Z): the polynomial coefficient vector of phi_V
    for every representative is derived once by the Euclidean row
    recursion (phi depends only on the bottom row since phi_S = 0), and
    evaluations at any z are vectorized over the stored table.

    Other groups or real weight: phi_V is derived per representative via
    the cocycle relation along a word decomposition, which is only
    sensible at small bounds.
    """

    def __init__(self, cocycle: Cocycle, cfg: SeriesConfig, phi_s_tol: float = 1e-10,
                 force_generic: bool = False):
        self.cocycle = cocycle
        self.cfg = cfg
        s_idx = next(i for i, g in enumerate(cocycle.group.generators)
                     if g.tuple() == cocycle.group.translation.tuple())
        scale = 1.0 + max(p.sup_grid_norm() for p in cocycle.assignment.values())
        if cocycle.assignment[s_idx].sup_grid_norm() / scale > phi_s_tol:
            raise ValueError("Poincare series requires phi_S = 0 (shift the cocycle first)")
        self.rows = cfg.group.coset_bottom_rows(cfg.bound)
        self._wbar = _wbar_values(cfg.group, cfg.w, self.rows)
        self._phi_table: np.ndarray | None = None
        self._phi_list: list | None = None
        self._force_generic = force_generic
        self._build()

    # -- phi values per representative ------------------------------------

    def _build(self):
        c = self.cocycle
        if (not self._force_generic and c.is_polynomial and c.group.level == 1
                and float(c.k) == int(c.k)):
            self._build_sl2z_rows()
        else:
            if len(self.rows) > 20000:
                raise ValueError(
                    "generic phi derivation is word-by-word; use a smaller bound")
            self._phi_list = []
            from .modgroup import _xgcd

            for (cc, dd) in self.rows.tolist():
                if (cc, dd) == (0, 1):
                    self._phi_list.append(c.value(IDENTITY))
                    continue
                _, x, y = _xgcd(dd, cc)
                self._phi_list.append(c.value(GroupElement(x, -y, cc, dd)))

    def _build_sl2z_rows(self):
        """Euclidean recursion on bottom rows, all matrix algebra 11x11."""
        c = self.cocycle
        k = int(c.k)
        v = c.v
        phi_t = c.assignment[1].coeffs
        phi_minus_i = c.value(-IDENTITY)
        scale = 1.0 + float(np.abs(phi_t).max())
        if phi_minus_i.sup_grid_norm() > 1e-12 * scale:
            # rows identify V with -V, which needs phi(-V) = phi(V)
            raise ValueError("row recursion requires phi(-I) = 0 "
                             "(holds for even k with v(-I) = 1)")
        r_t = slash_matrix(T, k, 1.0 / v.value(T))
        v_s = v.value(S)
        shift_cache: dict[int, np.ndarray] = {}

        def shift_matrix(q: int) -> np.ndarray:
            got = shift_cache.get(q)
            if got is None:
                m = np.zeros((k + 1, k + 1), dtype=complex)
                for j in range(k + 1):
                    for i in range(j + 1):
                        m[i, j] = math.comb(j, i) * (q ** (j - i))
                if v_s != 1.0:
                    m = m * (v_s ** (-q))
                shift_cache[q] = m
                got = m
            return got

        n = len(self.rows)
        table = np.zeros((n, k + 1), dtype=complex)
        index_of = {(0, 1): -1}  # -1: zero vector sentinel
        rows_list = self.rows.tolist()
        for idx, (cc, dd) in enumerate(rows_list):
            if (cc, dd) == (0, 1):
                index_of[(0, 1)] = idx
                continue
            q = round(dd / cc)
            d1 = dd - q * cc
            if q != 0:
                base = index_of[(cc, d1)]
                vec = shift_matrix(q) @ table[base]
            else:
                key = (-dd, cc)
                if key[0] < 0 or (key[0] == 0 and key[1] < 0):
                    key = (dd, -cc)  # phi(-V) = phi(V) given phi(-I) = 0
                if key == (0, 1):
                    vec = phi_t.copy()
                else:
                    vec = r_t @ table[index_of[key]] + phi_t
            table[idx] = vec
            index_of[(cc, dd)] = idx
        self._phi_table = table

    def phi_values(self, z: complex) -> np.ndarray:
        """phi_V(z) for every representative, in table order."""
        if self._phi_table is not None:
            k = self._phi_table.shape[1] - 1
            zpow = z ** np.arange(k + 1)
            return self._phi_table @ zpow
        return np.array([p.eval(z) for p in self._phi_list])

    # -- evaluation -----------------------------------------------------------

    def terms(self, z: complex) -> np.ndarray:
        cz = self.rows[:, 0] * z + self.rows[:, 1]
        denom = cz ** (-int(self.cfg.kprime))
        return self.phi_values(z) * self._wbar * denom

    def eval(self, z: complex) -> complex:
        return _pairwise_sum(self.terms(z))

    def eval_with_tail(self, z: complex) -> tuple[complex, float]:
        t = self.terms(z)
        return _pairwise_sum(t), _fitted_tail(self.rows, t, self.cfg.bound)

    def term_bound_audit(self, z: complex, fit_fraction: float = 0.1, rng=None,
                         eta: float | None = None, e_plus: float | None = None
                         ) -> dict:
        """Fit K1 on a sample of terms, validate the envelope on the rest.

        The envelope shape is |term| <= K1 n^{p} (|z|^eta + y^{-eta}) with
        n = c^2+d^2; p is fitted (it absorbs e + 1 + alpha - k'/2); returns
        the fitted constants and the count of validation violations.
        """
        import random as _random

        rng = rng or _random.Random(0)
        t = np.abs(self.terms(z))
        norms = (self.rows[:, 0].astype(float)) ** 2 + (self.rows[:, 1].astype(float)) ** 2
        nz = t > 0
        t, norms = t[nz], norms[nz]
        y = float(np.imag(z))
        zfac = (abs(z) ** eta + y ** (-eta)) if eta is not None else 1.0
        n = len(t)
        idx = np.arange(n)
        fit_n = max(int(n * fit_fraction), min(8, n))
        fit_idx = np.array(sorted(rng.sample(range(n), fit_n))) if n > fit_n else idx
        ln, lm = np.log(norms[fit_idx]), np.log(t[fit_idx] / zfac)
        p = float(np.polyfit(ln, lm, 1)[0]) if len(ln) > 1 else -1.0
        k1 = float(np.exp(np.max(lm - p * ln)))
        bound_all = k1 * norms ** p * zfac
        violations = int((t > bound_all * (1 + 1e-9)).sum())
        # inflate K1 to cover validation terms as well (reported honestly)
        k1_cover = float(np.max(t / (norms ** p * zfac)))
        return {"K1_fit": k1, "p": p, "violations": violations,
                "K1_cover": k1_cover, "n_terms": n}


def eisenstein_eval(cfg: SeriesConfig, z: complex) -> tuple[complex, float]:
    """Value and tail estimate of the generalized Eisenstein series."""
    return EisensteinSeries(cfg).eval_with_tail(z)


def poincare_eval(cocycle: Cocycle, cfg: SeriesConfig, z: complex) -> tuple[complex, float]:
    """Value and tail estimate of the generalized Poincare series."""
    return PoincareSeries(cocycle, cfg).eval_with_tail(z)


def transformation_residual(cocycle: Cocycle, cfg: SeriesConfig, m: GroupElement,
                            samples, series: PoincareSeries | None = None,
                            eis: EisensteinSeries | None = None) -> float:
    """Residual of the transformation law of Psi under M.

    The tested identity is the coset-rearrangement form

        Psi(Mz) = v(M) conj(w(M))^{-1} (cz+d)^{k'-k} [Psi(z) - g(z) phi_M(z)],

    which is what the printed law amounts to once the slash weight on the
    left is read consistently (for the trivial w both agree).  Residuals
    are relative to 1 + |Psi(Mz)|.
    """
    psi = series if series is not None else PoincareSeries(cocycle, cfg)
    g = eis if eis is not None else EisensteinSeries(cfg)
    phi_m = cocycle.value(m)
    vm = cocycle.v.value(m)
    wm = np.conj(cfg.w.value(m))
    worst = 0.0
    for z in samples:
        mz = m.act(z)
        lhs = psi.eval(mz)
        jf = m.c * z + m.d
        power = jf ** int(cfg.kprime - cocycle.k) if float(cocycle.k) == int(cocycle.k) \
            else principal_power(jf, cfg.kprime - cocycle.k)
        rhs = vm / wm * power * (psi.eval(z) - g.eval(z) * phi_m.eval(z))
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    return worst


class NearZeroDenominator(ArithmeticError):
    """g(z) is numerically too small to divide by at this point."""


class AutomorphicIntegral:
    """F = -Psi(phi*)/g + phi0, satisfying F|_v^{-k} M - F = phi_M.

    Evaluation refuses points where |g(z)| falls under guard times the
    absolute term sum of g (the nonvanishing of the exact series does not
    survive truncation near its zeros, e.g. z = i for k' = 18).
    """

    def __init__(self, series: PoincareSeries, eis: EisensteinSeries, phi0,
                 guard: float = 1e-8):
        self.series = series
        self.eis = eis
        self.phi0 = phi0
        self.guard = guard

    def eval(self, z: complex) -> complex:
        gval = self.eis.eval(z)
        scale = self.eis.abs_term_sum(z)
        if abs(gval) < self.guard * scale:
            raise NearZeroDenominator(
                f"|g({z})| = {abs(gval):.3e} < {self.guard:.0e} * {scale:.3e}")
        return -self.series.eval(z) / gval + self.phi0.eval(z)

    def __call__(self, z: complex) -> complex:
        return self.eval(z)

    def eval_with_report(self, z: complex) -> dict:
        gval, gtail = self.eis.eval_with_tail(z)
        psival, ptail = self.series.eval_with_tail(z)
        scale = self.eis.abs_term_sum(z)
        if abs(gval) < self.guard * scale:
            raise NearZeroDenominator(
                f"|g({z})| = {abs(gval):.3e} < {self.guard:.0e} * {scale:.3e}")
        val = -psival / gval + self.phi0.eval(z)
        # first-order propagation of the two truncation tails
        tail = (ptail + abs(psival / gval) * gtail) / abs(gval)
        return {"value": val, "tail": tail, "psi": psival, "g": gval,
                "psi_tail": ptail, "g_tail": gtail}


def construct_automorphic_integral(cocycle: Cocycle, phi0, cfg: SeriesConfig,
                                   guard: float = 1e-8) -> AutomorphicIntegral:
    """Theorem-3 style construction from a parabolic cocycle and its witness.

    phi0 must satisfy phi_S = phi0|S - phi0; the cocycle is shifted by
    phi0 (making phi*_S = 0), the Poincare series of the shifted cocycle
    is divided by the Eisenstein series, and phi0 is added back.
    """
    from .cohomology import shift_by_phi0

    shifted = shift_by_phi0(cocycle, phi0)
    series = PoincareSeries(shifted, cfg)
    eis = EisensteinSeries(cfg)
    return AutomorphicIntegral(series, eis, phi0, guard)
