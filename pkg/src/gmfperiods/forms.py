"""Truncated Fourier expansions, classification, and the shipped example forms.

An expansion at infinity is   F(z) = sum_m a_m e^{2 pi i (m+kappa) z / lambda}
over a stored finite index range; an expansion at a finite cusp q_j is

    F(z) = (z - q_j)^{-k} sum_m a_m(j) e^{-2 pi i (m+kappa_j) / (L_j (z - q_j))}

where L_j is the local period of the variable u = -1/(z - q_j), i.e. the
width measured through the determinant-1 map sending q_j to infinity.
For the integral scaling matrices used by `modgroup` this is
L_j = width * denominator(q_j)^2.

Shipped forms: Delta (exact integer coefficients), classical Eisenstein
series, eta powers, the weight-2 cusp form on Gamma0(11) as a fixed
coefficient table, and the weight-0 generalized modular form
exp(2 pi i c I_f) built from its antiderivative, whose multiplier is
weakly parabolic but not unitary.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .modgroup import GroupElement, INFINITY, Subgroup, CuspData
from .automorphy import MultiplierSystem, principal_power, consistency_factor


class FormClass(Enum):
    CUSP = "cusp"            # all terms m + kappa > 0
    ENTIRE = "entire"        # all terms m + kappa >= 0
    MEROMORPHIC = "meromorphic-at-cusps"

    @property
    def is_entire(self) -> bool:
        # C0 is a subspace of C+
        return self in (FormClass.CUSP, FormClass.ENTIRE)


class FourierExpansion:
    """Truncated expansion sum a_m e^{2 pi i (m+kappa) z/lambda}, m = start..start+len-1."""

    def __init__(self, coeffs, kappa: float = 0.0, lam: float = 1.0, start: int = 0):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        if not 0.0 <= kappa < 1.0:
            raise ValueError("kappa must lie in [0, 1)")
        if lam <= 0:
            raise ValueError("lambda must be positive")
        self.kappa = float(kappa)
        self.lam = float(lam)
        self.start = int(start)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.start + len(self.coeffs))

    @property
    def truncation_order(self) -> int:
        return self.start + len(self.coeffs) - 1

    def exponents(self) -> np.ndarray:
        """The m + kappa values carried by the stored terms."""
        return self.indices + self.kappa

    def min_exponent(self) -> float:
        """Smallest m + kappa over nonzero coefficients (inf if all zero)."""
        nz = np.abs(self.coeffs) != 0
        if not nz.any():
            return math.inf
        return float(self.exponents()[nz].min())

    def eval(self, z: complex) -> complex:
        if np.imag(z) <= 0:
            raise ValueError("evaluation requires Im z > 0")
        phases = np.exp(2j * math.pi * self.exponents() * z / self.lam)
        return complex(np.sum(self.coeffs * phases))

    def __call__(self, z: complex) -> complex:
        return self.eval(z)

    def tail_estimate(self, z: complex) -> float:
        """Geometric tail bound past the truncation order at this height.

        Uses the observed growth ratio of the stored coefficients as the
        majorant ratio; returns inf when the majorant does not contract.
        """
        y = float(np.imag(z))
        r = math.exp(-2 * math.pi * y / self.lam)
        mags = np.abs(self.coeffs)
        if not mags.any():
            return 0.0
        half = mags[len(mags) // 2:]
        ratios = half[1:][half[:-1] > 0] / half[:-1][half[:-1] > 0]
        g = float(ratios.max()) if len(ratios) else 1.0
        g = max(g, 1.0)
        if g * r >= 1.0:
            return math.inf
        last = float(mags[mags > 0][-1])
        mlast = self.truncation_order + self.kappa
        return last * g * r ** (mlast + 1) / (1.0 - g * r)

    def eval_with_tail(self, z: complex) -> tuple[complex, float]:
        return self.eval(z), self.tail_estimate(z)

    def derivative(self, order: int = 1) -> "FourierExpansion":
        """Exact termwise derivative."""
        factors = (2j * math.pi * self.exponents() / self.lam) ** order
        return FourierExpansion(self.coeffs * factors, self.kappa, self.lam, self.start)

    def scaled(self, factor: complex) -> "FourierExpansion":
        return FourierExpansion(self.coeffs * factor, self.kappa, self.lam, self.start)

    def truncated(self, n_terms: int) -> "FourierExpansion":
        return FourierExpansion(self.coeffs[:n_terms], self.kappa, self.lam, self.start)

    def classify(self) -> FormClass:
        me = self.min_exponent()
        if me > 0:
            return FormClass.CUSP
        if me >= 0:
            return FormClass.ENTIRE
        return FormClass.MEROMORPHIC

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "lambda": self.lam,
            "start": self.start,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FourierExpansion":
        coeffs = [complex(re, im) for re, im in d["coeffs"]]
        return cls(coeffs, d["kappa"], d["lambda"], d["start"])


def classify(expansions) -> FormClass:
    """Classify a form from one expansion per cusp class.

    Cusp (C0) requires m + kappa > 0 everywhere, entire (C+) requires
    m + kappa >= 0; anything else is meromorphic at the cusps.
    """
    worst = FormClass.CUSP
    order = {FormClass.CUSP: 0, FormClass.ENTIRE: 1, FormClass.MEROMORPHIC: 2}
    for e in expansions:
        c = e.classify()
        if order[c] > order[worst]:
            worst = c
    return worst


# ---------------------------------------------------------------------------
# expansions at finite cusps

class CuspExpansion:
    """Expansion (z-q)^{-k} sum a_m e^{-2 pi i (m+kappa_j)/(L (z-q))} at a finite cusp.

    L is the local period of u = -1/(z - q); evaluation is refused below
    the stored validity height Im u >= u_min (default 1/2 in the scaled
    coordinate).
    """

    def __init__(self, cusp: CuspData, weight: float, coeffs, kappa_j: float = 0.0,
                 start: int = 0, u_min: float = 0.5):
        if cusp.point == INFINITY:
            raise ValueError("CuspExpansion is for finite cusps; use FourierExpansion at infinity")
        self.cusp = cusp
        self.weight = float(weight)
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.kappa_j = float(kappa_j)
        self.start = int(start)
        self.u_min = float(u_min)
        den = Fraction(cusp.point).denominator
        self.scale = float(cusp.width * den * den)  # the L above

    def local_u(self, z: complex) -> complex:
        q = complex(Fraction(self.cusp.point))
        return -1.0 / (z - q)

    def eval(self, z: complex) -> complex:
        q = complex(Fraction(self.cusp.point))
        if z == q:
            raise ValueError("evaluation at the cusp itself")
        u = self.local_u(z)
        if u.imag < self.u_min:
            raise ValueError(
                f"point below validity height: Im u = {u.imag:.4g} < {self.u_min}")
        ms = np.arange(self.start, self.start + len(self.coeffs)) + self.kappa_j
        series = np.sum(self.coeffs * np.exp(2j * math.pi * ms * u / self.scale))
        return principal_power(z - q, -self.weight) * complex(series)

    def __call__(self, z: complex) -> complex:
        return self.eval(z)

    @classmethod
    def from_form(cls, f, weight: float, cusp: CuspData, n_coeffs: int = 32,
                  kappa_j: float = 0.0, n_samples: int = 256, height: float = 1.0,
                  start: int = 0) -> "CuspExpansion":
        """Transport an evaluatable form to the cusp by Fourier inversion.

        Samples Phi(u) = F(q - 1/u) (-1/u)^k on a horizontal period at
        Im u = height and extracts the coefficients by FFT.  Requires f
        evaluatable down to height roughly `height` / (scale^2).
        """
        den = Fraction(cusp.point).denominator
        scale = float(cusp.width * den * den)
        q = complex(Fraction(cusp.point))
        xs = np.arange(n_samples) * scale / n_samples
        us = xs + 1j * height
        vals = np.array([f(q - 1.0 / u) * principal_power(-1.0 / u, weight) for u in us])
        if kappa_j:
            vals = vals * np.exp(-2j * math.pi * kappa_j * xs / scale)
        fft = np.fft.fft(vals) / n_samples
        ms = np.arange(n_coeffs)
        if start < 0:
            # negative indices wrap around the FFT bins
            idx = np.arange(start, start + n_coeffs) % n_samples
            coeffs = fft[idx] * np.exp(2 * math.pi * (np.arange(start, start + n_coeffs) + kappa_j)
                                       * height / scale)
            return cls(cusp, weight, coeffs, kappa_j, start)
        coeffs = fft[ms + start] * np.exp(2 * math.pi * (ms + start + kappa_j) * height / scale)
        return cls(cusp, weight, coeffs, kappa_j, start)

    def classify(self) -> FormClass:
        ms = np.arange(self.start, self.start + len(self.coeffs)) + self.kappa_j
        nz = np.abs(self.coeffs) > 1e-13 * (np.abs(self.coeffs).max() or 1.0)
        if not nz.any():
            return FormClass.CUSP
        me = ms[nz].min()
        if me > 0:
            return FormClass.CUSP
        if me >= 0:
            return FormClass.ENTIRE
        return FormClass.MEROMORPHIC


def eval_at_cusp(exp: CuspExpansion, z: complex) -> complex:
    return exp.eval(z)


# ---------------------------------------------------------------------------
# shipped expansions

def _product_coeffs(n_terms: int, factors) -> list[int]:
    """Coefficients of prod over (j, e) of (1 - q^j)^e up to q^n_terms, exact."""
    coeff = [0] * (n_terms + 1)
    coeff[0] = 1
    for j, e in factors:
        if j > n_terms:
            continue
        sign_binoms = [math.comb(e, i) * (-1) ** i for i in range(e + 1)]
        out = [0] * (n_terms + 1)
        for i, cb in enumerate(sign_binoms):
            step = i * j
            if step > n_terms:
                break
            for s in range(0, n_terms + 1 - step):
                if coeff[s]:
                    out[s + step] += cb * coeff[s]
        coeff = out
    return coeff


def delta_expansion(n_terms: int) -> FourierExpansion:
    """The discriminant Delta = q prod (1-q^n)^24; kappa = 0, lambda = 1.

    Coefficients are exact integers (Ramanujan tau) before conversion.
    """
    if n_terms < 1:
        raise ValueError("n_terms >= 1")
    prod = _product_coeffs(n_terms - 1, ((j, 24) for j in range(1, n_terms)))
    return FourierExpansion(prod[:n_terms], kappa=0.0, lam=1.0, start=1)


def _bernoulli(n: int) -> Fraction:
    row = [Fraction(0)] * (n + 1)
    row[0] = Fraction(1)
    for m in range(1, n + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += Fraction(math.comb(m + 1, j)) * row[j]
        row[m] = -acc / (m + 1)
    return row[n]


def eisenstein_qexp(k_even: int, n_terms: int) -> FourierExpansion:
    """Classical normalized E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n."""
    if k_even < 4 or k_even % 2:
        raise ValueError("weight must be an even integer >= 4")
    c = Fraction(-2 * k_even) / _bernoulli(k_even)
    coeffs = [Fraction(1)]
    for n in range(1, n_terms):
        sig = sum(d ** (k_even - 1) for d in range(1, n + 1) if n % d == 0)
        coeffs.append(c * sig)
    return FourierExpansion([float(x) for x in coeffs], kappa=0.0, lam=1.0, start=0)


def eta_product_expansion(n_terms: int) -> FourierExpansion:
    """Dedekind eta = q^{1/24} prod (1-q^n): kappa = 1/24, integer coefficients."""
    prod = _product_coeffs(n_terms - 1, ((j, 1) for j in range(1, n_terms)))
    return FourierExpansion(prod[:n_terms], kappa=1.0 / 24.0, lam=1.0, start=0)


def eta_eval(z: complex, tol: float = 1e-15) -> complex:
    """eta(z) by direct numerical product with height-adaptive length."""
    y = float(np.imag(z))
    if y <= 0:
        raise ValueError("eta requires Im z > 0")
    n = max(64, int(-math.log(tol) / (2 * math.pi * y)) + 8)
    q = cmath.exp(2j * math.pi * z)
    prod = 1.0 + 0j
    qm = q
    for _ in range(n):
        prod *= 1.0 - qm
        qm *= q
    return cmath.exp(2j * math.pi * z / 24.0) * prod


def eta_closed_form_at_i() -> float:
    """eta(i) = Gamma(1/4) / (2 pi^{3/4})."""
    return math.gamma(0.25) / (2.0 * math.pi ** 0.75)


def automorphy_residual(f, k: float, v: MultiplierSystem, m: GroupElement,
                        samples) -> float:
    """max over samples of |F(Mz) - v(M)(cz+d)^k F(z)| / (1 + |F(z)|)."""
    vm = v.value(m)
    worst = 0.0
    for z in samples:
        lhs = f(m.act(z))
        rhs = vm * principal_power(m.c * z + m.d, k) * f(z)
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(f(z))))
    return worst


# ---------------------------------------------------------------------------
# the non-unitary weakly parabolic example on Gamma0(11)

def cuspform11_expansion(n_terms: int) -> FourierExpansion:
    """The weight-2 cusp form eta(z)^2 eta(11z)^2 on Gamma0(11), exact table."""
    factors = [(j, 2) for j in range(1, n_terms)] + [(11 * j, 2) for j in range(1, n_terms // 11 + 1)]
    prod = _product_coeffs(n_terms - 1, factors)
    return FourierExpansion(prod[:n_terms], kappa=0.0, lam=1.0, start=1)


class GmfExample:
    """E(z) = exp(2 pi i c I_f(z)) with I_f the antiderivative of the
    weight-2 cusp form on Gamma0(11).

    E is a weight-0 generalized modular form: its multiplier is
    v(M) = exp(2 pi i c omega(M)) where omega(M) = I_f(Mz) - I_f(z) is the
    period map.  omega vanishes on parabolic elements (the form is
    cuspidal at both cusps) so |v| = 1 there, while hyperbolic elements
    pick up genuine X0(11) lattice periods with nonzero imaginary part.
    """

    def __init__(self, c: complex, n_terms: int = 512):
        if n_terms < 10:
            raise ValueError("n_terms >= 10")
        self.c = complex(c)
        self.group = Subgroup.gamma0(11)
        self._coeffs = None
        self._ensure_terms(n_terms)

    def _ensure_terms(self, n: int):
        if self._coeffs is None or len(self._coeffs) < n:
            self._coeffs = np.asarray(cuspform11_expansion(n).coeffs.real, dtype=float)

    def _terms_for_height(self, y: float, tol: float = 1e-14) -> int:
        n = int(-math.log(tol) / (2 * math.pi * y)) + 16
        n = min(max(n, 64), 200000)
        self._ensure_terms(n)
        return n

    def antiderivative(self, z: complex) -> complex:
        """I_f(z) = sum a_n / n q^n, so that I_f' = 2 pi i f."""
        y = float(np.imag(z))
        if y <= 0:
            raise ValueError("requires Im z > 0")
        n = self._terms_for_height(y)
        ns = np.arange(1, n + 1)
        q = cmath.exp(2j * math.pi * z)
        return complex(np.sum((self._coeffs[:n] / ns) * q ** ns))

    def period(self, m: GroupElement) -> complex:
        """omega(M) = I_f(M z0) - I_f(z0), z0 on the isometry circle of M."""
        if m.c == 0:
            if m.b % 1 != 0:
                raise ValueError("translation by non-integer")
            return 0.0 + 0j
        sg = 1 if m.c > 0 else -1
        z0 = (-m.d + 1j * sg) / m.c
        return self.antiderivative(m.act(z0)) - self.antiderivative(z0)

    def eval(self, z: complex) -> complex:
        return cmath.exp(2j * math.pi * self.c * self.antiderivative(z))

    def __call__(self, z: complex) -> complex:
        return self.eval(z)

    def multiplier(self) -> MultiplierSystem:
        """Weight-0 multiplier with generator values measured from E."""
        vals = {}
        for i, g in enumerate(self.group.generators):
            vals[i] = cmath.exp(2j * math.pi * self.c * self.period(g))
        return MultiplierSystem(self.group, 0.0, vals, name=f"gmf_example({self.c})")

    def measured_value(self, m: GroupElement) -> complex:
        """v(M) read off directly from the transformation of E (weight 0)."""
        return cmath.exp(2j * math.pi * self.c * self.period(m))


def gmf_example(c: complex, n_terms: int = 512) -> tuple[GmfExample, MultiplierSystem]:
    """The shipped weight-0 non-unitary weakly parabolic example on Gamma0(11).

    c = 0 gives the constant 1 with the trivial multiplier.  Real nonzero
    c already has |v(M)| != 1 on hyperbolic words (the X0(11) periods have
    nonzero imaginary part); complex c is accepted as well.
    """
    ex = GmfExample(c, n_terms)
    return ex, ex.multiplier()
