"""Real-weight automorphy: branched powers, multiplier systems, stroke operator.

The k-th power of a nonzero complex number is always taken as

    w^k = |w|^k e^{i k arg w},   -pi <= arg w < pi,

so in particular arg(-1) = -pi.  A multiplier system of weight k is a
nonzero complex function v on the group with

    v(M1 M2) (c3 z + d3)^k = v(M1) v(M2) (c1 M2 z + d1)^k (c2 z + d2)^k,

and its extension from generator values to the whole group walks a word
decomposition, picking up one consistency factor per letter.  The factor
is computed numerically at z = i under the principal branch; it always
has modulus 1, which is asserted (a deviation signals a branch-handling
bug, not a numerical one).
"""

from __future__ import annotations

import cmath
import math
import threading

import numpy as np

from .modgroup import GroupElement, IDENTITY, S, Subgroup

CACHE_TOL = 1e-12


def principal_arg(w: complex) -> float:
    """Argument in [-pi, pi); the only adjustment is on the negative real axis."""
    a = cmath.phase(w)
    return -math.pi if a == math.pi else a


def principal_power(w: complex, k: float) -> complex:
    """w^k = |w|^k e^{ik arg w} with arg in [-pi, pi).  Rejects w = 0."""
    if w == 0:
        raise ValueError("principal_power of 0")
    return cmath.exp(k * complex(math.log(abs(w)), principal_arg(w)))


def principal_power_array(w: np.ndarray, k: float) -> np.ndarray:
    """Vectorized principal_power; used by the series summations."""
    ang = np.angle(w)
    ang = np.where(ang == np.pi, -np.pi, ang)
    return np.exp(k * (np.log(np.abs(w)) + 1j * ang))


def consistency_factor(m1: GroupElement, m2: GroupElement, k: float, z: complex = 1j) -> complex:
    """The z-independent unit sigma(M1, M2) relating v(M1 M2) to v(M1) v(M2).

    Evaluated at z = i by default; modulus 1 is asserted to within 1e-12.
    """
    m3 = m1 * m2
    m2z = m2.act(z)
    sigma = (
        principal_power(m1.c * m2z + m1.d, k)
        * principal_power(m2.c * z + m2.d, k)
        / principal_power(m3.c * z + m3.d, k)
    )
    if abs(abs(sigma) - 1.0) > 1e-12:
        raise AssertionError(f"consistency factor has modulus {abs(sigma)}; branch handling is broken")
    return sigma


class MultiplierSystem:
    """Weight-k multiplier system given by its values on the group generators.

    Values on arbitrary elements are derived through the consistency
    condition along a word decomposition and cached by matrix entries.
    Cache insertion is insert-if-absent (atomic under the GIL, guarded by
    a lock for the compound read-check-write); a cached value disagreeing
    with a recomputation by more than 1e-12 raises.
    """

    def __init__(self, group: Subgroup, weight: float, generator_values: dict[int, complex],
                 name: str = "custom"):
        self.group = group
        self.weight = float(weight)
        self.generator_values = {int(i): complex(v) for i, v in generator_values.items()}
        self.name = name
        if len(self.generator_values) != len(group.generators):
            raise ValueError("need one value per group generator")
        if any(v == 0 for v in self.generator_values.values()):
            raise ValueError("multiplier values must be nonzero")
        self._cache: dict[tuple, complex] = {IDENTITY.tuple(): 1.0 + 0j}
        self._lock = threading.Lock()
        for i, g in enumerate(group.generators):
            self._cache_insert(g.tuple(), self.generator_values[i])

    # -- constructors ---------------------------------------------------

    @classmethod
    def trivial(cls, group: Subgroup, weight: float) -> "MultiplierSystem":
        """All generator values 1.  Consistent for even integer weights."""
        vals = {i: 1.0 + 0j for i in range(len(group.generators))}
        return cls(group, weight, vals, name="trivial")

    @classmethod
    def eta_power(cls, s: float) -> "MultiplierSystem":
        """Multiplier of eta^s on SL2(Z), weight s/2.

        eta^s(z+1) = e^{i pi s/12} eta^s(z) and
        eta^s(-1/z) = e^{-i pi s/4} z^{s/2} eta^s(z), both with the
        canonical logarithm of eta (branch pinned at z = i).
        """
        group = Subgroup.sl2z()
        vals = {0: cmath.exp(1j * math.pi * s / 12.0), 1: cmath.exp(-1j * math.pi * s / 4.0)}
        return cls(group, s / 2.0, vals, name=f"eta_power({s})")

    # -- cache ------------------------------------------------------------

    def _cache_insert(self, key: tuple, value: complex) -> complex:
        with self._lock:
            existing = self._cache.get(key)
            if existing is None:
                self._cache[key] = value
                return value
        if abs(existing - value) > CACHE_TOL * (1.0 + abs(existing)):
            raise AssertionError(
                f"multiplier cache disagreement at {key}: {existing} vs {value}")
        return existing

    # -- extension ----------------------------------------------------------

    def __call__(self, m: GroupElement) -> complex:
        return self.value(m)

    def value(self, m: GroupElement) -> complex:
        """v(M), extended from the generators by the consistency condition."""
        key = m.tuple()
        got = self._cache.get(key)
        if got is not None:
            return got
        word = self.group.word_decompose(m)
        gens = self.group.generators
        acc_m = IDENTITY
        acc_v = 1.0 + 0j
        k = self.weight
        for gi, e in word:
            base = gens[gi]
            vb = self.generator_values[gi]
            if e < 0:
                inv = base.inverse()
                vb = 1.0 / (vb * consistency_factor(base, inv, k))
                base = inv
                e = -e
            for _ in range(e):
                acc_v = acc_v * vb * consistency_factor(acc_m, base, k)
                acc_m = acc_m * base
        if acc_m.tuple() != key:
            raise AssertionError("word recomposition mismatch in multiplier extension")
        return self._cache_insert(key, acc_v)

    def kappa(self) -> float:
        """kappa in [0,1) with v(S) = e^{2 pi i kappa}."""
        ang = principal_arg(self.value(self.group.translation)) / (2 * math.pi)
        return ang % 1.0

    def kappa_at_cusp(self, cusp) -> float:
        """kappa_j in [0,1) with v(Q_j) = e^{2 pi i kappa_j} (unit modulus assumed)."""
        ang = principal_arg(self.value(cusp.parabolic)) / (2 * math.pi)
        return ang % 1.0

    def is_weakly_parabolic(self, tol: float = 1e-10) -> bool:
        """|v(Q_j)| = 1 at every parabolic class generator, to within tol."""
        return all(abs(abs(self.value(c.parabolic)) - 1.0) <= tol
                   for c in self.group.cusp_classes())

    def selfcheck(self, rng, trials: int = 20, max_len: int = 4) -> float:
        """Largest deviation of v(AB) from v(A) v(B) sigma(A, B) on random pairs."""
        worst = 0.0
        for _ in range(trials):
            a = self.group.random_word_element(rng, max_len)
            b = self.group.random_word_element(rng, max_len)
            lhs = self.value(a * b)
            rhs = self.value(a) * self.value(b) * consistency_factor(a, b, self.weight)
            worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
        return worst


def stroke(f, m: GroupElement, k: float, v: MultiplierSystem):
    """The stroke operator (F |_v^k M)(z) = F(Mz) v(M)^{-1} (cz+d)^{-k}.

    Returns a lazily evaluated callable on the upper half-plane.
    """
    vinv = 1.0 / v.value(m)

    def slashed(z):
        return f(m.act(z)) * vinv * principal_power(m.c * z + m.d, -k)

    return slashed


def growth_fit(v: MultiplierSystem, max_len: int = 6, n_samples: int = 200,
               rng=None) -> tuple[float, float]:
    """Fit (K, alpha) with |v(V)| <= K mu(V)^alpha over sampled words.

    Least-squares slope of log|v| against log mu, clamped at 0, with K
    inflated so the bound holds on every sample.  A unitary system comes
    out as (1, 0) exactly.
    """
    import random as _random

    rng = rng or _random.Random(0)
    xs, ys = [], []
    for _ in range(n_samples):
        m = v.group.random_word_element(rng, max_len)
        xs.append(math.log(m.mu()))
        ys.append(math.log(abs(v.value(m))))
    xs = np.array(xs)
    ys = np.array(ys)
    if np.allclose(ys, 0.0, atol=1e-12):
        return 1.0, 0.0
    slope = float(np.polyfit(xs, ys, 1)[0])
    alpha = max(slope, 0.0)
    kconst = float(np.exp(np.max(ys - alpha * xs)))
    return max(kconst, 1.0), alpha
