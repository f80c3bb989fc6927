"""Integer matrix group machinery for SL2(Z) and Gamma0(N).

Elements are unimodular 2x2 integer matrices acting on the upper half
plane by Moebius transformations.  -M is kept distinct from M throughout;
operations that are blind to the sign (the Moebius action) say so, the
multiplier machinery in `automorphy` must see it.

Word decomposition uses the continued-fraction algorithm in

    S = [[1,1],[0,1]],   T = [[0,-1],[1,0]]

for the full modular group, and Schreier generators relative to the
coset space Gamma0(N)\\SL2(Z) = P^1(Z/N) for the congruence subgroups.
Recomposition of a returned word is always exact, including the sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

INFINITY = float("inf")

Cusp = object  # Fraction or INFINITY; alias for documentation only.


class GroupElement:
    """A 2x2 integer matrix with determinant 1."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int, c: int, d: int):
        a, b, c, d = int(a), int(b), int(c), int(d)
        if a * d - b * c != 1:
            raise ValueError(f"determinant of [[{a},{b}],[{c},{d}]] is not 1")
        self.a, self.b, self.c, self.d = a, b, c, d

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "GroupElement":
        return GroupElement(-self.a, -self.b, -self.c, -self.d)

    def __pow__(self, n: int) -> "GroupElement":
        if n < 0:
            return self.inverse() ** (-n)
        out = IDENTITY
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupElement) and self.tuple() == other.tuple()

    def __hash__(self) -> int:
        return hash(self.tuple())

    def __repr__(self) -> str:
        return f"GroupElement({self.a}, {self.b}, {self.c}, {self.d})"

    def tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def trace(self) -> int:
        return self.a + self.d

    def mu(self) -> int:
        """The size measure a^2 + b^2 + c^2 + d^2 used in growth bounds."""
        return self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d

    def is_identity(self) -> bool:
        return self.tuple() == (1, 0, 0, 1)

    def is_parabolic(self) -> bool:
        """True iff |trace| = 2 and the element is not +-I."""
        if abs(self.trace()) != 2:
            return False
        return self.tuple() not in ((1, 0, 0, 1), (-1, 0, 0, -1))

    def bottom_row(self) -> tuple[int, int]:
        return (self.c, self.d)

    def act(self, z):
        """Moebius action (az+b)/(cz+d) on H or on a cusp (Fraction / INFINITY).

        Blind to the sign of the matrix.  Cusp-to-cusp conventions:
        M(inf) = a/c (or inf when c = 0), M(-d/c) = inf.
        """
        if z == INFINITY:
            return Fraction(self.a, self.c) if self.c else INFINITY
        num = self.a * z + self.b
        den = self.c * z + self.d
        if isinstance(z, (Fraction, int)) and den == 0:
            return INFINITY
        return num / den

    def j(self, z) -> complex:
        """Automorphy denominator cz + d."""
        return self.c * z + self.d


IDENTITY = GroupElement(1, 0, 0, 1)
S = GroupElement(1, 1, 0, 1)
T = GroupElement(0, -1, 1, 0)

# A word is a list of (generator index, exponent) pairs whose product,
# taken left to right, reproduces the element exactly (sign included).
Word = list


def multiply(m1: GroupElement, m2: GroupElement) -> GroupElement:
    return m1 * m2


def mu(v: GroupElement) -> int:
    return v.mu()


def is_parabolic(m: GroupElement) -> bool:
    return m.is_parabolic()


def _xgcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _xgcd(b, a % b)
    return g, y, x - y * (a // b)


def _sl2z_letters(m: GroupElement):
    """Write m as a word over {S, T}, exact in SL2(Z).

    Continued fractions on the bottom row; the sign is carried by T^2 = -I.
    Returns a merged [(name, exponent)] list.
    """
    ops = []
    cur = m
    while cur.c != 0:
        q = round(cur.d / cur.c)
        if q != 0:
            cur = cur * GroupElement(1, -q, 0, 1)
            ops.append(("S", q))
        cur = cur * GroupElement(0, 1, -1, 0)  # T^{-1}
        ops.append(("T", 1))
    word = []
    if cur.a == -1:
        word.append(("T", 2))
        shift = -cur.b
    else:
        shift = cur.b
    if shift != 0:
        word.append(("S", shift))
    word.extend(reversed(ops))
    merged = []
    for g, e in word:
        if merged and merged[-1][0] == g:
            merged[-1] = (g, merged[-1][1] + e)
            if merged[-1][1] == 0:
                merged.pop()
        else:
            merged.append((g, e))
    return merged


@dataclass(frozen=True)
class CuspData:
    """One Gamma-equivalence class of cusps.

    `point` is the smallest-denominator representative (INFINITY for the
    class of infinity).  `scaling` is an integral determinant-1 matrix A
    with A(point) = inf, and A^{-1} [[1, width],[0,1]] A = `parabolic`
    generates the stabilizer of the cusp up to sign.
    """

    point: object          # Fraction or INFINITY
    width: int
    scaling: GroupElement
    parabolic: GroupElement

    def label(self) -> str:
        if self.point == INFINITY:
            return "inf"
        return f"{self.point.numerator}/{self.point.denominator}"


class Subgroup:
    """SL2(Z) or Gamma0(N), with generators, cusp data and coset machinery."""

    def __init__(self, level: int = 1):
        if level < 1:
            raise ValueError("level must be a positive integer")
        self.level = int(level)
        self._schreier = None
        self._cusps = None

    # -- construction / parsing ------------------------------------------

    @classmethod
    def sl2z(cls) -> "Subgroup":
        return cls(1)

    @classmethod
    def gamma0(cls, n: int) -> "Subgroup":
        return cls(n)

    @classmethod
    def parse(cls, spec: str) -> "Subgroup":
        """Parse the subgroup grammar "SL2Z" | "Gamma0(N)"."""
        s = spec.strip()
        if s == "SL2Z":
            return cls(1)
        if s.startswith("Gamma0(") and s.endswith(")"):
            body = s[len("Gamma0("):-1]
            if body.isdigit() and int(body) >= 1:
                return cls(int(body))
        raise ValueError(f"bad subgroup spec {spec!r}; expected 'SL2Z' or 'Gamma0(N)', N >= 1")

    @property
    def name(self) -> str:
        return "SL2Z" if self.level == 1 else f"Gamma0({self.level})"

    def __repr__(self) -> str:
        return f"Subgroup({self.name})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self.level == other.level

    def __hash__(self) -> int:
        return hash(("Subgroup", self.level))

    # -- membership -------------------------------------------------------

    def contains(self, m: GroupElement) -> bool:
        return m.c % self.level == 0

    @property
    def translation(self) -> GroupElement:
        """The translation generator S = [[1, lambda],[0,1]]; lambda = 1 here."""
        return S

    @property
    def translation_width(self) -> int:
        return 1

    # -- index and cosets in SL2(Z) ----------------------------------------

    @lru_cache(maxsize=None)
    def _p1(self):
        """P^1(Z/N): canonical class reps, lookup map and unit list."""
        n = self.level
        units = [u for u in range(1, n) if math.gcd(u, n) == 1] or [1]
        seen = {}
        reps = []
        for c in range(n):
            for d in range(n):
                if math.gcd(math.gcd(c, d), n) != 1:
                    continue
                orb = min(((u * c) % n, (u * d) % n) for u in units)
                if orb not in seen:
                    seen[orb] = len(reps)
                    reps.append(orb)
        return reps, seen, units

    def _p1_index(self, c: int, d: int) -> int:
        n = self.level
        _, seen, units = self._p1()
        return seen[min(((u * c) % n, (u * d) % n) for u in units)]

    def index(self) -> int:
        """Index [SL2(Z) : Gamma0(N)] = |P^1(Z/N)|."""
        if self.level == 1:
            return 1
        return len(self._p1()[0])

    def coset_reps(self) -> list[GroupElement]:
        """Right coset representatives of Gamma0(N)\\SL2(Z); identity coset first rep is I."""
        if self.level == 1:
            return [IDENTITY]
        return self._schreier_data()[0]

    # -- generators (Schreier for Gamma0(N)) -------------------------------

    def _schreier_data(self):
        if self._schreier is not None:
            return self._schreier
        n = self.level
        reps_p1, seen, units = self._p1()
        mats = []
        for (c0, d0) in reps_p1:
            found = None
            for tc in range(0, 4):
                for td in range(0, 4):
                    c, d = c0 + tc * n, d0 + td * n
                    if math.gcd(c, d) == 1:
                        found = (c, d)
                        break
                if found:
                    break
            c, d = found
            _, x, y = _xgcd(d, c)  # x*d + y*c = 1
            mats.append(GroupElement(x, -y, c, d))
        mats[self._p1_index(0, 1)] = IDENTITY

        gens: list[GroupElement] = []
        gen_index: dict = {}
        table: dict = {}
        # make sure S is generator 0 (it is the Schreier element at the
        # identity coset for the letter S)
        for i, rep in enumerate(mats):
            for name, g in (("S", S), ("T", T)):
                target = rep * g
                j = self._p1_index(target.c % n, target.d % n)
                sigma = target * mats[j].inverse()
                if not self.contains(sigma):
                    raise AssertionError("Schreier element escaped the subgroup")
                key = sigma.tuple()
                if key == (1, 0, 0, 1):
                    table[(i, name)] = (None, j)
                else:
                    if key not in gen_index:
                        gen_index[key] = len(gens)
                        gens.append(sigma)
                    table[(i, name)] = (gen_index[key], j)
        self._schreier = (mats, gens, table)
        return self._schreier

    @property
    def generators(self) -> list[GroupElement]:
        if self.level == 1:
            return [S, T]
        return self._schreier_data()[1]

    def generator_names(self) -> list[str]:
        if self.level == 1:
            return ["S", "T"]
        return [f"G{i}" for i in range(len(self.generators))]

    # -- word decomposition ------------------------------------------------

    def word_decompose(self, m: GroupElement) -> Word:
        """Express m as [(generator index, exponent)] with exact recomposition.

        Raises ValueError when m is not in the subgroup.
        """
        if not self.contains(m):
            raise ValueError(f"{m!r} is not in {self.name} (c not divisible by {self.level})")
        letters = _sl2z_letters(m)
        if self.level == 1:
            return [(0 if g == "S" else 1, e) for g, e in letters]
        mats, gens, table = self._schreier_data()
        word: Word = []
        i = self._p1_index(0, 1)
        cur = IDENTITY
        n = self.level
        for name, e in letters:
            g = S if name == "S" else T
            step, sgn = (g, 1) if e > 0 else (g.inverse(), -1)
            for _ in range(abs(e)):
                if sgn == 1:
                    gi, j = table[(i, name)]
                    if gi is not None:
                        word.append((gi, 1))
                else:
                    nxt = cur * step
                    j = self._p1_index(nxt.c % n, nxt.d % n)
                    gi, _ = table[(j, name)]
                    if gi is not None:
                        word.append((gi, -1))
                cur = cur * step
                i = self._p1_index(cur.c % n, cur.d % n)
        merged: Word = []
        for gi, e in word:
            if merged and merged[-1][0] == gi:
                merged[-1] = (gi, merged[-1][1] + e)
                if merged[-1][1] == 0:
                    merged.pop()
            else:
                merged.append((gi, e))
        return merged

    def recompose(self, word: Word) -> GroupElement:
        out = IDENTITY
        gens = self.generators
        for gi, e in word:
            out = out * (gens[gi] ** e)
        return out

    def random_word_element(self, rng, max_len: int) -> GroupElement:
        """Product of up to max_len random generator letters (for sampling)."""
        out = IDENTITY
        gens = self.generators
        for _ in range(rng.randint(1, max_len)):
            g = gens[rng.randrange(len(gens))]
            out = out * (g if rng.random() < 0.5 else g.inverse())
        return out

    # -- cusps --------------------------------------------------------------

    def cusp_equivalent(self, x, y) -> bool:
        """Whether two cusps (Fraction or INFINITY) are Gamma0(N)-equivalent."""
        n = self.level

        def pq(v):
            if v == INFINITY:
                return 1, 0
            f = Fraction(v)
            return f.numerator, f.denominator

        p1, q1 = pq(x)
        p2, q2 = pq(y)
        _, s1, _ = _xgcd(p1, q1)  # s1*p1 + t*q1 = 1 -> completes [[p1,*],[q1,s1]]
        _, s2, _ = _xgcd(p2, q2)
        g = math.gcd(q1 * q2, n)
        return (q2 * s1 - q1 * s2) % g == 0 if g else (q2 * s1 - q1 * s2) == 0

    def cusp_classes(self) -> list[CuspData]:
        """One CuspData per equivalence class, infinity first.

        Representatives are the smallest-denominator rationals in each
        class; widths follow from the smallest m with A^{-1} S^m A in the
        group.
        """
        if self._cusps is not None:
            return self._cusps
        n = self.level
        classes: list[Fraction | float] = [INFINITY]
        for q in [d for d in range(1, n + 1) if n % d == 0]:
            for p in range(0, max(n, 1)):
                if math.gcd(p, q) != 1:
                    continue
                x = Fraction(p, q)
                if not any(self.cusp_equivalent(x, y) for y in classes):
                    classes.append(x)
        out = []
        for x in classes:
            if x == INFINITY:
                scaling = IDENTITY
                sigma = IDENTITY
            else:
                p, q = x.numerator, x.denominator
                _, s, t = _xgcd(p, q)  # s*p + t*q = 1
                sigma = GroupElement(p, -t, q, s)  # sigma(inf) = p/q
                scaling = sigma.inverse()
            m = 1
            while True:
                par = sigma * GroupElement(1, m, 0, 1) * sigma.inverse()
                if self.contains(par):
                    break
                m += 1
                if m > 4 * n * n:
                    raise AssertionError("runaway width search")
            out.append(CuspData(point=x, width=m, scaling=scaling, parabolic=par))
        self._cusps = out
        return out

    # -- coset representatives for Gamma_inf \\ Gamma ------------------------

    def coset_bottom_rows(self, bound: int) -> np.ndarray:
        """Bottom rows (c, d) of the translation-coset representatives.

        One row per coset of Gamma_inf\\Gamma with c^2 + d^2 <= bound,
        normalized so c > 0, or (c, d) = (0, 1); sorted by (c^2+d^2, c, d).
        """
        if bound < 1:
            raise ValueError("bound must be >= 1")
        n = self.level
        rows = [(1, 0, 1)]  # (norm, c, d) for the identity coset (0,1)
        cmax = int(math.isqrt(bound))
        for c in range(n if n > 1 else 1, cmax + 1, n if n > 1 else 1):
            dmax = int(math.isqrt(bound - c * c))
            ds = np.arange(-dmax, dmax + 1)
            good = ds[np.gcd(np.abs(ds), c) == 1]
            for d in good.tolist():
                rows.append((c * c + d * d, c, d))
        rows.sort()
        return np.array([(c, d) for _, c, d in rows], dtype=np.int64)

    def coset_reps_mod_translations(self, bound: int) -> list[GroupElement]:
        """Full matrices over coset_bottom_rows (deterministic completion)."""
        out = []
        for c, d in self.coset_bottom_rows(bound).tolist():
            if (c, d) == (0, 1):
                out.append(IDENTITY)
                continue
            _, x, y = _xgcd(d, c)  # x*d + y*c = 1
            out.append(GroupElement(x, -y, c, d))
        return out


def cusp_classes(group: Subgroup) -> list[CuspData]:
    return group.cusp_classes()


def coset_reps_mod_translations(group: Subgroup, bound: int) -> list[GroupElement]:
    return group.coset_reps_mod_translations(bound)


def word_decompose(m: GroupElement, group: Subgroup) -> Word:
    return group.word_decompose(m)


def parse_matrix(text: str) -> GroupElement:
    """Parse "a,b,c,d" into a GroupElement."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError(f"expected 'a,b,c,d', got {text!r}")
    try:
        a, b, c, d = (int(p) for p in parts)
    except ValueError as exc:
        raise ValueError(f"non-integer entry in {text!r}") from exc
    return GroupElement(a, b, c, d)


def parse_word(text: str, group: Subgroup) -> GroupElement:
    """Parse a generator word like "T S^3" or "TS^-2 Q0" into an element.

    Tokens are S, T, I, Q<j> (the parabolic generator of the j-th cusp
    class) or G<j> (the j-th subgroup generator), each with an optional
    ^exponent.
    """
    import re

    tokens = re.findall(r"([STI]|Q\d+|G\d+)(?:\^(-?\d+))?", text.replace(" ", ""))
    if not tokens or "".join(t + (f"^{e}" if e else "") for t, e in tokens) != text.replace(" ", ""):
        raise ValueError(f"bad generator word {text!r}")
    out = IDENTITY
    for name, exp in tokens:
        e = int(exp) if exp else 1
        if name == "I":
            base = IDENTITY
        elif name == "S":
            base = S
        elif name == "T":
            base = T
        elif name.startswith("Q"):
            cusps = group.cusp_classes()
            j = int(name[1:])
            if j >= len(cusps):
                raise ValueError(f"{name}: group {group.name} has only {len(cusps)} cusp classes")
            base = cusps[j].parabolic
        else:
            gens = group.generators
            j = int(name[1:])
            if j >= len(gens):
                raise ValueError(f"{name}: group {group.name} has only {len(gens)} generators")
            base = gens[j]
        out = out * (base ** e)
    return out
