import math
from fractions import Fraction

import numpy as np
import pytest

import gmfperiods as gp
from gmfperiods.modgroup import GroupElement, INFINITY, Subgroup

from conftest import rng, random_sl2z_word


def test_multiply_examples():
    assert gp.IDENTITY * gp.IDENTITY == gp.IDENTITY
    assert gp.S * gp.S == GroupElement(1, 2, 0, 1)
    assert gp.T * gp.T == GroupElement(-1, 0, 0, -1)


def test_determinant_enforced():
    with pytest.raises(ValueError):
        GroupElement(1, 0, 0, 2)
    with pytest.raises(ValueError):
        GroupElement(2, 0, 0, 2)


def test_negation_is_distinct():
    assert -gp.IDENTITY != gp.IDENTITY
    assert (-gp.IDENTITY) * (-gp.IDENTITY) == gp.IDENTITY


def test_act_examples():
    assert gp.S.act(1j) == 1 + 1j
    assert abs(gp.T.act(1j) - 1j) < 1e-15
    assert abs(gp.T.act(2j) - 0.5j) < 1e-15


def test_act_on_cusps():
    assert gp.T.act(Fraction(0)) == INFINITY
    assert gp.T.act(INFINITY) == Fraction(0)
    assert gp.S.act(Fraction(1, 2)) == Fraction(3, 2)


def test_is_parabolic():
    assert GroupElement(1, 5, 0, 1).is_parabolic()
    assert not gp.T.is_parabolic()           # trace 0
    assert not gp.IDENTITY.is_parabolic()    # excluded by definition
    assert not (-gp.IDENTITY).is_parabolic()


def test_mu_examples():
    assert gp.IDENTITY.mu() == 2
    assert gp.S.mu() == 3
    assert GroupElement(2, 1, 1, 1).mu() == 7


def test_act_composition_property():
    r = rng(10)
    for _ in range(100):
        m1 = random_sl2z_word(r, 6)
        m2 = random_sl2z_word(r, 6)
        z = complex(r.uniform(-2, 2), r.uniform(0.5, 3))
        lhs = (m1 * m2).act(z)
        rhs = m1.act(m2.act(z))
        assert abs(lhs - rhs) < 1e-12


# -- word decomposition ---------------------------------------------------------

def test_word_decompose_identity(sl2z):
    assert sl2z.word_decompose(gp.IDENTITY) == []


def test_word_decompose_translation(sl2z):
    assert sl2z.word_decompose(GroupElement(1, 3, 0, 1)) == [(0, 3)]


def test_word_decompose_recompose(sl2z):
    m = GroupElement(2, 1, 1, 1)
    word = sl2z.word_decompose(m)
    assert sl2z.recompose(word) == m


def test_word_decompose_roundtrip_random(sl2z):
    r = rng(11)
    for _ in range(100):
        m = random_sl2z_word(r, 12)
        assert sl2z.recompose(sl2z.word_decompose(m)) == m


def test_word_decompose_gamma0_membership():
    g = Subgroup.gamma0(4)
    with pytest.raises(ValueError):
        g.word_decompose(gp.T)  # c = 1 not divisible by 4


def test_word_decompose_gamma0_roundtrip():
    g = Subgroup.gamma0(11)
    r = rng(12)
    for _ in range(60):
        m = g.random_word_element(r, 5)
        assert g.recompose(g.word_decompose(m)) == m


def test_schreier_translation_is_first_generator():
    for n in (2, 4, 11):
        g = Subgroup.gamma0(n)
        assert g.generators[0] == gp.S


# -- cusps ------------------------------------------------------------------------

def brute_force_cusp_orbits(n: int, entry_bound: int = 30):
    """Oracle: partition candidate cusps by the orbit of Gamma0(n) matrices
    with small entries, and read widths off the parabolic fixers."""
    candidates = [INFINITY] + [Fraction(p, q)
                               for q in range(1, n + 1) if n % q == 0
                               for p in range(0, max(n, 1)) if math.gcd(p, q) == 1]
    candidates = sorted(set(candidates), key=lambda x: (x == INFINITY and -1 or 0, x))
    mats = []
    for c in range(-entry_bound, entry_bound + 1):
        if c % n:
            continue
        for a in range(-entry_bound, entry_bound + 1):
            for d in range(-entry_bound, entry_bound + 1):
                if c == 0:
                    if a * d == 1:
                        for b in range(-entry_bound, entry_bound + 1):
                            mats.append(GroupElement(a, b, 0, d))
                    continue
                bc = a * d - 1
                if bc % c == 0:
                    mats.append(GroupElement(a, bc // c, c, d))
    classes: list[list] = []
    for x in candidates:
        orbit_hit = None
        for cl in classes:
            if any(m.act(x) == y for m in mats for y in cl):
                orbit_hit = cl
                break
        if orbit_hit is None:
            classes.append([x])
        else:
            orbit_hit.append(x)
    widths = {}
    for cl in classes:
        rep = cl[0]
        best = None
        for m in mats:
            if m.is_parabolic() and m.act(rep) == rep:
                if rep == INFINITY:
                    step = abs(m.b)
                else:
                    # m = +-(I + t v w^T) with v = (p, q): c entry = -t q^2
                    q = Fraction(rep).denominator
                    step = abs(m.c) // (q * q)
                if step and (best is None or step < best):
                    best = step
        widths[rep] = best
    return classes, widths


def test_cusp_classes_sl2z(sl2z):
    cls = sl2z.cusp_classes()
    assert len(cls) == 1
    assert cls[0].point == INFINITY
    assert cls[0].width == 1


@pytest.mark.parametrize("n,expected", [
    (2, {"inf": 1, "0/1": 2}),
    (4, {"inf": 1, "0/1": 4, "1/2": 1}),
])
def test_cusp_classes_gamma0_against_oracle(n, expected):
    g = Subgroup.gamma0(n)
    got = {c.label(): c.width for c in g.cusp_classes()}
    assert got == expected
    # independent brute-force orbit oracle
    classes, widths = brute_force_cusp_orbits(n)
    assert len(classes) == len(expected)
    oracle = {("inf" if rep == INFINITY else f"{rep.numerator}/{rep.denominator}"): w
              for cls in classes for rep, w in [(cls[0], widths[cls[0]])]}
    assert oracle == expected


def test_cusp_invariants():
    for n in (2, 3, 4, 6, 11):
        g = Subgroup.gamma0(n)
        for c in g.cusp_classes():
            # A(point) = inf and Q = A^{-1} S^width A generates the stabilizer
            assert c.scaling.act(c.point) == INFINITY
            q = c.scaling.inverse() * (gp.S ** c.width) * c.scaling
            assert q == c.parabolic
            assert c.parabolic.is_parabolic()
            assert g.contains(c.parabolic)
            # no smaller width works
            for m in range(1, c.width):
                assert not g.contains(c.scaling.inverse() * (gp.S ** m) * c.scaling)


def test_width_sum_equals_index():
    for n in (1, 2, 3, 4, 6):
        g = Subgroup.gamma0(n)
        assert sum(c.width for c in g.cusp_classes()) == g.index()


# -- coset representatives --------------------------------------------------------

def test_coset_reps_examples(sl2z):
    rows = sl2z.coset_bottom_rows(1)
    assert rows.tolist() == [[0, 1], [1, 0]]
    rows = sl2z.coset_bottom_rows(2)
    assert rows.tolist() == [[0, 1], [1, 0], [1, -1], [1, 1]]
    g2 = Subgroup.gamma0(2)
    assert g2.coset_bottom_rows(1).tolist() == [[0, 1]]


def test_coset_reps_enumeration_oracle(sl2z):
    # brute force: all coprime pairs, one per +- class, norm ordered
    bound = 200
    expected = set()
    for c in range(0, 15):
        for d in range(-15, 16):
            if c * c + d * d <= bound and math.gcd(c, abs(d)) == 1:
                if c > 0 or (c == 0 and d == 1):
                    expected.add((c, d))
    got = set(map(tuple, sl2z.coset_bottom_rows(bound).tolist()))
    assert got == expected


def test_coset_reps_distinct_cosets(sl2z):
    reps = sl2z.coset_reps_mod_translations(50)
    for m in reps:
        assert m.a * m.d - m.b * m.c == 1
    for i, v in enumerate(reps):
        for w in reps[i + 1:]:
            q = v * w.inverse()
            # distinct cosets of Gamma_inf \ Gamma: V W^{-1} is not a translation
            assert not (q.c == 0 and q.a == 1)


def test_coset_reps_membership():
    g = Subgroup.gamma0(2)
    for m in g.coset_reps_mod_translations(100):
        assert g.contains(m)


# -- parsing -----------------------------------------------------------------------

def test_parse_group():
    assert Subgroup.parse("SL2Z").level == 1
    assert Subgroup.parse("Gamma0(12)").level == 12
    for bad in ("Gamma0(0)", "Gamma0(-1)", "SL3Z", "Gamma0(x)"):
        with pytest.raises(ValueError):
            Subgroup.parse(bad)


def test_parse_matrix_and_word(sl2z):
    assert gp.parse_matrix("1,1,0,1") == gp.S
    with pytest.raises(ValueError):
        gp.parse_matrix("1,1,0")
    with pytest.raises(ValueError):
        gp.parse_matrix("1,1,0,x")
    assert gp.parse_word("T S^3", sl2z) == gp.T * (gp.S ** 3)
    assert gp.parse_word("TS^-2", sl2z) == gp.T * (gp.S ** -2)
    assert gp.parse_word("Q0", sl2z) == gp.S
    with pytest.raises(ValueError):
        gp.parse_word("X", sl2z)
