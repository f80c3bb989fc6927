import cmath
import math

import numpy as np
import pytest

import gmfperiods as gp
from gmfperiods.automorphy import (MultiplierSystem, consistency_factor,
                                   principal_arg, principal_power,
                                   principal_power_array)

from conftest import rng, random_sl2z_word


def test_principal_power_examples():
    assert abs(principal_power(-1.0, 0.5) - (-1j)) < 1e-15   # arg(-1) = -pi
    assert abs(principal_power(4.0, 0.5) - 2.0) < 1e-14
    assert abs(principal_power(1j, 2.0) - (-1.0)) < 1e-14


def test_principal_arg_convention():
    assert principal_arg(-1.0) == -math.pi
    assert principal_arg(1.0) == 0.0
    assert -math.pi <= principal_arg(complex(-1, 1e-300)) < math.pi


def test_principal_power_rejects_zero():
    with pytest.raises(ValueError):
        principal_power(0.0, 0.5)


def test_principal_power_array_matches_scalar():
    ws = np.array([1.0, -1.0, 1j, -2 - 3j, 0.5 + 0.1j])
    for k in (0.5, -1.7, 2.0):
        arr = principal_power_array(ws, k)
        for w, a in zip(ws, arr):
            assert abs(a - principal_power(complex(w), k)) < 1e-13


def test_consistency_factor_trivial_cases():
    assert abs(consistency_factor(gp.IDENTITY, gp.IDENTITY, 0.37) - 1) < 1e-14
    up1 = gp.GroupElement(1, 2, 0, 1)
    up2 = gp.GroupElement(1, -5, 0, 1)
    assert abs(consistency_factor(up1, up2, 0.37) - 1) < 1e-14


def test_consistency_factor_z_independent():
    # derived oracle: the ratio must not depend on the evaluation point
    for k in (0.5, 1.3, -0.7):
        a = consistency_factor(gp.T, gp.T, k, z=1j)
        b = consistency_factor(gp.T, gp.T, k, z=1 + 2j)
        assert abs(a - b) < 1e-12
        assert abs(abs(a) - 1) < 1e-12


def test_trivial_multiplier_even_weight_extends_to_one(sl2z):
    v = MultiplierSystem.trivial(sl2z, 12.0)
    r = rng(20)
    for _ in range(200):
        m = random_sl2z_word(r, 8)
        assert abs(v.value(m) - 1.0) < 1e-12


def test_translation_powers(sl2z):
    v = MultiplierSystem.eta_power(1.0)
    kappa = v.kappa()
    assert abs(kappa - 1.0 / 24.0) < 1e-15
    for n in (1, 2, 5, -3):
        got = v.value(gp.S ** n)
        assert abs(got - cmath.exp(2j * math.pi * n * kappa)) < 1e-12


def test_extension_decomposition_independent(sl2z):
    v = MultiplierSystem.eta_power(1.0)
    r = rng(21)
    for _ in range(100):
        a = random_sl2z_word(r, 6)
        b = random_sl2z_word(r, 6)
        lhs = v.value(a * b)
        rhs = v.value(a) * v.value(b) * consistency_factor(a, b, v.weight)
        assert abs(lhs - rhs) < 1e-12


def test_eta_multiplier_transformation(sl2z):
    # the eta q-product is the independent oracle
    v = MultiplierSystem.eta_power(1.0)
    m = gp.GroupElement(2, 1, 1, 1)
    z = 1j
    lhs = gp.eta_eval(m.act(z))
    rhs = v.value(m) * principal_power(m.c * z + m.d, 0.5) * gp.eta_eval(z)
    assert abs(lhs - rhs) < 1e-10


def test_weakly_parabolic(sl2z):
    assert MultiplierSystem.trivial(sl2z, 12.0).is_weakly_parabolic()
    assert MultiplierSystem.eta_power(1.0).is_weakly_parabolic()


def test_multiplier_selfcheck(sl2z):
    v = MultiplierSystem.eta_power(3.0)
    assert v.selfcheck(rng(22), trials=20) < 1e-12


# -- stroke operator ----------------------------------------------------------

def test_stroke_identity(delta150, sl2z):
    v = gp.MultiplierSystem.trivial(sl2z, 12.0)
    f = gp.stroke(delta150.eval, gp.IDENTITY, 12.0, v)
    for z in (1j, 0.3 + 0.8j):
        assert abs(f(z) - delta150.eval(z)) < 1e-15


def test_stroke_delta_modular(delta150, sl2z):
    # Delta | T = Delta for the truncated product, to truncation accuracy
    v = gp.MultiplierSystem.trivial(sl2z, 12.0)
    f = gp.stroke(delta150.eval, gp.T, 12.0, v)
    r = rng(23)
    for _ in range(10):
        z = complex(r.uniform(-0.5, 0.5), r.uniform(0.5, 2.0))
        assert abs(f(z) - delta150.eval(z)) < 1e-9


def test_stroke_constant_weight_zero(sl2z):
    v = MultiplierSystem.trivial(sl2z, 0.0)
    one = gp.stroke(lambda z: 1.0 + 0j, gp.T * gp.S, 0.0, v)
    assert abs(one(0.4 + 1.1j) - 1.0) < 1e-14


def test_stroke_composition(delta150, sl2z):
    # (F|M1)|M2 = F|(M1 M2) pointwise
    v = MultiplierSystem.trivial(sl2z, 12.0)
    r = rng(24)
    for _ in range(20):
        m1 = random_sl2z_word(r, 3)
        m2 = random_sl2z_word(r, 3)
        lhs = gp.stroke(gp.stroke(delta150.eval, m1, 12.0, v), m2, 12.0, v)
        rhs = gp.stroke(delta150.eval, m1 * m2, 12.0, v)
        z = complex(r.uniform(-0.5, 0.5), r.uniform(1.5, 2.5))
        assert abs(lhs(z) - rhs(z)) < 1e-9


def test_stroke_composition_real_weight(sl2z):
    # weight 1/2 with the eta multiplier; eta itself is the test function
    v = MultiplierSystem.eta_power(1.0)
    r = rng(25)
    for _ in range(10):
        m1 = random_sl2z_word(r, 3)
        m2 = random_sl2z_word(r, 3)
        lhs = gp.stroke(gp.stroke(gp.eta_eval, m1, 0.5, v), m2, 0.5, v)
        rhs = gp.stroke(gp.eta_eval, m1 * m2, 0.5, v)
        z = complex(r.uniform(-0.5, 0.5), r.uniform(1.5, 2.5))
        assert abs(lhs(z) - rhs(z)) < 1e-9


# -- growth fit ------------------------------------------------------------------

def test_growth_fit_trivial(sl2z):
    v = MultiplierSystem.trivial(sl2z, 12.0)
    k, alpha = gp.growth_fit(v, rng=rng(26))
    assert alpha == 0.0
    assert k == 1.0


def test_growth_fit_unitary(sl2z):
    v = MultiplierSystem.eta_power(2.0)
    k, alpha = gp.growth_fit(v, rng=rng(27))
    assert alpha == 0.0
    assert k == 1.0


def test_growth_fit_gmf_holdout(gmf_c1):
    _, v = gmf_c1
    k, alpha = gp.growth_fit(v, max_len=4, n_samples=120, rng=rng(28))
    # holdout validation: the fitted bound must hold on fresh samples
    r = rng(29)
    for _ in range(200):
        m = v.group.random_word_element(r, 4)
        assert abs(v.value(m)) <= k * m.mu() ** alpha * (1 + 1e-9)
