import random

import numpy as np
import pytest

import gmfperiods as gp


@pytest.fixture(scope="session")
def sl2z():
    return gp.Subgroup.sl2z()


@pytest.fixture(scope="session")
def gamma0_11():
    return gp.Subgroup.gamma0(11)


@pytest.fixture(scope="session")
def delta150():
    return gp.delta_expansion(150)


@pytest.fixture(scope="session")
def trivial_w10(sl2z):
    # weight -10 stroke data for the Delta period machinery
    return gp.MultiplierSystem.trivial(sl2z, -10.0)


@pytest.fixture(scope="session")
def delta_eichler(delta150):
    return gp.eichler_integral(delta150, 10)


@pytest.fixture(scope="session")
def delta_cocycle(delta150, trivial_w10, sl2z):
    return gp.period_cocycle(delta150, trivial_w10, 10, sl2z)


@pytest.fixture(scope="session")
def gmf_c1():
    # the weight-0 example with c = 1 (real c already non-unitary)
    return gp.gmf_example(1.0)


def rng(seed: int) -> random.Random:
    return random.Random(seed)


def random_sl2z_word(r: random.Random, max_len: int) -> gp.GroupElement:
    out = gp.IDENTITY
    for _ in range(r.randint(1, max_len)):
        g = r.choice([gp.S, gp.T])
        out = out * (g if r.random() < 0.5 else g.inverse())
    return out
