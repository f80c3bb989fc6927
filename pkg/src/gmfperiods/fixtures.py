"""Named cocycle fixtures used by the CLI, the service and the test suite.

zero            the zero cocycle (weight -k, trivial multiplier)
coboundary-x2   the coboundary of rho(X) = X^2; with a nonzero offset c0 the
                primitive becomes X^2 + c0, whose shifted cocycle (phi*_S = 0)
                is the coboundary of the constant -c0 and is genuinely nonzero
delta           the period cocycle of Delta (k = 10 forced), integral route
"""

from __future__ import annotations

import numpy as np

from .automorphy import MultiplierSystem
from .cohomology import Cocycle
from .eichler import PeriodPolynomial, period_cocycle
from .forms import delta_expansion
from .modgroup import Subgroup

FIXTURES = ("zero", "coboundary-x2", "delta")


def cocycle_fixture(name: str, group: Subgroup, k: int = 10, terms: int = 150,
                    offset: float = 0.0) -> Cocycle:
    v = MultiplierSystem.trivial(group, -float(k))
    if name == "zero":
        return Cocycle.zero(group, k, v)
    if name == "coboundary-x2":
        if k < 2:
            raise ValueError("coboundary-x2 needs k >= 2")
        coeffs = np.zeros(k + 1, dtype=complex)
        coeffs[2] = 1.0
        coeffs[0] = offset
        rho = PeriodPolynomial(coeffs, k)
        return Cocycle.coboundary_of(rho, group, k, v)
    if name == "delta":
        if group.level != 1:
            raise ValueError("the delta fixture lives on SL2Z")
        if k != 10:
            raise ValueError("the delta fixture has weight -10")
        return period_cocycle(delta_expansion(terms), v, 10, group)
    raise ValueError(f"unknown fixture {name!r}; choose from {FIXTURES}")
