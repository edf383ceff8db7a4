import random
from fractions import Fraction

import pytest

from nambu_forge.poly import Poly, VarSpace


def random_poly(space: VarSpace, rng: random.Random, degree: int = 2, terms: int = 3) -> Poly:
    """Small random polynomial with coefficients in [-3, 3] \\ {0}."""
    out = {}
    for _ in range(terms):
        e = [rng.randint(0, degree) for _ in range(space.nvars)]
        while sum(e) > degree:
            e[e.index(max(e))] -= 1
        out[tuple(e)] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
    return Poly(space, out)


@pytest.fixture
def rng():
    return random.Random(20240817)
