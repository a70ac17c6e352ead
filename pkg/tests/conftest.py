import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from jetlaw.expr import JetExpression, exp_atom, sin_atom, cos_atom, pow_atom


ATOM_POOL = (exp_atom(1), sin_atom(1), cos_atom(1), pow_atom(1, -2, -1))


def random_expression(rng: random.Random, max_order=4, max_terms=8,
                      with_atoms=True, with_tx=True, pure_x=False) -> JetExpression:
    raw = []
    for _ in range(rng.randint(1, max_terms)):
        coeff = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        if coeff == 0:
            coeff = Fraction(1)
        factors = {}
        for _ in range(rng.randint(0, 3)):
            b = rng.randint(0, max_order)
            a = 0 if pure_x else rng.randint(0, max_order - b)
            factors[(a, b)] = factors.get((a, b), 0) + rng.randint(1, 2)
        if with_tx and rng.random() < 0.4:
            factors[rng.choice(("t", "x"))] = rng.randint(1, 2)
        if with_atoms and rng.random() < 0.35:
            factors[rng.choice(ATOM_POOL)] = 1
        raw.append((coeff, factors))
    return JetExpression.from_raw(raw)


@pytest.fixture
def rng():
    return random.Random(20260810)
