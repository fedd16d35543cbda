from __future__ import annotations

import numpy as np
import pytest

from caeigen import Alphabet, CellularAutomaton, LocalRule, RandomSource, automaton

ECA_NEIGHBORHOOD = ((-1,), (0,), (1,))
BOX2D = tuple((i, j) for i in (-1, 0, 1) for j in (-1, 0, 1))


@pytest.fixture
def rng():
    return RandomSource(20260810)


def eca(code: int) -> CellularAutomaton:
    return automaton(f"eca:{code}")


def random_eca(rng: RandomSource) -> CellularAutomaton:
    table = rng.integers(0, 2, size=8, dtype=np.uint8)
    return CellularAutomaton(LocalRule(Alphabet(2), 1, ECA_NEIGHBORHOOD, table))


def random_rule_2d(rng: RandomSource) -> CellularAutomaton:
    table = rng.integers(0, 2, size=512, dtype=np.uint8)
    return CellularAutomaton(LocalRule(Alphabet(2), 2, BOX2D, table))
