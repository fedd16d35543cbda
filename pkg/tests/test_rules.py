from __future__ import annotations

import numpy as np
import pytest

from caeigen import (
    Alphabet,
    LocalRule,
    MalformedSpec,
    Pattern,
    RandomSource,
    TableLengthMismatch,
    TorusConfig,
    TorusTooSmall,
    WindowExhausted,
    apply_cone,
    apply_global,
    automaton,
    commutation_selftest,
    parse_pattern,
    parse_rule,
    parse_torus,
    shift,
    step,
)
from conftest import eca, random_eca, random_rule_2d
from oracles import life_step_py, rule_output, step_cone_py, step_torus_py

A2 = Alphabet(2)


# ------------------------------- rule parsing -------------------------------

def test_eca_204_is_center_projection():
    rule = parse_rule("eca:204").table
    for i in range(8):
        left, center, right = (i >> 2) & 1, (i >> 1) & 1, i & 1
        assert rule[i] == center


def test_eca_170_is_right_neighbor_projection():
    rule = parse_rule("eca:170").table
    for i in range(8):
        assert rule[i] == (i & 1)


def test_eca_90_is_xor_of_outer_neighbors():
    rule = parse_rule("eca:90").table
    for i in range(8):
        assert rule[i] == (((i >> 2) ^ i) & 1)


def test_life_table_alive_count():
    rule = parse_rule("life:B3/S23")
    assert rule.table.size == 512
    # independent count: center alive and 2-3 neighbors, or dead and exactly 3
    expected = 0
    for v in range(512):
        bits = [(v >> (8 - j)) & 1 for j in range(9)]
        center, s = bits[4], sum(bits) - bits[4]
        expected += (s in (2, 3)) if center else (s == 3)
    assert int(rule.table.sum()) == expected == 140


def test_rule_json_round_trip():
    rule = parse_rule("eca:110")
    again = parse_rule(rule.to_json_obj())
    assert again == rule


def test_parse_rule_errors():
    with pytest.raises(MalformedSpec):
        parse_rule("eca:900")
    with pytest.raises(MalformedSpec):
        parse_rule("nonsense")
    with pytest.raises(MalformedSpec):
        parse_rule("life:B3S23")
    with pytest.raises(TableLengthMismatch):
        parse_rule({"alphabet": 2, "dimension": 1, "neighborhood": [[-1], [0], [1]], "table": [0, 1]})


def test_rule_radius_and_diameter():
    rule = parse_rule(
        {"alphabet": 2, "dimension": 1, "neighborhood": [[-2], [1]], "table": [0, 1, 1, 0]}
    )
    assert rule.radius == 2
    assert rule.diameter == (4,)


# ------------------------------- apply_global -------------------------------

def test_identity_rule_fixes_everything(rng):
    ca = eca(204)
    x = parse_torus("0110100", A2)
    assert apply_global(ca, x) == x


def test_eca90_hand_simulation():
    ca = eca(90)
    x = TorusConfig(A2, (4,), [0, 0, 0, 1])
    y = apply_global(ca, x)
    assert y.cells.tolist() == [1, 0, 1, 0]
    assert apply_global(ca, y).cells.tolist() == [0, 0, 0, 0]


def test_apply_global_matches_reference_1d(rng):
    for _ in range(20):
        ca = random_eca(rng)
        L = int(rng.integers(3, 12))
        x = TorusConfig(A2, (L,), rng.integers(0, 2, size=L, dtype=np.uint8))
        assert np.array_equal(apply_global(ca, x).cells, step_torus_py(ca.rule, x.cells))


def test_apply_global_matches_reference_2d(rng):
    for _ in range(5):
        ca = random_rule_2d(rng)
        dims = (int(rng.integers(3, 7)), int(rng.integers(3, 7)))
        x = TorusConfig(A2, dims, rng.integers(0, 2, size=dims, dtype=np.uint8))
        assert np.array_equal(apply_global(ca, x).cells, step_torus_py(ca.rule, x.cells))


def test_life_blinker_flips():
    ca = automaton("life:B3/S23")
    grid = np.zeros((5, 5), dtype=np.uint8)
    grid[1:4, 2] = 1  # vertical triple
    x = TorusConfig(A2, (5, 5), grid)
    y = apply_global(ca, x)
    assert np.array_equal(y.cells, life_step_py(grid))
    expected = np.zeros((5, 5), dtype=np.uint8)
    expected[2, 1:4] = 1  # horizontal triple
    assert np.array_equal(y.cells, expected)


def test_torus_too_small():
    with pytest.raises(TorusTooSmall):
        apply_global(eca(90), TorusConfig(A2, (2,), [0, 1]))


# -------------------------------- apply_cone --------------------------------

def test_cone_identity_shrinks_only():
    ca = eca(204)
    w = parse_pattern("0110100", A2)
    out = apply_cone(ca, w, 3)
    assert out.dims == (1,)
    assert out.cells.tolist() == [0]  # original position 3, values unchanged


def test_cone_zero_steps_is_identity():
    w = parse_pattern("00110", A2)
    assert apply_cone(eca(170), w, 0) == w


def test_cone_shift_rule_matches_reference():
    ca = eca(170)
    w = parse_pattern("00110", A2)
    expected = step_cone_py(ca.rule, w.cells)
    out = apply_cone(ca, w, 1)
    assert np.array_equal(out.cells, expected)
    # right-neighbor projection: determined inner cells are original positions 2..4
    assert out.cells.tolist() == [1, 1, 0]


def test_cone_matches_reference_random(rng):
    for _ in range(20):
        ca = random_eca(rng)
        width = int(rng.integers(5, 12))
        w = Pattern(A2, (width,), rng.integers(0, 2, size=width, dtype=np.uint8))
        t = int(rng.integers(1, (width - 1) // 2 + 1))
        ref = w.cells
        for _ in range(t):
            ref = step_cone_py(ca.rule, ref)
        assert np.array_equal(apply_cone(ca, w, t).cells, ref)


def test_cone_window_exhausted():
    with pytest.raises(WindowExhausted):
        apply_cone(eca(90), parse_pattern("01011", A2), 3)


def test_cone_agrees_with_global_window(rng):
    # cone evolution of a pattern read off a torus equals the torus evolution
    from caeigen import unfold

    for _ in range(25):
        ca = random_eca(rng)
        L = int(rng.integers(4, 10))
        t = int(rng.integers(1, 5))
        x = TorusConfig(A2, (L,), rng.integers(0, 2, size=L, dtype=np.uint8))
        wide = unfold(x, (-t,), (L + t,))
        cone = apply_cone(ca, Pattern(A2, wide.shape, wide), t)
        assert np.array_equal(cone.cells, step(ca, x, t).cells)


# ------------------------------ self-testing ------------------------------

def test_commutation_selftest_passes(rng):
    assert commutation_selftest(eca(204), 50, rng)
    assert commutation_selftest(eca(90), 1000, rng)
    assert commutation_selftest(automaton("life:B3/S23"), 25, rng)


def test_commutation_negative_control(rng):
    # a position-dependent map is not a cellular automaton: applying the rule
    # then corrupting one fixed site must break shift commutation somewhere
    ca = eca(90)
    x = parse_torus("01101001", A2)

    def corrupted(y):
        out = apply_global(ca, y).cells.copy()
        out[0] ^= 1
        return TorusConfig(A2, y.dims, out)

    violations = [v for v in range(1, 8) if corrupted(shift(x, (v,))) != shift(corrupted(x), (v,))]
    assert violations
