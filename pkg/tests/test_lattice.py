from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from caeigen import (
    Alphabet,
    AlphabetMismatch,
    CylinderSpec,
    MalformedSpec,
    Pattern,
    RandomSource,
    TorusConfig,
    cylinder_contains,
    distance,
    pack_bits,
    parse_pattern,
    parse_torus,
    sample_uniform_pattern,
    sample_uniform_torus,
    shift,
)

A2 = Alphabet(2)


def torus(text: str) -> TorusConfig:
    return parse_torus(text, A2)


# --------------------------------- shift ---------------------------------

def test_shift_zero_is_identity():
    x = torus("0110")
    assert shift(x, (0,)) == x


def test_shift_moves_cells_forward():
    x = TorusConfig(Alphabet(4), (4,), [0, 1, 2, 3])
    assert shift(x, (1,)).cells.tolist() == [1, 2, 3, 0]


@settings(max_examples=50, deadline=None)
@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(0, 2 ** 12 - 1))
def test_shift_group_action(u, v, bits):
    cells = [(bits >> i) & 1 for i in range(12)]
    x = TorusConfig(A2, (3, 4), cells)
    assert shift(shift(x, (u, v)), (-u, -v)) == x
    assert shift(shift(x, (u, 0)), (0, v)) == shift(x, (u, v))


# -------------------------------- distance --------------------------------

def test_distance_equal_tori():
    x = torus("0110")
    res = distance(x, x, horizon=8)
    assert res.value == 0.0 and res.exact


def test_distance_disagreement_at_origin():
    x, y = torus("0110"), torus("1110")
    assert distance(x, y, horizon=8).value == 1.0


def test_distance_disagreement_at_norm_three():
    x = torus("00000000")
    y = torus("00010000")  # differs at position 3 only (and its translates mod 8)
    res = distance(x, y, horizon=8)
    assert res.norm == 3 and res.value == 2.0 ** -3


def test_distance_truncation_flag():
    # agree on the ball of radius 1 but differ as configurations
    x = torus("00")
    y = torus("0000100")  # ones at ..., -3, 4, 11, ...
    res = distance(x, y, horizon=1)
    assert res.value == 0.0 and not res.exact
    # same configuration stored on different periods is exact zero
    z = torus("0101")
    w = torus("01")
    res2 = distance(z, w, horizon=1)
    assert res2.value == 0.0 and res2.exact


def test_distance_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        distance(torus("01"), TorusConfig(Alphabet(3), (2,), [0, 1]), horizon=2)


@settings(max_examples=50, deadline=None)
@given(st.tuples(*[st.integers(0, 1)] * 6), st.tuples(*[st.integers(0, 1)] * 6),
       st.tuples(*[st.integers(0, 1)] * 6))
def test_distance_ultrametric(a, b, c):
    x, y, z = (TorusConfig(A2, (6,), list(v)) for v in (a, b, c))
    h = 6
    dxz = distance(x, z, h).value
    dxy = distance(x, y, h).value
    dyz = distance(y, z, h).value
    assert dxz <= max(dxy, dyz)
    assert dxy == distance(y, x, h).value


# -------------------------------- cylinders --------------------------------

def test_cylinder_examples():
    zero = parse_pattern("0", A2)
    assert cylinder_contains(CylinderSpec(zero, (0,)), torus("0000"))
    assert cylinder_contains(CylinderSpec(parse_pattern("01", A2), (0,)), torus("0111"))
    assert not cylinder_contains(CylinderSpec(parse_pattern("11", A2), (0,)), torus("0111"))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 255), st.integers(-10, 10), st.integers(0, 3))
def test_cylinder_shift_equivariance(bits, pos, w_bits):
    x = TorusConfig(A2, (8,), [(bits >> i) & 1 for i in range(8)])
    w = Pattern(A2, (2,), [w_bits & 1, (w_bits >> 1) & 1])
    at_pos = cylinder_contains(CylinderSpec(w, (pos,)), x)
    at_origin = cylinder_contains(CylinderSpec(w, (0,)), shift(x, (pos,)))
    assert at_pos == at_origin


def test_cylinder_wider_than_torus():
    # the unfolded configuration of "0" contains the pattern "00"
    assert cylinder_contains(CylinderSpec(parse_pattern("00", A2), (0,)), torus("0"))


# -------------------------------- sampling --------------------------------

def test_sampling_unary_alphabet(rng):
    p = sample_uniform_pattern((5,), Alphabet(1), rng)
    assert p.cells.tolist() == [0] * 5


def test_sampling_deterministic():
    a = sample_uniform_pattern((16,), A2, RandomSource(99))
    b = sample_uniform_pattern((16,), A2, RandomSource(99))
    assert a == b


def test_sampling_split_streams_differ():
    r1, r2 = RandomSource(7).split(2)
    assert sample_uniform_pattern((32,), A2, r1) != sample_uniform_pattern((32,), A2, r2)


def test_sampling_symbol_frequencies(rng):
    draws = sample_uniform_pattern((100_000,), A2, rng).cells
    freq = draws.mean()
    assert abs(freq - 0.5) < 0.01
    counts = np.bincount(draws, minlength=2)
    assert stats.chisquare(counts).pvalue > 1e-6


def test_sampling_byte_patterns_goodness_of_fit():
    # 10^6 draws of 8-cell binary patterns: all 256 outcomes uniform
    rng = RandomSource(20260810)
    draws = rng.integers(0, 2, size=(1_000_000, 8), dtype=np.uint8)
    codes = np.packbits(draws, axis=1).ravel()
    counts = np.bincount(codes, minlength=256)
    res = stats.chisquare(counts)
    assert res.pvalue > 1e-6
    sigma = math.sqrt(1_000_000 * (1 / 256) * (255 / 256))
    assert np.abs(counts - 1_000_000 / 256).max() < 4.5 * sigma


# ------------------------------ literals, misc ------------------------------

def test_pattern_json_round_trip():
    p = Pattern(Alphabet(3), (2, 3), [0, 1, 2, 2, 1, 0])
    assert Pattern.from_json_obj(json.loads(json.dumps(p.to_json_obj()))) == p


def test_pattern_text_round_trip_2d():
    p = parse_pattern("010/111", A2)
    assert p.dims == (2, 3)
    assert p.to_text() == "010/111"


def test_pattern_cell_validation():
    with pytest.raises(ValueError):
        Pattern(A2, (2,), [0, 5])
    with pytest.raises(ValueError):
        Pattern(A2, (3,), [0, 1])


def test_parse_pattern_rejects_garbage():
    with pytest.raises(MalformedSpec):
        parse_pattern("01a1", A2)
    with pytest.raises(MalformedSpec):
        parse_pattern("01/011", A2)


def test_pack_bits():
    assert pack_bits([1, 0, 1], 2) == 0b101
    assert pack_bits([3, 1], 4) == 0b1101
    assert pack_bits([2, 0], 3) == 0b1000  # 2 symbols at 2 bits each
