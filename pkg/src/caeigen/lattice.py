"""Alphabets, finite patterns, torus configurations, cylinders, the metric,
shift maps and uniform sampling.

Configurations are always stored as finite tori (spatially periodic points).
A torus with extents (L_1, ..., L_d) stands for the infinite configuration
x_i = cells[i mod L]; orbits of such points under any cellular automaton are
exactly computable and eventually periodic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AlphabetMismatch, MalformedSpec

Coord = tuple  # d-vector of ints


@dataclass(frozen=True)
class Alphabet:
    """Finite alphabet {0, ..., size-1}."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("alphabet size must be >= 1")


def _validate_cells(cells, dims, alphabet: Alphabet) -> np.ndarray:
    arr = np.ascontiguousarray(cells, dtype=np.uint8)
    dims = tuple(int(k) for k in dims)
    if any(k < 1 for k in dims):
        raise ValueError(f"extents must be positive, got {dims}")
    if arr.size != math.prod(dims):
        raise ValueError(f"cell count {arr.size} does not match extents {dims}")
    arr = arr.reshape(dims)
    if arr.size and int(arr.max()) >= alphabet.size:
        raise ValueError(f"cell value {int(arr.max())} outside alphabet of size {alphabet.size}")
    arr.setflags(write=False)
    return arr


class _SymbolArray:
    """Shared behaviour of Pattern and TorusConfig (immutable symbol boxes)."""

    alphabet: Alphabet
    dims: Coord
    cells: np.ndarray

    def __init__(self, alphabet: Alphabet, dims: Sequence[int], cells):
        self.alphabet = alphabet
        self.dims = tuple(int(k) for k in dims)
        self.cells = _validate_cells(cells, self.dims, alphabet)

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return self.cells.size

    def key(self) -> bytes:
        """Canonical hashable encoding (dims plus raw cells)."""
        return repr(self.dims).encode() + self.cells.tobytes()

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and self.alphabet == other.alphabet
            and self.dims == other.dims
            and np.array_equal(self.cells, other.cells)
        )

    def __hash__(self):
        return hash((type(self).__name__, self.alphabet.size, self.key()))

    def to_json_obj(self) -> dict:
        return {
            "alphabet": self.alphabet.size,
            "dims": list(self.dims),
            "cells": [int(v) for v in self.cells.ravel()],
        }

    @classmethod
    def from_json_obj(cls, obj: dict):
        try:
            return cls(Alphabet(int(obj["alphabet"])), obj["dims"], obj["cells"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedSpec(f"bad {cls.__name__} literal: {exc}") from exc

    def to_text(self) -> str:
        """Compact text form: "0110" for d=1, rows joined by '/' for d=2."""
        if self.alphabet.size > 10:
            raise ValueError("compact text form requires alphabet size <= 10")
        if self.d == 1:
            return "".join(str(int(v)) for v in self.cells)
        if self.d == 2:
            return "/".join("".join(str(int(v)) for v in row) for row in self.cells)
        raise ValueError("compact text form supports d <= 2")

    def __repr__(self):
        body = self.to_text() if self.d <= 2 and self.alphabet.size <= 10 else f"dims={self.dims}"
        return f"{type(self).__name__}({body!r}, |A|={self.alphabet.size})"


class Pattern(_SymbolArray):
    """Finite pattern with extents (k_1, ..., k_d), row-major cells."""


class TorusConfig(_SymbolArray):
    """Spatially periodic configuration stored on a torus of periods (L_1, ..., L_d)."""


def _parse_text_cells(text: str) -> tuple[tuple[int, ...], list[int]]:
    rows = text.split("/")
    try:
        grid = [[int(c) for c in row] for row in rows]
    except ValueError as exc:
        raise MalformedSpec(f"bad compact literal {text!r}") from exc
    if len(grid) == 1:
        return (len(grid[0]),), grid[0]
    width = len(grid[0])
    if any(len(row) != width for row in grid):
        raise MalformedSpec(f"ragged rows in {text!r}")
    return (len(grid), width), [v for row in grid for v in row]


def parse_pattern(literal: str, alphabet: Alphabet | None = None) -> Pattern:
    """Parse a JSON object literal or a compact text literal into a Pattern."""
    literal = literal.strip()
    if literal.startswith("{"):
        return Pattern.from_json_obj(json.loads(literal))
    dims, cells = _parse_text_cells(literal)
    if alphabet is None:
        alphabet = Alphabet(max(2, max(cells) + 1 if cells else 2))
    return Pattern(alphabet, dims, cells)


def parse_torus(literal: str, alphabet: Alphabet | None = None) -> TorusConfig:
    """Parse a JSON object literal or a compact text literal into a TorusConfig."""
    literal = literal.strip()
    if literal.startswith("{"):
        return TorusConfig.from_json_obj(json.loads(literal))
    dims, cells = _parse_text_cells(literal)
    if alphabet is None:
        alphabet = Alphabet(max(2, max(cells) + 1 if cells else 2))
    return TorusConfig(alphabet, dims, cells)


@dataclass(frozen=True)
class CylinderSpec:
    """Cylinder [w] at position i: configurations that read w on the box
    prod_s [i_s, i_s + |w|_s)."""

    pattern: Pattern
    position: Coord

    def __post_init__(self):
        if len(self.position) != self.pattern.d:
            raise ValueError("position dimension does not match pattern dimension")
        object.__setattr__(self, "position", tuple(int(v) for v in self.position))


def unfold(x: TorusConfig, lo: Sequence[int], hi: Sequence[int]) -> np.ndarray:
    """Cells of the unfolded periodic configuration on the box prod_s [lo_s, hi_s)."""
    if len(lo) != x.d or len(hi) != x.d:
        raise ValueError("box dimension does not match configuration dimension")
    idx = [np.arange(int(lo[s]), int(hi[s])) % x.dims[s] for s in range(x.d)]
    return x.cells[np.ix_(*idx)]


def read_window(x: TorusConfig, lo: Sequence[int], hi: Sequence[int]) -> Pattern:
    """The pattern x reads on the box prod_s [lo_s, hi_s) (wrapping as needed)."""
    cells = unfold(x, lo, hi)
    return Pattern(x.alphabet, cells.shape, cells)


def shift(x: TorusConfig, v: Sequence[int]) -> TorusConfig:
    """Shift map: result_j = x_{j+v} on the torus."""
    if len(v) != x.d:
        raise ValueError("shift vector dimension does not match configuration")
    rolled = np.roll(x.cells, tuple(-int(s) for s in v), axis=tuple(range(x.d)))
    return TorusConfig(x.alphabet, x.dims, rolled)


@dataclass(frozen=True)
class DistanceResult:
    """Metric value 2**-norm (or 0), with honesty about truncation.

    exact is True when the value is the true metric distance of the two
    unfolded configurations; False means "no disagreement inside the searched
    ball, but the tori differ somewhere beyond it".
    """

    value: float
    norm: int | None
    exact: bool


def _tori_equal_as_configurations(x: TorusConfig, y: TorusConfig) -> bool:
    box = tuple(math.lcm(a, b) for a, b in zip(x.dims, y.dims))
    zero = (0,) * x.d
    return np.array_equal(unfold(x, zero, box), unfold(y, zero, box))


def distance(x: TorusConfig, y: TorusConfig, horizon: int) -> DistanceResult:
    """Cantor metric 2**-min{||i|| : x_i != y_i} with ||i|| the Chebyshev norm,
    searched on the ball ||i|| <= horizon."""
    if x.alphabet != y.alphabet:
        raise AlphabetMismatch("distance requires a common alphabet")
    if x.d != y.d:
        raise ValueError("configurations of different lattice dimension")
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    lo = (-horizon,) * x.d
    hi = (horizon + 1,) * x.d
    diff = unfold(x, lo, hi) != unfold(y, lo, hi)
    if not diff.any():
        return DistanceResult(0.0, None, _tori_equal_as_configurations(x, y))
    coords = np.argwhere(diff) - horizon
    norm = int(np.abs(coords).max(axis=1).min())
    return DistanceResult(2.0 ** (-norm), norm, True)


def cylinder_contains(c: CylinderSpec, x: TorusConfig) -> bool:
    """True iff x restricted to the cylinder footprint equals its pattern."""
    if c.pattern.alphabet != x.alphabet:
        raise AlphabetMismatch("cylinder and configuration alphabets differ")
    if c.pattern.d != x.d:
        raise ValueError("cylinder and configuration dimensions differ")
    lo = c.position
    hi = tuple(p + k for p, k in zip(c.position, c.pattern.dims))
    return np.array_equal(unfold(x, lo, hi), c.pattern.cells)


class RandomSource:
    """Deterministic, splittable random stream.

    Identical seeds reproduce identical sample sequences bit for bit; split()
    derives independent child streams so parallel tasks never share state.
    """

    def __init__(self, seed: int | np.random.SeedSequence = 0):
        if isinstance(seed, np.random.SeedSequence):
            self._seq = seed
        else:
            self._seq = np.random.SeedSequence(int(seed))
        self._gen = np.random.Generator(np.random.PCG64(self._seq))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def split(self, n: int) -> list["RandomSource"]:
        return [RandomSource(child) for child in self._seq.spawn(n)]

    def integers(self, low, high=None, size=None, dtype=np.int64):
        return self._gen.integers(low, high=high, size=size, dtype=dtype)

    def __repr__(self):
        return f"RandomSource(entropy={self._seq.entropy})"


def sample_uniform_pattern(dims: Sequence[int], a: Alphabet, rng: RandomSource) -> Pattern:
    """I.i.d. uniform symbols on a box with the given extents."""
    dims = tuple(int(k) for k in dims)
    cells = rng.integers(0, a.size, size=dims, dtype=np.uint8)
    return Pattern(a, dims, cells)


def sample_uniform_torus(dims: Sequence[int], a: Alphabet, rng: RandomSource) -> TorusConfig:
    """I.i.d. uniform symbols on a torus with the given periods."""
    dims = tuple(int(k) for k in dims)
    cells = rng.integers(0, a.size, size=dims, dtype=np.uint8)
    return TorusConfig(a, dims, cells)


def pack_bits(cells, alphabet_size: int) -> int:
    """Row-major packing at ceil(log2 |A|) bits per symbol.

    Compact integer keys for small patterns (visited sets, sequence hashing).
    """
    bits = max(1, (alphabet_size - 1).bit_length())
    out = 0
    for v in np.asarray(cells, dtype=np.uint64).ravel().tolist():
        out = (out << bits) | int(v)
    return out
