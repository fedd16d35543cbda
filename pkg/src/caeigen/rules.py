"""Local rules and the induced global maps.

A rule is a finite list of neighborhood offsets in Z^d plus a dense lookup
table; the global map applies it at every lattice site.  Two exact evolution
modes exist: toroidal wrap (apply_global) and boundary-free window shrinking
(apply_cone), which only reports cells whose value is fully determined by the
initial window.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    AlphabetMismatch,
    MalformedSpec,
    TableLengthMismatch,
    TorusTooSmall,
    WindowExhausted,
)
from .lattice import Alphabet, Coord, Pattern, RandomSource, TorusConfig, sample_uniform_torus, shift

ECA_NEIGHBORHOOD = ((-1,), (0,), (1,))
MAX_TABLE_ENTRIES = 1 << 24


@dataclass(frozen=True, eq=False)
class LocalRule:
    """Neighborhood offsets plus lookup table f: A^k -> A.

    Table index convention: a neighborhood word (a_0, ..., a_{n-1}) read in
    offset order maps to index sum_j a_j * |A|**(n-1-j), i.e. the first offset
    is the most significant digit.
    """

    alphabet: Alphabet
    dimension: int
    neighborhood: tuple[Coord, ...]
    table: np.ndarray

    def __post_init__(self):
        if self.dimension < 1 or self.dimension > 3:
            raise MalformedSpec("supported lattice dimensions are 1..3")
        if not self.neighborhood:
            raise MalformedSpec("neighborhood must contain at least one offset")
        offs = tuple(tuple(int(c) for c in o) for o in self.neighborhood)
        if any(len(o) != self.dimension for o in offs):
            raise MalformedSpec("offset arity does not match dimension")
        if len(set(offs)) != len(offs):
            raise MalformedSpec("duplicate neighborhood offsets")
        object.__setattr__(self, "neighborhood", offs)
        k = self.alphabet.size
        expected = k ** len(offs)
        if expected > MAX_TABLE_ENTRIES:
            raise MalformedSpec("rule table too large to materialize")
        table = np.ascontiguousarray(self.table, dtype=np.uint8).ravel()
        if table.size != expected:
            raise TableLengthMismatch(f"table length {table.size}, expected {expected}")
        if table.size and int(table.max()) >= k:
            raise MalformedSpec("table output outside alphabet")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @cached_property
    def radius(self) -> int:
        """Smallest r with all offsets inside [-r, r]^d."""
        return max(max(abs(c) for c in o) for o in self.neighborhood)

    @cached_property
    def diameter(self) -> tuple[int, ...]:
        """Per-axis neighborhood extent (max - min + 1)."""
        arr = np.array(self.neighborhood)
        return tuple(int(v) for v in arr.max(axis=0) - arr.min(axis=0) + 1)

    @cached_property
    def weights(self) -> tuple[int, ...]:
        n = len(self.neighborhood)
        k = self.alphabet.size
        return tuple(k ** (n - 1 - j) for j in range(n))

    def to_json_obj(self) -> dict:
        return {
            "alphabet": self.alphabet.size,
            "dimension": self.dimension,
            "neighborhood": [list(o) for o in self.neighborhood],
            "table": [int(v) for v in self.table],
        }

    def __eq__(self, other):
        return (
            isinstance(other, LocalRule)
            and self.alphabet == other.alphabet
            and self.dimension == other.dimension
            and self.neighborhood == other.neighborhood
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self):
        return hash((self.alphabet.size, self.dimension, self.neighborhood, self.table.tobytes()))


@dataclass(frozen=True)
class CellularAutomaton:
    """Global map F(x)_m = f(x_{m+k}) induced by a local rule."""

    rule: LocalRule

    @property
    def dimension(self) -> int:
        return self.rule.dimension

    @property
    def radius(self) -> int:
        return self.rule.radius

    @property
    def alphabet(self) -> Alphabet:
        return self.rule.alphabet

    def __call__(self, x: TorusConfig) -> TorusConfig:
        return apply_global(self, x)


def _eca_rule(code: int) -> LocalRule:
    if not 0 <= code <= 255:
        raise MalformedSpec(f"elementary rule code {code} outside 0..255")
    table = [(code >> i) & 1 for i in range(8)]
    return LocalRule(Alphabet(2), 1, ECA_NEIGHBORHOOD, np.array(table, dtype=np.uint8))


def _life_rule(spec: str) -> LocalRule:
    m = re.fullmatch(r"[Bb](\d*)/[Ss](\d*)", spec)
    if m is None:
        raise MalformedSpec(f"bad outer-totalistic code {spec!r} (expected like B3/S23)")
    born = {int(c) for c in m.group(1)}
    survive = {int(c) for c in m.group(2)}
    if any(v > 8 for v in born | survive):
        raise MalformedSpec("outer-totalistic counts must be 0..8")
    nbhd = tuple((i, j) for i in (-1, 0, 1) for j in (-1, 0, 1))
    v = np.arange(512)
    bits = (v[:, None] >> (8 - np.arange(9))) & 1
    center = bits[:, 4]
    neighbors = bits.sum(axis=1) - center
    table = np.where(
        center == 1,
        np.isin(neighbors, sorted(survive)),
        np.isin(neighbors, sorted(born)),
    ).astype(np.uint8)
    return LocalRule(Alphabet(2), 2, nbhd, table)


def parse_rule(spec: str | dict) -> LocalRule:
    """Parse "eca:N", "life:Bx/Sy", an explicit JSON table, or a file path.

    For "eca:N", bit i of N is the output for the neighborhood word
    (x_{-1}, x_0, x_{+1}) read as the binary number i.
    """
    if isinstance(spec, dict):
        obj = spec
    else:
        text = spec.strip()
        if text.startswith("eca:"):
            try:
                code = int(text[4:], 0)
            except ValueError as exc:
                raise MalformedSpec(f"bad elementary rule literal {text!r}") from exc
            return _eca_rule(code)
        if text.startswith("life:"):
            return _life_rule(text[5:])
        if os.path.isfile(text):
            with open(text, "r", encoding="utf-8") as fh:
                text = fh.read().strip()
        if not text.startswith("{"):
            raise MalformedSpec(f"unrecognized rule literal {spec!r}")
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedSpec(f"bad rule JSON: {exc}") from exc
    try:
        alphabet = Alphabet(int(obj["alphabet"]))
        dimension = int(obj["dimension"])
        neighborhood = tuple(tuple(int(c) for c in o) for o in obj["neighborhood"])
        table = obj["table"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedSpec(f"bad rule object: {exc}") from exc
    return LocalRule(alphabet, dimension, neighborhood, np.asarray(table, dtype=np.uint8))


def automaton(spec: str | dict | LocalRule) -> CellularAutomaton:
    """Convenience: build the automaton straight from a rule literal."""
    if isinstance(spec, LocalRule):
        return CellularAutomaton(spec)
    return CellularAutomaton(parse_rule(spec))


# --------------------------- array-level steppers ---------------------------
# The last rule.dimension axes of `arr` are the lattice; leading axes, if any,
# are independent batch entries.  These are the performance workhorses behind
# every higher-level analysis.

def torus_step_array(rule: LocalRule, arr: np.ndarray) -> np.ndarray:
    """One global step with toroidal wrap on each batch entry."""
    d = rule.dimension
    axes = tuple(range(arr.ndim - d, arr.ndim))
    idx = np.zeros(arr.shape, dtype=np.int64)
    for off, w in zip(rule.neighborhood, rule.weights):
        idx += np.roll(arr, tuple(-c for c in off), axis=axes).astype(np.int64) * w
    return rule.table[idx]


def cone_step_array(rule: LocalRule, arr: np.ndarray) -> np.ndarray:
    """One boundary-free step; each lattice axis shrinks by radius per side."""
    d = rule.dimension
    r = rule.radius
    lead = arr.ndim - d
    out_shape = arr.shape[:lead] + tuple(arr.shape[lead + s] - 2 * r for s in range(d))
    if any(n < 1 for n in out_shape[lead:]):
        raise WindowExhausted("window too small for one more step")
    idx = np.zeros(out_shape, dtype=np.int64)
    head = (slice(None),) * lead
    for off, w in zip(rule.neighborhood, rule.weights):
        sl = head + tuple(
            slice(r + off[s], arr.shape[lead + s] - r + off[s]) for s in range(d)
        )
        idx += arr[sl].astype(np.int64) * w
    return rule.table[idx]


def _check_alphabet(ca: CellularAutomaton, obj) -> None:
    if ca.alphabet != obj.alphabet:
        raise AlphabetMismatch("rule and configuration alphabets differ")


def apply_global(ca: CellularAutomaton, x: TorusConfig) -> TorusConfig:
    """Pointwise rule application with toroidal wrap; dims are preserved."""
    _check_alphabet(ca, x)
    if x.d != ca.dimension:
        raise ValueError("configuration dimension does not match the rule")
    for L, diam in zip(x.dims, ca.rule.diameter):
        if L < diam:
            raise TorusTooSmall(f"extent {L} below neighborhood diameter {diam}")
    return TorusConfig(x.alphabet, x.dims, torus_step_array(ca.rule, x.cells))


def step(ca: CellularAutomaton, x: TorusConfig, steps: int = 1) -> TorusConfig:
    """Iterate apply_global."""
    for _ in range(steps):
        x = apply_global(ca, x)
    return x


def apply_cone(ca: CellularAutomaton, w: Pattern, steps: int) -> Pattern:
    """Exactly-determined inner pattern after `steps` steps.

    Each axis shrinks by steps*radius per side; no boundary assumption is
    made, so the result is valid for every configuration extending w.  The
    result's origin sits steps*radius cells inside w's origin on every axis.
    """
    _check_alphabet(ca, w)
    if w.d != ca.dimension:
        raise ValueError("pattern dimension does not match the rule")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    r = ca.radius
    if any(k <= 2 * steps * r for k in w.dims):
        raise WindowExhausted(f"extents {w.dims} cannot support {steps} steps at radius {r}")
    cells = w.cells
    for _ in range(steps):
        cells = cone_step_array(ca.rule, cells)
    return Pattern(w.alphabet, cells.shape, cells)


def commutation_selftest(ca: CellularAutomaton, trials: int, rng: RandomSource) -> bool:
    """Check F(shift_v(x)) == shift_v(F(x)) on random tori and shift vectors.

    A violation indicates an implementation bug, never a property of the
    automaton, so this doubles as an engine self-test.
    """
    d = ca.dimension
    diam = ca.rule.diameter
    for _ in range(trials):
        dims = tuple(int(rng.integers(diam[s], diam[s] + 8)) for s in range(d))
        x = sample_uniform_torus(dims, ca.alphabet, rng)
        v = tuple(int(rng.integers(-5, 6)) for _ in range(d))
        if apply_global(ca, shift(x, v)) != shift(apply_global(ca, x), v):
            return False
    return True
