"""Empirical eigenvalue probing via twisted Birkhoff (Weyl) averages.

S_N(alpha) = (1/N) * sum_{t<N} exp(-2*pi*i*alpha*t) * g(F^t(x)) stays bounded
by max|g|; it concentrates near |E g_eigencomponent| when exp(2*pi*i*alpha)
is an eigenvalue visible to g and decays like 1/N (coherent orbits) or
1/sqrt(N) (mixing noise) otherwise.  Frequencies are scanned on the full
reduced-fraction grid up to a denominator cap plus designated irrational
probes; floating point cannot represent irrationality, so "irrational" is
operationalized as "far from every low-denominator fraction".
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import OrbitBudgetExceeded, TorusTooSmall
from .lattice import (
    Alphabet,
    Coord,
    CylinderSpec,
    Pattern,
    RandomSource,
    TorusConfig,
    sample_uniform_torus,
    unfold,
)
from .rules import CellularAutomaton, apply_global, torus_step_array
from .traces import detect_eventual_period

GOLDEN_LABEL = "golden-1"       # (sqrt 5 - 1)/2, the fractional part of the golden ratio
SQRT2_LABEL = "sqrt2-1"
IRRATIONAL_PROBES: tuple[tuple[str, float], ...] = (
    (GOLDEN_LABEL, (math.sqrt(5.0) - 1.0) / 2.0),
    (SQRT2_LABEL, math.sqrt(2.0) - 1.0),
)


@dataclass(frozen=True)
class FrequencyPoint:
    """A scanned frequency alpha in [0, 1); rational points carry the fraction."""

    label: str
    value: float
    numerator: int | None = None
    denominator: int | None = None

    @property
    def is_rational(self) -> bool:
        return self.denominator is not None

    @property
    def fraction(self) -> Fraction | None:
        if self.denominator is None:
            return None
        return Fraction(self.numerator, self.denominator)


def rational_point(frac: Fraction) -> FrequencyPoint:
    frac = Fraction(frac) % 1
    return FrequencyPoint(
        label=f"{frac.numerator}/{frac.denominator}",
        value=frac.numerator / frac.denominator,
        numerator=frac.numerator,
        denominator=frac.denominator,
    )


def frequency_grid(p_max: int, include_irrational: bool = True) -> tuple[FrequencyPoint, ...]:
    """All reduced fractions j/p in [0,1) with p <= p_max, plus irrational probes."""
    fracs = sorted({Fraction(j, p) for p in range(1, p_max + 1) for j in range(p)})
    points = [rational_point(f) for f in fracs]
    if include_irrational:
        points.extend(FrequencyPoint(label, value) for label, value in IRRATIONAL_PROBES)
    return tuple(points)


@dataclass(frozen=True, eq=False)
class Observable:
    """Bounded test function of the window coordinates.

    kind="indicator": 1 on a cylinder, 0 elsewhere.
    kind="character": exp(2*pi*i/|A| * sum_c weights_c * x_c) over a box whose
    low corner sits at `position` (all-zero weights give the constant 1).
    """

    kind: str
    cylinder: CylinderSpec | None = None
    weights: np.ndarray | None = None
    position: Coord | None = None

    def __post_init__(self):
        if self.kind == "indicator":
            if self.cylinder is None:
                raise ValueError("indicator observable needs a cylinder")
        elif self.kind == "character":
            if self.weights is None or self.position is None:
                raise ValueError("character observable needs weights and a position")
            w = np.asarray(self.weights, dtype=np.int64)
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "position", tuple(int(v) for v in self.position))
        else:
            raise ValueError(f"unknown observable kind {self.kind!r}")

    def footprint(self) -> tuple[Coord, Coord]:
        if self.kind == "indicator":
            lo = self.cylinder.position
            dims = self.cylinder.pattern.dims
        else:
            lo = self.position
            dims = self.weights.shape
        return tuple(lo), tuple(l + k for l, k in zip(lo, dims))


def indicator_observable(pattern: Pattern, position: Sequence[int]) -> Observable:
    return Observable(kind="indicator", cylinder=CylinderSpec(pattern, tuple(position)))


def character_observable(weights, position: Sequence[int]) -> Observable:
    return Observable(kind="character", weights=np.asarray(weights), position=tuple(position))


def evaluate_observable(g: Observable, x: TorusConfig) -> complex:
    lo, hi = g.footprint()
    sub = unfold(x, lo, hi)
    if g.kind == "indicator":
        return complex(np.array_equal(sub, g.cylinder.pattern.cells))
    k = x.alphabet.size
    phase = 2.0 * math.pi / k * float((g.weights * sub).sum())
    return cmath.exp(1j * phase)


def _evaluate_batch(g: Observable, arr: np.ndarray, alphabet: Alphabet) -> np.ndarray:
    """Observable values for a batch of tori stacked on the leading axis."""
    lo, hi = g.footprint()
    d = len(lo)
    dims = arr.shape[1:]
    idx = [np.arange(lo[s], hi[s]) % dims[s] for s in range(d)]
    sub = arr[(slice(None),) + np.ix_(*idx)]
    if g.kind == "indicator":
        flat = sub.reshape(len(arr), -1)
        target = g.cylinder.pattern.cells.ravel()
        return (flat == target).all(axis=1).astype(np.complex128)
    k = alphabet.size
    phases = (g.weights[None, ...] * sub).reshape(len(arr), -1).sum(axis=1)
    return np.exp(2j * math.pi / k * phases.astype(np.float64))


def weyl_sum(
    ca: CellularAutomaton, g: Observable, x: TorusConfig, alpha: float, N: int
) -> complex:
    """Exact twisted orbit average S_N(alpha) along the torus orbit of x."""
    if N < 1:
        raise ValueError("orbit length N must be >= 1")
    acc = 0j
    y = x
    for t in range(N):
        acc += cmath.exp(-2j * math.pi * alpha * t) * evaluate_observable(g, y)
        if t + 1 < N:
            y = apply_global(ca, y)
    return acc / N


@dataclass(frozen=True)
class WeylSpectrum:
    """Sample-averaged |S_N(alpha)| over a frequency grid."""

    points: tuple[FrequencyPoint, ...]
    magnitudes: tuple[float, ...]
    stderr: tuple[float, ...]
    orbit_len: int
    samples: int
    threshold: float
    peaks: tuple[tuple[FrequencyPoint, float], ...]

    def magnitude_at(self, label: str) -> float:
        for pt, mag in zip(self.points, self.magnitudes):
            if pt.label == label:
                return mag
        raise KeyError(label)

    @property
    def peak_labels(self) -> tuple[str, ...]:
        return tuple(pt.label for pt, _ in self.peaks)


def default_observable(ca: CellularAutomaton) -> Observable:
    """Indicator of symbol 1 at the origin (constant 1 for unary alphabets)."""
    sym = 1 if ca.alphabet.size > 1 else 0
    one = Pattern(ca.alphabet, (1,) * ca.dimension, [sym])
    return indicator_observable(one, (0,) * ca.dimension)


def scan_spectrum(
    ca: CellularAutomaton,
    g: Observable | None = None,
    p_max: int = 12,
    samples: int = 100,
    N: int = 10_000,
    rng: RandomSource | None = None,
    torus_extent: int | None = None,
    threshold: float = 0.1,
    grid: Sequence[FrequencyPoint] | None = None,
) -> WeylSpectrum:
    """Average |S_N| over uniform random tori on the reduced-fraction grid.

    The default threshold 0.1 separates genuine peaks (order-1 magnitudes)
    from O(1/sqrt(N)) noise by two orders of magnitude at N = 10^4.
    """
    rng = rng or RandomSource(0)
    g = g or default_observable(ca)
    points = tuple(grid) if grid is not None else frequency_grid(p_max)
    if torus_extent is None:
        torus_extent = 64 if ca.dimension == 1 else 16
    dims = (int(torus_extent),) * ca.dimension
    for L, diam in zip(dims, ca.rule.diameter):
        if L < diam:
            raise TorusTooSmall("torus extent below the neighborhood diameter")
    arr = rng.integers(0, ca.alphabet.size, size=(samples, *dims), dtype=np.uint8)
    G = np.empty((samples, N), dtype=np.complex128)
    for t in range(N):
        G[:, t] = _evaluate_batch(g, arr, ca.alphabet)
        if t + 1 < N:
            arr = torus_step_array(ca.rule, arr)
    alphas = np.array([pt.value for pt in points])
    E = np.exp(-2j * math.pi * np.outer(np.arange(N), alphas))
    mags = np.abs(G @ E) / N  # (samples, n_points)
    mean = mags.mean(axis=0)
    err = mags.std(axis=0, ddof=1) / math.sqrt(samples) if samples > 1 else np.zeros_like(mean)
    order = np.argsort(-mean, kind="stable")
    peaks = tuple(
        (points[i], float(mean[i])) for i in order if mean[i] > threshold
    )
    return WeylSpectrum(
        points=points,
        magnitudes=tuple(float(v) for v in mean),
        stderr=tuple(float(v) for v in err),
        orbit_len=N,
        samples=samples,
        threshold=threshold,
        peaks=peaks,
    )


@dataclass(frozen=True)
class EigenvalueReport:
    """Rational eigenvalue candidates certified by orbit periods plus peaks."""

    rational_detected: tuple[Fraction, ...]
    orbit_periods: tuple[int, ...]
    irrational_probes: tuple[tuple[str, float], ...]
    verdict: str
    spectrum: WeylSpectrum


def rational_eigenvalue_check(
    ca: CellularAutomaton,
    p_max: int = 12,
    torus_sizes: Sequence[int] = (8, 12, 16),
    rng: RandomSource | None = None,
    samples_per_size: int = 8,
    N: int = 4096,
    spectrum_samples: int = 24,
    torus_extent: int | None = None,
    threshold: float = 0.1,
    orbit_cap: int = 200_000,
) -> EigenvalueReport:
    """Constrain candidate rational eigenvalues by sampled exact orbit periods,
    then keep the candidates confirmed by a spectrum peak.

    Spatially periodic points are eventually periodic under the automaton, so
    an eigenfunction that is nonzero at a sampled point forces its frequency
    to be a fraction with denominator dividing that orbit's period.
    """
    rng = rng or RandomSource(0)
    periods: set[int] = set()
    for L in torus_sizes:
        dims = (int(L),) * ca.dimension
        for _ in range(samples_per_size):
            x = sample_uniform_torus(dims, ca.alphabet, rng)
            try:
                _, p = detect_eventual_period(ca, x, max_steps=orbit_cap)
            except OrbitBudgetExceeded:
                continue
            periods.add(p)
    candidates = {Fraction(0, 1)}
    for p in periods:
        for j in range(p):
            f = Fraction(j, p)
            if f.denominator <= p_max:
                candidates.add(f)
    spectrum = scan_spectrum(
        ca,
        p_max=p_max,
        samples=spectrum_samples,
        N=N,
        rng=rng,
        torus_extent=torus_extent,
        threshold=threshold,
    )
    # the zero frequency (constant eigenfunction) is always an eigenvalue and
    # needs no empirical confirmation; observables can miss it on absorbing
    # orbits, e.g. additive rules that annihilate power-of-two tori
    confirmed = tuple(
        sorted(
            f for f in candidates
            if f == 0
            or spectrum.magnitude_at(f"{f.numerator}/{f.denominator}") > threshold
        )
    )
    probes = tuple(
        (pt.label, mag)
        for pt, mag in zip(spectrum.points, spectrum.magnitudes)
        if not pt.is_rational
    )
    bad_probe = any(mag > threshold for _, mag in probes)
    verdict = (
        "irrational probe above threshold: attention needed"
        if bad_probe
        else "all detected peaks sit at rational frequencies"
    )
    return EigenvalueReport(
        rational_detected=confirmed,
        orbit_periods=tuple(sorted(periods)),
        irrational_probes=probes,
        verdict=verdict,
        spectrum=spectrum,
    )


@dataclass(frozen=True)
class IdentityPowerResult:
    """Minimal p with F^p = Id on every tested torus (necessary evidence only:
    finite tori cannot prove the identity on the full shift)."""

    power: int | None
    p_max: int
    exhaustive_dims: tuple[tuple[int, ...], ...]
    sampled_dims: tuple[tuple[int, ...], ...]
    caveat: str = "necessary-evidence-only"


def _exhaustive_dims(ca: CellularAutomaton, state_cap: int) -> list[tuple[int, ...]]:
    k = ca.alphabet.size
    diam = ca.rule.diameter
    out = []
    if ca.dimension == 1:
        L = diam[0]
        while k ** L <= state_cap:
            out.append((L,))
            L += 1
    else:
        max_cells = int(math.log(state_cap, k))
        for a in range(diam[0], max_cells + 1):
            for b in range(diam[1], max_cells + 1):
                if a * b <= max_cells:
                    out.append((a, b))
    return out


def identity_power_search(
    ca: CellularAutomaton,
    p_max: int = 64,
    torus_sizes: Sequence[int] | None = None,
    rng: RandomSource | None = None,
    state_cap: int = 1 << 16,
    sample_count: int = 32,
) -> IdentityPowerResult:
    """Exhaustive F^p = Id test on all small tori plus sampling on larger ones."""
    rng = rng or RandomSource(0)
    exhaustive = _exhaustive_dims(ca, state_cap)
    k = ca.alphabet.size
    common: set[int] | None = None
    for dims in exhaustive:
        cells = math.prod(dims)
        count = k ** cells
        place = k ** (cells - 1 - np.arange(cells))
        rows = ((np.arange(count)[:, None] // place) % k).astype(np.uint8)
        rows = rows.reshape(count, *dims)
        start = rows.reshape(count, -1)
        arr = rows
        good: set[int] = set()
        for t in range(1, p_max + 1):
            arr = torus_step_array(ca.rule, arr)
            if np.array_equal(arr.reshape(count, -1), start):
                good.add(t)
        common = good if common is None else common & good
        if not common:
            break
    candidates = sorted(common) if common else []
    if torus_sizes is None:
        torus_sizes = (24, 48) if ca.dimension == 1 else (6, 8)
    sampled = tuple((int(L),) * ca.dimension for L in torus_sizes)
    power = None
    for p in candidates:
        ok = True
        for dims in sampled:
            arr = rng.integers(0, k, size=(sample_count, *dims), dtype=np.uint8)
            start = arr.reshape(sample_count, -1).copy()
            cur = arr
            for _ in range(p):
                cur = torus_step_array(ca.rule, cur)
            if not np.array_equal(cur.reshape(sample_count, -1), start):
                ok = False
                break
        if ok:
            power = p
            break
    return IdentityPowerResult(
        power=power,
        p_max=p_max,
        exhaustive_dims=tuple(exhaustive),
        sampled_dims=sampled,
    )
