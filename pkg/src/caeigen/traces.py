"""Traces, eventual-period detection, trace-periodicity sets and their
Monte-Carlo measure estimates, wall samplers, and measure-theoretic
equicontinuity scores.

The trace of a point is the sequence of central-window contents along its
orbit.  On a torus the orbit is finite, so (preperiod, period) are exact; on
a finite sample the trace is computed exactly on the dependence cone and a
detected period is only accepted when it completes at least two full cycles
and persists over the back half of the horizon (anything else is censored,
never guessed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .blocking import (
    CERTIFIED,
    ALMOST_EQUICONTINUOUS,
    BlockingBudget,
    BlockingCertificate,
    certify_blocking,
    classify_kurka,
    fully_blocking_query,
)
from .errors import (
    DimensionUnsupported,
    NotFullyBlocking,
    OrbitBudgetExceeded,
    TorusTooSmall,
    WindowExhausted,
)
from .lattice import (
    Alphabet,
    Pattern,
    RandomSource,
    TorusConfig,
    pack_bits,
    read_window,
    sample_uniform_pattern,
    unfold,
)
from .rules import CellularAutomaton, apply_global, cone_step_array, torus_step_array

YES = "Yes"
NO_K = "No_k"
CENSORED = "Censored"


def trace(ca: CellularAutomaton, x: TorusConfig, n: int, T: int) -> list[Pattern]:
    """The window contents F^t(x)|[-n,n]^d for t = 0..T, computed exactly."""
    if any(L < 2 * n + 1 for L in x.dims):
        raise TorusTooSmall(f"extents {x.dims} cannot host the window [-{n}, {n}]^d")
    lo = (-n,) * x.d
    hi = (n + 1,) * x.d
    out = [read_window(x, lo, hi)]
    for _ in range(T):
        x = apply_global(ca, x)
        out.append(read_window(x, lo, hi))
    return out


def detect_eventual_period(
    ca: CellularAutomaton, x: TorusConfig, max_steps: int = 1_000_000
) -> tuple[int, int]:
    """Exact minimal (preperiod, period) of the full torus orbit.

    Brent cycle detection on the orbit; torus orbits are finite so the answer
    is exact, but the worst case is astronomical, hence the step budget.
    """
    spent = 0

    def advance(y: TorusConfig) -> TorusConfig:
        nonlocal spent
        spent += 1
        if spent > max_steps:
            raise OrbitBudgetExceeded(f"orbit exceeded {max_steps} steps")
        return apply_global(ca, y)

    power = lam = 1
    tortoise = x
    hare = advance(x)
    while tortoise.key() != hare.key():
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = advance(hare)
        lam += 1
    tortoise = hare = x
    for _ in range(lam):
        hare = advance(hare)
    mu = 0
    while tortoise.key() != hare.key():
        tortoise = advance(tortoise)
        hare = advance(hare)
        mu += 1
    return mu, lam


@dataclass(frozen=True)
class TraceRecord:
    """Outcome of periodicity detection on a finite window trace."""

    window_n: int
    horizon: int
    status: str  # Yes / No_k / Censored
    preperiod: int | None = None
    period: int | None = None


def _detect_trace_period(keys: Sequence, T: int) -> tuple[int, int] | None:
    """Minimal (m, p) describing keys[0..T] as an eventually periodic tail.

    A detection is accepted only if the p-periodic tail starts by T/2 and at
    least two full periods fit before the horizon; random traces then match
    only with exponentially small probability instead of the ~|A|^-small
    coincidences a bare suffix repeat would admit.
    """
    for p in range(1, T // 2 + 1):
        if keys[T - p] != keys[T]:
            continue
        m = T - p
        while m > 0 and keys[m - 1] == keys[m - 1 + p]:
            m -= 1
        if m + 2 * p <= T and 2 * m <= T:
            return m, p
    return None


def cone_sample_dims(ca: CellularAutomaton, n: int, T: int) -> tuple[int, ...]:
    """Extents of the dependence cone [-n - T*r, n + T*r]^d."""
    w = 2 * (n + T * ca.radius) + 1
    return (w,) * ca.dimension


def qn_membership(
    ca: CellularAutomaton, w0: Pattern, n: int, k: int, T: int
) -> TraceRecord:
    """Classify a cone sample against the bounded-period trace event.

    w0 must cover the dependence cone [-n - T*r, n + T*r]^d so the window
    trace to time T is exact (no boundary fabrication).  Yes(m, p) reports
    the minimal accepted period p <= k; a minimal accepted period above k is
    No_k; no accepted period at all is Censored.
    """
    if k < 1:
        raise ValueError("period bound k must be >= 1")
    r, d = ca.radius, ca.dimension
    need = 2 * (n + T * r) + 1
    for ext in w0.dims:
        if ext < need or ext % 2 == 0:
            raise WindowExhausted(
                f"cone sample extents {w0.dims} cannot support n={n}, T={T} (need odd >= {need})"
            )
    centers = tuple(ext // 2 for ext in w0.dims)
    arr = w0.cells
    keys = []
    for t in range(T + 1):
        sl = tuple(
            slice(centers[s] - t * r - n, centers[s] - t * r + n + 1) for s in range(d)
        )
        keys.append(arr[sl].tobytes())
        if t < T:
            arr = cone_step_array(ca.rule, arr)
    hit = _detect_trace_period(keys, T)
    if hit is None:
        return TraceRecord(n, T, CENSORED)
    m, p = hit
    return TraceRecord(n, T, YES if p <= k else NO_K, preperiod=m, period=p)


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval; well behaved at the 0 and 1 boundaries."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class QnEstimate:
    """Monte-Carlo estimate of the measure of the bounded-period trace event.

    point = hits/samples is a lower bound for the untruncated event: censored
    draws (no accepted period within the horizon) are counted separately and
    never guessed either way.
    """

    n: int
    k: int
    horizon: int
    samples: int
    hits: int
    no_k_count: int
    censored_count: int
    point: float
    ci_low: float
    ci_high: float
    note: str = (
        "hits/samples lower-bounds the event at this horizon; censored draws may "
        "hide later periodicity"
    )


def estimate_mu_qn(
    ca: CellularAutomaton, n: int, k: int, T: int, N: int, rng: RandomSource
) -> QnEstimate:
    """Draw N uniform cone samples and classify each; Wilson 95% interval."""
    dims = cone_sample_dims(ca, n, T)
    hits = no_k = censored = 0
    for _ in range(N):
        w0 = sample_uniform_pattern(dims, ca.alphabet, rng)
        rec = qn_membership(ca, w0, n, k, T)
        if rec.status == YES:
            hits += 1
        elif rec.status == NO_K:
            no_k += 1
        else:
            censored += 1
    lo, hi = wilson_interval(hits, N)
    return QnEstimate(
        n=n, k=k, horizon=T, samples=N, hits=hits, no_k_count=no_k,
        censored_count=censored, point=hits / N, ci_low=lo, ci_high=hi,
    )


class TauSampler:
    """Configurations sealed by blocking walls around a free central window.

    Cells of Chebyshev norm in [n, n+r] are tiled deterministically with the
    fully blocking word (one full copy anchored at each face when the word
    fits the r+1 deep shell); everything else is uniform.  Every emitted
    point's [-n, n]^d trace is eventually periodic because the walls pin the
    window's dependence forever.
    """

    def __init__(
        self,
        ca: CellularAutomaton,
        word: Pattern,
        n: int,
        rng: RandomSource,
        pad: int = 8,
        budget: BlockingBudget | None = None,
        certificate: BlockingCertificate | None = None,
    ):
        if ca.dimension > 2:
            raise DimensionUnsupported("wall sampler supports d in {1, 2}")
        if certificate is None:
            verdict = certify_blocking(fully_blocking_query(ca, word), budget)
            if verdict.status != CERTIFIED:
                raise NotFullyBlocking(
                    f"{word!r} not certified fully blocking ({verdict.reason or verdict.status})"
                )
            certificate = verdict.certificate
        self.automaton = ca
        self.word = word
        self.n = int(n)
        self.rng = rng
        self.certificate = certificate
        self.conflicts: list[tuple[tuple[int, ...], int, int]] = []
        r, d = ca.radius, ca.dimension
        h = self.n + r + pad
        self.torus_dims = (2 * h + 1,) * d
        self._forced = self._place_walls()

    def _place_walls(self) -> list[tuple[tuple[int, ...], int]]:
        """(torus index, value) for every annulus cell n <= ||c|| <= n+r.

        Faces are visited in axis order, positive side first; the first face
        owning a cell assigns it (full word copy anchored at the face start),
        later faces only report conflicts.
        """
        ca, w, n = self.automaton, self.word, self.n
        r, d = ca.radius, ca.dimension
        dims = self.torus_dims
        span = n + r
        assigned: dict[tuple[int, ...], int] = {}
        coords = (
            [(c,) for c in range(-span, span + 1)]
            if d == 1
            else [
                (a, b)
                for a in range(-span, span + 1)
                for b in range(-span, span + 1)
            ]
        )
        for c in coords:
            norm = max(abs(v) for v in c)
            if not n <= norm <= span:
                continue
            value = None
            for axis in range(d):
                for sign in (1, -1):
                    if sign == 1 and not n <= c[axis] <= span:
                        continue
                    if sign == -1 and not -span <= c[axis] <= -n:
                        continue
                    idx = []
                    for s in range(d):
                        if s == axis and sign == 1:
                            idx.append((c[s] - n) % w.dims[s])
                        elif s == axis and sign == -1:
                            idx.append((c[s] + n + r) % w.dims[s])
                        else:
                            idx.append(c[s] % w.dims[s])
                    v = int(w.cells[tuple(idx)])
                    if value is None:
                        value = v
                    elif v != value:
                        self.conflicts.append((c, value, v))
            assert value is not None
            assigned[tuple(cc % dims[s] for s, cc in enumerate(c))] = value
        return sorted(assigned.items())

    def sample(self) -> TorusConfig:
        cells = self.rng.integers(0, self.automaton.alphabet.size, size=self.torus_dims, dtype=np.uint8)
        for idx, v in self._forced:
            cells[idx] = v
        return TorusConfig(self.automaton.alphabet, self.torus_dims, cells)

    def forced_cells(self) -> tuple[tuple[tuple[int, ...], int], ...]:
        return tuple(self._forced)


def tau_sampler(
    ca: CellularAutomaton, w: Pattern, n: int, rng: RandomSource, **kwargs
) -> TauSampler:
    return TauSampler(ca, w, n, rng, **kwargs)


def cone_sample_from_torus(ca: CellularAutomaton, x: TorusConfig, n: int, T: int) -> Pattern:
    """Restrict a torus to the dependence cone needed by qn_membership."""
    w = n + T * ca.radius
    lo = (-w,) * x.d
    hi = (w + 1,) * x.d
    return read_window(x, lo, hi)


def mu_equicontinuity_score(
    ca: CellularAutomaton,
    x: TorusConfig,
    m: int,
    n: int,
    T: int,
    N: int,
    rng: RandomSource,
) -> float:
    """Fraction of configurations agreeing with x on [-n, n] whose [-m, m]
    trace matches x's for all t <= T (sampled uniformly elsewhere on the cone)."""
    if ca.dimension != 1:
        raise DimensionUnsupported("measure-equicontinuity scores are defined for d = 1")
    if m > n:
        raise ValueError("need m <= n")
    r = ca.radius
    ref = trace(ca, x, m, T)
    half = m + T * r
    width = 2 * half + 1
    rows = rng.integers(0, ca.alphabet.size, size=(N, width), dtype=np.uint8)
    lo = max(-half, -n)
    hi = min(half, n)
    if lo <= hi:
        rows[:, lo + half : hi + half + 1] = unfold(x, (lo,), (hi + 1,))
    alive = np.ones(N, dtype=bool)
    arr = rows
    for t in range(1, T + 1):
        arr = cone_step_array(ca.rule, arr)
        center = half - t * r
        win = arr[:, center - m : center + m + 1]
        alive &= (win == ref[t].cells).all(axis=1)
        if not alive.any():
            break
    return float(alive.mean())


@dataclass(frozen=True)
class GilmanReport:
    """Heuristic class in the measurable equicontinuity trichotomy.

    A: a certified blocking word proves a topological equicontinuity point.
    C suspected: all probe scores vanish as the agreement window grows.
    B suspected: persistent high scores with no certified blocking word.
    """

    klass: str  # "A", "B", "C", "Unknown"
    certified: bool
    scores: tuple[tuple[float, ...], ...]  # scores[probe][n-grid position]
    n_grid: tuple[int, ...]
    m: int
    horizon: int
    samples: int
    decision_path: tuple[str, ...]


def classify_gilman(
    ca: CellularAutomaton,
    probes: Sequence[TorusConfig] | None = None,
    m: int = 1,
    n_grid: Sequence[int] = (2, 4, 8, 16),
    T: int = 64,
    N: int = 200,
    rng: RandomSource | None = None,
    low: float = 0.05,
    high: float = 0.5,
    kurka_max_len: int = 4,
    budget: BlockingBudget | None = None,
) -> GilmanReport:
    """Score a probe set and combine with the blocking-word search."""
    if ca.dimension != 1:
        raise DimensionUnsupported("this classification is defined for d = 1")
    rng = rng or RandomSource(0)
    n_grid = tuple(int(v) for v in n_grid)
    if probes is None:
        L = 2 * max(n_grid) + 1
        k = ca.alphabet.size
        zeros = TorusConfig(ca.alphabet, (L,), np.zeros(L, dtype=np.uint8))
        ones = TorusConfig(ca.alphabet, (L,), np.full(L, k - 1, dtype=np.uint8))
        rand = TorusConfig(ca.alphabet, (L,), rng.integers(0, k, size=L, dtype=np.uint8))
        probes = [zeros, ones, rand]
    path = []
    kurka = classify_kurka(ca, max_len=kurka_max_len, budget=budget)
    path.append(f"blocking search: {kurka.status}")
    scores = tuple(
        tuple(mu_equicontinuity_score(ca, x, m, n, T, N, rng) for n in n_grid)
        for x in probes
    )
    if kurka.status == ALMOST_EQUICONTINUOUS:
        path.append("certified blocking word -> class A")
        klass, certified = "A", True
    else:
        finals = [s[-1] for s in scores]
        if all(f <= low for f in finals):
            path.append(f"all probe scores <= {low} at n={n_grid[-1]} -> class C suspected")
            klass, certified = "C", False
        elif any(f >= high for f in finals):
            path.append(
                f"high score without a certified blocking word -> class B suspected"
            )
            klass, certified = "B", False
        else:
            path.append("scores inconclusive -> Unknown")
            klass, certified = "Unknown", False
    return GilmanReport(
        klass=klass,
        certified=certified,
        scores=scores,
        n_grid=n_grid,
        m=m,
        horizon=T,
        samples=N,
        decision_path=tuple(path),
    )
