"""Certification and refutation of blocking words.

A word w is blocking for window V at offset p when every configuration that
reads w at the origin forces the same V-contents at all times.  That
quantifies over all configurations and all times, so only one-sided finite
certificates exist:

* certify_blocking iterates a sound over-approximation: the set of footprint
  contents reachable when the boundary within radius r is re-chosen freely at
  every step.  If the window projection stays a singleton until the set
  sequence closes a cycle, the word is truly blocking (Certified); a
  non-singleton projection proves nothing (Unknown).
* refute_blocking enumerates pairs of extensions of w inside the dependence
  cone of the window and reports the first time two extensions disagree
  (Refuted, with a replayable witness); exhaustion yields Unknown.

Certified and Refuted are therefore mutually exclusive by construction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionUnsupported, NotCertified
from .lattice import Alphabet, Coord, Pattern, RandomSource
from .rules import CellularAutomaton, cone_step_array, torus_step_array

CERTIFIED = "Certified"
REFUTED = "Refuted"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class BlockingBudget:
    """Desk-scale caps; every exhaustion surfaces as an Unknown verdict."""

    state_cap: int = 1 << 16        # max |T_t| in the certification iteration
    certify_horizon: int = 256      # max steps waiting for the set cycle to close
    frame_cap: int = 1 << 16        # max boundary frames enumerated per step
    refute_horizon: int = 16        # default time horizon of the refutation search
    refute_rows_cap: int = 1 << 16  # max cone extensions enumerated
    search_candidates_cap: int = 1 << 16  # max words per size in searches
    batch_cells_cap: int = 1 << 22  # memory guard for the batched set step


@dataclass(frozen=True)
class BlockingQuery:
    """Word w, window extents (r_1..r_d), window offset (p_1..p_d).

    Admissibility: 0 <= p_s <= k_s - r_s on every axis, so the window box
    [p, p + r) sits inside the word footprint [0, k).
    """

    automaton: CellularAutomaton
    word: Pattern
    offset: Coord
    window: Coord

    def __post_init__(self):
        ca, w = self.automaton, self.word
        if w.d != ca.dimension:
            raise ValueError("word dimension does not match the rule")
        if w.alphabet != ca.alphabet:
            raise ValueError("word alphabet does not match the rule")
        off = tuple(int(v) for v in self.offset)
        win = tuple(int(v) for v in self.window)
        if len(off) != w.d or len(win) != w.d:
            raise ValueError("offset/window arity does not match dimension")
        for s in range(w.d):
            if win[s] < 1:
                raise ValueError("window extents must be positive")
            if not 0 <= off[s] <= w.dims[s] - win[s]:
                raise ValueError(
                    f"inadmissible offset {off[s]} on axis {s}: need 0 <= p <= {w.dims[s] - win[s]}"
                )
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "window", win)


def fully_blocking_query(ca: CellularAutomaton, w: Pattern) -> BlockingQuery:
    """Offset zero, window extents = radius box: the fully blocking reading."""
    d = ca.dimension
    return BlockingQuery(ca, w, (0,) * d, (ca.radius,) * d)


@dataclass(frozen=True)
class BlockingCertificate:
    """Sequence of forced window contents until the set iteration cycles.

    window_patterns[t] is the (unique) window content at time t for
    0 <= t < set_preperiod + set_period; the infinite sequence continues with
    period set_period.  (preperiod, period) is the minimal eventual
    description of that window sequence.  forced_footprints[t] is the full
    footprint content whenever the reachable set at time t is a singleton.
    """

    window_patterns: tuple[Pattern, ...]
    set_preperiod: int
    set_period: int
    preperiod: int
    period: int
    forced_footprints: tuple[Pattern | None, ...]

    def window_at(self, t: int) -> Pattern:
        s, q = self.set_preperiod, self.set_period
        return self.window_patterns[t if t < s + q else s + (t - s) % q]


@dataclass(frozen=True)
class RefutationWitness:
    """Two finite extensions of the word that force different window contents.

    Both patterns live on the same box with its low corner at lattice
    position `position`; replaying either through apply_cone for `time` steps
    and reading the query window reproduces window_a / window_b.
    """

    pattern_a: Pattern
    pattern_b: Pattern
    position: Coord
    time: int
    window_a: Pattern
    window_b: Pattern


@dataclass(frozen=True)
class BlockingVerdict:
    status: str
    query: BlockingQuery
    horizon: int
    order: tuple[int, int] | None = None
    certificate: BlockingCertificate | None = None
    witness: RefutationWitness | None = None
    reason: str = ""


def _divisors(n: int) -> list[int]:
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


def _minimal_eventual_period(keys: list, s: int, q: int) -> tuple[int, int]:
    """Minimal (m, p) of the infinite sequence keys[0..s+q-1] + q-periodic tail."""

    def at(t):
        return keys[t] if t < s + q else keys[s + (t - s) % q]

    period = q
    for cand in _divisors(q):
        if all(at(t) == at(t + cand) for t in range(s, s + q)):
            period = cand
            break
    m = s
    while m > 0 and at(m - 1) == at(m - 1 + period):
        m -= 1
    return m, period


def _frame_assignments(k: int, margin: int) -> np.ndarray:
    """All k**margin boundary assignments as uint8 rows."""
    count = k ** margin
    place = k ** (margin - 1 - np.arange(margin))
    return ((np.arange(count)[:, None] // place) % k).astype(np.uint8)


def certify_blocking(q: BlockingQuery, budget: BlockingBudget | None = None) -> BlockingVerdict:
    """Sound over-approximation; Certified verdicts are proofs, Unknown is not a refutation."""
    budget = budget or BlockingBudget()
    ca = q.automaton
    if ca.dimension > 2:
        raise DimensionUnsupported("blocking certification supports d in {1, 2}")
    rule = ca.rule
    r, k = ca.radius, ca.alphabet.size
    kdims = q.word.dims
    edims = tuple(kk + 2 * r for kk in kdims)
    inner = tuple(slice(r, r + kk) for kk in kdims)
    margin_mask = np.ones(edims, dtype=bool)
    margin_mask[inner] = False
    margin_idx = np.argwhere(margin_mask)
    n_margin = len(margin_idx)
    if n_margin and k ** n_margin > budget.frame_cap:
        return BlockingVerdict(UNKNOWN, q, 0, reason="boundary frame budget exceeded")
    frames = _frame_assignments(k, n_margin) if n_margin else np.zeros((1, 0), dtype=np.uint8)
    n_frames = len(frames)
    frame_arr = np.zeros((n_frames,) + edims, dtype=np.uint8)
    if n_margin:
        frame_arr[(slice(None), *margin_idx.T)] = frames

    window_sl = tuple(slice(p, p + wn) for p, wn in zip(q.offset, q.window))
    elements = q.word.cells[None, ...].copy()
    seen: dict[bytes, int] = {}
    window_keys: list[bytes] = []
    window_cells: list[np.ndarray] = []
    footprints: list[np.ndarray | None] = []
    t = 0
    while True:
        elements = np.unique(elements.reshape(len(elements), -1), axis=0).reshape(-1, *kdims)
        wins = elements[(slice(None),) + window_sl].reshape(len(elements), -1)
        if not (wins == wins[0]).all():
            return BlockingVerdict(
                UNKNOWN, q, t,
                reason="window projection not a singleton; the over-approximation cannot refute",
            )
        window_keys.append(wins[0].tobytes())
        window_cells.append(elements[0][window_sl].copy())
        footprints.append(elements[0].copy() if len(elements) == 1 else None)
        key = elements.tobytes()
        if key in seen:
            s = seen[key]
            cycle = t - s
            m, p = _minimal_eventual_period(window_keys[: s + cycle], s, cycle)
            cert = BlockingCertificate(
                window_patterns=tuple(
                    Pattern(ca.alphabet, q.window, c) for c in window_cells[: s + cycle]
                ),
                set_preperiod=s,
                set_period=cycle,
                preperiod=m,
                period=p,
                forced_footprints=tuple(
                    None if fp is None else Pattern(ca.alphabet, kdims, fp)
                    for fp in footprints[: s + cycle]
                ),
            )
            return BlockingVerdict(CERTIFIED, q, t, order=(m, p), certificate=cert)
        seen[key] = t
        if t >= budget.certify_horizon:
            return BlockingVerdict(UNKNOWN, q, t, reason="certification horizon reached")
        if len(elements) > budget.state_cap:
            return BlockingVerdict(UNKNOWN, q, t, reason="state cap exceeded")
        # one nondeterministic step: every element under every boundary frame
        chunk = max(1, budget.batch_cells_cap // max(1, n_frames * math.prod(edims)))
        pieces = []
        for start in range(0, len(elements), chunk):
            part = elements[start : start + chunk]
            big = np.repeat(frame_arr[None, ...], len(part), axis=0)
            big[(slice(None), slice(None)) + inner] = part[:, None, ...]
            pieces.append(cone_step_array(rule, big.reshape(-1, *edims)))
        elements = np.concatenate(pieces, axis=0)
        t += 1


def refute_blocking(
    q: BlockingQuery,
    horizon: int | None = None,
    budget: BlockingBudget | None = None,
) -> BlockingVerdict:
    """Exhaustive search for two extensions of w with different window traces."""
    budget = budget or BlockingBudget()
    if q.automaton.dimension > 2:
        raise DimensionUnsupported("blocking refutation supports d in {1, 2}")
    T = budget.refute_horizon if horizon is None else int(horizon)
    ca = q.automaton
    rule = ca.rule
    r, k, d = ca.radius, ca.alphabet.size, ca.dimension
    kdims = q.word.dims

    def box(t):
        lo = tuple(q.offset[s] - t * r for s in range(d))
        hi = tuple(q.offset[s] + q.window[s] + t * r for s in range(d))
        return lo, hi

    def free_cells(t):
        lo, hi = box(t)
        total = math.prod(hi[s] - lo[s] for s in range(d))
        overlap = math.prod(
            max(0, min(hi[s], kdims[s]) - max(lo[s], 0)) for s in range(d)
        )
        return total - overlap

    t_eff = 0
    for t in range(1, T + 1):
        if k ** free_cells(t) > budget.refute_rows_cap:
            break
        t_eff = t
    if t_eff == 0:
        return BlockingVerdict(UNKNOWN, q, 0, reason="refutation row budget too small")

    b_lo, b_hi = box(t_eff)
    v_lo = tuple(min(0, b_lo[s]) for s in range(d))
    v_hi = tuple(max(kdims[s], b_hi[s]) for s in range(d))
    vshape = tuple(v_hi[s] - v_lo[s] for s in range(d))
    base = np.zeros(vshape, dtype=np.uint8)
    word_sl = tuple(slice(-v_lo[s], -v_lo[s] + kdims[s]) for s in range(d))
    base[word_sl] = q.word.cells

    in_word = np.zeros(vshape, dtype=bool)
    in_word[word_sl] = True
    in_cone = np.zeros(vshape, dtype=bool)
    cone_sl = tuple(slice(b_lo[s] - v_lo[s], b_hi[s] - v_lo[s]) for s in range(d))
    in_cone[cone_sl] = True
    free_idx = np.argwhere(in_cone & ~in_word)
    n_free = len(free_idx)
    rows = np.repeat(base[None, ...], k ** n_free, axis=0)
    if n_free:
        rows[(slice(None), *free_idx.T)] = _frame_assignments(k, n_free)

    arr = rows
    for t in range(1, t_eff + 1):
        arr = cone_step_array(rule, arr)
        cur_lo = tuple(v_lo[s] + t * r for s in range(d))
        wsl = tuple(
            slice(q.offset[s] - cur_lo[s], q.offset[s] - cur_lo[s] + q.window[s])
            for s in range(d)
        )
        wins = arr[(slice(None),) + wsl].reshape(len(arr), -1)
        differs = (wins != wins[0]).any(axis=1)
        if differs.any():
            j = int(np.argmax(differs))
            witness = RefutationWitness(
                pattern_a=Pattern(ca.alphabet, vshape, rows[0]),
                pattern_b=Pattern(ca.alphabet, vshape, rows[j]),
                position=v_lo,
                time=t,
                window_a=Pattern(ca.alphabet, q.window, wins[0].reshape(q.window)),
                window_b=Pattern(ca.alphabet, q.window, wins[j].reshape(q.window)),
            )
            return BlockingVerdict(REFUTED, q, t, witness=witness)
    reason = "no disagreement within explored horizon"
    if t_eff < T:
        reason += f" (row budget truncated the horizon to {t_eff})"
    return BlockingVerdict(UNKNOWN, q, t_eff, reason=reason)


def fully_blocking_order(
    ca: CellularAutomaton, w: Pattern, budget: BlockingBudget | None = None
) -> tuple[int, int]:
    """(preperiod, exact period) of the forced window sequence of a fully blocking word."""
    verdict = certify_blocking(fully_blocking_query(ca, w), budget)
    if verdict.status != CERTIFIED:
        raise NotCertified(
            f"word {w!r} not certified fully blocking ({verdict.reason or verdict.status})"
        )
    assert verdict.order is not None
    return verdict.order


@dataclass(frozen=True)
class BlockingSearchReport:
    certified: tuple[BlockingVerdict, ...]
    examined: int
    refuted_count: int
    unknown_count: int
    max_len: int
    offsets_mode: str
    skipped_sizes: tuple[tuple[int, ...], ...] = ()

    @property
    def certified_words(self) -> tuple[Pattern, ...]:
        return tuple(v.query.word for v in self.certified)


def _iter_sizes(d: int, r: int, max_len: int):
    lo = max(1, r)
    if d == 1:
        for L in range(lo, max_len + 1):
            yield (L,)
    else:
        sizes = [
            (a, b) for a in range(lo, max_len + 1) for b in range(lo, max_len + 1)
        ]
        sizes.sort(key=lambda ab: (ab[0] * ab[1], ab))
        yield from sizes


def _iter_patterns(alphabet: Alphabet, dims: tuple[int, ...]):
    k = alphabet.size
    n = math.prod(dims)
    for digits in itertools.product(range(k), repeat=n):
        yield Pattern(alphabet, dims, np.array(digits, dtype=np.uint8))


def search_blocking_words(
    ca: CellularAutomaton,
    max_len: int,
    offsets: str = "all",
    budget: BlockingBudget | None = None,
) -> BlockingSearchReport:
    """Enumerate candidate words by increasing size, certify-then-refute each.

    offsets="fully" restricts to offset zero (fully blocking candidates);
    offsets="all" tries every admissible offset before giving up on a word.
    """
    if offsets not in ("all", "fully"):
        raise ValueError("offsets must be 'all' or 'fully'")
    budget = budget or BlockingBudget()
    if ca.dimension > 2:
        raise DimensionUnsupported("blocking search supports d in {1, 2}")
    r, k, d = ca.radius, ca.alphabet.size, ca.dimension
    certified: list[BlockingVerdict] = []
    refuted = unknown = examined = 0
    skipped: list[tuple[int, ...]] = []
    for dims in _iter_sizes(d, r, max_len):
        if k ** math.prod(dims) > budget.search_candidates_cap:
            skipped.append(dims)
            continue
        if any(dims[s] < r for s in range(d)):
            continue
        for word in _iter_patterns(ca.alphabet, dims):
            examined += 1
            if offsets == "fully":
                offset_list = [(0,) * d]
            else:
                offset_list = list(
                    itertools.product(*(range(dims[s] - r + 1) for s in range(d)))
                )
            found = None
            for off in offset_list:
                verdict = certify_blocking(
                    BlockingQuery(ca, word, off, (r,) * d), budget
                )
                if verdict.status == CERTIFIED:
                    found = verdict
                    break
            if found is not None:
                certified.append(found)
                continue
            statuses = [
                refute_blocking(BlockingQuery(ca, word, off, (r,) * d), budget=budget).status
                for off in offset_list
            ]
            if all(s == REFUTED for s in statuses):
                refuted += 1
            else:
                unknown += 1
    return BlockingSearchReport(
        certified=tuple(certified),
        examined=examined,
        refuted_count=refuted,
        unknown_count=unknown,
        max_len=max_len,
        offsets_mode=offsets,
        skipped_sizes=tuple(skipped),
    )


ALMOST_EQUICONTINUOUS = "AlmostEquicontinuousCertified"
SENSITIVE_SUSPECTED = "SensitiveSuspected"


@dataclass(frozen=True)
class KurkaReport:
    status: str
    search: BlockingSearchReport


def classify_kurka(
    ca: CellularAutomaton, max_len: int = 4, budget: BlockingBudget | None = None
) -> KurkaReport:
    """Heuristic equicontinuity class from the blocking-word search.

    d=1: any certified blocking word proves almost equicontinuity; d=2 needs a
    certified fully blocking word of per-axis size >= radius.  An exhausted
    all-refuted search only *suspects* sensitivity (it is not a proof).
    """
    mode = "all" if ca.dimension == 1 else "fully"
    report = search_blocking_words(ca, max_len, offsets=mode, budget=budget)
    if report.certified:
        status = ALMOST_EQUICONTINUOUS
    elif report.unknown_count == 0 and not report.skipped_sizes and report.examined > 0:
        status = SENSITIVE_SUSPECTED
    else:
        status = UNKNOWN
    return KurkaReport(status=status, search=report)


def stress_test_certified(
    verdict: BlockingVerdict, trials: int, steps: int, rng: RandomSource
) -> int:
    """Randomized soundness check of a Certified verdict.

    Evolves `trials` independent pairs of random tori through the word's
    cylinder and counts pairs whose window contents ever disagree (must be 0
    for a sound certificate).
    """
    q = verdict.query
    ca = q.automaton
    d, r = ca.dimension, ca.radius
    dims = tuple(
        max(q.word.dims[s], q.offset[s] + q.window[s]) + 2 * r + 8 for s in range(d)
    )
    arr = rng.integers(0, ca.alphabet.size, size=(2 * trials, *dims), dtype=np.uint8)
    word_sl = (slice(None),) + tuple(slice(0, q.word.dims[s]) for s in range(d))
    arr[word_sl] = q.word.cells
    win_sl = (slice(None),) + tuple(
        slice(q.offset[s], q.offset[s] + q.window[s]) for s in range(d)
    )
    bad = np.zeros(trials, dtype=bool)
    for _ in range(steps):
        arr = torus_step_array(ca.rule, arr)
        wins = arr[win_sl].reshape(2 * trials, -1)
        bad |= (wins[:trials] != wins[trials:]).any(axis=1)
    return int(bad.sum())
