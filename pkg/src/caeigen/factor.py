"""Explicit rotation factors built from fully blocking words.

When a fully blocking word forces an eventually periodic window sequence of
period p >= 2, the cylinders of the p recurring window contents are permuted
cyclically by the automaton, so reading off "which class am I in" semi-
conjugates the restricted dynamics onto the rotation x -> x+1 on Z/pZ.  The
construction is per seed configuration and verified empirically by sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blocking import (
    CERTIFIED,
    BlockingBudget,
    _minimal_eventual_period,
    certify_blocking,
    fully_blocking_query,
)
from .errors import (
    ClassCollision,
    HypothesisFailed,
    NotFullyBlocking,
    TrivialPeriod,
)
from .lattice import Pattern, RandomSource, TorusConfig
from .rules import CellularAutomaton, automaton, parse_rule, torus_step_array
from .traces import TauSampler, detect_eventual_period, trace


@dataclass(frozen=True)
class RotationSystem:
    """The finite rotation (Z/pZ, x -> x+1 mod p)."""

    period: int

    def __post_init__(self):
        if self.period < 1:
            raise ValueError("rotation period must be >= 1")

    def step(self, k: int) -> int:
        return (k + 1) % self.period


@dataclass(frozen=True)
class FactorMap:
    """Assignment of window patterns to rotation classes.

    classes[j] lists the window patterns of class j; the projection sends a
    configuration whose [-n, n]^d content equals a pattern of class j to j,
    and is undefined (domain miss) elsewhere.  The map is seed-specific: the
    seed configuration and blocking word are carried for provenance and so
    verification can rebuild the wall sampler.
    """

    period: int
    preperiod: int
    window_n: int
    classes: tuple[tuple[Pattern, ...], ...]
    word: Pattern
    rule_obj: dict
    seed_config: TorusConfig
    hypothesis_checked_up_to: int
    pad: int = 8

    def class_of(self, window_pattern: Pattern) -> int | None:
        key = window_pattern.key()
        for j, pats in enumerate(self.classes):
            if any(p.key() == key for p in pats):
                return j
        return None

    def to_json_obj(self) -> dict:
        return {
            "period": self.period,
            "preperiod": self.preperiod,
            "window_n": self.window_n,
            "classes": [[p.to_json_obj() for p in pats] for pats in self.classes],
            "word": self.word.to_json_obj(),
            "rule": self.rule_obj,
            "seed_config": self.seed_config.to_json_obj(),
            "hypothesis_checked_up_to": self.hypothesis_checked_up_to,
            "pad": self.pad,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FactorMap":
        return cls(
            period=int(obj["period"]),
            preperiod=int(obj["preperiod"]),
            window_n=int(obj["window_n"]),
            classes=tuple(
                tuple(Pattern.from_json_obj(p) for p in pats) for pats in obj["classes"]
            ),
            word=Pattern.from_json_obj(obj["word"]),
            rule_obj=dict(obj["rule"]),
            seed_config=TorusConfig.from_json_obj(obj["seed_config"]),
            hypothesis_checked_up_to=int(obj["hypothesis_checked_up_to"]),
            pad=int(obj.get("pad", 8)),
        )


def check_iterated_images(
    ca: CellularAutomaton,
    certificate,
    upto: int,
    budget: BlockingBudget | None = None,
    skip_keys: set[bytes] | None = None,
) -> None:
    """Re-certify every iterated image of a fully blocking word as fully
    blocking itself.

    The certificate's window sequence is eventually periodic, so images up to
    the cycle determine all later ones.  Uses the forced footprint content
    when the reachable set is a singleton, else the forced window content.
    Raises HypothesisFailed on the first image that does not certify.
    """
    tested = set(skip_keys or ())
    for i in range(1, upto + 1):
        image = certificate.forced_footprints[i]
        if image is None:
            image = certificate.window_patterns[i]
        if image.key() in tested:
            continue
        tested.add(image.key())
        v = certify_blocking(fully_blocking_query(ca, image), budget)
        if v.status != CERTIFIED:
            raise HypothesisFailed(
                f"iterated image at step {i} ({image!r}) not certifiable fully blocking"
            )


def build_periodic_factor(
    ca: CellularAutomaton,
    w: Pattern,
    seed_config: TorusConfig | None = None,
    n: int = 1,
    rng: RandomSource | None = None,
    budget: BlockingBudget | None = None,
    orbit_cap: int = 200_000,
    pad: int = 8,
) -> FactorMap:
    """Build the rotation factor from a fully blocking word of order >= 2.

    Raises NotFullyBlocking if certification fails, TrivialPeriod when the
    forced window (or the seed's trace) has period 1, HypothesisFailed when
    some iterated image of the word cannot be re-certified fully blocking
    (checked up to the certificate cycle, which determines all later images),
    and ClassCollision if two classes share a window pattern (widen n).
    """
    rng = rng or RandomSource(0)
    verdict = certify_blocking(fully_blocking_query(ca, w), budget)
    if verdict.status != CERTIFIED:
        raise NotFullyBlocking(
            f"{w!r} not certified fully blocking ({verdict.reason or verdict.status})"
        )
    cert = verdict.certificate
    assert cert is not None and verdict.order is not None
    m0, p0 = verdict.order
    if p0 == 1:
        raise TrivialPeriod(f"forced window sequence of {w!r} has period 1")

    checked_up_to = m0 + p0 - 1
    check_iterated_images(ca, cert, checked_up_to, budget, skip_keys={w.key()})

    sampler = TauSampler(ca, w, n, rng, pad=pad, budget=budget, certificate=cert)
    if seed_config is None:
        seed_config = sampler.sample()
    mo, po = detect_eventual_period(ca, seed_config, max_steps=orbit_cap)
    windows = trace(ca, seed_config, n, mo + po - 1 if mo + po > 1 else 1)
    keys = [p.key() for p in windows]
    mw, pw = _minimal_eventual_period(keys, mo, po)
    if pw == 1:
        raise TrivialPeriod("seed trace settles to a fixed window; no nontrivial factor")
    class_patterns = [windows[mw + j] for j in range(pw)]
    if len({p.key() for p in class_patterns}) != pw:
        raise ClassCollision(
            "two classes share a window pattern; widen the window parameter n"
        )
    return FactorMap(
        period=pw,
        preperiod=mw,
        window_n=n,
        classes=tuple((p,) for p in class_patterns),
        word=w,
        rule_obj=ca.rule.to_json_obj(),
        seed_config=seed_config,
        hypothesis_checked_up_to=checked_up_to,
        pad=pad,
    )


@dataclass(frozen=True)
class SemiconjugacyReport:
    samples: int
    horizon: int
    rotation_period: int
    violation_count: int
    violations: tuple[tuple[int, int], ...]  # (sample index, time), capped
    domain_misses: int

    @property
    def verified(self) -> bool:
        return self.violation_count == 0


def verify_semiconjugacy(
    fm: FactorMap,
    ca: CellularAutomaton | None = None,
    samples: int = 1000,
    horizon: int = 100,
    rng: RandomSource | None = None,
    rotation: RotationSystem | None = None,
    max_recorded: int = 100,
) -> SemiconjugacyReport:
    """Sample the factor domain, iterate, and check the projection advances by
    one rotation step whenever two consecutive iterates both project."""
    rng = rng or RandomSource(0)
    if ca is None:
        ca = automaton(parse_rule(fm.rule_obj))
    rotation = rotation or RotationSystem(fm.period)
    d = ca.dimension
    k = ca.alphabet.size
    sampler = TauSampler(ca, fm.word, fm.window_n, rng, pad=fm.pad)
    dims = sampler.torus_dims

    arr = rng.integers(0, k, size=(samples, *dims), dtype=np.uint8)
    for idx, v in sampler.forced_cells():
        arr[(slice(None), *idx)] = v
    # seed every sample inside a factor class (round robin over classes)
    n = fm.window_n
    win_idx = np.ix_(*[np.arange(-n, n + 1) % dims[s] for s in range(d)])
    flat_classes = [pats[0] for pats in fm.classes]
    for i in range(samples):
        arr[(i, *win_idx)] = flat_classes[i % len(flat_classes)].cells

    place = k ** np.arange((2 * n + 1) ** d, dtype=np.int64)
    class_keys = []
    key_to_class: dict[int, int] = {}
    for j, pats in enumerate(fm.classes):
        for p in pats:
            key = int(p.cells.astype(np.int64).ravel() @ place)
            class_keys.append(key)
            key_to_class[key] = j

    def project(batch: np.ndarray) -> np.ndarray:
        sub = batch[(slice(None),) + win_idx].reshape(len(batch), -1)
        keys = sub.astype(np.int64) @ place
        out = np.full(len(batch), -1, dtype=np.int64)
        for key, j in key_to_class.items():
            out[keys == key] = j
        return out

    cur = project(arr)
    domain_misses = int((cur < 0).sum())
    violation_count = 0
    recorded: list[tuple[int, int]] = []
    for t in range(1, horizon + 1):
        arr = torus_step_array(ca.rule, arr)
        nxt = project(arr)
        domain_misses += int((nxt < 0).sum())
        both = (cur >= 0) & (nxt >= 0)
        expected = (cur + 1) % rotation.period
        bad = both & (nxt != expected)
        violation_count += int(bad.sum())
        if bad.any() and len(recorded) < max_recorded:
            for i in np.flatnonzero(bad)[: max_recorded - len(recorded)]:
                recorded.append((int(i), t))
        cur = nxt
    return SemiconjugacyReport(
        samples=samples,
        horizon=horizon,
        rotation_period=rotation.period,
        violation_count=violation_count,
        violations=tuple(recorded),
        domain_misses=domain_misses,
    )
