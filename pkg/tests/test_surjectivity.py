from __future__ import annotations

import numpy as np
import pytest

from caeigen import (
    DimensionUnsupported,
    RandomSource,
    automaton,
    balance_check,
    decide_surjective,
    decide_surjective_1d,
    torus_step_array,
)
from caeigen.surjectivity import BALANCED_NECESSARY_ONLY, NOT_SURJECTIVE, SURJECTIVE
from conftest import eca
from oracles import preimage_count, preimage_counts_all


def test_identity_is_surjective():
    assert decide_surjective_1d(eca(204)).status == SURJECTIVE


def test_xor_rule_is_surjective_and_counted():
    ca = eca(90)
    assert decide_surjective_1d(ca).status == SURJECTIVE
    # cross-check: every word up to length 8 has exactly |A|**(2r) = 4 preimages
    for L in range(1, 9):
        counts = preimage_counts_all(ca.rule, L)
        assert (counts == 4).all()


def test_rule_110_orphan_witness_replays():
    verdict = decide_surjective_1d(eca(110))
    assert verdict.status == NOT_SURJECTIVE
    assert verdict.witness is not None
    assert preimage_count(eca(110).rule, verdict.witness.cells.tolist()) == 0


def test_balance_examples():
    assert balance_check(eca(90)).status == BALANCED_NECESSARY_ONLY
    assert balance_check(eca(90)).symbol_counts == (4, 4)
    v110 = balance_check(eca(110))
    assert v110.status == NOT_SURJECTIVE and v110.symbol_counts == (3, 5)
    life = balance_check(automaton("life:B3/S23"))
    assert life.status == NOT_SURJECTIVE and life.symbol_counts == (372, 140)


def test_2d_never_claims_surjective():
    # balanced 2D rule: the shift in the plane (projection to one neighbor)
    spec = {
        "alphabet": 2,
        "dimension": 2,
        "neighborhood": [[0, 1]],
        "table": [0, 1],
    }
    v = decide_surjective(automaton(spec))
    assert v.status == BALANCED_NECESSARY_ONLY
    with pytest.raises(DimensionUnsupported):
        decide_surjective_1d(automaton(spec))


def test_agreement_with_preimage_counting_sampled():
    # spot-check a spread of rules; the full 256-rule sweep runs in acceptance
    for code in (0, 15, 30, 51, 90, 105, 110, 150, 170, 184, 204, 232, 240, 255):
        ca = eca(code)
        verdict = decide_surjective_1d(ca)
        if verdict.status == SURJECTIVE:
            for L in range(1, 7):
                assert (preimage_counts_all(ca.rule, L) == 4).all(), code
        else:
            w = verdict.witness
            assert preimage_counts_all(ca.rule, w.size)[int("".join(map(str, w.cells)), 2)] == 0


def test_every_surjective_rule_is_balanced():
    for code in range(256):
        if decide_surjective_1d(eca(code)).status == SURJECTIVE:
            assert balance_check(eca(code)).status == BALANCED_NECESSARY_ONLY, code


def test_uniform_measure_preserved_at_desk_scale():
    # for surjective rules the image of a uniform ensemble stays uniform:
    # length-3 cylinder frequencies at position 0 on an L=16 torus.
    # 30 rules x 8 bins are tested at once, so the per-bin bound is
    # Bonferroni-sized (4.5 sigma) with a chi-square check per rule.
    from scipy import stats

    rng = RandomSource(3141)
    surjective = [c for c in range(256) if decide_surjective_1d(eca(c)).status == SURJECTIVE]
    assert len(surjective) == 30
    N = 100_000
    sigma = np.sqrt((1 / 8) * (7 / 8) / N)
    for code in surjective:
        ensemble = rng.integers(0, 2, size=(N, 16), dtype=np.uint8)
        image = torus_step_array(eca(code).rule, ensemble)
        words = image[:, 0] * 4 + image[:, 1] * 2 + image[:, 2]
        counts = np.bincount(words, minlength=8)
        assert np.abs(counts / N - 1 / 8).max() < 4.5 * sigma, code
        assert stats.chisquare(counts).pvalue > 1e-6, code
