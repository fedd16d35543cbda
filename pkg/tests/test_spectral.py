from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from caeigen import (
    Alphabet,
    RandomSource,
    TorusConfig,
    character_observable,
    default_observable,
    frequency_grid,
    identity_power_search,
    indicator_observable,
    parse_pattern,
    parse_torus,
    rational_eigenvalue_check,
    scan_spectrum,
    weyl_sum,
)
from conftest import eca, random_eca

A2 = Alphabet(2)


# --------------------------------- weyl sums ---------------------------------

def test_constant_observable_at_zero_frequency():
    g = character_observable([0], (0,))  # constant 1
    x = parse_torus("0110", A2)
    assert weyl_sum(eca(90), g, x, 0.0, 64) == pytest.approx(1.0)


def test_identity_rule_decay_away_from_zero():
    g = default_observable(eca(204))
    x = parse_torus("1000", A2)
    N = 1000
    for alpha in (0.25, 1 / 3, 0.617):
        bound = 2 / (N * abs(1 - np.exp(-2j * math.pi * alpha)))
        assert abs(weyl_sum(eca(204), g, x, alpha, N)) <= bound + 1e-12


def test_complement_rule_half_frequency():
    g = default_observable(eca(51))
    x = parse_torus("1000", A2)  # origin cell starts at 1
    val = weyl_sum(eca(51), g, x, 0.5, 1000)
    assert abs(val) == pytest.approx(0.5)


def test_weyl_sum_bounded_by_one(rng):
    for _ in range(10):
        ca = random_eca(rng)
        x = TorusConfig(A2, (12,), rng.integers(0, 2, size=12, dtype=np.uint8))
        alpha = float(rng.generator.random())
        assert abs(weyl_sum(ca, default_observable(ca), x, alpha, 50)) <= 1.0 + 1e-12


def test_conjugate_symmetry_on_grid(rng):
    ca = eca(90)
    x = TorusConfig(A2, (16,), rng.integers(0, 2, size=16, dtype=np.uint8))
    g = default_observable(ca)
    for j, p in ((1, 5), (2, 7), (3, 8)):
        a = abs(weyl_sum(ca, g, x, j / p, 256))
        b = abs(weyl_sum(ca, g, x, (p - j) / p, 256))
        assert a == pytest.approx(b, abs=1e-10)


# ------------------------------- spectrum scans -------------------------------

def test_grid_contains_all_reduced_fractions():
    grid = frequency_grid(6)
    fracs = {pt.fraction for pt in grid if pt.is_rational}
    expected = {Fraction(j, p) for p in range(1, 7) for j in range(p)}
    assert fracs == expected
    labels = [pt.label for pt in grid if not pt.is_rational]
    assert labels == ["golden-1", "sqrt2-1"]


def test_spectrum_complement_peaks(rng):
    ws = scan_spectrum(eca(51), p_max=8, samples=20, N=4096, rng=rng)
    assert set(ws.peak_labels) == {"0/1", "1/2"}
    for _, mag in ws.peaks:
        assert mag > 0.4
    for pt, mag in zip(ws.points, ws.magnitudes):
        if pt.label not in ("0/1", "1/2"):
            assert mag < 0.05, pt.label


def test_spectrum_identity_peaks(rng):
    ws = scan_spectrum(eca(204), p_max=8, samples=20, N=4096, rng=rng)
    assert set(ws.peak_labels) == {"0/1"}


def test_spectrum_shift_no_irrational_peak(rng):
    ws = scan_spectrum(eca(170), p_max=8, samples=20, N=4096, rng=rng)
    assert set(ws.peak_labels) == {"0/1"}
    assert ws.magnitude_at("golden-1") < 0.05
    assert ws.magnitude_at("sqrt2-1") < 0.05


def test_spectrum_magnitudes_at_most_one(rng):
    ws = scan_spectrum(eca(30), p_max=5, samples=5, N=512, rng=rng)
    assert all(0.0 <= m <= 1.0 + 1e-12 for m in ws.magnitudes)


# --------------------------- identity power search ---------------------------

def test_identity_power_examples():
    assert identity_power_search(eca(204), p_max=8).power == 1
    assert identity_power_search(eca(51), p_max=8).power == 2
    assert identity_power_search(eca(90), p_max=64).power is None


def test_identity_power_peaks_divide(rng):
    # spectrum peaks of a rule with F^p = Id sit on fractions j/p
    for code in (204, 51):
        res = identity_power_search(eca(code), p_max=8)
        ws = scan_spectrum(eca(code), p_max=8, samples=10, N=2048, rng=rng)
        for pt, _ in ws.peaks:
            assert pt.is_rational and res.power % pt.fraction.denominator == 0


# ------------------------------ rational report ------------------------------

def test_rational_eigenvalue_reports(rng):
    rep51 = rational_eigenvalue_check(eca(51), p_max=8, rng=rng, N=2048, spectrum_samples=10)
    assert rep51.rational_detected == (Fraction(0, 1), Fraction(1, 2))
    assert set(rep51.orbit_periods) == {2}
    rep204 = rational_eigenvalue_check(eca(204), p_max=8, rng=rng, N=2048, spectrum_samples=10)
    assert rep204.rational_detected == (Fraction(0, 1),)
    rep90 = rational_eigenvalue_check(eca(90), p_max=8, rng=rng, N=2048, spectrum_samples=10)
    assert rep90.rational_detected == (Fraction(0, 1),)
    assert all(mag < 0.05 for _, mag in rep90.irrational_probes)
    assert "rational" in rep90.verdict
