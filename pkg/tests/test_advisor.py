import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from basstune import perception
from basstune.advisor import (CombinedCurve, combined_response, realize_pitch_class, recommend_key,
                              stability_report, sub_bass_region, transposition_loss)
from basstune.errors import BandError, DomainError
from basstune.monitors import ResponseCurve, speaker_gain_delta
from basstune.signalcore import Note, SpectralProfile, parse_note
from basstune.voicemodel import reference_driven_profile

F_G = 49.48
F_D = 37.06


def rising(lo=20.0, hi=2000.0, slope=6.0):
    """Speaker curve rising ``slope`` dB/octave, strictly increasing everywhere."""
    f = np.geomspace(lo, hi, 50)
    return ResponseCurve(f, slope * np.log2(f / lo))


def test_combined_is_speaker_plus_ear(bundled_curve, combined60):
    f = np.geomspace(25, 1000, 40)
    expected = bundled_curve.at(f) - (perception.elc_spl(f, 60) - perception.elc_spl(1000.0, 60))
    np.testing.assert_allclose(combined60.gain(f), expected, atol=1e-12)


def test_flat_speaker_gives_ear_deltas():
    c = combined_response(ResponseCurve.flat(), 60)
    for a, b in [(F_G, F_D), (100, 40), (250, 1000)]:
        assert c.delta(a, b) == pytest.approx(perception.ear_gain_delta(a, b, 60), abs=1e-12)


def test_combined_fundamental_delta(combined60, bundled_curve):
    d = combined60.delta(F_G, F_D)
    assert d == pytest.approx(-11.8, abs=0.4)
    parts = speaker_gain_delta(bundled_curve, F_G, F_D) + perception.ear_gain_delta(F_G, F_D, 60)
    assert d == pytest.approx(parts, abs=1e-6)


def test_fifth_harmonic_almost_unchanged(combined60):
    assert abs(combined60.delta(5 * F_G, 5 * F_D)) < 1.0


def test_speaker_only_curve(bundled_curve):
    c = CombinedCurve(bundled_curve, None)
    assert c.delta(F_G, F_D) == pytest.approx(speaker_gain_delta(bundled_curve, F_G, F_D))


def test_band_mismatch():
    with pytest.raises(BandError):
        combined_response(ResponseCurve(np.array([13000.0, 15000.0]), np.zeros(2)), 60)
    c = combined_response(ResponseCurve.flat(30, 2000), 60)
    with pytest.raises(BandError):
        c.gain(25.0)


# -- transposition_loss ------------------------------------------------------------

def test_zero_shift(combined60):
    rep = transposition_loss(reference_driven_profile(), 0, combined60)
    assert rep.total_power_delta_db == 0.0
    assert all(p.delta_db == 0.0 for p in rep.per_partial)


def test_single_partial(combined60):
    rep = transposition_loss(SpectralProfile.sine(F_G), -5, combined60)
    assert rep.total_power_delta_db == pytest.approx(-11.8, abs=0.4)
    assert rep.total_power_delta_db == pytest.approx(rep.fundamental_delta_db, abs=1e-12)


def test_driven_profile_loss(combined60):
    rep = transposition_loss(reference_driven_profile(), -5, combined60)
    assert rep.total_power_delta_db == pytest.approx(-4.5, abs=0.3)
    assert abs(rep.total_power_delta_db) < abs(rep.fundamental_delta_db)
    assert abs(rep.per_partial[4].delta_db) < 1.0
    deltas = [p.delta_db for p in rep.per_partial]
    assert min(deltas) <= rep.total_power_delta_db <= max(deltas)
    assert [p.region for p in rep.per_partial[:2]] == ["thump", "punch"]


def test_weighted_sum_by_hand(combined60):
    # power-weighted mean in the linear domain, evaluated without the module
    prof = reference_driven_profile()
    f = prof.frequencies
    g0 = combined60.gain(f)
    g1 = combined60.gain(f * 2 ** (-5 / 12))
    w = prof.amplitudes ** 2
    oracle = 10 * math.log10(math.fsum(w * 10 ** (g1 / 10)) / math.fsum(w * 10 ** (g0 / 10)))
    rep = transposition_loss(prof, -5, combined60)
    assert rep.total_power_delta_db == pytest.approx(oracle, abs=1e-12)


amps = st.lists(st.floats(0.01, 1.0), min_size=1, max_size=5)


@settings(max_examples=40)
@given(amps, st.floats(1e-3, 1e3), st.floats(-7, 7))
def test_scale_invariance(a, k, s):
    c = combined_response(rising(), 60)
    p = SpectralProfile.harmonic(45.0, a)
    q = SpectralProfile.harmonic(45.0, [k * x for x in a])
    assert transposition_loss(p, s, c).total_power_delta_db == pytest.approx(
        transposition_loss(q, s, c).total_power_delta_db, abs=1e-9)


@settings(max_examples=40)
@given(amps, st.floats(-7, 7))
def test_round_trip(a, s):
    c = combined_response(rising(), 60)
    p = SpectralProfile.harmonic(45.0, a)
    there = transposition_loss(p, s, c).total_power_delta_db
    back = transposition_loss(p.transposed(s), -s, c).total_power_delta_db
    assert there + back == pytest.approx(0.0, abs=1e-6)


@settings(max_examples=40)
@given(st.floats(30, 80), st.floats(0.05, 1.0), st.lists(st.floats(0.01, 1), min_size=1, max_size=2))
def test_downward_shift_loses_level_on_rising_curve(f0, frac, a):
    # profile confined to [30, 80] Hz before and after the shift
    f0 = min(f0, 80 / len(a))
    room = 12 * math.log2(f0 / 30)
    assume(room > 0.1)
    c = CombinedCurve(rising(), None)
    s = -frac * room
    assert transposition_loss(SpectralProfile.harmonic(f0, a), s, c).total_power_delta_db < 0


def test_partial_leaving_band_is_named(combined60):
    with pytest.raises(BandError, match="h1"):
        transposition_loss(SpectralProfile.sine(F_G), -24, combined60)


# -- stability ---------------------------------------------------------------------

def test_stability_spread(combined60):
    rep = stability_report([parse_note("G1"), parse_note("D1")], SpectralProfile.sine(F_G), combined60)
    # G1 is 49.0 Hz, a few cents below the sample; the spread is still the 11.8 dB drop
    assert rep.spread_db == pytest.approx(11.8, abs=0.4)


def test_stability_identical_notes(combined60):
    rep = stability_report([Note(31)] * 4, reference_driven_profile(), combined60)
    assert rep.spread_db == pytest.approx(0.0, abs=1e-12)


def test_stability_middle_note_never_widens(combined60):
    prof = reference_driven_profile()
    ends = [Note(26), Note(38)]
    base = stability_report(ends, prof, combined60)
    lo, hi = min(base.gains_db), max(base.gains_db)
    checked = 0
    for m in range(20, 45):
        rep = stability_report(ends + [Note(m)], prof, combined60)
        if lo <= rep.gains_db[-1] <= hi:
            assert rep.spread_db == pytest.approx(base.spread_db, abs=1e-12)
            checked += 1
        else:
            assert rep.spread_db > base.spread_db
    assert checked >= 3


def test_stability_empty(combined60):
    with pytest.raises(DomainError):
        stability_report([], SpectralProfile.sine(F_G), combined60)


# -- recommend_key -------------------------------------------------------------------

def test_d_minor_prefers_register_near_sample(combined60):
    ranked = recommend_key(parse_note("D"), F_G, combined60)
    assert len(ranked) == 13
    by_s = {c.song_transposition: c for c in ranked}
    assert by_s[0].note.name == "D1"
    nearest = min(ranked, key=lambda c: abs(math.log(c.frequency / F_G)))
    assert ranked.index(nearest) < ranked.index(by_s[0])
    # exhaustive check: ordering is by total gain
    gains = [c.total_gain_db for c in ranked]
    assert gains == sorted(gains, reverse=True)


def test_flat_curve_ties_break_on_abs_shift():
    c = CombinedCurve(ResponseCurve.flat(), None)
    ranked = recommend_key(parse_note("D"), F_G, c)
    assert [x.song_transposition for x in ranked] == [0, -1, 1, -2, 2, -3, 3, -4, 4, -5, 5, -6, 6]


def test_single_candidate(combined60):
    ranked = recommend_key(parse_note("D"), F_G, combined60, (0, 0))
    assert len(ranked) == 1 and ranked[0].song_transposition == 0


def test_empty_candidate_range(combined60):
    with pytest.raises(DomainError):
        recommend_key(parse_note("D"), F_G, combined60, (1, 0))


@given(st.floats(-40, 40))
def test_ranking_ignores_constant_offset(bundled_curve, offset):
    a = recommend_key(parse_note("A"), F_G, combined_response(bundled_curve, 60))
    b = recommend_key(parse_note("A"), F_G, combined_response(bundled_curve.shifted(offset), 60))
    assert [c.song_transposition for c in a] == [c.song_transposition for c in b]


def test_infeasible_candidates_are_listed():
    c = CombinedCurve(ResponseCurve(np.array([40.0, 2000.0]), np.zeros(2)), None)
    ranked = recommend_key(parse_note("D"), 44.0, c)
    bad = [x for x in ranked if not x.feasible]
    assert bad and all(x.total_gain_db is None and x.reason for x in bad)
    assert ranked[-len(bad):] == bad


def test_realize_pitch_class_nearest_octave():
    assert realize_pitch_class(2, F_G).name == "D1"
    assert realize_pitch_class(7, F_G).name == "G1"
    assert realize_pitch_class(9, F_G).name == "A1"


@pytest.mark.parametrize("f, label", [(30, "boom"), (49.48, "thump"), (80, "punch"), (150, None)])
def test_sub_bass_labels(f, label):
    assert sub_bass_region(f) == label
