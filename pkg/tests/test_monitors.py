import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from basstune.errors import BandError, DatasetError, RangeError
from basstune.monitors import (ResponseCurve, SpeakerResponse, fractional_octave_smooth,
                               load_speaker_dataset, log_grid, median_response, response_at,
                               speaker_gain_delta)


def flat(name, gain, lo=20.0, hi=20000.0):
    return SpeakerResponse(name, np.array([lo, hi]), np.array([gain, gain]))


def sloped(name, slope_per_oct, lo=20.0, hi=2000.0, n=30):
    f = np.geomspace(lo, hi, n)
    return SpeakerResponse(name, f, slope_per_oct * np.log2(f / lo))


def test_bundled_dataset_has_36_speakers(speakers):
    assert len(speakers) == 36
    assert len({s.name for s in speakers}) == 36


def test_bundled_speaker_delta(bundled_curve):
    assert speaker_gain_delta(bundled_curve, 49.48, 37.06) == pytest.approx(-6.3, abs=0.1)
    # the unsmoothed median is exposed and stays close
    raw = bundled_curve.unsmoothed()
    assert speaker_gain_delta(raw, 49.48, 37.06) == pytest.approx(-6.3, abs=0.3)


def test_load_from_stream_and_comments(tmp_path):
    text = ("# comment\nspeaker,frequency_hz,gain_db\n"
            "a,20,0\na,100,1\nb,20,2\nb,100,3\n")
    sp = load_speaker_dataset(io.StringIO(text))
    assert [s.name for s in sp] == ["a", "b"]
    p = tmp_path / "d.csv"
    p.write_text(text)
    assert [s.name for s in load_speaker_dataset(p)] == ["a", "b"]


@pytest.mark.parametrize("text, match, line", [
    ("", "empty", None),
    ("# only\n", "empty", None),
    ("name,f,g\na,1,2\n", "header", 1),
    ("speaker,frequency_hz,gain_db\na,20,x\n", "non-numeric", 2),
    ("speaker,frequency_hz,gain_db\na,20,0\na,100\n", "fields", 3),
    ("speaker,frequency_hz,gain_db\na,20,0\na,100,0\na,50,0\n", "does not increase", 4),
    ("speaker,frequency_hz,gain_db\na,-20,0\n", "positive", 2),
    ("speaker,frequency_hz,gain_db\n", "no measurement", None),
])
def test_malformed_datasets(text, match, line):
    with pytest.raises(DatasetError, match=match) as exc:
        load_speaker_dataset(io.StringIO(text))
    assert exc.value.line == line


def test_missing_file(tmp_path):
    with pytest.raises(DatasetError):
        load_speaker_dataset(tmp_path / "nope.csv")


def test_single_speaker_median_is_the_speaker():
    s = sloped("only", 6.0)
    curve = median_response([s], smooth_octaves=0)
    np.testing.assert_allclose(curve.gains, s.at(curve.frequencies), atol=1e-12)


def test_three_flat_curves():
    curve = median_response([flat("a", 0), flat("b", 2), flat("c", -2)])
    np.testing.assert_allclose(curve.gains, 0.0, atol=1e-12)
    np.testing.assert_allclose(curve.p25, -1.0)
    np.testing.assert_allclose(curve.p75, 1.0)


def test_identical_speakers_smooth_input():
    f = np.geomspace(20, 2000, 60)
    g = 3 * np.sin(np.log2(f / 20) / 2)
    sp = [SpeakerResponse(str(i), f, g) for i in range(5)]
    curve = median_response(sp)
    assert np.max(np.abs(curve.gains - sp[0].at(curve.frequencies))) < 0.1


def test_response_at_grid_and_midpoint():
    c = ResponseCurve(np.array([40.0, 160.0]), np.array([0.0, 6.0]))
    assert response_at(c, 40.0) == 0.0
    assert response_at(c, 160.0) == 6.0
    assert response_at(c, 80.0) == pytest.approx(3.0)


def test_out_of_band_query():
    c = ResponseCurve(np.array([10.0, 100.0]), np.array([0.0, 1.0]))
    with pytest.raises(RangeError, match="5 Hz"):
        response_at(c, 5.0)


def test_deltas_trivial_cases(bundled_curve):
    assert speaker_gain_delta(bundled_curve, 60.0, 60.0) == 0.0
    assert speaker_gain_delta(ResponseCurve.flat(), 37.0, 400.0) == 0.0


@given(st.floats(30, 1000), st.floats(30, 1000), st.floats(30, 1000))
def test_speaker_delta_algebra(a, b, c):
    curve = ResponseCurve(np.geomspace(20, 2000, 40), np.sin(np.arange(40)))
    assert speaker_gain_delta(curve, a, b) == -speaker_gain_delta(curve, b, a)
    assert speaker_gain_delta(curve, a, c) == pytest.approx(
        speaker_gain_delta(curve, a, b) + speaker_gain_delta(curve, b, c), abs=1e-9)


def test_no_common_band():
    with pytest.raises(BandError, match="no common band"):
        median_response([flat("a", 0, 20, 100), flat("b", 0, 200, 1000)])


def test_no_speakers():
    with pytest.raises(DatasetError):
        median_response([])


@settings(max_examples=20, deadline=None)
@given(st.randoms(use_true_random=False))
def test_permutation_and_duplication_invariance(rnd):
    sp = [sloped(str(i), s) for i, s in enumerate([-3, 1, 4, 0.5, 2, 6])]
    base = median_response(sp)
    shuffled = sp[:]
    rnd.shuffle(shuffled)
    np.testing.assert_array_equal(median_response(shuffled).gains, base.gains)
    np.testing.assert_allclose(median_response(sp + sp).gains, base.gains, atol=1e-12)


def test_percentiles_bracket_median(bundled_curve):
    assert np.all(bundled_curve.p25 <= bundled_curve.raw_median)
    assert np.all(bundled_curve.raw_median <= bundled_curve.p75)


@given(st.lists(st.floats(-20, 20), min_size=2, max_size=200), st.floats(0, 2))
def test_smoothing_keeps_endpoints(gains, octaves):
    g = np.array(gains)
    s = fractional_octave_smooth(g, octaves)
    assert s[0] == pytest.approx(g[0], abs=1e-9)
    assert s[-1] == pytest.approx(g[-1], abs=1e-9)


def test_bundled_smoothing_endpoints(bundled_curve):
    assert abs(bundled_curve.gains[0] - bundled_curve.raw_median[0]) < 0.5
    assert abs(bundled_curve.gains[-1] - bundled_curve.raw_median[-1]) < 0.5


def test_smoothing_passes_linear_trend():
    g = np.linspace(-10, 10, 300)
    np.testing.assert_allclose(fractional_octave_smooth(g, 1 / 3), g, atol=1e-9)


def test_log_grid_spacing():
    grid = log_grid(20, 20000)
    assert grid[0] == 20 and grid[-1] == pytest.approx(20000)
    assert np.max(np.diff(np.log2(grid))) <= 1 / 48 + 1e-12
