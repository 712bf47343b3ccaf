import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from basstune import perception
from basstune.errors import RangeError
from basstune.perception import contour, ear_gain_delta, elc_spl, load_tables

# ISO 226:2003 Table 1, typed in independently of the bundled data file
ISO_F = [20, 25, 31.5, 40, 50, 63, 80, 100, 125, 160, 200, 250, 315, 400, 500, 630, 800,
         1000, 1250, 1600, 2000, 2500, 3150, 4000, 5000, 6300, 8000, 10000, 12500]
ISO_AF = [0.532, 0.506, 0.480, 0.455, 0.432, 0.409, 0.387, 0.367, 0.349, 0.330, 0.315, 0.301,
          0.288, 0.276, 0.267, 0.259, 0.253, 0.250, 0.246, 0.244, 0.243, 0.243, 0.243, 0.242,
          0.242, 0.245, 0.254, 0.271, 0.301]
ISO_LU = [-31.6, -27.2, -23.0, -19.1, -15.9, -13.0, -10.3, -8.1, -6.2, -4.5, -3.1, -2.0, -1.1,
          -0.4, 0.0, 0.3, 0.5, 0.0, -2.7, -4.1, -1.0, 1.7, 2.5, 1.2, -2.1, -7.1, -11.2, -10.7, -3.1]
ISO_TF = [78.5, 68.7, 59.5, 51.1, 44.0, 37.5, 31.5, 26.5, 22.1, 17.9, 14.4, 11.4, 8.6, 6.2, 4.4,
          3.0, 2.2, 2.4, 3.5, 1.7, -1.3, -4.2, -6.0, -5.4, -1.5, 6.0, 12.6, 13.9, 12.3]


def iso_oracle(f, phon):
    """Scalar ISO 226:2003 evaluation with log-f parameter interpolation."""
    if f in ISO_F:
        i = ISO_F.index(f)
        af, lu, tf = ISO_AF[i], ISO_LU[i], ISO_TF[i]
    else:
        j = next(k for k in range(1, len(ISO_F)) if ISO_F[k] > f)
        w = math.log(f / ISO_F[j - 1]) / math.log(ISO_F[j] / ISO_F[j - 1])
        af, lu, tf = ((1 - w) * col[j - 1] + w * col[j] for col in (ISO_AF, ISO_LU, ISO_TF))
    a = 4.47e-3 * (10 ** (0.025 * phon) - 1.15) + (0.4 * 10 ** ((tf + lu) / 10 - 9)) ** af
    return 10 / af * math.log10(a) - lu + 94


def test_bundled_table_matches_standard():
    t = load_tables()
    np.testing.assert_allclose(t.frequencies, ISO_F, atol=5e-4)
    np.testing.assert_allclose(t.alpha_f, ISO_AF, atol=5e-4)
    np.testing.assert_allclose(t.l_u, ISO_LU, atol=5e-4)
    np.testing.assert_allclose(t.t_f, ISO_TF, atol=5e-4)


@pytest.mark.parametrize("phon", [20, 40, 60, 80])
def test_anchor_at_1khz(phon):
    assert elc_spl(1000.0, phon) == pytest.approx(phon, abs=0.05)


@pytest.mark.parametrize("phon", [20, 30, 40, 50, 60, 70, 80])
def test_contour_matches_oracle_on_table_grid(phon):
    f, spl = contour(phon)
    expected = [iso_oracle(x, phon) for x in ISO_F]
    np.testing.assert_allclose(spl, expected, atol=1e-3)


def test_published_40_phon_values():
    # values printed in the standard's 40-phon contour
    assert elc_spl(20.0, 40) == pytest.approx(99.85, abs=0.05)
    assert elc_spl(100.0, 40) == pytest.approx(64.37, abs=0.05)


@given(st.floats(20, 12500), st.floats(20, 80))
def test_between_grid_points(f, phon):
    assert elc_spl(f, phon) == pytest.approx(iso_oracle(f, phon), abs=1e-6)


@given(st.floats(20, 12500))
def test_monotone_in_loudness(f):
    assert elc_spl(f, 80) > elc_spl(f, 20)


def test_ear_delta_example():
    assert ear_gain_delta(49.48, 37.06, 60) == pytest.approx(-5.5, abs=0.3)
    assert ear_gain_delta(37.06, 49.48, 60) == pytest.approx(5.5, abs=0.3)
    assert ear_gain_delta(100.0, 100.0, 35) == 0.0


@given(st.floats(20, 12500), st.floats(20, 12500), st.floats(20, 12500), st.floats(20, 80))
def test_delta_algebra(a, b, c, p):
    assert ear_gain_delta(a, b, p) == -ear_gain_delta(b, a, p)
    assert ear_gain_delta(a, c, p) == pytest.approx(ear_gain_delta(a, b, p) + ear_gain_delta(b, c, p),
                                                    abs=1e-9)


@pytest.mark.parametrize("phon", [20, 60, 80])
def test_strictly_decreasing_below_100hz(phon):
    f = np.unique([x for x in ISO_F if x <= 100] + list(np.geomspace(20, 100, 200)))
    assert np.all(np.diff(elc_spl(f, phon)) < 0)


@pytest.mark.parametrize("f, phon, match", [
    (19.9, 60, r"\[20, 12500\] Hz"), (12600, 60, r"\[20, 12500\] Hz"),
    (1000, 19.9, r"\[20, 80\] phon"), (1000, 999, r"\[20, 80\] phon"),
])
def test_range_errors(f, phon, match):
    with pytest.raises(RangeError, match=match):
        elc_spl(f, phon)


def test_array_input_and_default_phon():
    f = np.array([50.0, 100.0])
    np.testing.assert_allclose(elc_spl(f, 60), [iso_oracle(50, 60), iso_oracle(100, 60)], atol=1e-9)
    assert perception.relative_sensitivity(1000.0) == 0.0
