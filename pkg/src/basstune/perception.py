"""ISO 226:2003 equal-loudness contours.

Between the 29 tabulated frequencies the three parameters (alpha_f, L_U,
T_f) are interpolated linearly in log-frequency and the standard's
formula is applied to the interpolated values. No extrapolation: the
model is defined on 20 Hz - 12.5 kHz and 20 - 80 phon only.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import RangeError, BasstuneError

F_MIN, F_MAX = 20.0, 12500.0
PHON_MIN, PHON_MAX = 20.0, 80.0
DEFAULT_PHON = 60.0

TABLE_FILE = "iso226_2003.csv"


@dataclass(frozen=True, eq=False)
class LoudnessModelTables:
    frequencies: np.ndarray
    alpha_f: np.ndarray
    l_u: np.ndarray
    t_f: np.ndarray
    version: str = "1"

    def __post_init__(self):
        if not (len(self.frequencies) == len(self.alpha_f) == len(self.l_u) == len(self.t_f) == 29):
            raise BasstuneError("ISO 226 table must have exactly 29 rows")
        if np.any(np.diff(self.frequencies) <= 0):
            raise BasstuneError("ISO 226 table frequencies must be strictly increasing")

    def parameters(self, f):
        """Interpolated ``(alpha_f, L_U, T_f)`` at frequency ``f``."""
        lf = np.log(f)
        grid = np.log(self.frequencies)
        return (np.interp(lf, grid, self.alpha_f),
                np.interp(lf, grid, self.l_u),
                np.interp(lf, grid, self.t_f))


@lru_cache(maxsize=1)
def load_tables() -> LoudnessModelTables:
    pkg = resources.files("basstune.data")
    raw = pkg.joinpath(TABLE_FILE).read_bytes()
    expected = pkg.joinpath(TABLE_FILE + ".sha256").read_text("utf-8").split()[0]
    if hashlib.sha256(raw).hexdigest() != expected:
        raise BasstuneError(f"{TABLE_FILE}: checksum mismatch, bundled table is corrupt")
    text = raw.decode("utf-8")
    version = "1"
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            if "version:" in line:
                version = line.split("version:", 1)[1].strip()
            continue
        if line.strip():
            rows.append(line)
    cols = {k: [] for k in ("frequency_hz", "alpha_f", "l_u_db", "t_f_db")}
    for row in csv.DictReader(rows):
        for k in cols:
            cols[k].append(float(row[k]))
    return LoudnessModelTables(
        np.array(cols["frequency_hz"]), np.array(cols["alpha_f"]),
        np.array(cols["l_u_db"]), np.array(cols["t_f_db"]), version)


def check_phon(loudness) -> float:
    loudness = float(loudness)
    if not PHON_MIN <= loudness <= PHON_MAX:
        raise RangeError(
            f"loudness {loudness:g} phon is outside the valid interval [{PHON_MIN:g}, {PHON_MAX:g}] phon")
    return loudness


def _check_frequency(f):
    f = np.asarray(f, dtype=float)
    bad = ~((f >= F_MIN) & (f <= F_MAX))
    if np.any(bad):
        raise RangeError(
            f"frequency {f[bad].flat[0]:g} Hz is outside the valid interval [{F_MIN:g}, {F_MAX:g}] Hz")
    return f


def elc_spl(f, loudness):
    """Sound pressure level (dB SPL) of a pure tone at ``loudness`` phon."""
    loudness = check_phon(loudness)
    f = _check_frequency(f)
    af, lu, tf = load_tables().parameters(f)
    a = 4.47e-3 * (10.0 ** (0.025 * loudness) - 1.15) + (0.4 * 10.0 ** ((tf + lu) / 10.0 - 9.0)) ** af
    spl = (10.0 / af) * np.log10(a) - lu + 94.0
    return float(spl) if spl.ndim == 0 else spl


def ear_gain_delta(f_from, f_to, loudness=DEFAULT_PHON):
    """Gain (dB) the ear applies when a tone moves from ``f_from`` to ``f_to``.

    Negative when the destination needs more SPL for the same loudness.
    """
    return elc_spl(f_from, loudness) - elc_spl(f_to, loudness)


def relative_sensitivity(f, loudness=DEFAULT_PHON):
    """Ear gain relative to 1 kHz: ``-(elc_spl(f) - elc_spl(1000))``."""
    return elc_spl(1000.0, loudness) - elc_spl(f, loudness)


def contour(loudness, frequencies=None):
    """``(frequencies, spl)`` for one contour; defaults to the 29 table frequencies."""
    if frequencies is None:
        frequencies = load_tables().frequencies
    frequencies = np.asarray(frequencies, dtype=float)
    return frequencies, np.atleast_1d(elc_spl(frequencies, loudness))
