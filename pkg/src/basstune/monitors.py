"""Loudspeaker frequency-response aggregation.

Input is a long-format CSV (``speaker,frequency_hz,gain_db``). Speakers are
resampled on a shared log-frequency grid, reduced to a per-frequency
median with 25th/75th percentiles, and the median is smoothed with a
fractional-octave moving average. Curves are interpolated linearly in
log-frequency and never extrapolated.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DatasetError, RangeError, BandError

POINTS_PER_OCTAVE = 48
DEFAULT_SMOOTHING = 1.0 / 3.0
SYNTHETIC_DATASET = "monitors_synthetic.csv"
REQUIRED_COLUMNS = ("speaker", "frequency_hz", "gain_db")

# relative slack when checking that a query lies inside a curve's band
_BAND_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class SpeakerResponse:
    name: str
    frequencies: np.ndarray
    gains: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        g = np.asarray(self.gains, dtype=float)
        if f.shape != g.shape or f.ndim != 1:
            raise DatasetError(f"speaker {self.name!r}: frequency and gain arrays differ in shape")
        if f.size < 2:
            raise DatasetError(f"speaker {self.name!r}: needs at least 2 points")
        if np.any(np.diff(f) <= 0):
            raise DatasetError(f"speaker {self.name!r}: frequencies must be strictly increasing")
        if np.any(f <= 0) or not np.all(np.isfinite(g)):
            raise DatasetError(f"speaker {self.name!r}: frequencies must be positive and gains finite")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "gains", g)

    @property
    def band(self):
        return float(self.frequencies[0]), float(self.frequencies[-1])

    def at(self, f):
        return _loginterp(self.frequencies, self.gains, f, self.name)


@dataclass(frozen=True, eq=False)
class ResponseCurve:
    """Gain in dB versus frequency, log-frequency linear interpolation.

    ``raw_median``, ``p25`` and ``p75`` are present for aggregate curves.
    """

    frequencies: np.ndarray
    gains: np.ndarray
    p25: np.ndarray | None = None
    p75: np.ndarray | None = None
    raw_median: np.ndarray | None = None
    name: str = "curve"

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        if f.size < 2 or np.any(np.diff(f) <= 0):
            raise DatasetError("response curve needs >= 2 strictly increasing frequencies")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "gains", np.asarray(self.gains, dtype=float))

    @property
    def band(self):
        return float(self.frequencies[0]), float(self.frequencies[-1])

    def at(self, f):
        return _loginterp(self.frequencies, self.gains, f, self.name)

    def shifted(self, offset_db: float) -> "ResponseCurve":
        return ResponseCurve(self.frequencies, self.gains + offset_db, self.p25, self.p75,
                             self.raw_median, self.name)

    def unsmoothed(self) -> "ResponseCurve":
        if self.raw_median is None:
            return self
        return ResponseCurve(self.frequencies, self.raw_median, self.p25, self.p75,
                             self.raw_median, self.name + " (raw median)")

    @classmethod
    def flat(cls, f_lo=10.0, f_hi=20000.0, gain_db=0.0) -> "ResponseCurve":
        return cls(np.array([f_lo, f_hi]), np.array([gain_db, gain_db]), name="flat")


def _loginterp(freqs, gains, f, name):
    f_arr = np.asarray(f, dtype=float)
    lo, hi = freqs[0], freqs[-1]
    bad = ~((f_arr >= lo * (1 - _BAND_EPS)) & (f_arr <= hi * (1 + _BAND_EPS)))
    if np.any(bad):
        raise RangeError(
            f"{name}: {f_arr[bad].flat[0]:g} Hz is outside the curve band [{lo:g}, {hi:g}] Hz")
    out = np.interp(np.log(np.clip(f_arr, lo, hi)), np.log(freqs), gains)
    return float(out) if out.ndim == 0 else out


# -- loading -----------------------------------------------------------------

def load_speaker_dataset(source) -> list[SpeakerResponse]:
    """Parse a ``speaker,frequency_hz,gain_db`` CSV.

    ``source`` is a path or an open text stream. Speakers keep the order of
    their first appearance. Lines starting with ``#`` are comments.
    """
    if hasattr(source, "read"):
        text = source.read()
        label = getattr(source, "name", "<stream>")
    else:
        label = str(source)
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise DatasetError(f"{label}: {exc.strerror or exc}") from exc
    return _parse_dataset(text, label)


def load_bundled_dataset() -> list[SpeakerResponse]:
    """The synthetic 36-speaker set shipped with the package."""
    text = resources.files("basstune.data").joinpath(SYNTHETIC_DATASET).read_text("utf-8")
    return _parse_dataset(text, SYNTHETIC_DATASET)


def _parse_dataset(text, label):
    lines = [(i, line) for i, line in enumerate(io.StringIO(text), start=1)
             if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        raise DatasetError(f"{label}: file is empty")
    header_line, header = lines[0]
    cols = [c.strip() for c in next(csv.reader([header]))]
    missing = [c for c in REQUIRED_COLUMNS if c not in cols]
    if missing:
        raise DatasetError(f"header must contain {','.join(REQUIRED_COLUMNS)}; missing {missing}",
                           header_line)
    i_name, i_f, i_g = (cols.index(c) for c in REQUIRED_COLUMNS)
    data: dict[str, tuple[list, list]] = {}
    for lineno, line in lines[1:]:
        row = next(csv.reader([line]))
        if len(row) != len(cols):
            raise DatasetError(f"expected {len(cols)} fields, got {len(row)}", lineno)
        name = row[i_name].strip()
        if not name:
            raise DatasetError("empty speaker name", lineno)
        try:
            f, g = float(row[i_f]), float(row[i_g])
        except ValueError:
            raise DatasetError(f"non-numeric frequency/gain: {row[i_f]!r}, {row[i_g]!r}", lineno) from None
        if not (f > 0 and math.isfinite(f)) or not math.isfinite(g):
            raise DatasetError(f"frequency must be positive and gain finite ({f}, {g})", lineno)
        fs, gs = data.setdefault(name, ([], []))
        if fs and f <= fs[-1]:
            raise DatasetError(
                f"speaker {name!r}: frequency {f:g} Hz does not increase (previous {fs[-1]:g} Hz)",
                lineno)
        fs.append(f)
        gs.append(g)
    if not data:
        raise DatasetError(f"{label}: no measurement rows")
    return [SpeakerResponse(name, np.array(fs), np.array(gs)) for name, (fs, gs) in data.items()]


# -- aggregation -------------------------------------------------------------

def log_grid(f_lo: float, f_hi: float, points_per_octave: int = POINTS_PER_OCTAVE) -> np.ndarray:
    """Log-spaced grid from ``f_lo`` to ``f_hi`` inclusive, spacing <= 1/ppo octave."""
    n = int(math.ceil(points_per_octave * math.log2(f_hi / f_lo) - 1e-9)) + 1
    return np.geomspace(f_lo, f_hi, max(n, 2))


def fractional_octave_smooth(gains: np.ndarray, octaves: float,
                             points_per_octave: int = POINTS_PER_OCTAVE) -> np.ndarray:
    """Centred moving average spanning ``octaves`` on a uniform log grid.

    The window shrinks symmetrically near the ends, so endpoints are kept
    and linear trends pass unchanged.
    """
    gains = np.asarray(gains, dtype=float)
    half = int(round(octaves * points_per_octave / 2.0))
    if half <= 0:
        return gains.copy()
    n = gains.size
    csum = np.concatenate([[0.0], np.cumsum(gains)])
    i = np.arange(n)
    h = np.minimum(half, np.minimum(i, n - 1 - i))
    return (csum[i + h + 1] - csum[i - h]) / (2 * h + 1)


def common_band(speakers) -> tuple[float, float]:
    lo = max(s.band[0] for s in speakers)
    hi = min(s.band[1] for s in speakers)
    if not lo < hi:
        raise BandError("no common band: speaker frequency ranges do not overlap")
    return lo, hi


def median_response(speakers, smooth_octaves: float = DEFAULT_SMOOTHING,
                    points_per_octave: int = POINTS_PER_OCTAVE) -> ResponseCurve:
    speakers = list(speakers)
    if not speakers:
        raise DatasetError("median_response needs at least one speaker")
    lo, hi = common_band(speakers)
    grid = log_grid(lo, hi, points_per_octave)
    stack = np.vstack([s.at(grid) for s in speakers])
    p25, med, p75 = np.percentile(stack, [25.0, 50.0, 75.0], axis=0)
    smooth = fractional_octave_smooth(med, smooth_octaves, points_per_octave)
    return ResponseCurve(grid, smooth, p25, p75, med, name=f"median of {len(speakers)} speakers")


def response_at(curve, f):
    return curve.at(f)


def speaker_gain_delta(curve, f_from, f_to):
    """Change in speaker gain (dB) when a tone moves from ``f_from`` to ``f_to``."""
    return curve.at(f_to) - curve.at(f_from)
