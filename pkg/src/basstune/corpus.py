"""Long-term band power of a corpus of tracks, aggregated by release year.

Each track's power spectral density is Welch-averaged, integrated over each
band and divided by the band width, so bands of different widths are
comparable as power per Hz. Tracks are brought to a common RMS level first
so that drift in mastering loudness does not masquerade as drift in
spectral balance.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import welch

from .errors import BandError, BasstuneError, DatasetError
from .signalcore import AudioClip, read_wav

log = logging.getLogger(__name__)

YEAR_MIN, YEAR_MAX = 1900, 2100
WELCH_SEGMENT = 8192

# six octave bands from 20 Hz to 1280 Hz, then everything up to Nyquist (None)
DEFAULT_BANDS = ((20.0, 40.0), (40.0, 80.0), (80.0, 160.0), (160.0, 320.0),
                 (320.0, 640.0), (640.0, 1280.0), (1280.0, None))


@dataclass(frozen=True)
class CorpusManifest:
    entries: tuple  # of (Path, int)

    def __post_init__(self):
        entries = tuple((Path(p), int(y)) for p, y in self.entries)
        if not entries:
            raise DatasetError("corpus manifest has no entries")
        seen = set()
        for p, y in entries:
            if not YEAR_MIN <= y <= YEAR_MAX:
                raise DatasetError(f"{p}: release year {y} outside [{YEAR_MIN}, {YEAR_MAX}]")
            if p in seen:
                raise DatasetError(f"duplicate path in manifest: {p}")
            seen.add(p)
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return len(self.entries)

    @classmethod
    def load(cls, source) -> "CorpusManifest":
        """Read ``path,year`` lines. Relative paths resolve against the manifest's folder.

        A ``path,year`` header line and ``#`` comments are allowed.
        """
        if hasattr(source, "read"):
            text, base = source.read(), Path.cwd()
        else:
            try:
                text = Path(source).read_text(encoding="utf-8")
            except OSError as exc:
                raise DatasetError(f"{source}: {exc.strerror or exc}") from exc
            base = Path(source).resolve().parent
        entries = []
        seen = {}
        for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2:
                raise DatasetError(f"expected 'path,year', got {len(row)} fields", lineno)
            path, year = row[0].strip(), row[1].strip()
            if not entries and not seen and path.lower() == "path" and year.lower() == "year":
                continue
            try:
                y = int(year)
            except ValueError:
                raise DatasetError(f"year {year!r} is not an integer", lineno) from None
            if not YEAR_MIN <= y <= YEAR_MAX:
                raise DatasetError(f"year {y} outside [{YEAR_MIN}, {YEAR_MAX}]", lineno)
            p = Path(path)
            if not p.is_absolute():
                p = base / p
            if p in seen:
                raise DatasetError(f"duplicate path {path!r} (first on line {seen[p]})", lineno)
            seen[p] = lineno
            entries.append((p, y))
        return cls(tuple(entries))


@dataclass(frozen=True, eq=False)
class BandMatrix:
    """Per-year mean band power density. ``values[i, j]`` is year i, band j."""

    years: tuple
    bands: tuple
    values: np.ndarray
    normalized: bool
    track_counts: tuple
    skipped: tuple = ()

    def column(self, band_index: int) -> np.ndarray:
        return self.values[:, band_index]

    def rows(self):
        for y, n, v in zip(self.years, self.track_counts, self.values):
            yield y, n, v.tolist()


def resolve_bands(bands, sample_rate):
    """Replace an open (``None``) upper edge by Nyquist and validate."""
    nyq = sample_rate / 2.0
    out = []
    for lo, hi in bands:
        hi = nyq if hi is None else float(hi)
        lo = float(lo)
        if not 0 <= lo < hi:
            raise BandError(f"band [{lo:g}, {hi:g}] Hz is empty or negative")
        if hi > nyq * (1 + 1e-12) or lo >= nyq:
            raise BandError(f"band [{lo:g}, {hi:g}] Hz extends beyond Nyquist ({nyq:g} Hz)")
        out.append((lo, hi))
    return out


def band_energy(clip: AudioClip, bands=DEFAULT_BANDS, segment: int = WELCH_SEGMENT) -> np.ndarray:
    """Mean power spectral density (power per Hz) in each band."""
    bands = resolve_bands(bands, clip.sample_rate)
    x = clip.samples
    nperseg = min(segment, x.size)
    f, psd = welch(x, fs=clip.sample_rate, window="hann", nperseg=nperseg, scaling="density")
    df = f[1] - f[0] if f.size > 1 else clip.sample_rate / 2.0
    # each bin covers [f - df/2, f + df/2] (clipped to [0, Nyquist]) and
    # contributes in proportion to its overlap with the band
    left = np.maximum(f - df / 2, 0.0)
    right = np.minimum(f + df / 2, clip.sample_rate / 2.0)
    density = psd * df / (right - left)
    out = np.empty(len(bands))
    for j, (lo, hi) in enumerate(bands):
        overlap = np.clip(np.minimum(right, hi) - np.maximum(left, lo), 0.0, None)
        out[j] = float(np.dot(density, overlap)) / (hi - lo)
    return out


def welch_total_power(clip: AudioClip, segment: int = WELCH_SEGMENT) -> float:
    f, psd = welch(clip.samples, fs=clip.sample_rate, window="hann",
                   nperseg=min(segment, clip.samples.size), scaling="density")
    return float(psd.sum() * (f[1] - f[0]))


def _analyse(args):
    path, bands, segment = args
    try:
        clip = read_wav(path)
        return band_energy(clip, bands, segment), clip.rms(), None
    except (BasstuneError, OSError) as exc:
        return None, None, str(exc)


def evolution(manifest: CorpusManifest, bands=DEFAULT_BANDS, normalize: bool = False,
              equalize_rms: bool = True, workers: int = 1,
              segment: int = WELCH_SEGMENT) -> BandMatrix:
    """Per-year mean of per-track band power densities.

    With ``equalize_rms`` every track is scaled to the geometric-mean RMS of
    the corpus (a single track keeps its level). With ``normalize`` each
    band's series is divided by its mean across years. Unreadable files
    are logged and listed in ``skipped``.
    """
    jobs = [(p, tuple(bands), segment) for p, _ in manifest.entries]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_analyse, jobs))
    else:
        results = [_analyse(j) for j in jobs]
    ok, skipped = [], []
    for (path, year), (energy, rms, err) in zip(manifest.entries, results):
        if err is not None:
            log.warning("skipping %s: %s", path, err)
            skipped.append((str(path), err))
        else:
            ok.append((year, energy, rms))
    if not ok:
        causes = "; ".join(f"{p}: {e}" for p, e in skipped)
        raise DatasetError(f"no decodable tracks in the corpus ({causes})")
    n_bands = len(ok[0][1])
    if any(len(e) != n_bands for _, e, _ in ok):
        raise BandError("band count differs between tracks")
    if equalize_rms:
        levels = [r for _, _, r in ok if r > 0]
        if levels:
            target = math.exp(math.fsum(math.log(r) for r in levels) / len(levels))
            ok = [(y, e * (target / r) ** 2 if r > 0 else e, r) for y, e, r in ok]
    years = sorted({y for y, _, _ in ok})
    values = np.zeros((len(years), n_bands))
    counts = []
    for i, y in enumerate(years):
        rows = [e for yy, e, _ in ok if yy == y]
        # fsum makes the result independent of manifest order
        values[i] = [math.fsum(col) / len(rows) for col in zip(*rows)]
        counts.append(len(rows))
    if normalize:
        means = values.mean(axis=0)
        values = np.divide(values, means, out=np.zeros_like(values), where=means > 0)
    shown = tuple((float(lo), None if hi is None else float(hi)) for lo, hi in bands)
    return BandMatrix(tuple(years), shown, values, normalize, tuple(counts), tuple(skipped))
