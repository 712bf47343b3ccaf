"""Fundamental-frequency and partial analysis of bass-drum samples.

Two f0 estimators are provided:

* :func:`estimate_f0_track` picks the strongest in-band spectral peak on
  fixed windows (0.2 s by default) and records its energy. This is what
  the energy-weighted f0 histogram is built from.
* :func:`instantaneous_f0_track` follows the phase of the waveform through
  its zero crossings. It resolves the fast initial glide that a 0.2 s
  window averages away, and is what :func:`sweep_range` should be fed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import get_window

from .errors import DomainError, NoFundamentalError, InsufficientSignalError
from .signalcore import AudioClip, Spectrogram, SpectralProfile, interpolate_peak

log = logging.getLogger(__name__)

DEFAULT_BAND = (25.0, 120.0)
DEFAULT_WINDOW_S = 0.2
GATE_DB = -60.0
HIST_BIN_HZ = 0.25
SECONDARY_FRACTION = 0.1
FUNDAMENTAL_STOP = 0.7
HARMONIC_STOP = 0.5
DYNAMIC_RANGE_DB = 80.0
QUARTERTONE = 2.0 ** (1.0 / 24.0)


@dataclass(frozen=True, eq=False)
class F0Track:
    times: np.ndarray
    f0: np.ndarray
    energy: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        f = np.asarray(self.f0, dtype=float)
        e = np.asarray(self.energy, dtype=float)
        if not (t.shape == f.shape == e.shape) or t.ndim != 1:
            raise DomainError("F0Track arrays must be 1-D and equally long")
        if np.any(np.diff(t) <= 0):
            raise DomainError("F0Track times must be strictly increasing")
        if np.any(f <= 0) or np.any(e < 0):
            raise DomainError("F0Track needs f0 > 0 and energy >= 0")
        for name, v in (("times", t), ("f0", f), ("energy", e)):
            object.__setattr__(self, name, v)

    def __len__(self):
        return self.times.size

    def points(self):
        return list(zip(self.times.tolist(), self.f0.tolist(), self.energy.tolist()))


@dataclass(frozen=True, eq=False)
class PartialTrack:
    harmonic_index: int
    times: np.ndarray
    frequencies: np.ndarray
    magnitudes: np.ndarray
    stop_time: float

    def __len__(self):
        return self.times.size

    @property
    def empty(self) -> bool:
        return self.times.size == 0


@dataclass(frozen=True, eq=False)
class WeightedHistogram:
    bin_edges: np.ndarray
    masses: np.ndarray
    mode_frequency: float
    secondary_modes: tuple

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def mode_bin(self) -> int:
        return int(np.argmax(self.masses))


# -- windowed spectra --------------------------------------------------------

def _next_pow2(n):
    return 1 << int(math.ceil(math.log2(max(n, 1))))


def _frame_spectra(clip: AudioClip, window: float, hop: float | None):
    """Full (unpadded) Hann frames, 4x zero-padded FFT, amplitude-normalised."""
    sr = clip.sample_rate
    n = int(round(window * sr))
    if n < 4:
        raise DomainError(f"analysis window {window} s is too short")
    if clip.samples.size < n:
        raise InsufficientSignalError(
            f"insufficient signal: clip is {clip.duration:.3f} s, shorter than one {window} s window")
    step = max(1, int(round((hop if hop is not None else window / 4.0) * sr)))
    starts = np.arange(0, clip.samples.size - n + 1, step)
    w = get_window("hann", n, fftbins=False)
    nfft = _next_pow2(4 * n)
    idx = starts[:, None] + np.arange(n)[None, :]
    mags = np.abs(np.fft.rfft(clip.samples[idx] * w, nfft, axis=1)) * (2.0 / w.sum())
    times = (starts + n / 2.0) / sr
    return times, mags, sr / nfft


def _band_bins(band, bin_width, n_bins):
    lo = max(int(math.ceil(band[0] / bin_width)), 1)
    hi = min(int(math.floor(band[1] / bin_width)), n_bins - 2)
    if hi - lo < 2:
        raise DomainError(f"search band {band} is too narrow for the analysis resolution")
    return lo, hi


def estimate_f0_track(clip: AudioClip, window: float = DEFAULT_WINDOW_S,
                      search_band=DEFAULT_BAND, hop: float | None = None,
                      gate_db: float = GATE_DB) -> F0Track:
    """Per-window f0 from the interpolated in-band magnitude peak.

    A window is unvoiced (omitted) when its in-band energy is more than
    ``-gate_db`` below the loudest window's, when the in-band maximum sits on
    a band edge, or when it is more than ``-gate_db`` below the frame's
    full-band peak. Times are window centres.
    """
    times, mags, bw = _frame_spectra(clip, window, hop)
    lo, hi = _band_bins(search_band, bw, mags.shape[1])
    power = mags ** 2
    band_energy = power[:, lo:hi + 1].sum(axis=1)
    ref = band_energy.max()
    if ref <= 0:
        raise NoFundamentalError("no fundamental detected: the clip is silent in the search band")
    gate = 10.0 ** (gate_db / 10.0)
    t_out, f_out, e_out = [], [], []
    for k in range(mags.shape[0]):
        if band_energy[k] < ref * gate:
            continue
        seg = mags[k, lo:hi + 1]
        j = int(np.argmax(seg))
        if j == 0 or j == seg.size - 1:
            continue
        if power[k, lo + j] < power[k].max() * gate:
            continue
        pos, peak = interpolate_peak(mags[k], lo + j)
        t_out.append(times[k])
        f_out.append(pos * bw)
        e_out.append(peak ** 2)
    if not t_out:
        raise NoFundamentalError(
            f"no fundamental detected in {search_band[0]:g}-{search_band[1]:g} Hz")
    return F0Track(np.array(t_out), np.array(f_out), np.array(e_out))


def steady_f0(track: F0Track) -> float:
    """Median f0 of the final 25% of the track."""
    if len(track) == 0:
        raise DomainError("empty track")
    n = max(1, int(math.ceil(len(track) / 4)))
    return float(np.median(track.f0[-n:]))


def sweep_range(track: F0Track) -> float:
    """``12*log2(max early f0 / steady f0)`` in semitones.

    Early points are the first 25% of the track; steady f0 is the median of
    the last 25%.
    """
    if len(track) < 2:
        raise DomainError("sweep_range needs a track with at least 2 points")
    n = max(1, int(math.ceil(len(track) / 4)))
    return 12.0 * math.log2(float(np.max(track.f0[:n])) / steady_f0(track))


# -- instantaneous f0 --------------------------------------------------------

def _bandpass(x, sr, lo, hi):
    n = x.size
    nfft = _next_pow2(2 * n)
    spec = np.fft.rfft(x, nfft)
    fr = np.fft.rfftfreq(nfft, 1.0 / sr)
    w = np.zeros_like(fr)
    w[(fr >= lo) & (fr <= hi)] = 1.0
    taper = 0.25 * lo
    r = (fr > lo - taper) & (fr < lo)
    w[r] = 0.5 - 0.5 * np.cos(np.pi * (fr[r] - (lo - taper)) / taper)
    r = (fr > hi) & (fr < hi + taper)
    w[r] = 0.5 + 0.5 * np.cos(np.pi * (fr[r] - hi) / taper)
    return np.fft.irfft(spec * w, nfft)[:n]


def _crossings(x):
    s = np.signbit(x)
    idx = np.flatnonzero(s[1:] != s[:-1])
    # a sample that is exactly zero is its own crossing
    frac = np.where(x[idx] == x[idx + 1], 0.0, x[idx] / (x[idx] - x[idx + 1]))
    return idx + frac


def instantaneous_f0_track(clip: AudioClip, search_band=DEFAULT_BAND, gate_db: float = -50.0,
                           reference_f0: float | None = None) -> F0Track:
    """f0 from the phase implied by zero crossings.

    Successive crossings advance the phase by pi; a cubic spline through
    (crossing time, k*pi) is differentiated to get frequency. One extra point
    extrapolates the spline back to the onset (first sample above the gate),
    which is where the initial glide is steepest.

    The raw waveform is used when its crossings are clean (true of a sine
    through any monotone saturator). If harmonics or noise add crossings,
    the signal is band-passed around ``reference_f0`` first, which blurs the
    first ~1/f0 seconds.
    """
    sr = clip.sample_rate
    x = clip.samples
    if reference_f0 is None:
        reference_f0 = steady_f0(estimate_f0_track(clip, search_band=search_band))
    amp = np.abs(x)
    thr = amp.max() * 10.0 ** (gate_db / 20.0)
    above = np.flatnonzero(amp > thr)
    if above.size == 0:
        raise NoFundamentalError("no fundamental detected: silent clip")
    onset, offset = above[0], above[-1]

    def crossings_of(y):
        c = _crossings(y)
        return c[(c > onset) & (c < offset)]

    c = crossings_of(x)
    half_period = sr / (2.0 * reference_f0)
    if c.size < 4 or np.min(np.diff(c)) < 0.5 * half_period:
        y = _bandpass(x, sr, 0.5 * reference_f0, 1.6 * reference_f0)
        c = crossings_of(y)
        log.debug("instantaneous f0: using band-limited signal around %.2f Hz", reference_f0)
    else:
        y = x
    if c.size < 4:
        raise NoFundamentalError("no fundamental detected: too few zero crossings")
    t = c / sr
    spline = CubicSpline(t, np.pi * np.arange(t.size))
    f = spline(t, 1) / (2.0 * np.pi)
    t_on = onset / sr
    if t_on < t[0]:
        t = np.concatenate([[t_on], t])
        f = np.concatenate([[spline(t_on, 1) / (2.0 * np.pi)], f])
    # energy: squared peak amplitude over the surrounding half cycle
    centre = np.clip(np.round(t * sr).astype(int), 0, x.size - 1)
    h = max(1, int(half_period / 2))
    csum_idx = np.clip(centre[:, None] + np.arange(-h, h + 1)[None, :], 0, x.size - 1)
    energy = (np.abs(y[csum_idx]).max(axis=1)) ** 2
    keep = (f >= search_band[0]) & (f <= search_band[1])
    if not np.any(keep):
        raise NoFundamentalError(
            f"no fundamental detected in {search_band[0]:g}-{search_band[1]:g} Hz")
    return F0Track(t[keep], f[keep], energy[keep])


# -- partials ----------------------------------------------------------------

def _partial_bins(target, bw, n_bins):
    lo = int(math.floor(target / QUARTERTONE / bw))
    hi = int(math.ceil(target * QUARTERTONE / bw))
    lo, hi = max(lo, 1), min(hi, n_bins - 2)
    return lo, max(hi, lo)


def track_partials(spec: Spectrogram, f0: float, n_harmonics: int,
                   fundamental_stop: float = FUNDAMENTAL_STOP,
                   harmonic_stop: float = HARMONIC_STOP, scale: str = "db",
                   dynamic_range_db: float = DYNAMIC_RANGE_DB) -> list[PartialTrack]:
    """Follow harmonics ``1..n_harmonics`` of ``f0`` through ``spec``.

    Each partial is the magnitude peak within a quartertone of ``k*f0``. Its
    level is compared with the global spectrogram peak: with ``scale="db"``
    the level is expressed as a fraction of ``dynamic_range_db`` above the
    floor (1 at the peak, 0 at the floor); with ``scale="linear"`` it is the
    energy ratio. Every track starts at the onset frame, the first frame in
    which the fundamental reaches its threshold (frame 0 for a drum hit),
    and runs up to the first frame below its own threshold, whose time is
    ``stop_time``. A partial already below threshold at the onset gives an
    empty track with ``stop_time = 0``.
    """
    if n_harmonics < 1:
        raise DomainError("n_harmonics must be >= 1")
    if f0 * n_harmonics >= spec.sample_rate / 2:
        raise DomainError(f"{n_harmonics} harmonics of {f0:g} Hz exceed Nyquist")
    if scale not in ("db", "linear"):
        raise DomainError(f"scale must be 'db' or 'linear', got {scale!r}")
    mags = spec.frames
    bw = spec.bin_width
    times = spec.times
    peak = mags.max()

    def follow(k):
        lo, hi = _partial_bins(k * f0, bw, mags.shape[1])
        j = lo + np.argmax(mags[:, lo:hi + 1], axis=1)
        pos, m = zip(*(interpolate_peak(mags[i], int(j[i])) for i in range(mags.shape[0])))
        m = np.asarray(m)
        if peak <= 0:
            level = np.zeros_like(m)
        elif scale == "db":
            rel = 20.0 * np.log10(np.maximum(m / peak, 1e-300))
            level = (rel + dynamic_range_db) / dynamic_range_db
        else:
            level = (m / peak) ** 2
        return np.asarray(pos) * bw, m, level

    partials = [follow(k) for k in range(1, n_harmonics + 1)]
    reached = np.flatnonzero(partials[0][2] >= fundamental_stop)
    onset = int(reached[0]) if reached.size else mags.shape[0]
    out = []
    for k, (freq, m, level) in enumerate(partials, start=1):
        thr = fundamental_stop if k == 1 else harmonic_stop
        below = np.flatnonzero(level[onset:] < thr)
        if onset >= mags.shape[0] or (below.size and below[0] == 0):
            out.append(PartialTrack(k, np.zeros(0), np.zeros(0), np.zeros(0), 0.0))
            continue
        end = onset + int(below[0]) if below.size else mags.shape[0]
        stop = float(times[end]) if end < mags.shape[0] else float(
            times[-1] + spec.hop / spec.sample_rate)
        sl = slice(onset, end)
        out.append(PartialTrack(k, times[sl].copy(), freq[sl], m[sl], stop))
    return out


def harmonic_profile(clip: AudioClip, n_harmonics: int = 5, f0: float | None = None,
                     window: float = DEFAULT_WINDOW_S, search_band=DEFAULT_BAND) -> SpectralProfile:
    """Steady-state partial amplitudes of a voice.

    Uses the windows whose f0 lies within 0.1 semitone of the steady f0 and
    averages each harmonic's peak power over them.
    """
    track = estimate_f0_track(clip, window=window, search_band=search_band)
    if f0 is None:
        f0 = steady_f0(track)
    times, mags, bw = _frame_spectra(clip, window, None)
    steady = np.abs(12.0 * np.log2(track.f0 / f0)) < 0.1
    use = np.isin(np.round(times, 9), np.round(track.times[steady], 9))
    if not np.any(use):
        use = np.isin(np.round(times, 9), np.round(track.times, 9))
    n_harmonics = min(n_harmonics, int((clip.sample_rate / 2) / (f0 * QUARTERTONE)))
    amps = []
    for k in range(1, n_harmonics + 1):
        lo, hi = _partial_bins(k * f0, bw, mags.shape[1])
        vals = []
        for i in np.flatnonzero(use):
            j = lo + int(np.argmax(mags[i, lo:hi + 1]))
            vals.append(interpolate_peak(mags[i], j)[1] ** 2)
        amps.append(math.sqrt(float(np.mean(vals))))
    return SpectralProfile.harmonic(f0, amps)


# -- distribution ------------------------------------------------------------

def f0_distribution(clips, bin_width: float = HIST_BIN_HZ, band=DEFAULT_BAND,
                    secondary_fraction: float = SECONDARY_FRACTION,
                    window: float = DEFAULT_WINDOW_S) -> WeightedHistogram:
    """Energy-weighted histogram of windowed f0 estimates pooled over clips."""
    clips = list(clips)
    if not clips:
        raise DomainError("f0_distribution needs at least one clip")
    f_all, e_all = [], []
    failures = []
    for i, clip in enumerate(clips):
        try:
            tr = estimate_f0_track(clip, window=window, search_band=band)
        except NoFundamentalError as exc:
            failures.append(f"clip {i}: {exc}")
            continue
        f_all.append(tr.f0)
        e_all.append(tr.energy)
    if not f_all:
        raise NoFundamentalError("no fundamental detected in any clip: " + "; ".join(failures))
    for msg in failures:
        log.warning("f0_distribution skipped %s", msg)
    f = np.concatenate(f_all)
    e = np.concatenate(e_all)
    total = math.fsum(e.tolist())
    if total <= 0:
        raise NoFundamentalError("no fundamental detected: zero energy in all windows")
    n_bins = int(round((band[1] - band[0]) / bin_width))
    edges = band[0] + bin_width * np.arange(n_bins + 1)
    which = np.clip(np.floor((f - band[0]) / bin_width).astype(int), 0, n_bins - 1)
    masses = np.bincount(which, weights=e, minlength=n_bins) / total
    masses = masses / masses.sum()

    def bin_frequency(b):
        sel = which == b
        return float(np.average(f[sel], weights=e[sel])) if e[sel].sum() > 0 else float(
            0.5 * (edges[b] + edges[b + 1]))

    mode = int(np.argmax(masses))
    secondary = []
    for b in range(n_bins):
        if b == mode or masses[b] < secondary_fraction * masses[mode] or masses[b] <= 0:
            continue
        left = masses[b - 1] if b > 0 else 0.0
        right = masses[b + 1] if b < n_bins - 1 else 0.0
        if masses[b] >= left and masses[b] > right:
            secondary.append((masses[b], bin_frequency(b)))
    secondary.sort(key=lambda m: -m[0])
    return WeightedHistogram(edges, masses, bin_frequency(mode), tuple(fr for _, fr in secondary))


# -- onsets ------------------------------------------------------------------

def detect_onsets(clip: AudioClip, band=DEFAULT_BAND, window: int = 2048, hop: int = 256,
                  rise_db: float = 9.0, gate_db: float = -40.0, min_gap: float = 0.1) -> np.ndarray:
    """Onset times (s) from rises of sub-band energy. Simple energy gate."""
    from .signalcore import stft
    if clip.samples.size < window:
        return np.zeros(0)
    spec = stft(clip, window, hop)
    fr = spec.frequencies
    sel = (fr >= band[0]) & (fr <= band[1])
    if not np.any(sel):
        sel = np.abs(fr - 0.5 * (band[0] + band[1])) == np.min(np.abs(fr - 0.5 * (band[0] + band[1])))
    e = (spec.frames[:, sel] ** 2).sum(axis=1)
    if e.max() <= 0:
        return np.zeros(0)
    level = 10.0 * np.log10(np.maximum(e / e.max(), 1e-30))
    lag = max(1, int(round(0.05 * clip.sample_rate / hop)))
    onsets = []
    last = -np.inf
    for i in range(lag, level.size):
        t = spec.times[i]
        if level[i] > gate_db and level[i] - level[i - lag:i].min() > rise_db and t - last > min_gap:
            onsets.append(t)
            last = t
    return np.array(onsets)
