"""Audio clips plus the spectral and pitch primitives shared by the other modules.

Conventions used across the package:

* amplitude ratios use ``20*log10``, power ratios ``10*log10``;
* pitch reference defaults to A4 = 440 Hz (MIDI 69);
* STFT frames are centred: frame ``k`` is centred on sample ``k*hop``.
"""

from __future__ import annotations

import math
import re
import wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import get_window

from .errors import DomainError, InsufficientSignalError, BasstuneError

A4_MIDI = 69
DEFAULT_REFERENCE_HZ = 440.0
MIN_SAMPLE_RATE = 8000

DEFAULT_WINDOW_SIZE = 8192
DEFAULT_WINDOW = "hann"

_TINY = 1e-300


# -- Levels ------------------------------------------------------------------

def amplitude_to_db(x):
    return 20.0 * np.log10(np.maximum(np.abs(x), _TINY))


def power_to_db(x):
    return 10.0 * np.log10(np.maximum(x, _TINY))


def db_to_amplitude(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 20.0)


def db_to_power(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


# -- Audio container ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AudioClip:
    """Mono sample buffer, full scale +/-1.0."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=np.float64)
        if x.ndim == 2:
            # channels last, as returned by most readers
            x = x.mean(axis=1)
        if x.ndim != 1:
            raise DomainError(f"samples must be 1-D or (n, channels), got shape {x.shape}")
        if x.size == 0:
            raise DomainError("samples must be non-empty")
        if not np.all(np.isfinite(x)):
            raise DomainError("samples must be finite")
        sr = int(self.sample_rate)
        if sr != self.sample_rate or sr < MIN_SAMPLE_RATE:
            raise DomainError(f"sample_rate must be an integer >= {MIN_SAMPLE_RATE} Hz, got {self.sample_rate}")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate", sr)

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate

    def rms(self) -> float:
        return float(np.sqrt(np.mean(self.samples ** 2)))

    def peak(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def scaled(self, gain: float) -> "AudioClip":
        return AudioClip(self.samples * gain, self.sample_rate)


def read_wav(path) -> AudioClip:
    """Read a linear-PCM WAV (8/16/24/32-bit int or 32/64-bit float).

    Multichannel input is averaged to mono.
    """
    try:
        sr, data = wavfile.read(str(path))
    except (ValueError, EOFError) as exc:
        raise BasstuneError(f"{path}: not a readable PCM WAV file ({exc})") from exc
    if data.dtype == np.uint8:
        x = (data.astype(np.float64) - 128.0) / 128.0
    elif np.issubdtype(data.dtype, np.integer):
        # scipy returns 24-bit data left-justified in int32
        x = data.astype(np.float64) / float(-np.iinfo(data.dtype).min)
    elif np.issubdtype(data.dtype, np.floating):
        x = data.astype(np.float64)
    else:
        raise BasstuneError(f"{path}: unsupported sample type {data.dtype}")
    return AudioClip(x, sr)


def write_wav(path, clip: AudioClip, fmt: str = "float32") -> Path:
    """Write ``clip`` as mono WAV. ``fmt`` is ``float32``, ``int16`` or ``int24``."""
    path = Path(path)
    x = np.clip(clip.samples, -1.0, 1.0)
    if fmt == "float32":
        wavfile.write(str(path), clip.sample_rate, x.astype(np.float32))
    elif fmt == "int16":
        q = np.clip(np.round(x * 32768.0), -32768, 32767).astype(np.int16)
        wavfile.write(str(path), clip.sample_rate, q)
    elif fmt == "int24":
        q = np.clip(np.round(x * 8388608.0), -8388608, 8388607).astype("<i4")
        raw = q.view(np.uint8).reshape(-1, 4)[:, :3].tobytes()
        with wave.open(str(path), "wb") as w:
            w.setnchannels(1)
            w.setsampwidth(3)
            w.setframerate(clip.sample_rate)
            w.writeframes(raw)
    else:
        raise DomainError(f"unknown WAV format {fmt!r}; expected float32, int16 or int24")
    return path


# -- STFT --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Spectrogram:
    """Magnitude STFT, ``frames[k, b]`` for frame ``k`` and bin ``b``."""

    frames: np.ndarray
    window_size: int
    hop: int
    sample_rate: int
    window: str = DEFAULT_WINDOW

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_frames) * self.hop / self.sample_rate

    @property
    def frequencies(self) -> np.ndarray:
        return np.fft.rfftfreq(self.window_size, 1.0 / self.sample_rate)

    @property
    def bin_width(self) -> float:
        return self.sample_rate / self.window_size

    def peak_frequency(self, frame: int, band=None) -> float:
        """Interpolated frequency of the largest peak in ``frame`` within ``band``."""
        mag = self.frames[frame]
        lo, hi = 0, mag.size - 1
        if band is not None:
            lo = max(int(math.ceil(band[0] / self.bin_width)), 0)
            hi = min(int(math.floor(band[1] / self.bin_width)), mag.size - 1)
        k = lo + int(np.argmax(mag[lo:hi + 1]))
        pos, _ = interpolate_peak(mag, k)
        return pos * self.bin_width


def stft(clip: AudioClip, window_size: int = DEFAULT_WINDOW_SIZE, hop: int | None = None,
         window: str = DEFAULT_WINDOW) -> Spectrogram:
    """Centred magnitude STFT.

    Frame ``k`` covers samples ``[k*hop - N/2, k*hop + N/2)``; the signal is
    zero-padded at both ends so the final frame is complete.
    """
    n = int(window_size)
    hop = n // 4 if hop is None else int(hop)
    if hop < 1:
        raise DomainError(f"hop must be >= 1, got {hop}")
    if n < 2:
        raise DomainError(f"window_size must be >= 2, got {n}")
    x = clip.samples
    if x.size < n:
        raise InsufficientSignalError(
            f"insufficient signal: {x.size} samples is shorter than one window ({n})")
    try:
        w = get_window(window, n, fftbins=True)
    except ValueError as exc:
        raise DomainError(f"unknown window {window!r}") from exc
    n_frames = 1 + -(-(x.size - 1) // hop)
    padded = np.zeros((n_frames - 1) * hop + n)
    padded[n // 2:n // 2 + x.size] = x
    idx = np.arange(n)[None, :] + hop * np.arange(n_frames)[:, None]
    mags = np.abs(np.fft.rfft(padded[idx] * w, axis=1))
    return Spectrogram(mags, n, hop, clip.sample_rate, window)


def interpolate_peak(mag: np.ndarray, k: int):
    """Log-parabolic interpolation around bin ``k``.

    Returns ``(fractional_bin, magnitude)``. Edge bins are returned as-is.
    """
    if k <= 0 or k >= mag.size - 1:
        return float(k), float(mag[k])
    a, b, c = np.log(np.maximum(mag[k - 1:k + 2], _TINY))
    denom = a - 2.0 * b + c
    if denom >= 0:
        return float(k), float(mag[k])
    d = 0.5 * (a - c) / denom
    return k + float(d), float(np.exp(b - 0.25 * (a - c) * d))


# -- Pitch -------------------------------------------------------------------

_PITCH_CLASSES = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
_SHARP_NAMES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]
_NOTE_RE = re.compile(r"^\s*([A-Ga-g])([#b♯♭]*)(-?\d+)?\s*$")


@dataclass(frozen=True, order=True)
class Note:
    midi_number: int
    cents_offset: float = 0.0

    def __post_init__(self):
        if not -50.0 <= self.cents_offset < 50.0:
            raise DomainError(f"cents_offset must be in [-50, 50), got {self.cents_offset}")

    @property
    def pitch_class(self) -> int:
        return self.midi_number % 12

    @property
    def octave(self) -> int:
        return self.midi_number // 12 - 1

    @property
    def name(self) -> str:
        return f"{_SHARP_NAMES[self.pitch_class]}{self.octave}"

    def __str__(self):
        if abs(self.cents_offset) < 0.05:
            return self.name
        return f"{self.name}{self.cents_offset:+.1f}c"


def parse_note(text: str, default_octave: int = 1) -> Note:
    """Parse scientific pitch notation such as ``D1``, ``Bb0`` or ``G#``."""
    m = _NOTE_RE.match(text)
    if not m:
        raise DomainError(f"cannot parse note name {text!r}")
    letter, accidentals, octave = m.groups()
    pc = _PITCH_CLASSES[letter.upper()]
    pc += sum(1 if a in "#♯" else -1 for a in accidentals)
    octave = default_octave if octave is None else int(octave)
    return Note(pc + 12 * (octave + 1))


def frequency_of_note(note: Note, reference: float = DEFAULT_REFERENCE_HZ) -> float:
    _check_reference(reference)
    return reference * 2.0 ** ((note.midi_number - A4_MIDI + note.cents_offset / 100.0) / 12.0)


def note_of_frequency(f: float, reference: float = DEFAULT_REFERENCE_HZ) -> Note:
    """Nearest equal-tempered note plus the cents deviation in [-50, 50)."""
    if not f > 0 or not math.isfinite(f):
        raise DomainError(f"frequency must be positive and finite, got {f}")
    _check_reference(reference)
    m = A4_MIDI + 12.0 * math.log2(f / reference)
    midi = math.floor(m + 0.5)
    cents = (m - midi) * 100.0
    if cents >= 50.0:  # rounding at the exact half-semitone boundary
        midi, cents = midi + 1, cents - 100.0
    return Note(midi, cents)


def transpose_frequency(f, semitones):
    """``f * 2**(semitones/12)``; works elementwise on arrays."""
    f_arr = np.asarray(f, dtype=float)
    if np.any(~(f_arr > 0)):
        raise DomainError(f"frequency must be positive, got {f}")
    out = f_arr * 2.0 ** (np.asarray(semitones, dtype=float) / 12.0)
    return float(out) if out.ndim == 0 else out


def semitones_between(f_from: float, f_to: float) -> float:
    if not (f_from > 0 and f_to > 0):
        raise DomainError("frequencies must be positive")
    return 12.0 * math.log2(f_to / f_from)


def _check_reference(reference):
    if not reference > 0:
        raise DomainError(f"pitch reference must be positive, got {reference}")


# -- Spectral profile --------------------------------------------------------

@dataclass(frozen=True)
class Partial:
    harmonic_index: int
    frequency: float
    amplitude: float


@dataclass(frozen=True)
class SpectralProfile:
    """Harmonic partials with linear amplitudes normalised to max 1.0."""

    partials: tuple = field(default_factory=tuple)

    def __post_init__(self):
        parts = tuple(p if isinstance(p, Partial) else Partial(int(p[0]), float(p[1]), float(p[2]))
                      for p in self.partials)
        if not parts:
            raise DomainError("a spectral profile needs at least one partial")
        for p in parts:
            if p.harmonic_index < 1:
                raise DomainError(f"harmonic index must be >= 1, got {p.harmonic_index}")
            if not p.frequency > 0:
                raise DomainError(f"partial frequency must be positive, got {p.frequency}")
            if not (p.amplitude >= 0 and math.isfinite(p.amplitude)):
                raise DomainError(f"partial amplitude must be finite and >= 0, got {p.amplitude}")
        parts = tuple(sorted(parts, key=lambda p: p.harmonic_index))
        f0 = parts[0].frequency / parts[0].harmonic_index
        for p in parts:
            if abs(p.frequency - p.harmonic_index * f0) > 0.01 * p.harmonic_index * f0:
                raise DomainError(
                    f"partial {p.harmonic_index} at {p.frequency} Hz is not harmonic of {f0:.3f} Hz")
        peak = max(p.amplitude for p in parts)
        if peak <= 0:
            raise DomainError("at least one partial must have non-zero amplitude")
        parts = tuple(Partial(p.harmonic_index, p.frequency, p.amplitude / peak) for p in parts)
        object.__setattr__(self, "partials", parts)

    @classmethod
    def harmonic(cls, fundamental: float, amplitudes) -> "SpectralProfile":
        """Partials ``1..len(amplitudes)`` of ``fundamental``."""
        return cls(tuple(Partial(k, k * fundamental, a) for k, a in enumerate(amplitudes, start=1)))

    @classmethod
    def sine(cls, fundamental: float) -> "SpectralProfile":
        return cls.harmonic(fundamental, [1.0])

    @property
    def fundamental(self) -> float:
        p = self.partials[0]
        return p.frequency / p.harmonic_index

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([p.frequency for p in self.partials])

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([p.amplitude for p in self.partials])

    @property
    def harmonics(self) -> np.ndarray:
        return np.array([p.harmonic_index for p in self.partials])

    def transposed(self, semitones: float) -> "SpectralProfile":
        r = 2.0 ** (semitones / 12.0)
        return SpectralProfile(tuple(Partial(p.harmonic_index, p.frequency * r, p.amplitude)
                                     for p in self.partials))

    def at_fundamental(self, f0: float) -> "SpectralProfile":
        return self.transposed(semitones_between(self.fundamental, f0))
