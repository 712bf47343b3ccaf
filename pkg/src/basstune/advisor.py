"""Speaker x ear gain arithmetic for transposed bass-drum voices.

The combined gain at frequency ``f`` is the speaker response minus the
equal-loudness contour referenced to 1 kHz. A transposition moves every
partial by the same ratio; the report weights the per-partial gains by
partial power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import perception
from .errors import BandError, DomainError
from .monitors import ResponseCurve
from .signalcore import (Note, SpectralProfile, frequency_of_note, semitones_between,
                         DEFAULT_REFERENCE_HZ)

DEFAULT_CANDIDATES = (-6, 6)

# producer vocabulary for the sub-bass regions; labels only, never used in arithmetic
SUB_BASS_REGIONS = (("boom", 30.0), ("thump", 50.0), ("punch", 80.0))
SUB_BASS_LIMIT = 100.0


def sub_bass_region(f: float) -> str | None:
    if not 20.0 <= f < SUB_BASS_LIMIT:
        return None
    return min(SUB_BASS_REGIONS, key=lambda r: abs(math.log(f / r[1])))[0]


@dataclass(frozen=True, eq=False)
class CombinedCurve:
    """Speaker response plus ear sensitivity at a fixed loudness.

    ``loudness=None`` drops the ear term (speaker-only curve).
    """

    speaker: ResponseCurve
    loudness: float | None = perception.DEFAULT_PHON

    def __post_init__(self):
        if self.loudness is not None:
            object.__setattr__(self, "loudness", perception.check_phon(self.loudness))
        lo, hi = self.band
        if not lo < hi:
            raise BandError(
                f"speaker band {self.speaker.band} does not overlap the ear model band "
                f"[{perception.F_MIN:g}, {perception.F_MAX:g}] Hz")

    @property
    def band(self):
        lo, hi = self.speaker.band
        if self.loudness is not None:
            lo, hi = max(lo, perception.F_MIN), min(hi, perception.F_MAX)
        return lo, hi

    def in_band(self, f) -> np.ndarray:
        lo, hi = self.band
        f = np.asarray(f, dtype=float)
        return (f >= lo * (1 - 1e-9)) & (f <= hi * (1 + 1e-9))

    def gain(self, f):
        f_arr = np.asarray(f, dtype=float)
        if not np.all(self.in_band(f_arr)):
            lo, hi = self.band
            raise BandError(f"frequency outside the combined band [{lo:g}, {hi:g}] Hz: {f}")
        lo, hi = self.band
        f_arr = np.clip(f_arr, lo, hi)
        g = np.asarray(self.speaker.at(f_arr), dtype=float)
        if self.loudness is not None:
            g = g + perception.relative_sensitivity(f_arr, self.loudness)
        return float(g) if g.ndim == 0 else g

    def delta(self, f_from, f_to):
        return self.gain(f_to) - self.gain(f_from)


def combined_response(curve: ResponseCurve, loudness=perception.DEFAULT_PHON) -> CombinedCurve:
    return CombinedCurve(curve, loudness)


@dataclass(frozen=True)
class PartialDelta:
    harmonic_index: int
    f_from: float
    f_to: float
    delta_db: float

    @property
    def region(self):
        return sub_bass_region(self.f_from)


@dataclass(frozen=True)
class TranspositionReport:
    """Per-partial and total gain changes (dB, power convention)."""

    semitones: float
    per_partial: tuple
    total_power_delta_db: float
    fundamental_delta_db: float


def _check_in_band(profile_freqs, harmonics, curve, what):
    ok = curve.in_band(profile_freqs)
    if not np.all(ok):
        lo, hi = curve.band
        bad = ", ".join(f"h{h} at {f:.2f} Hz" for h, f, good in zip(harmonics, profile_freqs, ok)
                        if not good)
        raise BandError(f"{what} partial(s) outside the evaluable band [{lo:g}, {hi:g}] Hz: {bad}")


def _weighted_level(amps, gains_db):
    return math.fsum(float(p) for p in amps ** 2 * 10.0 ** (gains_db / 10.0))


def transposition_loss(profile: SpectralProfile, semitones: float,
                       curve: CombinedCurve) -> TranspositionReport:
    f_from = profile.frequencies
    f_to = f_from * 2.0 ** (semitones / 12.0)
    h = profile.harmonics
    _check_in_band(f_from, h, curve, "source")
    _check_in_band(f_to, h, curve, "transposed")
    g_from = np.atleast_1d(curve.gain(f_from))
    g_to = np.atleast_1d(curve.gain(f_to))
    a = profile.amplitudes
    total = 10.0 * math.log10(_weighted_level(a, g_to) / _weighted_level(a, g_from))
    f0 = profile.fundamental
    f0_to = f0 * 2.0 ** (semitones / 12.0)
    if 1 in h:
        i = int(np.flatnonzero(h == 1)[0])
        fund = float(g_to[i] - g_from[i])
    else:
        _check_in_band(np.array([f0, f0_to]), [1, 1], curve, "fundamental")
        fund = curve.delta(f0, f0_to)
    parts = tuple(PartialDelta(int(k), float(a0), float(b0), float(gb - ga))
                  for k, a0, b0, ga, gb in zip(h, f_from, f_to, g_from, g_to))
    return TranspositionReport(float(semitones), parts, total, fund)


@dataclass(frozen=True)
class StabilityReport:
    notes: tuple
    gains_db: tuple
    spread_db: float


def stability_report(notes, profile_shape: SpectralProfile, curve: CombinedCurve,
                     reference: float = DEFAULT_REFERENCE_HZ) -> StabilityReport:
    """Gain of the profile realised on each note, relative to its own pitch.

    The spread (max - min) is how much the level jumps across the sequence.
    """
    notes = tuple(notes)
    if not notes:
        raise DomainError("stability_report needs at least one note")
    gains = []
    for n in notes:
        s = semitones_between(profile_shape.fundamental, frequency_of_note(n, reference))
        gains.append(transposition_loss(profile_shape, s, curve).total_power_delta_db)
    return StabilityReport(notes, tuple(gains), max(gains) - min(gains))


@dataclass(frozen=True)
class KeyCandidate:
    song_transposition: int
    note: Note
    frequency: float
    sample_shift: float
    total_gain_db: float | None
    feasible: bool
    reason: str = ""


def realize_pitch_class(pitch_class: int, near_f: float,
                        reference: float = DEFAULT_REFERENCE_HZ) -> Note:
    """The note with ``pitch_class`` whose frequency is nearest ``near_f`` (log scale)."""
    m = 69 + 12 * math.log2(near_f / reference)
    base = pitch_class + 12 * math.floor((m - pitch_class) / 12)
    lo, hi = base, base + 12
    return Note(lo if abs(m - lo) <= abs(hi - m) else hi)


def recommend_key(song_key_root: Note, sample_f0: float, curve: CombinedCurve,
                  candidate_range=DEFAULT_CANDIDATES, profile: SpectralProfile | None = None,
                  reference: float = DEFAULT_REFERENCE_HZ) -> list[KeyCandidate]:
    """Rank song transpositions by how much level the 808 keeps.

    For each integer song transposition ``s`` the 808 plays the new root,
    realised at the octave nearest ``sample_f0``. Ordering: feasible first,
    total gain descending, then ``|s|`` ascending, then ``s`` ascending.
    """
    lo_s, hi_s = (int(v) for v in candidate_range)
    if lo_s > hi_s:
        raise DomainError(f"empty candidate range {candidate_range}")
    if profile is None:
        profile = SpectralProfile.sine(sample_f0)
    else:
        profile = profile.at_fundamental(sample_f0)
    _check_in_band(profile.frequencies, profile.harmonics, curve, "sample")
    out = []
    for s in range(lo_s, hi_s + 1):
        note = realize_pitch_class((song_key_root.midi_number + s) % 12, sample_f0, reference)
        f = frequency_of_note(note, reference)
        shift = semitones_between(sample_f0, f)
        try:
            total = transposition_loss(profile, shift, curve).total_power_delta_db
            out.append(KeyCandidate(s, note, f, shift, total, True))
        except BandError as exc:
            out.append(KeyCandidate(s, note, f, shift, None, False, str(exc)))

    def key(c):
        g = round(c.total_gain_db, 9) if c.feasible else 0.0
        return (not c.feasible, -g, abs(c.song_transposition), c.song_transposition)

    return sorted(out, key=key)
