"""Behavioural model of a TR-808 style bass-drum voice.

A decaying sine whose frequency glides exponentially from
``f0_end * 2**(sweep_semitones/12)`` down to ``f0_end`` (time constant
``sweep_duration/3``), optionally pushed through a biased ``tanh``
saturator to grow odd and even overtones. Used as ground truth for the
analysis code; it is not a circuit emulation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from .errors import DomainError
from .signalcore import AudioClip, SpectralProfile, MIN_SAMPLE_RATE

PEAK_LEVEL = 0.9
# asymmetry of the saturator; gives the even harmonics
DRIVE_BIAS = 0.3

REFERENCE_FUNDAMENTAL = 49.48
DRIVEN_PROFILE_FILE = "driven_profile.csv"


@dataclass(frozen=True)
class VoiceParams:
    f0_end: float = REFERENCE_FUNDAMENTAL
    sweep_semitones: float = 1.0
    sweep_duration: float = 0.4
    amp_decay_time: float = 2.0
    drive: float = 0.0
    duration: float = 3.0
    sample_rate: int = 44100

    def __post_init__(self):
        checks = [
            (self.f0_end > 0, f"f0_end must be > 0 Hz, got {self.f0_end}"),
            (self.sweep_semitones >= 0, f"sweep_semitones must be >= 0, got {self.sweep_semitones}"),
            (self.sweep_duration > 0, f"sweep_duration must be > 0 s, got {self.sweep_duration}"),
            (self.amp_decay_time > 0, f"amp_decay_time must be > 0 s, got {self.amp_decay_time}"),
            (self.drive >= 0, f"drive must be >= 0, got {self.drive}"),
            (self.duration > self.sweep_duration,
             f"duration ({self.duration} s) must exceed sweep_duration ({self.sweep_duration} s)"),
            (int(self.sample_rate) == self.sample_rate and self.sample_rate >= MIN_SAMPLE_RATE,
             f"sample_rate must be an integer >= {MIN_SAMPLE_RATE}, got {self.sample_rate}"),
        ]
        for ok, msg in checks:
            if not ok:
                raise DomainError(msg)
        if self.f0_start >= self.sample_rate / 2:
            raise DomainError(f"initial frequency {self.f0_start:.1f} Hz is above Nyquist")

    @property
    def f0_start(self) -> float:
        return self.f0_end * 2.0 ** (self.sweep_semitones / 12.0)

    @property
    def sweep_time_constant(self) -> float:
        return self.sweep_duration / 3.0

    def transposed(self, semitones: float) -> "VoiceParams":
        return replace(self, f0_end=self.f0_end * 2.0 ** (semitones / 12.0))


def instantaneous_frequency(p: VoiceParams, t) -> np.ndarray:
    """Programmed frequency trajectory in Hz at times ``t`` (seconds)."""
    t = np.asarray(t, dtype=float)
    return p.f0_end + (p.f0_start - p.f0_end) * np.exp(-t / p.sweep_time_constant)


def _phase(p: VoiceParams, t):
    tau = p.sweep_time_constant
    return 2 * np.pi * (p.f0_end * t + (p.f0_start - p.f0_end) * tau * (1.0 - np.exp(-t / tau)))


def amplitude_envelope(p: VoiceParams, t) -> np.ndarray:
    """Linear envelope reaching -60 dB at ``amp_decay_time``."""
    return 10.0 ** (-3.0 * np.asarray(t, dtype=float) / p.amp_decay_time)


def saturate(x, drive: float):
    """Biased tanh saturator; identity at ``drive == 0``.

    Monotone with ``saturate(0) == 0``, so zero crossings are preserved.
    """
    if drive == 0:
        return np.asarray(x, dtype=float)
    return (np.tanh(drive * (x + DRIVE_BIAS)) - math.tanh(drive * DRIVE_BIAS)) / drive


def synth_voice(p: VoiceParams) -> AudioClip:
    n = int(round(p.duration * p.sample_rate))
    t = np.arange(n) / p.sample_rate
    x = saturate(amplitude_envelope(p, t) * np.sin(_phase(p, t)), p.drive)
    x *= PEAK_LEVEL / np.max(np.abs(x))
    return AudioClip(x, p.sample_rate)


def reference_driven_profile() -> SpectralProfile:
    """Five-partial profile of a driven 808 voice at its steady state.

    Relative amplitudes come from the bundled ``driven_profile.csv``; see
    ``basstune.datagen`` for how they were fitted.
    """
    amps = {}
    text = resources.files("basstune.data").joinpath(DRIVEN_PROFILE_FILE).read_text("utf-8")
    rows = [line for line in text.splitlines() if line.strip() and not line.startswith("#")]
    for row in csv.DictReader(rows):
        amps[int(row["harmonic"])] = float(row["amplitude"])
    ks = sorted(amps)
    return SpectralProfile(tuple((k, k * REFERENCE_FUNDAMENTAL, amps[k]) for k in ks))
