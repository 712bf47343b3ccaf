"""Builders for the bundled synthetic data files.

Run ``python -m basstune.datagen`` to regenerate ``data/``. Both files are
synthetic stand-ins; neither is measured data.

Monitor dataset
    36 near-field monitor responses. Each speaker is a ported-box style
    high-pass (two cascaded 2nd-order sections), a low-mid bump, a
    console-bounce dip and small treble ripple, with per-speaker
    lognormal/normal scatter around a common design (seeded RNG). A single
    scale factor on all high-pass corners is then solved (brentq) so that
    the 1/3-octave smoothed median loses 6.3 dB between 49.48 Hz and
    37.06 Hz. The shape was chosen so the combined speaker+ear response at
    60 phon gives per-harmonic losses that shrink with harmonic number and
    vanish near the 5th harmonic.

Driven profile
    Amplitudes ``a_k = k**-gamma`` for harmonics 1..5. ``gamma`` is solved
    so the profile loses 4.5 dB under a -5 semitone transposition on the
    bundled combined curve at 60 phon. The fit lands near gamma = 2, a
    steeper rolloff than a sawtooth: the combined curve already favours
    the upper partials by 13-18 dB, so even modest harmonics carry much
    of the perceived level.
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .monitors import SpeakerResponse, median_response, speaker_gain_delta, _parse_dataset
from .signalcore import SpectralProfile

N_SPEAKERS = 36
SEED = 808
F_LO, F_HI = 20.0, 20000.0
POINTS_PER_OCTAVE = 24

TARGET_SPEAKER_DELTA = -6.3
TARGET_DRIVEN_LOSS = -4.5
F_FROM, F_TO = 49.48, 37.06

# common design around which speakers scatter
DESIGN = dict(fc=47.44, q=1.46, fb=108.1, gb=4.0, qb=0.73, fd=284.6, gd=-4.0, qd=1.36)


def _highpass_db(f, fc, q):
    s = 1j * f / fc
    return 20 * np.log10(np.abs(s ** 2 / (s ** 2 + s / q + 1)))


def _lowpass_db(f, fc, q):
    s = 1j * f / fc
    return 20 * np.log10(np.abs(1 / (s ** 2 + s / q + 1)))


def _peak_db(f, f0, gain_db, q):
    s = 1j * f / f0
    a = 10 ** (gain_db / 40)
    return 20 * np.log10(np.abs((s ** 2 + s * a / q + 1) / (s ** 2 + s / (a * q) + 1)))


@dataclass(frozen=True)
class _Speaker:
    fc: float
    q: float
    fb: float
    gb: float
    qb: float
    fd: float
    gd: float
    qd: float
    f_top: float
    ripple: tuple

    def response(self, f, corner_scale=1.0):
        fc = self.fc * corner_scale
        g = (_highpass_db(f, fc, self.q) + _highpass_db(f, 0.6 * fc, 0.55)
             + _peak_db(f, self.fb, self.gb, self.qb) + _peak_db(f, self.fd, self.gd, self.qd)
             + _lowpass_db(f, self.f_top, 0.7))
        lf = np.log2(f / 500.0)
        for amp, period, phase in self.ripple:
            g = g + np.where(lf > 0, amp * np.sin(2 * np.pi * lf / period + phase) * np.tanh(lf), 0.0)
        return g


def _draw_speakers(seed=SEED, n=N_SPEAKERS):
    rng = np.random.default_rng(seed)
    d = DESIGN
    out = []
    for _ in range(n):
        ripple = tuple((float(rng.uniform(0.2, 0.8)), float(rng.uniform(0.4, 1.5)),
                        float(rng.uniform(0, 2 * np.pi))) for _ in range(2))
        out.append(_Speaker(
            fc=d["fc"] * math.exp(rng.normal(0, 0.15)),
            q=float(np.clip(d["q"] * math.exp(rng.normal(0, 0.1)), 0.6, 2.0)),
            fb=d["fb"] * math.exp(rng.normal(0, 0.12)),
            gb=d["gb"] + rng.normal(0, 1.0),
            qb=d["qb"] * math.exp(rng.normal(0, 0.1)),
            fd=d["fd"] * math.exp(rng.normal(0, 0.08)),
            gd=d["gd"] + rng.normal(0, 1.0),
            qd=d["qd"] * math.exp(rng.normal(0, 0.1)),
            f_top=float(rng.uniform(22000, 35000)),
            ripple=ripple,
        ))
    return out


def _responses(models, corner_scale):
    n = int(round(POINTS_PER_OCTAVE * math.log2(F_HI / F_LO)))
    grid = F_LO * 2.0 ** (np.arange(n + 1) / POINTS_PER_OCTAVE)
    grid[-1] = min(grid[-1], F_HI)
    out = []
    for i, m in enumerate(models, start=1):
        g = m.response(grid, corner_scale)
        g = g - m.response(np.array([1000.0]), corner_scale)[0]
        out.append(SpeakerResponse(f"synthetic-{i:02d}", np.round(grid, 3), np.round(g, 2)))
    return out


def build_monitor_dataset(seed=SEED):
    """Return ``(speakers, corner_scale)`` calibrated to the -6.3 dB target."""
    models = _draw_speakers(seed)

    def err(scale):
        curve = median_response(_responses(models, scale))
        return speaker_gain_delta(curve, F_FROM, F_TO) - TARGET_SPEAKER_DELTA

    scale = brentq(err, 0.5, 2.0, xtol=1e-10)
    return _responses(models, scale), scale


def monitor_csv(speakers, corner_scale) -> str:
    lines = [
        "# SYNTHETIC near-field monitor responses; not measured data.",
        f"# generator: basstune.datagen seed={SEED} corner_scale={corner_scale:.8f}",
        "# calibrated: 1/3-octave smoothed median loses 6.3 dB from 49.48 Hz to 37.06 Hz",
        "# version: 1",
        "speaker,frequency_hz,gain_db",
    ]
    for s in speakers:
        lines += [f"{s.name},{f:g},{g:.2f}" for f, g in zip(s.frequencies, s.gains)]
    return "\n".join(lines) + "\n"


def fit_driven_profile(curve, n_harmonics=5, fundamental=F_FROM):
    """Solve the power-law exponent for the -4.5 dB target; returns ``(gamma, amps)``."""
    from .advisor import transposition_loss

    def loss(gamma):
        amps = np.arange(1, n_harmonics + 1, dtype=float) ** -gamma
        prof = SpectralProfile.harmonic(fundamental, amps)
        return transposition_loss(prof, -5.0, curve).total_power_delta_db - TARGET_DRIVEN_LOSS

    gamma = brentq(loss, 0.0, 3.0, xtol=1e-10)
    return gamma, np.arange(1, n_harmonics + 1, dtype=float) ** -gamma


def profile_csv(gamma, amps) -> str:
    lines = [
        "# Relative partial amplitudes of a driven 808 voice at steady state (49.48 Hz).",
        f"# fitted: a_k = k^-gamma, gamma = {gamma:.6f}, so that a -5 semitone",
        "# transposition loses 4.5 dB on the bundled combined curve at 60 phon.",
        "# version: 1",
        "harmonic,amplitude",
    ]
    lines += [f"{k},{a:.6f}" for k, a in enumerate(amps, start=1)]
    return "\n".join(lines) + "\n"


def main(argv=None):
    from .advisor import combined_response

    ap = argparse.ArgumentParser(description="Regenerate the bundled synthetic data files.")
    ap.add_argument("--out", type=Path, default=Path(str(resources.files("basstune.data"))))
    args = ap.parse_args(argv)
    speakers, scale = build_monitor_dataset()
    text = monitor_csv(speakers, scale)
    (args.out / "monitors_synthetic.csv").write_text(text, encoding="utf-8")
    # fit against the file as written (rounded values), i.e. what users load
    curve = median_response(_parse_dataset(text, "monitors_synthetic.csv"))
    gamma, amps = fit_driven_profile(combined_response(curve, 60.0))
    (args.out / "driven_profile.csv").write_text(profile_csv(gamma, amps), encoding="utf-8")
    print(f"corner_scale={scale:.6f} gamma={gamma:.6f}")


if __name__ == "__main__":
    main()
