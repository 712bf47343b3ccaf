"""Command-line front end: ``basstune <command> [options]``.

Every command can print a human-readable table (default), JSON
(``--json [PATH]``) or CSV (``--csv [PATH]``). Without PATH, or with ``-``,
the data goes to stdout. JSON documents carry ``schema_version`` and keep
a fixed key order, so identical inputs give byte-identical output.

Exit status: 0 on success, 2 for invalid input or usage, 1 for internal
errors. Nothing is written to the data stream when a command fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, perception
from .advisor import combined_response, recommend_key, stability_report, transposition_loss
from .config import load_config
from .corpus import DEFAULT_BANDS, CorpusManifest, evolution
from .errors import BasstuneError, DatasetError
from .monitors import (SYNTHETIC_DATASET, load_bundled_dataset, load_speaker_dataset,
                       median_response, speaker_gain_delta)
from .signalcore import (SpectralProfile, note_of_frequency, parse_note, read_wav, stft,
                         write_wav)
from .voicemodel import REFERENCE_FUNDAMENTAL, VoiceParams, reference_driven_profile, synth_voice

SCHEMA_VERSION = 1
PROG = "basstune"

log = logging.getLogger(PROG)


@dataclass
class Report:
    payload: dict
    header: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    text: str = ""


# -- output ------------------------------------------------------------------

def _clean(obj):
    """Plain JSON types; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, Path):
        return str(obj)
    return obj


def render_json(command: str, payload: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "command": command}
    doc.update(payload)
    return json.dumps(_clean(doc), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                    for v in row])
    return buf.getvalue()


def _table(header, rows) -> str:
    def cell(v):
        if v is None:
            return "-"
        if isinstance(v, (float, np.floating)):
            return f"{v:.3f}"
        return str(v)
    cells = [[str(h) for h in header]] + [[cell(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) + "\n" for r in cells)


def _emit(text: str, dest: str):
    if dest == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(dest).write_text(text, encoding="utf-8")


# -- helpers -----------------------------------------------------------------

def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _load_speakers(args, cfg):
    path = getattr(args, "dataset", None) or cfg.monitors
    if path:
        return load_speaker_dataset(path), str(path)
    return load_bundled_dataset(), f"bundled:{SYNTHETIC_DATASET}"


def _load_profile(name, f0):
    if name == "driven":
        return reference_driven_profile().at_fundamental(f0)
    if name == "sine":
        return SpectralProfile.sine(f0)
    path = Path(name)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DatasetError(f"profile {name!r}: not 'driven', 'sine' or a readable file "
                           f"({exc.strerror or exc})") from None
    amps = {}
    rows = csv.reader(ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#"))
    for i, row in enumerate(rows):
        if i == 0 and row and row[0].strip() == "harmonic":
            continue
        try:
            amps[int(row[0])] = float(row[1])
        except (ValueError, IndexError):
            raise DatasetError(f"profile {name}: bad row {row!r}; expected harmonic,amplitude") from None
    if not amps:
        raise DatasetError(f"profile {name}: no partials")
    return SpectralProfile(tuple((k, k * f0, a) for k, a in sorted(amps.items())))


def _profile_payload(name, profile):
    return {"name": name, "fundamental_hz": profile.fundamental,
            "harmonics": profile.harmonics, "amplitudes": profile.amplitudes}


def _phon(args, cfg):
    return cfg.phon if args.phon is None else args.phon


def _note_label(f, reference):
    n = note_of_frequency(f, reference)
    return f"{n.name}{n.cents_offset:+.1f}c"


# -- commands ----------------------------------------------------------------

def cmd_synth(args, cfg) -> Report:
    p = VoiceParams(f0_end=args.f0, sweep_semitones=args.sweep, sweep_duration=args.sweep_duration,
                    amp_decay_time=args.decay, drive=args.drive, duration=args.duration,
                    sample_rate=args.sample_rate)
    clip = synth_voice(p)
    write_wav(args.output, clip, args.bits)
    params = {"f0_end_hz": p.f0_end, "sweep_semitones": p.sweep_semitones,
              "sweep_duration_s": p.sweep_duration, "amp_decay_time_s": p.amp_decay_time,
              "drive": p.drive, "duration_s": p.duration, "sample_rate": p.sample_rate}
    payload = {"output": args.output, "format": args.bits, "params": params,
               "f0_start_hz": p.f0_start, "samples": clip.samples.size, "peak": clip.peak()}
    header = ["parameter", "value"]
    rows = [[k, v] for k, v in params.items()] + [["f0_start_hz", p.f0_start], ["peak", clip.peak()]]
    text = f"wrote {args.output} ({p.duration:g} s, {p.sample_rate} Hz, {args.bits})\n"
    return Report(payload, header, rows, text)


def cmd_analyze(args, cfg) -> Report:
    band = tuple(args.band)
    clips = [(path, read_wav(path)) for path in args.files]
    files, good = [], []
    for path, clip in clips:
        entry = {"path": path, "sample_rate": clip.sample_rate, "duration_s": clip.duration,
                 "error": None}
        try:
            track = analysis.estimate_f0_track(clip, window=args.window, search_band=band)
        except BasstuneError as exc:
            entry["error"] = str(exc)
            files.append(entry)
            continue
        good.append(clip)
        f0 = analysis.steady_f0(track)
        try:
            sweep = analysis.sweep_range(analysis.instantaneous_f0_track(
                clip, search_band=band, reference_f0=f0))
        except BasstuneError as exc:
            log.warning("%s: sweep not measured: %s", path, exc)
            sweep = None
        n_h = max(1, min(args.harmonics, int((clip.sample_rate / 2 - 1) / f0)))
        spec = stft(clip, cfg.stft_window, cfg.stft_hop)
        partials = analysis.track_partials(spec, f0, n_h)
        entry.update({
            "steady_f0_hz": f0,
            "note": _note_label(f0, cfg.reference_hz),
            "sweep_semitones": sweep,
            "f0_track": {"time_s": track.times, "f0_hz": track.f0, "energy": track.energy},
            "partials": [{"harmonic": p.harmonic_index, "stop_time_s": p.stop_time,
                          "time_s": p.times, "frequency_hz": p.frequencies,
                          "magnitude": p.magnitudes} for p in partials],
        })
        files.append(entry)
    if not good:
        raise BasstuneError("no fundamental detected in any input: "
                            + "; ".join(f"{e['path']}: {e['error']}" for e in files))
    hist = analysis.f0_distribution(good, band=band, window=args.window)
    payload = {
        "settings": {"search_band_hz": band, "window_s": args.window, "harmonics": args.harmonics,
                     "stft_window": cfg.stft_window, "stft_hop": cfg.stft_hop},
        "files": files,
        "histogram": {"bin_edges_hz": hist.bin_edges, "masses": hist.masses,
                      "mode_hz": hist.mode_frequency, "secondary_modes_hz": hist.secondary_modes},
    }
    ok = [e for e in files if e["error"] is None]
    if args.table == "f0":
        header = ["file", "time_s", "f0_hz", "energy"]
        rows = [[e["path"], t, f, en] for e in ok
                for t, f, en in zip(*(e["f0_track"][k] for k in ("time_s", "f0_hz", "energy")))]
    elif args.table == "partials":
        header = ["file", "harmonic", "time_s", "frequency_hz", "magnitude"]
        rows = [[e["path"], p["harmonic"], t, f, m] for e in ok for p in e["partials"]
                for t, f, m in zip(p["time_s"], p["frequency_hz"], p["magnitude"])]
    elif args.table == "histogram":
        header = ["bin_low_hz", "bin_high_hz", "mass"]
        rows = [[lo, hi, m] for lo, hi, m in zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.masses)]
    else:
        header = ["file", "steady_f0_hz", "note", "sweep_semitones"] + [
            f"stop_h{k}_s" for k in range(1, args.harmonics + 1)]
        rows = []
        for e in files:
            stops = [p["stop_time_s"] for p in e.get("partials", [])]
            stops += [None] * (args.harmonics - len(stops))
            rows.append([e["path"], e.get("steady_f0_hz"), e.get("note"), e.get("sweep_semitones")]
                        + stops)
    lines = []
    for e in files:
        if e["error"] is not None:
            lines.append(f"{e['path']}: {e['error']}")
            continue
        sw = "-" if e["sweep_semitones"] is None else f"{e['sweep_semitones']:.2f} st"
        stops = ", ".join(f"h{p['harmonic']} {p['stop_time_s']:.2f} s" for p in e["partials"])
        lines.append(f"{e['path']}: f0 {e['steady_f0_hz']:.2f} Hz ({e['note']}), sweep {sw}; "
                     f"partials stop at {stops}")
    sec = ", ".join(f"{f:.2f}" for f in hist.secondary_modes) or "none"
    lines.append(f"f0 distribution: mode {hist.mode_frequency:.2f} Hz; secondary maxima: {sec}")
    return Report(payload, header, rows, "\n".join(lines) + "\n")


def cmd_contour(args, cfg) -> Report:
    levels = args.phon if args.phon else [cfg.phon]
    contours = []
    for level in levels:
        f, spl = perception.contour(level, args.grid)
        contours.append({"phon": perception.check_phon(level), "frequency_hz": f, "spl_db": spl})
    header = ["phon", "frequency_hz", "spl_db"]
    rows = [[c["phon"], f, s] for c in contours for f, s in zip(c["frequency_hz"], c["spl_db"])]
    return Report({"model": "ISO 226:2003", "contours": contours}, header, rows,
                  _table(header, rows))


def cmd_monitors(args, cfg) -> Report:
    speakers, source = _load_speakers(args, cfg)
    curve = median_response(speakers, smooth_octaves=args.smooth)
    delta = speaker_gain_delta(curve, args.f_from, args.f_to)
    raw = speaker_gain_delta(curve.unsmoothed(), args.f_from, args.f_to)
    payload = {
        "dataset": source, "speakers": len(speakers), "smooth_octaves": args.smooth,
        "band_hz": curve.band,
        "delta": {"from_hz": args.f_from, "to_hz": args.f_to, "smoothed_db": delta, "raw_db": raw},
        "curve": {"frequency_hz": curve.frequencies, "median_db": curve.gains,
                  "raw_median_db": curve.raw_median, "p25_db": curve.p25, "p75_db": curve.p75},
    }
    header = ["frequency_hz", "median_db", "raw_median_db"]
    cols = [curve.frequencies, curve.gains, curve.raw_median]
    if args.percentiles:
        header += ["p25_db", "p75_db"]
        cols += [curve.p25, curve.p75]
    rows = [list(r) for r in zip(*cols)]
    text = (f"{len(speakers)} speakers from {source}; band {curve.band[0]:g}-{curve.band[1]:g} Hz\n"
            f"median gain change {args.f_from:g} -> {args.f_to:g} Hz: {delta:+.2f} dB "
            f"(unsmoothed {raw:+.2f} dB)\n")
    return Report(payload, header, rows, text)


def cmd_loss(args, cfg) -> Report:
    speakers, source = _load_speakers(args, cfg)
    phon = None if args.no_ear else perception.check_phon(_phon(args, cfg))
    curve = combined_response(median_response(speakers), phon)
    profile = _load_profile(args.profile, args.f0)
    rep = transposition_loss(profile, args.semitones, curve)
    parts = [{"harmonic": p.harmonic_index, "from_hz": p.f_from, "to_hz": p.f_to,
              "delta_db": p.delta_db, "region": p.region} for p in rep.per_partial]
    f0, f1 = profile.fundamental, profile.fundamental * 2.0 ** (args.semitones / 12.0)
    payload = {
        "dataset": source, "phon": phon, "semitones": rep.semitones,
        "profile": _profile_payload(args.profile, profile),
        "total_db": rep.total_power_delta_db,
        "fundamental_delta_db": rep.fundamental_delta_db,
        "fundamental_components_db": {
            "speaker": speaker_gain_delta(curve.speaker, f0, f1),
            "ear": None if phon is None else perception.ear_gain_delta(f0, f1, phon)},
        "partials": parts,
    }
    if args.curve:
        lo, hi = curve.band
        fr = curve.speaker.frequencies
        fr = fr[(fr >= lo) & (fr <= hi)]
        ear = (perception.relative_sensitivity(fr, phon) if phon is not None
               else np.zeros_like(fr))
        payload["combined_curve"] = {"frequency_hz": fr, "speaker_db": curve.speaker.at(fr),
                                     "ear_db": ear, "combined_db": curve.gain(fr)}
    header = ["harmonic", "from_hz", "to_hz", "delta_db", "region"]
    rows = [[p["harmonic"], p["from_hz"], p["to_hz"], p["delta_db"], p["region"]] for p in parts]
    text = (_table(header, rows)
            + f"total power change: {rep.total_power_delta_db:+.2f} dB "
              f"(fundamental alone {rep.fundamental_delta_db:+.2f} dB)\n")
    return Report(payload, header, rows, text)


def cmd_advise(args, cfg) -> Report:
    speakers, source = _load_speakers(args, cfg)
    phon = perception.check_phon(_phon(args, cfg))
    curve = combined_response(median_response(speakers), phon)
    key = parse_note(args.key)
    if args.sample:
        clip = read_wav(args.sample)
        f0 = analysis.steady_f0(analysis.estimate_f0_track(clip))
        name = args.profile or "sample"
        profile = (analysis.harmonic_profile(clip, f0=f0) if name == "sample"
                   else _load_profile(name, f0))
    else:
        f0 = REFERENCE_FUNDAMENTAL if args.f0 is None else args.f0
        name = args.profile or "driven"
        profile = _load_profile(name, f0)
    ref = cfg.reference_hz
    cands = recommend_key(key, f0, curve, tuple(args.range), profile, ref)
    base = next((c for c in cands if c.song_transposition == 0), None)
    base_gain = base.total_gain_db if base is not None and base.feasible else None
    out = []
    for c in cands:
        rel = (c.total_gain_db - base_gain
               if c.feasible and base_gain is not None else None)
        out.append({"song_transposition": c.song_transposition, "note": c.note.name,
                    "frequency_hz": c.frequency, "sample_shift_semitones": c.sample_shift,
                    "total_gain_db": c.total_gain_db, "gain_vs_baseline_db": rel,
                    "feasible": c.feasible, "reason": c.reason})
    payload = {"dataset": source, "phon": phon, "key": key.name, "sample": args.sample,
               "sample_f0_hz": f0, "sample_note": _note_label(f0, ref),
               "profile": _profile_payload(name, profile), "candidates": out}
    if args.sequence:
        notes = [parse_note(n) for n in args.sequence.split(",") if n.strip()]
        shape = profile.at_fundamental(f0)
        st = stability_report(notes, shape, curve, ref)
        payload["stability"] = {"notes": [n.name for n in st.notes], "gains_db": st.gains_db,
                                "spread_db": st.spread_db}
    header = ["transpose", "note", "frequency_hz", "shift_st", "gain_db", "vs_s0_db"]
    rows = [[c["song_transposition"], c["note"], c["frequency_hz"], c["sample_shift_semitones"],
             c["total_gain_db"], c["gain_vs_baseline_db"]] for c in out]
    best = out[0]
    text = _table(header, rows)
    if best["feasible"]:
        text += (f"best: transpose the song by {best['song_transposition']:+d} semitones "
                 f"(808 on {best['note']})\n")
    if "stability" in payload:
        s = payload["stability"]
        text += "level across sequence: " + ", ".join(
            f"{n} {g:+.2f} dB" for n, g in zip(s["notes"], s["gains_db"])) + \
            f"; spread {s['spread_db']:.2f} dB\n"
    return Report(payload, header, rows, text)


def _parse_bands(text):
    if text == "default":
        return DEFAULT_BANDS
    bands = []
    for part in text.split(","):
        try:
            lo, hi = part.split("-")
            bands.append((float(lo), None if hi.strip().lower() == "nyquist" else float(hi)))
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"bands must look like '20-80,80-320,320-nyquist', got {text!r}") from None
    return tuple(bands)


def cmd_corpus(args, cfg) -> Report:
    manifest = CorpusManifest.load(args.manifest)
    m = evolution(manifest, args.bands, normalize=args.normalize,
                  equalize_rms=not args.no_equalize, workers=args.workers)
    payload = {"manifest": args.manifest, "bands_hz": m.bands, "normalized": m.normalized,
               "equalize_rms": not args.no_equalize, "years": m.years,
               "track_counts": m.track_counts, "values": m.values,
               "skipped": [{"path": p, "reason": r} for p, r in m.skipped]}
    names = [f"{lo:g}-{'nyquist' if hi is None else format(hi, 'g')}" for lo, hi in m.bands]
    header = ["year", "tracks"] + names
    rows = [[y, n] + v for y, n, v in m.rows()]
    text = _table(header, rows)
    if m.skipped:
        text += f"skipped {len(m.skipped)} unreadable file(s)\n"
    return Report(payload, header, rows, text)


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file (default: $BASSTUNE_CONFIG)")
    out = common.add_mutually_exclusive_group()
    out.add_argument("--json", nargs="?", const="-", metavar="PATH",
                     help="write JSON to PATH (stdout if omitted)")
    out.add_argument("--csv", nargs="?", const="-", metavar="PATH",
                     help="write CSV to PATH (stdout if omitted)")

    ap = argparse.ArgumentParser(prog=PROG, description=(
        "Estimate how transposing a sub-bass drum voice changes its perceived level "
        "on near-field monitors, and whether to move the song key instead."))
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("synth", parents=[common], help="synthesize a bass-drum voice to WAV")
    p.add_argument("output", help="WAV file to write")
    p.add_argument("--f0", type=float, default=REFERENCE_FUNDAMENTAL, help="steady f0 in Hz")
    p.add_argument("--sweep", type=float, default=1.0, help="initial pitch sweep in semitones")
    p.add_argument("--sweep-duration", type=float, default=0.4, help="sweep length in seconds")
    p.add_argument("--decay", type=float, default=2.0, help="time to decay by 60 dB, seconds")
    p.add_argument("--drive", type=float, default=0.0, help="saturation amount (0 = clean)")
    p.add_argument("--duration", type=float, default=3.0)
    p.add_argument("--sample-rate", type=int, default=44100)
    p.add_argument("--bits", choices=("float32", "int16", "int24"), default="float32")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("analyze", parents=[common], help="f0 track, partials, sweep and f0 histogram")
    p.add_argument("files", nargs="+", help="WAV files")
    p.add_argument("--band", type=float, nargs=2, default=list(analysis.DEFAULT_BAND),
                   metavar=("LO", "HI"), help="f0 search band in Hz")
    p.add_argument("--window", type=float, default=analysis.DEFAULT_WINDOW_S, help="f0 window, s")
    p.add_argument("--harmonics", type=int, default=5)
    p.add_argument("--table", choices=("summary", "f0", "partials", "histogram"), default="summary",
                   help="which table --csv writes")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("contour", parents=[common], help="equal-loudness contours (dB SPL)")
    p.add_argument("--phon", type=float, nargs="+", help="loudness level(s) in phon")
    p.add_argument("--grid", type=_float_list, help="comma-separated frequencies in Hz")
    p.set_defaults(func=cmd_contour)

    p = sub.add_parser("monitors", parents=[common], help="median near-field monitor response")
    p.add_argument("--dataset", "--data", "--monitors", dest="dataset",
                   help="speaker,frequency_hz,gain_db CSV (default: bundled)")
    p.add_argument("--percentiles", action="store_true",
                   help="add 25th/75th percentile columns to table and CSV output")
    p.add_argument("--smooth", type=float, default=1 / 3, help="smoothing width in octaves")
    p.add_argument("--from", dest="f_from", type=float, default=REFERENCE_FUNDAMENTAL)
    p.add_argument("--to", dest="f_to", type=float, default=37.06)
    p.set_defaults(func=cmd_monitors)

    p = sub.add_parser("loss", parents=[common], help="level change of a transposed voice")
    p.add_argument("--semitones", type=float, required=True)
    p.add_argument("--profile", default="driven", help="driven, sine, or a harmonic,amplitude CSV")
    p.add_argument("--f0", type=float, default=REFERENCE_FUNDAMENTAL, help="sample f0 in Hz")
    p.add_argument("--phon", type=float)
    p.add_argument("--no-ear", action="store_true", help="speaker response only")
    p.add_argument("--dataset", "--monitors", dest="dataset",
                   help="speaker dataset CSV (default: bundled)")
    p.add_argument("--curve", action="store_true", help="include the combined response curve")
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("advise", parents=[common], help="rank song-key transpositions")
    p.add_argument("--key", required=True, help="song key root, e.g. D or F#")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--f0", type=float, help=f"sample f0 in Hz (default {REFERENCE_FUNDAMENTAL})")
    src.add_argument("--sample", help="WAV of the 808 sample; its f0 and partials are measured")
    p.add_argument("--range", type=int, nargs=2, default=[-6, 6], metavar=("LO", "HI"))
    p.add_argument("--profile", help="driven, sine, or a harmonic,amplitude CSV "
                                     "(default: measured from --sample, else driven)")
    p.add_argument("--phon", type=float)
    p.add_argument("--dataset", "--monitors", dest="dataset",
                   help="speaker dataset CSV (default: bundled)")
    p.add_argument("--sequence", help="comma-separated notes for a level-stability report")
    p.set_defaults(func=cmd_advise)

    p = sub.add_parser("corpus", parents=[common], help="band power evolution by release year")
    p.add_argument("--manifest", required=True, help="CSV of path,year")
    p.add_argument("--bands", type=_parse_bands, default=DEFAULT_BANDS,
                   help="'default' or e.g. '20-80,80-320,320-nyquist'")
    p.add_argument("--normalize", action="store_true", help="divide each band by its mean")
    p.add_argument("--no-equalize", action="store_true", help="skip per-track RMS equalization")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.WARNING, format=f"{PROG}: %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config)
        report = args.func(args, cfg)
        if args.json is not None:
            _emit(render_json(args.command, report.payload), args.json)
        elif args.csv is not None:
            _emit(render_csv(report.header, report.rows), args.csv)
        elif cfg.format == "json":
            _emit(render_json(args.command, report.payload), "-")
        elif cfg.format == "csv":
            _emit(render_csv(report.header, report.rows), "-")
        else:
            _emit(report.text, "-")
    except (BasstuneError, OSError) as exc:
        print(f"{PROG} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error: %s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
