"""Run-time defaults for the command line.

The config file is flat ``key = value`` text (``#`` comments allowed)::

    phon = 60
    reference_hz = 440
    stft_window = 8192
    stft_hop = 2048
    monitors = /path/to/speakers.csv
    format = json

Its path comes from ``--config`` or the ``BASSTUNE_CONFIG`` environment
variable. Command-line flags override file values.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import perception
from .errors import BasstuneError

ENV_VAR = "BASSTUNE_CONFIG"
FORMATS = ("text", "json", "csv")


class ConfigError(BasstuneError):
    pass


@dataclass(frozen=True)
class RunConfig:
    phon: float = perception.DEFAULT_PHON
    reference_hz: float = 440.0
    stft_window: int = 8192
    stft_hop: int = 2048
    monitors: str | None = None
    format: str = "text"

    def __post_init__(self):
        try:
            perception.check_phon(self.phon)
        except BasstuneError as exc:
            raise ConfigError(f"phon: {exc}") from None
        if not 0 < self.reference_hz < 1e5:
            raise ConfigError(f"reference_hz must be a positive frequency, got {self.reference_hz}")
        if self.stft_window < 16:
            raise ConfigError(f"stft_window must be >= 16 samples, got {self.stft_window}")
        if not 1 <= self.stft_hop <= self.stft_window:
            raise ConfigError(f"stft_hop must lie in [1, stft_window], got {self.stft_hop}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got {self.format!r}")


_TYPES = {"phon": float, "reference_hz": float, "stft_window": int, "stft_hop": int,
          "monitors": str, "format": str}


def parse_config(text: str, origin: str = "<config>", base: Path | None = None) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        parser.read_string("[basstune]\n" + text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"{origin}: {exc}") from None
    values = {}
    for key, raw in parser["basstune"].items():
        if key not in _TYPES:
            known = ", ".join(f.name for f in fields(RunConfig))
            raise ConfigError(f"{origin}: unknown key {key!r} (known: {known})")
        try:
            values[key] = _TYPES[key](raw.strip())
        except ValueError:
            raise ConfigError(f"{origin}: {key} = {raw!r} is not a valid {_TYPES[key].__name__}") from None
    if "monitors" in values and base is not None and not Path(values["monitors"]).is_absolute():
        values["monitors"] = str(base / values["monitors"])
    return replace(RunConfig(), **values) if values else RunConfig()


def load_config(path=None, environ=None) -> RunConfig:
    """Defaults, overlaid with the file named by ``path`` or ``$BASSTUNE_CONFIG``."""
    environ = os.environ if environ is None else environ
    if path is None:
        path = environ.get(ENV_VAR) or None
    if path is None:
        return RunConfig()
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config file {p}: {exc.strerror or exc}") from None
    return parse_config(text, str(p), p.resolve().parent)
