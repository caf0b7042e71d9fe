"""Strict INI experiment configs.

Every key has a default; unknown sections or keys are rejected.  Lists are
comma separated, and the alpha table uses ';' between rows.
"""
from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from typing import Optional

from ..errors import ConfigError

MODES = ("hardy", "case1", "case2", "case3")
FORMATS = ("json", "csv", "text")


def _ints(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    out = []
    for part in text.split(","):
        part = part.strip().replace("_", "")
        if "e" in part.lower():
            mant, exp = part.lower().split("e")
            value = int(mant) * 10 ** int(exp)
        else:
            value = int(part)
        out.append(value)
    return tuple(out)


def _strs(text: str) -> tuple:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _rows(text: str) -> tuple:
    return tuple(tuple(c.strip() for c in row.split(",")) for row in text.split(";") if row.strip())


def _opt_int(text: str) -> Optional[int]:
    text = text.strip()
    return int(text) if text else None


def _show(value) -> str:
    if value is None:
        return ""
    if isinstance(value, tuple):
        if value and isinstance(value[0], tuple):
            return "; ".join(", ".join(r) for r in value)
        return ", ".join(str(v) for v in value)
    return str(value)


# section -> key -> (parser, default)
SCHEMA = {
    "function": {
        "s_part": (str, "x*log(x)"),
        "p_part": (str, "pi*x"),
        "e_part": (str, ""),
        "t_part": (str, ""),
        "mode": (str, "hardy"),
        "deg_s": (_opt_int, None),
    },
    "system": {"alpha": (_rows, (("sqrt(2)",), ("sqrt(3)",)))},
    "schedule": {
        "N": (_ints, (1000, 10000, 100000)),
        "verify_N": (_ints, (10000, 100000, 1000000)),
    },
    "cutoffs": {
        "char_cutoff": (int, 5),
        "product_cutoff": (int, 5),
        "samples": (int, 2000),
        "cov_samples": (int, 200),
    },
    "thresholds": {"threshold": (float, 0.05)},
    "precision": {"bits": (int, 256)},
    "pet": {"D": (int, 2), "max_iterates": (int, 4096)},
    "output": {"dir": (str, "out"), "formats": (_strs, FORMATS)},
    "run": {"seed": (int, 0), "threads": (int, 1)},
}


@dataclass(frozen=True)
class ExperimentConfig:
    values: dict = field(default_factory=dict)  # (section, key) -> parsed value

    def __getitem__(self, item):
        return self.values[item]

    def get(self, section: str, key: str):
        return self.values[(section, key)]

    def replace(self, **changes) -> "ExperimentConfig":
        """replace(section__key=value) with already-parsed values."""
        vals = dict(self.values)
        for name, v in changes.items():
            sec, key = name.split("__", 1)
            if (sec, key) not in vals:
                raise ConfigError(f"unknown config field {sec}.{key}")
            vals[(sec, key)] = v
        cfg = ExperimentConfig(vals)
        cfg.validate()
        return cfg

    def validate(self):
        mode = self.get("function", "mode")
        if mode not in MODES:
            raise ConfigError(f"function.mode must be one of {MODES}, got {mode!r}")
        if mode in ("case1", "case2") and not self.get("function", "t_part"):
            raise ConfigError(f"mode {mode} needs function.t_part")
        alpha = self.get("system", "alpha")
        if not alpha or len({len(r) for r in alpha}) != 1:
            raise ConfigError("system.alpha must be a nonempty rectangular table")
        for sec, key in (("cutoffs", "char_cutoff"), ("cutoffs", "product_cutoff"),
                         ("cutoffs", "samples"), ("precision", "bits"), ("pet", "D"),
                         ("run", "threads")):
            if self.get(sec, key) < 1:
                raise ConfigError(f"{sec}.{key} must be >= 1")
        if any(n < 1 for n in self.get("schedule", "N") + self.get("schedule", "verify_N")):
            raise ConfigError("schedule entries must be positive")
        bad = set(self.get("output", "formats")) - set(FORMATS)
        if bad:
            raise ConfigError(f"unknown output formats {sorted(bad)}")

    def to_ini(self) -> str:
        lines = []
        for sec, keys in SCHEMA.items():
            lines.append(f"[{sec}]")
            for key in keys:
                lines.append(f"{key} = {_show(self.get(sec, key))}")
            lines.append("")
        return "\n".join(lines)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.to_ini().encode()).hexdigest()[:16]

    def to_json(self) -> dict:
        return {sec: {key: _jsonable(self.get(sec, key)) for key in keys}
                for sec, keys in SCHEMA.items()}


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


def default_config() -> ExperimentConfig:
    return ExperimentConfig({(s, k): d for s, keys in SCHEMA.items() for k, (_, d) in keys.items()})


def parse_config(text: str) -> ExperimentConfig:
    # ';' separates alpha rows, so only '#' starts an inline comment
    cp = configparser.ConfigParser(interpolation=None, default_section="\0",
                                   inline_comment_prefixes=("#",))
    cp.optionxform = str  # keys are case sensitive (N, D)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    vals = dict(default_config().values)
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        for key, raw in cp.items(sec):
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key {key!r} in [{sec}]")
            parser = SCHEMA[sec][key][0]
            try:
                vals[(sec, key)] = parser(raw)
            except ValueError as exc:
                raise ConfigError(f"{sec}.{key}: cannot parse {raw!r}") from exc
    cfg = ExperimentConfig(vals)
    cfg.validate()
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
