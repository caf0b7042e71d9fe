"""Tuple spec files for the ``pet`` subcommands.

    [tuple]
    d = 2
    ell = 2
    K = 3
    generators = logN, pi

    [lower_order]
    # iterate.power = vector entries
    1.1 = 1/2, logN
    2.0 = pi, 0

    [leading]          # optional; default e_j
    1 = 1, 0
"""
from __future__ import annotations

import configparser

from ..errors import ConfigError, ParseError
from ..pet import PetTuple, make_tuple

_TUPLE_KEYS = {"d", "ell", "K", "generators"}


def parse_tuple_spec(text: str):
    """Returns (make_tuple kwargs, PetTuple)."""
    cp = configparser.ConfigParser(interpolation=None, default_section="\0",
                                   inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed tuple spec: {exc}") from exc
    unknown = set(cp.sections()) - {"tuple", "lower_order", "leading"}
    if unknown:
        raise ConfigError(f"unknown sections {sorted(unknown)}")
    if "tuple" not in cp:
        raise ConfigError("tuple spec needs a [tuple] section")
    sec = cp["tuple"]
    bad = set(sec) - _TUPLE_KEYS
    if bad:
        raise ConfigError(f"unknown keys {sorted(bad)} in [tuple]")
    try:
        d, ell, K = int(sec.get("d", "1")), int(sec.get("ell", "1")), int(sec.get("K", "2"))
    except ValueError as exc:
        raise ConfigError(f"d, ell and K must be integers: {exc}") from exc
    gens = tuple(g.strip() for g in sec.get("generators", "").split(",") if g.strip())
    lower: dict = {}
    for key, raw in (cp["lower_order"].items() if "lower_order" in cp else ()):
        try:
            j, v = (int(x) for x in key.split("."))
        except ValueError as exc:
            raise ConfigError(f"lower_order key {key!r} is not 'iterate.power'") from exc
        lower.setdefault(j, {})[v] = _vector(raw, d, key)
    leading = None
    if "leading" in cp:
        rows = {int(k): _vector(raw, d, k) for k, raw in cp["leading"].items()}
        if sorted(rows) != list(range(1, ell + 1)):
            raise ConfigError("[leading] must list every iterate 1..ell")
        leading = [rows[j] for j in range(1, ell + 1)]
    kwargs = dict(d=d, ell=ell, K=K, lower_order=lower, leading=leading, generators=gens)
    try:
        return kwargs, make_tuple(**kwargs)
    except (ValueError, ParseError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid tuple spec: {exc}") from exc


def _vector(raw: str, d: int, key) -> list:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != d:
        raise ConfigError(f"entry {key!r} has {len(parts)} coordinates, expected {d}")
    return parts


def load_tuple_spec(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_tuple_spec(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read tuple spec {path}: {exc}") from exc
