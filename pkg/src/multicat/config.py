"""Experiment configuration: flat ``namespace.key = value`` text files.

Example::

    # long-run sweep over coupling and register size
    mode = fig2
    protocol.phi = 0.5
    sweep.alpha = [0.01, 0.03, 0.05]

Values are Python/JSON literals; bare words are read as strings.
"""

from __future__ import annotations

import ast
import os
from dataclasses import dataclass, field
from typing import Any, Callable

from .constants import Caps

MODES = ("sample", "avg-qfi-exact", "avg-qfi-mc", "brute", "master-eq", "fig2", "fig3", "couplings")
OUT_ENV = "MULTICAT_OUT"


@dataclass(frozen=True)
class Key:
    kind: Callable[[Any], Any]
    check: Callable[[Any], bool] | None = None
    hint: str = ""


def _int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError("expected an integer")
    return v


def _float(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError("expected a number")
    return float(v)


def _str(v):
    return str(v)


def _floats(v):
    if not isinstance(v, (list, tuple)):
        raise TypeError("expected a list of numbers")
    return [_float(x) for x in v]


def _ints(v):
    if not isinstance(v, (list, tuple)):
        raise TypeError("expected a list of integers")
    return [_int(x) for x in v]


def _nonneg(x):
    return x >= 0


def _pos(x):
    return x > 0


def _nonempty(x):
    return len(x) > 0


KEYS: dict[str, Key] = {
    "mode": Key(_str, lambda m: m in MODES, f"one of {', '.join(MODES)}"),
    "seed": Key(_int, _nonneg, "non-negative"),
    "representation": Key(_str, lambda r: r in ("auto", "full", "dicke"), "auto, full or dicke"),
    "output.dir": Key(_str),
    "output.name": Key(_str, _nonempty, "non-empty"),
    "protocol.M": Key(_int, lambda m: m >= 1, ">= 1"),
    "protocol.n": Key(_int, _nonneg, ">= 0"),
    "protocol.phi": Key(_float),
    "protocol.alpha": Key(_float),
    "protocol.couplings": Key(_floats, _nonempty, "non-empty"),
    "disorder.mean": Key(_float),
    "disorder.sigma": Key(_float, _nonneg, ">= 0"),
    "disorder.realizations": Key(_int, _pos, ">= 1"),
    "sample.count": Key(_int, _pos, ">= 1"),
    "mc.samples": Key(_int, lambda s: s >= 2, ">= 2"),
    "master.dt": Key(_float, _pos, "> 0"),
    "master.steps": Key(lambda v: v if v == "auto" else _int(v), lambda s: s == "auto" or s >= 1, "'auto' or >= 1"),
    "master.record_every": Key(_int, _pos, ">= 1"),
    "master.collective": Key(_str, lambda c: c in ("x", "z"), "x or z"),
    "sweep.alpha": Key(_floats, _nonempty, "non-empty"),
    "sweep.M": Key(_ints, lambda v: len(v) > 0 and min(v) >= 1, "non-empty, entries >= 1"),
    "sweep.sigma": Key(_floats, lambda v: len(v) > 0 and min(v) >= 0, "non-empty, entries >= 0"),
    "geometry.file": Key(_str),
    "geometry.ring_count": Key(_int, _pos, ">= 1"),
    "geometry.ring_radius_nm": Key(_float, _pos, "> 0"),
    "geometry.ring_height_nm": Key(_float),
    "geometry.tau_cycle": Key(_float, _pos, "> 0"),
}
for _name in Caps.__dataclass_fields__:
    KEYS[f"caps.{_name}"] = Key(_int, _pos, ">= 1")

PROTOCOL_MODES = ("sample", "avg-qfi-exact", "avg-qfi-mc", "brute", "master-eq")

MODE_DEFAULTS: dict[str, dict[str, Any]] = {
    "sample": {"sample.count": 1},
    "avg-qfi-exact": {},
    "avg-qfi-mc": {"mc.samples": 1000},
    "brute": {},
    "master-eq": {"disorder.sigma": 0.0, "master.dt": 1.0, "master.steps": "auto",
                  "master.record_every": 1, "master.collective": "x"},
    "fig2": {"protocol.phi": 0.5, "protocol.n": 5000, "sweep.alpha": [0.01, 0.03, 0.05],
             "sweep.M": list(range(2, 11))},
    "fig3": {"protocol.M": 4, "protocol.phi": 0.5, "protocol.n": 500, "disorder.mean": 0.05,
             "sweep.sigma": [0.002, 0.007, 0.008, 0.009], "disorder.realizations": 50},
    "couplings": {},
}
REQUIRED: dict[str, tuple[str, ...]] = {
    **{m: ("protocol.M", "protocol.n", "protocol.phi") for m in PROTOCOL_MODES},
    "fig2": (), "fig3": (), "couplings": ("geometry.tau_cycle",),
}


@dataclass
class ExperimentConfig:
    mode: str
    settings: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, key):
        return self.settings[key]

    def get(self, key, default=None):
        return self.settings.get(key, default)

    @property
    def seed(self) -> int:
        return self.settings["seed"]

    def to_dict(self) -> dict[str, Any]:
        return dict(sorted(self.settings.items()))


def _parse_value(text: str):
    text = text.strip()
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def parse_lines(text: str) -> tuple[dict[str, tuple[int, Any]], list[str]]:
    """Raw ``key -> (line, value)`` mapping plus syntax diagnostics."""
    raw, diags = {}, []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            diags.append(f"line {lineno}: expected 'key = value', got {body!r}")
            continue
        key, value = (p.strip() for p in body.split("=", 1))
        if key in raw:
            diags.append(f"line {lineno}: {key}: duplicate key (first set on line {raw[key][0]})")
            continue
        raw[key] = (lineno, _parse_value(value))
    return raw, diags


def validate_config(text: str) -> tuple[ExperimentConfig | None, list[str]]:
    """Resolve a config text into an :class:`ExperimentConfig`.

    Returns ``(config, [])`` with every default filled in, or ``(None, diagnostics)``.
    Never raises for bad input.
    """
    raw, diags = parse_lines(text)
    values: dict[str, Any] = {}
    for key, (lineno, value) in raw.items():
        spec = KEYS.get(key)
        if spec is None:
            diags.append(f"line {lineno}: {key}: unknown key")
            continue
        try:
            v = spec.kind(value)
        except (TypeError, ValueError) as exc:
            diags.append(f"line {lineno}: {key}: {exc}, got {value!r}")
            continue
        if spec.check is not None and not spec.check(v):
            diags.append(f"line {lineno}: {key}: must be {spec.hint}, got {value!r}")
            continue
        values[key] = v

    mode = values.get("mode")
    if mode is None:
        if "mode" not in raw:
            diags.append("mode: required field missing")
        return None, diags

    resolved: dict[str, Any] = {
        "mode": mode,
        "seed": 0,
        "representation": "auto",
        "output.dir": os.environ.get(OUT_ENV, "results"),
        "output.name": mode,
        **{f"caps.{k}": v for k, v in vars(Caps()).items()},
        **MODE_DEFAULTS[mode],
    }
    resolved.update(values)

    for key in REQUIRED[mode]:
        if key not in resolved:
            diags.append(f"{key}: required field missing for mode {mode}")

    if mode in PROTOCOL_MODES:
        _check_couplings(resolved, mode, diags)
    if mode == "couplings":
        has_file = "geometry.file" in resolved
        ring = [k for k in ("geometry.ring_count", "geometry.ring_radius_nm", "geometry.ring_height_nm")
                if k in resolved]
        if has_file == bool(ring):
            diags.append("geometry: give either geometry.file or all of geometry.ring_count, "
                         "geometry.ring_radius_nm, geometry.ring_height_nm")
        elif ring and len(ring) != 3:
            diags.append("geometry: ring geometry needs ring_count, ring_radius_nm and ring_height_nm")
    if diags:
        return None, diags
    return ExperimentConfig(mode, resolved), []


def _check_couplings(resolved: dict, mode: str, diags: list[str]) -> None:
    sources = [k for k in ("protocol.alpha", "protocol.couplings", "disorder.mean") if k in resolved]
    if mode == "master-eq":
        if "protocol.alpha" not in resolved and "disorder.mean" not in resolved:
            diags.append("protocol.alpha: master-eq needs protocol.alpha or disorder.mean")
        return
    if len(sources) != 1:
        diags.append("couplings: set exactly one of protocol.alpha, protocol.couplings, disorder.mean "
                     f"(found {', '.join(sources) or 'none'})")
        return
    if sources[0] == "protocol.couplings" and "protocol.M" in resolved:
        if len(resolved["protocol.couplings"]) != resolved["protocol.M"]:
            diags.append(f"protocol.couplings: length {len(resolved['protocol.couplings'])} "
                         f"does not match protocol.M = {resolved['protocol.M']}")
    if sources[0] == "disorder.mean":
        resolved.setdefault("disorder.sigma", 0.0)
