"""Scenario and sweep configuration files.

A config is TOML (or JSON, chosen by the ``.json`` suffix). Every key is
optional; unset keys take the reference scenario values. Units::

    threshold_db = 0.0              # SNR threshold, dB
    methods = ["quadrature"]        # closed_form | quadrature | monte_carlo

    [environment]
    temperature = 296.0             # K
    pressure = 1013.25              # hPa
    relative_humidity = 0.5         # fraction

    [links]                         # applied to both hops, then overridden
    frequency = 275e9               # Hz
    distance = 10.0                 # m
    tx_gain_db = 55.0               # dBi
    rx_gain_db = 55.0               # dBi
    fading_alpha = 1.0
    fading_mu = 3
    fading_hhat = 1.0
    tx_power_over_noise_db = 50.0   # dB

    [link1.misalignment]            # omit for a BM-free hop (or misalignment = false)
    s_o = 1.0
    beam_width = 0.05               # m, together with jitter_sigma (m)
    jitter_sigma = 0.01             # ... or give zeta directly

    [sweep.axis1]
    path = "link1.frequency"        # or "links.<field>" for both hops
    start = 275e9
    stop = 425e9
    points = 31
    scale = "linear"                # linear | log | dB (start/stop in dB, swept
                                    # in linear units; not for *_db fields)

    [monte_carlo]
    trials = 1000000
    seed = 0
    chunks = 8
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .atmosphere import Environment
from .channel import LinkConfig, MisalignmentParams, db_to_linear
from .mcsim import McConfig
from .outage import Method, Scenario

__all__ = [
    "ConfigError",
    "Axis",
    "SweepSpec",
    "DEFAULT_ENVIRONMENT",
    "DEFAULT_LINK",
    "load_raw",
    "resolve",
    "build_scenario",
    "parse_config",
    "load_config",
    "set_path",
    "SWEEPABLE",
]

DEFAULT_ENVIRONMENT = {"temperature": 296.0, "pressure": 1013.25, "relative_humidity": 0.5}
DEFAULT_LINK = {
    "frequency": 275e9,
    "distance": 10.0,
    "tx_gain_db": 55.0,
    "rx_gain_db": 55.0,
    "fading_alpha": 1.0,
    "fading_mu": 3,
    "fading_hhat": 1.0,
    "tx_power_over_noise_db": 50.0,
}
DEFAULT_MC = {"trials": 1_000_000, "seed": 0, "chunks": 8}
_MISALIGNMENT_KEYS = {"s_o", "zeta", "beam_width", "jitter_sigma"}
_TOP_KEYS = {"threshold_db", "methods", "environment", "links", "link1", "link2", "sweep", "monte_carlo",
             "absorption"}

SWEEPABLE = {
    "threshold_db",
    "frequency",
    "distance",
    "tx_gain_db",
    "rx_gain_db",
    "tx_power_over_noise_db",
    "misalignment.jitter_sigma",
    "misalignment.zeta",
}
SCALES = ("linear", "log", "dB")


class ConfigError(ValueError):
    """Schema or invariant violation; the message names the offending field path."""


@dataclass(frozen=True)
class Axis:
    path: str
    start: float
    stop: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        _check_sweep_path(self.path)
        if self.points < 1:
            raise ConfigError(f"sweep axis {self.path}: points must be >= 1")
        if self.scale not in SCALES:
            raise ConfigError(f"sweep axis {self.path}: scale must be one of {SCALES}")
        if self.scale == "dB" and self.path.endswith("_db"):
            raise ConfigError(f"sweep axis {self.path}: already in dB; use scale = \"linear\"")
        if self.scale == "log" and not (self.start > 0 and self.stop > 0):
            raise ConfigError(f"sweep axis {self.path}: log scale needs positive bounds")

    def values(self) -> list[float]:
        if self.points == 1:
            grid = np.array([self.start], dtype=float)
        elif self.scale == "log":
            grid = np.geomspace(self.start, self.stop, self.points)
        else:
            grid = np.linspace(self.start, self.stop, self.points)
        if self.scale == "dB":
            grid = 10.0 ** (grid / 10.0)
        return [float(v) for v in grid]


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Optional[Axis]
    fixed: Scenario
    methods: tuple[Method, ...]
    base: dict = field(repr=False, compare=False)
    mc: McConfig = field(default_factory=McConfig)

    def grid(self) -> list[tuple[float, ...]]:
        """Axis-major grid: axis1 varies slowest."""
        v1 = self.axis1.values()
        if self.axis2 is None:
            return [(a,) for a in v1]
        return [(a, b) for a in v1 for b in self.axis2.values()]

    @property
    def axes(self) -> tuple[Axis, ...]:
        return (self.axis1,) if self.axis2 is None else (self.axis1, self.axis2)

    def scenario_at(self, point: tuple[float, ...]) -> Scenario:
        raw = copy.deepcopy(self.base)
        for axis, value in zip(self.axes, point):
            set_path(raw, axis.path, value)
        return build_scenario(raw)


def _check_sweep_path(path: str) -> None:
    head, _, rest = path.partition(".")
    if path == "threshold_db":
        return
    if head in ("link1", "link2", "links") and rest in SWEEPABLE:
        return
    raise ConfigError(f"sweep path {path!r} does not name a sweepable field "
                      f"(threshold_db or link1|link2|links.<{', '.join(sorted(SWEEPABLE - {'threshold_db'}))}>)")


def set_path(raw: dict, path: str, value: float) -> None:
    """Assign ``value`` at a dotted path of a resolved config dict."""
    if path == "threshold_db":
        raw["threshold_db"] = value
        return
    head, _, rest = path.partition(".")
    targets = ("link1", "link2") if head == "links" else (head,)
    for t in targets:
        link = raw[t]
        if rest.startswith("misalignment."):
            mis = link.get("misalignment")
            if mis is None:
                raise ConfigError(f"{t}.misalignment: cannot sweep {rest} on a BM-free hop")
            key = rest.split(".", 1)[1]
            if key == "zeta":
                mis.pop("beam_width", None)
                mis.pop("jitter_sigma", None)
            elif key == "jitter_sigma":
                if "beam_width" not in mis:
                    raise ConfigError(f"{t}.misalignment: sweeping jitter_sigma needs beam_width")
                mis.pop("zeta", None)
            mis[key] = value
        else:
            link[rest] = value


def load_raw(path: Union[str, Path]) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix.lower() == ".json":
            return json.loads(text) if text.strip() else {}
        return tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _number(where: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _table(where: str, value: Any) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected a table, got {value!r}")
    return value


def _resolve_link(name: str, shared: dict, own: dict) -> dict:
    link = dict(DEFAULT_LINK)
    merged = {**shared, **own}
    for key, value in merged.items():
        where = f"{name}.{key}"
        if key == "misalignment":
            continue
        if key not in DEFAULT_LINK:
            raise ConfigError(f"{where}: unknown key")
        link[key] = _number(where, value)
    mis = own.get("misalignment", shared.get("misalignment"))
    if mis is False:  # explicit opt-out of a shared [links.misalignment]
        mis = None
    if mis is not None:
        mis = _table(f"{name}.misalignment", mis)
        out = {}
        for key, value in mis.items():
            if key not in _MISALIGNMENT_KEYS:
                raise ConfigError(f"{name}.misalignment.{key}: unknown key")
            out[key] = _number(f"{name}.misalignment.{key}", value)
        out.setdefault("s_o", 1.0)
        has_zeta = "zeta" in out
        has_geom = "beam_width" in out or "jitter_sigma" in out
        if has_zeta and has_geom:
            raise ConfigError(f"{name}.misalignment: give either zeta or (beam_width, jitter_sigma), not both")
        if not has_zeta:
            if not ("beam_width" in out and "jitter_sigma" in out):
                raise ConfigError(f"{name}.misalignment: under-determined; give zeta, or both "
                                  f"beam_width and jitter_sigma")
        link["misalignment"] = out
    else:
        link["misalignment"] = None
    return link


def resolve(raw: dict) -> dict:
    """Fill defaults and check the schema; returns a plain, fully explicit dict."""
    raw = _table("<root>", raw)
    for key in raw:
        if key not in _TOP_KEYS:
            raise ConfigError(f"{key}: unknown top-level key")
    env = dict(DEFAULT_ENVIRONMENT)
    for key, value in _table("environment", raw.get("environment", {})).items():
        if key not in DEFAULT_ENVIRONMENT:
            raise ConfigError(f"environment.{key}: unknown key")
        env[key] = _number(f"environment.{key}", value)
    shared = _table("links", raw.get("links", {}))
    out = {
        "threshold_db": _number("threshold_db", raw.get("threshold_db", 0.0)),
        "environment": env,
        "link1": _resolve_link("link1", shared, _table("link1", raw.get("link1", {}))),
        "link2": _resolve_link("link2", shared, _table("link2", raw.get("link2", {}))),
    }
    methods = raw.get("methods", ["quadrature"])
    if isinstance(methods, str):
        methods = [methods]
    try:
        out["methods"] = [Method(m).value for m in methods]
    except ValueError as exc:
        raise ConfigError(f"methods: {exc}") from exc
    mc = dict(DEFAULT_MC)
    for key, value in _table("monte_carlo", raw.get("monte_carlo", {})).items():
        if key not in DEFAULT_MC:
            raise ConfigError(f"monte_carlo.{key}: unknown key")
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"monte_carlo.{key}: expected an integer, got {value!r}")
        mc[key] = value
    out["monte_carlo"] = mc
    if "sweep" in raw:
        sweep = _table("sweep", raw["sweep"])
        axes = {}
        for name in ("axis1", "axis2"):
            if name in sweep:
                ax = _table(f"sweep.{name}", sweep[name])
                missing = {"path", "start", "stop", "points"} - set(ax)
                if missing:
                    raise ConfigError(f"sweep.{name}: missing {sorted(missing)}")
                points = ax["points"]
                if isinstance(points, bool) or not isinstance(points, int):
                    raise ConfigError(f"sweep.{name}.points: expected an integer")
                axes[name] = {
                    "path": str(ax["path"]),
                    "start": _number(f"sweep.{name}.start", ax["start"]),
                    "stop": _number(f"sweep.{name}.stop", ax["stop"]),
                    "points": points,
                    "scale": str(ax.get("scale", "linear")),
                }
        if "axis1" not in axes:
            raise ConfigError("sweep.axis1: required when a [sweep] table is present")
        out["sweep"] = axes
    return out


def _link_from(name: str, d: dict) -> LinkConfig:
    mis = d["misalignment"]
    mp = None
    try:
        if mis is not None:
            if "zeta" in mis:
                mp = MisalignmentParams(zeta=mis["zeta"], s_o=mis["s_o"])
            else:
                mp = MisalignmentParams.from_geometry(mis["beam_width"], mis["jitter_sigma"], mis["s_o"])
        fields = {k: v for k, v in d.items() if k != "misalignment"}
        mu = fields["fading_mu"]
        if float(mu).is_integer():
            fields["fading_mu"] = int(mu)
        return LinkConfig(misalignment=mp, **fields)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def build_scenario(resolved: dict) -> Scenario:
    try:
        env = Environment(**resolved["environment"])
    except ValueError as exc:
        raise ConfigError(f"environment: {exc}") from exc
    return Scenario(
        link1=_link_from("link1", resolved["link1"]),
        link2=_link_from("link2", resolved["link2"]),
        environment=env,
        snr_threshold=db_to_linear(resolved["threshold_db"]),
    )


def _check_methods(scenario: Scenario, methods) -> None:
    if Method.CLOSED_FORM in methods:
        for name, link in (("link1", scenario.link1), ("link2", scenario.link2)):
            if link.has_misalignment and not link.mu_is_integer:
                raise ConfigError(f"{name}.fading_mu: the closed form needs an integer mu "
                                  f"(got {link.fading_mu}); use quadrature or monte_carlo")


def parse_config(path: Union[str, Path], methods=None) -> Union[Scenario, SweepSpec]:
    """Read a config file into a :class:`Scenario`, or a :class:`SweepSpec` if it has ``[sweep]``.

    ``methods`` overrides the file's ``methods`` list (e.g. from the command line).
    """
    return load_config(path, methods)[0]


def load_config(path: Union[str, Path], methods=None) -> tuple[Union[Scenario, SweepSpec], dict]:
    """Like :func:`parse_config`, also returning the fully resolved dict."""
    resolved = resolve(load_raw(path))
    if methods is not None:
        resolved["methods"] = [Method(m).value for m in methods]
    scenario = build_scenario(resolved)
    method_set = tuple(Method(m) for m in resolved["methods"])
    _check_methods(scenario, method_set)
    if "sweep" not in resolved:
        return scenario, resolved
    axes = {k: Axis(**v) for k, v in resolved["sweep"].items()}
    spec = SweepSpec(axis1=axes["axis1"], axis2=axes.get("axis2"), fixed=scenario,
                     methods=method_set, base=resolved, mc=McConfig(**resolved["monte_carlo"]))
    # every grid corner must build, so bad sweeps fail at parse time
    for point in {tuple(ax.values()[i] for ax in spec.axes) for i in (0, -1)}:
        _check_methods(spec.scenario_at(point), method_set)
    return spec, resolved

