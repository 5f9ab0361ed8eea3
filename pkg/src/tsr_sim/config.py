"""Declarative run configuration: JSON schema, validation, round-trip.

A config file is a single JSON object with the sections below; every
physical default ships in data/default-geo600-like.json (the laser and
mass numbers there are stand-ins, recorded in one place on purpose).

    interferometer: wavelength, power_at_bs, mirror_mass, arm_length,
                    michelson_reflectivity {R, T, loss}
    topology:       {"variant": "tsr", l1, l2, f_sp, tsrm, srm|null}
                    or {"variant": "detuned_sr", length, recycling,
                        detuning | (resonance_hz, sideband)}
    squeezing:      {enabled, r, angle}
    readout:        {quadrature_angle}
    comparison:     {sr_recycling|null, resonance_hz, match}
    grid:           {f_min, f_max, points, spacing: log|linear}
    output:         {format: csv|json, path|null, units: phase|strain}

Parsing is strict: unknown keys and out-of-range values raise ConfigError
naming the offending field path.  serialize() emits a canonical dict that
parses back to an equal RunConfig, and the parameter hash is the sha256
of that canonical form.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ConfigError
from .noise import (
    DetunedSR,
    HomodyneReadout,
    InterferometerParams,
    SqueezedInput,
    TSR,
    Topology,
)
from .optics import MirrorSpec

DEFAULT_CONFIG_NAME = "default-geo600-like.json"


@dataclass(frozen=True)
class GridSpec:
    f_min: float
    f_max: float
    points: int
    spacing: str = "log"

    def build(self) -> np.ndarray:
        if self.spacing == "log":
            return np.logspace(np.log10(self.f_min), np.log10(self.f_max),
                               self.points)
        return np.linspace(self.f_min, self.f_max, self.points)

    def build_symmetric(self) -> np.ndarray:
        """Signed grid for doublet scans: the mirrored positive grid."""
        g = self.build()
        return np.concatenate([-g[::-1], g])


@dataclass(frozen=True)
class OutputSpec:
    format: str = "csv"
    path: str | None = None
    units: str = "phase"


@dataclass(frozen=True)
class ComparisonSpec:
    sr_recycling: MirrorSpec | None = None
    resonance_hz: float = 1000.0
    match: bool = False


@dataclass(frozen=True)
class RunConfig:
    interferometer: InterferometerParams
    topology: Topology
    squeezing: SqueezedInput
    readout: HomodyneReadout
    comparison: ComparisonSpec
    grid: GridSpec
    output: OutputSpec

    def parameter_hash(self) -> str:
        blob = json.dumps(serialize(self), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _require(obj: dict, field: str, path: str):
    if field not in obj:
        raise ConfigError(f"{path}.{field}", "missing required field")
    return obj[field]


def _number(obj: dict, field: str, path: str, positive=False):
    v = _require(obj, field, path)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{field}", f"expected a number, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(f"{path}.{field}", f"must be positive, got {v!r}")
    return float(v)


def _check_keys(obj: dict, allowed: set, path: str):
    if not isinstance(obj, dict):
        raise ConfigError(path, f"expected an object, got {type(obj).__name__}")
    extra = set(obj) - allowed
    if extra:
        raise ConfigError(f"{path}.{sorted(extra)[0]}", "unknown field")


def _parse_mirror(obj, path: str) -> MirrorSpec:
    _check_keys(obj, {"R", "T", "loss"}, path)
    R = _number(obj, "R", path)
    loss = float(obj.get("loss", 0.0))
    T = float(obj["T"]) if "T" in obj else 1.0 - R - loss
    try:
        return MirrorSpec(R=R, T=T, loss=loss)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_interferometer(obj, path="interferometer") -> InterferometerParams:
    _check_keys(obj, {"wavelength", "power_at_bs", "mirror_mass", "arm_length",
                      "michelson_reflectivity"}, path)
    try:
        return InterferometerParams(
            wavelength=_number(obj, "wavelength", path, positive=True),
            power_at_bs=_number(obj, "power_at_bs", path, positive=True),
            mirror_mass=_number(obj, "mirror_mass", path, positive=True),
            arm_length=_number(obj, "arm_length", path, positive=True),
            michelson_reflectivity=_parse_mirror(
                _require(obj, "michelson_reflectivity", path),
                f"{path}.michelson_reflectivity"),
        )
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_topology(obj, params: InterferometerParams, path="topology") -> Topology:
    variant = _require(obj, "variant", path)
    if variant == "tsr":
        _check_keys(obj, {"variant", "l1", "l2", "f_sp", "tsrm", "srm"}, path)
        l1 = _number(obj, "l1", path, positive=True)
        l2 = _number(obj, "l2", path, positive=True)
        tsrm = _parse_mirror(_require(obj, "tsrm", path), f"{path}.tsrm")
        if obj.get("srm") is not None:
            srm = _parse_mirror(obj["srm"], f"{path}.srm")
        else:
            f_sp = _number(obj, "f_sp", path, positive=True)
            try:
                tsr = TSR.designed(params, f_sp=f_sp, l1=l1, l2=l2, tsrm=tsrm)
            except ValueError as exc:
                raise ConfigError(f"{path}.f_sp", str(exc)) from exc
            srm = tsr.srm
        return TSR(l1=l1, l2=l2, srm=srm, tsrm=tsrm)
    if variant == "detuned_sr":
        _check_keys(obj, {"variant", "length", "recycling", "detuning",
                          "resonance_hz", "sideband"}, path)
        length = _number(obj, "length", path, positive=True)
        rec = _parse_mirror(_require(obj, "recycling", path), f"{path}.recycling")
        if "detuning" in obj and obj["detuning"] is not None:
            return DetunedSR(detuning=_number(obj, "detuning", path),
                             recycling_mirror=rec, length=length)
        res = _number(obj, "resonance_hz", path, positive=True)
        sideband = obj.get("sideband", "lower")
        try:
            return DetunedSR.at_resonance(res, length, rec, sideband)
        except ValueError as exc:
            raise ConfigError(f"{path}.sideband", str(exc)) from exc
    raise ConfigError(f"{path}.variant",
                      f"expected 'tsr' or 'detuned_sr', got {variant!r}")


def _parse_squeezing(obj, path="squeezing") -> SqueezedInput:
    _check_keys(obj, {"enabled", "r", "angle"}, path)
    enabled = obj.get("enabled", False)
    if not isinstance(enabled, bool):
        raise ConfigError(f"{path}.enabled", f"expected a boolean, got {enabled!r}")
    r = float(obj.get("r", 0.0))
    if r < 0:
        raise ConfigError(f"{path}.r", f"must be >= 0, got {r!r}")
    return SqueezedInput(r=r, angle=float(obj.get("angle", np.pi / 2)),
                         enabled=enabled)


def _parse_grid(obj, path="grid") -> GridSpec:
    _check_keys(obj, {"f_min", "f_max", "points", "spacing"}, path)
    f_min = _number(obj, "f_min", path, positive=True)
    f_max = _number(obj, "f_max", path, positive=True)
    if not f_min < f_max:
        raise ConfigError(f"{path}.f_min", f"f_min {f_min} must be below f_max {f_max}")
    points = _require(obj, "points", path)
    if not isinstance(points, int) or points < 16:
        raise ConfigError(f"{path}.points", f"need an integer >= 16, got {points!r}")
    spacing = obj.get("spacing", "log")
    if spacing not in ("log", "linear"):
        raise ConfigError(f"{path}.spacing", f"expected log|linear, got {spacing!r}")
    return GridSpec(f_min=f_min, f_max=f_max, points=points, spacing=spacing)


def _parse_output(obj, path="output") -> OutputSpec:
    _check_keys(obj, {"format", "path", "units"}, path)
    fmt = obj.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"{path}.format", f"expected csv|json, got {fmt!r}")
    units = obj.get("units", "phase")
    if units not in ("phase", "strain"):
        raise ConfigError(f"{path}.units", f"expected phase|strain, got {units!r}")
    p = obj.get("path")
    if p is not None and not isinstance(p, str):
        raise ConfigError(f"{path}.path", f"expected a string path, got {p!r}")
    return OutputSpec(format=fmt, path=p, units=units)


def _parse_comparison(obj, path="comparison") -> ComparisonSpec:
    _check_keys(obj, {"sr_recycling", "resonance_hz", "match"}, path)
    rec = obj.get("sr_recycling")
    match = obj.get("match", False)
    if not isinstance(match, bool):
        raise ConfigError(f"{path}.match", f"expected a boolean, got {match!r}")
    return ComparisonSpec(
        sr_recycling=None if rec is None else _parse_mirror(rec, f"{path}.sr_recycling"),
        resonance_hz=_number(obj, "resonance_hz", path, positive=True)
        if "resonance_hz" in obj else 1000.0,
        match=match,
    )


def parse(data: dict) -> RunConfig:
    """Validate a decoded JSON object into a RunConfig."""
    _check_keys(data, {"interferometer", "topology", "squeezing", "readout",
                       "comparison", "grid", "output"}, "config")
    params = _parse_interferometer(_require(data, "interferometer", "config"))
    readout_obj = data.get("readout", {})
    _check_keys(readout_obj, {"quadrature_angle"}, "readout")
    readout = HomodyneReadout(float(readout_obj.get("quadrature_angle", np.pi / 2)))
    return RunConfig(
        interferometer=params,
        topology=_parse_topology(_require(data, "topology", "config"), params),
        squeezing=_parse_squeezing(data.get("squeezing", {})),
        readout=readout,
        comparison=_parse_comparison(data.get("comparison", {})),
        grid=_parse_grid(_require(data, "grid", "config")),
        output=_parse_output(data.get("output", {})),
    )


def _mirror_dict(m: MirrorSpec | None):
    if m is None:
        return None
    return {"R": m.R, "T": m.T, "loss": m.loss}


def serialize(cfg: RunConfig) -> dict:
    """Canonical JSON-ready dict; parse(serialize(cfg)) == cfg."""
    p = cfg.interferometer
    if isinstance(cfg.topology, TSR):
        topo = {
            "variant": "tsr",
            "l1": cfg.topology.l1, "l2": cfg.topology.l2,
            "tsrm": _mirror_dict(cfg.topology.tsrm),
            "srm": _mirror_dict(cfg.topology.srm),
        }
    else:
        topo = {
            "variant": "detuned_sr",
            "length": cfg.topology.length,
            "detuning": cfg.topology.detuning,
            "recycling": _mirror_dict(cfg.topology.recycling_mirror),
        }
    return {
        "interferometer": {
            "wavelength": p.wavelength,
            "power_at_bs": p.power_at_bs,
            "mirror_mass": p.mirror_mass,
            "arm_length": p.arm_length,
            "michelson_reflectivity": _mirror_dict(p.michelson_reflectivity),
        },
        "topology": topo,
        "squeezing": {"enabled": cfg.squeezing.enabled, "r": cfg.squeezing.r,
                      "angle": cfg.squeezing.angle},
        "readout": {"quadrature_angle": cfg.readout.quadrature_angle},
        "comparison": {
            "sr_recycling": _mirror_dict(cfg.comparison.sr_recycling),
            "resonance_hz": cfg.comparison.resonance_hz,
            "match": cfg.comparison.match,
        },
        "grid": {"f_min": cfg.grid.f_min, "f_max": cfg.grid.f_max,
                 "points": cfg.grid.points, "spacing": cfg.grid.spacing},
        "output": {"format": cfg.output.format, "path": cfg.output.path,
                   "units": cfg.output.units},
    }


def load(path: str | None = None) -> RunConfig:
    """Read and validate a config file; None loads the shipped default."""
    if path is None:
        text = (resources.files("tsr_sim") / "data" / DEFAULT_CONFIG_NAME).read_text()
    else:
        with open(path, "r") as fh:
            text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from exc
    return parse(data)
