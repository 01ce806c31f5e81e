"""Run configuration parsing and result serialization.

Configs are strict JSON (unknown keys rejected); see ``docs/schema.md``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .density import BeamSet
from .sample import AtomWavefunction, Lattice, SampleState, cm_state_from_lattice, linear_chain

CONFIG_VERSION = 1
CSV_DIGITS = 9


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


_VEC3 = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_COMPLEX = {"oneOf": [
    {"type": "number"},
    {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
]}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["version", "sample", "beams"],
    "properties": {
        "version": {"const": CONFIG_VERSION},
        "sample": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "state": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["sigma0_pm", "total_mass_amu"],
                    "properties": {
                        "sigma0_pm": {"type": "number", "minimum": 0},
                        "total_mass_amu": {"type": "number", "exclusiveMinimum": 0},
                        "cm_mean_nm": _VEC3,
                    },
                },
                "lattice": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "positions_nm": {"type": "array", "items": _VEC3, "minItems": 1},
                        "chain": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["n", "spacing_nm"],
                            "properties": {
                                "n": {"type": "integer", "minimum": 1},
                                "spacing_nm": {"type": "number", "exclusiveMinimum": 0},
                            },
                        },
                        "atomic_number": {"type": "integer", "minimum": 1},
                        "atom_mass_amu": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
                "wavefunction": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "width_pm"],
                    "properties": {
                        "kind": {"enum": ["gaussian", "box", "triangle"]},
                        "width_pm": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
            },
        },
        "beams": {
            "type": "object",
            "additionalProperties": False,
            "required": ["transfers_per_nm"],
            "properties": {
                "k0_per_nm": _VEC3,
                "transfers_per_nm": {"type": "array", "items": _VEC3, "minItems": 1},
                "amplitudes": {"type": "array", "items": _COMPLEX, "minItems": 1},
            },
        },
        "drift_time_s": {"type": "number", "minimum": 0},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "format": {"enum": ["csv", "json"]},
                "path": {"type": "string"},
            },
        },
        "entropy_base": {"enum": ["nats", "bits"]},
    },
}


@dataclass(frozen=True, eq=False)
class RunConfig:
    raw: dict
    state: SampleState
    beams: BeamSet
    lattice: Lattice | None = None
    wavefunction: AtomWavefunction | None = None
    amplitudes: np.ndarray | None = None
    drift_time: float | None = None
    output_format: str = "json"
    output_path: str | None = None
    entropy_base: str = "nats"


def _path(err: jsonschema.ValidationError) -> str:
    return ".".join(str(p) for p in err.absolute_path) or "<root>"


def parse_config(data: dict) -> RunConfig:
    """Validate a decoded config dict and build the domain objects."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError("; ".join(f"{_path(e)}: {e.message}" for e in errors))

    sample = data["sample"]
    has_state = "state" in sample
    has_lattice = "lattice" in sample or "wavefunction" in sample
    if has_state == has_lattice:
        raise ConfigError("sample: give exactly one of 'state' or 'lattice' + 'wavefunction'")

    lattice = wf = None
    if has_state:
        s = sample["state"]
        state = SampleState(s.get("cm_mean_nm", [0.0, 0.0, 0.0]), s["sigma0_pm"], s["total_mass_amu"])
    else:
        if "lattice" not in sample or "wavefunction" not in sample:
            raise ConfigError("sample: a lattice sample needs both 'lattice' and 'wavefunction'")
        lat = sample["lattice"]
        if ("positions_nm" in lat) == ("chain" in lat):
            raise ConfigError("sample.lattice: give exactly one of 'positions_nm' or 'chain'")
        z = lat.get("atomic_number", 6)
        m = lat.get("atom_mass_amu", 12.0)
        if "chain" in lat:
            lattice = linear_chain(lat["chain"]["n"], lat["chain"]["spacing_nm"], z, m)
        else:
            lattice = Lattice(np.array(lat["positions_nm"], dtype=float), z, m)
        w = sample["wavefunction"]
        wf = AtomWavefunction(w["kind"], w["width_pm"])
        if not wf.is_gaussian:
            raise ConfigError("sample.wavefunction: the analytic pipeline needs kind 'gaussian'")
        state = cm_state_from_lattice(lattice, wf)

    b = data["beams"]
    qs = np.array(b["transfers_per_nm"], dtype=float)
    if np.any(np.linalg.norm(qs, axis=1) == 0):
        raise ConfigError("beams.transfers_per_nm: q = 0 (forward beam) is not allowed")
    if len({tuple(q) for q in qs}) != len(qs):
        raise ConfigError("beams.transfers_per_nm: duplicate momentum transfer")
    beams = BeamSet(qs, b.get("k0_per_nm", [0.0, 0.0, 0.0]))

    amps = None
    if "amplitudes" in b:
        if lattice is not None:
            raise ConfigError("beams.amplitudes: only allowed with a direct sample state")
        if len(b["amplitudes"]) != beams.d:
            raise ConfigError("beams.amplitudes: need one amplitude per transfer")
        amps = np.array([complex(*a) if isinstance(a, list) else complex(a) for a in b["amplitudes"]])
        if not np.any(amps):
            raise ConfigError("beams.amplitudes: all amplitudes are zero")

    drift = data.get("drift_time_s")
    if drift is not None and drift > 0 and not state.sigma0 > 0:
        raise ConfigError("drift_time_s: dispersion needs sigma0 > 0")

    out = data.get("output", {})
    return RunConfig(
        raw=data,
        state=state,
        beams=beams,
        lattice=lattice,
        wavefunction=wf,
        amplitudes=amps,
        drift_time=drift,
        output_format=out.get("format", "json"),
        output_path=out.get("path"),
        entropy_base=data.get("entropy_base", "nats"),
    )


def load_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(data)


@dataclass
class ResultRecord:
    inputs: dict
    sigma0_pm: float
    purity: float
    entropy: float
    entropy_base: str
    contrast: float | None
    tau_per_beam: list
    matrix: list | None = None

    @property
    def tau_min_s(self) -> float | None:
        ok = [t["tau_s"] for t in self.tau_per_beam if t["status"] == "ok"]
        return min(ok) if ok else None

    def to_dict(self) -> dict:
        return {
            "inputs": self.inputs,
            "sigma0_pm": self.sigma0_pm,
            "purity": self.purity,
            "entropy": self.entropy,
            "entropy_base": self.entropy_base,
            "contrast": self.contrast,
            "tau_per_beam": self.tau_per_beam,
            "tau_min_s": self.tau_min_s,
            "matrix": self.matrix,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ResultRecord:
        return cls(d["inputs"], d["sigma0_pm"], d["purity"], d["entropy"], d["entropy_base"],
                   d["contrast"], d["tau_per_beam"], d.get("matrix"))

    CSV_HEADER = ("sigma0_pm", "purity", "entropy", "entropy_base", "contrast", "tau_min_s")

    def csv_row(self) -> tuple:
        return (self.sigma0_pm, self.purity, self.entropy, self.entropy_base,
                self.contrast, self.tau_min_s)


def matrix_to_list(gamma: np.ndarray) -> list:
    """Row-major ``[[re, im], ...]`` rows."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in gamma]


def matrix_from_list(rows: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def dumps_json(obj) -> str:
    # repr of a float is its shortest round-tripping form (<= 17 significant digits)
    return json.dumps(_json_safe(obj), indent=2, sort_keys=False, allow_nan=False) + "\n"


def format_csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else format(float(v), f".{CSV_DIGITS}g")
    return str(v)


def dumps_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_csv_value(v) for v in row])
    return buf.getvalue()


def write_text(text: str, path) -> None:
    if path is None or str(path) == "-":
        import sys

        sys.stdout.write(text)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
