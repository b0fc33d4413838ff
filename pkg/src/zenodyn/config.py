"""Experiment configuration: YAML schema, validation, and echo round-trip.

One experiment per file. The schema mirrors the CLI contract:

.. code-block:: yaml

    model:
      name: three_level_ideal          # see models.MODEL_NAMES
      params: {omega: 1.0, omega_prime: 3.0}
    initial_state: "1"                 # level label, or amplitude list
    procedure:
      kind: free                       # free | closed_form | pulsed_selective
                                       # | pulsed_nonselective | kicked | continuous
      n_steps: 100                     # pulsed_* and kicked
      projector: ["1"]                 # pulsed_selective: basis span
      family: [["1"], ["2", "3"]]      # pulsed_nonselective: basis spans
      family_from_control: true        #   ... or the control operator's spectrum
      kick: {control_phase: 1.0}       # kicked: exp(-i theta H_control), or
                                       # kick: {matrix: [[...], [...]]}
      strength: 40.0                   # continuous: coupling constant K
    time: {t_max: 12.0, samples: 200}
    outputs: {csv: run.csv, summary: run.summary.json}
    fit: {t_min: 5.0, t_max: 50.0}     # optional decay-fit window
    diagnostics: {tau: 0.001}          # optional gamma_eff probe interval
    sweep: {path: procedure.n_steps, values: [4, 16, 64]}   # zeno sweep only

Level labels follow the model definitions: "1", "2"(, "3") for the two-
and three-level families, "0".."3" for the four-level scheme. Flags
passed as ``--set dotted.path=value`` override file values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .errors import StructuralError, UsageError
from .models import MODEL_NAMES, ModelParams, basis_labels

__all__ = ["ExperimentConfig", "SweepSpec", "load_config", "parse_config", "apply_override"]

PROCEDURES = (
    "free",
    "closed_form",
    "pulsed_selective",
    "pulsed_nonselective",
    "kicked",
    "continuous",
)

AMPLITUDE_NORM_TOL = 1e-9

_PARAM_KEYS = ("omega", "omega_prime", "gamma_big", "gamma_small", "omega_big")


def _require_mapping(value: Any, where: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise UsageError(f"{where} must be a mapping, got {type(value).__name__}")
    return value

def _reject_unknown(section: dict, allowed: tuple[str, ...], where: str) -> None:
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise UsageError(f"unknown key(s) {unknown} in {where}; allowed: {sorted(allowed)}")


def _as_number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise UsageError(f"{where} must be a number, got {value!r}")
    number = float(value)
    if not math.isfinite(number):
        raise UsageError(f"{where} must be finite")
    return number


def _as_amplitude(value: Any, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(_as_number(value[0], where), _as_number(value[1], where))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            pass
    raise UsageError(f"{where}: cannot read amplitude from {value!r}")


@dataclass(frozen=True)
class SweepSpec:
    """A one-dimensional parameter grid over a dotted config path."""

    path: str
    values: tuple[Any, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully validated experiment description."""

    model_name: str
    params: ModelParams
    initial_amplitudes: tuple[complex, ...]
    initial_label: str | None
    procedure: str
    n_steps: int | None
    strength: float | None
    projector_span: tuple[int, ...] | None
    family_spans: tuple[tuple[int, ...], ...] | None
    family_from_control: bool
    kick_control_phase: float | None
    kick_matrix: tuple[tuple[complex, ...], ...] | None
    t_max: float
    samples: int
    csv_path: str
    summary_path: str
    fit_window: tuple[float, float] | None
    diagnostic_tau: float | None
    sweep: SweepSpec | None

    @property
    def dim(self) -> int:
        return len(basis_labels(self.model_name))

    def initial_vector(self) -> np.ndarray:
        return np.array(self.initial_amplitudes, dtype=complex)

    def echo(self) -> dict:
        """The resolved configuration as a plain mapping.

        Feeding the echo back through :func:`parse_config` reproduces
        this configuration (the summary round-trip contract).
        """
        params: dict[str, Any] = {
            "omega": self.params.omega,
            "omega_prime": self.params.omega_prime,
            "gamma_big": self.params.gamma_big,
            "omega_big": self.params.omega_big,
        }
        if self.params.gamma_small is not None:
            params["gamma_small"] = self.params.gamma_small
        if self.initial_label is not None:
            initial: Any = self.initial_label
        else:
            initial = [[z.real, z.imag] for z in self.initial_amplitudes]
        procedure: dict[str, Any] = {"kind": self.procedure}
        if self.n_steps is not None:
            procedure["n_steps"] = self.n_steps
        if self.strength is not None:
            procedure["strength"] = self.strength
        if self.projector_span is not None:
            labels = basis_labels(self.model_name)
            procedure["projector"] = [labels[i] for i in self.projector_span]
        if self.family_spans is not None:
            labels = basis_labels(self.model_name)
            procedure["family"] = [
                [labels[i] for i in span] for span in self.family_spans
            ]
        if self.family_from_control:
            procedure["family_from_control"] = True
        if self.kick_control_phase is not None:
            procedure["kick"] = {"control_phase": self.kick_control_phase}
        if self.kick_matrix is not None:
            procedure["kick"] = {
                "matrix": [[[z.real, z.imag] for z in row] for row in self.kick_matrix]
            }
        config: dict[str, Any] = {
            "model": {"name": self.model_name, "params": params},
            "initial_state": initial,
            "procedure": procedure,
            "time": {"t_max": self.t_max, "samples": self.samples},
            "outputs": {"csv": self.csv_path, "summary": self.summary_path},
        }
        if self.fit_window is not None:
            config["fit"] = {"t_min": self.fit_window[0], "t_max": self.fit_window[1]}
        if self.diagnostic_tau is not None:
            config["diagnostics"] = {"tau": self.diagnostic_tau}
        if self.sweep is not None:
            config["sweep"] = {"path": self.sweep.path, "values": list(self.sweep.values)}
        return config


def _resolve_initial(raw: Any, model_name: str) -> tuple[tuple[complex, ...], str | None]:
    labels = basis_labels(model_name)
    if raw is None:
        raw = labels[0]
    if isinstance(raw, (str, int)) and not isinstance(raw, bool):
        label = str(raw)
        if label not in labels:
            raise UsageError(
                f"unknown level {label!r} for model {model_name}; levels are {list(labels)}"
            )
        amplitudes = [0j] * len(labels)
        amplitudes[labels.index(label)] = 1.0 + 0j
        return tuple(amplitudes), label
    if isinstance(raw, (list, tuple)):
        amplitudes = tuple(
            _as_amplitude(entry, f"initial_state[{i}]") for i, entry in enumerate(raw)
        )
        if len(amplitudes) != len(labels):
            raise UsageError(
                f"initial_state has {len(amplitudes)} amplitudes; model "
                f"{model_name} has dimension {len(labels)}"
            )
        norm = math.sqrt(sum(abs(z) ** 2 for z in amplitudes))
        if abs(norm - 1.0) > AMPLITUDE_NORM_TOL:
            raise UsageError(f"initial_state norm {norm:.12g} is not 1 within 1e-9")
        return amplitudes, None
    raise UsageError(f"initial_state must be a level label or amplitude list, got {raw!r}")


def _resolve_span(raw: Any, model_name: str, where: str) -> tuple[int, ...]:
    labels = basis_labels(model_name)
    if not isinstance(raw, (list, tuple)) or not raw:
        raise UsageError(f"{where} must be a nonempty list of level labels")
    indices = []
    for entry in raw:
        label = str(entry)
        if label not in labels:
            raise UsageError(
                f"{where}: unknown level {label!r}; levels are {list(labels)}"
            )
        indices.append(labels.index(label))
    if len(set(indices)) != len(indices):
        raise UsageError(f"{where} repeats a level")
    return tuple(indices)


def _resolve_procedure(section: dict, model_name: str) -> dict[str, Any]:
    _reject_unknown(
        section,
        (
            "kind",
            "n_steps",
            "strength",
            "projector",
            "family",
            "family_from_control",
            "kick",
        ),
        "procedure",
    )
    kind = section.get("kind", "free")
    if kind not in PROCEDURES:
        raise UsageError(f"unknown procedure {kind!r}; one of {list(PROCEDURES)}")
    resolved: dict[str, Any] = {
        "kind": kind,
        "n_steps": None,
        "strength": None,
        "projector_span": None,
        "family_spans": None,
        "family_from_control": False,
        "kick_control_phase": None,
        "kick_matrix": None,
    }

    def needs(key: str) -> Any:
        if key not in section:
            raise UsageError(f"procedure {kind!r} requires {key!r}")
        return section[key]

    def forbids(*keys: str) -> None:
        for key in keys:
            if key in section:
                raise UsageError(f"procedure {kind!r} does not accept {key!r}")

    if kind in ("free", "closed_form"):
        forbids("n_steps", "strength", "projector", "family", "family_from_control", "kick")
    elif kind == "pulsed_selective":
        forbids("strength", "family", "family_from_control", "kick")
        resolved["n_steps"] = _as_count(needs("n_steps"), "procedure.n_steps")
        resolved["projector_span"] = _resolve_span(
            needs("projector"), model_name, "procedure.projector"
        )
    elif kind == "pulsed_nonselective":
        forbids("strength", "projector", "kick")
        resolved["n_steps"] = _as_count(needs("n_steps"), "procedure.n_steps")
        if section.get("family_from_control"):
            forbids("family")
            resolved["family_from_control"] = True
        else:
            spans_raw = needs("family")
            if not isinstance(spans_raw, (list, tuple)) or not spans_raw:
                raise UsageError("procedure.family must be a nonempty list of spans")
            spans = tuple(
                _resolve_span(span, model_name, f"procedure.family[{i}]")
                for i, span in enumerate(spans_raw)
            )
            covered = [i for span in spans for i in span]
            if sorted(covered) != list(range(len(basis_labels(model_name)))):
                raise UsageError("procedure.family spans must partition the basis")
            resolved["family_spans"] = spans
    elif kind == "kicked":
        forbids("strength", "projector", "family", "family_from_control")
        resolved["n_steps"] = _as_count(needs("n_steps"), "procedure.n_steps")
        kick = _require_mapping(needs("kick"), "procedure.kick")
        _reject_unknown(kick, ("control_phase", "matrix"), "procedure.kick")
        if ("control_phase" in kick) == ("matrix" in kick):
            raise UsageError("procedure.kick needs exactly one of control_phase, matrix")
        if "control_phase" in kick:
            resolved["kick_control_phase"] = _as_number(
                kick["control_phase"], "procedure.kick.control_phase"
            )
        else:
            matrix = kick["matrix"]
            if not isinstance(matrix, (list, tuple)) or not matrix:
                raise UsageError("procedure.kick.matrix must be a nested list")
            resolved["kick_matrix"] = tuple(
                tuple(
                    _as_amplitude(entry, f"procedure.kick.matrix[{i}][{j}]")
                    for j, entry in enumerate(row)
                )
                for i, row in enumerate(matrix)
            )
    elif kind == "continuous":
        forbids("n_steps", "projector", "family", "family_from_control", "kick")
        strength = _as_number(needs("strength"), "procedure.strength")
        if strength <= 0:
            raise UsageError("procedure.strength must be > 0")
        resolved["strength"] = strength
    return resolved


def _as_count(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise UsageError(f"{where} must be an integer, got {value!r}")
    if value < 1:
        raise UsageError(f"{where} must be >= 1")
    return value


def parse_config(raw: Any, default_stem: str = "experiment") -> ExperimentConfig:
    """Validate a raw mapping into an :class:`ExperimentConfig`.

    Raises :class:`~zenodyn.errors.UsageError` on any schema violation.
    """
    raw = _require_mapping(raw, "config")
    _reject_unknown(
        raw,
        ("model", "initial_state", "procedure", "time", "outputs", "fit", "diagnostics", "sweep"),
        "config",
    )

    model_section = _require_mapping(raw.get("model"), "model")
    _reject_unknown(model_section, ("name", "params"), "model")
    model_name = model_section.get("name")
    if model_name not in MODEL_NAMES:
        raise UsageError(f"unknown model {model_name!r}; one of {list(MODEL_NAMES)}")
    params_section = _require_mapping(model_section.get("params"), "model.params")
    _reject_unknown(params_section, _PARAM_KEYS, "model.params")
    try:
        params = ModelParams(
            **{key: _as_number(val, f"model.params.{key}") for key, val in params_section.items()}
        )
    except StructuralError as exc:
        raise UsageError(f"invalid model parameters: {exc}") from exc

    amplitudes, label = _resolve_initial(raw.get("initial_state"), model_name)
    procedure = _resolve_procedure(_require_mapping(raw.get("procedure"), "procedure"), model_name)

    time_section = _require_mapping(raw.get("time"), "time")
    _reject_unknown(time_section, ("t_max", "samples"), "time")
    if "t_max" not in time_section:
        raise UsageError("time.t_max is required")
    t_max = _as_number(time_section["t_max"], "time.t_max")
    if t_max <= 0:
        raise UsageError("time.t_max must be > 0")
    samples = time_section.get("samples", 200)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 2:
        raise UsageError("time.samples must be an integer >= 2")

    outputs = _require_mapping(raw.get("outputs"), "outputs")
    _reject_unknown(outputs, ("csv", "summary"), "outputs")
    csv_path = str(outputs.get("csv", f"{default_stem}.csv"))
    summary_path = str(outputs.get("summary", f"{default_stem}.summary.json"))

    fit_window = None
    if "fit" in raw:
        fit = _require_mapping(raw["fit"], "fit")
        _reject_unknown(fit, ("t_min", "t_max"), "fit")
        lo = _as_number(fit.get("t_min", 0.0), "fit.t_min")
        hi = _as_number(fit.get("t_max", t_max), "fit.t_max")
        if not 0 <= lo < hi:
            raise UsageError("fit window needs 0 <= t_min < t_max")
        fit_window = (lo, hi)

    diagnostic_tau = None
    if "diagnostics" in raw:
        diag = _require_mapping(raw["diagnostics"], "diagnostics")
        _reject_unknown(diag, ("tau",), "diagnostics")
        if "tau" in diag:
            diagnostic_tau = _as_number(diag["tau"], "diagnostics.tau")
            if diagnostic_tau <= 0:
                raise UsageError("diagnostics.tau must be > 0")

    sweep = None
    if "sweep" in raw:
        sweep_section = _require_mapping(raw["sweep"], "sweep")
        _reject_unknown(sweep_section, ("path", "values"), "sweep")
        path = sweep_section.get("path")
        if not isinstance(path, str) or not path:
            raise UsageError("sweep.path must be a dotted config path")
        values = sweep_section.get("values")
        if not isinstance(values, (list, tuple)) or not values:
            raise UsageError("sweep.values must be a nonempty list")
        sweep = SweepSpec(path=path, values=tuple(values))

    return ExperimentConfig(
        model_name=model_name,
        params=params,
        initial_amplitudes=amplitudes,
        initial_label=label,
        procedure=procedure["kind"],
        n_steps=procedure["n_steps"],
        strength=procedure["strength"],
        projector_span=procedure["projector_span"],
        family_spans=procedure["family_spans"],
        family_from_control=procedure["family_from_control"],
        kick_control_phase=procedure["kick_control_phase"],
        kick_matrix=procedure["kick_matrix"],
        t_max=t_max,
        samples=samples,
        csv_path=csv_path,
        summary_path=summary_path,
        fit_window=fit_window,
        diagnostic_tau=diagnostic_tau,
        sweep=sweep,
    )


def load_config(path: str | Path, overrides: list[str] | None = None) -> ExperimentConfig:
    """Read a YAML config file, apply ``--set`` overrides, and validate."""
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise UsageError(f"config {path} is not valid YAML: {exc}") from exc
    raw = _require_mapping(raw, "config")
    for override in overrides or []:
        raw = apply_override(raw, override)
    return parse_config(raw, default_stem=path.stem)


def apply_override(raw: dict, assignment: str) -> dict:
    """Apply one ``dotted.path=value`` override to a raw config mapping."""
    if "=" not in assignment:
        raise UsageError(f"override {assignment!r} must look like path.to.key=value")
    dotted, text = assignment.split("=", 1)
    keys = [k for k in dotted.strip().split(".") if k]
    if not keys:
        raise UsageError(f"override {assignment!r} has an empty path")
    try:
        value = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise UsageError(f"override value {text!r} is not valid YAML: {exc}") from exc
    result = dict(raw)
    cursor: dict = result
    for key in keys[:-1]:
        nested = cursor.get(key)
        nested = dict(nested) if isinstance(nested, dict) else {}
        cursor[key] = nested
        cursor = nested
    cursor[keys[-1]] = value
    return result
