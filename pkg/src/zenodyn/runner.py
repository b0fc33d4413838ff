"""Execute a validated experiment configuration.

The runner turns an :class:`~zenodyn.config.ExperimentConfig` into a
:class:`~zenodyn.timeseries.TimeSeries` plus a summary mapping with the
resolved config echo, derived scalars, accumulated warnings, and the
wall-clock duration. Sweeps re-run the scalar pipeline over a parameter
grid and report per-row status.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import replace
from typing import Any, Callable

import numpy as np

from . import engine, models
from .config import ExperimentConfig, apply_override, parse_config
from .errors import UsageError, ZenodynError
from .linalg import Operator, ProjectorFamily, QuantumState, propagator, spectral_projections
from .timeseries import TimeSeries

__all__ = ["run_experiment", "run_sweep", "describe_subspaces", "ExperimentResult"]

# Decay fits need a handful of samples to be meaningful; fewer points in
# the window is reported as a missing scalar rather than a bad number.
FIT_MIN_POINTS = 3


class ExperimentResult:
    """Time series plus summary payload for one experiment run."""

    def __init__(self, series: TimeSeries, summary: dict[str, Any]):
        self.series = series
        self.summary = summary


def _generator(config: ExperimentConfig) -> Operator:
    """The model Hamiltonian that drives the configured run."""
    name, params = config.model_name, config.params
    if name == "rabi_two_level":
        return models.rabi_two_level(params)
    if name == "two_level_effective":
        return models.two_level_effective(params)
    if name == "three_level_dissipative":
        return models.three_level_dissipative(params)
    if name == "three_level_ideal":
        return models.three_level_ideal(params)[0]
    if name == "four_level":
        return models.four_level(params)
    raise UsageError(f"unknown model {name!r}")


def _control(config: ExperimentConfig) -> Operator:
    try:
        return models.control_operator(config.model_name)
    except ZenodynError as exc:
        raise UsageError(
            f"model {config.model_name!r} has no control operator; "
            "give an explicit projector/family/kick matrix instead"
        ) from exc


def _family(config: ExperimentConfig, collect: list[dict[str, str]]) -> ProjectorFamily:
    if config.family_spans is not None:
        return ProjectorFamily.from_spans(config.dim, config.family_spans)
    family = spectral_projections(_control(config))
    for message in family.warnings:
        collect.append({"operation": "spectral_projections", "message": message})
    return family


def _selective_family(config: ExperimentConfig) -> ProjectorFamily:
    span = config.projector_span
    rest = tuple(sorted(set(range(config.dim)) - set(span)))
    spans = [span] + ([rest] if rest else [])
    return ProjectorFamily.from_spans(config.dim, spans)


def _projector(config: ExperimentConfig) -> np.ndarray:
    return _selective_family(config).projectors()[0]


def _kick(config: ExperimentConfig) -> Operator:
    if config.kick_matrix is not None:
        matrix = np.array(config.kick_matrix, dtype=complex)
        try:
            return Operator.unitary(matrix)
        except ZenodynError as exc:
            raise UsageError(f"procedure.kick.matrix is not unitary: {exc}") from exc
    return propagator(_control(config), config.kick_control_phase)


def _closed_form_column(config: ExperimentConfig, grid: np.ndarray) -> np.ndarray:
    name, p = config.model_name, config.params
    if config.initial_label != models.basis_labels(name)[0]:
        raise UsageError(
            "closed_form describes survival of the first level; set initial_state accordingly"
        )
    if name == "rabi_two_level":
        return np.array([models.closed_form_rabi(p.omega, t) for t in grid])
    if name == "three_level_ideal":
        return np.array([models.closed_form_sp3(p.omega, p.omega_prime, t) for t in grid])
    if name == "three_level_dissipative":
        return np.array(
            [models.closed_form_sp3s(p.omega, p.omega_prime, p.gamma_big, t) for t in grid]
        )
    if name == "two_level_effective":
        gamma = p.effective_gamma()
        if gamma == 0.0:
            return np.array([models.closed_form_rabi(p.omega, t) for t in grid])
        return np.array(
            [models.closed_form_two_level_decay(p.omega, gamma, t) for t in grid]
        )
    raise UsageError(f"model {name!r} has no closed-form survival")


def _survival_column(h: Operator, state: QuantumState, grid: np.ndarray) -> np.ndarray:
    return np.array([engine.survival_probability(h, state, t) for t in grid])


def _fit_decay_rate(
    grid: np.ndarray, values: np.ndarray, window: tuple[float, float]
) -> float | None:
    """Least-squares slope of -log p(t) over the window, or None if too sparse."""
    mask = (grid >= window[0]) & (grid <= window[1]) & (values > 0)
    if int(mask.sum()) < FIT_MIN_POINTS:
        return None
    slope = np.polyfit(grid[mask], np.log(values[mask]), 1)[0]
    return float(-slope)


def staircase_survival(
    h: Operator, projector: np.ndarray, state: QuantumState, n_steps: int, t_max: float,
    grid: np.ndarray,
) -> np.ndarray:
    """Survival under projective pulses at multiples of t_max / n_steps.

    Between pulses the state evolves freely; at each sample time the
    probability of still being inside the projector's range is reported.
    """
    tau = t_max / n_steps
    step = propagator(h, tau).matrix
    p = np.asarray(projector)
    psi0 = state.vector
    values = np.empty(len(grid))
    completed = 0
    surviving = psi0.copy()
    for i, t in enumerate(grid):
        k = min(int(math.floor(t / tau + 1e-9)), n_steps)
        while completed < k:
            surviving = p @ (step @ surviving)
            completed += 1
        evolved = propagator(h, t - completed * tau).matrix @ surviving
        values[i] = float(np.real(np.vdot(p @ evolved, p @ evolved)))
    return values


def nonselective_populations(
    h: Operator, family: ProjectorFamily, state: QuantumState, n_steps: int, t_max: float,
    grid: np.ndarray,
) -> tuple[dict[str, np.ndarray], float]:
    """Per-subspace populations under periodic dephasing, plus trace drift."""
    tau = t_max / n_steps
    step = propagator(h, tau).matrix
    step_dag = step.conj().T
    projs = [member.projector.matrix for member in family.members]
    rho = state.to_density_matrix()
    columns = {f"p_sub{n}": np.empty(len(grid)) for n in range(len(projs))}
    completed = 0
    for i, t in enumerate(grid):
        k = min(int(math.floor(t / tau + 1e-9)), n_steps)
        while completed < k:
            rho = engine.dephase(family, step @ rho @ step_dag)
            completed += 1
        local = propagator(h, t - completed * tau).matrix
        rho_t = local @ rho @ local.conj().T
        for n, p in enumerate(projs):
            columns[f"p_sub{n}"][i] = float(np.real(np.trace(p @ rho_t)))
    drift = abs(float(np.real(np.trace(rho))) - 1.0)
    return columns, drift


def kicked_survival(
    h: Operator, kick: Operator, state: QuantumState, n_steps: int, t_max: float,
    grid: np.ndarray,
) -> np.ndarray:
    """Survival probability with unitary kicks at multiples of t_max / n_steps."""
    tau = t_max / n_steps
    step = kick.matrix @ propagator(h, tau).matrix
    psi0 = state.vector
    values = np.empty(len(grid))
    completed = 0
    current = psi0.copy()
    for i, t in enumerate(grid):
        k = min(int(math.floor(t / tau + 1e-9)), n_steps)
        while completed < k:
            current = step @ current
            completed += 1
        evolved = propagator(h, t - completed * tau).matrix @ current
        values[i] = float(abs(np.vdot(psi0, evolved)) ** 2)
    return values


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Execute one configured experiment and assemble its summary."""
    start = _time.perf_counter()
    warnings: list[dict[str, str]] = []
    derived: dict[str, float] = {}

    grid = np.linspace(0.0, config.t_max, config.samples)
    state = QuantumState.pure(config.initial_vector())
    h = _generator(config)
    kind = config.procedure

    if kind == "free":
        p1 = _survival_column(h, state, grid)
        columns = {"p1": p1}
        if h.kind == "hermitian":
            derived["tau_z"] = engine.zeno_time(h, state)
        if config.fit_window is not None:
            rate = _fit_decay_rate(grid, p1, config.fit_window)
            if rate is not None:
                derived["fitted_rate"] = rate
        deviation = _oracle_deviation(config, grid, p1)
        if deviation is not None:
            derived["max_oracle_deviation"] = deviation
    elif kind == "closed_form":
        p1 = _closed_form_column(config, grid)
        columns = {"p1_closed_form": p1}
        if config.fit_window is not None:
            rate = _fit_decay_rate(grid, p1, config.fit_window)
            if rate is not None:
                derived["fitted_rate"] = rate
        _warn_expansion(config, warnings)
    elif kind == "pulsed_selective":
        projector = _projector(config)
        values = staircase_survival(h, projector, state, config.n_steps, config.t_max, grid)
        columns = {"p_measured": values}
        derived["survival"] = float(values[-1])
        tau = config.diagnostic_tau or config.t_max / config.n_steps
        derived["gamma_eff"] = engine.effective_decay_rate(h, state, tau)
        if h.kind == "hermitian":
            derived["tau_z"] = engine.zeno_time(h, state)
    elif kind == "pulsed_nonselective":
        family = _family(config, warnings)
        columns, drift = nonselective_populations(
            h, family, state, config.n_steps, config.t_max, grid
        )
        derived["trace_drift"] = drift
        derived["subspace_drift"] = max(
            float(abs(col[-1] - col[0])) for col in columns.values()
        )
        derived["leakage"] = engine.offdiagonal_leakage(
            h, family, config.n_steps, config.t_max
        )
    elif kind == "kicked":
        kick = _kick(config)
        values = kicked_survival(h, kick, state, config.n_steps, config.t_max, grid)
        columns = {"p1": values}
        derived["survival"] = float(values[-1])
    elif kind == "continuous":
        control = _control(config)
        base = models.coupling_base(config.model_name, config.params)
        total = Operator.hermitian(base.matrix + config.strength * control.matrix)
        columns = {"p1": _survival_column(total, state, grid)}
        derived["tau_z"] = engine.zeno_time(total, state)
        family = spectral_projections(control)
        for message in family.warnings:
            warnings.append({"operation": "spectral_projections", "message": message})
        derived["leakage"] = float(
            np.real(np.trace(
                (np.eye(config.dim) - _dominant_projector(family, state))
                @ _final_density(total, state, config.t_max)
            ))
        )
    else:  # pragma: no cover - parse_config guards this
        raise UsageError(f"unknown procedure {kind!r}")

    if config.diagnostic_tau is not None and "gamma_eff" not in derived:
        derived["gamma_eff"] = engine.effective_decay_rate(h, state, config.diagnostic_tau)

    series = TimeSeries(grid=grid, columns=columns)
    summary = {
        "command": "run",
        "config": config.echo(),
        "derived": derived,
        "warnings": warnings,
        "outputs": {"csv": config.csv_path},
        "duration_seconds": _time.perf_counter() - start,
    }
    return ExperimentResult(series, summary)


def _oracle_deviation(
    config: ExperimentConfig, grid: np.ndarray, numeric: np.ndarray
) -> float | None:
    """Max |numeric - closed form| when the model has a closed form."""
    if config.initial_label != models.basis_labels(config.model_name)[0]:
        return None
    try:
        reference = _closed_form_column(config, grid)
    except (UsageError, ZenodynError):
        return None
    return float(np.max(np.abs(numeric - reference)))


def _warn_expansion(config: ExperimentConfig, warnings: list[dict[str, str]]) -> None:
    p = config.params
    if config.model_name == "three_level_dissipative" and p.gamma_big > 0:
        scale = math.hypot(p.omega, p.omega_prime)
        if p.gamma_big > 0.5 * scale:
            warnings.append({
                "operation": "closed_form",
                "message": (
                    "expansion validity: gamma_big is not small against the coupling "
                    f"scale ({p.gamma_big:g} vs {scale:g}); the adiabatic branch "
                    "formula drops higher-order corrections"
                ),
            })


def _dominant_projector(family: ProjectorFamily, state: QuantumState) -> np.ndarray:
    rho = state.to_density_matrix()
    weights = [
        float(np.real(np.trace(member.projector.matrix @ rho))) for member in family.members
    ]
    return family.members[int(np.argmax(weights))].projector.matrix


def _final_density(h: Operator, state: QuantumState, t: float) -> np.ndarray:
    u = propagator(h, t).matrix
    rho = state.to_density_matrix()
    return u @ rho @ u.conj().T


def describe_subspaces(config: ExperimentConfig) -> str:
    """Human-readable dump of the invariant subspace split for a config.

    Reports the projector family induced by the configured procedure,
    the per-subspace dimensions, the block-diagonal part of the model
    Hamiltonian, and any clustering warnings.
    """
    warnings: list[dict[str, str]] = []
    h = _generator(config)
    if config.procedure == "pulsed_selective":
        family = _selective_family(config)
    elif config.procedure == "pulsed_nonselective":
        family = _family(config, warnings)
    elif config.procedure == "kicked":
        kick = _kick(config)
        family = spectral_projections(kick)
        warnings.extend(
            {"operation": "spectral_projections", "message": m} for m in family.warnings
        )
    elif config.procedure == "continuous":
        family = spectral_projections(_control(config))
        warnings.extend(
            {"operation": "spectral_projections", "message": m} for m in family.warnings
        )
    else:
        raise UsageError(
            f"procedure {config.procedure!r} induces no subspace split; "
            "use pulsed_selective, pulsed_nonselective, kicked, or continuous"
        )
    if h.kind == "hermitian":
        blocked = engine.zeno_hamiltonian(h, family)
        block_lines = _matrix_lines(blocked.matrix)
    else:
        block_lines = _matrix_lines(engine.dephase(family, h.matrix))
    lines = [
        f"model: {config.model_name} (dimension {config.dim})",
        f"procedure: {config.procedure}",
        f"subspaces: {len(family.members)}",
    ]
    for n, member in enumerate(family.members):
        label = "" if member.eigenvalue is None else f" (label {member.eigenvalue:+.6g})"
        lines.append(f"  subspace {n}: dimension {member.rank}{label}")
        lines.extend("    " + row for row in _matrix_lines(member.projector.matrix))
    lines.append("block-diagonal Hamiltonian part:")
    lines.extend("  " + row for row in block_lines)
    for warning in warnings:
        lines.append(f"warning [{warning['operation']}]: {warning['message']}")
    return "\n".join(lines) + "\n"


def _matrix_lines(matrix: np.ndarray) -> list[str]:
    rows = []
    for row in matrix:
        cells = []
        for z in row:
            if abs(z.imag) < 1e-14:
                cells.append(f"{z.real:+.6g}")
            else:
                cells.append(f"{z.real:+.6g}{z.imag:+.6g}j")
        rows.append("[" + ", ".join(cells) + "]")
    return rows


SWEEP_SCALARS = ("tau_z", "gamma_eff", "fitted_rate", "survival", "leakage", "trace_drift",
                 "max_oracle_deviation")


def run_sweep(config: ExperimentConfig) -> tuple[list[str], list[dict[str, Any]], dict[str, Any]]:
    """Run the configured sweep; returns (csv lines, rows, summary).

    Each grid value is applied to the base config at the sweep path and
    the experiment re-run; rows that raise a package error are marked
    failed and the sweep continues. The caller maps any failed row to
    the partial-result exit code.
    """
    if config.sweep is None:
        raise UsageError("config has no sweep section")
    start = _time.perf_counter()
    base_raw = config.echo()
    base_raw.pop("sweep", None)
    rows: list[dict[str, Any]] = []
    for index, value in enumerate(config.sweep.values):
        row: dict[str, Any] = {"index": index, "value": value, "status": "ok"}
        try:
            raw = apply_override(
                _deep_copy(base_raw), f"{config.sweep.path}={_yaml_scalar(value)}"
            )
            point = parse_config(raw)
            result = run_experiment(point)
            row.update(result.summary["derived"])
        except ZenodynError as exc:
            row["status"] = "failed"
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)

    scalar_names = [
        name for name in SWEEP_SCALARS if any(name in row for row in rows)
    ]
    from .timeseries import format_float

    header = ["index", "value"] + scalar_names + ["status"]
    lines = [",".join(header)]
    for row in rows:
        cells = [str(row["index"]), _yaml_scalar(row["value"])]
        for name in scalar_names:
            cells.append(format_float(row[name]) if name in row else "nan")
        cells.append(row["status"])
        lines.append(",".join(cells))
    summary = {
        "command": "sweep",
        "config": config.echo(),
        "rows": rows,
        "failed": sum(1 for row in rows if row["status"] != "ok"),
        "outputs": {"csv": config.csv_path},
        "duration_seconds": _time.perf_counter() - start,
    }
    return lines, rows, summary


def _deep_copy(raw: dict) -> dict:
    import copy

    return copy.deepcopy(raw)


def _yaml_scalar(value: Any) -> str:
    if isinstance(value, float):
        from .timeseries import format_float

        return format_float(value)
    return str(value)
