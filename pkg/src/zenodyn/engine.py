"""The three Zeno procedures and their limits.

Pulsed selective and nonselective projective measurements, unitary
kicks, and strong continuous coupling, each with its exact limiting
evolution, plus the scalar diagnostics (Zeno time, effective decay
rate) and convergence ladders that quantify how fast the finite
procedures approach their limits.

Limits are never extrapolated: in finite dimension the limiting
evolutions have closed forms (``P exp(-i PHP t)`` for a single
projector, ``exp(-i H_Z t)`` over a projector family), which are
evaluated directly and compared against the finite-parameter
evolutions in the interaction picture.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import (
    PreconditionError,
    SingularityError,
    StructuralError,
    SurvivalUnderflowError,
)
from .linalg import (
    HERMITIAN_TOL,
    PROJECTOR_TOL,
    Operator,
    ProjectorFamily,
    QuantumState,
    propagator,
    spectral_norm,
    spectral_projections,
)
from .timeseries import TimeSeries

__all__ = [
    "PulsedSpec",
    "KickSpec",
    "CouplingSpec",
    "ZenoSplit",
    "survival_amplitude",
    "survival_probability",
    "survival_probability_density",
    "zeno_time",
    "effective_decay_rate",
    "pulsed_selective_evolve",
    "pulsed_limit_evolution",
    "dephase",
    "nonselective_evolve",
    "zeno_hamiltonian",
    "zeno_limit_nonselective",
    "offdiagonal_leakage",
    "kicked_evolve",
    "kicked_limit",
    "continuous_evolve",
    "continuous_limit",
    "convergence_profile",
]

# Variance below ZERO_VARIANCE_TOL * ||H||^2 counts as a stationary state.
ZERO_VARIANCE_TOL = 1e-14
# Initial states must be supported in Ran P up to this spectral norm.
STATE_SUPPORT_TOL = 1e-10
# Survival probabilities below this have every branch filtered out.
SURVIVAL_UNDERFLOW = 1e-300
# Probabilities may exceed their exact bounds by this much before clamping.
PROBABILITY_SLACK = 1e-9
BLOCK_DIAG_TOL = 1e-10


def _clamp_probability(value: float) -> float:
    if -PROBABILITY_SLACK < value < 0.0:
        return 0.0
    if 1.0 < value < 1.0 + PROBABILITY_SLACK:
        return 1.0
    return value


def _require_projector(p: Operator) -> np.ndarray:
    matrix = p.matrix
    if not p.is_hermitian():
        raise StructuralError("projector must be Hermitian")
    if spectral_norm(matrix @ matrix - matrix) > PROJECTOR_TOL:
        raise StructuralError("projector is not idempotent within tolerance")
    return matrix


def _require_same_dim(h: Operator, dim: int) -> None:
    if h.dim != dim:
        raise StructuralError(f"dimension mismatch: operator {h.dim} vs state {dim}")


def _require_pure(state: QuantumState) -> np.ndarray:
    if not state.is_pure:
        raise StructuralError("a pure state is required here")
    if not state.normalized:
        raise PreconditionError("initial pure state must be normalized")
    return state.vector


def _hermitized(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.conj().T) / 2.0


@dataclass(frozen=True)
class PulsedSpec:
    """Pulsed-measurement schedule: N projections spread over total time t.

    ``target`` is a single projector for selective measurements (the
    non-surviving branches are filtered away) or a ProjectorFamily for
    nonselective ones (every branch is kept, coherences between blocks
    are destroyed).
    """

    target: Operator | ProjectorFamily
    n_steps: int
    t: float

    def __post_init__(self) -> None:
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise StructuralError("pulsed schedule needs an integer n_steps >= 1")
        object.__setattr__(self, "n_steps", int(self.n_steps))
        if not (math.isfinite(self.t) and self.t >= 0):
            raise StructuralError("pulsed schedule needs a finite total time t >= 0")
        if isinstance(self.target, Operator):
            _require_projector(self.target)
        elif not isinstance(self.target, ProjectorFamily):
            raise StructuralError("target must be a projector or a ProjectorFamily")

    @property
    def selective(self) -> bool:
        return isinstance(self.target, Operator)

    @property
    def interval(self) -> float:
        return self.t / self.n_steps


@dataclass(frozen=True)
class KickSpec:
    """N instantaneous unitary kicks interleaved with free evolution."""

    kick: Operator
    n_steps: int
    t: float

    def __post_init__(self) -> None:
        if self.kick.kind != "unitary":
            raise StructuralError("kick must be flagged unitary")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise StructuralError("kick schedule needs an integer n_steps >= 1")
        object.__setattr__(self, "n_steps", int(self.n_steps))
        if not (math.isfinite(self.t) and self.t >= 0):
            raise StructuralError("kick schedule needs a finite total time t >= 0")


@dataclass(frozen=True)
class CouplingSpec:
    """Continuous measurement: an added control Hamiltonian of strength K."""

    control: Operator
    strength: float

    def __post_init__(self) -> None:
        if self.control.kind != "hermitian":
            raise StructuralError("control Hamiltonian must be flagged hermitian")
        if not (math.isfinite(self.strength) and self.strength > 0):
            raise StructuralError("coupling strength must be finite and > 0")


@dataclass(frozen=True)
class ZenoSplit:
    """A projector family with its Zeno Hamiltonian and subspace sizes."""

    family: ProjectorFamily
    hamiltonian: Operator
    subspace_dims: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "subspace_dims", tuple(self.subspace_dims))
        if self.subspace_dims != tuple(m.rank for m in self.family.members):
            raise StructuralError("subspace dims do not match family ranks")
        hz = self.hamiltonian.matrix
        projs = self.family.projectors()
        for i, p in enumerate(projs):
            for q in projs[i + 1 :]:
                if spectral_norm(p @ hz @ q) > BLOCK_DIAG_TOL:
                    raise StructuralError(
                        "Zeno Hamiltonian is not block-diagonal for its family"
                    )

    @property
    def warnings(self) -> tuple[str, ...]:
        return self.family.warnings


def survival_amplitude(h: Operator, psi0: QuantumState, t: float) -> complex:
    """Amplitude <psi0| exp(-i H t) |psi0> of remaining in the initial state."""
    vec = _require_pure(psi0)
    _require_same_dim(h, psi0.dim)
    u = propagator(h, t)
    return complex(vec.conj() @ u.matrix @ vec)


def survival_probability(h: Operator, psi0: QuantumState, t: float) -> float:
    """Survival probability |<psi0| exp(-i H t) |psi0>|^2.

    Lies in [0, 1] for Hermitian generators and for dissipative ones
    (anti-Hermitian part <= 0); rounding excursions are clamped.
    """
    return _clamp_probability(abs(survival_amplitude(h, psi0, t)) ** 2)


def survival_probability_density(
    h: Operator, rho0: QuantumState, p: Operator, t: float
) -> float:
    """Probability Tr[U(t) rho0 U(t)^dag P] of being found inside Ran P.

    Requires the initial density matrix to be supported in Ran P
    (rho0 = P rho0 P within 1e-10).
    """
    proj = _require_projector(p)
    _require_same_dim(h, p.dim)
    rho = rho0.to_density_matrix()
    if rho.shape != proj.shape:
        raise StructuralError("state and projector dimensions differ")
    if spectral_norm(rho - proj @ rho @ proj) > STATE_SUPPORT_TOL:
        raise PreconditionError("initial state is not supported in Ran P")
    u = propagator(h, t).matrix
    value = float(np.trace(u @ rho @ u.conj().T @ proj).real)
    return _clamp_probability(value)


def zeno_time(h: Operator, psi0: QuantumState) -> float:
    """Zeno time: inverse square root of the energy variance in psi0.

    Sets the width of the quadratic short-time region of the survival
    probability. Returns ``inf`` for (numerically) stationary states
    with variance <= 1e-14 * ||H||^2.
    """
    if h.kind != "hermitian":
        raise StructuralError("zeno_time is defined for Hermitian evolution only")
    vec = _require_pure(psi0)
    _require_same_dim(h, psi0.dim)
    h_psi = h.matrix @ vec
    mean = float((vec.conj() @ h_psi).real)
    second_moment = float(np.vdot(h_psi, h_psi).real)
    variance = second_moment - mean**2
    if variance <= ZERO_VARIANCE_TOL * max(spectral_norm(h.matrix), 1.0) ** 2:
        return math.inf
    return 1.0 / math.sqrt(variance)


def effective_decay_rate(h: Operator, psi0: QuantumState, tau: float) -> float:
    """Decay rate -(1/tau) log p(tau) of the exponential interpolating
    the survival staircase of measurements at interval tau."""
    if not (math.isfinite(tau) and tau > 0):
        raise PreconditionError("effective_decay_rate requires tau > 0")
    p = survival_probability(h, psi0, tau)
    if p <= 0.0:
        raise SingularityError(
            f"survival probability vanished at tau={tau:g}; rate undefined"
        )
    return -math.log(p) / tau


def pulsed_selective_evolve(
    h: Operator, spec: PulsedSpec, rho0: QuantumState
) -> tuple[QuantumState, float]:
    """Evolution under N selective projective measurements.

    Applies ``V_N = [P U(t/N) P]^N`` to the initial density matrix and
    returns the conditional (renormalized) post-measurement state along
    with the survival probability ``Tr[V_N rho0 V_N^dag]`` of passing
    every measurement.
    """
    if not spec.selective:
        raise StructuralError("pulsed_selective_evolve needs a single-projector spec")
    proj = spec.target.matrix
    _require_same_dim(h, spec.target.dim)
    rho = rho0.to_density_matrix()
    if rho.shape != proj.shape:
        raise StructuralError("state and projector dimensions differ")
    if spectral_norm(rho - proj @ rho @ proj) > STATE_SUPPORT_TOL:
        raise PreconditionError("initial state is not supported in Ran P")
    u = propagator(h, spec.interval).matrix
    v_n = np.linalg.matrix_power(proj @ u @ proj, spec.n_steps)
    evolved = v_n @ rho @ v_n.conj().T
    survival = float(np.trace(evolved).real)
    if survival < SURVIVAL_UNDERFLOW:
        raise SurvivalUnderflowError(
            f"survival underflowed ({survival:.3g}) after {spec.n_steps} measurements"
        )
    state = QuantumState.density(_hermitized(evolved) / survival)
    return state, _clamp_probability(survival)


def pulsed_limit_evolution(h: Operator, p: Operator, t: float) -> Operator:
    """Limiting evolution of infinitely frequent selective measurements.

    Returns ``P exp(-i PHP t)``: unitary Zeno dynamics inside Ran P,
    annihilation outside.
    """
    proj = _require_projector(p)
    _require_same_dim(h, p.dim)
    php = proj @ h.matrix @ proj
    if h.kind == "hermitian":
        compressed = Operator.hermitian(_hermitized(php))
    else:
        compressed = Operator.general(php)
    return Operator.general(proj @ propagator(compressed, t).matrix)


def dephase(family: ProjectorFamily, matrix: np.ndarray) -> np.ndarray:
    """Nonselective-measurement superoperator: sum of P_n M P_n over the family.

    Zeroes every inter-subspace block of ``matrix``; idempotent.
    """
    result = np.zeros_like(np.asarray(matrix, dtype=complex))
    for proj in family.projectors():
        result += proj @ matrix @ proj
    return result


def nonselective_evolve(
    h: Operator, spec: PulsedSpec, rho0: QuantumState
) -> QuantumState:
    """Evolution under N nonselective measurements at interval t/N.

    Each round free-evolves the state for t/N and then destroys the
    inter-subspace coherences. All measurement branches are kept: for
    Hermitian generators the trace is preserved to rounding.
    """
    if spec.selective:
        raise StructuralError("nonselective_evolve needs a ProjectorFamily spec")
    family = spec.target
    if family.dim != h.dim:
        raise StructuralError("family and operator dimensions differ")
    rho = rho0.to_density_matrix()
    if rho.shape[0] != h.dim:
        raise StructuralError("state dimension differs from operator")
    u = propagator(h, spec.interval).matrix
    u_dag = u.conj().T
    for _ in range(spec.n_steps):
        rho = dephase(family, u @ rho @ u_dag)
    rho = _hermitized(rho)
    trace = float(np.trace(rho).real)
    return QuantumState(matrix=rho, normalized=abs(trace - 1.0) <= 1e-12)


def zeno_hamiltonian(h: Operator, family: ProjectorFamily) -> Operator:
    """Block-diagonal part sum_n P_n H P_n: the generator of the Zeno limit."""
    if family.dim != h.dim:
        raise StructuralError("family and operator dimensions differ")
    blocks = dephase(family, h.matrix)
    if h.kind == "hermitian":
        return Operator.hermitian(_hermitized(blocks))
    return Operator.general(blocks)


def zeno_limit_nonselective(
    h: Operator, family: ProjectorFamily, rho0: QuantumState, t: float
) -> QuantumState:
    """State reached at time t in the infinitely-frequent nonselective limit.

    Evolves the dephased initial state with ``exp(-i H_Z t)`` and
    projects the result onto the block diagonal, so the output is
    exactly block-diagonal and each subspace keeps its initial
    probability (for Hermitian generators).
    """
    hz = zeno_hamiltonian(h, family)
    _require_same_dim(h, rho0.dim)
    w = propagator(hz, t).matrix
    rho = dephase(family, w @ rho0.to_density_matrix() @ w.conj().T)
    rho = _hermitized(rho)
    trace = float(np.trace(rho).real)
    return QuantumState(matrix=rho, normalized=abs(trace - 1.0) <= 1e-12)


def offdiagonal_leakage(
    h: Operator, family: ProjectorFamily, n_steps: int, t: float
) -> float:
    """Largest inter-subspace branch norm of the N-step nonselective evolution.

    Each Kraus branch of the measurement-interleaved evolution is a
    product of projectors and short-time propagators. The dominant
    off-diagonal branches stay inside subspace m for N-1 rounds and are
    then found in subspace n != m; this returns
    ``max_{n != m} || P_n U(t/N) [P_m U(t/N)]^{N-1} P_m ||``,
    which vanishes like O(1/N) as the measurements become frequent and
    is identically zero when H commutes with every projector.
    """
    if int(n_steps) != n_steps or n_steps < 1:
        raise StructuralError("offdiagonal_leakage needs an integer n_steps >= 1")
    if family.dim != h.dim:
        raise StructuralError("family and operator dimensions differ")
    n_steps = int(n_steps)
    u = propagator(h, t / n_steps).matrix
    projs = family.projectors()
    worst = 0.0
    for m, proj_m in enumerate(projs):
        stay = np.linalg.matrix_power(proj_m @ u, n_steps - 1) @ proj_m
        for n, proj_n in enumerate(projs):
            if n != m:
                worst = max(worst, spectral_norm(proj_n @ u @ stay))
    return worst


def kicked_evolve(h: Operator, spec: KickSpec) -> Operator:
    """Evolution ``[U_kick U(t/N)]^N`` of N kicks interleaved with free flight."""
    _require_same_dim(h, spec.kick.dim)
    step = spec.kick.matrix @ propagator(h, spec.t / spec.n_steps).matrix
    result = np.linalg.matrix_power(step, spec.n_steps)
    kind = "unitary" if h.kind == "hermitian" else "general"
    return Operator(result, kind=kind)


def kicked_limit(
    h: Operator, kick: Operator, cluster_tol: float | None = None
) -> ZenoSplit:
    """Zeno split induced by infinitely frequent kicks.

    The kick's spectral projections define the subspaces; the dynamics
    inside them is generated by the Zeno Hamiltonian. Clustering
    ambiguity warnings propagate through the returned family.
    """
    if kick.kind != "unitary":
        raise StructuralError("kicked_limit requires a unitary kick")
    family = spectral_projections(kick, cluster_tol)
    hz = zeno_hamiltonian(h, family)
    return ZenoSplit(family, hz, tuple(m.rank for m in family.members))


def continuous_evolve(h: Operator, spec: CouplingSpec, t: float) -> Operator:
    """Propagator of H + K * H_c for one coupling strength K."""
    _require_same_dim(h, spec.control.dim)
    total = h.matrix + spec.strength * spec.control.matrix
    if h.kind == "hermitian":
        return propagator(Operator.hermitian(_hermitized(total)), t)
    return propagator(Operator.general(total), t)


def continuous_limit(
    h: Operator, control: Operator, cluster_tol: float | None = None
) -> ZenoSplit:
    """Zeno split reached as the control-coupling strength grows without bound.

    The control Hamiltonian's eigenprojections define the subspaces; in
    the interaction picture the evolution converges to
    ``exp(-i H_Z t)`` with H_Z the Zeno Hamiltonian, which commutes
    with the control.
    """
    if control.kind != "hermitian":
        raise StructuralError("continuous_limit requires a hermitian control")
    family = spectral_projections(control, cluster_tol)
    hz = zeno_hamiltonian(h, family)
    return ZenoSplit(family, hz, tuple(m.rank for m in family.members))


def _validate_ladder(ladder: Sequence[float]) -> list[float]:
    values = [float(v) for v in ladder]
    if not values:
        raise StructuralError("convergence ladder must be nonempty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise StructuralError("convergence ladder must be strictly increasing")
    return values


def convergence_profile(
    mode: str,
    h: Operator,
    control: Operator,
    ladder: Sequence[float],
    t_grid: Sequence[float],
    cluster_tol: float | None = None,
) -> TimeSeries:
    """Distance to the Zeno limit along a ladder of procedure strengths.

    For each ladder rung (N measurements or kicks, or coupling strength
    K) the finite evolution is mapped to the interaction picture
    (kick phases or the fast coupling phase are stripped; pulsed
    evolutions need no stripping) and its largest operator distance to
    the limiting evolution over ``t_grid`` is recorded.

    Parameters
    ----------
    mode : str
        "pulsed" (control: projector, ladder: N), "kicked" (control:
        unitary kick, ladder: N), or "continuous" (control: hermitian
        Hamiltonian, ladder: K).
    h : Operator
        System Hamiltonian.
    control : Operator
        Projector, kick, or control Hamiltonian, per mode.
    ladder : sequence of numbers
        Strictly increasing rung parameters.
    t_grid : sequence of float
        Times over which the per-rung distance is maximized.

    Returns
    -------
    TimeSeries
        Grid = ladder (named "N" or "K"), one "distance" column.
    """
    rungs = _validate_ladder(ladder)
    times = [float(t) for t in t_grid]
    if not times:
        raise StructuralError("t_grid must be nonempty")

    if mode == "pulsed":
        proj = _require_projector(control)
        _require_same_dim(h, control.dim)
        limits = [pulsed_limit_evolution(h, control, t).matrix for t in times]

        def rung_distance(value: float) -> float:
            n = _as_count(value)
            worst = 0.0
            for t, limit in zip(times, limits):
                u = propagator(h, t / n).matrix
                v_n = np.linalg.matrix_power(proj @ u @ proj, n)
                worst = max(worst, spectral_norm(v_n - limit))
            return worst

    elif mode == "kicked":
        split = kicked_limit(h, control, cluster_tol)
        limits = [propagator(split.hamiltonian, t).matrix for t in times]
        kick = control.matrix
        kick_back = kick.conj().T

        def rung_distance(value: float) -> float:
            n = _as_count(value)
            worst = 0.0
            for t, limit in zip(times, limits):
                step = kick @ propagator(h, t / n).matrix
                stripped = np.linalg.matrix_power(kick_back, n) @ np.linalg.matrix_power(
                    step, n
                )
                worst = max(worst, spectral_norm(stripped - limit))
            return worst

    elif mode == "continuous":
        split = continuous_limit(h, control, cluster_tol)
        limits = [propagator(split.hamiltonian, t).matrix for t in times]

        def rung_distance(value: float) -> float:
            if value <= 0:
                raise StructuralError("coupling strengths must be positive")
            spec = CouplingSpec(control, value)
            scaled = Operator.hermitian(value * control.matrix)
            worst = 0.0
            for t, limit in zip(times, limits):
                stripped = (
                    propagator(scaled, -t).matrix @ continuous_evolve(h, spec, t).matrix
                )
                worst = max(worst, spectral_norm(stripped - limit))
            return worst

    else:
        raise StructuralError(f"unknown convergence mode {mode!r}")

    distances = [rung_distance(value) for value in rungs]
    grid_name = "K" if mode == "continuous" else "N"
    return TimeSeries(
        grid=np.array(rungs), columns={"distance": np.array(distances)}, grid_name=grid_name
    )


def _as_count(value: float) -> int:
    n = int(round(value))
    if n < 1 or abs(value - n) > 1e-9:
        raise StructuralError(f"ladder rung {value!r} is not a positive integer")
    return n
