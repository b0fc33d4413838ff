"""Model Hamiltonians and closed-form survival probabilities.

Constructors for the level schemes used throughout the package (the
two-level Rabi system, its non-Hermitian effective reduction, the
three-level schemes with and without dissipation, and the four-level
qubit-protection scheme), together with the closed-form survival laws
that serve as independent oracles for the evolution engine.

Basis conventions follow the row-vector layout of the model
definitions: the two- and three-level bases are labeled 1, 2(, 3) with
<1| = (1, 0, 0), while the four-level basis is labeled 0..3 with
<0| = (1, 0, 0, 0). Parameters are expressed in units of a
caller-chosen reference angular frequency (hbar = 1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ExceptionalPointError, PreconditionError, StructuralError
from .linalg import Operator

__all__ = [
    "ModelParams",
    "MODEL_NAMES",
    "rabi_two_level",
    "two_level_effective",
    "three_level_dissipative",
    "three_level_ideal",
    "four_level",
    "qubit_rabi_generator",
    "closed_form_rabi",
    "closed_form_sp3",
    "closed_form_sp3s",
    "closed_form_two_level_decay",
    "basis_labels",
    "control_operator",
]

GAMMA_CONSISTENCY_TOL = 1e-12
EXCEPTIONAL_POINT_TOL = 1e-8


@dataclass(frozen=True)
class ModelParams:
    """Parameter bundle shared by every model constructor.

    Fields
    ------
    omega : Rabi coupling between levels 1 and 2.
    omega_prime : coupling between levels 2 and 3.
    gamma_big : decay rate of level 3.
    gamma_small : effective absorption rate of the reduced two-level
        model; when omitted it is derived as omega_prime**2 / gamma_big.
    omega_big : qubit Rabi coupling between levels 0 and 1 of the
        four-level scheme.
    """

    omega: float = 1.0
    omega_prime: float = 0.0
    gamma_big: float = 0.0
    gamma_small: float | None = None
    omega_big: float = 0.0

    def __post_init__(self) -> None:
        values = [self.omega, self.omega_prime, self.gamma_big, self.omega_big]
        if self.gamma_small is not None:
            values.append(self.gamma_small)
        if not all(math.isfinite(v) for v in values):
            raise StructuralError("model parameters must be finite")
        if min(self.omega, self.omega_prime, self.gamma_big, self.omega_big) < 0 or (
            self.gamma_small is not None and self.gamma_small < 0
        ):
            raise StructuralError("model rates and couplings must be nonnegative")
        if (
            self.gamma_small is not None
            and self.gamma_big > 0
            and self.omega_prime > 0
        ):
            derived = self.omega_prime**2 / self.gamma_big
            if abs(self.gamma_small - derived) > GAMMA_CONSISTENCY_TOL * abs(
                self.gamma_small
            ):
                raise StructuralError(
                    f"gamma_small {self.gamma_small:g} inconsistent with "
                    f"omega_prime**2/gamma_big = {derived:g}"
                )

    def effective_gamma(self) -> float:
        """gamma_small, derived from omega_prime**2 / gamma_big when absent."""
        if self.gamma_small is not None:
            return self.gamma_small
        if self.gamma_big > 0:
            return self.omega_prime**2 / self.gamma_big
        return 0.0


def rabi_two_level(p: ModelParams) -> Operator:
    """Two-level Rabi Hamiltonian (omega/2) (|1><2| + |2><1|)."""
    if p.omega <= 0:
        raise PreconditionError("rabi_two_level requires omega > 0")
    return Operator.hermitian(0.5 * np.array([[0, p.omega], [p.omega, 0]]))


def two_level_effective(p: ModelParams) -> Operator:
    """Non-Hermitian two-level reduction with absorption on level 2.

    Returns (1/2) [[0, omega], [omega, -i*gamma]] with
    gamma = gamma_small or omega_prime**2 / gamma_big. Hermitian only
    in the gamma = 0 limit.
    """
    if p.omega <= 0:
        raise PreconditionError("two_level_effective requires omega > 0")
    gamma = p.effective_gamma()
    matrix = 0.5 * np.array([[0, p.omega], [p.omega, -1j * gamma]])
    kind = "hermitian" if gamma == 0 else "general"
    return Operator(matrix, kind=kind)


def three_level_dissipative(p: ModelParams) -> Operator:
    """Three-level scheme with decay on level 3.

    Returns (1/2) [[0, w, 0], [w, 0, w'], [0, w', -i*Gamma]]; Hermitian
    iff gamma_big = 0.
    """
    if p.omega <= 0 or p.omega_prime <= 0:
        raise PreconditionError("three_level_dissipative requires omega, omega_prime > 0")
    w, wp, big_gamma = p.omega, p.omega_prime, p.gamma_big
    matrix = 0.5 * np.array(
        [[0, w, 0], [w, 0, wp], [0, wp, -1j * big_gamma]]
    )
    kind = "hermitian" if big_gamma == 0 else "general"
    return Operator(matrix, kind=kind)


def three_level_ideal(p: ModelParams) -> tuple[Operator, Operator, Operator]:
    """Dissipation-free three-level scheme, split into system and control.

    Returns ``(h_total, h_system, h_control)`` with
    ``h_total = h_system + omega_prime * h_control``: the system part
    carries the omega coupling between levels 1 and 2, the control part
    is (1/2)(|2><3| + |3><2|) whose strength omega_prime plays the role
    of the continuous-coupling constant.
    """
    if p.omega <= 0 or p.omega_prime <= 0:
        raise PreconditionError("three_level_ideal requires omega, omega_prime > 0")
    h_system = coupling_base("three_level_ideal", p)
    h_control = control_operator("three_level_ideal")
    h_total = Operator.hermitian(
        h_system.matrix + p.omega_prime * h_control.matrix
    )
    return h_total, h_system, h_control


def four_level(p: ModelParams) -> Operator:
    """Four-level qubit-protection Hamiltonian.

    Returns the tridiagonal matrix
    [[0, Omega, 0, 0], [Omega, 0, omega, 0], [0, omega, 0, omega'],
    [0, 0, omega', 0]] -- couplings appear without 1/2 factors in this
    scheme. Levels 0 and 1 form the qubit, level 2 is the probe and
    level 3 the observer.
    """
    om, w, wp = p.omega_big, p.omega, p.omega_prime
    matrix = np.array(
        [
            [0, om, 0, 0],
            [om, 0, w, 0],
            [0, w, 0, wp],
            [0, 0, wp, 0],
        ],
        dtype=complex,
    )
    return Operator.hermitian(matrix)


def qubit_rabi_generator(omega_big: float) -> Operator:
    """Ideal qubit generator Omega*(|0><1| + |1><0|) on the 2d qubit space."""
    return Operator.hermitian(omega_big * np.array([[0, 1.0], [1.0, 0]]))


def closed_form_rabi(omega: float, t: float) -> float:
    """Two-level Rabi survival probability cos^2(omega t / 2)."""
    return math.cos(omega * t / 2.0) ** 2


def closed_form_sp3(omega: float, omega_prime: float, t: float) -> float:
    """Exact survival probability of level 1 in the ideal three-level scheme.

    Evaluates [w'^2 + w^2 cos(sqrt(w'^2 + w^2) t / 2)]^2 / (w'^2 + w^2)^2.
    """
    if omega <= 0 or omega_prime < 0:
        raise PreconditionError("closed_form_sp3 requires omega > 0, omega_prime >= 0")
    total = omega_prime**2 + omega**2
    amplitude = omega_prime**2 + omega**2 * math.cos(math.sqrt(total) * t / 2.0)
    return (amplitude / total) ** 2


def closed_form_sp3s(
    omega: float, omega_prime: float, gamma_big: float, t: float
) -> float:
    """Small-dissipation expansion of the three-level survival probability.

    First order in the decay rate: each spectral branch keeps its
    unperturbed weight and frequency but acquires its perturbative
    amplitude decay,

        [w'^2 e^{-G w^2 t / 2(w^2+w'^2)}
         + w^2 e^{-G w'^2 t / 4(w^2+w'^2)} cos(sqrt(w'^2+w^2) t / 2)]^2
        / (w'^2 + w^2)^2.

    Reduces exactly to :func:`closed_form_sp3` at gamma_big = 0. The
    expansion drops eigenvector corrections, so its absolute error
    grows toward ~Gamma/(2 sqrt(w^2+w'^2)) when omega_prime ~ omega.
    """
    if omega <= 0 or omega_prime < 0 or gamma_big < 0:
        raise PreconditionError(
            "closed_form_sp3s requires omega > 0 and nonnegative omega_prime, gamma_big"
        )
    total = omega**2 + omega_prime**2
    stationary = omega_prime**2 * math.exp(-gamma_big * omega**2 * t / (2.0 * total))
    oscillating = (
        omega**2
        * math.exp(-gamma_big * omega_prime**2 * t / (4.0 * total))
        * math.cos(math.sqrt(total) * t / 2.0)
    )
    return ((stationary + oscillating) / total) ** 2


def closed_form_two_level_decay(omega: float, gamma: float, t: float) -> float:
    """Exact survival probability under the non-Hermitian two-level model.

    Computed from the eigendecomposition of
    (1/2)[[0, omega], [omega, -i*gamma]]: with
    s = sqrt(4 omega^2 - gamma^2) (complex for gamma > 2 omega) the
    eigenvalues are lambda_pm = (-i gamma +- s)/4 and the survival
    amplitude is c_+ e^{-i lambda_+ t} + c_- e^{-i lambda_- t} with
    residues c_pm = 1/2 +- i gamma/(2 s).

    Raises
    ------
    ExceptionalPointError
        When |gamma - 2 omega| < 1e-8 * omega: the eigenvalues coalesce
        and the two-branch formula is singular.
    """
    if omega <= 0 or gamma <= 0:
        raise PreconditionError(
            "closed_form_two_level_decay requires omega > 0 and gamma > 0"
        )
    if abs(gamma - 2.0 * omega) < EXCEPTIONAL_POINT_TOL * omega:
        raise ExceptionalPointError(
            f"eigenvalues coalesce at gamma = 2*omega (gamma={gamma:g}, omega={omega:g})"
        )
    s = cmath.sqrt(4.0 * omega**2 - gamma**2)
    lam_plus = (-1j * gamma + s) / 4.0
    lam_minus = (-1j * gamma - s) / 4.0
    c_plus = 0.5 + 1j * gamma / (2.0 * s)
    c_minus = 0.5 - 1j * gamma / (2.0 * s)
    amplitude = c_plus * cmath.exp(-1j * lam_plus * t) + c_minus * cmath.exp(
        -1j * lam_minus * t
    )
    return abs(amplitude) ** 2


# --- model registry -------------------------------------------------------
#
# The stable vocabulary used by experiment configs. Each entry maps the
# model name to (constructor returning the evolution generator, basis
# labels in display order).

MODEL_NAMES = (
    "rabi_two_level",
    "two_level_effective",
    "three_level_dissipative",
    "three_level_ideal",
    "four_level",
)

_BASIS_LABELS: dict[str, tuple[str, ...]] = {
    "rabi_two_level": ("1", "2"),
    "two_level_effective": ("1", "2"),
    "three_level_dissipative": ("1", "2", "3"),
    "three_level_ideal": ("1", "2", "3"),
    "four_level": ("0", "1", "2", "3"),
}


def basis_labels(model_name: str) -> tuple[str, ...]:
    """Level labels of a model, in basis order."""
    try:
        return _BASIS_LABELS[model_name]
    except KeyError:
        raise StructuralError(f"unknown model {model_name!r}") from None


def control_operator(model_name: str) -> Operator:
    """The natural control Hamiltonian of a model, unit strength.

    For the ideal three-level scheme this is the (1/2)(|2><3| + |3><2|)
    block whose strength omega_prime plays the continuous-coupling
    constant; for the four-level scheme it is the unscaled
    |2><3| + |3><2| observer block.
    """
    if model_name == "three_level_ideal":
        matrix = np.zeros((3, 3), dtype=complex)
        matrix[1, 2] = matrix[2, 1] = 0.5
        return Operator.hermitian(matrix)
    if model_name == "four_level":
        matrix = np.zeros((4, 4), dtype=complex)
        matrix[2, 3] = matrix[3, 2] = 1.0
        return Operator.hermitian(matrix)
    raise StructuralError(f"model {model_name!r} defines no control operator")


def coupling_base(model_name: str, p: ModelParams) -> Operator:
    """The model Hamiltonian with its control coupling stripped out.

    This is the system part that a continuous-coupling run drives with
    an explicit strength: ``coupling_base + K * control_operator``. The
    model's own omega_prime is ignored here, since the run supplies the
    coupling constant.
    """
    if model_name == "three_level_ideal":
        return Operator.hermitian(
            0.5 * np.array([[0, p.omega, 0], [p.omega, 0, 0], [0, 0, 0]])
        )
    if model_name == "four_level":
        return four_level(replace(p, omega_prime=0.0))
    raise StructuralError(f"model {model_name!r} defines no control operator")
