"""Dense complex linear algebra substrate.

Validated operator and state containers plus the four numerical
primitives everything else is built on: Hermitian eigendecomposition,
matrix-exponential propagators, spectral-projector extraction with
eigenvalue clustering, and spectral-norm distances.

All matrices are dense ``complex128``; intended dimensions are small
(2-64), so clarity and reproducibility are preferred over asymptotic
speed throughout.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError, StructuralError

__all__ = [
    "HERMITIAN_TOL",
    "UNITARY_TOL",
    "PROJECTOR_TOL",
    "RECONSTRUCTION_TOL",
    "CLUSTER_TOL_SCALE",
    "Operator",
    "QuantumState",
    "SpectralProjector",
    "ProjectorFamily",
    "spectral_norm",
    "eig_hermitian",
    "propagator",
    "spectral_projections",
    "operator_distance",
]

# Structural tolerances. Entrywise Hermiticity is checked relative to
# max(1, ||A||); the remaining checks are absolute in spectral norm.
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
PROJECTOR_TOL = 1e-10
DENSITY_TRACE_TOL = 1e-12
DENSITY_EIG_TOL = 1e-10
STATE_NORM_TOL = 1e-12

# Spectral reconstruction quality required of spectral_projections.
RECONSTRUCTION_TOL = 1e-9

# Default eigenvalue clustering tolerance is CLUSTER_TOL_SCALE * ||A||;
# clusters separated by less than AMBIGUITY_FACTOR times the tolerance
# are reported as ambiguous.
CLUSTER_TOL_SCALE = 1e-9
AMBIGUITY_FACTOR = 10.0


def spectral_norm(matrix: np.ndarray) -> float:
    """Largest singular value of a dense matrix."""
    return float(np.linalg.norm(matrix, ord=2))


def _as_complex_matrix(matrix: object, name: str) -> np.ndarray:
    arr = np.array(matrix, dtype=complex, copy=True)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise StructuralError(f"{name} must be a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise StructuralError(f"{name} must be at least 1x1")
    if not np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag)):
        raise StructuralError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def _hermiticity_defect(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def _is_hermitian(matrix: np.ndarray) -> bool:
    scale = max(1.0, spectral_norm(matrix))
    return _hermiticity_defect(matrix) <= HERMITIAN_TOL * scale


@dataclass(frozen=True)
class Operator:
    """A dense complex square matrix with a structural flag.

    The ``kind`` flag ("hermitian", "unitary", or "general") is verified
    at construction: Hermitian operators must satisfy
    ``max|A - A^dag| <= 1e-12 * max(1, ||A||)`` entrywise and unitary
    ones ``||A^dag A - I|| <= 1e-10`` in spectral norm. Entries must be
    finite. The stored array is read-only.

    Parameters
    ----------
    matrix : array_like
        Square complex matrix.
    kind : str
        One of "hermitian", "unitary", "general".
    """

    matrix: np.ndarray
    kind: str = "general"

    def __post_init__(self) -> None:
        arr = _as_complex_matrix(self.matrix, "operator")
        object.__setattr__(self, "matrix", arr)
        if self.kind not in ("hermitian", "unitary", "general"):
            raise StructuralError(f"unknown operator kind {self.kind!r}")
        if self.kind == "hermitian" and not _is_hermitian(arr):
            raise StructuralError(
                "operator flagged hermitian but max|A - A^dag| = "
                f"{_hermiticity_defect(arr):.3e} exceeds tolerance"
            )
        if self.kind == "unitary":
            defect = spectral_norm(arr.conj().T @ arr - np.eye(arr.shape[0]))
            if defect > UNITARY_TOL:
                raise StructuralError(
                    f"operator flagged unitary but ||A^dag A - I|| = {defect:.3e}"
                )

    @classmethod
    def hermitian(cls, matrix: object) -> "Operator":
        return cls(matrix, kind="hermitian")

    @classmethod
    def unitary(cls, matrix: object) -> "Operator":
        return cls(matrix, kind="unitary")

    @classmethod
    def general(cls, matrix: object) -> "Operator":
        return cls(matrix, kind="general")

    @classmethod
    def identity(cls, dim: int) -> "Operator":
        return cls(np.eye(dim), kind="hermitian")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "Operator":
        # Hermitian and unitary flags survive conjugate transposition.
        return Operator(self.matrix.conj().T, kind=self.kind)

    def is_hermitian(self) -> bool:
        return self.kind == "hermitian" or _is_hermitian(self.matrix)


@dataclass(frozen=True)
class QuantumState:
    """A pure state vector or a density matrix.

    Pure states are validated to unit norm within 1e-12 at construction;
    a state whose norm has decayed under non-Hermitian evolution can be
    carried with ``normalized=False``, which skips the norm check.
    Density matrices must be Hermitian within 1e-12, have unit trace
    within 1e-12, and minimum eigenvalue >= -1e-10.
    """

    vector: np.ndarray | None = None
    matrix: np.ndarray | None = None
    normalized: bool = True

    def __post_init__(self) -> None:
        if (self.vector is None) == (self.matrix is None):
            raise StructuralError("state needs exactly one of vector or matrix")
        if self.vector is not None:
            vec = np.array(self.vector, dtype=complex, copy=True).reshape(-1)
            if vec.size < 1 or not (np.all(np.isfinite(vec.real)) and np.all(np.isfinite(vec.imag))):
                raise StructuralError("state vector empty or non-finite")
            if self.normalized and abs(np.linalg.norm(vec) - 1.0) > STATE_NORM_TOL:
                raise StructuralError(
                    f"pure state norm {np.linalg.norm(vec):.15g} is not 1 within {STATE_NORM_TOL}"
                )
            vec.setflags(write=False)
            object.__setattr__(self, "vector", vec)
        else:
            mat = _as_complex_matrix(self.matrix, "density matrix")
            if not _is_hermitian(mat):
                raise StructuralError("density matrix is not Hermitian within tolerance")
            if self.normalized:
                trace = complex(np.trace(mat))
                if abs(trace - 1.0) > DENSITY_TRACE_TOL:
                    raise StructuralError(f"density matrix trace {trace:.15g} is not 1")
            lowest = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2.0).min())
            if lowest < -DENSITY_EIG_TOL:
                raise StructuralError(
                    f"density matrix has negative eigenvalue {lowest:.3e}"
                )
            object.__setattr__(self, "matrix", mat)

    @classmethod
    def pure(cls, amplitudes: object) -> "QuantumState":
        return cls(vector=np.asarray(amplitudes, dtype=complex))

    @classmethod
    def density(cls, matrix: object) -> "QuantumState":
        return cls(matrix=np.asarray(matrix, dtype=complex))

    @classmethod
    def basis_state(cls, dim: int, index: int) -> "QuantumState":
        if not 0 <= index < dim:
            raise StructuralError(f"basis index {index} out of range for dim {dim}")
        vec = np.zeros(dim, dtype=complex)
        vec[index] = 1.0
        return cls(vector=vec)

    @property
    def is_pure(self) -> bool:
        return self.vector is not None

    @property
    def dim(self) -> int:
        return self.vector.shape[0] if self.vector is not None else self.matrix.shape[0]

    def to_density_matrix(self) -> np.ndarray:
        """The state as a density matrix (|psi><psi| for pure states)."""
        if self.vector is not None:
            return np.outer(self.vector, self.vector.conj())
        return np.array(self.matrix, copy=True)


@dataclass(frozen=True)
class SpectralProjector:
    """One orthogonal projector with its eigenvalue label and rank."""

    projector: Operator
    eigenvalue: float
    rank: int


@dataclass(frozen=True)
class ProjectorFamily:
    """An orthogonal resolution of the identity with eigenvalue labels.

    Members must be idempotent and Hermitian, pairwise orthogonal, and
    complete (sum to the identity), each within the module tolerances;
    eigenvalue labels must be pairwise distinct. Families produced by
    :func:`spectral_projections` may carry clustering-ambiguity warnings.
    """

    dim: int
    members: tuple[SpectralProjector, ...]
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.members:
            raise StructuralError("projector family needs at least one member")
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "warnings", tuple(self.warnings))
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for member in self.members:
            p = member.projector.matrix
            if p.shape != (self.dim, self.dim):
                raise StructuralError("projector dimension mismatch inside family")
            if not _is_hermitian(p):
                raise StructuralError("family member is not Hermitian within tolerance")
            if spectral_norm(p @ p - p) > PROJECTOR_TOL:
                raise StructuralError("family member is not idempotent within tolerance")
            if member.rank != int(round(float(np.trace(p).real))):
                raise StructuralError("family member rank does not match projector trace")
            total += p
        for i, a in enumerate(self.members):
            for b in self.members[i + 1 :]:
                if spectral_norm(a.projector.matrix @ b.projector.matrix) > PROJECTOR_TOL:
                    raise StructuralError("family members are not pairwise orthogonal")
                if a.eigenvalue == b.eigenvalue:
                    raise StructuralError(
                        f"duplicate eigenvalue label {a.eigenvalue!r} in family"
                    )
        if spectral_norm(total - np.eye(self.dim)) > PROJECTOR_TOL:
            raise StructuralError("projector family is not complete (sum != identity)")

    @classmethod
    def from_projectors(
        cls, dim: int, labeled: Sequence[tuple[object, float]]
    ) -> "ProjectorFamily":
        """Build a family from (projector matrix, eigenvalue label) pairs."""
        members = []
        for matrix, label in labeled:
            arr = matrix.matrix if isinstance(matrix, Operator) else np.asarray(matrix)
            op = Operator.hermitian(arr)
            rank = int(round(float(np.trace(op.matrix).real)))
            members.append(SpectralProjector(op, float(label), rank))
        return cls(dim=dim, members=tuple(members))

    @classmethod
    def from_spans(cls, dim: int, spans: Sequence[Sequence[int]]) -> "ProjectorFamily":
        """Family of basis-aligned projectors; span k gets eigenvalue label k."""
        seen: set[int] = set()
        labeled = []
        for k, span in enumerate(spans):
            indices = [int(i) for i in span]
            if not indices:
                raise StructuralError("empty basis span in projector family")
            for i in indices:
                if not 0 <= i < dim or i in seen:
                    raise StructuralError(f"basis index {i} repeated or out of range")
                seen.add(i)
            p = np.zeros((dim, dim), dtype=complex)
            p[indices, indices] = 1.0
            labeled.append((p, float(k)))
        if len(seen) != dim:
            raise StructuralError("basis spans do not cover every basis vector")
        return cls.from_projectors(dim, labeled)

    @classmethod
    def trivial(cls, dim: int) -> "ProjectorFamily":
        """The single-member family {identity}."""
        return cls.from_projectors(dim, [(np.eye(dim), 0.0)])

    def __len__(self) -> int:
        return len(self.members)

    def projectors(self) -> list[np.ndarray]:
        return [member.projector.matrix for member in self.members]

    def with_warnings(self, warnings: Sequence[str]) -> "ProjectorFamily":
        return dataclasses.replace(self, warnings=tuple(warnings))


def eig_hermitian(a: Operator) -> tuple[np.ndarray, Operator]:
    """Eigendecomposition of a Hermitian operator.

    Parameters
    ----------
    a : Operator
        Operator flagged "hermitian".

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues in ascending order.
    eigenvectors : Operator
        Unitary operator whose columns are the orthonormal eigenvectors,
        so that ``A = V diag(w) V^dag``.

    Raises
    ------
    StructuralError
        If the operator is not flagged hermitian.
    NumericalError
        If the eigensolver fails to converge or the reconstruction
        error exceeds ``1e-10 * ||A||``.
    """
    if a.kind != "hermitian":
        raise StructuralError("eig_hermitian requires an operator flagged hermitian")
    try:
        eigenvalues, vectors = np.linalg.eigh(a.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"Hermitian eigensolver failed to converge on dim {a.dim}: {exc}"
        ) from exc
    reconstruction = (vectors * eigenvalues) @ vectors.conj().T
    error = spectral_norm(reconstruction - a.matrix)
    if error > 1e-10 * max(1.0, spectral_norm(a.matrix)):
        raise NumericalError(
            f"eigendecomposition reconstruction error {error:.3e} too large"
        )
    return eigenvalues, Operator.unitary(vectors)


def propagator(h: Operator, t: float) -> Operator:
    """Time-evolution operator ``exp(-i H t)``.

    For Hermitian generators the exponential is evaluated through the
    eigendecomposition and the result is flagged unitary. For general
    (e.g. non-Hermitian effective) generators it is evaluated by
    scaling-and-squaring with Pade approximation and flagged general.

    Parameters
    ----------
    h : Operator
        Generator of the evolution.
    t : float
        Evolution time; may be negative.

    Raises
    ------
    NumericalError
        If the result contains non-finite entries.
    """
    t = float(t)
    if not np.isfinite(t):
        raise StructuralError("propagation time must be finite")
    if t == 0.0:
        return Operator.unitary(np.eye(h.dim, dtype=complex))
    if h.kind == "hermitian":
        eigenvalues, vectors = eig_hermitian(h)
        v = vectors.matrix
        result = (v * np.exp(-1j * eigenvalues * t)) @ v.conj().T
        return Operator.unitary(result)
    result = scipy.linalg.expm(-1j * h.matrix * t)
    if not np.all(np.isfinite(result.real)) and np.all(np.isfinite(result.imag)):
        raise NumericalError(
            f"matrix exponential produced non-finite entries at t={t:g}"
        )
    return Operator.general(result)


def _principal_phase(eigenvalue: complex) -> float:
    """Phase lambda in (-pi, pi] such that the eigenvalue is exp(-i lambda)."""
    lam = -float(np.angle(eigenvalue))
    if lam <= -np.pi:
        lam += 2.0 * np.pi
    return lam


def _cluster_sorted(values: np.ndarray, tol: float) -> list[list[int]]:
    """Group indices of a sorted value array by gaps <= tol."""
    clusters: list[list[int]] = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] <= tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def spectral_projections(
    a: Operator, cluster_tol: float | None = None
) -> ProjectorFamily:
    """Spectral projector family of a Hermitian or unitary operator.

    Eigenvalues (eigenphases on (-pi, pi] for unitary input, with the
    convention that an eigenvalue equals ``exp(-i phase)``) are clustered
    within ``cluster_tol``; each cluster yields one projector built from
    the orthonormal eigenvectors of its members, so degenerate spectra
    produce higher-rank projectors. The returned family satisfies every
    ProjectorFamily invariant and reconstructs the operator within
    ``1e-9 * ||A||``.

    Parameters
    ----------
    a : Operator
        Operator flagged "hermitian" or "unitary".
    cluster_tol : float, optional
        Eigenvalue clustering width. Defaults to ``1e-9 * ||A||``
        (or 1e-9 when the norm vanishes).

    Returns
    -------
    ProjectorFamily
        Members sorted by eigenvalue label. If two clusters sit closer
        than 10x the tolerance an ambiguity warning is attached to the
        result's ``warnings``.
    """
    if a.kind == "hermitian":
        eigenvalues, vectors_op = eig_hermitian(a)
        labels = np.asarray(eigenvalues, dtype=float)
        vectors = vectors_op.matrix
        circular = False
    elif a.kind == "unitary":
        # A unitary matrix is normal, so its complex Schur form is
        # diagonal and the Schur basis is an orthonormal eigenbasis.
        t_mat, q_mat = scipy.linalg.schur(np.asarray(a.matrix), output="complex")
        labels = np.array([_principal_phase(z) for z in np.diag(t_mat)])
        order = np.argsort(labels, kind="stable")
        labels = labels[order]
        vectors = q_mat[:, order]
        circular = True
    else:
        raise StructuralError(
            "spectral_projections requires a hermitian or unitary operator"
        )

    if cluster_tol is None:
        cluster_tol = CLUSTER_TOL_SCALE * max(spectral_norm(a.matrix), 1.0)
    cluster_tol = float(cluster_tol)
    if cluster_tol <= 0:
        raise StructuralError("cluster_tol must be positive")

    clusters = _cluster_sorted(labels, cluster_tol)
    if circular and len(clusters) > 1:
        # Phases live on a circle: merge the first and last clusters when
        # they touch across the branch cut at +-pi.
        wrap_gap = labels[clusters[0][0]] + 2.0 * np.pi - labels[clusters[-1][-1]]
        if wrap_gap <= cluster_tol:
            clusters[0] = clusters.pop() + clusters[0]

    def _separation(x: float, y: float) -> float:
        gap = abs(x - y)
        return min(gap, 2.0 * np.pi - gap) if circular else gap

    warnings = []
    for i, left in enumerate(clusters):
        for right in clusters[i + 1 :]:
            gap = min(_separation(labels[a], labels[b]) for a in left for b in right)
            if gap <= AMBIGUITY_FACTOR * cluster_tol:
                warnings.append(
                    "ambiguous eigenvalue clustering: clusters separated by "
                    f"{gap:.3e}, within {AMBIGUITY_FACTOR:g}x cluster_tol "
                    f"{cluster_tol:.3e}"
                )

    members = []
    for indices in clusters:
        basis = vectors[:, indices]
        proj = basis @ basis.conj().T
        proj = (proj + proj.conj().T) / 2.0
        label_values = labels[indices]
        if circular and label_values.max() - label_values.min() > np.pi:
            # Wrapped cluster: average on the circle via the mean phasor.
            label = _principal_phase(np.mean(np.exp(-1j * label_values)))
        else:
            label = float(np.mean(label_values))
        members.append((proj, label, len(indices)))
    members.sort(key=lambda item: item[1])

    family = ProjectorFamily.from_projectors(
        a.dim, [(proj, label) for proj, label, _ in members]
    ).with_warnings(warnings)

    weights = [
        np.exp(-1j * m.eigenvalue) if circular else m.eigenvalue
        for m in family.members
    ]
    reconstruction = sum(
        w * m.projector.matrix for w, m in zip(weights, family.members)
    )
    error = spectral_norm(reconstruction - a.matrix)
    if error > RECONSTRUCTION_TOL * max(1.0, spectral_norm(a.matrix)):
        raise NumericalError(
            f"spectral reconstruction error {error:.3e} exceeds tolerance; "
            "cluster_tol may be too coarse for this spectrum"
        )
    return family


def operator_distance(a: Operator, b: Operator) -> float:
    """Spectral-norm distance ``||A - B||`` (largest singular value)."""
    if a.dim != b.dim:
        raise StructuralError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return spectral_norm(a.matrix - b.matrix)
