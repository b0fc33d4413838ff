"""Shared randomized-matrix helpers, all driven by seeded generators."""

from __future__ import annotations

import numpy as np
import pytest

from zenodyn import Operator, ProjectorFamily, QuantumState


def random_hermitian(rng: np.random.Generator, dim: int) -> Operator:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return Operator.hermitian((a + a.conj().T) / 2.0)


def random_unitary(rng: np.random.Generator, dim: int) -> Operator:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return Operator.unitary(q)


def random_state(rng: np.random.Generator, dim: int) -> QuantumState:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return QuantumState.pure(v / np.linalg.norm(v))


def random_family(rng: np.random.Generator, dim: int) -> ProjectorFamily:
    """A projector family from the eigenspaces of a random basis rotation."""
    u = random_unitary(rng, dim).matrix
    cut = int(rng.integers(1, dim))
    members = []
    for columns in (u[:, :cut], u[:, cut:]):
        members.append(columns @ columns.conj().T)
    return ProjectorFamily.from_projectors(
        dim, [(matrix, float(k)) for k, matrix in enumerate(members)]
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260816)
