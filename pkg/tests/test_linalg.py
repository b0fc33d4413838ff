"""Operator containers, propagators, and spectral projections."""

from __future__ import annotations

import math

import numpy as np
import pytest

from zenodyn import (
    NumericalError,
    Operator,
    ProjectorFamily,
    QuantumState,
    StructuralError,
    eig_hermitian,
    operator_distance,
    propagator,
    spectral_norm,
    spectral_projections,
)
from conftest import random_hermitian, random_state, random_unitary

SIGMA_X = np.array([[0, 1.0], [1.0, 0]])
SIGMA_Z = np.diag([1.0, -1.0])


class TestOperator:
    def test_hermitian_flag_requires_hermiticity(self):
        with pytest.raises(StructuralError):
            Operator.hermitian(np.array([[0, 1.0], [0, 0]]))

    def test_unitary_flag_requires_unitarity(self):
        with pytest.raises(StructuralError):
            Operator.unitary(np.array([[1.0, 0], [0, 2.0]]))

    def test_rejects_nonsquare_and_nonfinite(self):
        with pytest.raises(StructuralError):
            Operator.general(np.ones((2, 3)))
        with pytest.raises(StructuralError):
            Operator.general(np.array([[np.inf, 0], [0, 1.0]]))

    def test_dagger_of_unitary_is_inverse(self, rng):
        u = random_unitary(rng, 4)
        assert spectral_norm(u.matrix @ u.dagger().matrix - np.eye(4)) < 1e-12

    def test_general_matrices_are_accepted_as_is(self):
        op = Operator.general(np.array([[0, 1.0], [0, -1j]]))
        assert op.kind == "general"
        assert op.dim == 2


class TestQuantumState:
    def test_pure_state_requires_normalization(self):
        with pytest.raises(StructuralError):
            QuantumState.pure(np.array([1.0, 1.0]))

    def test_density_requires_unit_trace_and_positivity(self):
        with pytest.raises(StructuralError):
            QuantumState.density(np.diag([0.7, 0.7]))
        with pytest.raises(StructuralError):
            QuantumState.density(np.diag([1.5, -0.5]))

    def test_basis_state_density_matrix(self):
        rho = QuantumState.basis_state(3, 1).to_density_matrix()
        expected = np.zeros((3, 3))
        expected[1, 1] = 1.0
        assert np.allclose(rho, expected)


class TestPropagator:
    def test_identity_at_zero_time(self):
        h = Operator.hermitian(SIGMA_X)
        assert np.array_equal(propagator(h, 0.0).matrix, np.eye(2))

    def test_hermitian_generator_yields_unitary(self, rng):
        h = random_hermitian(rng, 5)
        u = propagator(h, 0.73)
        assert u.kind == "unitary"
        assert spectral_norm(u.matrix @ u.matrix.conj().T - np.eye(5)) < 1e-12

    def test_composition_property(self, rng):
        h = random_hermitian(rng, 4)
        s, t = 0.31, 1.7
        gap = propagator(h, s).matrix @ propagator(h, t).matrix - propagator(h, s + t).matrix
        assert spectral_norm(gap) < 1e-12

    def test_inverse_is_negative_time(self, rng):
        h = random_hermitian(rng, 3)
        gap = propagator(h, 0.9).matrix @ propagator(h, -0.9).matrix - np.eye(3)
        assert spectral_norm(gap) < 1e-12

    def test_general_generator_matches_series(self):
        # Non-Hermitian 2x2 checked against a brute-force Taylor series.
        g = np.array([[0.0, 0.5], [0.5, -0.6j]])
        t = 0.8
        series = np.eye(2, dtype=complex)
        term = np.eye(2, dtype=complex)
        for k in range(1, 60):
            term = term @ (-1j * g * t) / k
            series += term
        u = propagator(Operator.general(g), t)
        assert u.kind == "general"
        assert spectral_norm(u.matrix - series) < 1e-12

    def test_rejects_nonfinite_time(self):
        with pytest.raises(StructuralError):
            propagator(Operator.hermitian(SIGMA_X), math.inf)


class TestEigHermitian:
    def test_reconstructs_input(self, rng):
        h = random_hermitian(rng, 6)
        values, basis = eig_hermitian(h)
        v = basis.matrix
        assert spectral_norm((v * values) @ v.conj().T - h.matrix) < 1e-12

    def test_requires_hermitian_flag(self):
        with pytest.raises(StructuralError):
            eig_hermitian(Operator.general(SIGMA_X))


class TestSpectralProjectionsHermitian:
    def test_sigma_z_projections(self):
        family = spectral_projections(Operator.hermitian(SIGMA_Z))
        assert [m.eigenvalue for m in family.members] == [-1.0, 1.0]
        assert [m.rank for m in family.members] == [1, 1]
        assert np.allclose(family.members[1].projector.matrix, np.diag([1.0, 0.0]))

    def test_degenerate_eigenvalue_merges_into_one_projector(self):
        h = Operator.hermitian(np.diag([2.0, 2.0, -1.0]))
        family = spectral_projections(h)
        assert sorted(m.rank for m in family.members) == [1, 2]

    def test_completeness_and_orthogonality(self, rng):
        h = random_hermitian(rng, 5)
        family = spectral_projections(h)
        projs = family.projectors()
        assert spectral_norm(sum(projs) - np.eye(5)) < 1e-10
        for i, p in enumerate(projs):
            assert spectral_norm(p @ p - p) < 1e-10
            for q in projs[i + 1 :]:
                assert spectral_norm(p @ q) < 1e-10

    def test_reconstruction_from_members(self, rng):
        h = random_hermitian(rng, 4)
        family = spectral_projections(h)
        rebuilt = sum(m.eigenvalue * m.projector.matrix for m in family.members)
        assert spectral_norm(rebuilt - h.matrix) < 1e-9


class TestSpectralProjectionsUnitary:
    def test_eigenphase_convention(self):
        # U = exp(-i lambda) with lambda in (-pi, pi]: diag(1, -1) has
        # phases 0 and pi (not -pi), diag(exp(-i 0.4)) has phase +0.4.
        family = spectral_projections(Operator.unitary(np.diag([1.0, -1.0])))
        assert [m.eigenvalue for m in family.members] == [0.0, np.pi]
        family = spectral_projections(
            Operator.unitary(np.diag([np.exp(-0.4j), np.exp(0.9j)]))
        )
        assert sorted(m.eigenvalue for m in family.members) == pytest.approx([-0.9, 0.4])

    def test_degenerate_phases_cluster(self):
        u = Operator.unitary(np.diag([1.0, 1.0, -1j]))
        family = spectral_projections(u)
        assert sorted(m.rank for m in family.members) == [1, 2]

    def test_reconstruction_with_phase_weights(self, rng):
        u = random_unitary(rng, 5)
        family = spectral_projections(u)
        rebuilt = sum(
            np.exp(-1j * m.eigenvalue) * m.projector.matrix for m in family.members
        )
        assert spectral_norm(rebuilt - u.matrix) < 1e-9

    def test_wraparound_phases_merge_across_branch_cut(self):
        # Eigenphases just either side of +-pi belong to one physical
        # cluster once the circle is closed.
        eps = 1e-14
        u = Operator.unitary(np.diag([np.exp(-1j * (np.pi - eps)),
                                      np.exp(-1j * (-np.pi + eps)), 1.0]))
        family = spectral_projections(u, cluster_tol=1e-9)
        assert sorted(m.rank for m in family.members) == [1, 2]

    def test_ambiguity_warning_near_cluster_tolerance(self):
        u = Operator.unitary(np.diag([1.0, np.exp(-4e-9j), np.exp(-1j)]))
        family = spectral_projections(u, cluster_tol=1e-9)
        assert any("ambiguous" in w for w in family.warnings)

    def test_requires_flagged_operator(self):
        with pytest.raises(StructuralError):
            spectral_projections(Operator.general(SIGMA_X))


class TestProjectorFamily:
    def test_from_spans_builds_basis_projectors(self):
        family = ProjectorFamily.from_spans(3, [(0,), (1, 2)])
        assert [m.rank for m in family.members] == [1, 2]
        assert np.allclose(family.projectors()[1], np.diag([0.0, 1.0, 1.0]))

    def test_rejects_incomplete_partition(self):
        with pytest.raises(StructuralError):
            ProjectorFamily.from_spans(3, [(0,), (1,)])

    def test_rejects_overlapping_projectors(self):
        p = np.diag([1.0, 0.0])
        with pytest.raises(StructuralError):
            ProjectorFamily.from_projectors(2, [(p, 0.0), (p, 1.0)])

    def test_rejects_non_idempotent_member(self):
        with pytest.raises(StructuralError):
            ProjectorFamily.from_projectors(2, [(0.5 * np.eye(2), 0.0), (0.5 * np.eye(2), 1.0)])

    def test_trivial_family_is_identity(self):
        family = ProjectorFamily.trivial(4)
        assert len(family.members) == 1
        assert np.allclose(family.projectors()[0], np.eye(4))


class TestDistances:
    def test_operator_distance_is_spectral(self):
        a = Operator.general(np.diag([1.0, 0.0]))
        b = Operator.general(np.diag([0.0, 0.0]))
        assert operator_distance(a, b) == pytest.approx(1.0)

    def test_spectral_norm_matches_numpy(self, rng):
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert spectral_norm(m) == pytest.approx(float(np.linalg.norm(m, 2)))


class TestStationaryStates:
    def test_survival_of_eigenvector_is_constant(self, rng):
        h = random_hermitian(rng, 4)
        _, basis = eig_hermitian(h)
        psi = QuantumState.pure(basis.matrix[:, 2])
        u = propagator(h, 3.1).matrix
        assert abs(abs(np.vdot(psi.vector, u @ psi.vector)) - 1.0) < 1e-12

    def test_random_state_norm_preserved(self, rng):
        h = random_hermitian(rng, 6)
        psi = random_state(rng, 6)
        evolved = propagator(h, 2.2).matrix @ psi.vector
        assert abs(np.linalg.norm(evolved) - 1.0) < 1e-12
