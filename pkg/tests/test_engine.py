"""Zeno procedures, their limits, and convergence diagnostics."""

from __future__ import annotations

import math

import numpy as np
import pytest

from zenodyn import (
    CouplingSpec,
    KickSpec,
    ModelParams,
    Operator,
    PreconditionError,
    ProjectorFamily,
    PulsedSpec,
    QuantumState,
    StructuralError,
    SurvivalUnderflowError,
    ZenoSplit,
    continuous_evolve,
    continuous_limit,
    control_operator,
    convergence_profile,
    coupling_base,
    dephase,
    effective_decay_rate,
    kicked_evolve,
    kicked_limit,
    nonselective_evolve,
    offdiagonal_leakage,
    operator_distance,
    propagator,
    pulsed_limit_evolution,
    pulsed_selective_evolve,
    rabi_two_level,
    spectral_norm,
    spectral_projections,
    survival_amplitude,
    survival_probability,
    three_level_ideal,
    zeno_hamiltonian,
    zeno_limit_nonselective,
    zeno_time,
)
from conftest import random_family, random_hermitian, random_state

RABI = rabi_two_level(ModelParams(omega=1.0))
KET1_2 = QuantumState.basis_state(2, 0)
P1_2 = Operator.hermitian(np.diag([1.0, 0.0]))


def ideal_three_level(omega_prime: float):
    return three_level_ideal(ModelParams(omega=1.0, omega_prime=omega_prime))


def symmetric_family_3() -> ProjectorFamily:
    """The one + two dimensional split aligned with the control spectrum:
    level 1 alone, and the symmetric/antisymmetric pair of levels 2, 3."""
    half = 0.5 * np.array([[0, 0, 0], [0, 1.0, 1.0], [0, 1.0, 1.0]])
    other = 0.5 * np.array([[0, 0, 0], [0, 1.0, -1.0], [0, -1.0, 1.0]])
    p0 = np.diag([1.0, 0.0, 0.0])
    return ProjectorFamily.from_projectors(
        3, [(other, -0.5), (p0, 0.0), (half, 0.5)]
    )


class TestSurvival:
    def test_amplitude_and_probability_rabi(self):
        amp = survival_amplitude(RABI, KET1_2, math.pi / 3)
        assert amp == pytest.approx(0.8660254037844387, rel=1e-12)
        assert survival_probability(RABI, KET1_2, math.pi / 3) == pytest.approx(
            0.75, rel=1e-12
        )

    def test_probability_of_density_matrix(self):
        from zenodyn import survival_probability_density

        rho = QuantumState.density(np.diag([1.0, 0.0]))
        value = survival_probability_density(RABI, rho, P1_2, math.pi / 3)
        assert value == pytest.approx(0.75, rel=1e-12)

    def test_density_survival_requires_support_in_projector(self):
        from zenodyn import survival_probability_density

        mixed = QuantumState.density(np.diag([0.5, 0.5]))
        with pytest.raises(PreconditionError):
            survival_probability_density(RABI, mixed, P1_2, 0.9)

    def test_survival_is_even_in_time(self):
        assert survival_probability(RABI, KET1_2, 0.7) == pytest.approx(
            survival_probability(RABI, KET1_2, -0.7), rel=1e-13
        )


class TestZenoTime:
    def test_rabi_value(self):
        # Energy variance omega^2/4 in the initial level -> 2/omega.
        assert zeno_time(RABI, KET1_2) == pytest.approx(2.0, rel=1e-12)
        h2 = rabi_two_level(ModelParams(omega=2.0))
        assert zeno_time(h2, KET1_2) == pytest.approx(1.0, rel=1e-12)

    def test_short_time_quadratic_law(self):
        tau_z = zeno_time(RABI, KET1_2)
        t = 1e-4
        p = survival_probability(RABI, KET1_2, t)
        assert 1.0 - p == pytest.approx((t / tau_z) ** 2, rel=1e-6)

    def test_stationary_state_returns_infinity(self):
        h = Operator.hermitian(np.diag([1.0, -1.0]))
        assert zeno_time(h, KET1_2) == math.inf

    def test_requires_hermitian(self):
        g = Operator.general(np.array([[0, 0.5], [0.5, -1j]]))
        with pytest.raises(StructuralError):
            zeno_time(g, KET1_2)


class TestEffectiveDecayRate:
    def test_frozen_value(self):
        # -(1/tau) log cos^2(omega tau / 2) at tau = 0.2, omega = 1.
        assert effective_decay_rate(RABI, KET1_2, 0.2) == pytest.approx(
            0.05008355623235254, rel=1e-12
        )

    def test_linear_regime_matches_variance_law(self):
        # gamma_eff(tau) -> tau / tau_Z^2 as tau -> 0.
        tau = 1e-3
        tau_z = zeno_time(RABI, KET1_2)
        ratio = effective_decay_rate(RABI, KET1_2, tau) * tau_z**2 / tau
        assert ratio == pytest.approx(1.0, rel=1e-6)

    def test_rejects_nonpositive_interval(self):
        with pytest.raises(PreconditionError):
            effective_decay_rate(RABI, KET1_2, 0.0)

    def test_near_node_interval_gives_large_finite_rate(self):
        # At omega*tau = pi the survival sits at the oscillation node;
        # in floats it is ~1e-33, so the rate is huge but well defined.
        rate = effective_decay_rate(RABI, KET1_2, math.pi)
        assert math.isfinite(rate)
        assert rate > 20.0


class TestPulsedSelective:
    def test_survival_n100(self):
        spec = PulsedSpec(target=P1_2, n_steps=100, t=math.pi)
        state, survival = pulsed_selective_evolve(RABI, spec, KET1_2)
        assert survival == pytest.approx(0.9756269141438981, rel=1e-10)
        # The conditional state is pinned back onto the initial level.
        assert np.allclose(state.to_density_matrix(), np.diag([1.0, 0.0]), atol=1e-12)

    def test_survival_increases_with_pulse_count(self):
        values = []
        for n in (10, 100, 1000):
            spec = PulsedSpec(target=P1_2, n_steps=n, t=math.pi)
            values.append(pulsed_selective_evolve(RABI, spec, KET1_2)[1])
        assert values[0] == pytest.approx(0.7805460697811408, rel=1e-10)
        assert values[2] == pytest.approx(0.9975356394195499, rel=1e-10)
        assert values[0] < values[1] < values[2]

    def test_one_pulse_equals_plain_survival(self):
        spec = PulsedSpec(target=P1_2, n_steps=1, t=1.3)
        _, survival = pulsed_selective_evolve(RABI, spec, KET1_2)
        assert survival == pytest.approx(
            survival_probability(RABI, KET1_2, 1.3), rel=1e-12
        )

    def test_initial_state_must_live_in_projector_range(self):
        psi = QuantumState.pure(np.array([0.0, 1.0]))
        spec = PulsedSpec(target=P1_2, n_steps=5, t=1.0)
        with pytest.raises(PreconditionError):
            pulsed_selective_evolve(RABI, spec, psi)

    def test_survival_underflow_raises(self):
        # Ten measurements, each at an oscillation node: the product of
        # ten ~1e-33 survivals underflows double precision entirely.
        spec = PulsedSpec(target=P1_2, n_steps=10, t=10.0 * math.pi)
        with pytest.raises(SurvivalUnderflowError):
            pulsed_selective_evolve(RABI, spec, KET1_2)

    def test_multidimensional_projector_supports_inner_rotation(self):
        # Measuring a 2d subspace freezes leakage out of it but leaves
        # the dynamics inside it untouched (Zeno dynamics, not freezing).
        h_total, _, _ = ideal_three_level(3.0)
        p12 = Operator.hermitian(np.diag([1.0, 1.0, 0.0]))
        psi = QuantumState.basis_state(3, 0)
        spec = PulsedSpec(target=p12, n_steps=512, t=2.0)
        state, survival = pulsed_selective_evolve(h_total, spec, psi)
        assert survival > 0.99
        rho = state.to_density_matrix()
        # Population moved from level 1 to level 2 inside the subspace.
        assert rho[1, 1].real > 0.5


class TestPulsedLimit:
    def test_matches_compressed_propagator(self):
        h_total, _, _ = ideal_three_level(2.0)
        p12 = Operator.hermitian(np.diag([1.0, 1.0, 0.0]))
        v = pulsed_limit_evolution(h_total, p12, 1.1)
        php = p12.matrix @ h_total.matrix @ p12.matrix
        expected = p12.matrix @ propagator(Operator.hermitian(php), 1.1).matrix
        assert spectral_norm(v.matrix - expected) < 1e-12

    def test_group_property_and_adjoint(self):
        h_total, _, _ = ideal_three_level(2.0)
        p12 = Operator.hermitian(np.diag([1.0, 1.0, 0.0]))
        v = lambda t: pulsed_limit_evolution(h_total, p12, t).matrix
        assert spectral_norm(v(0.4) @ v(0.8) - v(1.2)) < 1e-12
        assert spectral_norm(v(0.9).conj().T - v(-0.9)) < 1e-12

    def test_pulsed_evolution_converges_to_limit(self):
        h_total, _, _ = ideal_three_level(2.0)
        p12 = Operator.hermitian(np.diag([1.0, 1.0, 0.0]))
        t = 1.7
        limit = pulsed_limit_evolution(h_total, p12, t).matrix
        u = propagator(h_total, t / 4096).matrix
        p = p12.matrix
        vn = np.linalg.matrix_power(p @ u @ p, 4096)
        assert spectral_norm(vn - limit) < 2e-3


class TestNonselective:
    def test_dephase_is_idempotent_and_trace_preserving(self, rng):
        family = random_family(rng, 4)
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        once = dephase(family, m)
        assert spectral_norm(dephase(family, once) - once) < 1e-12
        assert np.trace(once) == pytest.approx(np.trace(m), rel=1e-12)

    def test_single_round_rabi_populations(self):
        family = ProjectorFamily.from_spans(2, [(0,), (1,)])
        spec = PulsedSpec(target=family, n_steps=1, t=math.pi / 2)
        rho = nonselective_evolve(RABI, spec, KET1_2)
        assert rho.matrix[0, 0].real == pytest.approx(0.5, rel=1e-12)
        assert abs(rho.matrix[0, 1]) < 1e-15

    def test_trace_preserved_and_block_diagonal(self):
        h_total, _, _ = ideal_three_level(1.0)
        family = symmetric_family_3()
        spec = PulsedSpec(target=family, n_steps=64, t=2.0)
        rho = nonselective_evolve(h_total, spec, QuantumState.basis_state(3, 0))
        assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-12)
        assert spectral_norm(dephase(family, rho.matrix) - rho.matrix) < 1e-12

    def test_limit_conserves_subspace_probability(self):
        h_total, _, _ = ideal_three_level(1.0)
        family = symmetric_family_3()
        psi = QuantumState.pure(np.array([0.6, 0.8, 0.0], dtype=complex))
        rho_t = zeno_limit_nonselective(h_total, family, psi, 3.3)
        rho_0 = dephase(family, psi.to_density_matrix())
        for p in family.projectors():
            before = float(np.trace(p @ rho_0).real)
            after = float(np.trace(p @ rho_t.matrix).real)
            assert after == pytest.approx(before, abs=1e-12)

    def test_frequent_measurements_approach_the_limit(self):
        h_total, _, _ = ideal_three_level(1.0)
        family = symmetric_family_3()
        psi = QuantumState.basis_state(3, 0)
        t = 2.0
        limit = zeno_limit_nonselective(h_total, family, psi, t).matrix
        gaps = []
        for n in (64, 128):
            spec = PulsedSpec(target=family, n_steps=n, t=t)
            rho = nonselective_evolve(h_total, spec, psi).matrix
            gaps.append(spectral_norm(rho - limit))
        assert gaps[1] < gaps[0]


class TestZenoHamiltonian:
    def test_three_level_block_diagonal_form(self):
        # The symmetric split turns the ideal model into omega_prime
        # times its control operator: the omega coupling is projected out.
        h_total, _, h_control = ideal_three_level(3.0)
        hz = zeno_hamiltonian(h_total, symmetric_family_3())
        assert spectral_norm(hz.matrix - 3.0 * h_control.matrix) < 1e-12

    def test_commutes_with_every_projector(self, rng):
        h = random_hermitian(rng, 4)
        family = random_family(rng, 4)
        hz = zeno_hamiltonian(h, family).matrix
        for p in family.projectors():
            assert spectral_norm(p @ hz - hz @ p) < 1e-10


class TestLeakage:
    def test_single_step_rabi_is_sine(self):
        family = ProjectorFamily.from_spans(2, [(0,), (1,)])
        value = offdiagonal_leakage(RABI, family, 1, math.pi / 2)
        assert value == pytest.approx(0.7071067811865475, rel=1e-12)

    def test_decreases_with_measurement_frequency(self):
        h_total, _, _ = ideal_three_level(1.0)
        family = symmetric_family_3()
        t = 2.0 * math.pi
        values = [offdiagonal_leakage(h_total, family, n, t) for n in (256, 512, 1024)]
        assert values[0] > values[1] > values[2]
        assert values[1] / values[2] >= 1.5

    def test_zero_when_hamiltonian_is_block_diagonal(self):
        family = ProjectorFamily.from_spans(2, [(0,), (1,)])
        h = Operator.hermitian(np.diag([1.0, -1.0]))
        assert offdiagonal_leakage(h, family, 8, 1.0) == pytest.approx(0.0, abs=1e-14)


class TestKicked:
    def test_spin_echo_refocuses_even_kicks(self):
        # sigma_z kicks anticommute with the Rabi coupling: every pair of
        # kicked segments cancels, so survival is exactly 1 for even N.
        kick = Operator.unitary(np.diag([1.0, -1.0]))
        spec = KickSpec(kick=kick, n_steps=64, t=2.0)
        w = kicked_evolve(RABI, spec)
        # W^dagger's kick phases stripped: compare populations directly.
        amp = abs(w.matrix[0, 0]) ** 2
        assert amp == pytest.approx(1.0, rel=1e-12)

    def test_generic_kick_converges_to_zeno_dynamics(self):
        h_total, _, h_control = ideal_three_level(1.0)
        kick = propagator(h_control, 1.0)  # distinct eigenphases 0, +-0.5
        split = kicked_limit(h_total, kick)
        t = 2.0
        limit = propagator(split.hamiltonian, t).matrix
        gaps = []
        for n in (128, 256):
            spec = KickSpec(kick=kick, n_steps=n, t=t)
            w = kicked_evolve(h_total, spec).matrix
            stripped = np.linalg.matrix_power(kick.dagger().matrix, n) @ w
            gaps.append(spectral_norm(stripped - limit))
        assert gaps[1] < gaps[0]
        assert gaps[1] < 0.02

    def test_kicked_limit_matches_control_split(self):
        h_total, _, h_control = ideal_three_level(2.0)
        kick = propagator(h_control, 1.0)
        split = kicked_limit(h_total, kick)
        assert split.subspace_dims == (1, 1, 1)
        hz_direct = zeno_hamiltonian(h_total, spectral_projections(h_control))
        assert operator_distance(split.hamiltonian, hz_direct) < 1e-10


class TestContinuous:
    def test_added_coupling_reproduces_ideal_model(self):
        # Driving the system block with strength K equals the full model
        # whose omega_prime plays the coupling constant.
        p = ModelParams(omega=1.0, omega_prime=7.0)
        base = coupling_base("three_level_ideal", p)
        control = control_operator("three_level_ideal")
        u = continuous_evolve(base, CouplingSpec(control=control, strength=7.0), 1.3)
        expected = propagator(three_level_ideal(p)[0], 1.3)
        assert operator_distance(u, expected) < 1e-12

    def test_limit_split_labels_and_hamiltonian(self):
        h_total, _, h_control = ideal_three_level(3.0)
        split = continuous_limit(h_total, h_control)
        assert split.subspace_dims == (1, 1, 1)
        assert [m.eigenvalue for m in split.family.members] == \
            pytest.approx([-0.5, 0.0, 0.5])
        assert spectral_norm(split.hamiltonian.matrix - 3.0 * h_control.matrix) < 1e-12

    def test_strong_coupling_freezes_initial_level(self):
        base = coupling_base("three_level_ideal", ModelParams(omega=1.0, omega_prime=1.0))
        control = control_operator("three_level_ideal")
        psi = np.array([1.0, 0, 0], dtype=complex)
        for strength, floor in ((5.0, 0.85), (50.0, 0.998)):
            u = continuous_evolve(base, CouplingSpec(control=control, strength=strength), 4.0)
            assert abs(u.matrix[0, 0]) ** 2 > floor


class TestConvergenceProfile:
    T_GRID = np.linspace(0.0, 4.0 * math.pi, 41)[1:]

    def test_continuous_mode_rate(self):
        base = coupling_base("three_level_ideal", ModelParams(omega=1.0, omega_prime=1.0))
        control = control_operator("three_level_ideal")
        series = convergence_profile(
            "continuous", base, control, [10.0, 20.0, 40.0, 80.0], self.T_GRID
        )
        assert series.grid_name == "K"
        d = series.columns["distance"]
        assert all(b < a for a, b in zip(d, d[1:]))
        assert all(a / b >= 1.5 for a, b in zip(d, d[1:]))

    def test_pulsed_mode_shrinks_like_one_over_n(self):
        h_total, _, _ = ideal_three_level(2.0)
        p12 = Operator.hermitian(np.diag([1.0, 1.0, 0.0]))
        series = convergence_profile(
            "pulsed", h_total, p12, [4, 16, 64, 256], np.linspace(0.1, 2.0, 20)
        )
        d = series.columns["distance"]
        assert series.grid_name == "N"
        assert all(b < a for a, b in zip(d, d[1:]))

    def test_kicked_mode_converges(self):
        h_total, _, h_control = ideal_three_level(1.0)
        kick = propagator(h_control, 1.0)
        series = convergence_profile(
            "kicked", h_total, kick, [4, 16, 64, 256], np.linspace(0.1, 2.0, 20)
        )
        d = series.columns["distance"]
        assert all(b < a for a, b in zip(d, d[1:]))

    def test_rejects_bad_ladders(self):
        with pytest.raises(StructuralError):
            convergence_profile("pulsed", RABI, P1_2, [4, 4], [1.0])
        with pytest.raises(StructuralError):
            convergence_profile("pulsed", RABI, P1_2, [], [1.0])
        with pytest.raises(StructuralError):
            convergence_profile("sideways", RABI, P1_2, [4, 8], [1.0])


class TestZenoSplitContainer:
    def test_rejects_mismatched_dims(self):
        h_total, _, h_control = ideal_three_level(1.0)
        family = spectral_projections(h_control)
        hz = zeno_hamiltonian(h_total, family)
        with pytest.raises(StructuralError):
            ZenoSplit(family, hz, (3,))

    def test_rejects_non_block_diagonal_hamiltonian(self):
        h_total, _, h_control = ideal_three_level(1.0)
        family = spectral_projections(h_control)
        with pytest.raises(StructuralError):
            ZenoSplit(family, h_total, tuple(m.rank for m in family.members))
