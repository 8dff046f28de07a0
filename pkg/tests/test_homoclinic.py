import numpy as np
import pytest

from diracsoliton import (
    NLDParams,
    angle_monotone,
    d0_apply,
    equilibria,
    hamiltonian,
    initial_condition,
    integrate_homoclinic,
    kernel_check_on_Y,
)


class TestNLDParams:
    def test_detuning_outside_window_rejected(self):
        with pytest.raises(ValueError, match="mu_sharp"):
            NLDParams(1.0, 0.5, 0.5, 1.0, 0.0)

    def test_beta_ordering_rejected(self):
        with pytest.raises(ValueError, match="beta"):
            NLDParams(1.0, 1.0, 0.0, 0.3, 0.5)

    def test_zero_coefficients_rejected(self):
        with pytest.raises(ValueError):
            NLDParams(0.0, 1.0, 0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            NLDParams(1.0, 0.0, 0.0, 1.0, 0.0)

    def test_derived_quartic_coefficients(self):
        p = NLDParams(1.0, 1.0, 0.0, 1.0, 0.0)
        assert p.a == pytest.approx(0.75)
        assert p.b == pytest.approx(0.75)
        q = NLDParams(1.0, 1.0, 0.0, 2.0, -1.0)
        assert q.a == pytest.approx(2.25)
        assert q.b == pytest.approx(1.25)
        assert q.a >= 0.0 and q.b > 0.0

    def test_decay_rate(self):
        p = NLDParams(-2.0, 1.0, 0.6, 1.0, 0.0)
        assert p.decay_rate == pytest.approx(np.sqrt(1.0 - 0.36) / 2.0)


class TestHamiltonian:
    def test_origin_is_zero(self, canonical_params):
        assert hamiltonian(canonical_params, 0.0, 0.0) == 0.0

    def test_launch_point_on_zero_level(self, canonical_params):
        u0, v0 = initial_condition(canonical_params)
        assert u0 == pytest.approx(np.sqrt(8.0 / 3.0), rel=1e-14)
        assert v0 == 0.0
        assert hamiltonian(canonical_params, u0, v0) == pytest.approx(0.0, abs=1e-14)

    def test_side_equilibrium_energy(self, canonical_params):
        # H at (sqrt((theta - mu)/b), 0) equals -(theta - mu)^2 / (4b)
        r = np.sqrt(4.0 / 3.0)
        assert hamiltonian(canonical_params, r, 0.0) == pytest.approx(-1.0 / 3.0)


class TestInitialCondition:
    def test_amplitude_vanishes_at_gap_edge(self):
        p = NLDParams(1.0, 1.0, 0.999, 1.0, 0.0)
        u0, _ = initial_condition(p)
        assert u0 < 0.06

    def test_negative_theta_launches_on_v_axis(self):
        p = NLDParams(1.0, -1.0, 0.0, 1.0, 0.0)
        u0, v0 = initial_condition(p)
        assert u0 == 0.0 and v0 > 0.0


class TestEquilibria:
    def test_positive_theta_on_u_axis(self, canonical_params):
        pts = equilibria(canonical_params)
        assert (0.0, 0.0) in pts
        us = sorted(u for u, v in pts if v == 0.0 and u != 0.0)
        assert us[0] == pytest.approx(-np.sqrt(4.0 / 3.0))
        assert us[1] == pytest.approx(np.sqrt(4.0 / 3.0))

    def test_negative_theta_on_v_axis(self):
        p = NLDParams(1.0, -1.0, 0.0, 1.0, 0.0)
        pts = equilibria(p)
        assert all(u == 0.0 for u, v in pts)


class TestIntegration:
    def test_energy_conservation(self, canonical_profile):
        assert np.max(np.abs(canonical_profile.hamiltonian_trace)) <= 1e-9
        assert canonical_profile.h_drift_max <= 1e-9

    def test_parity(self, canonical_profile):
        u1, v1 = canonical_profile.evaluate(3.17)
        u2, v2 = canonical_profile.evaluate(-3.17)
        assert u1 == pytest.approx(u2, abs=1e-9)
        assert v1 == pytest.approx(-v2, abs=1e-9)

    def test_decay_rate_fit(self, canonical_profile):
        assert canonical_profile.decay_rate_fit == pytest.approx(1.0, rel=0.02)

    def test_angle_monotone(self, canonical_profile):
        assert angle_monotone(canonical_profile)

    def test_spinor_conjugation(self, canonical_profile):
        assert np.array_equal(
            canonical_profile.psi_plus, np.conj(canonical_profile.psi_minus)
        )

    def test_short_domain_rejected(self, canonical_params):
        with pytest.raises(ValueError, match="decay lengths"):
            integrate_homoclinic(canonical_params, y_max=3.0)

    def test_negative_theta_swaps_parity(self):
        p = NLDParams(1.0, -1.0, 0.0, 1.0, 0.0)
        prof = integrate_homoclinic(p, y_max=20.0)
        u1, v1 = prof.evaluate(2.3)
        u2, v2 = prof.evaluate(-2.3)
        assert u1 == pytest.approx(-u2, abs=1e-9)
        assert v1 == pytest.approx(v2, abs=1e-9)

    def test_detuned_runs_conserve_energy(self):
        for mu in (0.3, 0.6):
            p = NLDParams(1.0, 1.0, mu, 1.0, 0.0)
            prof = integrate_homoclinic(p)
            assert prof.h_drift_max <= 1e-9
            assert prof.decay_rate_fit == pytest.approx(p.decay_rate, rel=0.02)

    def test_default_example_profile(self, default_profile, default_params):
        assert default_profile.h_drift_max <= 1e-9
        assert default_profile.decay_rate_fit == pytest.approx(
            default_params.decay_rate, rel=0.02
        )


class TestLinearization:
    def test_derivative_spinor_near_kernel(self, canonical_params, canonical_profile):
        eta = canonical_profile.dpsi_at(canonical_profile.y_grid)
        out = d0_apply(canonical_params, canonical_profile, eta)
        assert np.linalg.norm(out) <= 1e-6 * np.linalg.norm(eta)

    def test_zero_maps_to_zero(self, canonical_params, canonical_profile):
        eta = np.zeros((2, len(canonical_profile.y_grid)), dtype=complex)
        out = d0_apply(canonical_params, canonical_profile, eta)
        assert np.all(out == 0.0)

    def test_soliton_itself_not_in_kernel(self, canonical_params, canonical_profile):
        eta = canonical_profile.psi_at(canonical_profile.y_grid)
        out = d0_apply(canonical_params, canonical_profile, eta)
        assert np.linalg.norm(out) > 1e-3 * np.linalg.norm(eta)

    def test_grid_mismatch_rejected(self, canonical_params, canonical_profile):
        with pytest.raises(ValueError, match="shape"):
            d0_apply(canonical_params, canonical_profile, np.zeros((2, 7)))

    def test_linearity(self, canonical_params, canonical_profile):
        n = len(canonical_profile.y_grid)
        rng = np.random.default_rng(7)
        e1 = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
        e2 = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
        out = d0_apply(canonical_params, canonical_profile, 2.0 * e1 + 3j * e2)
        ref = 2.0 * d0_apply(
            canonical_params, canonical_profile, e1
        ) + 3j * d0_apply(canonical_params, canonical_profile, e2)
        assert np.allclose(out, ref, atol=1e-10)


class TestKernelCheck:
    def test_restricted_vs_unrestricted(self, canonical_params, canonical_profile):
        res = kernel_check_on_Y(canonical_params, canonical_profile)
        assert res.sigma_min_unrestricted <= 1e-4 * res.operator_norm
        assert res.sigma_min_restricted >= 10.0 * res.sigma_min_unrestricted
        assert res.sigma_min_restricted >= 0.1 * np.sqrt(
            canonical_params.theta_sharp**2 - canonical_params.mu_sharp**2
        )

    def test_gap_closing_trend(self):
        sigmas = []
        for mu in (0.0, 0.5, 0.8):
            p = NLDParams(1.0, 1.0, mu, 1.0, 0.0)
            prof = integrate_homoclinic(p)
            sigmas.append(kernel_check_on_Y(p, prof).sigma_min_restricted)
        assert sigmas[0] > sigmas[1] > sigmas[2]

    def test_negative_theta_restriction(self):
        p = NLDParams(1.0, -1.0, 0.0, 1.0, 0.0)
        prof = integrate_homoclinic(p, y_max=20.0)
        res = kernel_check_on_Y(p, prof)
        assert res.sigma_min_restricted >= 10.0 * res.sigma_min_unrestricted
