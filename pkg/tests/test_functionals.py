import math

import numpy as np
import pytest

from hartree5d import (
    OMEGA4,
    PotentialSpec,
    RadialField,
    build_potential,
    cutoff_chi,
    energy,
    free_energy,
    g_of_f,
    grad_norm_sq,
    gradv_norm_sq,
    interaction_p,
    l2_norm_sq,
    local_mass,
    make_grid,
    mass,
    morawetz_p_chi,
    scaling_transform,
    solve_ground_state,
    threshold_f,
    virial_k,
    zero_potential,
)
from hartree5d.verify import random_smooth_fields


@pytest.fixture(scope="module")
def grid20():
    return make_grid(2048, 20.0)


def gauss(grid, half_width=1.0):
    return RadialField(grid, np.exp(-grid.nodes**2 / (2 * half_width**2)))


class TestMassAndEnergy:
    def test_zero_field(self, grid20):
        z = RadialField(grid20, np.zeros(grid20.n_points))
        V = zero_potential(grid20)
        assert mass(z) == 0.0
        assert energy(z, V) == 0.0
        assert free_energy(z) == 0.0

    def test_gaussian_mass(self, grid20):
        assert mass(gauss(grid20)) == pytest.approx(np.pi**2.5, rel=1e-4)

    def test_mass_homogeneity(self, grid20):
        u = gauss(grid20)
        cu = RadialField(grid20, 1.3 * u.values)
        assert mass(cu) == pytest.approx(1.3**2 * mass(u), rel=1e-14)

    def test_ground_state_identities(self, gs_mid):
        # Free energy of Q is half its mass; the mass-energy product equals
        # (1/6) |Q|^2 |grad Q|^2.
        q = gs_mid.q
        m = gs_mid.mass_q
        assert free_energy(q) == pytest.approx(m / 2, rel=1e-3)
        me = mass(q) * free_energy(q)
        assert me == pytest.approx(m * gs_mid.grad_sq_q / 6, rel=1e-3)

    def test_energy_with_potential_exceeds_free(self, grid20, gs_mid):
        V = build_potential(PotentialSpec.gaussian(0.5, 1.0), grid20)
        u = gauss(grid20)
        assert energy(u, V) >= free_energy(u)
        assert gradv_norm_sq(u, V) >= grad_norm_sq(u)


class TestGradVNorm:
    def test_zero_potential_is_plain_gradient(self, grid20):
        u = gauss(grid20)
        assert gradv_norm_sq(u, zero_potential(grid20)) == grad_norm_sq(u)

    def test_gaussian_potential_value(self, grid20):
        # grad term omega_4 * 15 sqrt(pi)/16 plus potential term
        # omega_4 int r^4 exp(-2 r^2) dr = omega_4 * (3/32) sqrt(pi/2).
        u = gauss(grid20)
        V = build_potential(PotentialSpec.gaussian(1.0, 1.0), grid20)
        exact = OMEGA4 * (15 * np.sqrt(np.pi) / 16 + (3 / 32) * np.sqrt(np.pi / 2))
        assert gradv_norm_sq(u, V) == pytest.approx(exact, rel=1e-4)

    def test_monotone_in_potential(self, grid20):
        u = gauss(grid20)
        v1 = build_potential(PotentialSpec.gaussian(0.5, 1.0), grid20)
        v2 = build_potential(PotentialSpec.gaussian(1.5, 1.0), grid20)
        assert gradv_norm_sq(u, v1) <= gradv_norm_sq(u, v2)


class TestVirialK:
    def test_zero_field(self, grid20):
        z = RadialField(grid20, np.zeros(grid20.n_points))
        assert virial_k(z, zero_potential(grid20)) == 0.0

    def test_vanishes_at_ground_state(self, gs_mid):
        V = zero_potential(gs_mid.q.grid)
        assert abs(virial_k(gs_mid.q, V)) < 1e-3 * gs_mid.mass_q

    def test_scaled_ground_state_follows_homogeneity(self, gs_mid):
        # K(cQ) = c^2 |grad Q|^2 - (3/4) c^4 P(Q) exactly, and it is negative
        # at c = 1.1 since the quartic term overtakes.
        V = zero_potential(gs_mid.q.grid)
        c = 1.1
        cq = RadialField(gs_mid.q.grid, c * gs_mid.q.values)
        expected = c**2 * gs_mid.grad_sq_q - 0.75 * c**4 * gs_mid.p_q
        got = virial_k(cq, V)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got < 0.0

    def test_energy_relation_without_potential(self, grid20):
        # K = 3 E_0 - |grad u|^2 / 2 is an exact algebraic identity.
        V = zero_potential(grid20)
        for u in random_smooth_fields(grid20, 10, seed=5):
            k = virial_k(u, V)
            alt = 3.0 * free_energy(u) - 0.5 * grad_norm_sq(u)
            assert k == pytest.approx(alt, rel=1e-10, abs=1e-12)


class TestThreshold:
    def test_f_at_ground_state_is_one(self, gs_mid):
        V = zero_potential(gs_mid.q.grid)
        assert threshold_f(gs_mid.q, V, gs_mid) == pytest.approx(1.0, abs=1e-12)

    def test_f_scales_quadratically(self, gs_mid):
        V = zero_potential(gs_mid.q.grid)
        cq = RadialField(gs_mid.q.grid, 0.9 * gs_mid.q.values)
        assert threshold_f(cq, V, gs_mid) == pytest.approx(0.81, abs=1e-12)

    def test_rejects_unconverged_gs(self, grid20):
        stale = solve_ground_state(grid20, tol=1e-10, max_iter=1)
        assert not stale.converged
        with pytest.raises(ValueError):
            threshold_f(gauss(grid20), zero_potential(grid20), stale)

    def test_g_values(self):
        assert g_of_f(0.0) == 0.0
        assert g_of_f(1.0) == 1.0
        assert g_of_f(0.5) == 0.5
        # g <= 1 with equality only at f = 1.
        f = np.linspace(0.0, 2.0, 101)
        assert np.all(3 * f**2 - 2 * f**3 <= 1.0 + 1e-15)


class TestCutoff:
    def test_plateau_and_tail(self):
        g = make_grid(16, 8.0)
        chi = cutoff_chi(5.0, g).values
        assert np.all(chi[g.nodes <= 2.5] == 1.0)
        assert np.all(chi[g.nodes >= 5.0] == 0.0)
        # Ramp midpoint r = 3R/4 = 3.75 is node 7.
        assert chi[7] == pytest.approx(0.5, abs=1e-14)

    def test_slope_bound(self):
        g = make_grid(2048, 30.0)
        R = 10.0
        chi = cutoff_chi(R, g).values
        slopes = np.abs(np.diff(chi)) / g.h
        assert slopes.max() <= 3.0 / R * (1 + 1e-12)
        assert slopes.max() >= 3.0 / R * (1 - 1e-3)

    def test_rejects_radius_outside_domain(self):
        g = make_grid(64, 10.0)
        with pytest.raises(ValueError):
            cutoff_chi(11.0, g)


class TestLocalMassAndMorawetz:
    def test_zero_field(self, grid20):
        z = RadialField(grid20, np.zeros(grid20.n_points))
        assert local_mass(z, 5.0) == 0.0
        assert morawetz_p_chi(z, 5.0) == 0.0

    def test_full_domain_recovers_mass(self, grid20):
        u = gauss(grid20)
        assert local_mass(u, grid20.r_max) == mass(u)

    def test_rejects_oversized_radius(self, grid20):
        with pytest.raises(ValueError):
            local_mass(gauss(grid20), grid20.r_max + 1.0)

    def test_cutoff_shrinks_interaction(self, grid20):
        for u in random_smooth_fields(grid20, 8, seed=9):
            p_full = interaction_p(u)
            for R in (4.0, 8.0, 16.0):
                assert morawetz_p_chi(u, R) <= p_full * (1 + 1e-12)


class TestScalingSymmetry:
    @pytest.mark.parametrize("lam", [0.5, 0.75, 1.5, 2.0])
    def test_norm_product_invariant(self, lam):
        g = make_grid(4096, 30.0)
        u = gauss(g)
        base = math.sqrt(l2_norm_sq(u) * grad_norm_sq(u))
        ul = scaling_transform(u, lam)
        product = math.sqrt(l2_norm_sq(ul) * grad_norm_sq(ul))
        assert product == pytest.approx(base, rel=1e-3)

    def test_identity_at_lambda_one(self, grid20):
        u = gauss(grid20)
        out = scaling_transform(u, 1.0)
        assert np.allclose(out.values, u.values, rtol=1e-14, atol=0.0)
