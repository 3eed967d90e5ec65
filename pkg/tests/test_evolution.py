import numpy as np
import pytest
from scipy.linalg import eigh

from hartree5d import (
    EvolutionConfig,
    RadialField,
    evolve,
    l2_norm_sq,
    linear_substep,
    make_grid,
    mass,
    nonlinear_substep,
    scaling_transform,
    virial_check,
    zero_potential,
)
from hartree5d.evolution import STATUS_BLOWUP, STATUS_COMPLETED, STATUS_UNDERFLOW
from hartree5d.potentials import PotentialSpec, build_potential


def random_complex_field(grid, seed=0, width=2.0):
    rng = np.random.default_rng(seed)
    envelope = np.exp(-grid.nodes**2 / (2 * width**2))
    phase = np.exp(1j * rng.uniform(-1, 1) * grid.nodes**2 / 5)
    return RadialField(grid, rng.uniform(0.5, 1.5) * envelope * phase)


class TestNonlinearSubstep:
    def test_zero_dt_is_identity(self):
        g = make_grid(256, 15.0)
        u = random_complex_field(g, 1)
        out = nonlinear_substep(u, zero_potential(g), 0.0)
        assert np.allclose(out.values, u.values, rtol=0, atol=0)

    def test_preserves_mass_exactly(self):
        g = make_grid(256, 15.0)
        u = random_complex_field(g, 2)
        V = build_potential(PotentialSpec.gaussian(0.5, 1.0), g)
        out = nonlinear_substep(u, V, 0.37)
        assert mass(out) == pytest.approx(mass(u), rel=1e-14)
        # Pointwise modulus untouched, only the phase turns.
        assert np.allclose(np.abs(out.values), np.abs(u.values), rtol=1e-14)

    def test_zero_field_stays_zero(self):
        g = make_grid(256, 15.0)
        out = nonlinear_substep(
            RadialField(g, np.zeros(256, complex)), zero_potential(g), 0.5
        )
        assert np.all(out.values == 0.0)


class TestLinearSubstep:
    def test_zero_dt_is_identity(self):
        g = make_grid(256, 15.0)
        u = random_complex_field(g, 3)
        out = linear_substep(u, 0.0)
        assert np.allclose(out.values, u.values, rtol=1e-14)

    def test_unitary_in_weighted_norm(self):
        g = make_grid(512, 20.0)
        u = random_complex_field(g, 4)
        m0 = l2_norm_sq(u)
        out = u
        for _ in range(20):
            out = linear_substep(out, 1e-2)
        assert abs(l2_norm_sq(out) - m0) / m0 < 1e-12

    def test_eigenmode_picks_up_cayley_phase(self):
        g = make_grid(32, 6.0)
        d = np.sqrt(g.weights)
        neg_lap = np.diag(-g.lap_diag) + np.diag(-g.lap_upper, 1) + np.diag(-g.lap_lower, -1)
        vals, vecs = eigh(neg_lap * (d[:, None] / d[None, :]))
        k, dt = 5, 1e-2
        lam, e_k = vals[k], vecs[:, k] / d
        out = linear_substep(RadialField(g, e_k.astype(complex)), dt)
        factor = (1 - 0.5j * lam * dt) / (1 + 0.5j * lam * dt)
        assert np.allclose(out.values, factor * e_k, rtol=1e-10, atol=1e-12)


class TestEvolve:
    def test_zero_initial_data(self, gs_mid):
        g = gs_mid.q.grid
        cfg = EvolutionConfig(dt=1e-2, t_end=0.1, output_every=2)
        out = evolve(RadialField(g, np.zeros(g.n_points, complex)), zero_potential(g), cfg, gs_mid)
        assert out.status == STATUS_COMPLETED
        assert out.t_final == pytest.approx(0.1, rel=1e-12)
        for row in out.series:
            assert row.mass == 0.0 and row.energy == 0.0 and row.f == 0.0
            assert row.sup_abs == 0.0 and row.local_mass == 0.0

    def test_conservation_short_run(self, gs_mid):
        g = gs_mid.q.grid
        u0 = RadialField(g, 0.9 * gs_mid.q.values)
        cfg = EvolutionConfig(dt=1e-3, t_end=0.2, output_every=20)
        out = evolve(u0, zero_potential(g), cfg, gs_mid)
        assert out.status == STATUS_COMPLETED
        masses = [r.mass for r in out.series]
        energies = [r.energy for r in out.series]
        assert max(abs(m - masses[0]) for m in masses) / masses[0] < 1e-10
        assert max(abs(e - energies[0]) for e in energies) / abs(energies[0]) < 1e-5

    def test_series_timestamps_increase_and_end_at_t_end(self, gs_mid):
        g = gs_mid.q.grid
        u0 = RadialField(g, 0.5 * gs_mid.q.values)
        cfg = EvolutionConfig(dt=1e-3, t_end=0.05, output_every=7)
        out = evolve(u0, zero_potential(g), cfg, gs_mid)
        times = [r.t for r in out.series]
        assert times[0] == 0.0
        assert all(b > a for a, b in zip(times, times[1:]))
        assert times[-1] == pytest.approx(0.05, rel=1e-12)

    def test_trapping_below_threshold(self, gs_mid):
        g = gs_mid.q.grid
        u0 = RadialField(g, 0.9 * gs_mid.q.values)
        cfg = EvolutionConfig(dt=1e-3, t_end=1.0, output_every=50)
        out = evolve(u0, zero_potential(g), cfg, gs_mid)
        assert all(row.f < 1.0 for row in out.series)

    def test_blowup_detected_above_threshold(self, gs_mid):
        g = gs_mid.q.grid
        u0 = RadialField(g, 1.1 * gs_mid.q.values)
        cfg = EvolutionConfig(dt=1e-3, t_end=20.0, output_every=20)
        out = evolve(u0, zero_potential(g), cfg, gs_mid)
        assert out.status == STATUS_BLOWUP
        assert out.detector == "grad_growth"
        assert out.blowup_time_estimate is not None
        assert out.blowup_time_estimate < 20.0
        assert all(row.f > 1.0 for row in out.series)
        last = out.series[-1]
        assert last.grad_sq >= 100.0 * out.series[0].grad_sq

    def test_sup_cap_detector(self, gs_mid):
        g = gs_mid.q.grid
        u0 = RadialField(g, 1.1 * gs_mid.q.values)
        cap = 1.001 * float(np.abs(u0.values).max())
        cfg = EvolutionConfig(dt=1e-3, t_end=20.0, output_every=20, blowup_sup_cap=cap)
        out = evolve(u0, zero_potential(g), cfg, gs_mid)
        assert out.status == STATUS_BLOWUP
        assert out.detector == "sup_cap"
        assert out.series[-1].sup_abs >= cap

    def test_phase_cap_halves_dt_deterministically(self, gs_mid):
        g = gs_mid.q.grid
        u0 = RadialField(g, 0.9 * gs_mid.q.values)
        cfg = EvolutionConfig(dt=1e-2, t_end=0.05, output_every=1, phase_cap=1e-3)
        out1 = evolve(u0, zero_potential(g), cfg, gs_mid)
        out2 = evolve(u0, zero_potential(g), cfg, gs_mid)
        assert out1.status == STATUS_COMPLETED
        assert out1.dt_final < cfg.dt
        assert [r.t for r in out1.series] == [r.t for r in out2.series]
        assert [r.mass for r in out1.series] == [r.mass for r in out2.series]

    def test_dt_underflow(self, gs_mid):
        g = gs_mid.q.grid
        u0 = RadialField(g, 0.9 * gs_mid.q.values)
        cfg = EvolutionConfig(dt=1e-3, t_end=1.0, output_every=1, phase_cap=1e-30)
        out = evolve(u0, zero_potential(g), cfg, gs_mid)
        assert out.status == STATUS_UNDERFLOW
        assert out.t_final == 0.0

    def test_rejects_unconverged_gs(self, gs_mid):
        from hartree5d import solve_ground_state

        g = make_grid(256, 20.0)
        stale = solve_ground_state(g, max_iter=1)
        cfg = EvolutionConfig(dt=1e-3, t_end=0.01)
        with pytest.raises(ValueError):
            evolve(RadialField(g, np.zeros(256, complex)), zero_potential(g), cfg, stale)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            EvolutionConfig(dt=0.0, t_end=1.0)
        with pytest.raises(ValueError):
            EvolutionConfig(dt=1.0, t_end=0.5)
        with pytest.raises(ValueError):
            EvolutionConfig(dt=1e-3, t_end=1.0, blowup_grad_factor=1.5)
        with pytest.raises(ValueError):
            EvolutionConfig(dt=1e-3, t_end=1.0, output_every=0)


class TestVirialCheck:
    def test_smooth_run_matches_identity(self, gs_mid):
        g = gs_mid.q.grid
        u0 = RadialField(g, 0.9 * gs_mid.q.values)
        cfg = EvolutionConfig(dt=1e-3, t_end=0.5, output_every=5)
        out = evolve(u0, zero_potential(g), cfg, gs_mid)
        report = virial_check(out)
        assert report.max_rel_deviation <= 0.02

    def test_time_refinement_tightens_agreement(self, gs_mid):
        # Halving the second-difference interval must shrink the deviation at
        # least linearly (it is the FD-in-time truncation that dominates at
        # these spacings; far below them, aliasing of the O(dt^2) splitting
        # wiggles sets a floor).
        g = gs_mid.q.grid
        u0 = RadialField(g, 0.9 * gs_mid.q.values)
        devs = []
        for every in (160, 80, 40):
            cfg = EvolutionConfig(dt=1e-3, t_end=1.6, output_every=every)
            out = evolve(u0, zero_potential(g), cfg, gs_mid)
            devs.append(virial_check(out).max_abs_deviation)
        assert devs[1] <= devs[0] / 1.8
        assert devs[2] <= devs[1] / 1.8

    def test_stationary_profile_keeps_both_sides_small(self, gs_mid):
        g = gs_mid.q.grid
        cfg = EvolutionConfig(dt=1e-3, t_end=0.3, output_every=5)
        out = evolve(gs_mid.q.copy(), zero_potential(g), cfg, gs_mid)
        ks = np.array([abs(r.K) for r in out.series])
        moments = np.array([r.r2_moment for r in out.series])
        # The profile only picks up a global phase: K stays at its (tiny)
        # discretization offset and the variance barely moves.
        assert ks.max() <= 1e-3 * gs_mid.mass_q
        assert np.max(np.abs(moments - moments[0])) / moments[0] < 1e-3

    def test_needs_three_rows(self, gs_mid):
        g = gs_mid.q.grid
        cfg = EvolutionConfig(dt=1e-2, t_end=0.05, output_every=1000)
        out = evolve(RadialField(g, 0.5 * gs_mid.q.values), zero_potential(g), cfg, gs_mid)
        with pytest.raises(ValueError):
            virial_check(out)


class TestScalingTransform:
    def test_identity(self, grid_mid):
        u = RadialField(grid_mid, np.exp(-grid_mid.nodes**2 / 2))
        out = scaling_transform(u, 1.0)
        assert np.allclose(out.values, u.values, rtol=1e-13)

    def test_rejects_out_of_range_factor(self, grid_mid):
        u = RadialField(grid_mid, np.exp(-grid_mid.nodes**2))
        with pytest.raises(ValueError):
            scaling_transform(u, 0.1)
        with pytest.raises(ValueError):
            scaling_transform(u, 5.0)

    def test_rejects_support_overflow(self, grid_mid):
        shifted = np.exp(-((grid_mid.nodes - 25.0) ** 2))
        with pytest.raises(ValueError):
            scaling_transform(RadialField(grid_mid, shifted), 0.5)

    def test_l2_scaling_exponent(self, grid_mid):
        u = RadialField(grid_mid, np.exp(-grid_mid.nodes**2 / 2))
        for lam in (0.5, 2.0):
            ul = scaling_transform(u, lam)
            assert l2_norm_sq(ul) == pytest.approx(l2_norm_sq(u) / lam, rel=1e-3)
