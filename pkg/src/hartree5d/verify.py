"""Self-validation gates wiring the fast paths to their independent oracles.

Each gate returns a small dict with a ``passed`` flag and the measured
numbers, so the CLI can render a table and the test suite can assert on the
same code path.  Thresholds live here, next to the gates they protect.
"""

from __future__ import annotations

import math

import numpy as np

from .evolution import EvolutionConfig, evolve, scaling_transform, virial_check
from .grid import RadialField, RadialGrid, grad_norm_sq, l2_norm_sq, make_grid
from .newton import hartree_potential, interaction_p
from .oracle import convolution_direct
from .potentials import zero_potential

#: Fast Poisson-route potential must match direct kernel quadrature this well.
NEWTON_GATE_RTOL = 1e-3
#: Central value of the Newton potential of exp(-r^2).
PHI0_EXACT = 4.0 * np.pi**2 / 3.0
#: Virial second-difference agreement bar.
VIRIAL_GATE_RTOL = 2e-2
#: Interaction-inequality slack for randomized fields.
GN_FIELD_SLACK = 1e-6
#: Sharp-constant identity and equality-case tolerance.
GN_IDENTITY_RTOL = 1e-3
#: Scale-invariance tolerance of the norm product.
SCALING_RTOL = 1e-3


def newton_constant_gate(grid: RadialGrid, probe_radii) -> dict:
    """Compare the Poisson-quadrature potential of exp(-r^2) against the
    direct kernel quadrature at the probe radii, plus the exact central
    value.  This is the check that freezes the 8 pi^2 kernel constant."""
    rho = RadialField(grid, np.exp(-grid.nodes**2))
    phi = hartree_potential(rho)

    max_rel = 0.0
    for r in probe_radii:
        idx = int(np.argmin(np.abs(grid.nodes - r)))
        direct = convolution_direct(rho, float(grid.nodes[idx]))
        max_rel = max(max_rel, abs(phi.values[idx] - direct) / abs(direct))

    # Even extrapolation in r^2 to the origin (the potential has zero slope).
    r0, r1 = grid.nodes[0], grid.nodes[1]
    phi0 = phi.values[0] + (phi.values[0] - phi.values[1]) * r0**2 / (r1**2 - r0**2)
    phi0_rel = abs(phi0 - PHI0_EXACT) / PHI0_EXACT

    return {
        "name": "newton_constant",
        "passed": bool(max_rel <= NEWTON_GATE_RTOL and phi0_rel <= NEWTON_GATE_RTOL),
        "max_probe_rel_dev": max_rel,
        "phi0_rel_err": phi0_rel,
        "tolerance": NEWTON_GATE_RTOL,
    }


def virial_gate(gs, dt: float, t_end: float, output_every: int) -> dict:
    """Run 0.9 Q with no potential at dense output and second-difference the
    r^2 moment against 8 K."""
    grid = gs.q.grid
    V = zero_potential(grid)
    u0 = RadialField(grid, 0.9 * gs.q.values)
    cfg = EvolutionConfig(dt=dt, t_end=t_end, output_every=output_every)
    outcome = evolve(u0, V, cfg, gs)
    report = virial_check(outcome)
    return {
        "name": "virial_identity",
        "passed": bool(
            outcome.status == "completed"
            and report.max_rel_deviation <= VIRIAL_GATE_RTOL
        ),
        "max_rel_deviation": report.max_rel_deviation,
        "n_interior": report.n_interior,
        "tolerance": VIRIAL_GATE_RTOL,
    }


def random_smooth_fields(grid: RadialGrid, n: int, seed: int):
    """Yield n randomized smooth radial fields: superposed Gaussian bumps,
    occasionally chirped to exercise the complex path.  Widths and centers
    keep the fields resolved on the mesh and decayed well inside r_max."""
    rng = np.random.default_rng(seed)
    for _ in range(n):
        vals = np.zeros(grid.n_points)
        for _ in range(int(rng.integers(1, 4))):
            amp = rng.uniform(-2.0, 2.0)
            center = rng.uniform(0.0, 6.0)
            width = rng.uniform(0.5, 3.0)
            vals = vals + amp * np.exp(-((grid.nodes - center) ** 2) / (2 * width**2))
        if rng.random() < 0.3:
            vals = vals * np.exp(0.1j * rng.uniform(-1.0, 1.0) * grid.nodes**2)
        yield RadialField(grid, vals)


def gn_probe_gate(gs, n_fields: int, seed: int) -> dict:
    """Sharp interaction inequality: every randomized field obeys
    P(u) <= C ||u|| ||grad u||^3 with C from the computed ground state, the
    equality case is attained at Q, and C matches 4 / (3 sqrt(3) |Q|^2)."""
    grid = gs.q.grid
    worst = 0.0
    for u in random_smooth_fields(grid, n_fields, seed):
        bound = gs.c_gn * math.sqrt(l2_norm_sq(u)) * grad_norm_sq(u) ** 1.5
        if bound > 0.0:
            worst = max(worst, interaction_p(u) / bound)
    ratio_at_q = gs.p_q / (gs.c_gn * math.sqrt(gs.mass_q) * gs.grad_sq_q**1.5)
    identity = gs.c_gn * 3.0 * math.sqrt(3.0) * gs.mass_q / 4.0
    passed = (
        worst <= 1.0 + GN_FIELD_SLACK
        and abs(ratio_at_q - 1.0) <= GN_IDENTITY_RTOL
        and abs(identity - 1.0) <= GN_IDENTITY_RTOL
    )
    return {
        "name": "gn_inequality",
        "passed": bool(passed),
        "worst_field_ratio": worst,
        "equality_ratio_at_q": ratio_at_q,
        "sharp_constant_identity": identity,
        "n_fields": n_fields,
        "tolerance": GN_IDENTITY_RTOL,
    }


def scaling_probe_gate(grid: RadialGrid, factors=(0.5, 2.0)) -> dict:
    """Invariance of ||u||_{L^2} ||u||_{H^1-dot} under the scaling map,
    probed on a unit-width Gaussian."""
    u = RadialField(grid, np.exp(-grid.nodes**2 / 2.0))
    base = math.sqrt(l2_norm_sq(u) * grad_norm_sq(u))
    worst = 0.0
    for lam in factors:
        ul = scaling_transform(u, lam)
        product = math.sqrt(l2_norm_sq(ul) * grad_norm_sq(ul))
        worst = max(worst, abs(product / base - 1.0))
    return {
        "name": "scaling_symmetry",
        "passed": bool(worst <= SCALING_RTOL),
        "max_product_rel_dev": worst,
        "factors": list(factors),
        "tolerance": SCALING_RTOL,
    }


def run_all_gates(grid: RadialGrid, gs, verify_cfg: dict) -> list[dict]:
    gates = [
        newton_constant_gate(grid, verify_cfg["probe_radii"]),
        virial_gate(
            gs,
            dt=verify_cfg["dt"],
            t_end=verify_cfg["t_end"],
            output_every=verify_cfg["output_every"],
        ),
        gn_probe_gate(gs, verify_cfg["n_fields"], verify_cfg["seed"]),
        scaling_probe_gate(grid),
    ]
    return gates
