"""Time integration of i u_t + Delta u - V u = -(|x|^{-3} * |u|^2) u.

Strang splitting between the multiplicative part and the free flow:

  * nonlinear/potential substep: u <- exp(i dt (Phi - V)) u with
    Phi = |x|^{-3} * |u|^2.  Pure phase rotation leaves |u| pointwise
    invariant, so Phi and V are frozen along the substep and the update is
    exact for that flow, preserving mass to machine precision.
  * linear substep: Crank-Nicolson for i u_t = -Delta u, a Cayley transform
    of the weighted-self-adjoint Laplacian, hence exactly unitary in the
    weighted norm (one complex tridiagonal solve per step).

All splitting error therefore lives in the commutator, and the scheme is
second order in dt for smooth solutions.

The step size only ever shrinks: whenever max|Phi - V| dt exceeds the phase
cap the step is halved and redone, and a step below 1e-12 aborts the run as
dt_underflow.  Collapse is detected, never resolved: once the gradient norm
grows past the configured factor (or sup|u| passes its cap) the run stops
and reports when the detector fired.  A finite-horizon run cannot
distinguish finite-time collapse from gradient growth along a sequence of
times, so the outcome records which detector fired and nothing more.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .functionals import DiagnosticsRow, cutoff_chi, diagnostics_row
from .grid import RadialField, grad_norm_sq, laplacian_values, same_grid
from .newton import hartree_values
from .potentials import PotentialField

DT_FLOOR = 1e-12

STATUS_COMPLETED = "completed"
STATUS_BLOWUP = "blowup_detected"
STATUS_UNDERFLOW = "dt_underflow"


@dataclass
class EvolutionConfig:
    dt: float
    t_end: float
    output_every: int = 10
    blowup_grad_factor: float = 10.0
    blowup_sup_cap: float = 1e6
    phase_cap: float = 0.1
    local_mass_radius: float = 5.0
    morawetz_radius: float | None = None

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if not self.t_end > self.dt:
            raise ValueError("t_end must exceed dt")
        if self.output_every < 1:
            raise ValueError("output_every must be >= 1")
        if self.blowup_grad_factor < 2.0:
            raise ValueError("blowup_grad_factor must be >= 2")
        if not (self.blowup_sup_cap > 0.0 and self.phase_cap > 0.0):
            raise ValueError("caps must be positive")
        if not self.local_mass_radius > 0.0:
            raise ValueError("local_mass_radius must be positive")


@dataclass
class RunOutcome:
    status: str
    t_final: float
    series: list[DiagnosticsRow] = field(default_factory=list)
    blowup_time_estimate: float | None = None
    detector: str | None = None
    dt_final: float = math.nan

    def summary_dict(self) -> dict:
        return {
            "status": self.status,
            "t_final": self.t_final,
            "blowup_time_estimate": self.blowup_time_estimate,
            "detector": self.detector,
            "dt_final": self.dt_final,
            "n_output_rows": len(self.series),
        }


def nonlinear_substep(u: RadialField, V: PotentialField, dt: float) -> RadialField:
    """Exact phase rotation by the frozen multiplicative part."""
    same_grid(u, V)
    phi = hartree_values(u.grid, np.abs(u.values) ** 2)
    vals = np.exp(1j * dt * (phi - V.v_values)) * u.values
    return RadialField(u.grid, vals)


def _cn_banded(grid, alpha: complex) -> np.ndarray:
    ab = np.zeros((3, grid.n_points), dtype=complex)
    ab[0, 1:] = -alpha * grid.lap_upper
    ab[1, :] = 1.0 - alpha * grid.lap_diag
    ab[2, :-1] = -alpha * grid.lap_lower
    return ab


def _cn_values(grid, values: np.ndarray, dt: float) -> np.ndarray:
    alpha = 0.5j * dt
    rhs = values + alpha * laplacian_values(grid, values.astype(complex))
    return solve_banded((1, 1), _cn_banded(grid, alpha), rhs)


def linear_substep(u: RadialField, dt: float) -> RadialField:
    """Crank-Nicolson step of the free flow i u_t = -Delta u."""
    return RadialField(u.grid, _cn_values(u.grid, np.asarray(u.values, complex), dt))


def evolve(
    u0: RadialField,
    V: PotentialField,
    cfg: EvolutionConfig,
    gs,
) -> RunOutcome:
    """Strang loop (half kick, free flow, half kick) with per-step detection.

    Emits a DiagnosticsRow at step 0, every cfg.output_every steps, at the
    detection step, and at t_end.  The converged ground state gs supplies
    the normalization of the threshold diagnostic f.
    """
    grid = same_grid(u0, V)
    if not gs.converged:
        raise ValueError("evolve needs a converged ground state for the f diagnostic")
    same_grid(u0, gs.q)

    chi = None
    if cfg.morawetz_radius is not None:
        chi = cutoff_chi(cfg.morawetz_radius, grid)

    def row(t, values):
        return diagnostics_row(
            t, RadialField(grid, values), V, gs, cfg.local_mass_radius, chi
        )

    u = np.asarray(u0.values, dtype=complex).copy()
    vvals = V.v_values
    grad0 = grad_norm_sq(u0)
    grad_trip = cfg.blowup_grad_factor**2 * grad0

    dt = cfg.dt
    t = 0.0
    step = 0
    series = [row(0.0, u)]
    status = STATUS_COMPLETED
    detector = None
    blowup_t = None

    while cfg.t_end - t > 1e-9 * dt:
        phi = hartree_values(grid, np.abs(u) ** 2)
        phase_scale = float(np.max(np.abs(phi - vvals)))
        # Halve-and-redo until the nonlinear phase per substep is under the
        # cap and the linear solve returns finite values; a bad step is
        # never accepted, it either shrinks or the run aborts as underflow.
        while True:
            dt_step = min(dt, cfg.t_end - t)
            if phase_scale * dt_step > cfg.phase_cap:
                dt *= 0.5
                if dt < DT_FLOOR:
                    break
                continue
            u_try = np.exp(0.5j * dt_step * (phi - vvals)) * u
            u_try = _cn_values(grid, u_try, dt_step)
            if np.all(np.isfinite(u_try.view(float))):
                break
            dt *= 0.5
            if dt < DT_FLOOR:
                break
        if dt < DT_FLOOR:
            status = STATUS_UNDERFLOW
            break

        phi_half = hartree_values(grid, np.abs(u_try) ** 2)
        u = np.exp(0.5j * dt_step * (phi_half - vvals)) * u_try

        t += dt_step
        step += 1

        grad_now = grad_norm_sq(RadialField(grid, u))
        sup_now = float(np.abs(u).max())
        if (grad0 > 0.0 and grad_now >= grad_trip) or sup_now >= cfg.blowup_sup_cap:
            status = STATUS_BLOWUP
            detector = "grad_growth" if grad0 > 0 and grad_now >= grad_trip else "sup_cap"
            blowup_t = t
            series.append(row(t, u))
            break
        if step % cfg.output_every == 0:
            series.append(row(t, u))

    if status in (STATUS_COMPLETED, STATUS_UNDERFLOW) and series[-1].t < t:
        series.append(row(t, u))
    return RunOutcome(
        status=status,
        t_final=t,
        series=series,
        blowup_time_estimate=blowup_t,
        detector=detector,
        dt_final=dt,
    )


@dataclass
class VirialReport:
    """Agreement of d^2/dt^2 int r^2 |u|^2 with 8 K(u) along a run."""

    max_abs_deviation: float
    scale: float
    max_rel_deviation: float
    n_interior: int

    def to_dict(self) -> dict:
        return {
            "max_abs_deviation": self.max_abs_deviation,
            "scale": self.scale,
            "max_rel_deviation": self.max_rel_deviation,
            "n_interior": self.n_interior,
        }


def virial_check(outcome: RunOutcome) -> VirialReport:
    """Second-difference the r^2 moment of a densely sampled run and compare
    with 8 K at interior output times.

    Deviations are reported relative to max |8 K| so that a near-stationary
    run (both sides close to zero) is not penalized by a 0/0.
    """
    rows = outcome.series
    if len(rows) < 3:
        raise ValueError("virial check needs at least 3 output rows")
    times = np.array([r.t for r in rows])
    moments = np.array([r.r2_moment for r in rows])
    if np.any(np.isnan(moments)):
        raise ValueError("run was not recorded with r^2 moments")
    k_vals = np.array([r.K for r in rows])

    from .oracle import fd_second_derivative

    fd = np.array(
        [fd_second_derivative(times, moments, i) for i in range(1, len(rows) - 1)]
    )
    target = 8.0 * k_vals[1:-1]
    dev = np.abs(fd - target)
    scale = float(np.max(np.abs(target)))
    if scale == 0.0:
        scale = max(float(np.max(np.abs(fd))), 1e-300)
    return VirialReport(
        max_abs_deviation=float(dev.max()),
        scale=scale,
        max_rel_deviation=float(dev.max() / scale),
        n_interior=len(rows) - 2,
    )


#: Support threshold for the rescaling overflow check, relative to max |u|.
SUPPORT_EPS = 1e-10


def scaling_transform(u: RadialField, lam: float) -> RadialField:
    """Discrete scaling map u -> lam^2 u(lam r) by linear interpolation.

    The exponent 2 makes ||u||_{L^2} ||u||_{H^1-dot} invariant (the L^2 and
    gradient factors scale as lam^{-1/2} and lam^{+1/2}).  For lam < 1 the
    profile dilates; the call is rejected when the dilated support would
    spill past r_max, since silent truncation would break the invariance it
    exists to test.
    """
    if not 0.25 <= lam <= 4.0:
        raise ValueError(f"scaling factor {lam} outside [1/4, 4]")
    grid = u.grid
    vals = u.values
    amax = float(np.abs(vals).max())
    if amax > 0.0 and lam < 1.0:
        support = grid.nodes[np.abs(vals) > SUPPORT_EPS * amax]
        if support.size and support[-1] > lam * grid.r_max:
            raise ValueError(
                f"support radius {support[-1]:.3g} overflows the grid after "
                f"rescaling by {lam}"
            )
    query = lam * grid.nodes
    out = np.interp(query, grid.nodes, vals.real, right=0.0)
    if np.iscomplexobj(vals):
        out = out + 1j * np.interp(query, grid.nodes, vals.imag, right=0.0)
    return RadialField(grid, lam**2 * out)
