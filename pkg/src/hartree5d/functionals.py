"""Scalar diagnostics of the flow: conserved quantities, virial and threshold
functionals, cutoffs, and the per-output-time diagnostics record.

Conventions for the focusing quartic Hartree energy on R^5:

    E(u)  = 1/2 int (|grad u|^2 + V |u|^2) dx - 1/4 P(u)
    K(u)  = |grad u|^2_{L^2} - 1/2 int (x . grad V) |u|^2 dx - 3/4 P(u)
    f(u)  = ||u|| ||grad_V u|| / (||Q|| ||grad Q||)

with P(u) the quartic interaction functional and Q the ground state.  K is
the virial production rate: d^2/dt^2 int |x|^2 |u|^2 dx = 8 K(u).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import RadialField, grad_norm_sq, l2_norm_sq, same_grid
from .newton import interaction_p
from .potentials import PotentialField

#: Frozen column order of the per-time diagnostics CSV.
CSV_COLUMNS = (
    "t", "mass", "energy", "free_energy", "grad_sq", "gradV_sq",
    "P", "K", "f", "local_mass", "sup_abs",
)


@dataclass
class DiagnosticsRow:
    """One diagnostics sample; the first eleven fields form the CSV schema.

    ``r2_moment`` (int r^2 |u|^2 dx, for virial checks) and ``p_chi``
    (P(chi_R u), for Morawetz averaging) ride along for in-memory analysis
    and are not CSV columns.
    """

    t: float
    mass: float
    energy: float
    free_energy: float
    grad_sq: float
    gradV_sq: float
    P: float
    K: float
    f: float
    local_mass: float
    sup_abs: float
    r2_moment: float = math.nan
    p_chi: float = math.nan


def mass(u: RadialField) -> float:
    """Conserved mass M(u) = int |u|^2 dx."""
    return l2_norm_sq(u)


def free_energy(u: RadialField) -> float:
    """Potential-free energy: 1/2 |grad u|^2 - 1/4 P(u)."""
    return 0.5 * grad_norm_sq(u) - 0.25 * interaction_p(u)


def energy(u: RadialField, V: PotentialField) -> float:
    """Conserved energy including the external potential term."""
    same_grid(u, V)
    vterm = u.grid.integrate(V.v_values * np.abs(u.values) ** 2)
    return free_energy(u) + 0.5 * vterm


def gradv_norm_sq(u: RadialField, V: PotentialField) -> float:
    """Squared potential-dressed gradient norm <(-Delta + V) u, u>."""
    same_grid(u, V)
    return grad_norm_sq(u) + u.grid.integrate(V.v_values * np.abs(u.values) ** 2)


def virial_k(u: RadialField, V: PotentialField) -> float:
    """Virial functional K(u); sign(K) drives dispersion versus collapse."""
    same_grid(u, V)
    rdv_term = u.grid.integrate(V.rdv_values * np.abs(u.values) ** 2)
    return grad_norm_sq(u) - 0.5 * rdv_term - 0.75 * interaction_p(u)


def threshold_f(u: RadialField, V: PotentialField, gs) -> float:
    """Gradient-mass product of u relative to the ground state.

    f < 1 together with a below-threshold mass-energy product marks the
    trapped, dispersing regime; f > 1 the collapsing one.
    """
    if not gs.converged:
        raise ValueError("threshold_f needs a converged ground state")
    num = mass(u) * gradv_norm_sq(u, V)
    return math.sqrt(num) / math.sqrt(gs.mass_q * gs.grad_sq_q)


def g_of_f(f: float) -> float:
    """Trapping polynomial g(f) = 3 f^2 - 2 f^3; g(0) = 0, g(1) = 1.

    1 - g(f) = (f - 1)^2 (2 f + 1), so g <= 1 for all f >= 0 with equality
    exactly at f = 1, and g is increasing on (0, 1).
    """
    return 3.0 * f**2 - 2.0 * f**3


def cutoff_chi(R: float, grid) -> RadialField:
    """C^1 radial cutoff: 1 on [0, R/2], 0 on [R, inf).

    The transition uses the cubic ramp 1 - 3 s^2 + 2 s^3 with
    s = 2 r / R - 1, whose slope peaks at exactly 3/R, matching the required
    O(1/R) gradient bound.
    """
    if not 0.0 < R <= grid.r_max:
        raise ValueError(f"cutoff radius {R} outside (0, r_max={grid.r_max}]")
    s = np.clip(2.0 * grid.nodes / R - 1.0, 0.0, 1.0)
    return RadialField(grid, 1.0 - 3.0 * s**2 + 2.0 * s**3)


def local_mass(u: RadialField, R: float) -> float:
    """Mass inside the ball of radius R: sum of w_i |u_i|^2 over r_i <= R."""
    if R > u.grid.r_max:
        raise ValueError(f"local mass radius {R} exceeds r_max={u.grid.r_max}")
    sel = u.grid.nodes <= R
    return float(np.dot(u.grid.weights[sel], np.abs(u.values[sel]) ** 2))


def morawetz_p_chi(u: RadialField, R: float) -> float:
    """Localized interaction P(chi_R u); the time average of this decays
    like 1/T + 1/R for dispersing below-threshold solutions."""
    chi = cutoff_chi(R, u.grid)
    return interaction_p(RadialField(u.grid, chi.values * u.values))


def diagnostics_row(
    t: float,
    u: RadialField,
    V: PotentialField,
    gs,
    local_mass_radius: float,
    chi: RadialField | None = None,
) -> DiagnosticsRow:
    """Assemble one DiagnosticsRow; ``chi`` enables the p_chi extra column."""
    grid = u.grid
    rho = np.abs(u.values) ** 2
    gsq = grad_norm_sq(u)
    p = interaction_p(u)
    vterm = grid.integrate(V.v_values * rho)
    rdv_term = grid.integrate(V.rdv_values * rho)
    m = grid.integrate(rho)
    gv = gsq + vterm
    f = math.sqrt(m * gv) / math.sqrt(gs.mass_q * gs.grad_sq_q)
    sel = grid.nodes <= local_mass_radius
    p_chi = math.nan
    if chi is not None:
        p_chi = interaction_p(RadialField(grid, chi.values * u.values))
    return DiagnosticsRow(
        t=t,
        mass=m,
        energy=0.5 * gsq + 0.5 * vterm - 0.25 * p,
        free_energy=0.5 * gsq - 0.25 * p,
        grad_sq=gsq,
        gradV_sq=gv,
        P=p,
        K=gsq - 0.5 * rdv_term - 0.75 * p,
        f=f,
        local_mass=float(np.dot(grid.weights[sel], rho[sel])),
        sup_abs=float(np.sqrt(rho.max())),
        r2_moment=grid.integrate(grid.nodes**2 * rho),
        p_chi=p_chi,
    )
