"""Hartree convolution |x|^{-3} * rho for radial densities on R^5.

In five dimensions |x|^{-3} is (up to a constant) the fundamental solution of
the Laplacian: -Delta |x|^{-3} = 8 pi^2 delta_0, since the Green constant is
1/((d-2) omega_{d-1}) = 1/(8 pi^2).  The convolution Phi = |x|^{-3} * rho is
therefore the decaying solution of -Delta Phi = 8 pi^2 rho, and for radial
rho the flux form integrates in closed form:

    r^4 Phi'(r) = -8 pi^2 A(r),     A(r) = int_0^r s^4 rho(s) ds,
    Phi(r) = 8 pi^2 int_r^inf A(tau) tau^{-4} dtau.

Discretely, A is accumulated by the midpoint rule up to each cell face, and
Phi is built by marching the face fluxes inward from the outer boundary.
Because each increment Phi_i - Phi_{i+1} is the exact discrete flux through
face i+1, the construction satisfies the discrete Poisson equation
Lap_h Phi = -8 pi^2 rho exactly at interior nodes; only the outer cells see
the truncation of the domain.  Beyond r_max the density is treated as zero,
so the tail is the exact monopole A(r_max)/(3 r^3); the anchor value at the
last node is 8 pi^2 A(r_max) / (3 r_{n-1}^3).

The independent check of the 8 pi^2 constant lives in the oracle module,
which evaluates the same convolution by direct two-variable kernel
quadrature.
"""

from __future__ import annotations

import numpy as np

from .grid import RadialField, RadialGrid, l2_norm_sq

#: Poisson coupling of the |x|^{-3} kernel on R^5.
KERNEL_CONSTANT = 8.0 * np.pi**2

#: Density entries below this are a caller bug, not roundoff.
NEGATIVE_DENSITY_TOL = -1e-12


def hartree_values(grid: RadialGrid, rho: np.ndarray) -> np.ndarray:
    """Raw-array kernel for the radial Newton potential (rho >= 0)."""
    rho = np.asarray(rho, dtype=float)
    if rho.min(initial=0.0) < NEGATIVE_DENSITY_TOL:
        raise ValueError(
            f"density has negative entries (min {rho.min():.3e}); "
            "pass |u|^2, not a signed field"
        )
    rho = np.maximum(rho, 0.0)

    n, h, r = grid.n_points, grid.h, grid.nodes
    # Cumulative moment at faces 0..n by the midpoint rule.
    a_face = np.concatenate(([0.0], np.cumsum(r**4 * rho * h)))
    faces = np.arange(1, n) * h
    # Increment of Phi over [r_i, r_{i+1}]; the interval midpoint is face i+1,
    # so the midpoint rule uses the face value of the moment.
    dphi = KERNEL_CONSTANT * h * a_face[1:n] / faces**4

    phi = np.empty(n)
    phi[-1] = KERNEL_CONSTANT * a_face[n] / (3.0 * r[-1] ** 3)
    phi[:-1] = phi[-1] + np.cumsum(dphi[::-1])[::-1]
    return phi


def hartree_potential(rho: RadialField) -> RadialField:
    """Newton potential Phi = |x|^{-3} * rho of a nonnegative radial density.

    Phi is nonnegative, non-increasing in r, and decays like
    (int rho dx) / r^3 at the outer boundary.
    """
    return RadialField(rho.grid, hartree_values(rho.grid, rho.values))


def interaction_p(u: RadialField) -> float:
    """Quartic interaction functional P(u) = intint |u(x)|^2 |u(y)|^2 / |x-y|^3.

    Computed as int Phi |u|^2 dx with Phi the Newton potential of |u|^2,
    which equals the double integral by Fubini.  Homogeneous of degree four:
    P(c u) = |c|^4 P(u).
    """
    grid = u.grid
    rho = np.abs(u.values) ** 2
    return grid.integrate(hartree_values(grid, rho) * rho)
