"""Brute-force reference computations, deliberately independent of the fast
paths they validate.

``convolution_direct`` evaluates (|x|^{-3} * rho)(r) for radial rho by
integrating the kernel itself over (s, theta) instead of going through the
Poisson route.  Writing y in spherical coordinates with polar angle theta
measured from x, the S^4 surface measure factors as area(S^3) sin^3(theta)
d(theta) = 2 pi^2 sin^3(theta) d(theta), so

    (|x|^{-3} * rho)(r) =
        2 pi^2 int_0^inf int_0^pi s^4 rho(s) sin^3(theta)
                         (r^2 + s^2 - 2 r s cos theta)^{-3/2} d(theta) ds.

(Sanity check on the angular constant: int_0^pi sin^3 = 4/3, and
2 pi^2 * 4/3 = 8 pi^2 / 3 recovers the full sphere area.)  The kernel kink
at s = r is exactly cancelled by the sin^3 factor, so Gauss-Legendre in
theta converges cleanly; convergence is certified by doubling the rule and
comparing.

These routines favor clarity over speed and share no code with the fast
Newton-potential path; that independence is their entire value.
"""

from __future__ import annotations

import numpy as np

from .grid import RadialField

#: Surface area of the unit 3-sphere, the angular marginal constant.
AREA_S3 = 2.0 * np.pi**2

#: Relative disagreement between the two quadrature levels that flags
#: non-convergence.
RICHARDSON_TOL = 1e-4


def _kernel_quadrature(rho: RadialField, r_eval: float, n_theta: int) -> float:
    s = rho.grid.nodes
    dens = np.abs(np.asarray(rho.values, dtype=float))
    pts, wts = np.polynomial.legendre.leggauss(n_theta)
    theta = 0.5 * np.pi * (pts + 1.0)
    w_theta = 0.5 * np.pi * wts
    dist_sq = r_eval**2 + s[:, None] ** 2 - 2.0 * r_eval * s[:, None] * np.cos(theta)
    angular = np.sum(dist_sq ** (-1.5) * (np.sin(theta) ** 3 * w_theta), axis=1)
    return float(AREA_S3 * np.sum(s**4 * dens * rho.grid.h * angular))


def convolution_direct(rho: RadialField, r_eval: float, n_theta: int = 512) -> float:
    """(|x|^{-3} * rho)(r_eval) by direct two-variable kernel quadrature.

    rho must be nonnegative and decay inside the grid.  Raises RuntimeError
    when doubling the angular rule moves the answer by more than
    RICHARDSON_TOL relative, which signals an unresolved integrand (r_eval
    too close to a poorly resolved density feature).
    """
    if not r_eval > 0.0:
        raise ValueError("r_eval must be positive")
    coarse = _kernel_quadrature(rho, r_eval, n_theta)
    fine = _kernel_quadrature(rho, r_eval, 2 * n_theta)
    scale = max(abs(fine), abs(coarse), 1e-300)
    if abs(fine - coarse) / scale > RICHARDSON_TOL:
        raise RuntimeError(
            f"angular quadrature did not converge at r={r_eval}: "
            f"{coarse!r} vs {fine!r}"
        )
    return fine


def fd_second_derivative(times, values, index: int) -> float:
    """Centered second difference (v_{k+1} - 2 v_k + v_{k-1}) / dt^2.

    Requires uniform time spacing (to 1e-9 relative) and an interior index.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.shape != values.shape or times.size < 3:
        raise ValueError("need matching 1D time/value arrays with >= 3 samples")
    if not 0 < index < times.size - 1:
        raise ValueError(f"index {index} is not interior to the series")
    steps = np.diff(times)
    dt = steps[0]
    if np.max(np.abs(steps - dt)) > 1e-9 * abs(dt):
        raise ValueError("time series is not uniformly spaced")
    return float((values[index + 1] - 2.0 * values[index] + values[index - 1]) / dt**2)
