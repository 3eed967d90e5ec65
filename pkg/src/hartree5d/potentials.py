"""Built-in radial potentials V(r) and the hypothesis checks applied to them.

The dynamics modules consume a potential through two sampled arrays: V(r_i)
and r_i V'(r_i) (the radial form of x . grad V).  Built-in families are
differentiated analytically; tabulated potentials are interpolated linearly
and the interpolant is differentiated, which is defined away from the knots
and adequate because every diagnostic integrates V against a smooth density.

``check_hypotheses`` grades a potential against the pointwise and
integrability conditions that the threshold theory asks of V.  The report is
advisory only: the conditions for the blow-up side (V >= 0, V integrable to
the 5/2 power, and (r^2 V)' >= 0) cannot all hold for a nontrivial decaying
radial potential, so experiments must remain runnable with partial
hypotheses, clearly flagged.  The spectral assumption (no eigenvalues of
-Delta + V) is analytic in nature and is recorded as not certified.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import RadialField, RadialGrid

FAMILIES = ("zero", "gaussian", "lorentzian", "table")

H2_NOTE = "absence of eigenvalues of -Delta + V not certified numerically"


@dataclass(frozen=True)
class PotentialSpec:
    """Declarative description of a potential family.

    family : one of 'zero', 'gaussian', 'lorentzian', 'table'.
    a : amplitude, required >= 0 for the built-in families.
    b : gaussian width parameter, V = a exp(-b r^2).
    p : lorentzian decay power, V = a (1 + r^2)^{-p}.
    table_r, table_v : knots and values for the 'table' family.
    """

    family: str
    a: float = 0.0
    b: float = 1.0
    p: float = 2.0
    table_r: tuple = ()
    table_v: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown potential family {self.family!r}")
        if self.family in ("gaussian", "lorentzian") and not self.a >= 0.0:
            raise ValueError(f"amplitude must be nonnegative, got {self.a}")
        if self.family == "gaussian" and not self.b > 0.0:
            raise ValueError(f"gaussian width parameter must be positive, got {self.b}")
        if self.family == "lorentzian" and not self.p > 0.0:
            raise ValueError(f"lorentzian power must be positive, got {self.p}")
        if self.family == "table":
            r = np.asarray(self.table_r, dtype=float)
            v = np.asarray(self.table_v, dtype=float)
            if r.size < 2 or r.size != v.size:
                raise ValueError("table needs matching r/v arrays with >= 2 knots")
            if not np.all(np.diff(r) > 0.0):
                raise ValueError("table nodes must be strictly increasing")
            object.__setattr__(self, "table_r", tuple(float(x) for x in r))
            object.__setattr__(self, "table_v", tuple(float(x) for x in v))

    @classmethod
    def zero(cls) -> "PotentialSpec":
        return cls("zero")

    @classmethod
    def gaussian(cls, a: float, b: float) -> "PotentialSpec":
        return cls("gaussian", a=a, b=b)

    @classmethod
    def lorentzian(cls, a: float, p: float) -> "PotentialSpec":
        return cls("lorentzian", a=a, p=p)

    @classmethod
    def table(cls, r, v) -> "PotentialSpec":
        return cls("table", table_r=tuple(r), table_v=tuple(v))


@dataclass
class PotentialField:
    """V and r V' sampled on a grid."""

    grid: RadialGrid
    v_values: np.ndarray
    rdv_values: np.ndarray

    def __post_init__(self):
        self.v_values = np.asarray(self.v_values, dtype=float)
        self.rdv_values = np.asarray(self.rdv_values, dtype=float)
        n = self.grid.n_points
        if self.v_values.shape != (n,) or self.rdv_values.shape != (n,):
            raise ValueError("potential samples must match the grid length")
        if not (np.all(np.isfinite(self.v_values)) and np.all(np.isfinite(self.rdv_values))):
            raise ValueError("potential samples must be finite")

    @property
    def is_zero(self) -> bool:
        return not (self.v_values.any() or self.rdv_values.any())


def build_potential(spec: PotentialSpec, grid: RadialGrid) -> PotentialField:
    """Sample V(r_i) and r_i V'(r_i) for the given family."""
    r = grid.nodes
    if spec.family == "zero":
        v = np.zeros_like(r)
        rdv = np.zeros_like(r)
    elif spec.family == "gaussian":
        v = spec.a * np.exp(-spec.b * r**2)
        rdv = -2.0 * spec.a * spec.b * r**2 * np.exp(-spec.b * r**2)
    elif spec.family == "lorentzian":
        v = spec.a * (1.0 + r**2) ** (-spec.p)
        rdv = -2.0 * spec.a * spec.p * r**2 * (1.0 + r**2) ** (-spec.p - 1.0)
    else:
        knots = np.asarray(spec.table_r)
        vals = np.asarray(spec.table_v)
        v = np.interp(r, knots, vals)
        # Slope of the linear interpolant on the segment containing each node;
        # constant extrapolation (slope 0) outside the table.
        slopes = np.diff(vals) / np.diff(knots)
        seg = np.clip(np.searchsorted(knots, r, side="right") - 1, 0, slopes.size - 1)
        dv = np.where((r >= knots[0]) & (r <= knots[-1]), slopes[seg], 0.0)
        rdv = r * dv
    return PotentialField(grid, v, rdv)


def zero_potential(grid: RadialGrid) -> PotentialField:
    return build_potential(PotentialSpec.zero(), grid)


@dataclass
class HypothesisReport:
    """Pointwise and integral checks of the potential hypotheses.

    Booleans are evaluated on the grid nodes; the L^{5/2} norms use the 5D
    quadrature.  ``worst_violation`` maps each failed condition name to the
    node radius and value where the violation is largest.
    """

    v_nonneg: bool
    v_l52_norm: float
    rdv_l52_norm: float
    rdv_nonpos: bool
    blowup_cond: bool
    worst_violation: dict = field(default_factory=dict)
    h2_note: str = H2_NOTE

    def to_dict(self) -> dict:
        return {
            "v_nonneg": self.v_nonneg,
            "v_l52_norm": self.v_l52_norm,
            "rdv_l52_norm": self.rdv_l52_norm,
            "rdv_nonpos": self.rdv_nonpos,
            "blowup_cond": self.blowup_cond,
            "worst_violation": self.worst_violation,
            "h2_note": self.h2_note,
        }


def _worst(nodes: np.ndarray, margin: np.ndarray) -> dict:
    """Location and size of the largest violation (margin < 0 is a failure)."""
    i = int(np.argmin(margin))
    return {"r": float(nodes[i]), "value": float(margin[i])}


def check_hypotheses(V: PotentialField) -> HypothesisReport:
    """Grade V against nonnegativity, monotonicity, and growth conditions.

    Checks, in the report's field order: V >= 0; the L^{5/2} norms of V and
    of x . grad V; x . grad V <= 0; and 2V + x . grad V >= 0 (equivalently
    (r^2 V)' >= 0, the condition used on the blow-up side).  Purely
    descriptive; nothing here refuses to run a simulation.
    """
    grid = V.grid
    v, rdv = V.v_values, V.rdv_values

    report = HypothesisReport(
        v_nonneg=bool(np.all(v >= 0.0)),
        v_l52_norm=grid.integrate(np.abs(v) ** 2.5) ** 0.4,
        rdv_l52_norm=grid.integrate(np.abs(rdv) ** 2.5) ** 0.4,
        rdv_nonpos=bool(np.all(rdv <= 0.0)),
        blowup_cond=bool(np.all(2.0 * v + rdv >= 0.0)),
    )
    if not report.v_nonneg:
        report.worst_violation["v_nonneg"] = _worst(grid.nodes, v)
    if not report.rdv_nonpos:
        report.worst_violation["rdv_nonpos"] = _worst(grid.nodes, -rdv)
    if not report.blowup_cond:
        report.worst_violation["blowup_cond"] = _worst(grid.nodes, 2.0 * v + rdv)
    return report
