"""Regime classification of initial data against the mass-energy threshold.

Below the threshold M(u0) E(u0) < M(Q) E_0(Q), the gradient-mass product
splits the dynamics: f0 < 1 marks global, dispersing solutions and f0 > 1
collapsing ones.  At the threshold, or on the f0 = 1 knife edge, the
dichotomy says nothing, so those land in 'indeterminate' (with a 1e-6
relative dead-band around f0 = 1).  The product on the left includes the
potential term of the energy; the threshold on the right is the free one
computed from Q alone.

The verdict is a candidate, not a certificate: the side conditions on V
(checked in the attached hypothesis report) and the uncheckable spectral
assumption are recorded in the notes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .functionals import energy, g_of_f, mass, threshold_f
from .grid import RadialField, same_grid
from .potentials import PotentialField, check_hypotheses

REGIME_SCATTERING = "scattering_candidate"
REGIME_BLOWUP = "blowup_candidate"
REGIME_INDETERMINATE = "indeterminate"

F_DEADBAND = 1e-6


@dataclass
class ClassificationReport:
    me_product: float
    me_threshold: float
    below_threshold: bool
    f0: float
    regime: str
    hypothesis_report: object
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "me_product": self.me_product,
            "me_threshold": self.me_threshold,
            "below_threshold": self.below_threshold,
            "f0": self.f0,
            "g_f0": g_of_f(self.f0),
            "regime": self.regime,
            "hypothesis_report": self.hypothesis_report.to_dict(),
            "notes": self.notes,
        }


def classify(u0: RadialField, V: PotentialField, gs) -> ClassificationReport:
    """Evaluate the threshold conditions on (u0, V) and name the regime."""
    same_grid(u0, V)
    if not gs.converged:
        raise ValueError("classification needs a converged ground state")

    me_product = mass(u0) * energy(u0, V)
    me_threshold = gs.me_threshold
    below = me_product < me_threshold
    f0 = threshold_f(u0, V, gs)

    if below and f0 < 1.0 - F_DEADBAND:
        regime = REGIME_SCATTERING
    elif below and f0 > 1.0 + F_DEADBAND:
        regime = REGIME_BLOWUP
    else:
        regime = REGIME_INDETERMINATE

    hyp = check_hypotheses(V)
    notes = ["radial symmetry: structural (always satisfied here)"]
    notes.append(
        "V >= 0 on grid: " + ("holds" if hyp.v_nonneg else "FAILS")
    )
    notes.append(
        "x.grad V <= 0 on grid (dispersive side condition): "
        + ("holds" if hyp.rdv_nonpos else "FAILS")
    )
    notes.append(
        "2V + x.grad V >= 0 on grid (collapse side condition): "
        + ("holds" if hyp.blowup_cond else "FAILS")
    )
    notes.append(hyp.h2_note)
    if regime == REGIME_INDETERMINATE:
        if not below:
            notes.append("mass-energy product at or above threshold")
        if abs(f0 - 1.0) <= F_DEADBAND:
            notes.append("f0 within dead-band of the threshold value 1")

    return ClassificationReport(
        me_product=me_product,
        me_threshold=me_threshold,
        below_threshold=below,
        f0=f0,
        regime=regime,
        hypothesis_report=hyp,
        notes=notes,
    )
