"""Noiseless tableau preparation of an injection plan (reference checks)."""

from __future__ import annotations

import numpy as np

from .codes import CssCode
from .injector import PreparationPlan
from .tableau import Tableau


def prepare_plan_state(code: CssCode, plan: PreparationPlan,
                       free_basis: str = "Z", seed: int = 0) -> Tableau:
    """Product + Bell preparation of the plan on a fresh tableau.

    Free qubits default to ``free_basis`` unless the plan's basis map
    already assigns them X or Z (as a protection optimizer does).
    """
    tab = Tableau(code.n, rng=np.random.default_rng(seed))
    for q in range(code.n):
        b = plan.basis[q]
        if b == "Y-site":
            if not np.isclose(plan.angles[_site_logical(plan, q)], np.pi / 2):
                raise ValueError("tableau preparation supports theta = pi/2 only")
            tab.reset(q, "Y")
        elif b in ("X", "Z"):
            tab.reset(q, b)
        elif b == "free":
            tab.reset(q, free_basis)
        else:
            raise ValueError(f"unknown basis {b!r}")
    for u, v in plan.bell_pairs.pairs:
        tab.cx(u, v)
    return tab


def _site_logical(plan: PreparationPlan, q: int) -> int:
    for i, site in plan.sites.items():
        if site == q:
            return i
    raise KeyError(q)


def project_codespace(code: CssCode, tab: Tableau) -> list[int]:
    """One ideal syndrome-extraction round: measure every check row."""
    return [tab.measure_pauli(s)[0] for s in code.stabilizer_terms()]
