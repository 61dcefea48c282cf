"""Single configuration object with the documented tolerance defaults."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Settings:
    """Numerical tolerances and search budgets.

    All iterative routines take their knobs from here so that a run is fully
    described by (inputs, seed, settings).
    """

    eq_tol: float = 1e-8          # equality / residual tolerance
    gap_target: float = 1e-3      # relative bracket gap the refiners aim for
    lp_pivot_tol: float = 1e-9
    lp_feas_tol: float = 1e-8
    restarts: int = 32            # multi-start count for ascent searches
    pair_restarts: int = 64       # restarts for Lipschitz pair search
    atom_budget: int = 256        # starting dictionary size
    atom_cap: int = 8192          # dictionary size cap (doubling refinement)
    enum_budget: int = 1 << 22    # max tuples for exact vertex enumeration
    box_budget: int = 200_000     # max live boxes per branch-and-bound level
    bnb_levels: int = 40          # branch-and-bound depth cap
    family_cap: int = 12          # pair-family size for sign-pattern sweeps
    exact_poly_points: int = 7    # distinct-point cap for exact polytope maxima
    seed: int = 0

    def with_(self, **kw) -> "Settings":
        return replace(self, **kw)


DEFAULTS = Settings()


def thread_cap() -> int:
    """Worker cap for parallel loops, from VERONESE_THREADS (default 1)."""
    raw = os.environ.get("VERONESE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
