"""Dense bounded-variable simplex with a Bland anti-cycling fallback.

Solves   min c.x  subject to  A x = b,  lb <= x <= ub
with lb/ub entries allowed to be infinite.  Two phases, explicit tableau,
Dantzig pricing switching to Bland's rule when the objective stalls.  Row
duals are read off the artificial columns of the final tableau.

The per-pivot elimination runs through the kernel backend; everything else is
plain numpy.  Problems here are small (hundreds of rows/columns) but solved
many thousands of times, which is why the pivot loop is kernelized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .config import DEFAULTS, Settings
from .errors import DimensionMismatch, NumericalFailure


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPProblem:
    """min c.x  s.t.  A x = b, lb <= x <= ub (elementwise, +-inf allowed)."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lb: np.ndarray
    ub: np.ndarray

    @staticmethod
    def build(c, A, b, lb=None, ub=None) -> "LPProblem":
        c = np.atleast_1d(np.asarray(c, dtype=float))
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        n = c.size
        if A.size == 0:
            A = A.reshape(0, n)
        if A.shape != (b.size, n):
            raise DimensionMismatch(
                f"A is {A.shape}, expected ({b.size}, {n})"
            )
        lb = np.full(n, 0.0) if lb is None else np.asarray(lb, dtype=float) + np.zeros(n)
        ub = np.full(n, np.inf) if ub is None else np.asarray(ub, dtype=float) + np.zeros(n)
        return LPProblem(c, A, b, lb, ub)


@dataclass(frozen=True)
class LPSolution:
    status: LPStatus
    x: np.ndarray | None = None
    objective: float | None = None
    duals: np.ndarray | None = None
    iterations: int = 0
    # phase-1 infeasibility when status == INFEASIBLE
    infeasibility: float = 0.0


_LOWER, _UPPER, _BASIC = 0, 1, 2


@dataclass
class _Tableau:
    T: np.ndarray          # (m+1) x (nvars + m); last row = reduced costs
    xB: np.ndarray         # basic values, length m
    basis: np.ndarray      # column index of each basic variable
    status: np.ndarray     # per-column _LOWER/_UPPER/_BASIC
    u: np.ndarray          # upper spans (shifted problem), length nvars + m
    obj: float = 0.0
    iterations: int = 0
    bland: bool = False
    stall: int = 0


def _simplex_phase(tab: _Tableau, enterable: np.ndarray, pivot_tol: float,
                   stall_limit: int, hard_cap: int) -> str:
    """Run pivots until optimal/unbounded for the current reduced-cost row."""
    T, u = tab.T, tab.u
    m = tab.xB.size
    d = T[m]
    while True:
        if tab.iterations > hard_cap:
            raise NumericalFailure("simplex exceeded the pivot cap (cycling?)")
        at_lower = (tab.status == _LOWER) & enterable & (u > pivot_tol)
        at_upper = (tab.status == _UPPER) & enterable
        cand_mask = (at_lower & (d < -pivot_tol)) | (at_upper & (d > pivot_tol))
        cand = np.nonzero(cand_mask)[0]
        if cand.size == 0:
            return "optimal"
        if tab.bland:
            j = int(cand[0])
        else:
            j = int(cand[np.argmax(np.abs(d[cand]))])
        dirn = 1.0 if tab.status[j] == _LOWER else -1.0
        t = dirn * T[:m, j]

        # ratio test: own span, decreasing basics, increasing bounded basics
        limit = u[j]
        leave_row = -1
        leave_to_upper = False
        dec = t > pivot_tol
        if np.any(dec):
            ratios = tab.xB[dec] / t[dec]
            rows = np.nonzero(dec)[0]
            k = _argmin_rows(ratios, rows, t[dec], tab)
            if ratios[k] < limit - 1e-15:
                limit = ratios[k]
                leave_row = int(rows[k])
                leave_to_upper = False
        ub_basis = u[tab.basis]
        inc = (t < -pivot_tol) & np.isfinite(ub_basis)
        if np.any(inc):
            ratios = (ub_basis[inc] - tab.xB[inc]) / (-t[inc])
            rows = np.nonzero(inc)[0]
            k = _argmin_rows(ratios, rows, t[inc], tab)
            if ratios[k] < limit - 1e-15:
                limit = ratios[k]
                leave_row = int(rows[k])
                leave_to_upper = True

        if not np.isfinite(limit):
            return "unbounded"
        limit = max(limit, 0.0)

        prev_obj = tab.obj
        tab.obj += d[j] * dirn * limit
        tab.iterations += 1
        if leave_row < 0:
            # bound flip: j crosses its span, stays nonbasic
            tab.xB -= dirn * limit * T[:m, j]
            tab.status[j] = _UPPER if tab.status[j] == _LOWER else _LOWER
        else:
            tab.xB -= dirn * limit * T[:m, j]
            out = tab.basis[leave_row]
            tab.status[out] = _UPPER if leave_to_upper else _LOWER
            tab.xB[leave_row] = (0.0 if tab.status[j] == _LOWER else u[j]) + dirn * limit
            tab.status[j] = _BASIC
            tab.basis[leave_row] = j
            _kernels.pivot_update(T, leave_row, j)

        if abs(tab.obj - prev_obj) <= 1e-15 * (1.0 + abs(prev_obj)):
            tab.stall += 1
            if tab.stall > stall_limit:
                tab.bland = True
        else:
            tab.stall = 0


def _argmin_rows(ratios: np.ndarray, rows: np.ndarray, tvals: np.ndarray,
                 tab: _Tableau) -> int:
    best = np.nonzero(ratios <= ratios.min() + 1e-15)[0]
    if best.size == 1:
        return int(best[0])
    if tab.bland:
        # smallest basis variable index among ties
        return int(best[np.argmin(tab.basis[rows[best]])])
    return int(best[np.argmax(np.abs(tvals[best]))])  # favor stable pivots


def lp_solve(problem: LPProblem, settings: Settings = DEFAULTS) -> LPSolution:
    c0, A0, b0 = problem.c, problem.A, problem.b
    lb, ub = problem.lb, problem.ub
    n = c0.size
    if np.any(lb > ub + settings.lp_feas_tol):
        return LPSolution(LPStatus.INFEASIBLE, infeasibility=float(np.max(lb - ub)))

    # shift/mirror/split every variable to [0, span]
    cols, cshift, shift_kind = [], [], []
    c_work, const = [], 0.0
    b = b0.copy()
    spans = []
    for j in range(n):
        a = A0[:, j]
        if np.isfinite(lb[j]):
            b = b - a * lb[j]
            const += c0[j] * lb[j]
            cols.append(a)
            c_work.append(c0[j])
            spans.append(ub[j] - lb[j])
            shift_kind.append(("shift", j))
        elif np.isfinite(ub[j]):
            b = b - a * ub[j]
            const += c0[j] * ub[j]
            cols.append(-a)
            c_work.append(-c0[j])
            spans.append(np.inf)
            shift_kind.append(("mirror", j))
        else:
            cols.append(a)
            c_work.append(c0[j])
            spans.append(np.inf)
            shift_kind.append(("pos", j))
            cols.append(-a)
            c_work.append(-c0[j])
            spans.append(np.inf)
            shift_kind.append(("neg", j))
    A = np.column_stack(cols) if cols else np.zeros((b.size, 0))
    c = np.asarray(c_work)
    spans = np.maximum(np.asarray(spans), 0.0)
    N = c.size
    m = b.size

    if m == 0:
        x_std = np.where(c >= 0, 0.0, spans)
        if np.any((c < 0) & ~np.isfinite(spans)):
            return LPSolution(LPStatus.UNBOUNDED)
        return _finish(x_std, shift_kind, n, lb, ub, c0, A0, b0,
                       np.zeros(0), 0, settings)

    # row scaling
    scale = np.maximum(np.abs(A).max(axis=1, initial=0.0), np.abs(b))
    scale = np.where(scale > 1e-12, scale, 1.0)
    A = A / scale[:, None]
    bs = b / scale
    sign = np.where(bs >= 0.0, 1.0, -1.0)
    A = A * sign[:, None]
    bs = bs * sign

    T = np.zeros((m + 1, N + m))
    T[:m, :N] = A
    T[:m, N:] = np.eye(m)
    xB = bs.copy()
    basis = np.arange(N, N + m)
    status = np.full(N + m, _LOWER, dtype=np.int8)
    status[basis] = _BASIC
    u = np.concatenate([spans, np.full(m, np.inf)])

    tab = _Tableau(T=T, xB=xB, basis=basis, status=status, u=u)
    # phase 1: minimize sum of artificials
    T[m, :] = -T[:m].sum(axis=0)
    T[m, N:] = 0.0
    tab.obj = float(xB.sum())

    enter_real = np.zeros(N + m, dtype=bool)
    enter_real[:N] = True
    stall_limit = 2 * (m + N) + 20
    hard_cap = 400 + 80 * (m + N)

    out = _simplex_phase(tab, enter_real, settings.lp_pivot_tol, stall_limit, hard_cap)
    if out == "unbounded":
        raise NumericalFailure("phase-1 objective reported unbounded")
    if tab.obj > settings.lp_feas_tol * (1.0 + abs(bs).max(initial=0.0)):
        return LPSolution(LPStatus.INFEASIBLE, iterations=tab.iterations,
                          infeasibility=float(tab.obj))

    # phase 2: real objective
    cb = np.where(tab.basis < N, c[np.minimum(tab.basis, N - 1)], 0.0)
    cb[tab.basis >= N] = 0.0
    full_c = np.concatenate([c, np.zeros(m)])
    T[m, :] = full_c - cb @ T[:m, :]
    T[m, tab.basis] = 0.0
    x_std = _standard_x(tab, N)
    tab.obj = float(c @ x_std)
    tab.bland = False
    tab.stall = 0

    out = _simplex_phase(tab, enter_real, settings.lp_pivot_tol, stall_limit, hard_cap)
    if out == "unbounded":
        return LPSolution(LPStatus.UNBOUNDED, iterations=tab.iterations)

    x_std = _standard_x(tab, N)
    duals = -T[m, N:] * sign / scale
    return _finish(x_std, shift_kind, n, lb, ub, c0, A0, b0, duals,
                   tab.iterations, settings, const)


def _standard_x(tab: _Tableau, N: int) -> np.ndarray:
    x = np.where(tab.status[:N] == _UPPER, tab.u[:N], 0.0)
    for row, col in enumerate(tab.basis):
        if col < N:
            x[col] = tab.xB[row]
    return x


def _finish(x_std, shift_kind, n, lb, ub, c0, A0, b0, duals, iters, settings,
            const: float = 0.0) -> LPSolution:
    x = np.zeros(n)
    for val, (kind, j) in zip(x_std, shift_kind):
        if kind == "shift":
            x[j] = lb[j] + val
        elif kind == "mirror":
            x[j] = ub[j] - val
        elif kind == "pos":
            x[j] += val
        else:
            x[j] -= val
    # clip roundoff-level bound violations, then verify
    x = np.minimum(np.maximum(x, lb), ub)
    if A0.size:
        resid = float(np.max(np.abs(A0 @ x - b0)))
        if resid > settings.lp_feas_tol * (1.0 + float(np.max(np.abs(b0), initial=0.0))):
            raise NumericalFailure(f"optimal basis residual {resid:.3e} above tolerance")
    return LPSolution(LPStatus.OPTIMAL, x=x, objective=float(c0 @ x),
                      duals=duals, iterations=iters)
