"""Dense two-phase simplex with Bland's anti-cycling rule.

Solves   maximize c.x   subject to   A x <= b,  x >= 0.

All rows are inequalities; callers encode equalities or >= rows by negation.
Instances here are small (a few thousand variables at most), so a dense
tableau with vectorized pivots is simpler and more debuggable than anything
sparse. Phase I minimizes the total artificial mass; a strictly positive
optimum is returned as the infeasibility certificate. Bland's rule (lowest
eligible index enters, lowest basic index leaves on ratio ties) is always on
because the oracle programs sit at heavily degenerate vertices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg.blas import dger

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"

_TOL = 1e-9


@dataclass
class LpResult:
    status: str
    objective: float
    x: np.ndarray | None = None
    duals: np.ndarray | None = None  # per original row, sign-adjusted for flips
    reduced_costs: np.ndarray | None = None  # per structural variable
    certificate: float | None = None  # phase-I objective when infeasible


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    # rank-1 elimination via BLAS ger on the Fortran-ordered tableau;
    # avoids the temporary that np.outer would allocate every pivot
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    out = dger(-1.0, factor, T[row].copy(), a=T, overwrite_a=1)
    if out is not T:  # BLAS copied instead of updating in place
        T[...] = out


_STALL_LIMIT = 12


def _iterate(T: np.ndarray, basis: list[int], width: int) -> str:
    """Run simplex pivots until optimal/unbounded; objective row is T[-1].

    Entering column by Dantzig's rule (most negative reduced cost) for speed;
    after _STALL_LIMIT consecutive degenerate pivots the iteration drops into
    Bland's rule (lowest eligible index in, lowest basic index out) until the
    objective moves again, which rules out cycling.
    """
    stall = 0
    while True:
        red = T[-1, :width]
        if stall < _STALL_LIMIT:
            enter = int(np.argmin(red))
            if red[enter] >= -_TOL:
                return STATUS_OPTIMAL
        else:
            eligible = np.flatnonzero(red < -_TOL)
            if eligible.size == 0:
                return STATUS_OPTIMAL
            enter = int(eligible[0])
        col = T[:-1, enter]
        rhs = T[:-1, -1]
        positive = col > _TOL
        if not positive.any():
            return STATUS_UNBOUNDED
        ratios = np.full(col.shape, np.inf)
        ratios[positive] = rhs[positive] / col[positive]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-12)
        if stall < _STALL_LIMIT and ties.size > 1:
            # largest pivot element among ties for numerical stability
            leave = int(ties[np.argmax(col[ties])])
        else:
            leave = int(min(ties, key=lambda r: basis[r]))  # Bland on ties
        _pivot(T, leave, enter)
        basis[leave] = enter
        stall = 0 if best > 1e-12 else stall + 1


def solve_lp(c, A, b, maximize: bool = True) -> LpResult:
    """Two-phase simplex for max/min c.x s.t. A x <= b, x >= 0."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError("inconsistent LP dimensions")

    # standardize: slack per row, negate rows with negative rhs (their slack
    # then enters with -1 and an artificial is needed instead)
    flipped = b < 0
    A_std = np.where(flipped[:, None], -A, A)
    b_std = np.where(flipped, -b, b)
    slack_sign = np.where(flipped, -1.0, 1.0)

    art_rows = np.flatnonzero(flipped)
    n_art = art_rows.size
    width = n + m + n_art

    T = np.zeros((m + 1, width + 1), order="F")
    T[:m, :n] = A_std
    T[:m, n : n + m] = np.diag(slack_sign)
    for j, r in enumerate(art_rows):
        T[r, n + m + j] = 1.0
    T[:m, -1] = b_std

    basis = [0] * m
    for r in range(m):
        basis[r] = n + r  # slack basic where possible
    for j, r in enumerate(art_rows):
        basis[r] = n + m + j

    # phase I: minimize sum of artificials; price the unit costs out of the
    # basic artificial rows so their own reduced costs start at zero
    if n_art:
        T[-1, :] = 0.0
        T[-1, n + m : n + m + n_art] = 1.0
        for r in art_rows:
            T[-1, :] -= T[r, :]
        status = _iterate(T, basis, width)
        assert status == STATUS_OPTIMAL  # phase-I objective is bounded below by 0
        phase1 = -T[-1, -1]
        if phase1 > 1e-9:
            return LpResult(
                status=STATUS_INFEASIBLE, objective=np.nan, certificate=float(phase1)
            )
        # drive leftover (degenerate) artificials out of the basis
        keep_rows = list(range(m))
        for r in range(m):
            if basis[r] >= n + m:
                pivot_col = next(
                    (j for j in range(n + m) if abs(T[r, j]) > _TOL), None
                )
                if pivot_col is None:
                    keep_rows.remove(r)  # redundant row
                else:
                    _pivot(T, r, pivot_col)
                    basis[r] = pivot_col
        if len(keep_rows) < m:
            T = np.vstack([T[keep_rows], T[-1:]])
            basis = [basis[r] for r in keep_rows]
            m_eff = len(keep_rows)
        else:
            m_eff = m
        T = np.asfortranarray(np.delete(T, np.s_[n + m : n + m + n_art], axis=1))
        width = n + m
    else:
        m_eff = m

    # phase II
    sense = -1.0 if maximize else 1.0  # internal minimization
    obj = np.zeros(width + 1)
    obj[:n] = sense * c
    T[-1, :] = obj
    for r in range(m_eff):
        if abs(T[-1, basis[r]]) > 0.0:
            T[-1, :] -= T[-1, basis[r]] * T[r, :]
    status = _iterate(T, basis, width)
    if status == STATUS_UNBOUNDED:
        return LpResult(status=STATUS_UNBOUNDED, objective=np.nan)

    x = np.zeros(width)
    for r in range(m_eff):
        x[basis[r]] = T[r, -1]
    xs = x[:n]
    objective = float(np.dot(c, xs))

    # duals from the objective row under the slack columns; flip back the sign
    # for rows that were negated during standardization
    y = T[-1, n : n + m] * slack_sign
    if maximize:
        duals = y
    else:
        duals = -y
    reduced = T[-1, :n].copy()
    return LpResult(
        status=STATUS_OPTIMAL,
        objective=objective,
        x=xs,
        duals=duals,
        reduced_costs=reduced,
        certificate=None,
    )
