"""Dense two-phase simplex with Bland's anti-cycling rule.

Solves ``min c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and
``x >= 0``.  Sized for the small feasibility and activity problems of the
certifier, not for large sparse LPs.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NumericalError

PIVOT_TOL = 1e-10
COST_TOL = 1e-11
FEASIBILITY_TOL = 1e-9


class LPResult(NamedTuple):
    status: str  # "optimal", "infeasible" or "unbounded"
    x: np.ndarray | None
    fun: float | None
    phase1_value: float


def _pivot(T: np.ndarray, r: int, j: int) -> None:
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run(T: np.ndarray, basis: list[int], ncols: int, max_iter: int) -> str:
    """Iterate on tableau ``T`` (last row = reduced costs, last column = rhs)."""
    m = T.shape[0] - 1
    for _ in range(max_iter):
        red = T[-1, :ncols]
        entering = np.nonzero(red < -COST_TOL)[0]
        if entering.size == 0:
            return "optimal"
        j = int(entering[0])
        col = T[:m, j]
        rows = np.nonzero(col > PIVOT_TOL)[0]
        if rows.size == 0:
            return "unbounded"
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, r, j)
        basis[r] = j
    raise NumericalError("simplex iteration limit reached")


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, feas_tol: float = FEASIBILITY_TOL) -> LPResult:
    c = np.asarray(c, dtype=float).ravel()
    nvar = c.size
    A_ub = np.zeros((0, nvar)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, nvar)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    # rows: [A_ub | I] for the inequalities, [A_eq | 0] for equalities
    A = np.zeros((m, nvar + m_ub))
    A[:m_ub, :nvar] = A_ub
    A[:m_ub, nvar:] = np.eye(m_ub)
    A[m_ub:, :nvar] = A_eq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    nstd = nvar + m_ub
    needs_art = [i for i in range(m) if i >= m_ub or neg[i]]
    nart = len(needs_art)
    ncols = nstd + nart
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :nstd] = A
    T[:m, -1] = b
    basis = [nvar + i for i in range(m)]  # slack basis for untouched <= rows
    for k, i in enumerate(needs_art):
        T[i, nstd + k] = 1.0
        basis[i] = nstd + k
    max_iter = 50 * (m + ncols) + 100

    # phase 1: minimize the sum of artificials
    T[-1, nstd:ncols] = 1.0
    for i in needs_art:
        T[-1] -= T[i]
    _run(T, basis, ncols, max_iter)
    phase1 = -T[-1, -1]
    if phase1 > feas_tol:
        return LPResult("infeasible", None, None, phase1)

    # drive remaining artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= nstd:
            cand = np.nonzero(np.abs(T[r, :nstd]) > PIVOT_TOL)[0]
            if cand.size == 0:
                continue
            _pivot(T, r, int(cand[0]))
            basis[r] = int(cand[0])
        keep.append(r)
    T = np.vstack([T[keep][:, list(range(nstd)) + [ncols]], np.zeros((1, nstd + 1))])
    basis = [basis[r] for r in keep]

    # phase 2
    cost = np.zeros(nstd)
    cost[:nvar] = c
    T[-1, :nstd] = cost
    for r, j in enumerate(basis):
        T[-1] -= cost[j] * T[r]
    status = _run(T, basis, nstd, max_iter)
    x = np.zeros(nstd)
    for r, j in enumerate(basis):
        x[j] = T[r, -1]
    x = np.maximum(x[:nvar], 0.0)
    if status == "unbounded":
        return LPResult("unbounded", x, None, phase1)
    return LPResult("optimal", x, float(c @ x), phase1)
