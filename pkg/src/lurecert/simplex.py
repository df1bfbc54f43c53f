"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves ``min c @ x`` subject to ``A_ub @ x <= b_ub``, ``A_eq @ x == b_eq`` and
``x >= 0``.  Intended for small dense problems (tens of variables, a few
thousand constraints).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = ["LPResult", "linprog_simplex"]


@dataclass(frozen=True)
class LPResult:
    status: str  # optimal | infeasible | unbounded | iteration_limit
    x: Optional[np.ndarray]
    fun: float
    nit: int

    @property
    def success(self) -> bool:
        return self.status == "optimal"


def _pivot(T: np.ndarray, r: int, c: int) -> None:
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    # a tableau row is nonzero only on nonbasic columns, so update just those
    nz = np.flatnonzero(T[r])
    T[:, nz] -= np.outer(col, T[r, nz])


def _run(T, basis, ncols, max_iter, tol, nit):
    """Iterate on tableau ``T`` (objective in the last row) over the first ``ncols`` columns."""
    m = T.shape[0] - 1
    while True:
        if nit >= max_iter:
            return "iteration_limit", nit
        red = T[-1, :ncols]
        cand = np.flatnonzero(red < -tol)
        if cand.size == 0:
            return "optimal", nit
        e = int(cand[0])  # Bland: lowest index entering
        col = T[:m, e]
        pos = col > tol
        if not np.any(pos):
            return "unbounded", nit
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / col[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + tol * max(1.0, abs(best)))
        # Bland: among ties the row whose basic variable has the lowest index leaves
        r = int(ties[np.argmin(basis[ties])])
        _pivot(T, r, e)
        basis[r] = e
        nit += 1


def linprog_simplex(
    c,
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    max_iter: int = 5000,
    tol: float = 1e-10,
) -> LPResult:
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    mu, me = A_ub.shape[0], A_eq.shape[0]
    m = mu + me

    # columns: originals | ub slacks | artificials
    sign_ub = np.where(b_ub < 0, -1.0, 1.0)
    sign_eq = np.where(b_eq < 0, -1.0, 1.0)
    need_art = np.concatenate((b_ub < 0, np.ones(me, dtype=bool)))
    n_art = int(need_art.sum())
    N = n + mu + n_art
    T = np.zeros((m + 1, N + 1))
    T[:mu, :n] = sign_ub[:, None] * A_ub
    T[:mu, n : n + mu] = np.diag(sign_ub)
    T[:mu, -1] = sign_ub * b_ub
    T[mu:m, :n] = sign_eq[:, None] * A_eq
    T[mu:m, -1] = sign_eq * b_eq

    basis = np.empty(m, dtype=int)
    art_rows = np.flatnonzero(need_art)
    for j, i in enumerate(art_rows):
        T[i, n + mu + j] = 1.0
        basis[i] = n + mu + j
    slack_rows = np.flatnonzero(~need_art)
    basis[slack_rows] = n + slack_rows

    nit = 0
    if n_art:
        T[-1, :] = 0.0
        T[-1, n + mu :N] = 1.0
        for i in art_rows:
            T[-1] -= T[i]
        status, nit = _run(T, basis, N, max_iter, tol, nit)
        if status == "iteration_limit":
            return LPResult(status, None, np.nan, nit)
        if -T[-1, -1] > 1e-8 * max(1.0, np.abs(T[:m, -1]).max(initial=0.0)):
            return LPResult("infeasible", None, np.nan, nit)
        # drive remaining artificials out of the basis
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= n + mu:
                nz = np.flatnonzero(np.abs(T[i, : n + mu]) > tol)
                if nz.size:
                    _pivot(T, i, int(nz[0]))
                    basis[i] = int(nz[0])
                else:
                    keep[i] = False
        T = np.vstack((T[:m][keep], T[-1:]))
        basis = basis[keep]
        T = np.hstack((T[:, : n + mu], T[:, -1:]))
        m = T.shape[0] - 1

    T[-1, :] = 0.0
    T[-1, :n] = c
    for i in range(m):
        j = basis[i]
        if j < n and c[j] != 0.0:
            T[-1] -= c[j] * T[i]
    status, nit = _run(T, basis, n + mu, max_iter, tol, nit)
    if status != "optimal":
        return LPResult(status, None, np.nan, nit)
    x = np.zeros(n + mu)
    x[basis] = T[:m, -1]
    xs = x[:n]
    return LPResult("optimal", xs, float(c @ xs), nit)
