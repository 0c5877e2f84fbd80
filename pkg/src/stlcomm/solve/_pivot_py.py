"""Pure-numpy simplex pivot kernels (fallback for the compiled extension).

The compiled module ``_pivot_c`` exports the same three functions with
identical semantics; ``stlcomm.solve.simplex`` picks whichever is
importable.  Column status codes: 0 = nonbasic at lower, 1 = nonbasic at
upper, 2 = nonbasic free (value 0), 3 = basic, 4 = fixed/ineligible.
"""

from __future__ import annotations

import numpy as np

AT_LOWER = 0
AT_UPPER = 1
FREE = 2
BASIC = 3
FIXED = 4

BACKEND = "python"


def choose_entering(dj: np.ndarray, status: np.ndarray, tol: float,
                    bland: bool) -> int:
    """Index of the entering column, or -1 at optimality.

    Eligible columns: at-lower with dj < -tol, at-upper with dj > tol,
    free with |dj| > tol.  Dantzig rule picks the largest violation;
    Bland's rule the smallest index (anti-cycling).
    """
    viol = np.zeros_like(dj)
    lower_mask = status == AT_LOWER
    upper_mask = status == AT_UPPER
    free_mask = status == FREE
    viol[lower_mask] = -dj[lower_mask]
    viol[upper_mask] = dj[upper_mask]
    viol[free_mask] = np.abs(dj[free_mask])
    eligible = viol > tol
    if not eligible.any():
        return -1
    if bland:
        return int(np.flatnonzero(eligible)[0])
    return int(np.argmax(viol))


def ratio_test(col: np.ndarray, xB: np.ndarray, lbB: np.ndarray,
               ubB: np.ndarray, dirn: float, tol: float) -> tuple[float, int, int]:
    """Largest step t >= 0 before a basic variable hits a bound.

    The entering variable moves by dirn * t, changing basics by
    -dirn * t * col.  Returns (t, blocking_row, hit_code) with
    hit_code 0 = lower bound, 1 = upper bound; blocking_row is -1 when
    no basic blocks (t = inf).  Ties break on the smallest row index.
    """
    coeff = dirn * col
    t_best = np.inf
    row_best = -1
    hit_best = 0
    dec = coeff > tol
    if dec.any():
        gaps = np.where(dec, np.maximum(xB - lbB, 0.0), np.inf)
        ratios = np.where(dec, gaps / np.where(dec, coeff, 1.0), np.inf)
        r = int(np.argmin(ratios))
        if ratios[r] < t_best:
            t_best, row_best, hit_best = float(ratios[r]), r, 0
    inc = coeff < -tol
    if inc.any():
        gaps = np.where(inc, np.maximum(ubB - xB, 0.0), np.inf)
        ratios = np.where(inc, gaps / np.where(inc, -coeff, 1.0), np.inf)
        r = int(np.argmin(ratios))
        if ratios[r] < t_best or (ratios[r] == t_best and row_best >= 0 and r < row_best):
            t_best, row_best, hit_best = float(ratios[r]), r, 1
    return t_best, row_best, hit_best


def pivot_update(T: np.ndarray, dj: np.ndarray, pr: int, pc: int) -> None:
    """Gauss-Jordan pivot on (pr, pc): row pr normalised, other rows and the
    reduced-cost row eliminated, all in place."""
    piv = T[pr, pc]
    T[pr, :] /= piv
    column = T[:, pc].copy()
    column[pr] = 0.0
    T -= np.outer(column, T[pr, :])
    dj -= dj[pc] * T[pr, :]
