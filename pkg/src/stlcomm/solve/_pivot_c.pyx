# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled simplex pivot kernels; semantics match _pivot_py exactly."""

from libc.math cimport INFINITY, fabs

import numpy as np

AT_LOWER = 0
AT_UPPER = 1
FREE = 2
BASIC = 3
FIXED = 4

BACKEND = "cython"


def choose_entering(double[::1] dj, signed char[::1] status, double tol,
                    bint bland):
    cdef Py_ssize_t n = dj.shape[0]
    cdef Py_ssize_t j, best = -1
    cdef double v, best_v = tol
    for j in range(n):
        if status[j] == 0:      # at lower
            v = -dj[j]
        elif status[j] == 1:    # at upper
            v = dj[j]
        elif status[j] == 2:    # free
            v = fabs(dj[j])
        else:
            continue
        if v > tol:
            if bland:
                return j
            if v > best_v:
                best_v = v
                best = j
    return best


def ratio_test(double[::1] col, double[::1] xB, double[::1] lbB,
               double[::1] ubB, double dirn, double tol):
    cdef Py_ssize_t m = col.shape[0]
    cdef Py_ssize_t i, row_best = -1
    cdef int hit_best = 0
    cdef double t_best = INFINITY
    cdef double coeff, gap, ratio
    for i in range(m):
        coeff = dirn * col[i]
        if coeff > tol:
            gap = xB[i] - lbB[i]
            if gap < 0.0:
                gap = 0.0
            ratio = gap / coeff
            if ratio < t_best:
                t_best = ratio
                row_best = i
                hit_best = 0
    for i in range(m):
        coeff = dirn * col[i]
        if coeff < -tol:
            gap = ubB[i] - xB[i]
            if gap < 0.0:
                gap = 0.0
            ratio = gap / (-coeff)
            if ratio < t_best or (ratio == t_best and row_best >= 0 and i < row_best):
                t_best = ratio
                row_best = i
                hit_best = 1
    return t_best, row_best, hit_best


def pivot_update(double[:, ::1] T, double[::1] dj, Py_ssize_t pr, Py_ssize_t pc):
    cdef Py_ssize_t m = T.shape[0]
    cdef Py_ssize_t n = T.shape[1]
    cdef Py_ssize_t i, k
    cdef double piv = T[pr, pc]
    cdef double factor
    for k in range(n):
        T[pr, k] /= piv
    for i in range(m):
        if i == pr:
            continue
        factor = T[i, pc]
        if factor != 0.0:
            for k in range(n):
                T[i, k] -= factor * T[pr, k]
    factor = dj[pc]
    if factor != 0.0:
        for k in range(n):
            dj[k] -= factor * T[pr, k]
