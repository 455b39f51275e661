# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled red-black SOR sweeps for the 7-point Laplace stencil.

Semantics match berrytrap.kernels.sor_py exactly: same color definition
((i + j + k) % 2), same update expression, so both backends produce
bitwise-identical iterates.
"""
import numpy as np

cimport numpy as cnp

BACKEND = "cython"


def sor_pass(double[:, :, ::1] u, const cnp.uint8_t[:, :, ::1] fixed, double omega):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], nz = u.shape[2]
    cdef Py_ssize_t i, j, k, kstart
    cdef int parity
    cdef double nb
    with nogil:
        for parity in range(2):
            for i in range(1, nx - 1):
                for j in range(1, ny - 1):
                    # first interior k with (i + j + k) % 2 == parity
                    kstart = 2 - ((parity + i + j) & 1)
                    for k in range(kstart, nz - 1, 2):
                        if fixed[i, j, k]:
                            continue
                        nb = (u[i - 1, j, k] + u[i + 1, j, k]
                              + u[i, j - 1, k] + u[i, j + 1, k]
                              + u[i, j, k - 1] + u[i, j, k + 1])
                        u[i, j, k] = (1.0 - omega) * u[i, j, k] + omega * nb / 6.0


def max_residual(double[:, :, ::1] u, const cnp.uint8_t[:, :, ::1] fixed):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], nz = u.shape[2]
    cdef Py_ssize_t i, j, k
    cdef double nb, r, worst = 0.0
    with nogil:
        for i in range(1, nx - 1):
            for j in range(1, ny - 1):
                for k in range(1, nz - 1):
                    if fixed[i, j, k]:
                        continue
                    nb = (u[i - 1, j, k] + u[i + 1, j, k]
                          + u[i, j - 1, k] + u[i, j + 1, k]
                          + u[i, j, k - 1] + u[i, j, k + 1])
                    r = u[i, j, k] - nb / 6.0
                    if r < 0.0:
                        r = -r
                    if r > worst:
                        worst = r
    return worst
