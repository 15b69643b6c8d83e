# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of _purekernels.  Same contracts, scalar loops in C.

Pole conventions match _purekernels: the conjugated factor carries poles in
the upper half plane, the direct factor in the lower half plane.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport atan

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex clog(double complex z)


def overlap_integrand(v, double k1_lo, double k1_hi, double exx_a,
                      double gxx_a, double exx_b, double gxx_b, double e_a,
                      double g_a, double e_b, double g_b, double pref):
    """Closed-form u-integral times the v-pole factors, on an array of v."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] varr = np.ascontiguousarray(
        v, dtype=np.float64).ravel()
    cdef Py_ssize_t n = varr.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(
        n, dtype=np.complex128)
    cdef bint same = exx_a == exx_b and gxx_a == gxx_b
    cdef double complex p = exx_a + 1j * gxx_a
    cdef double complex q = exx_b - 1j * gxx_b
    cdef double complex pa = e_a + 1j * g_a
    cdef double complex pb = e_b - 1j * g_b
    cdef double complex fu, u1c, u2c
    cdef double u1, u2
    cdef Py_ssize_t i
    for i in range(n):
        u1 = k1_lo + varr[i]
        u2 = k1_hi + varr[i]
        if same:
            fu = (atan((u2 - exx_a) / gxx_a)
                  - atan((u1 - exx_a) / gxx_a)) / gxx_a
        else:
            u1c = u1
            u2c = u2
            fu = (clog(u2c - p) - clog(u1c - p)
                  - clog(u2c - q) + clog(u1c - q)) / (p - q)
        out[i] = pref * fu / ((varr[i] - pa) * (varr[i] - pb))
    return out


def midpoint_overlap(double k1_lo, double k1_hi, Py_ssize_t n1,
                     double k2_lo, double k2_hi, Py_ssize_t n2,
                     double exx_a, double gxx_a, double exx_b, double gxx_b,
                     double e_a, double g_a, double e_b, double g_b,
                     double pref, Py_ssize_t chunk=256):
    """Midpoint-rule value of the same window integral on an n1 x n2 grid."""
    cdef double h1 = (k1_hi - k1_lo) / n1
    cdef double h2 = (k2_hi - k2_lo) / n2
    cdef bint same = exx_a == exx_b and gxx_a == gxx_b
    cdef double complex p = exx_a + 1j * gxx_a
    cdef double complex q = exx_b - 1j * gxx_b
    cdef double complex pa = e_a + 1j * g_a
    cdef double complex pb = e_b - 1j * g_b
    cdef double complex total = 0, row, gv, fu
    cdef double k1, k2, u, du
    cdef Py_ssize_t i, j
    for j in range(n2):
        k2 = k2_lo + (j + 0.5) * h2
        gv = 1.0 / ((k2 - pa) * (k2 - pb))
        row = 0
        for i in range(n1):
            u = k1_lo + (i + 0.5) * h1 + k2
            if same:
                du = u - exx_a
                fu = 1.0 / (du * du + gxx_a * gxx_a)
            else:
                fu = 1.0 / ((u - p) * (u - q))
            row = row + fu
        total = total + row * gv
    return complex(pref * h1 * h2 * total)
