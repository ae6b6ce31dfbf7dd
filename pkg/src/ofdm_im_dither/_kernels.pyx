# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: exhaustive subblock ML search and dither trimming."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


def ml_detect_batch(const double complex[:, ::1] Y,
                    const double complex[:, ::1] H,
                    const cnp.intp_t[:, ::1] patterns,
                    const double complex[::1] points):
    cdef Py_ssize_t S = Y.shape[0], n = Y.shape[1]
    cdef Py_ssize_t P = patterns.shape[0], k = patterns.shape[1], M = points.shape[0]
    cdef Py_ssize_t s, i, m, p, j
    cdef double yr, yi, hr, hi, dr, di, d, best, total
    cdef cnp.uint8_t[:, ::1] mask = np.zeros((P, n), dtype=np.uint8)
    for p in range(P):
        for j in range(k):
            mask[p, patterns[p, j]] = 1

    sap_out = np.empty(S, dtype=np.intp)
    lab_out = np.empty((S, k), dtype=np.intp)
    met_out = np.empty(S, dtype=np.float64)
    cdef cnp.intp_t[::1] sap = sap_out
    cdef cnp.intp_t[:, ::1] lab = lab_out
    cdef double[::1] met = met_out
    cdef double[::1] idle = np.empty(n)
    cdef double[::1] act = np.empty(n)
    cdef cnp.intp_t[::1] arg = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t best_p

    with nogil:
        for s in range(S):
            for i in range(n):
                yr = Y[s, i].real
                yi = Y[s, i].imag
                hr = H[s, i].real
                hi = H[s, i].imag
                idle[i] = yr * yr + yi * yi
                best = 1e308
                arg[i] = 0
                for m in range(M):
                    dr = yr - (hr * points[m].real - hi * points[m].imag)
                    di = yi - (hr * points[m].imag + hi * points[m].real)
                    d = dr * dr + di * di
                    if d < best:
                        best = d
                        arg[i] = m
                act[i] = best
            best = 1e308
            best_p = 0
            for p in range(P):
                total = 0.0
                for i in range(n):
                    if mask[p, i]:
                        total = total + act[i]
                    else:
                        total = total + idle[i]
                if total < best:
                    best = total
                    best_p = p
            sap[s] = best_p
            met[s] = best
            for j in range(k):
                lab[s, j] = arg[patterns[best_p, j]]
    return sap_out, lab_out, met_out


def trim_batch(const double complex[::1] d,
               const double[::1] bound,
               const cnp.int8_t[::1] kind):
    cdef Py_ssize_t t, T = d.shape[0]
    cdef double re, im, size, b
    out_arr = np.empty(T, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    with nogil:
        for t in range(T):
            re = d[t].real
            im = d[t].imag
            b = bound[t]
            if kind[t] == 0:
                out[t] = 0
                continue
            if kind[t] == 1:
                size = sqrt(re * re + im * im)
            else:
                size = fabs(re) + fabs(im)
            if size <= b:
                out[t] = d[t]
            else:
                out[t].real = re * (b / size)
                out[t].imag = im * (b / size)
    return out_arr
