# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels: fused weighted power sums and piecewise powers.

These are the inner loops of every quadrature in the package; the fused
forms avoid the temporary arrays the NumPy fallback allocates.  Summations
are sequential, so results are deterministic (bit-identical across runs).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport pow, sqrt

cnp.import_array()

BACKEND_NAME = "cython"


def weighted_power_sum(const cnp.float64_t[::1] absf, w, double p):
    """sum_j w_j * absf_j**p over flat float64 arrays (w may be None)."""
    cdef Py_ssize_t i, m = absf.shape[0]
    cdef double acc = 0.0
    cdef double v
    cdef const cnp.float64_t[::1] wv
    if w is None:
        if p == 2.0:
            for i in range(m):
                v = absf[i]
                acc += v * v
        elif p == 1.0:
            for i in range(m):
                acc += absf[i]
        else:
            for i in range(m):
                acc += pow(absf[i], p)
        return acc
    wv = w
    if p == 2.0:
        for i in range(m):
            v = absf[i]
            acc += wv[i] * v * v
    elif p == 1.0:
        for i in range(m):
            acc += wv[i] * absf[i]
    else:
        for i in range(m):
            acc += wv[i] * pow(absf[i], p)
    return acc


def weighted_power_sum_complex(const cnp.complex128_t[::1] f, w, double p):
    """sum_j w_j |f_j|**p without materializing the modulus array."""
    cdef Py_ssize_t i, m = f.shape[0]
    cdef double acc = 0.0
    cdef double re, im, m2
    cdef const cnp.float64_t[::1] wv
    if w is None:
        if p == 2.0:
            for i in range(m):
                re = f[i].real
                im = f[i].imag
                acc += re * re + im * im
        elif p == 1.0:
            for i in range(m):
                re = f[i].real
                im = f[i].imag
                acc += sqrt(re * re + im * im)
        else:
            for i in range(m):
                re = f[i].real
                im = f[i].imag
                m2 = re * re + im * im
                if m2 > 0.0:
                    acc += pow(m2, 0.5 * p)
        return acc
    wv = w
    if p == 2.0:
        for i in range(m):
            re = f[i].real
            im = f[i].imag
            acc += wv[i] * (re * re + im * im)
    elif p == 1.0:
        for i in range(m):
            re = f[i].real
            im = f[i].imag
            acc += wv[i] * sqrt(re * re + im * im)
    else:
        for i in range(m):
            re = f[i].real
            im = f[i].imag
            m2 = re * re + im * im
            if m2 > 0.0:
                acc += wv[i] * pow(m2, 0.5 * p)
    return acc


def piecewise_power_values(const cnp.float64_t[::1] t, double e1, double e2):
    """t**e1 where t <= 1, t**e2 where t >= 1, elementwise (t > 0)."""
    cdef Py_ssize_t i, m = t.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef cnp.float64_t[::1] out = out_arr
    for i in range(m):
        if t[i] <= 1.0:
            out[i] = pow(t[i], e1)
        else:
            out[i] = pow(t[i], e2)
    return out_arr


def abs_magnitude(parts):
    """Euclidean magnitude sqrt(sum |g_k|^2) over a list of complex arrays."""
    cdef Py_ssize_t i, m
    cdef const cnp.complex128_t[::1] g
    cdef cnp.float64_t[::1] acc
    first = np.ascontiguousarray(parts[0]).ravel()
    m = first.shape[0]
    acc_arr = np.zeros(m, dtype=np.float64)
    acc = acc_arr
    cdef double re, im
    for part in parts:
        g = np.ascontiguousarray(part).ravel()
        for i in range(m):
            re = g[i].real
            im = g[i].imag
            acc[i] += re * re + im * im
    out = np.sqrt(acc_arr)
    return out.reshape(np.asarray(parts[0]).shape)
