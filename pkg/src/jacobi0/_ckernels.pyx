# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels`` (same signatures)."""
import numpy as np

from libc.math cimport M_PI, cos, exp, expm1, sin

cdef extern from "complex.h" nogil:
    double complex clog(double complex)
    double complex cexp(double complex)


cdef inline double complex _cexpm1(double complex a) noexcept nogil:
    cdef double x = a.real
    cdef double y = a.imag
    cdef double s = sin(0.5 * y)
    return (expm1(x) * cos(y) - 2.0 * s * s) + 1j * (exp(x) * sin(y))


def cexpm1(a):
    cdef double complex[::1] v = np.ascontiguousarray(np.atleast_1d(a), dtype=complex).ravel()
    out = np.empty(v.shape[0], dtype=complex)
    cdef double complex[::1] o = out
    cdef Py_ssize_t i
    for i in range(v.shape[0]):
        o[i] = _cexpm1(v[i])
    return out.reshape(np.shape(a))


def log_theta(tau, z, Py_ssize_t nterms):
    cdef double complex t = tau
    cdef double complex tpi = 2j * M_PI
    cdef const double complex[::1] zv = np.ascontiguousarray(z, dtype=complex)
    cdef Py_ssize_t nz = zv.shape[0]
    out = np.empty(nz, dtype=complex)
    cdef double complex[::1] o = out
    cdef double complex base = 0
    cdef double complex acc
    cdef Py_ssize_t i, n
    with nogil:
        for n in range(1, nterms + 1):
            base = base - 2.0 * clog(-_cexpm1(tpi * n * t))
        for i in range(nz):
            acc = clog(-_cexpm1(tpi * zv[i])) + base
            for n in range(1, nterms + 1):
                acc = acc + clog(-_cexpm1(tpi * (n * t + zv[i])))
                acc = acc + clog(-_cexpm1(tpi * (n * t - zv[i])))
            o[i] = acc
    return out


def theta_logderiv(tau, z, Py_ssize_t nterms):
    cdef double complex t = tau
    cdef double complex tpi = 2j * M_PI
    cdef const double complex[::1] zv = np.ascontiguousarray(z, dtype=complex)
    cdef Py_ssize_t nz = zv.shape[0]
    out = np.empty(nz, dtype=complex)
    cdef double complex[::1] o = out
    cdef double complex a, ap, am, acc
    cdef Py_ssize_t i, n
    with nogil:
        for i in range(nz):
            a = tpi * zv[i]
            acc = -cexp(a) / _cexpm1(a)
            for n in range(1, nterms + 1):
                ap = tpi * (n * t + zv[i])
                am = tpi * (n * t - zv[i])
                acc = acc - cexp(ap) / _cexpm1(ap) + cexp(am) / _cexpm1(am)
            o[i] = acc
    return out


def lambert(tau, Py_ssize_t nterms):
    cdef double complex t = tau
    cdef double complex tpi = 2j * M_PI
    cdef double complex a, acc = 0
    cdef Py_ssize_t n
    with nogil:
        for n in range(1, nterms + 1):
            a = tpi * n * t
            acc = acc - n * cexp(a) / _cexpm1(a)
    return complex(acc)


def _conv2d_int(const long long[:, ::1] a, const long long[:, ::1] b, Py_ssize_t nrows):
    cdef Py_ssize_t wa = a.shape[1], wb = b.shape[1]
    out = np.zeros((nrows, wa + wb - 1), dtype=np.int64)
    cdef long long[:, ::1] o = out
    cdef Py_ssize_t n, m, i, j
    cdef long long x
    with nogil:
        for n in range(min(nrows, a.shape[0])):
            for i in range(wa):
                x = a[n, i]
                if x == 0:
                    continue
                for m in range(min(nrows - n, b.shape[0])):
                    for j in range(wb):
                        o[n + m, i + j] += x * b[m, j]
    return out


def _conv2d_complex(const double complex[:, ::1] a, const double complex[:, ::1] b, Py_ssize_t nrows):
    cdef Py_ssize_t wa = a.shape[1], wb = b.shape[1]
    out = np.zeros((nrows, wa + wb - 1), dtype=complex)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t n, m, i, j
    cdef double complex x
    with nogil:
        for n in range(min(nrows, a.shape[0])):
            for i in range(wa):
                x = a[n, i]
                if x == 0:
                    continue
                for m in range(min(nrows - n, b.shape[0])):
                    for j in range(wb):
                        o[n + m, i + j] = o[n + m, i + j] + x * b[m, j]
    return out


def conv2d(a, b, Py_ssize_t nrows):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.dtype.kind == "i" and b.dtype.kind == "i":
        return _conv2d_int(np.ascontiguousarray(a, dtype=np.int64),
                           np.ascontiguousarray(b, dtype=np.int64), nrows)
    return _conv2d_complex(np.ascontiguousarray(a, dtype=complex),
                           np.ascontiguousarray(b, dtype=complex), nrows)
