"""Pure numpy implementations of the numerical kernels.

Used when the compiled ``_ckernels`` extension is unavailable, and as the
reference the compiled backend is tested against.
"""
import numpy as np

TWO_PI_I = 2j * np.pi
_CHUNK = 4096


def cexpm1(a):
    """``exp(a) - 1`` for complex ``a`` without cancellation near 0."""
    a = np.asarray(a, dtype=complex)
    x, y = a.real, a.imag
    s = np.sin(0.5 * y)
    return (np.expm1(x) * np.cos(y) - 2.0 * s * s) + 1j * (np.exp(x) * np.sin(y))


def log_theta(tau, z, nterms):
    """log of ``(1-zeta) prod_{n<=nterms} (1-q^n zeta)(1-q^n/zeta)/(1-q^n)^2``.

    ``z`` is a 1-d complex array; the result has the same shape. The branch
    of the logarithm is arbitrary (only ``exp`` of the result is meaningful).
    """
    z = np.ascontiguousarray(z, dtype=complex)
    tau = complex(tau)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(-cexpm1(TWO_PI_I * z))
        for start in range(1, nterms + 1, _CHUNK):
            n = np.arange(start, min(start + _CHUNK, nterms + 1), dtype=float)
            nt = (n * tau)[:, None]
            out += np.log(-cexpm1(TWO_PI_I * (nt + z))).sum(axis=0)
            out += np.log(-cexpm1(TWO_PI_I * (nt - z))).sum(axis=0)
            out -= 2.0 * np.log(-cexpm1(TWO_PI_I * n * tau)).sum()
    return out


def theta_logderiv(tau, z, nterms):
    """``zeta/(1-zeta) + sum_n (q^n zeta/(1-q^n zeta) - q^n/zeta/(1-q^n/zeta))``."""
    z = np.ascontiguousarray(z, dtype=complex)
    tau = complex(tau)
    a = TWO_PI_I * z
    out = -np.exp(a) / cexpm1(a)
    for start in range(1, nterms + 1, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, nterms + 1), dtype=float)
        nt = (n * tau)[:, None]
        ap = TWO_PI_I * (nt + z)
        am = TWO_PI_I * (nt - z)
        out += (-np.exp(ap) / cexpm1(ap) + np.exp(am) / cexpm1(am)).sum(axis=0)
    return out


def lambert(tau, nterms):
    """``sum_{n<=nterms} n q^n / (1 - q^n)``."""
    tau = complex(tau)
    total = 0j
    for start in range(1, nterms + 1, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, nterms + 1), dtype=float)
        a = TWO_PI_I * n * tau
        total += (-n * np.exp(a) / cexpm1(a)).sum()
    return complex(total)


def conv2d(a, b, nrows):
    """Row-truncated 2-d convolution.

    ``out[l, :] = sum_{n+m=l} convolve(a[n], b[m])`` for ``l < nrows``.
    Works for int64 and complex128 inputs (dtype of ``a`` is kept).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    width = a.shape[1] + b.shape[1] - 1
    out = np.zeros((nrows, width), dtype=np.result_type(a, b))
    for n in range(min(nrows, a.shape[0])):
        if not a[n].any():
            continue
        for m in range(min(nrows - n, b.shape[0])):
            if b[m].any():
                out[n + m] += np.convolve(a[n], b[m])
    return out
