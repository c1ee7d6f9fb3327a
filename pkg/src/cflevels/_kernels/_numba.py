"""numba-compiled kernels; same signatures and results as ``_numpy``."""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def continuant_levels(M, depth, first_lo, first_hi):
    width = first_hi - first_lo + 1
    offsets = np.zeros(depth + 1, dtype=np.int64)
    size = width
    for k in range(depth):
        offsets[k + 1] = offsets[k] + size
        size *= M
    q = np.empty(offsets[depth])
    q_prev = np.empty(offsets[depth])
    for j in range(width):
        q[j] = first_lo + j
        q_prev[j] = 1.0
    for k in range(1, depth):
        src = offsets[k - 1]
        dst = offsets[k]
        for j in range(offsets[k] - offsets[k - 1]):
            qj = q[src + j]
            qpj = q_prev[src + j]
            for a in range(1, M + 1):
                q[dst] = a * qj + qpj
                q_prev[dst] = qj
                dst += 1
    return q, q_prev, offsets


@njit(cache=True, nogil=True)
def log_partition(logw, s):
    lo = logw[0]
    for v in logw:
        if v < lo:
            lo = v
    acc = 0.0
    for v in logw:
        acc += np.exp(-s * (v - lo))
    return -s * lo + np.log(acc)


@njit(cache=True, nogil=True)
def collocation_matrix(s, x, bary, amax):
    n = x.shape[0]
    out = np.zeros((n, n))
    basis = np.empty(n)
    for i in range(n):
        for a in range(1, amax + 1):
            y = 1.0 / (a + x[i])
            w = y ** (2.0 * s)
            hit = -1
            total = 0.0
            for j in range(n):
                d = y - x[j]
                if d == 0.0:
                    hit = j
                    break
                basis[j] = bary[j] / d
                total += basis[j]
            if hit >= 0:
                out[i, hit] += w
            else:
                for j in range(n):
                    out[i, j] += w * basis[j] / total
    return out
