"""Pure-numpy kernels. Reference path, and the fallback when numba is off."""
import numpy as np


def continuant_levels(M, depth, first_lo, first_hi):
    """Continuants of every word in ``{first_lo..first_hi} x {1..M}^(k-1)``, k = 1..depth.

    Returns ``(q, q_prev, offsets)``; level k occupies ``offsets[k-1]:offsets[k]``.
    Words are in lexicographic order within each level.
    """
    digits = np.arange(1, M + 1, dtype=np.float64)
    q = np.arange(first_lo, first_hi + 1, dtype=np.float64)
    q_prev = np.ones_like(q)
    qs, qps = [q], [q_prev]
    for _ in range(depth - 1):
        q, q_prev = (q[:, None] * digits[None, :] + q_prev[:, None]).ravel(), np.repeat(q, M)
        qs.append(q)
        qps.append(q_prev)
    offsets = np.zeros(depth + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(a) for a in qs])
    return np.concatenate(qs), np.concatenate(qps), offsets


def log_partition(logw, s):
    """``log sum exp(-s * logw)``, stable for large weights."""
    lo = logw.min()
    return -s * lo + np.log(np.exp(-s * (logw - lo)).sum())


def collocation_matrix(s, x, bary, amax):
    n = len(x)
    a = np.arange(1, amax + 1, dtype=np.float64)
    out = np.empty((n, n))
    for i in range(n):
        y = 1.0 / (a + x[i])
        diff = y[:, None] - x[None, :]
        hit = diff == 0.0
        diff[hit] = 1.0
        t = bary / diff
        basis = t / t.sum(axis=1, keepdims=True)
        rows = hit.any(axis=1)
        basis[rows] = hit[rows]
        out[i] = (y ** (2.0 * s)) @ basis
    return out
