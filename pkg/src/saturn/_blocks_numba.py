"""numba-compiled kernel block assembly.

Same signatures and results as ``_blocks_numpy``.  The sphere block takes the
distance from the coordinate difference rather than from the inner product.
"""
import math

import numpy as np
from numba import njit

MIN = 0
HEAVYSIDE = 1


@njit(cache=True)
def _interval_block(code, a, b, out):
    for i in range(a.shape[0]):
        ai = a[i]
        for j in range(b.shape[0]):
            bj = b[j]
            if ai < bj:
                lo, hi = ai, bj
            else:
                lo, hi = bj, ai
            if code == MIN:
                out[i, j] = lo
            else:
                out[i, j] = lo * (1.0 - hi)


@njit(cache=True)
def _sphere_block(power, A, B, out):
    b0 = B[:, 0].copy()
    b1 = B[:, 1].copy()
    b2 = B[:, 2].copy()
    for i in range(A.shape[0]):
        a0 = A[i, 0]
        a1 = A[i, 1]
        a2 = A[i, 2]
        # branch-free so the inner loop vectorises
        for j in range(b0.shape[0]):
            d0 = a0 - b0[j]
            d1 = a1 - b1[j]
            d2 = a2 - b2[j]
            r = max(1.0 - math.sqrt(d0 * d0 + d1 * d1 + d2 * d2), 0.0)
            v = r
            for _ in range(power - 1):
                v *= r
            out[i, j] = v


def interval_block(code, a, b):
    out = np.empty((a.shape[0], b.shape[0]))
    _interval_block(code, np.ascontiguousarray(a, dtype=np.float64),
                    np.ascontiguousarray(b, dtype=np.float64), out)
    return out


def sphere_block(power, A, B):
    out = np.empty((A.shape[0], B.shape[0]))
    _sphere_block(int(power), np.ascontiguousarray(A, dtype=np.float64),
                  np.ascontiguousarray(B, dtype=np.float64), out)
    return out

