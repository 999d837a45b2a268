"""Independent reference implementations for SU(2)_k, built from closed forms only.

Nothing here imports the package; the tests compare package output with these.
"""
import functools
import math
from fractions import Fraction

import numpy as np


def su2_s(k):
    n = k + 2
    return np.array([[math.sqrt(2 / n) * math.sin((a + 1) * (b + 1) * math.pi / n)
                      for b in range(k + 1)] for a in range(k + 1)])


def su2_h(k):
    return [Fraction(a * (a + 2), 4 * (k + 2)) % 1 for a in range(k + 1)]


def clebsch_gordan(k):
    """Truncated Clebsch-Gordan rule: N[a, b, c] for SU(2)_k."""
    r = k + 1
    N = np.zeros((r, r, r), dtype=np.int64)
    for a in range(r):
        for b in range(r):
            for c in range(r):
                if abs(a - b) <= c <= min(a + b, 2 * k - a - b) and (a + b + c) % 2 == 0:
                    N[a, b, c] = 1
    return N


@functools.lru_cache(maxsize=None)
def brute_force_box(k, z00, chunk=1 << 20, tol=1e-9):
    """All integer Z on the T-support of (SU(2)_k, SU(2)_k) with Z[0,0] = z00,
    every other entry in 0..floor(1/(S[l,0] S[m,0])), satisfying S Z = Z S.
    """
    S = su2_s(k)
    h = su2_h(k)
    r = k + 1
    support = [(a, b) for a in range(r) for b in range(r) if h[a] == h[b]]
    free = [p for p in support if p != (0, 0)]
    col = S[:, 0]
    bounds = [int(math.floor(1 / (col[a] * col[b]) + 1e-6)) for a, b in free]

    # residual as a linear map of the free entries plus the fixed Z00 part
    def unit(a, b):
        E = np.zeros((r, r))
        E[a, b] = 1
        return (S @ E - E @ S).ravel()

    A = np.stack([unit(a, b) for a, b in free], axis=1)
    offset = z00 * unit(0, 0)
    radices = [b + 1 for b in bounds]
    total = math.prod(radices)
    hits = []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        X = np.stack(np.unravel_index(idx, radices), axis=0)
        # cheap pass on a few constraint rows, full check on survivors
        head = np.abs(A[:8] @ X + offset[:8, None]).max(axis=0) <= tol
        X = X[:, head]
        R = A @ X + offset[:, None]
        ok = np.max(np.abs(R), axis=0) <= tol
        for vec in X[:, ok].T:
            Z = np.zeros((r, r), dtype=np.int64)
            Z[0, 0] = z00
            for (a, b), v in zip(free, vec):
                Z[a, b] = v
            hits.append(Z)
    return hits, total
