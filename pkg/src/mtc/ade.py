"""Cappelli-Itzykson-Zuber modular invariants of SU(2)_k, used for naming.

Labels are Dynkin labels ``a = 0..k`` (so ``chi_a`` has spin ``a/2``).
"""
from __future__ import annotations

import numpy as np

__all__ = ["ciz_invariants"]


def _blocks(k, groups, extra=()):
    Z = np.zeros((k + 1, k + 1), dtype=np.int64)
    for g in groups:
        for a in g:
            for b in g:
                Z[a, b] += 1
    for a, b, m in extra:
        Z[a, b] += m
    return Z


def ciz_invariants(k: int) -> dict[str, np.ndarray]:
    """All physical SU(2)_k invariants, keyed by their ADE name."""
    out = {f"A{k + 1}": np.eye(k + 1, dtype=np.int64)}
    if k >= 4 and k % 4 == 0:
        groups = [(a, k - a) for a in range(0, k // 2, 2)]
        out[f"D{k // 2 + 2}"] = _blocks(k, groups, [(k // 2, k // 2, 2)])
    elif k >= 6 and k % 4 == 2:
        Z = np.zeros((k + 1, k + 1), dtype=np.int64)
        for a in range(k + 1):
            Z[a, a if a % 2 == 0 else k - a] = 1
        out[f"D{k // 2 + 2}"] = Z
    if k == 10:
        out["E6"] = _blocks(k, [(0, 6), (3, 7), (4, 10)])
    elif k == 16:
        out["E7"] = _blocks(k, [(0, 16), (4, 12), (6, 10), (8,)],
                            [(2, 8, 1), (14, 8, 1), (8, 2, 1), (8, 14, 1)])
    elif k == 28:
        out["E8"] = _blocks(k, [(0, 10, 18, 28), (6, 12, 16, 22)])
    for Z in out.values():
        Z.setflags(write=False)
    return out
