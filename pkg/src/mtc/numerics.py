"""Precision-controlled scalar and matrix helpers.

Every place in the package that turns a floating point number into an
integer or a rational goes through :func:`round_to_integer` or
:func:`rationalize`, so that the residual is always checked against the
active :class:`Precision`.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "Precision", "DEFAULT_PRECISION", "NumericsError", "NotNearInteger",
    "NotNearRational", "DimensionMismatch", "as_cmatrix", "round_to_integer",
    "rationalize", "nullspace", "mat_product", "mat_adjoint", "mat_inf_norm",
    "precision_from_env",
]

#: significand width of the only backend currently wired in (IEEE double)
NATIVE_BITS = 53


class NumericsError(ArithmeticError):
    """Base class for verified-rounding failures."""


class NotNearInteger(NumericsError):
    def __init__(self, value, residual, tol):
        self.value = value
        self.residual = residual
        self.tol = tol
        super().__init__(f"{value!r} is not within {tol:g} of an integer "
                         f"(residual {residual:.3g})")


class NotNearRational(NumericsError):
    def __init__(self, value, max_den, tol):
        self.value = value
        self.max_den = max_den
        self.tol = tol
        super().__init__(f"{value!r} has no rational approximation p/q with "
                         f"q <= {max_den} within {tol:g}/q")


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Precision:
    """Working precision and the two absolute tolerances derived from it.

    Attributes
    ----------
    bits : int
        Significand width of the working real type.
    tol_zero : float
        Absolute threshold below which a quantity counts as zero.
    tol_int : float
        Absolute threshold for accepting a value as an integer (or, scaled
        by the denominator, as a rational).
    """
    bits: int = NATIVE_BITS
    tol_zero: float = 1e-9
    tol_int: float = 1e-6

    def __post_init__(self):
        if self.bits <= 0:
            raise ValueError("bits must be positive")
        if self.bits > NATIVE_BITS:
            # the interface is ready for a wider backend, but none is wired in
            raise ValueError(f"only a {NATIVE_BITS}-bit backend is available, "
                             f"got bits={self.bits}")
        if not 0 < self.tol_zero < 0.5:
            raise ValueError("tol_zero must lie in (0, 1/2)")
        if not 0 < self.tol_int < 0.5:
            raise ValueError("tol_int must lie in (0, 1/2)")

    def as_dict(self):
        return {"bits": self.bits, "tol_zero": self.tol_zero, "tol_int": self.tol_int}


DEFAULT_PRECISION = Precision()


def precision_from_env(**overrides) -> Precision:
    """Default precision, honouring ``MTC_PRECISION_BITS`` and explicit overrides."""
    kw = {}
    env = os.environ.get("MTC_PRECISION_BITS")
    if env:
        kw["bits"] = int(env)
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return Precision(**kw)


def as_cmatrix(m) -> np.ndarray:
    """Validate and convert to a dense 2d complex array."""
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise DimensionMismatch(f"expected a non-empty 2d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    a.setflags(write=False)
    return a


def round_to_integer(x: float, prec: Precision = DEFAULT_PRECISION) -> tuple[int, float]:
    """Round ``x`` to the nearest integer, checking the residual.

    Returns
    -------
    (n, residual)
        ``n`` is the nearest integer and ``residual = |x - n|``.

    Raises
    ------
    NotNearInteger
        If the residual exceeds ``prec.tol_int``.
    """
    x = float(x)
    if not math.isfinite(x):
        raise NotNearInteger(x, math.inf, prec.tol_int)
    n = round(x)
    residual = abs(x - n)
    if residual > prec.tol_int:
        raise NotNearInteger(x, residual, prec.tol_int)
    return int(n), residual


def _convergents(x: float):
    # continued-fraction convergents of the exact binary value of x
    frac = Fraction(x)
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    while True:
        a = math.floor(frac)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield Fraction(h1, k1)
        rest = frac - a
        if rest == 0:
            return
        frac = 1 / rest


def rationalize(x: float, max_den: int, prec: Precision = DEFAULT_PRECISION) -> Fraction:
    """Recover ``p/q`` with ``q <= max_den`` and ``|x - p/q| <= tol_int / q``.

    The continued-fraction convergents of ``x`` are tried in order and the
    first one inside the tolerance wins, so the smallest admissible
    denominator is preferred.  Above ``q = 1/(2 tol_int)`` an admissible
    fraction need not be a convergent, so the best approximation from
    :meth:`fractions.Fraction.limit_denominator` is tried last.
    """
    if max_den < 1:
        raise ValueError("max_den must be >= 1")
    x = float(x)
    if not math.isfinite(x):
        raise NotNearRational(x, max_den, prec.tol_int)
    for c in _convergents(x):
        if c.denominator > max_den:
            break
        if abs(x - c) <= prec.tol_int / c.denominator:
            return c
    c = Fraction(x).limit_denominator(max_den)
    if abs(x - c) <= prec.tol_int / c.denominator:
        return c
    raise NotNearRational(x, max_den, prec.tol_int)


def nullspace(m, prec: Precision = DEFAULT_PRECISION) -> np.ndarray:
    """Orthonormal basis of the numerical kernel of ``m``, one vector per row.

    Singular values below ``tol_zero * max(sigma_max, 1)`` count as zero.
    Real input yields a real basis.
    """
    a = np.asarray(m)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2d matrix, got shape {a.shape}")
    rows, cols = a.shape
    if rows < cols:
        a = np.vstack([a, np.zeros((cols - rows, cols), dtype=a.dtype)])
    _, s, vh = np.linalg.svd(a, full_matrices=False)
    cutoff = prec.tol_zero * max(s[0] if s.size else 0.0, 1.0)
    rank = int(np.count_nonzero(s > cutoff))
    basis = vh[rank:].conj()
    if np.isrealobj(a):
        basis = basis.real
    return basis


def mat_product(a, b) -> np.ndarray:
    a, b = np.asarray(a), np.asarray(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def mat_adjoint(a) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2d matrix, got shape {a.shape}")
    return a.conj().T


def mat_inf_norm(a) -> float:
    """Maximum absolute row sum."""
    a = np.asarray(a)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2d matrix, got shape {a.shape}")
    if a.size == 0:
        return 0.0
    return float(np.abs(a).sum(axis=1).max())
