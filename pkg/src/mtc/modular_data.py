"""Modular data of a modular tensor category and its Verlinde fusion rules.

A :class:`ModularDatum` holds the numerical shadow of a category: labels,
the S matrix, conformal weights ``h`` (mod 1) and central charge ``c``
(mod 24).  ``h`` and ``c`` are exact rationals, so T-matrix comparisons
never depend on a tolerance; ``T = diag(exp(2 pi i (h - c/24)))``.
"""
from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .numerics import (
    DEFAULT_PRECISION, NotNearInteger, Precision, as_cmatrix, mat_adjoint,
    mat_inf_norm,
)

__all__ = [
    "ModularDatum", "FusionTensor", "ValidationReport", "Check",
    "ModularDataError", "ParseError", "SchemaError", "ValidationFailed",
    "su2_data", "trivial_datum", "toric_code_datum", "opposite", "validate",
    "verlinde", "datum_to_json", "datum_from_json", "save_datum", "load_datum",
]


class ModularDataError(Exception):
    pass


class ParseError(ModularDataError):
    pass


class SchemaError(ModularDataError):
    pass


class ValidationFailed(ModularDataError):
    def __init__(self, report):
        self.report = report
        failed = "; ".join(f"{c.name}: {c.detail}" for c in report.failures)
        super().__init__(f"{report.name}: {failed}")


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True, eq=False)
class ModularDatum:
    """Labels, S matrix, conformal weights and central charge of one category.

    Index 0 is always the identity object.  Construct through the helpers
    (:func:`su2_data`, :func:`load_datum`, ...) or directly; nothing is
    validated here, call :func:`validate` for that.
    """
    name: str
    labels: tuple
    S: np.ndarray
    h: tuple
    c: Fraction
    precision: Precision = DEFAULT_PRECISION
    generator: dict | None = None
    _fingerprint: str = field(init=False, repr=False)

    def __post_init__(self):
        S = as_cmatrix(self.S)
        labels = tuple(str(x) for x in self.labels)
        h = tuple(_frac(x) % 1 for x in self.h)
        r = len(labels)
        if S.shape != (r, r) or len(h) != r:
            raise SchemaError(f"{self.name}: rank mismatch between labels ({r}), "
                              f"S {S.shape} and h ({len(h)})")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "c", _frac(self.c) % 24)
        object.__setattr__(self, "_fingerprint", _fingerprint(self))

    @property
    def rank(self) -> int:
        return len(self.labels)

    @property
    def twists(self) -> tuple:
        """Exact exponents ``h - c/24`` (mod 1) of the diagonal T matrix."""
        return tuple((x - self.c / 24) % 1 for x in self.h)

    @property
    def T(self) -> np.ndarray:
        phases = np.array([float(t) for t in self.twists])
        return np.diag(np.exp(2j * np.pi * phases))

    @property
    def first_column(self) -> np.ndarray:
        """``S[lambda, 0]`` as real numbers (quantum dimensions times ``S00``)."""
        return self.S[:, 0].real

    @property
    def fingerprint(self) -> str:
        return self._fingerprint

    @property
    def key(self) -> tuple:
        """Identity used to decide whether two data are the same category."""
        return (self.name, self._fingerprint)

    def same_as(self, other) -> bool:
        return isinstance(other, ModularDatum) and self.key == other.key

    def __repr__(self):
        return f"ModularDatum({self.name!r}, rank={self.rank}, c={self.c})"


def _fingerprint(d: ModularDatum) -> str:
    def num(v):
        return f"{round(float(v), 9) + 0.0:.9f}"
    payload = {
        "labels": list(d.labels),
        "h": [str(x) for x in d.h],
        "c": str(d.c),
        "S": [[[num(z.real), num(z.imag)] for z in row] for row in d.S],
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def su2_data(k: int, prec: Precision = DEFAULT_PRECISION) -> ModularDatum:
    """Modular data of the SU(2) WZW model at level ``k``.

    Labels are the Dynkin labels ``0..k``;
    ``S_ab = sqrt(2/(k+2)) sin((a+1)(b+1) pi/(k+2))``,
    ``h_a = a(a+2)/(4(k+2))`` and ``c = 3k/(k+2)``.
    """
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or k < 1:
        raise ValueError(f"level must be a positive integer, got {k!r}")
    k = int(k)
    n = k + 2
    a = np.arange(1, k + 2)
    S = math.sqrt(2 / n) * np.sin(np.outer(a, a) * math.pi / n)
    h = [Fraction(x * (x + 2), 4 * n) for x in range(k + 1)]
    return ModularDatum(
        name=f"SU(2)_{k}",
        labels=tuple(str(x) for x in range(k + 1)),
        S=S,
        h=h,
        c=Fraction(3 * k, n),
        precision=prec,
        generator={"family": "su2", "level": k},
    )


def trivial_datum(prec: Precision = DEFAULT_PRECISION) -> ModularDatum:
    """The rank-one category Vec."""
    return ModularDatum("Vec", ("0",), [[1.0]], [Fraction(0)], Fraction(0), prec)


def toric_code_datum(prec: Precision = DEFAULT_PRECISION) -> ModularDatum:
    """Quantum double of Z/2 with labels ``0, e, m, f``."""
    S = 0.5 * np.array([[1, 1, 1, 1],
                        [1, 1, -1, -1],
                        [1, -1, 1, -1],
                        [1, -1, -1, 1]], dtype=float)
    h = [Fraction(0), Fraction(0), Fraction(0), Fraction(1, 2)]
    return ModularDatum("D(Z2)", ("0", "e", "m", "f"), S, h, Fraction(0), prec)


def opposite(d: ModularDatum) -> ModularDatum:
    """Datum of the category with reversed braiding: conjugate S, negate h and c."""
    return ModularDatum(
        name=f"{d.name}^opp",
        labels=d.labels,
        S=d.S.conj(),
        h=[-x for x in d.h],
        c=-d.c,
        precision=d.precision,
    )


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    name: str
    checks: tuple
    warnings: tuple = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": [{"check": c.name, "passed": c.passed,
                        "residual": float(c.residual), "detail": c.detail}
                       for c in self.checks],
            "warnings": list(self.warnings),
        }

    def __str__(self):
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            extra = f"  {c.detail}" if c.detail else ""
            lines.append(f"  [{mark}] {c.name:<22} residual={c.residual:.3e}{extra}")
        lines.extend(f"  warning: {w}" for w in self.warnings)
        return "\n".join(lines)


def validate(d: ModularDatum) -> ValidationReport:
    """Run every structural check on ``d`` and collect the results."""
    tol = d.precision.tol_zero
    S, r = d.S, d.rank
    eye = np.eye(r)
    checks = []

    def add(name, residual, ok=None, detail=""):
        passed = residual <= tol if ok is None else ok
        checks.append(Check(name, bool(passed), float(residual), detail))

    add("symmetric", mat_inf_norm(S - S.T))
    add("unitary", mat_inf_norm(S @ mat_adjoint(S) - eye))

    col = S[:, 0]
    worst = float(np.min(col.real))
    imag = float(np.max(np.abs(col.imag)))
    add("positive_first_column", max(imag, tol - worst if worst <= tol else 0.0),
        ok=worst > tol and imag <= tol,
        detail="" if worst > tol else f"min S[l,0] = {worst:.3g}")

    S2 = S @ S
    C = np.rint(S2.real)
    perm_residual = float(np.max(np.abs(S2 - C)))
    is_perm = (np.all((C == 0) | (C == 1)) and np.all(C.sum(axis=0) == 1)
               and np.all(C.sum(axis=1) == 1))
    involution = is_perm and np.array_equal(C @ C, eye)
    add("charge_conjugation", perm_residual,
        ok=perm_residual <= d.precision.tol_int and involution,
        detail="" if involution else "S^2 is not an involutive permutation")

    ST = S @ d.T
    add("modular_relation", mat_inf_norm(ST @ ST @ ST - S2))

    h0 = d.h[0]
    add("identity_weight", float(abs(h0)), ok=h0 == 0,
        detail="" if h0 == 0 else f"h_0 = 0 required, got {h0}")

    try:
        N = verlinde(d, check=False)
        add("verlinde_integrality", N.max_residual,
            ok=bool(np.all(N.N >= 0)),
            detail="" if np.all(N.N >= 0) else "negative fusion coefficient")
    except NotNearInteger as exc:
        add("verlinde_integrality", exc.residual, ok=False, detail=str(exc))
    except ZeroDivisionError:
        add("verlinde_integrality", math.inf, ok=False, detail="S[0, m] vanishes")

    notes = []
    if r > 1 and col.real[0] > col.real.min() + tol:
        notes.append("S[0,0] is not the smallest entry of the first column")
    return ValidationReport(d.name, tuple(checks), tuple(notes))


@dataclass(frozen=True, eq=False)
class FusionTensor:
    """Fusion coefficients ``N[a, b, c] = N_{ab}^c`` and the rounding residual."""
    N: np.ndarray
    max_residual: float = 0.0

    @property
    def rank(self) -> int:
        return self.N.shape[0]

    def unit_law_holds(self) -> bool:
        return np.array_equal(self.N[0], np.eye(self.rank, dtype=self.N.dtype))

    def is_commutative(self) -> bool:
        return np.array_equal(self.N, self.N.transpose(1, 0, 2))

    def is_associative(self) -> bool:
        # (a b) c  vs  a (b c), both as [a, b, c, d]
        left = np.einsum("abm,mcd->abcd", self.N, self.N)
        right = np.einsum("bcm,amd->abcd", self.N, self.N)
        return np.array_equal(left, right)


def verlinde(d: ModularDatum, check: bool = True) -> FusionTensor:
    """Fusion coefficients from the Verlinde formula, rounded with verification.

    ``N_{ab}^c = sum_m S_am S_bm conj(S_cm) / S_0m``.  Every coefficient must
    round to a non-negative integer within ``tol_int``.
    """
    S = d.S
    s0 = S[0]
    if np.any(np.abs(s0) <= d.precision.tol_zero):
        raise ZeroDivisionError("S[0, m] vanishes; not modular data")
    raw = np.einsum("am,bm,cm->abc", S, S, S.conj() / s0)
    rounded = np.rint(raw.real)
    residual = float(np.max(np.abs(raw - rounded))) if raw.size else 0.0
    if residual > d.precision.tol_int:
        idx = np.unravel_index(np.argmax(np.abs(raw - rounded)), raw.shape)
        raise NotNearInteger(complex(raw[idx]), residual, d.precision.tol_int)
    N = rounded.astype(np.int64)
    if check and np.any(N < 0):
        raise NotNearInteger(float(N.min()), 0.0, d.precision.tol_int)
    N.setflags(write=False)
    return FusionTensor(N, residual)


# ---------------------------------------------------------------- JSON I/O

def _num(x: float) -> str:
    return f"{x + 0.0:.17e}"


def datum_to_json(d: ModularDatum) -> dict:
    out = {
        "name": d.name,
        "rank": d.rank,
        "labels": list(d.labels),
        "S": [[[_num(z.real), _num(z.imag)] for z in row] for row in d.S],
        "h": [str(x) for x in d.h],
        "c": str(d.c),
    }
    if d.generator:
        out["generator"] = dict(d.generator)
    return out


def _parse_fraction(v, what) -> Fraction:
    if not isinstance(v, (str, int)) or isinstance(v, bool):
        raise SchemaError(f"{what} must be a 'p/q' string")
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"{what}: cannot parse {v!r} as a rational") from exc


def datum_from_json(obj: dict, prec: Precision = DEFAULT_PRECISION,
                    check: bool = True) -> ModularDatum:
    """Build a datum from the category JSON schema.

    Raises :class:`SchemaError` on structural problems and
    :class:`ValidationFailed` when ``check`` is set and validation fails.
    """
    if not isinstance(obj, dict):
        raise SchemaError("category must be a JSON object")
    for key in ("name", "rank", "labels", "S", "h", "c"):
        if key not in obj:
            raise SchemaError(f"missing field {key!r}")
    r = obj["rank"]
    if not isinstance(r, int) or isinstance(r, bool) or r < 1:
        raise SchemaError("rank must be a positive integer")
    labels, S_raw, h_raw = obj["labels"], obj["S"], obj["h"]
    if not isinstance(labels, list) or len(labels) != r:
        raise SchemaError(f"labels must be a list of length {r}")
    if not isinstance(h_raw, list) or len(h_raw) != r:
        raise SchemaError(f"h must be a list of length {r}")
    if (not isinstance(S_raw, list) or len(S_raw) != r
            or any(not isinstance(row, list) or len(row) != r for row in S_raw)):
        raise SchemaError(f"S must be a square {r}x{r} matrix")
    S = np.empty((r, r), dtype=complex)
    for i, row in enumerate(S_raw):
        for j, z in enumerate(row):
            if not isinstance(z, list) or len(z) != 2:
                raise SchemaError(f"S[{i}][{j}] must be a [re, im] pair")
            try:
                S[i, j] = complex(float(z[0]), float(z[1]))
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"S[{i}][{j}]: bad number {z!r}") from exc
    h = [_parse_fraction(x, f"h[{i}]") for i, x in enumerate(h_raw)]
    c = _parse_fraction(obj["c"], "c")
    gen = obj.get("generator")
    if gen is not None:
        if (not isinstance(gen, dict) or gen.get("family") != "su2"
                or not isinstance(gen.get("level"), int)):
            raise SchemaError("generator must be {'family': 'su2', 'level': int}")
        ref = su2_data(gen["level"], prec)
        if ref.rank != r or mat_inf_norm(ref.S - S) > prec.tol_zero:
            raise SchemaError(f"stored S disagrees with generator {gen}")
        if tuple(h) != ref.h or c != ref.c:
            raise SchemaError(f"stored h/c disagree with generator {gen}")
    d = ModularDatum(obj["name"], labels, S, h, c, prec, gen)
    if check:
        report = validate(d)
        if not report.passed:
            raise ValidationFailed(report)
        for w in report.warnings:
            warnings.warn(f"{d.name}: {w}", stacklevel=2)
    return d


def save_datum(d: ModularDatum, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(datum_to_json(d), indent=1) + "\n", encoding="utf-8")
    return path


def load_datum(path, prec: Precision = DEFAULT_PRECISION, check: bool = True) -> ModularDatum:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return datum_from_json(obj, prec, check)
