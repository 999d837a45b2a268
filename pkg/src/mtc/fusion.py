"""Relative tensor product of modular invariants.

Composing an invariant ``C1 -> C2`` with one ``C2 -> C3`` multiplies the
matrices; the product is again modular invariant but has ``Z[0,0]`` equal
to the number of physical summands it splits into.  :func:`decompose`
finds those summands in a complete :class:`~mtc.invariants.Library`.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .invariants import (
    InvariantError, Library, ModularInvariant, commutation_residual,
    is_t_compatible,
)

__all__ = [
    "FusionError", "MiddleCategoryMismatch", "NoDecomposition", "NotModularInvariant",
    "FusionOutcome", "FusionTable", "AuditEntry", "AuditReport", "product",
    "decompose", "fuse", "fusion_table", "associativity_audit", "format_sum",
]


class FusionError(InvariantError):
    pass


class MiddleCategoryMismatch(FusionError):
    pass


class NoDecomposition(FusionError):
    pass


class NotModularInvariant(FusionError):
    pass


def format_sum(summands) -> str:
    """``[("D10", 2), ("E7", 1)]`` -> ``"2·D10 ⊕ E7"``."""
    if not summands:
        return "0"
    return " ⊕ ".join(name if m == 1 else f"{m}·{name}" for name, m in summands)


def _check_invariant(Z, left, right, what):
    tol = 10 * left.precision.tol_zero
    res = commutation_residual(Z, left, right)
    if res > tol:
        raise NotModularInvariant(f"{what}: S1 Z != Z S2 (residual {res:.3g})")
    if not is_t_compatible(Z, left, right):
        raise NotModularInvariant(f"{what}: support violates T-compatibility")


def product(Z1: ModularInvariant, Z2: ModularInvariant) -> np.ndarray:
    """Exact integer product ``Z1 @ Z2`` across the shared middle category."""
    if not Z1.right.same_as(Z2.left):
        raise MiddleCategoryMismatch(
            f"{Z1.name} ends in {Z1.right.name} but {Z2.name} starts in {Z2.left.name}")
    Z3 = Z1.Z @ Z2.Z
    _check_invariant(Z3, Z1.left, Z2.right, f"{Z1.name}·{Z2.name}")
    return Z3


@dataclass(frozen=True)
class Decomposition:
    summands: tuple          # ((name, mult), ...) in library order, mult > 0
    unique: bool
    alternatives: tuple = ()


def _all_decompositions(Z3, mats, limit):
    # depth first over library entries, largest multiplicity first
    n = len(mats)
    sols = []
    mult = [0] * n

    def go(i, rem, left):
        if len(sols) >= limit:
            return
        if i == n:
            if left == 0 and not rem.any():
                sols.append(tuple(mult))
            return
        M = mats[i]
        mask = M > 0
        top = left if not mask.any() else min(left, int((rem[mask] // M[mask]).min()))
        for m in range(top, -1, -1):
            mult[i] = m
            go(i + 1, rem - m * M, left - m)
        mult[i] = 0

    go(0, Z3, int(Z3[0, 0]))
    return sols


def decompose(Z3, library: Library, limit: int = 10_000) -> Decomposition:
    """All ways to write ``Z3`` as a non-negative combination of library invariants.

    The multiplicities always add up to ``Z3[0, 0]`` because every physical
    invariant has ``Z[0, 0] = 1``.  The lexicographically smallest
    multiplicity vector (in library order) is reported as the primary
    decomposition; the others go to ``alternatives``.

    Raises
    ------
    NoDecomposition
        If no combination exists, which means the library is incomplete or
        ``Z3`` is not a product of physical invariants.
    """
    Z3 = np.asarray(Z3, dtype=np.int64)
    if Z3.shape != (library.left.rank, library.right.rank):
        raise FusionError(f"matrix shape {Z3.shape} does not match library "
                          f"{library.left.name} -> {library.right.name}")
    _check_invariant(Z3, library.left, library.right, "product")
    if np.any(Z3 < 0):
        raise NoDecomposition("negative entries")
    names = library.names
    mats = [z.Z for z in library.invariants]
    sols = sorted(_all_decompositions(Z3, mats, limit))
    if not sols:
        raise NoDecomposition(
            f"no combination of {names} gives the product (Z00 = {int(Z3[0, 0])})")

    def named(vec):
        return tuple((names[i], m) for i, m in enumerate(vec) if m)

    return Decomposition(named(sols[0]), len(sols) == 1,
                         tuple(named(v) for v in sols[1:]))


@dataclass(frozen=True, eq=False)
class FusionOutcome:
    """Product of two invariants and its decomposition into physical ones."""
    factors: tuple
    left: str
    right: str
    product: np.ndarray
    summands: tuple
    unique: bool
    alternatives: tuple = ()

    @property
    def count(self) -> int:
        return sum(m for _, m in self.summands)

    def as_counter(self) -> Counter:
        return Counter(dict(self.summands))

    def to_json(self) -> dict:
        return {
            "factors": list(self.factors),
            "left": self.left,
            "right": self.right,
            "product": self.product.tolist(),
            "summands": [{"name": n, "mult": int(m)} for n, m in self.summands],
            "unique": self.unique,
            "alternatives": [[{"name": n, "mult": int(m)} for n, m in alt]
                             for alt in self.alternatives],
        }

    def __str__(self):
        x, y = self.factors
        flag = "" if self.unique else f"   (non-unique, {len(self.alternatives) + 1} ways)"
        return f"{x} ⊗ {y} = {format_sum(self.summands)}{flag}"


def fuse(Z1: ModularInvariant, Z2: ModularInvariant, lib13: Library) -> FusionOutcome:
    """Relative tensor product over the middle category, decomposed in ``lib13``."""
    if not (lib13.left.same_as(Z1.left) and lib13.right.same_as(Z2.right)):
        raise FusionError(f"library is for {lib13.left.name} -> {lib13.right.name}, "
                          f"need {Z1.left.name} -> {Z2.right.name}")
    Z3 = product(Z1, Z2)
    dec = decompose(Z3, lib13)
    Z3.setflags(write=False)
    return FusionOutcome((Z1.name, Z2.name), Z1.left.name, Z2.right.name, Z3,
                         dec.summands, dec.unique, dec.alternatives)


@dataclass(frozen=True, eq=False)
class FusionTable:
    names: tuple
    cells: dict = field(default_factory=dict)    # (x, y) -> FusionOutcome

    def __getitem__(self, key) -> FusionOutcome:
        return self.cells[key]

    def __iter__(self):
        return (self.cells[(x, y)] for x in self.names for y in self.names)

    def to_json(self) -> dict:
        return {"invariants": list(self.names),
                "table": [o.to_json() for o in self]}

    def to_text(self) -> str:
        return "\n".join(str(o) for o in self)

    def to_markdown(self) -> str:
        head = "| ⊗ | " + " | ".join(self.names) + " |"
        rule = "|---" * (len(self.names) + 1) + "|"
        rows = [f"| **{x}** | " + " | ".join(format_sum(self.cells[(x, y)].summands)
                                            for y in self.names) + " |"
                for x in self.names]
        return "\n".join([head, rule, *rows])


def fusion_table(lib: Library) -> FusionTable:
    """Fuse every ordered pair of a library for a single category ``(d, d)``."""
    if not lib.left.same_as(lib.right):
        raise FusionError("fusion table needs a library of a category with itself")
    table = FusionTable(tuple(lib.names))
    for x in lib:
        for y in lib:
            table.cells[(x.name, y.name)] = fuse(x, y, lib)
    return table


@dataclass(frozen=True)
class AuditEntry:
    triple: tuple
    matrix_ok: bool
    left: Counter       # (X ⊗ Y) ⊗ W
    right: Counter      # X ⊗ (Y ⊗ W)

    @property
    def multiset_ok(self) -> bool:
        return self.left == self.right

    @property
    def ok(self) -> bool:
        return self.matrix_ok and self.multiset_ok


@dataclass(frozen=True)
class AuditReport:
    entries: tuple

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def failures(self) -> list:
        return [e for e in self.entries if not e.ok]

    def entry(self, x, y, w) -> AuditEntry:
        for e in self.entries:
            if e.triple == (x, y, w):
                return e
        raise KeyError((x, y, w))

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "triples": len(self.entries),
            "entries": [{"triple": list(e.triple), "matrix_ok": e.matrix_ok,
                         "multiset_ok": e.multiset_ok,
                         "left": dict(sorted(e.left.items())),
                         "right": dict(sorted(e.right.items()))}
                        for e in self.entries],
        }

    def __str__(self):
        bad = self.failures
        head = f"associativity: {len(self.entries)} triples, {len(bad)} failures"
        return "\n".join([head] + [f"  FAIL {e.triple}: {dict(e.left)} vs {dict(e.right)}"
                                   for e in bad])


def associativity_audit(lib: Library, table: FusionTable | None = None) -> AuditReport:
    """Check ``(X ⊗ Y) ⊗ W == X ⊗ (Y ⊗ W)`` for every triple of the library.

    Matrix products are compared exactly; decompositions are compared after
    expanding the outer product bilinearly over the inner summands.
    """
    table = table or fusion_table(lib)
    entries = []
    for x in lib:
        for y in lib:
            for w in lib:
                matrix_ok = np.array_equal((x.Z @ y.Z) @ w.Z, x.Z @ (y.Z @ w.Z))
                left, right = Counter(), Counter()
                for name, m in table[(x.name, y.name)].summands:
                    for k, v in table[(name, w.name)].summands:
                        left[k] += m * v
                for name, m in table[(y.name, w.name)].summands:
                    for k, v in table[(x.name, name)].summands:
                        right[k] += m * v
                entries.append(AuditEntry((x.name, y.name, w.name), matrix_ok, left, right))
    return AuditReport(tuple(entries))
