"""Modular invariants between two categories and their classification.

A modular invariant is a non-negative integer matrix ``Z`` with
``S1 Z = Z S2`` and ``T1 Z = Z T2``.  Since T is diagonal the second
condition only restricts the support of ``Z`` (see :func:`t_support`),
which leaves a small linear system for the first.  Invariants with
``Z[0, 0] == 1`` are called physical.

Classification runs a branch-and-bound over the support entries.  The
key bound is the identity ``sum S1[l,0] Z[l,m] S2[m,0] = Z[0,0]``: all
weights are positive, so for a physical invariant the running weighted
sum may never exceed one.
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ade import ciz_invariants
from .modular_data import ModularDatum, datum_from_json, datum_to_json
from .numerics import NotNearRational, mat_inf_norm, nullspace, rationalize

__all__ = [
    "InvariantError", "RationalizationFailed", "BudgetExceeded",
    "HeteroticMismatch", "NotAnInvariant", "ModularInvariant",
    "CommutantBasis", "Library", "t_support", "commutant_basis", "entry_bound",
    "weighted_sum_identity", "commutation_residual", "is_t_compatible",
    "classify", "classify_physical", "name_invariant", "DEFAULT_MAX_DEN",
    "DEFAULT_NODE_BUDGET",
]

DEFAULT_MAX_DEN = 10**6
DEFAULT_NODE_BUDGET = 10**8


class InvariantError(Exception):
    pass


class RationalizationFailed(InvariantError):
    pass


class BudgetExceeded(InvariantError):
    def __init__(self, nodes):
        self.nodes = nodes
        super().__init__(f"classification exceeded the node budget ({nodes} nodes)")


class HeteroticMismatch(InvariantError):
    pass


class NotAnInvariant(InvariantError):
    pass


def commutation_residual(Z, d1: ModularDatum, d2: ModularDatum) -> float:
    """``|| S1 Z - Z S2 ||_inf``."""
    Z = np.asarray(Z, dtype=float)
    return mat_inf_norm(d1.S @ Z - Z @ d2.S)


def is_t_compatible(Z, d1: ModularDatum, d2: ModularDatum) -> bool:
    t1, t2 = d1.twists, d2.twists
    rows, cols = np.nonzero(np.asarray(Z))
    return all(t1[a] == t2[b] for a, b in zip(rows, cols))


@dataclass(frozen=True, eq=False)
class ModularInvariant:
    """Integer matrix ``Z`` (``left.rank x right.rank``) between two categories."""
    left: ModularDatum
    right: ModularDatum
    Z: np.ndarray
    name: str = ""

    def __post_init__(self):
        Z = np.array(self.Z, dtype=np.int64)
        if Z.shape != (self.left.rank, self.right.rank):
            raise NotAnInvariant(f"Z has shape {Z.shape}, expected "
                                 f"{(self.left.rank, self.right.rank)}")
        Z.setflags(write=False)
        object.__setattr__(self, "Z", Z)
        if not self.name:
            object.__setattr__(self, "name", name_invariant(Z, self.left, self.right))

    @property
    def physical(self) -> bool:
        return int(self.Z[0, 0]) == 1

    @property
    def residual(self) -> float:
        return commutation_residual(self.Z, self.left, self.right)

    def problems(self) -> list[str]:
        """Violated invariant conditions (empty for a genuine invariant)."""
        out = []
        tol = self.left.precision.tol_zero
        if np.any(self.Z < 0):
            out.append("negative entry")
        if self.residual > tol:
            out.append(f"S1 Z != Z S2 (residual {self.residual:.3g})")
        if not is_t_compatible(self.Z, self.left, self.right):
            out.append("T1 Z != Z T2 (support violates twist matching)")
        return out

    def check(self) -> "ModularInvariant":
        bad = self.problems()
        if bad:
            raise NotAnInvariant(f"{self.name}: " + "; ".join(bad))
        return self

    def same_matrix(self, other) -> bool:
        return (self.left.same_as(other.left) and self.right.same_as(other.right)
                and np.array_equal(self.Z, other.Z))

    def to_json(self) -> dict:
        return {"left": self.left.name, "right": self.right.name,
                "name": self.name, "Z": self.Z.tolist()}

    @classmethod
    def from_json(cls, obj, categories: dict) -> "ModularInvariant":
        try:
            left, right = categories[obj["left"]], categories[obj["right"]]
            return cls(left, right, obj["Z"], obj["name"])
        except KeyError as exc:
            raise InvariantError(f"unknown category or missing field {exc}") from exc

    def __repr__(self):
        return f"ModularInvariant({self.name!r}, {self.left.name} -> {self.right.name})"


def name_invariant(Z, d1: ModularDatum, d2: ModularDatum) -> str:
    """ADE label for SU(2) data, otherwise a permutation or hash label."""
    Z = np.asarray(Z)
    if d1.same_as(d2) and np.array_equal(Z, np.eye(d1.rank, dtype=Z.dtype)):
        return f"A{d1.rank}"
    g1, g2 = d1.generator or {}, d2.generator or {}
    if g1.get("family") == "su2" and g1 == g2:
        for name, ref in ciz_invariants(g1["level"]).items():
            if np.array_equal(Z, ref):
                return name
    if (Z.shape[0] == Z.shape[1] and np.all((Z == 0) | (Z == 1))
            and np.all(Z.sum(axis=0) == 1) and np.all(Z.sum(axis=1) == 1)):
        images = ",".join(d2.labels[int(j)] for j in np.argmax(Z, axis=1))
        return f"perm:{images}"
    digest = hashlib.sha256(np.ascontiguousarray(Z, dtype=np.int64).tobytes()
                            + str(Z.shape).encode()).hexdigest()[:8]
    return f"inv#{digest}"


def t_support(d1: ModularDatum, d2: ModularDatum) -> list[tuple[int, int]]:
    """Index pairs whose T eigenvalues agree, ``h1 - c1/24 == h2 - c2/24 (mod 1)``."""
    t1, t2 = d1.twists, d2.twists
    return [(a, b) for a in range(d1.rank) for b in range(d2.rank) if t1[a] == t2[b]]


@dataclass(frozen=True, eq=False)
class CommutantBasis:
    """Rational basis, in reduced row echelon form, of the T-compatible commutant.

    ``basis[i][j]`` is the coefficient of support coordinate ``support[j]``.
    """
    left: ModularDatum
    right: ModularDatum
    support: tuple
    basis: tuple
    pivots: tuple
    numeric_dim: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self, i) -> np.ndarray:
        """Basis vector ``i`` as an ``r1 x r2`` float matrix."""
        return self.embed([float(x) for x in self.basis[i]])

    def embed(self, values) -> np.ndarray:
        values = list(values)
        dtype = object if any(isinstance(v, Fraction) for v in values) else float
        Z = np.zeros((self.left.rank, self.right.rank), dtype=dtype)
        for (a, b), v in zip(self.support, values):
            Z[a, b] = v
        return Z


def _constraint_matrix(d1, d2, support) -> np.ndarray:
    # column j is vec(S1 E - E S2) for the unit matrix E at support[j]
    r1, r2 = d1.rank, d2.rank
    A = np.zeros((r1, r2, len(support)), dtype=complex)
    for j, (a, b) in enumerate(support):
        A[:, b, j] += d1.S[:, a]
        A[a, :, j] -= d2.S[b, :]
    A = A.reshape(r1 * r2, len(support))
    return np.vstack([A.real, A.imag])


def _numeric_rref(K, tol) -> tuple[np.ndarray, list]:
    R = np.array(K, dtype=float)
    d, n = R.shape
    pivots, row = [], 0
    for j in range(n):
        if row == d:
            break
        p = row + int(np.argmax(np.abs(R[row:, j])))
        if abs(R[p, j]) <= tol:
            continue
        R[[row, p]] = R[[p, row]]
        R[row] /= R[row, j]
        for i in range(d):
            if i != row:
                R[i] -= R[i, j] * R[row]
        pivots.append(j)
        row += 1
    return R[:row], pivots


def commutant_basis(d1: ModularDatum, d2: ModularDatum,
                    max_den: int = DEFAULT_MAX_DEN) -> CommutantBasis:
    """Rational basis of ``{Z : S1 Z = Z S2, supp Z inside t_support}``.

    The numeric kernel is brought to reduced row echelon form (which is
    unique, hence rational whenever the solution space is defined over Q),
    each entry is lifted with :func:`rationalize`, and every lifted vector
    is re-checked against the commutation equation.
    """
    prec = d1.precision
    support = tuple(t_support(d1, d2))
    if not support:
        return CommutantBasis(d1, d2, support, (), (), 0)
    K = nullspace(_constraint_matrix(d1, d2, support), prec)
    if len(K) == 0:
        return CommutantBasis(d1, d2, support, (), (), 0)
    R, pivots = _numeric_rref(K, prec.tol_int)
    if len(pivots) != len(K):
        raise RationalizationFailed("numeric kernel lost rank during elimination")
    basis = []
    for row in R:
        try:
            vec = tuple(rationalize(x, max_den, prec) for x in row)
        except NotNearRational as exc:
            raise RationalizationFailed(str(exc)) from exc
        basis.append(vec)
    cb = CommutantBasis(d1, d2, support, tuple(basis), tuple(pivots), len(K))
    for i in range(cb.dim):
        res = commutation_residual(cb.matrix(i), d1, d2)
        if res > 10 * prec.tol_zero:
            raise RationalizationFailed(
                f"rational basis vector {i} has commutation residual {res:.3g}")
    return cb


def entry_bound(d1: ModularDatum, d2: ModularDatum) -> np.ndarray:
    """``B[l, m] = floor(1 / (S1[l,0] S2[m,0]))`` bounds a physical invariant entrywise."""
    w = np.outer(d1.first_column, d2.first_column)
    return np.floor(1.0 / w + d1.precision.tol_int).astype(np.int64)


def weighted_sum_identity(Z) -> float:
    """``| sum S1[l,0] Z[l,m] S2[m,0] - Z[0,0] |`` for a :class:`ModularInvariant`."""
    M = np.asarray(Z.Z, dtype=float)
    total = Z.left.first_column @ M @ Z.right.first_column
    return abs(float(total) - float(M[0, 0]))


# ------------------------------------------------------------ classification

def _exact_rref(vectors, order):
    """Exact RREF of ``vectors`` with columns visited in ``order``.

    Returns rows (as Fraction lists in original coordinates) and, for each
    row, the position in ``order`` of its pivot.
    """
    rows = [list(v) for v in vectors]
    out, pivots = [], []
    for pos, col in enumerate(order):
        k = next((i for i, r in enumerate(rows) if r[col] != 0), None)
        if k is None:
            continue
        piv = rows.pop(k)
        lead = piv[col]
        piv = [x / lead for x in piv]
        rows = [[x - r[col] * y for x, y in zip(r, piv)] for r in rows]
        out = [[x - r[col] * y for x, y in zip(r, piv)] for r in out]
        out.append(piv)
        pivots.append(pos)
        if not rows:
            break
    return out, pivots


@dataclass
class _Plan:
    # one entry per search position, in branching order
    weights: list
    bounds: list
    pivot_row: list          # row index if the position is free, else -1
    dependents: list         # for determined positions: (denominator, [(row, int coeff)])
    order: list
    tol: float


def _make_plan(cb: CommutantBasis) -> _Plan | None:
    d1, d2 = cb.left, cb.right
    s1, s2 = d1.first_column, d2.first_column
    coords = list(range(len(cb.support)))
    origin = cb.support.index((0, 0))
    rest = sorted((j for j in coords if j != origin),
                  key=lambda j: (-s1[cb.support[j][0]] * s2[cb.support[j][1]], cb.support[j]))
    order = [origin] + rest
    rows, pivots = _exact_rref(cb.basis, order)
    if not pivots or pivots[0] != 0:
        # every commutant element has Z00 = 0
        return None
    B = entry_bound(d1, d2)
    plan = _Plan([], [], [], [], order, d1.precision.tol_zero)
    pivot_of = {p: i for i, p in enumerate(pivots)}
    for pos, j in enumerate(order):
        a, b = cb.support[j]
        plan.weights.append(float(s1[a] * s2[b]))
        plan.bounds.append(int(B[a, b]))
        if pos in pivot_of:
            plan.pivot_row.append(pivot_of[pos])
            plan.dependents.append(None)
        else:
            terms = [(i, rows[i][j]) for i in range(len(rows)) if rows[i][j] != 0]
            den = math.lcm(*(c.denominator for _, c in terms)) if terms else 1
            plan.pivot_row.append(-1)
            plan.dependents.append((den, [(i, int(c * den)) for i, c in terms]))
    return plan


def _search(plan: _Plan, prefix: tuple, budget: int):
    """Depth-first search; ``prefix`` fixes the leading free variables."""
    n = len(plan.order)
    nfree = sum(1 for p in plan.pivot_row if p >= 0)
    values = [0] * n
    free = [0] * nfree
    found = []
    nodes = 0
    hi = 1.0 + plan.tol

    def visit(pos, partial):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(nodes)
        if pos == n:
            if abs(partial - 1.0) <= plan.tol * n:
                found.append(tuple(values))
            return
        w = plan.weights[pos]
        row = plan.pivot_row[pos]
        if row >= 0:
            if pos == 0:
                choices = (1,)
            elif row < len(prefix):
                choices = (prefix[row],)
            else:
                top = min(plan.bounds[pos], math.floor((hi - partial) / w))
                choices = range(top, -1, -1)
            for v in choices:
                s = partial + w * v
                if v < 0 or v > plan.bounds[pos] or s > hi:
                    continue
                free[row] = v
                values[pos] = v
                visit(pos + 1, s)
            return
        den, terms = plan.dependents[pos]
        num = sum(free[i] * c for i, c in terms)
        if num % den:
            return
        v = num // den
        if v < 0 or v > plan.bounds[pos]:
            return
        s = partial + w * v
        if s > hi:
            return
        values[pos] = v
        visit(pos + 1, s)

    visit(0, 0.0)
    return found, nodes


def _search_task(args):
    plan, prefix, budget = args
    return _search(plan, prefix, budget)


@dataclass(frozen=True, eq=False)
class Library:
    """Complete list of physical invariants for one ordered pair of categories."""
    left: ModularDatum
    right: ModularDatum
    invariants: tuple
    provenance: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.invariants)

    def __len__(self):
        return len(self.invariants)

    def __getitem__(self, name) -> ModularInvariant:
        for z in self.invariants:
            if z.name == name:
                return z
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [z.name for z in self.invariants]

    def to_json(self) -> dict:
        cats = {self.left.name: datum_to_json(self.left)}
        cats[self.right.name] = datum_to_json(self.right)
        return {
            "left": self.left.name,
            "right": self.right.name,
            "categories": cats,
            "invariants": [z.to_json() for z in self.invariants],
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, obj, prec=None) -> "Library":
        from .numerics import DEFAULT_PRECISION
        prec = prec or DEFAULT_PRECISION
        try:
            cats = {name: datum_from_json(c, prec) for name, c in obj["categories"].items()}
            invs = tuple(ModularInvariant.from_json(z, cats).check()
                         for z in obj["invariants"])
            return cls(cats[obj["left"]], cats[obj["right"]], invs,
                       dict(obj.get("provenance", {})))
        except (KeyError, TypeError) as exc:
            raise InvariantError(f"malformed library JSON: {exc!r}") from exc


def _sort_key(Z):
    # row 0 ascending, then the whole matrix descending: identity comes first
    return (tuple(Z[0].tolist()), tuple((-Z).ravel().tolist()))


def classify(d1: ModularDatum, d2: ModularDatum, *,
             node_budget: int = DEFAULT_NODE_BUDGET,
             max_den: int = DEFAULT_MAX_DEN,
             strict_heterotic: bool = False,
             threads: int = 1) -> Library:
    """Every physical invariant between ``d1`` and ``d2``, with provenance.

    Parameters
    ----------
    node_budget : int
        Maximum number of search nodes; :class:`BudgetExceeded` beyond it.
    strict_heterotic : bool
        Reject pairs with ``c1 != c2 (mod 24)`` instead of returning an
        empty library (no physical invariant can exist for them).
    threads : int
        Worker processes for the search; ``0`` means one per CPU.
    """
    if node_budget < 1:
        raise ValueError("node_budget must be positive")
    if strict_heterotic and d1.c != d2.c:
        raise HeteroticMismatch(f"central charges differ: {d1.c} vs {d2.c} (mod 24)")
    prec = d1.precision
    provenance = {
        "precision": prec.as_dict(),
        "max_den": max_den,
        "node_budget": node_budget,
        "nodes": 0,
        "commutant_dim": 0,
        "support_size": 0,
    }

    def done(found):
        mats = sorted(found, key=_sort_key)
        invs = tuple(ModularInvariant(d1, d2, Z).check() for Z in mats)
        provenance["count"] = len(invs)
        return Library(d1, d2, invs, provenance)

    cb = commutant_basis(d1, d2, max_den)
    provenance["commutant_dim"] = cb.dim
    provenance["support_size"] = len(cb.support)
    B = entry_bound(d1, d2)
    provenance["max_entry_bound"] = int(B.max())
    if (0, 0) not in cb.support or cb.dim == 0:
        return done([])
    plan = _make_plan(cb)
    if plan is None:
        return done([])

    if threads == 1 or cb.dim < 2:
        vectors, nodes = _search(plan, (), node_budget)
    else:
        import os
        workers = threads or os.cpu_count() or 1
        # split on the first branching free variable
        pos = plan.pivot_row.index(1)
        top = plan.bounds[pos]
        tasks = [(plan, (1, v), node_budget) for v in range(top + 1)]
        vectors, nodes = [], 0
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for f, n in ex.map(_search_task, tasks):
                vectors.extend(f)
                nodes += n
        if nodes > node_budget:
            raise BudgetExceeded(nodes)
    provenance["nodes"] = nodes

    found, seen = [], set()
    for vec in vectors:
        Z = np.zeros((d1.rank, d2.rank), dtype=np.int64)
        for pos, j in enumerate(plan.order):
            a, b = cb.support[j]
            Z[a, b] = vec[pos]
        key = Z.tobytes()
        if key not in seen:
            seen.add(key)
            found.append(Z)
    return done(found)


def classify_physical(d1: ModularDatum, d2: ModularDatum, **kw) -> list[ModularInvariant]:
    """Complete, duplicate-free list of physical invariants (see :func:`classify`)."""
    return list(classify(d1, d2, **kw).invariants)
