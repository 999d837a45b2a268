"""Exit criteria.  Each test records one PASS/FAIL line in the terminal summary."""
import time
from collections import Counter
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import ACCEPTANCE
from mtc.fusion import NoDecomposition, associativity_audit, fuse, fusion_table
from mtc.invariants import (
    BudgetExceeded, DEFAULT_NODE_BUDGET, classify, weighted_sum_identity,
)
from mtc.modular_data import su2_data, validate, verlinde
from mtc.numerics import mat_adjoint, mat_inf_norm
from oracles import brute_force_box, clebsch_gordan


@contextmanager
def criterion(number, title):
    note = {}
    try:
        yield note
    except BaseException:
        ACCEPTANCE.append((number, title, False, note.get("text", "")))
        raise
    ACCEPTANCE.append((number, title, True, note.get("text", "")))


def _block_d(Z, k):
    # D-type with a block: Z[0, k] = 1 and the block |chi_0 + chi_k|^2
    return Z[0, k] == 1 and Z[k, 0] == 1 and Z[k, k] == 1


def _e7_oracle():
    # |c0+c16|^2 + |c4+c12|^2 + |c6+c10|^2 + |c8|^2 + [(c2+c14) c8* + c.c.]
    Z = np.zeros((17, 17), dtype=np.int64)
    for g in [(0, 16), (4, 12), (6, 10), (8,)]:
        for a in g:
            for b in g:
                Z[a, b] += 1
    for a in (2, 14):
        Z[a, 8] += 1
        Z[8, a] += 1
    return Z


@pytest.fixture(scope="module")
def triple():
    d = su2_data(16)
    return classify(d, d)


def test_1_triple_classification():
    with criterion(1, "A/D/E triple located at exactly one level in {16, 17}") as note:
        start = time.perf_counter()
        hits = []
        for k in (16, 17):
            d = su2_data(k)
            lib = classify(d, d)
            Zs = [z.Z for z in lib]
            ident = [Z for Z in Zs if np.array_equal(Z, np.eye(k + 1, dtype=np.int64))]
            dblock = [Z for Z in Zs if not np.array_equal(Z, np.eye(k + 1)) and _block_d(Z, k)
                     and np.array_equal(Z @ Z, 2 * Z)]
            etype = [Z for Z in Zs if k == 16 and np.array_equal(Z, _e7_oracle())]
            if len(Zs) == 3 and ident and dblock and etype:
                hits.append(k)
        elapsed = time.perf_counter() - start
        note["text"] = f"(level {hits}, {elapsed:.2f}s)"
        assert hits == [16]
        assert elapsed <= 300


def test_2_fusion_table(triple):
    with criterion(2, "fusion table D10/E7 reproduced exactly") as note:
        start = time.perf_counter()
        table = fusion_table(triple)
        elapsed = time.perf_counter() - start
        note["text"] = f"({elapsed:.3f}s)"
        D, E = triple["D10"].Z, triple["E7"].Z
        rows = {o.factors: Counter(dict(o.summands)) for o in table}
        assert rows[("D10", "D10")] == {"D10": 2}
        assert rows[("D10", "E7")] == {"E7": 2}
        assert rows[("E7", "D10")] == {"E7": 2}
        assert rows[("E7", "E7")] == {"D10": 1, "E7": 1}
        assert np.array_equal(table[("D10", "D10")].product, 2 * D)
        assert np.array_equal(table[("D10", "E7")].product, 2 * E)
        assert np.array_equal(table[("E7", "D10")].product, 2 * E)
        assert np.array_equal(table[("E7", "E7")].product, D + E)
        for x in triple:
            assert rows[("A17", x.name)] == rows[(x.name, "A17")] == {x.name: 1}
            assert np.array_equal(table[("A17", x.name)].product, x.Z)
        assert elapsed <= 10


def test_3_products_decompose():
    with criterion(3, "every product of physical invariants decomposes, k <= 24") as note:
        completed, cells = [], 0
        for k in range(1, 25):
            d = su2_data(k)
            try:
                lib = classify(d, d, node_budget=DEFAULT_NODE_BUDGET)
            except BudgetExceeded:
                continue
            completed.append(k)
            for x in lib:
                for y in lib:
                    try:
                        out = fuse(x, y, lib)
                    except NoDecomposition as exc:
                        pytest.fail(f"k={k}: {x.name} ⊗ {y.name}: {exc}")
                    assert out.count == out.product[0, 0]
                    assert all(lib[n].physical for n, _ in out.summands)
                    cells += 1
        note["text"] = f"({len(completed)} levels, {cells} products)"
        assert completed == list(range(1, 25))


def test_4_associativity(triple):
    with criterion(4, "associativity: matrices exactly, multisets at level 16") as note:
        report = associativity_audit(triple)
        assert all(e.matrix_ok for e in report.entries)
        assert report.passed
        e = report.entry("E7", "E7", "D10")
        assert e.left == e.right == Counter({"D10": 2, "E7": 2})
        note["text"] = f"({len(report.entries)} triples)"


def test_5_modular_data_validity():
    with criterion(5, "SU(2)_k data valid and Verlinde = Clebsch-Gordan, k <= 32") as note:
        worst = 0.0
        for k in range(1, 33):
            d = su2_data(k)
            S, T = d.S, d.T
            assert mat_inf_norm(S - S.T) <= 1e-9
            assert mat_inf_norm(S @ mat_adjoint(S) - np.eye(d.rank)) <= 1e-9
            ST = S @ T
            assert mat_inf_norm(ST @ ST @ ST - S @ S) <= 1e-8
            assert np.all(S[:, 0].real > 0)
            assert validate(d).passed
            F = verlinde(d)
            assert F.max_residual <= 1e-7
            assert np.array_equal(F.N, clebsch_gordan(k))
            worst = max(worst, F.max_residual)
        note["text"] = f"(max Verlinde residual {worst:.1e})"


def test_6_positivity_identity():
    with criterion(6, "weighted-sum identity and zero lemma") as note:
        worst, count = 0.0, 0
        for k in range(1, 33):
            d = su2_data(k)
            for z in classify(d, d):
                r = weighted_sum_identity(z)
                assert r <= 1e-8, (k, z.name, r)
                worst = max(worst, r)
                count += 1
        for k in range(1, 7):
            hits, _ = brute_force_box(k, 0)
            assert all(not Z.any() for Z in hits), k
        note["text"] = f"({count} invariants, max residual {worst:.1e})"


def test_7_oracle_equivalence():
    with criterion(7, "classifier equals brute force for k <= 6") as note:
        elapsed = 0.0
        for k in range(1, 7):
            d = su2_data(k)
            start = time.perf_counter()
            lib = classify(d, d)
            elapsed += time.perf_counter() - start
            hits, _ = brute_force_box(k, 1)
            assert sorted(z.Z.tobytes() for z in lib) == sorted(Z.tobytes() for Z in hits), k
        note["text"] = f"(classifier {elapsed:.2f}s)"
        assert elapsed <= 60
