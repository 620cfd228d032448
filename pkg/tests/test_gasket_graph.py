from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polygasket.gasket_graph import (
    build,
    diameter,
    distances_from,
    edgelist_text,
    geodesic_distance,
    graph_distance,
    graph_json,
    params,
    vertex_count,
)


def test_params_examples():
    p = params(1)
    assert (p.c, p.rho) == (5, Fraction(5, 3))
    assert p.d_H == pytest.approx(math.log(3) / math.log(2), abs=1e-12)
    assert p.d_w == pytest.approx(math.log(5) / math.log(2), abs=1e-12)
    assert p.d_s == pytest.approx(2 * math.log(3) / math.log(5), abs=1e-12)
    assert (params(2).c, params(2).rho) == (14, Fraction(7, 3))
    assert params(3).c == 27
    assert params(3).d_H == pytest.approx(math.log(9) / math.log(4), abs=1e-12)


@given(st.integers(1, 500))
def test_params_identities(N):
    p = params(N)
    assert p.d_w * math.log(N + 1) == pytest.approx(math.log(p.c), abs=1e-12)
    assert p.d_s == pytest.approx(2 * math.log(3 * N) / (math.log(2 * N + 3) + math.log(N)), abs=1e-12)
    assert p.rho == 1 + Fraction(2 * N, 3)


@pytest.mark.parametrize("bad", [0, -3, 1.5])
def test_params_rejects(bad):
    with pytest.raises(ValueError):
        params(bad)


@given(st.integers(1, 40), st.integers(0, 8))
def test_vertex_count_recurrence(N, n):
    v = 3
    for _ in range(n):
        v = 3 * N * v - 3 * N
    assert vertex_count(N, n) == v


def test_vertex_count_examples():
    assert vertex_count(1, 1) == 6
    assert vertex_count(1, 2) == 15
    assert vertex_count(2, 0) == 3


def test_small_graphs():
    g0 = build(1, 0)
    assert (g0.num_vertices, g0.num_edges) == (3, 3)
    g1 = build(1, 1)
    assert (g1.num_vertices, g1.num_edges) == (6, 9)
    assert build(2, 1).num_vertices == 12


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_structure_census(N):
    for n in range(0, 5 if N <= 2 else 4):
        if vertex_count(N, n) > 20000:
            continue
        g = build(N, n)
        assert g.num_vertices == vertex_count(N, n)
        deg = g.degrees()
        assert deg.sum() == 2 * g.num_edges == 6 * (3 * N) ** n
        assert np.all(distances_from(g, 0) >= 0)  # connected
        if n >= 1:
            assert set(deg.tolist()) <= {2, 4}
            assert all(deg[b] == 2 for b in g.boundary)
            assert int((deg == 2).sum()) == 2 * g.num_vertices - 3 * (3 * N) ** n


def test_boundary_and_locate():
    g = build(2, 2)
    for k, b in enumerate(g.boundary, start=1):
        assert g.locate((k * 2, 2), 1) == b  # v_k = F_kN(F_N(v1))
    # gluing: F_{i}(v2) = F_{i-1}(v3)
    g1 = build(2, 1)
    for i in range(1, 7):
        j = 6 if i == 1 else i - 1
        assert g1.locate((i,), 2) == g1.locate((j,), 3)
    with pytest.raises(ValueError):
        g1.locate((7,), 1)
    with pytest.raises(ValueError):
        g1.locate((1, 1), 1)


def test_canonical_ids_are_sorted_addresses():
    g = build(3, 2)
    assert list(g.addresses) == sorted(g.addresses)


def test_distances():
    g = build(1, 1)
    b = g.boundary
    assert graph_distance(g, 2, 2) == 0
    assert graph_distance(g, b[0], b[1]) == 2
    nbr = g.adjacency[b[0]][0]
    assert graph_distance(g, b[0], nbr) == 1
    assert geodesic_distance(1, 1, b[0], b[1]) == 1.0
    assert geodesic_distance(1, 1, 4, 4) == 0.0
    g2 = build(2, 1)
    assert graph_distance(g2, g2.boundary[0], g2.boundary[1]) == 3
    assert geodesic_distance(2, 1, g2.boundary[0], g2.boundary[1]) == 1.0
    with pytest.raises(ValueError):
        graph_distance(g, 0, 99)


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5, 6])
def test_level1_diameter(N):
    assert diameter(build(N, 1)) == (3 * N) // 2 + 1


@pytest.mark.parametrize("N,n", [(1, 0), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (3, 2)])
def test_metric_scaling(N, n):
    small, big = build(N, n), build(N, n + 1)
    pm = big.parent_map
    D_small = np.array([distances_from(small, x) for x in range(small.num_vertices)])
    D_big = np.array([distances_from(big, pm[x])[pm] for x in range(small.num_vertices)])
    assert np.array_equal(D_big, (N + 1) * D_small)


def test_exports():
    g = build(1, 1)
    text = edgelist_text(g)
    lines = text.splitlines()
    assert lines[0] == "# N=1 level=1 vertices=6 boundary=0 3 5"
    assert len(lines) == 1 + g.num_edges
    assert edgelist_text(build(1, 1)) == text
    doc = graph_json(g)
    assert doc["num_vertices"] == 6 and len(doc["edges"]) == 9


def test_size_guard():
    with pytest.raises(ValueError):
        build(10, 7)
    with pytest.raises(ValueError):
        build(1, -1)
