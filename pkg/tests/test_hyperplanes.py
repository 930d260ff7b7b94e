import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuberecon.complex import boundary_distance_matrix, boundary_vertices, build
from cuberecon.errors import InconsistentMatrix
from cuberecon.generators import named_example, random_cat0, random_quad2d
from cuberecon.hyperplanes import (
    WITH_X,
    WITH_Y,
    carrier_is_convex,
    carrier_vertices,
    geodesics,
    hyperplanes,
    side_of,
    split_sides,
)

seeds = st.integers(0, 10_000)


def test_cube_has_three_hyperplanes_of_four_edges():
    X = build([tuple(range(8))])
    hs = hyperplanes(X)
    assert sorted(len(h.edges) for h in hs) == [4, 4, 4]
    for h in hs:
        sp = split_sides(X, h)
        assert len(sp.A) == len(sp.B) == 4
        assert carrier_vertices(X, h) == set(range(8))


def test_geodesic_count_across_a_cube():
    X = build([tuple(range(8))])
    assert len(list(geodesics(X, 0, 7))) == math.factorial(3)


def test_midcubes_of_a_square_hyperplane():
    X = build([(0, 1, 2, 3)])
    h = hyperplanes(X)[0]
    assert len(h.midcubes(X)) == 2 + 1


@given(seeds, st.integers(1, 8))
def test_side_of_agrees_with_edge_deletion(seed, n):
    X = random_cat0(n, seed)
    D = boundary_distance_matrix(X, 3)
    bd = boundary_vertices(X, 3)
    bset = set(bd)
    for h in hyperplanes(X):
        sp = split_sides(X, h)
        for e in h.edges:
            x, y = X.edges[e]
            if x in bset and y in bset:
                for p in bd:
                    want = WITH_X if (p in sp.A) == (x in sp.A) else WITH_Y
                    assert side_of(D, X.labels[x], X.labels[y], X.labels[p]) == want
                break


@given(seeds, st.integers(1, 6))
def test_carriers_convex_in_small_square_complexes(seed, n):
    X = random_quad2d(n, seed)
    for h in hyperplanes(X):
        assert carrier_is_convex(X, h)


def test_side_of_rejects_non_edges():
    D = boundary_distance_matrix(named_example("single_cube"), 3)
    with pytest.raises(InconsistentMatrix):
        side_of(D, "0:0:0", "1:1:1", "0:0:0")
