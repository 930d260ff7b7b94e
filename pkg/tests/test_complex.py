import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuberecon.complex import (
    CubeComplex,
    DistanceMatrix,
    boundary_distance_matrix,
    boundary_vertices,
    build,
    canonical_chart,
    combinatorial_boundary,
    link,
    orientation_sign,
)
from cuberecon.errors import ChartMismatch, FormatError, InconsistentMatrix, RegularityViolation
from cuberecon.generators import from_voxels, named_example, random_cat0

seeds = st.integers(0, 10_000)


def single_cube():
    return build([tuple(range(8))])


def test_cube_counts():
    assert single_cube().counts() == (8, 12, 6, 1)


def test_cube_distances_are_hamming():
    X = single_cube()
    D = boundary_distance_matrix(X, 3)
    for a in range(8):
        for b in range(8):
            assert D.dist(str(a), str(b)) == bin(a ^ b).count("1")


def test_chart_symmetry_recognises_the_same_square():
    # 0,1,2,3 read as 00,01,10,11; swapping the axes gives 0,2,1,3
    assert canonical_chart((0, 1, 2, 3)) == canonical_chart((0, 2, 1, 3))
    assert canonical_chart((3, 2, 1, 0)) == canonical_chart((0, 1, 2, 3))


def test_orientation_sign_of_axis_swap():
    assert orientation_sign((0, 1, 2, 3), (0, 1, 2, 3)) == 1
    assert orientation_sign((0, 2, 1, 3), (0, 1, 2, 3)) == -1


def test_squares_meeting_in_a_diagonal_are_rejected():
    # corners 0 and 3 are opposite in both squares
    with pytest.raises(RegularityViolation):
        build([(0, 1, 2, 3), (0, 4, 5, 3)])


def test_same_corners_different_cycle_is_rejected():
    with pytest.raises(ChartMismatch):
        build([(0, 1, 2, 3), (0, 1, 3, 2)])


def test_interior_vertex_of_big_block_is_not_boundary():
    X = from_voxels([(i, j, k) for i in range(3) for j in range(3) for k in range(3)])
    bd = set(boundary_vertices(X, 3))
    assert X.vertex("1:1:1") not in bd
    assert len(bd) == 64 - 8


def test_low_dimensional_piece_is_all_boundary_in_ambient_three():
    X = build([(0, 1, 2, 3)])
    assert len(boundary_vertices(X, 3)) == 4
    assert len(boundary_vertices(X, 2)) == 4
    assert combinatorial_boundary(build([(0,)]), 0) == {(0, 0)}


def test_corner_link_is_a_filled_triangle():
    lk = link(single_cube(), 0)
    assert lk.degree == 3
    assert len(lk.edges) == 3 and len(lk.triangles) == 1


@given(seeds, st.integers(1, 8))
def test_json_round_trip(seed, n):
    X = random_cat0(n, seed)
    Y = CubeComplex.from_json(X.to_json())
    assert Y == X
    assert Y.coords == X.coords


def test_json_square_order_is_cyclic():
    doc = json.loads(build([(0, 1, 2, 3)]).to_json())
    sq = doc["squares"][0]
    # consecutive corners share an edge in the document order
    edges = {frozenset(e) for e in doc["edges"]}
    assert all(frozenset((sq[i], sq[(i + 1) % 4])) in edges for i in range(4))


def test_from_dict_reports_bad_arity():
    with pytest.raises(FormatError):
        CubeComplex.from_dict({"vertices": [{"id": 0}, {"id": 1}], "edges": [[0, 1, 1]]})


@given(seeds, st.integers(1, 6))
def test_matrix_csv_round_trip_and_metric(seed, n):
    D = boundary_distance_matrix(random_cat0(n, seed), 3)
    D.validate()
    E = DistanceMatrix.from_csv(D.to_csv())
    assert E.same_as(D)


def test_matrix_validation_rejects_asymmetry():
    D = DistanceMatrix(["a", "b"], [[0, 1], [2, 0]])
    with pytest.raises(InconsistentMatrix):
        D.validate()


def test_matrix_csv_ragged_row_has_line_number():
    with pytest.raises(FormatError, match="line 3"):
        DistanceMatrix.from_csv("a,b\n0,1\n1\n")


def test_relabel_then_canonical_orders_ids_by_label():
    X = named_example("single_cube").relabel({0: "zz"})
    Y = X.canonical()
    assert list(Y.labels) == sorted(Y.labels)
    assert np.array_equal(
        boundary_distance_matrix(X, 3).sorted().d, boundary_distance_matrix(Y, 3).sorted().d
    )
