import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from cuberecon.complex import MAX_DIM, build
from cuberecon.generators import named_example, random_cat0, random_quad2d
from cuberecon.validate import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    boundary_matrices,
    check_contractible,
    check_flag_links,
    check_squares_filled,
    collapse,
    cut_vertices,
    face_corners,
    is_clean,
    reduced_homology,
    smith_invariants,
    validate_cat0,
)

seeds = st.integers(0, 10_000)


def dense(entries, shape):
    a = np.zeros(shape, dtype=np.int64)
    for (r, c), v in entries.items():
        a[r, c] = v
    return a


def rational_betti(X):
    """Reduced Betti numbers from matrix ranks over the rationals."""
    mats = boundary_matrices(X)
    sizes = [len(c) for c in X.cells]
    shapes = [(1, sizes[0])] + [(sizes[d - 1], sizes[d]) for d in range(1, MAX_DIM + 1)]
    ranks = [np.linalg.matrix_rank(dense(m, s)) if min(s) else 0 for m, s in zip(mats, shapes)] + [0]
    return [sizes[d] - ranks[d] - ranks[d + 1] for d in range(MAX_DIM + 1)]


@given(seeds, st.integers(1, 10))
def test_boundary_of_boundary_vanishes(seed, n):
    X = random_cat0(n, seed)
    mats = boundary_matrices(X)
    sizes = [len(c) for c in X.cells]
    shapes = [(1, sizes[0])] + [(sizes[d - 1], sizes[d]) for d in range(1, MAX_DIM + 1)]
    for d in range(MAX_DIM):
        prod = dense(mats[d], shapes[d]) @ dense(mats[d + 1], shapes[d + 1])
        assert not prod.any()


@given(seeds, st.integers(1, 10))
def test_homology_matches_rational_ranks(seed, n):
    X = random_quad2d(n, seed)
    H = reduced_homology(X)
    assert [H[d][0] for d in range(MAX_DIM + 1)] == rational_betti(X)


def test_smith_invariants_small():
    # [[2, 0], [0, 3]] has invariant factors 1, 6
    assert sorted(smith_invariants({(0, 0): 2, (1, 1): 3}, (2, 2))) == [1, 6]


def test_square_ring_has_one_loop():
    X = named_example("square_ring")
    assert reduced_homology(X)[1] == (1, [])
    rep = check_contractible(X)
    assert rep.verdict == FAIL


def test_collapse_of_a_cube():
    ok, states = collapse(build([tuple(range(8))]))
    assert ok and states >= 1


def test_tiny_budget_is_inconclusive():
    rep = check_contractible(named_example("block_2x2x2"), budget=1)
    assert rep.verdict == INCONCLUSIVE


def test_flag_failures_sit_at_the_inner_cube_of_hidden_cube():
    X = named_example("hidden_cube")
    rep = check_flag_links(X)
    assert rep.verdict == FAIL
    hit = {X.labels[w.ids[0]] for w in rep.witnesses}
    assert {f"i{m:03b}" for m in range(8)} <= hit


def test_square_of_four_edges_is_unfilled():
    X = build([(0, 1), (1, 3), (3, 2), (2, 0)])
    rep = check_squares_filled(X)
    assert rep.verdict == FAIL
    assert rep.witnesses[0].ids == (0, 1, 3, 2)


@given(seeds, st.integers(1, 12))
def test_random_corpus_is_cat0(seed, n):
    assert validate_cat0(random_cat0(n, seed)).verdict == PASS


def test_cleanliness_witnesses():
    # two squares sharing one vertex: a cut vertex and six corners of faces
    X = build([(0, 1, 2, 3), (3, 4, 5, 6)])
    assert cut_vertices(X) == [3]
    assert len(face_corners(X)) == 6
    assert not is_clean(X).ok
    assert is_clean(named_example("l_shape")).ok
