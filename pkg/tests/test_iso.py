from hypothesis import given
from hypothesis import strategies as st

from cuberecon.complex import boundary_vertices, build
from cuberecon.generators import named_example, random_cat0
from cuberecon.iso import isomorphic_labeled


@given(st.integers(0, 10_000), st.integers(1, 10))
def test_relabelled_interior_is_still_isomorphic(seed, n):
    X = random_cat0(n, seed)
    bd = set(boundary_vertices(X, 3))
    inner = [v for v in range(X.n_vertices) if v not in bd]
    Y = X.relabel({v: f"inner{k}" for k, v in enumerate(reversed(inner))})
    m = isomorphic_labeled(X, Y, 3)
    assert m is not None
    for v in bd:
        assert m.forward[v] == v


def test_boundary_labels_are_anchored():
    X = build([(0, 1, 2, 3)], labels=list("abcd"))
    Y = build([(0, 1, 2, 3)], labels=list("abdc"))
    # same square, but the diagonal pair differs
    assert isomorphic_labeled(X, Y, 2) is None
    assert isomorphic_labeled(X, X, 2) is not None


def test_fig2_pair_is_not_isomorphic():
    assert isomorphic_labeled(named_example("fig2a"), named_example("fig2b"), 3) is None


def test_different_counts_short_circuit():
    assert isomorphic_labeled(named_example("single_cube"), named_example("l_shape")) is None
