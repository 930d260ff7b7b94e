import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuberecon.complex import is_connected
from cuberecon.errors import UnknownName
from cuberecon.generators import NAMED, NAMED_CAT0, named_example, random_cat0, random_quad2d, random_tree, voxels_of
from cuberecon.validate import is_clean, validate_cat0

seeds = st.integers(0, 10_000)


@given(seeds, st.integers(1, 12))
def test_random_cat0_has_requested_size_and_is_deterministic(seed, n):
    X = random_cat0(n, seed)
    assert len(X.cubes) == n
    assert random_cat0(n, seed) == X
    assert len(voxels_of(X)) == n


@given(seeds, st.integers(1, 60))
def test_random_tree_is_a_tree(seed, n):
    X = random_tree(n, seed)
    g = nx.Graph(X.edges)
    g.add_nodes_from(range(X.n_vertices))
    assert X.n_vertices == n
    assert nx.is_tree(g)


@given(seeds, st.integers(1, 20))
def test_quad2d_is_cat0_with_edges_in_at_most_two_squares(seed, n):
    X = random_quad2d(n, seed, extras=False)
    assert len(X.squares) == n
    assert validate_cat0(X).ok
    count = {}
    for s in X.squares:
        for e in ((s[0], s[1]), (s[2], s[3]), (s[0], s[2]), (s[1], s[3])):
            k = X.find_cell(e)
            count[k] = count.get(k, 0) + 1
    assert max(count.values()) <= 2


@given(seeds, st.integers(1, 20))
def test_quad2d_with_extras_is_cat0_and_connected(seed, n):
    X = random_quad2d(n, seed)
    assert is_connected(X)
    assert validate_cat0(X).ok


@pytest.mark.parametrize("name", NAMED_CAT0)
def test_named_cat0_examples_validate(name):
    assert validate_cat0(named_example(name)).ok


def test_named_table_and_rows():
    assert set(NAMED_CAT0) - {"row_3"} <= set(NAMED)
    assert len(named_example("row_5").cubes) == 5
    assert len(named_example("row_k", k=2).cubes) == 2
    with pytest.raises(UnknownName):
        named_example("row_k")
    with pytest.raises(UnknownName):
        named_example("nonesuch")


def test_bridged_cubes_is_clean_with_a_free_square():
    X = named_example("bridged_cubes")
    assert is_clean(X).ok
    free = [i for i in range(len(X.squares)) if not X.cofaces[2][i]]
    assert len(free) == 1


def test_deg3_pattern_has_the_documented_vertex():
    X = named_example("deg3_pattern")
    v = X.vertex("2:0:0")
    assert X.degree(v) == 3 and not X.vertex_cells[v][3]
