import json

import pytest

from cuberecon.errors import SpecError
from cuberecon.generators import named_example, random_cat0
from cuberecon.harness import (
    boundary_link_check,
    canonical_json,
    cmd_roundtrip,
    hyperplane_suite,
    interval_closed,
    oracle_replay,
    parse_corpus_spec,
)


def test_canonical_json_ignores_relabelling_order():
    X = random_cat0(6, 3)
    Y = X.relabel({i: X.labels[i] for i in reversed(range(X.n_vertices))})
    assert canonical_json(X) == canonical_json(Y)
    doc = json.loads(canonical_json(X))
    assert doc["cubes"] == sorted(doc["cubes"])


@pytest.mark.parametrize("spec", [[], {"kind": "voxels"}, {"kind": "cat0", "seeds": [5, 2]},
                                  {"kind": "cat0", "seeds": ["a"]}, {"kind": "named", "names": "x"}])
def test_bad_specs(spec):
    with pytest.raises(SpecError):
        parse_corpus_spec(spec)


def test_spec_expansion():
    assert parse_corpus_spec({"kind": "tree", "seeds": [2, 4]}) == [("tree", 2, None), ("tree", 3, None)]
    assert parse_corpus_spec({"kind": "cat0", "seeds": [1, 7, 9], "range": False})[1] == ("cat0", 7, None)


@pytest.mark.parametrize("name,rule", [("block_3x3x3", "row_pm1"), ("deg3_pattern", "plus2"),
                                       ("square_disc", "corner_pm1"), ("l_shape", "unchanged")])
def test_oracle_replay_uses_each_rule(name, rule):
    X = named_example(name)
    rep = oracle_replay(X, 2 if X.dimension == 2 else 3)
    assert rep["mismatches"] == []
    assert rep["rules"].get(rule, 0) > 0


def test_literal_boundary_link_differs_from_what_the_graph_sees():
    rep = boundary_link_check(named_example("block_2x1x1"))
    assert rep["consequence_failures"] == []
    assert rep["literal_failures"]


def test_hyperplane_suite_on_named():
    rep = hyperplane_suite(named_example("l_shape"), 3)
    assert rep["failures"] == [] and rep["convex_checked"]
    assert rep["hyperplanes"] == 5


def test_interval_closure_spots_a_missing_middle():
    X = named_example("row_3")
    ends = {X.vertex("0:0:0"), X.vertex("3:0:0")}
    assert not interval_closed(X, ends)
    assert interval_closed(X, set(range(X.n_vertices)))


def test_named_roundtrip_reports_expected_refusals():
    rep = cmd_roundtrip({"kind": "named", "names": ["single_cube", "fig2a", "fig2b"]}, timing=False)
    verdicts = [c["verdict"] for c in rep["cases"]]
    assert verdicts == ["pass", "expected_refusal", "expected_refusal"]
    assert rep["aggregate"]["pass_rate"] == 1.0
