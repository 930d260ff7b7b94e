import json

import numpy as np

from cuberecon.cli import main
from cuberecon.complex import DistanceMatrix


def run(*argv):
    return main([str(a) for a in argv])


def test_gen_then_distances_of_a_cube(tmp_path):
    cube = tmp_path / "cube.json"
    assert run("gen", "--kind", "named", "--name", "single_cube", "--out", cube) == 0
    out = tmp_path / "d.csv"
    assert run("distances", "--in", cube, "--out", out) == 0
    D = DistanceMatrix.from_csv(out.read_text())
    bits = np.array([[int(t) for t in lab.split(":")] for lab in D.labels])
    hamming = np.abs(bits[:, None, :] - bits[None, :, :]).sum(axis=2)
    assert np.array_equal(D.d, hamming)


def test_reconstruct_and_isocheck(tmp_path):
    src = tmp_path / "x.json"
    run("gen", "--kind", "voxel-random", "--n", 7, "--seed", 4, "--out", src)
    run("distances", "--in", src, "--out", tmp_path / "d.csv")
    assert run("reconstruct", "--in", tmp_path / "d.csv", "--out", tmp_path / "y.json", "--trace", tmp_path / "t.json") == 0
    assert json.loads((tmp_path / "t.json").read_text())
    assert run("isocheck", "--a", src, "--b", tmp_path / "y.json", "--out", tmp_path / "m.json") == 0
    doc = json.loads((tmp_path / "m.json").read_text())
    assert doc["isomorphic"] and all(k == v for k, v in doc["mapping"].items())


def test_validate_exit_codes(tmp_path):
    ring = tmp_path / "ring.json"
    run("gen", "--kind", "named", "--name", "square_ring", "--out", ring)
    assert run("validate", "--in", ring, "--out", tmp_path / "v.json") == 1
    doc = json.loads((tmp_path / "v.json").read_text())
    assert doc["verdict"] == "fail"
    block = tmp_path / "b.json"
    run("gen", "--kind", "named", "--name", "block_2x2x2", "--out", block)
    assert run("validate", "--in", block, "--budget", 1, "--out", tmp_path / "w.json") == 2


def test_reconstruct_refusal_exits_one(tmp_path, capsys):
    src = tmp_path / "f.json"
    run("gen", "--kind", "named", "--name", "fig2a", "--out", src)
    run("distances", "--in", src, "--out", tmp_path / "d.csv")
    assert run("reconstruct", "--in", tmp_path / "d.csv", "--out", tmp_path / "y.json") == 1
    assert "refused" in capsys.readouterr().err
    assert not (tmp_path / "y.json").exists()


def test_thicken_writes_shell_and_audit(tmp_path):
    src = tmp_path / "l.json"
    run("gen", "--kind", "named", "--name", "l_shape", "--out", src)
    assert run("thicken", "--in", src, "--out", tmp_path / "s.json", "--audit", tmp_path / "a.json") == 0
    audit = json.loads((tmp_path / "a.json").read_text())
    assert audit["identities_hold"] and audit["euler"] == 2
    shell = json.loads((tmp_path / "s.json").read_text())
    assert shell["surface"]["faces"]


def test_roundtrip_is_deterministic(tmp_path):
    for name in ("a.json", "b.json"):
        assert run("--seed", 3, "roundtrip", "--kind", "cat0", "--count", 4, "--no-timing", "--out", tmp_path / name) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    doc = json.loads((tmp_path / "a.json").read_text())
    assert [c["case"]["seed"] for c in doc["cases"]] == [3, 4, 5, 6]


def test_bad_input_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("validate", "--in", bad) == 1
    assert "line 1" in capsys.readouterr().err
    assert run("validate", "--in", tmp_path / "missing.json") == 1
