import json

import pytest

from xcent import __version__
from xcent.cli import main
from xcent.rng import SplitMix64
from xcent.presentations import path as shipped_path
from xcent.verify import random_null_words, render, run_suite


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def cache(tmp_path):
    return str(tmp_path / "cache")


def test_splitmix_reference_vectors():
    r = SplitMix64(0)
    assert [r.next_u64() for _ in range(3)] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4,
                                                0x06C45D188009454F]
    r = SplitMix64(1234567)
    assert [r.next_u64() for _ in range(3)] == [6457827717110365317, 3203168211198807973,
                                                9817491932198370423]


def test_sample_indices_distinct():
    idx = SplitMix64(3).sample_indices(50, 20)
    assert len(set(idx)) == 20 and all(0 <= i < 50 for i in idx)


def test_check(capsys, cache):
    code, out, _ = run(capsys, "--cache-dir", cache, "check", "genus2_e1")
    d = json.loads(out)
    assert code == 0
    assert d["lambda"] == "3" and d["max_piece_ratio"] == "1/8" and d["symmetrized_relators"] == 16


def test_check_by_path(capsys):
    code, out, _ = run(capsys, "check", str(shipped_path("free2")))
    assert code == 0 and json.loads(out)["relators"] == []


def test_malformed_file(capsys, tmp_path):
    bad = tmp_path / "bad.xcent"
    bad.write_text("generators: a A\ncentral: t T\nrelator: ax height 1\n")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 2
    assert "line 3" in err


def test_missing_file(capsys):
    assert run(capsys, "check", "/nonexistent.xcent")[0] == 2


def test_usage_error(capsys):
    assert run(capsys, "ball", "free2")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_force_flag(capsys, tmp_path):
    f = tmp_path / "nc.xcent"
    f.write_text("generators: a A, b B\ncentral: t T\nrelator: abAB height 0\nrelator: abab height 0\n")
    assert run(capsys, "check", str(f))[0] == 2
    code, out, err = run(capsys, "--force", "check", str(f))
    assert code == 0 and "unverified" in err and json.loads(out)["unverified_word_problem"]


def test_height_and_trace(capsys):
    code, out, _ = run(capsys, "height", "genus2_e1", "abABcdCD")
    assert code == 0 and json.loads(out)["null_height"] == 1
    code, out, _ = run(capsys, "height", "genus2_e1", "tabABcdCD", "--trace")
    lines = out.splitlines()
    assert lines[0] == "kind\tposition\trelator\theight_delta"
    assert sum(int(l.split("\t")[3]) for l in lines[1:]) == 2
    assert run(capsys, "height", "genus2_e1", "ab")[0] == 1


def test_ball_and_cache(capsys, cache):
    code, out, _ = run(capsys, "--cache-dir", cache, "ball", "genus2_e1", "--radius", "3")
    assert code == 0 and json.loads(out)["spheres"] == [1, 8, 56, 392]
    again = run(capsys, "--cache-dir", cache, "ball", "genus2_e1", "--radius", "3")[1]
    fresh = run(capsys, "--no-cache", "ball", "genus2_e1", "--radius", "3")[1]
    assert out == again == fresh


def test_cap_exit_code(capsys, cache):
    assert run(capsys, "--no-cache", "--cap", "100", "ball", "genus2_e1", "--radius", "3")[0] == 3
    run(capsys, "--cache-dir", cache, "ball", "genus2_e1", "--radius", "3")
    assert run(capsys, "--cache-dir", cache, "--cap", "100", "ball", "genus2_e1", "--radius", "3")[0] == 3


def test_maximise_tsv(capsys, cache):
    code, out, _ = run(capsys, "--cache-dir", cache, "maximise", "free2", "--radius", "2")
    rows = [l.split("\t") for l in out.splitlines()]
    assert rows[0] == ["word", "norm", "F"]
    assert len(rows) == 18
    assert all(int(f) == -2 * int(n) for _, n, f in rows[1:])
    _, out10, _ = run(capsys, "--no-cache", "maximise", "free2", "--radius", "1", "--big-c", "10")
    assert out10.splitlines()[2].endswith("\t-10")


def test_cocycle_json(capsys, cache):
    code, out, _ = run(capsys, "--cache-dir", cache, "cocycle", "genus2_e1", "--radius", "2",
                       "--mode", "rho", "--scan", "weak")
    d = json.loads(out)
    assert code == 0
    assert {"mode", "C", "radius", "max_abs", "argmax", "histogram"} <= set(d)
    assert d["max_abs"] <= 2
    code, out, _ = run(capsys, "--cache-dir", cache, "cocycle", "genus2_e1", "--radius", "2",
                       "--mode", "floor-q", "--scan", "identity")
    assert code == 0 and json.loads(out)["violations"] == 0
    code, out, _ = run(capsys, "--cache-dir", cache, "--seed", "5", "cocycle", "free2", "--radius", "2",
                       "--mode", "q", "--scan", "full", "--sample", "50")
    assert json.loads(out)["max_abs"] == 0


def test_level_set(capsys, cache):
    code, out, _ = run(capsys, "--cache-dir", cache, "level-set", "free2", "--radius", "2",
                       "--letter", "a", "--value", "-4")
    d = json.loads(out)
    # σ_ρ(g, a) = -2C exactly when g ends in A
    assert code == 0
    assert sorted(d["elements"]) == sorted(["A", "AA", "bA", "BA"])
    assert run(capsys, "level-set", "free2", "--radius", "2", "--letter", "a", "--value", "0.3")[0] == 2


def test_fsa(capsys, cache, tmp_path):
    dot = tmp_path / "m.dot"
    code, out, _ = run(capsys, "--cache-dir", cache, "fsa", "free2", "--radius", "3", "--delta", "1",
                       "--max-len", "6", "--explore", "--dot", str(dot))
    d = json.loads(out)
    assert code == 0
    assert d["delta"] == 1 and d["agreement"]["disagreements"] == []
    assert dot.read_text().startswith("digraph")


def test_repair(capsys, cache):
    code, out, _ = run(capsys, "--cache-dir", cache, "repair", "free2", "--radius", "3")
    d = json.loads(out)
    assert code == 0 and d["bounded_by_C"] and d["K_in"] > 50 and d["C"] == d["K_in"] + 1


def test_verify_quick(capsys, cache):
    code, out, _ = run(capsys, "--cache-dir", cache, "verify", "free2", "--profile", "quick")
    assert code == 0 and out.splitlines()[-1].startswith("PASS")
    code, out, _ = run(capsys, "--no-cache", "verify", "free2", "--json")
    d = json.loads(out)
    assert d["passed"] and all("seconds" in c for c in d["checks"])


def test_report_deterministic(capsys, tmp_path, cache):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "--cache-dir", cache, "report", "free2", "--out", str(a))[0] == 0
    assert run(capsys, "--no-cache", "report", "free2", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    d = json.loads(a.read_text())
    assert d["tool_version"] == __version__ and len(d["presentation_digest"]) == 64


def test_report_formats_agree(free):
    res = run_suite(free, "quick")
    j = json.loads(render(res, free, "json"))
    rows = dict(line.split("\t", 1) for line in render(res, free, "tsv").splitlines()[1:])
    assert json.loads(rows["presentation_digest"]) == j["presentation_digest"]
    assert json.loads(rows["constants.delta_hat.3"]) == j["constants"]["delta_hat"]["3"]
    for c in j["checks"]:
        assert json.loads(rows[f"checks.{c['name']}.status"]) == c["status"]


def test_report_unwritable(capsys):
    assert run(capsys, "--no-cache", "report", "free2", "--out", "/nonexistent/dir/r.json")[0] == 2


def test_random_null_words_seeded(genus):
    assert random_null_words(genus, 5, 24, seed=1) == random_null_words(genus, 5, 24, seed=1)
