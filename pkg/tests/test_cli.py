import json

import pytest

from parityc import suites
from parityc.cli import main
from parityc.cochains import Cochain, Quasiaction, cochain_to_json
from parityc.groups import automorphism_group, builtin


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_validate_builtin(capsys):
    code, out, _ = run(capsys, "validate", "--group", "sym:3")
    data = json.loads(out)
    assert code == 0 and data["order"] == 6 and not data["abelian"]


def test_validate_rejects_bad_table_with_witness(capsys, tmp_path):
    path = write(tmp_path, "g.json", {"name": "bad", "table": [[0, 1], [1, 1]]})
    code, out, _ = run(capsys, "validate", "--group", path)
    data = json.loads(out)
    assert code == 65 and not data["valid"] and data["witness"] is not None


def test_validate_cochain(capsys, tmp_path):
    G = builtin("cyclic:2")
    c = Cochain(2, Quasiaction.trivial(G, G), [[0, 0], [0, 1]])
    code, out, _ = run(capsys, "validate", "--cochain", write(tmp_path, "c.json", cochain_to_json(c)))
    assert code == 0 and json.loads(out)["cocycle"]


def test_aut_tsv(capsys):
    code, out, _ = run(capsys, "aut", "--group", "quat:8", "--format", "tsv")
    rows = [line.split("\t") for line in out.strip().splitlines()]
    assert code == 0 and rows[1][1:] == ["24", "4", "6"]


def test_census_counts(capsys):
    code, out, _ = run(capsys, "census", "--G", "cyclic:2", "--N", "cyclic:2", "--p", "2")
    data = json.loads(out)
    fib = data["fibers"][0]
    assert code == 0 and (fib["Z2"], fib["H2"]) == (2, 2)


def test_census_budget_exit(capsys, monkeypatch):
    monkeypatch.setenv("PARITYC_BUDGET", "10")
    code, _, err = run(capsys, "census", "--G", "cyclic:3", "--N", "cyclic:3", "--p", "2")
    assert code == 2 and "budget" in err.lower()


def test_extend_z4(capsys, tmp_path):
    G = builtin("cyclic:2")
    c = Cochain(2, Quasiaction.trivial(G, G), [[0, 0], [0, 1]])
    ext = tmp_path / "e.json"
    code, out, _ = run(capsys, "extend", "--cochain", write(tmp_path, "c.json", cochain_to_json(c)),
                       "--extension-out", str(ext))
    data = json.loads(out)
    assert code == 0 and data["associative"] and data["iso_profile"] == [1, 1, 2]
    assert data["roundtrip"]["exact"] and ext.exists()


def test_extend_full_fiber_non_associative(capsys, tmp_path):
    G, N = builtin("cyclic:2"), builtin("sym:3")
    aut = automorphism_group(N)
    L = Quasiaction.from_indices(G, aut, [0, int(aut.inner_index[3])])
    c = Cochain(2, L, [[0, 0], [0, 0]])
    code, out, _ = run(capsys, "extend", "--cochain", write(tmp_path, "c.json", cochain_to_json(c)),
                       "--fiber", "full")
    assert code == 3 and not json.loads(out)["associative"]


def test_split_counts(capsys):
    code, out, _ = run(capsys, "split", "--E", "sym:3", "--N", "cyclic:3")
    data = json.loads(out)
    assert code == 0 and [data["splittings"], data["classes"], data["H1"]] == [3, 1, 1]


def test_split_non_split_exit(capsys):
    code, _, _ = run(capsys, "split", "--E", "cyclic:4", "--N", "cyclic:2")
    assert code == 4


def test_split_semidirect(capsys):
    code, out, _ = run(capsys, "split", "--G", "cyclic:2", "--N", "cyclic:2")
    assert code == 0 and json.loads(out)["splittings"] == 2


@pytest.mark.parametrize("argv", [
    [],
    ["nope"],
    ["verify"],
    ["verify", "--suite", "nope"],
    ["verify", "--suite", "split", "--samples", "3", "--exhaustive"],
    ["census", "--G", "cyclic:2", "--N", "cyclic:2", "--p", "7"],
    ["census", "--G", "cyclic:2", "--N", "cyclic:2", "--p", "2", "--shards", "0"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 64


def test_unknown_group_is_bad_input(capsys):
    code, _, _ = run(capsys, "aut", "--group", "cyclic:99x")
    assert code == 65


def test_verify_suite_and_report(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--suite", "split", "--out", str(out))
    assert code == 0 and json.loads(out.read_text())["pass"]
    code, text, _ = run(capsys, "report", str(out), "--format", "tsv")
    assert code == 0 and text.startswith("suite\t")


def test_replay_reproduces_a_wrong_expectation(capsys, tmp_path):
    w = {"suite": "split", "E": "sym:3", "N": "cyclic:3", "expect": [9, 9, 9]}
    code, out, _ = run(capsys, "verify", "--replay", write(tmp_path, "w.json", w))
    assert code == 1 and json.loads(out)["reproduced"] == 1


def test_replay_of_a_passing_instance(capsys, tmp_path):
    w = {"suite": "split", "E": "sym:3", "N": "cyclic:3", "expect": [3, 1, 1]}
    code, out, _ = run(capsys, "verify", "--replay", write(tmp_path, "w.json", w))
    assert code == 0 and json.loads(out)["reproduced"] == 0


def test_replay_unknown_suite(capsys, tmp_path):
    code, _, _ = run(capsys, "verify", "--replay", write(tmp_path, "w.json", {"suite": "nope"}))
    assert code == 65


def test_failing_suite_exit_and_witness_replay(tmp_path):
    cfg = suites.SuiteConfig(G="sym:3", N="cyclic:3")
    rep = suites.run_suite("split", cfg)
    assert rep["pass"]
    bad = dict(rep["details"][0], suite="split", expect=[0, 0, 0])
    assert suites.replay(bad)["reproduced"]


@pytest.mark.parametrize("suite", ["boundary", "monstr", "oracle"])
def test_sharding_is_byte_identical(tmp_path, suite):
    texts = []
    for shards in (1, 4):
        out = tmp_path / f"{suite}{shards}.json"
        assert main(["verify", "--suite", suite, "--seed", "3", "--shards", str(shards),
                     "--out", str(out)]) == 0
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]
