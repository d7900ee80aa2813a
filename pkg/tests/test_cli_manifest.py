from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wgl import cli
from wgl.errors import SchemaError
from wgl.manifest import ExperimentManifest, derive_seed, write_atomic, write_csv, write_json

# ---------------------------------------------------------------- manifest


def test_manifest_round_trip():
    m = ExperimentManifest("constants", {"p": [4.0, 6.0], "N": [8, 16], "source": "C0"}, 7,
                           {"csv": "c.csv"}, {"slope": 0.1})
    assert ExperimentManifest.from_json(m.to_json()) == m
    assert json.loads(m.to_json())["version"] == m.version


@pytest.mark.parametrize("bad", [
    {"command": "nope"},
    {"command": "kernel", "seed": -1},
    {"command": "kernel", "seed": True},
    {"command": "kernel", "params": {"x": [[1]]}},
    {"command": "kernel", "tolerances": {"slope": "big"}},
    {"command": "kernel", "outputs": {"csv": 3}},
    {"command": "kernel", "extra": 1},
    {"params": {}},
])
def test_manifest_rejects(bad):
    with pytest.raises(SchemaError):
        ExperimentManifest.from_dict(bad)


def test_manifest_rejects_bad_json():
    with pytest.raises(SchemaError):
        ExperimentManifest.from_json("{not json")


@given(st.integers(0, 2**64 - 1), st.text(max_size=20))
def test_derive_seed_deterministic(root, task):
    a = derive_seed(root, task)
    assert a == derive_seed(root, task)
    assert 0 <= a < 2**64


def test_derive_seed_separates_tasks():
    seeds = {derive_seed(0, f"task{i}") for i in range(100)}
    assert len(seeds) == 100
    m = ExperimentManifest("nls", seed=3)
    assert m.task_seed("a") == derive_seed(3, "a")


def test_writers(tmp_path):
    p = write_atomic(tmp_path / "sub" / "x.txt", "hello")
    assert p.read_text() == "hello"
    assert not [f for f in p.parent.iterdir() if f.name.endswith(".tmp")]
    write_csv(tmp_path / "t.csv", [{"a": 1, "b": 0.1}, {"a": None, "b": 2.5}], ("a", "b"))
    assert (tmp_path / "t.csv").read_bytes() == b"a,b\r\n1,0.1\r\n,2.5\r\n"
    from fractions import Fraction
    write_json(tmp_path / "j.json", {"x": np.float64(1.5), "y": np.arange(2), "z": Fraction(1, 3)})
    assert json.loads((tmp_path / "j.json").read_text()) == {"x": 1.5, "y": [0, 1], "z": "1/3"}


# ---------------------------------------------------------------------- CLI


def test_cli_counting_selftest(tmp_path, capsys):
    assert cli.main(["counting", "--selftest", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 2
    for name in ("counting.csv", "counting.json", "counting.manifest.json"):
        assert (tmp_path / name).exists()


def test_cli_regime_error_exit_code(tmp_path, capsys):
    assert cli.main(["constants", "--p", "5", "--source", "C2", "--no-measure", "--out", str(tmp_path)]) == 2
    assert "C2" in capsys.readouterr().err


def test_cli_fraction_lists(tmp_path):
    assert cli.main(["constants", "--p", "7/2,18/5", "--T", "1,64", "--N", "16", "--no-measure",
                     "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "constants.csv").read_text().splitlines()
    assert len(rows) == 1 + 4
    assert ",C2," in rows[1]


def test_cli_deterministic_and_replayable(tmp_path, capsys):
    args = ["constants", "--p", "6", "--N", "4,8,16", "--seed", "5"]
    assert cli.main(args + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "constants.csv").read_bytes()
    assert a == (tmp_path / "b" / "constants.csv").read_bytes()
    man = tmp_path / "a" / "constants.manifest.json"
    assert cli.main(["constants", "--manifest", str(man), "--out", str(tmp_path / "c")]) == 0
    assert a == (tmp_path / "c" / "constants.csv").read_bytes()
    assert "BRACKET" in capsys.readouterr().out


def test_cli_manifest_mismatch(tmp_path):
    man = tmp_path / "m.json"
    man.write_text(ExperimentManifest("weyl").to_json())
    assert cli.main(["kernel", "--manifest", str(man)]) == 3


def test_cli_extremizers(tmp_path, capsys):
    assert cli.main(["extremizers", "--family", "phi1", "--p", "6", "--N", "2,4,8", "--out", str(tmp_path)]) == 0
    assert "PASS" in capsys.readouterr().out


def test_cli_version(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
    assert "wgl" in capsys.readouterr().out
