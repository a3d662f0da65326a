import io
import json
import subprocess
import sys

import pytest

from mdpq.cli import main

NET = "builtin:network"


def run(*argv):
    out = io.StringIO()
    status = main(list(argv), out=out)
    text = out.getvalue()
    return status, text


def run_json(*argv):
    status, text = run(*argv)
    assert text.count("\n") == 1
    doc = json.loads(text)
    assert doc["schema_version"] == 1
    return status, doc


@pytest.fixture
def gb_policy(tmp_path):
    path = tmp_path / "gb.json"
    path.write_text('{"A": {"gamma": "1"}, "B": {"beta": "1"}}')
    return str(path)


def test_validate(tmp_path):
    status, doc = run_json("validate", "--model", NET, "--predictor", "B", "--effect", "lost")
    assert status == 0 and doc["ok"]
    status, doc = run_json("validate", "--model", NET, "--predictor", "B", "--effect", "A")
    assert status == 1 and any("not terminal" in p for p in doc["problems"])
    status, doc = run_json("validate", "--model", str(tmp_path / "missing.json"))
    assert status == 2 and "error" in doc
    bad = tmp_path / "bad.json"
    bad.write_text('{"states": ["a"], "init": ')
    status, doc = run_json("validate", "--model", str(bad))
    assert status == 2 and "line" in doc["error"]


def test_measure_single_policy(gb_policy):
    status, doc = run_json("measure", "--model", NET, "--measure", "precision", "--predictor", "B", "--effect", "lost", "--policy", gb_policy)
    assert status == 0 and doc["value"] == "1/2"
    status, doc = run_json("measure", "--model", NET, "--measure", "mcc", "--predictor", "B", "--effect", "lost1,lost2,lost3", "--policy", gb_policy)
    assert doc["value"] == "1/4"


def test_measure_average():
    status, doc = run_json("measure", "--model", NET, "--measure", "fscore", "--predictor", "A", "--effect", "lost", "--samples", "20000", "--seed", "7")
    assert status == 0
    assert abs(doc["estimate"] - 0.43) < 0.01
    assert doc["seed"] == 7 and doc["samples"] == 20000 and doc["skipped"] == 0


def test_measure_markov_chain(tmp_path):
    chain = tmp_path / "chain.json"
    chain.write_text(json.dumps({
        "states": ["i", "c", "e", "n"],
        "init": "i",
        "transitions": [
            {"from": "i", "action": "go", "to": {"c": "1/2", "n": "1/2"}},
            {"from": "c", "action": "go", "to": {"e": "3/4", "n": "1/4"}},
        ],
    }))
    status, doc = run_json("measure", "--model", str(chain), "--predictor", "c", "--effect", "e", "--samples", "10")
    assert status == 0 and doc["stderr"] == 0


def test_measure_undefined_everywhere(tmp_path):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({
        "states": ["i", "c", "e", "n"],
        "init": "i",
        "transitions": [{"from": "i", "action": "go", "to": {"n": "1"}}, {"from": "c", "action": "go", "to": {"e": "1"}}],
    }))
    status, doc = run_json("measure", "--model", str(m), "--measure", "precision", "--predictor", "c", "--effect", "e", "--samples", "10")
    assert status == 1 and "undefined" in doc["error"]


def test_causal_volume():
    status, doc = run_json("causal-volume", "--model", NET, "--mode", "gpr", "--predictor", "B", "--effect", "lost", "--samples", "10000")
    assert status == 0 and doc["estimate"] == 1.0


def test_check():
    status, doc = run_json("check", "--model", NET, "--mode", "spr", "--predictor", "A", "--effect", "lost")
    assert status == 0 and doc["exists"] is False
    status, doc = run_json("check", "--model", NET, "--mode", "spr", "--predictor", "B", "--effect", "lost")
    assert doc["exists"] is True and doc["certificate"]["holds"] is True
    status, doc = run_json("check", "--model", NET, "--mode", "gpr", "--predictor", "B", "--effect", "lost", "--starts", "2", "--enumeration-cap", "4")
    assert doc["outcome"] == "found"


def test_transform():
    status, doc = run_json("transform", "--model", NET, "--kind", "canonical", "--predictor", "B", "--effect", "lost")
    assert status == 0
    model = doc["model"]
    sources = {t["from"] for t in model["transitions"]}
    terminals = [s for s in model["states"] if s not in sources]
    assert sorted(terminals) == ["__FN", "__FP", "__TN", "__TP"]
    assert doc["sidecar"]["p_star"] == "1"
    status, doc = run_json("transform", "--model", NET, "--kind", "star", "--predictor", "A", "--effect", "lost")
    assert doc["sidecar"]["p"] == "1/2"
    status, doc = run_json("transform", "--model", NET, "--kind", "star", "--predictor", "A", "--effect", "lost", "--p", "3/4")
    assert status == 1
    status, doc = run_json("transform", "--model", NET, "--kind", "two-copy", "--predictor", "A", "--effect", "lost")
    assert "A@0" in doc["model"]["states"] and doc["sidecar"]["kind"] == "two-copy"


def test_confusion(gb_policy):
    status, doc = run_json("confusion", "--model", NET, "--predictor", "B", "--effect", "lost", "--policy", gb_policy)
    assert doc["confusion"] == {"tp": "1/6", "fp": "1/6", "fn": "1/6", "tn": "1/2"}
    assert doc["measures"]["mcc"] == "1/4"
    status, text = run("confusion", "--model", NET, "--predictor", "B", "--effect", "lost", "--policy", gb_policy, "--output", "text")
    assert status == 0 and "confusion:" in text


def test_bad_policy_file(tmp_path):
    p = tmp_path / "p.json"
    p.write_text('{"A": {"beta": "1"}}')
    status, doc = run_json("confusion", "--model", NET, "--predictor", "B", "--effect", "lost", "--policy", str(p))
    assert status == 2
    status, doc = run_json("confusion", "--model", NET, "--predictor", "B", "--effect", "lost", "--policy", str(tmp_path / "none.json"))
    assert status == 2


def test_argument_errors():
    status, _ = run("measure", "--model", NET, "--predictor", "B", "--effect", "lost", "--samples", "0")
    assert status == 2
    status, _ = run("measure", "--model", NET, "--predictor", "B", "--effect", "lost", "--seed", str(2**64))
    assert status == 2
    status, doc = run_json("measure", "--model", NET, "--predictor", "nowhere", "--effect", "lost")
    assert status == 1


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mdpq", "validate", "--model", NET],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["ok"]
