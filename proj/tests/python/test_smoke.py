import json
import os
from pathlib import Path

import pytest

import pacexp

DATA = Path(os.environ.get("PACEXP_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def zoo_config(query="true", seed=7):
    return {
        "model": "zoo_tree.json",
        "grammar": "zoo.g.json",
        "targetClass": "fish",
        "query": query,
        "distribution": {"product": ["bool"] * 16},
        "seed": seed,
    }


def test_version_and_rng():
    assert pacexp.__version__ == pacexp.version()
    assert pacexp.RNG_ALGORITHM.startswith("mt19937_64")


def test_suite_sizes():
    assert pacexp.test_suite_size(0.05, 0.05, 1) == 74
    assert pacexp.test_suite_size(0.05, 0.05, 2) == 88
    with pytest.raises(ValueError):
        pacexp.test_suite_size(0.0, 0.05, 1)


def test_formula_roundtrip():
    f = pacexp.parse_formula("(and (not breathes) fins)", 2, ["fins", "breathes"])
    assert f.render() == "(and x0 (not x1))"
    assert f.render_named(["fins", "breathes"]) == "(and fins (not breathes))"
    assert f.size() == 2
    assert f.evaluate([1.0, 0.0])
    assert not f.evaluate([1.0, 1.0])
    assert pacexp.parse_formula("false", 2) < f
    assert pacexp.parse_formula(str(f), 2) == f
    with pytest.raises(ValueError):
        pacexp.parse_formula("(or (< x2 0.5))", 3)


def test_model_classify():
    tree = pacexp.load_model(str(DATA / "zoo_tree.json"))
    assert tree.arity == 16
    assert tree.classes == ["other", "fish"]
    fish = [0.0] * 16
    fish[11] = 1.0
    assert tree.classify(fish) == 1
    fish[9] = 1.0
    assert tree.classify(fish) == 0
    again = pacexp.model_from_json(tree.to_json())
    assert again.classify(fish) == 0


def test_explain_table_row():
    report = pacexp.explain(zoo_config(), DATA)
    assert report["outcome"] == "explanation"
    assert report["certified"]
    assert report["explanationNamed"] == "(and fins (not breathes))"
    assert report["stats"]["size"] == 2
    none = pacexp.explain(zoo_config("(not fins)"), DATA)
    assert none["explanation"] == "false"


def test_replay_is_deterministic():
    report = pacexp.explain(zoo_config(seed=3), DATA)
    again = pacexp.replay(report)
    report.pop("timing")
    again.pop("timing")
    assert json.dumps(report, sort_keys=True) == json.dumps(again, sort_keys=True)
    tampered = dict(report, version="0.0.0-x")
    with pytest.raises(pacexp.ReplayError):
        pacexp.replay(tampered)


def test_synthesize():
    grammar = {"features": [{"index": 0, "kind": "bool"}, {"index": 1, "kind": "bool"}],
               "maxClauses": 2, "maxLiteralsPerClause": 2}
    assert pacexp.synthesize([], [], grammar, 2) == "false"
    assert pacexp.synthesize([[1, 0], [1, 1]], [True, False], grammar, 2) == "(not x1)"
    assert pacexp.synthesize([[1, 0], [1, 1], [0, 0]], [True, False, False], grammar, 2) == "(and x0 (not x1))"
    xor_pts = [[0, 0], [1, 1], [0, 1], [1, 0]]
    small = dict(grammar, maxClauses=1)
    assert pacexp.synthesize(xor_pts, [False, False, True, True], small, 2) is None
