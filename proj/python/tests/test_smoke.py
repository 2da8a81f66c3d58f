import json
import os
import pathlib

import pytest

import lexsimp

DATA = pathlib.Path(os.environ.get("LEXSIMP_TEST_DATA_DIR", pathlib.Path(__file__).parents[2] / "tests" / "data"))


def test_combine_score():
    ranked = lexsimp.combine_score([["r", "s"], ["r"], ["r", "t"]])
    assert ranked[0] == ("r", 15.0)


def test_voting():
    assert lexsimp.majority_elements([["a", "b"], ["a", "c"], ["d"]], 2) == ["a"]
    assert lexsimp.vote_rank([["x", "y"], ["x"], ["y", "x"]], 2) == [("x", 3, 0), ("y", 2, 0)]


def test_invalid_threshold_raises():
    with pytest.raises(lexsimp.LexsimpError) as info:
        lexsimp.majority_elements([["a"]], 2)
    assert info.value.kind == "ConfigError"
    assert isinstance(info.value, ValueError)


def test_metrics():
    s = lexsimp.f1_scores(1, 1, 1, 1, 18)
    assert s["f1_20"] == pytest.approx(0.9)
    assert s["f1"] == 1.0


def test_prompt_helpers():
    assert lexsimp.parse_word_list("a; a ;B;b") == ["a", "B"]
    assert lexsimp.parse_yes_no("the answer is ##YES##.")
    assert lexsimp.mark_target("abc", 0, 1) == "<<a>>bc"
    p = lexsimp.render_prompt("Sg", {"sentence": "John composed these verses", "target": "composed"})
    assert "<<composed>>" in p["user_text"]
    assert p == lexsimp.render_prompt("Sg", {"sentence": "John composed these verses", "target": "composed"})


def test_alignment():
    edits, diagnostics = lexsimp.align_edits("He was located and fined", "He was found and fined")
    assert edits == [{"original_surface": "located", "span": (7, 14), "substitute": "found"}]
    assert diagnostics == []


def test_stats():
    s = lexsimp.dataset_stats(DATA / "stats_wikinews.jsonl")
    assert (s["NOI"], s["NOC"], s["min"], s["max"], s["avg"]) == (100, 412, 2, 13, "6.1")


def test_cli_run_matches_golden():
    code, out, err = lexsimp.run_cli(
        ["run", "--dataset", str(DATA / "casestudy_gold.jsonl"), "--provider", str(DATA / "colls_provider.json"),
         "--mode", "colls"])
    assert code == 0, err
    assert out == (DATA / "casestudy_colls.golden.jsonl").read_text()
    assert len([json.loads(line) for line in out.splitlines()]) == 5


def test_cli_usage_error():
    code, _, err = lexsimp.run_cli(["stats", "--bogus"])
    assert code == 2
    assert "--dataset is required" in err
