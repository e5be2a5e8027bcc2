#!/usr/bin/env python3
"""
Tests for the command line surface, the verification runner and settings
"""

import io
import json

import pytest

import src.manifolds as manifolds
import src.verification as verification
from src.cli import run
from src.errors import ConfigurationError
from src.settings import Settings, load_settings
from src.symmetric import ChernCombo, IdentityCheck
from src.verification import IdentityVerifier, TargetResult


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("GENERA_CONFIG", "GENERA_LOG_LEVEL", "GENERA_MAX_N", "GENERA_WORKERS"):
        monkeypatch.delenv(name, raising=False)


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_table_text_output():
    code, text = call("table", "--kind", "chi-y", "--n", "1")
    assert code == 0
    assert "row0: 1/2·c1" in text.splitlines()
    assert "row1: -1/2·c1" in text.splitlines()


def test_table_json_round_trips():
    code, text = call("table", "--kind", "a-y", "--n", "2", "--json")
    assert code == 0
    document = json.loads(text)
    assert document["kind"] == "a-y"
    rows = [ChernCombo.from_dict(row) for row in document["rows"]]
    assert rows[0] == ChernCombo(2, {(1, 1): "-1/24", (2,): "1/12"})


def test_expand_output():
    code, text = call("expand", "--kind", "chi-y", "--n", "1", "--order", "1")
    assert code == 0
    assert "z^0: c1" in text
    assert "z^1: -1/2·c1" in text


def test_divisibility_output():
    code, text = call("divisibility", "--model", "cp:3")
    assert code == 0
    assert text.strip() == "value=160 divisible=true quotient=20"


def test_divisibility_of_non_spin_model_exits_zero():
    code, text = call("divisibility", "--model", "cp4", "--json")
    assert code == 0
    assert json.loads(text)["remainder"] == 6


def test_divisibility_violation_exits_two(monkeypatch):
    monkeypatch.setattr(manifolds, "is_spin", lambda m: True)
    raw = json.dumps({"weight": 2, "terms": [{"partition": [1, 1], "coeff": "1"},
                                             {"partition": [2], "coeff": "1"}]})
    code, text = call("divisibility", "--model", raw)
    assert code == 2
    assert text.strip() == "value=3 divisible=false remainder=3"


def test_manifold_text_output():
    code, text = call("manifold", "--model", "cp:2", "--kind", "chi-y")
    assert code == 0
    assert "CP^2" in text
    assert "c1^2" in text
    assert "libgober-wood number: 1" in text


def test_manifold_json_output():
    code, text = call("manifold", "--model", "prod:cp1,cp1", "--kind", "l-y", "--json")
    assert code == 0
    document = json.loads(text)
    assert document["index_table"]["values"] == ["0", "0", "16"]
    assert document["spin"] is True


def test_verify_prints_one_line_per_dimension():
    code, text = call("verify", "--target", "libgober-wood", "--n-min", "2", "--n-max", "5")
    assert code == 0
    lines = text.splitlines()
    assert len(lines) == 4
    assert all(line.startswith("PASS libgober-wood") for line in lines)
    assert lines[0] == "PASS libgober-wood n=2 (2/2 identities)"


def test_verify_json_output():
    code, text = call("verify", "--target", "lemma23", "--n-min", "2", "--n-max", "3", "--json")
    assert code == 0
    entries = json.loads(text)
    assert len(entries) == 12
    assert all(entry["pass"] for entry in entries)
    assert entries[0]["identity"] == "h1"


def test_verify_failure_exits_two(monkeypatch):
    def broken(n, max_n):
        return [IdentityCheck.compare(n, "broken", ChernCombo(n, {(n,): 1}), ChernCombo(n))]

    monkeypatch.setitem(verification.VERIFIERS, "lemma23", broken)
    code, text = call("verify", "--target", "lemma23", "--n-min", "2", "--n-max", "2")
    assert code == 2
    assert text.startswith("FAIL lemma23 n=2 (0/1 identities)")
    assert "broken: lhs=c2 rhs=0" in text


@pytest.mark.parametrize("argv", [
    [],
    ["--bogus"],
    ["table", "--kind", "todd", "--n", "2"],
    ["table", "--kind", "chi-y"],
    ["table", "--kind", "chi-y", "--n", "two"],
    ["table", "--kind", "chi-y", "--n", "11"],
    ["table", "--kind", "chi-y", "--n", "0"],
    ["expand", "--kind", "a-y", "--n", "2", "--order", "-1"],
    ["manifold", "--model", "torus", "--kind", "chi-y"],
    ["divisibility", "--model", "cp:1"],
    ["verify", "--target", "theorem-mr", "--n-min", "1", "--n-max", "2"],
    ["verify", "--n-min", "4", "--n-max", "3"],
])
def test_malformed_input_exits_one(argv, capsys):
    out = io.StringIO()
    assert run(argv, out) == 1
    assert out.getvalue() == ""
    assert capsys.readouterr().err


def test_config_file_limits_dimension(tmp_path):
    config = tmp_path / "config.yaml"
    config.write_text("limits:\n  max_n: 2\n")
    code, _ = call("--config", str(config), "table", "--kind", "chi-y", "--n", "3")
    assert code == 1
    code, _ = call("--config", str(config), "table", "--kind", "chi-y", "--n", "3", "--max-n", "3")
    assert code == 0


def test_unknown_log_level_exits_one():
    code, _ = call("--log-level", "chatty", "table", "--kind", "chi-y", "--n", "1")
    assert code == 1


def test_load_settings_reads_yaml(tmp_path):
    config = tmp_path / "config.yaml"
    config.write_text("verify:\n  n_min: 3\n  n_max: 4\n  workers: 2\nlogging:\n  level: debug\n")
    settings = load_settings(str(config))
    assert settings.verify_n_min == 3
    assert settings.verify_n_max == 4
    assert settings.workers == 2
    assert settings.log_level == "debug"
    assert settings.max_n == 10


def test_missing_config_file_means_defaults(tmp_path):
    assert load_settings(str(tmp_path / "absent.yaml")) == Settings()


def test_environment_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv("GENERA_WORKERS", "3")
    monkeypatch.setenv("GENERA_MAX_N", "6")
    settings = load_settings(str(tmp_path / "absent.yaml"))
    assert settings.workers == 3
    assert settings.max_n == 6


@pytest.mark.parametrize("text", [
    "limits: [1, 2",
    "- just\n- a list\n",
    "verify:\n  workers: 0\n",
    "verify:\n  n_min: 5\n  n_max: 4\n",
    "limits:\n  max_n: lots\n",
])
def test_bad_config_raises(tmp_path, text):
    config = tmp_path / "config.yaml"
    config.write_text(text)
    with pytest.raises(ConfigurationError):
        load_settings(str(config))


def test_verifier_orders_results_by_dimension():
    verifier = IdentityVerifier(2, 3)
    results = verifier.run("all")
    assert [(r.n, r.target) for r in results[:2]] == [(2, "lemma23"), (2, "theorem-mr")]
    assert [r.n for r in results] == sorted(r.n for r in results)
    assert verifier.passed
    frame = verifier.summary_frame()
    assert list(frame.columns) == ["n", "target", "passed", "failed"]
    assert frame["failed"].sum() == 0


def test_parallel_run_matches_sequential():
    sequential = IdentityVerifier(2, 4).run("lemma23")
    parallel = IdentityVerifier(2, 4, workers=2).run("lemma23")
    assert sequential == parallel


def test_verifier_rejects_bad_arguments():
    with pytest.raises(ValueError):
        IdentityVerifier(3, 2)
    with pytest.raises(ValueError):
        IdentityVerifier(2, 3, workers=0)
    with pytest.raises(ValueError):
        IdentityVerifier(2, 3).run("everything")
    with pytest.raises(ValueError):
        IdentityVerifier(1, 2).run("lemma23")


def test_binomial_transform_target_starts_at_one():
    results = IdentityVerifier(1, 2).run("binomial-transform")
    assert [r.n for r in results] == [1, 2]
    assert len(results[0].checks) == 3 * 2
    assert all(r.passed for r in results)


def test_target_result_format():
    check = IdentityCheck.compare(2, "h1", ChernCombo(2), ChernCombo(2))
    assert TargetResult("lemma23", 2, (check,)).format() == "PASS lemma23 n=2 (1/1 identities)"
