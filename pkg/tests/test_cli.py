import json

import pytest

from trace_convexity import cli
from trace_convexity.cli import (
    EXIT_INTERNAL,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    SEED_ENV,
    main,
    parse_construction_args,
    resolve_seed,
)
from trace_convexity.errors import DomainError
from trace_convexity.session import RunManifest

SCAN_ARGS = [
    "scan",
    "--p-values",
    "1/2",
    "--q-values",
    "1/2",
    "--s-values",
    "1/2,1",
    "--trials",
    "20",
    "--workers",
    "1",
]


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


class TestClassify:
    def test_trace(self, capsys):
        assert main(["classify", "--p", "2", "--q=-1/2", "--s", "2/3"]) == EXIT_OK
        payload = _json_out(capsys)
        assert payload["command"] == "classify"
        assert payload["report"]["convexity"]["status"] == "proven_convex"
        assert payload["report"]["params"] == {"p": "2", "q": "-1/2", "s": "2/3"}

    def test_operator(self, capsys):
        assert main(["classify", "--map", "operator", "--p=-1", "--q", "2"]) == EXIT_OK
        assert _json_out(capsys)["report"]["convexity"]["status"] == "proven_convex"

    @pytest.mark.parametrize(
        "argv",
        [
            ["classify", "--p", "0", "--q", "1", "--s", "1"],
            ["classify", "--p", "1", "--q", "1"],
            ["classify", "--p", "1", "--q", "1", "--s", "x"],
            ["classify", "--p", "1"],
            ["frobnicate"],
        ],
    )
    def test_usage_errors(self, argv):
        assert main(argv) == EXIT_USAGE


class TestScan:
    def test_csv_to_stdout(self, capsys):
        assert main(SCAN_ARGS) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "# trace-convexity region-scan v1"
        assert lines[1].startswith("index,p,q,s,")
        assert len(lines) == 4

    def test_invalid_trials(self):
        assert main(SCAN_ARGS + ["--trials", "0"]) == EXIT_USAGE

    def test_invalid_workers(self):
        assert main(SCAN_ARGS + ["--workers", "0"]) == EXIT_USAGE

    def test_unwritable_output(self, tmp_path):
        assert main(SCAN_ARGS + ["--out", str(tmp_path / "missing" / "scan.csv")]) == EXIT_IO

    def test_writes_manifest(self, tmp_path):
        out = tmp_path / "scan.csv"
        assert main(SCAN_ARGS + ["--seed", "5", "--out", str(out)]) == EXIT_OK
        manifest = RunManifest.load(tmp_path / "scan.csv.manifest.json")
        assert manifest.command == "scan"
        assert manifest.seed == 5
        assert manifest.outputs == [str(out), str(tmp_path / "scan.csv.witnesses.json")]

    def test_replay_is_byte_identical(self, tmp_path):
        first = tmp_path / "first.csv"
        second = tmp_path / "second.csv"
        assert main(SCAN_ARGS + ["--seed", "17", "--out", str(first)]) == EXIT_OK
        manifest = str(tmp_path / "first.csv.manifest.json")
        assert main(["replay", manifest, "--out", str(second)]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()
        assert (tmp_path / "first.csv.witnesses.json").read_bytes() == (
            tmp_path / "second.csv.witnesses.json"
        ).read_bytes()

    def test_replay_ignores_seed_environment(self, tmp_path, monkeypatch):
        first = tmp_path / "first.csv"
        second = tmp_path / "second.csv"
        assert main(SCAN_ARGS + ["--out", str(first)]) == EXIT_OK
        monkeypatch.setenv(SEED_ENV, "99")
        assert main(["replay", str(tmp_path / "first.csv.manifest.json"), "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_config_file(self, tmp_path, capsys):
        config = tmp_path / "probe.json"
        config.write_text(json.dumps({"trials": 10, "dim": 2, "seed": 4}))
        argv = SCAN_ARGS[:-4] + ["--workers", "1", "--format", "json", "--config-file", str(config)]
        assert main(argv) == EXIT_OK
        report = _json_out(capsys)["report"]
        assert report["config"]["trials"] == 10
        assert report["config"]["seed"] == 4


class TestProbe:
    def test_trace_probe(self, capsys):
        argv = ["probe", "--p", "1/2", "--q", "1/2", "--s", "1", "--trials", "30", "--workers", "1"]
        assert main(argv) == EXIT_OK
        report = _json_out(capsys)["report"]
        assert report["outcome"] == "witness"
        assert report["verdict"]["violated"]

    def test_missing_exponent(self):
        assert main(["probe", "--kind", "operator", "--p", "2"]) == EXIT_USAGE


class TestCounterexample:
    def test_mid_power(self, capsys):
        assert main(["counterexample", "mid-power", "--r", "0.5"]) == EXIT_OK
        report = _json_out(capsys)["report"]
        assert report["construction"] == "mid-power"
        assert report["result"]["margin"] < 0.0

    def test_negative_fraction(self, capsys):
        assert main(["counterexample", "negative-power", "--r=-1/2"]) == EXIT_OK
        assert _json_out(capsys)["report"]["result"]["margin"] < 0.0

    def test_construction_aliases(self, capsys):
        assert main(["counterexample", "lemma33-mid", "--r", "0.5"]) == EXIT_OK
        report = _json_out(capsys)["report"]
        assert report["construction"] == "lemma33-mid"
        assert report["result"]["name"] == "mid-power"
        assert report["result"]["margin"] < 0.0
        assert main(["counterexample", "lemma33-neg", "--r=-1"]) == EXIT_OK
        assert _json_out(capsys)["report"]["result"]["margin"] < 0.0

    def test_homogeneity_default_refutes(self, capsys):
        assert main(["counterexample", "homogeneity", "--p", "0.5", "--q", "0.5"]) == EXIT_OK
        assert _json_out(capsys)["report"]["result"]["margin"] < 0.0

    def test_list(self, capsys):
        assert main(["counterexample", "--list"]) == EXIT_OK
        names = [c["name"] for c in _json_out(capsys)["report"]]
        assert "rank-one" in names

    @pytest.mark.parametrize(
        "argv",
        [
            ["counterexample", "bogus"],
            ["counterexample"],
            ["counterexample", "mid-power", "--r", "2"],
            ["counterexample", "mid-power", "--r"],
            ["counterexample", "mid-power", "--r", "0.5", "--format", "csv"],
        ],
    )
    def test_usage_errors(self, argv):
        assert main(argv) == EXIT_USAGE

    def test_parse_construction_args(self):
        assert parse_construction_args(["--r", "0.5", "--t=1e-6", "--env-dim", "3"]) == {
            "r": "0.5",
            "t": "1e-6",
            "env_dim": "3",
        }
        with pytest.raises(DomainError):
            parse_construction_args(["r", "0.5"])


def test_variational(capsys):
    argv = ["variational", "--s", "2", "--trials", "2", "--steps", "20", "--workers", "1"]
    assert main(argv) == EXIT_OK
    report = _json_out(capsys)["report"]
    assert report["mode"] == "sup"
    assert report["samples"] == 2
    assert main(["variational", "--s", "1"]) == EXIT_USAGE


def test_dpi(capsys):
    argv = [
        "dpi",
        "--alpha-values",
        "1.5,2",
        "--trials",
        "3",
        "--dims",
        "2",
        "--workers",
        "1",
    ]
    assert main(argv) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "# trace-convexity dpi-scan v1"
    assert lines[2].startswith("0,1.5,0.75,true,3,0,")


class TestSeedResolution:
    def test_precedence(self):
        assert resolve_seed(5, 7, {SEED_ENV: "9"}) == 9
        assert resolve_seed(5, 7, {SEED_ENV: " "}) == 5
        assert resolve_seed(None, 7, {}) == 7
        assert resolve_seed(None, None, {}) == 0

    @pytest.mark.parametrize(
        "cli_seed, environ", [(None, {SEED_ENV: "abc"}), (2**64, {}), (-1, {})]
    )
    def test_invalid(self, cli_seed, environ):
        with pytest.raises(DomainError):
            resolve_seed(cli_seed, None, environ)

    def test_environment_reaches_manifest(self, tmp_path, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "11")
        out = tmp_path / "classify.json"
        assert main(["classify", "--p", "1", "--q", "1", "--s", "1", "--out", str(out)]) == 0
        assert RunManifest.load(tmp_path / "classify.json.manifest.json").seed == 11


def test_unexpected_failure_is_not_a_violation(monkeypatch, capsys):
    def broken(args, session, seed):
        raise RuntimeError("unexpected")

    monkeypatch.setattr(cli, "cmd_counterexample", broken)
    assert main(["counterexample", "mid-power", "--r", "0.5"]) == EXIT_INTERNAL
    assert "Internal error: unexpected" in capsys.readouterr().err
