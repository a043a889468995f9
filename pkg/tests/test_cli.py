"""Tests for cli.py -- Click CLI interface and exit codes."""

import json

import pytest
from click.testing import CliRunner
from loguru import logger

from cphase_witness.cli import THETA, main

PLUSPLUS = "n=2\n00 0.5 0\n01 0.5 0\n10 0.5 0\n11 0.5 0\n"
GHZ3 = "n=3\n000 0.70710678118654752 0\n111 0.70710678118654752 0\n"
ONE_PLUS = "n=2\n10 0.70710678118654752 0\n11 0.70710678118654752 0\n"


@pytest.fixture(autouse=True)
def _quiet_env(tmp_path, monkeypatch):
    """Run from an empty directory (no .env) with logging at ERROR."""
    for var in ("CZW_SEED", "CZW_MAX_WORKERS", "CZW_TAU_SEP", "CZW_VERBOSE", "CZW_LOG_DIR"):
        monkeypatch.delenv(var, raising=False)
    monkeypatch.setenv("CZW_LOG_LEVEL", "ERROR")
    monkeypatch.chdir(tmp_path)
    yield
    logger.remove()


@pytest.fixture
def state_file(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def json_lines(text):
    return [json.loads(line) for line in text.splitlines() if line.startswith("{")]


class TestHelpOutput:
    def test_help_flag(self):
        result = CliRunner().invoke(main, ["--help"])
        assert result.exit_code == 0
        for command in ("analyze", "fuzz", "lemma", "gen"):
            assert command in result.output


class TestThetaParsing:
    @pytest.mark.parametrize(
        "text,expected",
        [("pi", 3.141592653589793), ("-pi", -3.141592653589793), ("pi/2", 1.5707963267948966), ("1.0", 1.0)],
    )
    def test_forms(self, text, expected):
        assert THETA.convert(text, None, None) == pytest.approx(expected)


class TestAnalyze:
    def test_plusplus_holds_via_output(self, state_file):
        path = state_file("plusplus.state", PLUSPLUS)
        result = CliRunner().invoke(main, ["analyze", path, "--s", "1,2", "--theta", "pi"])
        assert result.exit_code == 0, result.output
        out = result.stdout
        assert "input: separable ({1}|{2})" in out
        assert "output: S-entangled (σ₂=0.7071)" in out
        assert "simplifies: none" in out
        assert "everywhere-entangled: input=no output=yes" in out
        assert "trichotomy: HOLDS via (2)" in out

    def test_first_line_is_summary(self, state_file):
        path = state_file("plusplus.state", PLUSPLUS)
        result = CliRunner().invoke(main, ["analyze", path, "--s", "1,2", "--theta", "pi"])
        assert result.exit_code == 0, result.output
        assert result.stdout.splitlines()[0] == (
            "input: separable ({1}|{2}); output: S-entangled (σ₂=0.7071); "
            "simplifies: none; trichotomy: HOLDS via (2)"
        )

    def test_ghz_holds_via_input(self, state_file):
        path = state_file("ghz3.state", GHZ3)
        result = CliRunner().invoke(main, ["analyze", path, "--s", "1,2", "--theta", "pi"])
        assert result.exit_code == 0, result.output
        assert "trichotomy: HOLDS via (1)" in result.stdout

    def test_reducing_state_prints_audit(self, state_file):
        path = state_file("oneplus.state", ONE_PLUS)
        result = CliRunner().invoke(main, ["analyze", path, "--s", "1,2"])
        assert result.exit_code == 0, result.output
        assert "simplifies: reduces (i=1)" in result.stdout
        assert "audit: case3: 1/1 test strings pass" in result.stdout
        assert "trichotomy: HOLDS via (3)" in result.stdout

    def test_json_report(self, state_file):
        path = state_file("plusplus.state", PLUSPLUS)
        result = CliRunner().invoke(main, ["--json", "analyze", path, "--s", "1,2"])
        assert result.exit_code == 0, result.output
        (payload,) = json_lines(result.stdout)
        assert payload["schema"] == 1
        assert payload["branches"] == [2]
        assert payload["input_cert"]["split"] == [[1], [2]]
        assert payload["output_cert"] is None
        assert payload["output_sigma2"] == pytest.approx(0.7071067811865476)

    def test_small_s_is_usage_error(self, state_file):
        path = state_file("plusplus.state", PLUSPLUS)
        result = CliRunner().invoke(main, ["analyze", path, "--s", "1"])
        assert result.exit_code == 64
        assert "|S| >= 2 required" in result.output

    def test_targets_outside_state_is_usage_error(self, state_file):
        path = state_file("plusplus.state", PLUSPLUS)
        result = CliRunner().invoke(main, ["analyze", path, "--s", "1,5"])
        assert result.exit_code == 64
        assert "outside the state's qubits 1..2" in result.output

    def test_bad_theta_is_usage_error(self, state_file):
        path = state_file("plusplus.state", PLUSPLUS)
        result = CliRunner().invoke(main, ["analyze", path, "--s", "1,2", "--theta", "banana"])
        assert result.exit_code == 64

    def test_identity_phase_is_data_error(self, state_file):
        path = state_file("plusplus.state", PLUSPLUS)
        result = CliRunner().invoke(main, ["analyze", path, "--s", "1,2", "--theta", "0"])
        assert result.exit_code == 65

    def test_missing_file(self, tmp_path):
        result = CliRunner().invoke(main, ["analyze", str(tmp_path / "nope.state"), "--s", "1,2"])
        assert result.exit_code == 66

    def test_malformed_file(self, state_file):
        path = state_file("dup.state", "n=2\n00 1 0\n00 0 1\n")
        result = CliRunner().invoke(main, ["analyze", path, "--s", "1,2"])
        assert result.exit_code == 65
        assert "duplicate" in result.output

    def test_unnormalized_needs_flag(self, state_file):
        path = state_file("loose.state", "n=2\n00 1 0\n11 1 0\n")
        assert CliRunner().invoke(main, ["analyze", path, "--s", "1,2"]).exit_code == 65
        result = CliRunner().invoke(main, ["analyze", path, "--s", "1,2", "--renormalize"])
        assert result.exit_code == 0, result.output

    @pytest.mark.parametrize(
        "text,flags",
        [
            ("n=2\n00 nan 0\n", []),
            ("n=2\n00 inf 0\n", []),
            ("n=1\n0 inf 0\n1 1 0\n", ["--renormalize"]),
        ],
    )
    def test_non_finite_amplitude_is_data_error(self, state_file, text, flags):
        path = state_file("bad.state", text)
        result = CliRunner().invoke(main, ["analyze", path, "--s", "1,2", *flags])
        assert result.exit_code == 65
        assert "not finite" in result.output

    def test_loose_tolerance_is_contradiction(self, state_file):
        path = state_file("plusplus.state", PLUSPLUS)
        result = CliRunner().invoke(main, ["analyze", path, "--s", "1,2", "--tol", "1.0"])
        assert result.exit_code == 2
        assert "no trichotomy branch holds" in result.output

    def test_missing_config_file(self, state_file, tmp_path):
        path = state_file("plusplus.state", PLUSPLUS)
        result = CliRunner().invoke(main, ["-c", str(tmp_path / "none.env"), "analyze", path, "--s", "1,2"])
        assert result.exit_code == 66

    def test_config_file_tolerance(self, state_file, tmp_path):
        path = state_file("plusplus.state", PLUSPLUS)
        env = tmp_path / "loose.env"
        env.write_text("CZW_TAU_SEP=1.0\n")
        result = CliRunner().invoke(main, ["-c", str(env), "analyze", path, "--s", "1,2"])
        assert result.exit_code == 2


class TestFuzz:
    def test_zero_trials(self):
        result = CliRunner().invoke(main, ["fuzz", "--trials", "0"])
        assert result.exit_code == 0, result.output
        assert "trials: 0" in result.stdout
        assert "failures: 0" in result.stdout

    def test_small_run(self):
        result = CliRunner().invoke(main, ["fuzz", "--n-max", "3", "--trials", "50", "--seed", "7"])
        assert result.exit_code == 0, result.output
        assert "failures: 0" in result.stdout

    def test_json_is_deterministic(self):
        args = ["--json", "fuzz", "--trials", "20", "--seed", "3", "--workers", "2"]
        first = json_lines(CliRunner().invoke(main, args).stdout)
        second = json_lines(CliRunner().invoke(main, args).stdout)
        assert len(first) == 21
        assert first[:-1] == second[:-1]
        for summary in (first[-1], second[-1]):
            summary.pop("wall_time")
        assert first[-1] == second[-1]
        assert first[-1]["kind"] == "summary"
        assert first[-1]["failures"] == []

    def test_family_filter(self):
        result = CliRunner().invoke(
            main, ["--json", "fuzz", "--trials", "10", "--family", "plus_all", "--n-max", "2"]
        )
        assert result.exit_code == 0, result.output
        summary = json_lines(result.stdout)[-1]
        assert summary["family_counts"] == {"plus_all": 10}

    def test_full_support_products(self):
        result = CliRunner().invoke(main, ["fuzz", "--trials", "20", "--full-support-products"])
        assert result.exit_code == 0, result.output
        assert "full-support products: 20/20 via (2) only" in result.stdout

    def test_inverted_range(self):
        result = CliRunner().invoke(main, ["fuzz", "--n-min", "4", "--n-max", "2"])
        assert result.exit_code == 64

    def test_n_below_two(self):
        result = CliRunner().invoke(main, ["fuzz", "--n-min", "1", "--trials", "1"])
        assert result.exit_code == 64


class TestLemma:
    def test_four_sets(self):
        result = CliRunner().invoke(main, ["lemma", "--arity", "4", "--eta-theta", "1.5708", "--count", "200"])
        assert result.exit_code == 0, result.output
        assert "violated: 0" in result.stdout

    def test_json(self):
        result = CliRunner().invoke(main, ["--json", "lemma", "--arity", "2", "--count", "10", "--seed", "1"])
        (payload,) = json_lines(result.stdout)
        assert payload["arity"] == "2sets"
        assert payload["count"] == 10
        assert payload["violated"] == 0

    def test_unsupported_arity(self):
        result = CliRunner().invoke(main, ["lemma", "--arity", "5"])
        assert result.exit_code == 64

    def test_identity_phase(self):
        result = CliRunner().invoke(main, ["lemma", "--arity", "3", "--eta-theta", "0"])
        assert result.exit_code == 64


class TestGen:
    def test_plus(self):
        result = CliRunner().invoke(main, ["gen", "--family", "plus", "--n", "3"])
        assert result.exit_code == 0, result.output
        lines = result.stdout.splitlines()
        assert lines[0] == "n=3"
        assert len(lines) == 9
        assert all(line.split()[1].startswith("0.35355") for line in lines[1:])

    def test_seeded_haar_is_reproducible(self):
        args = ["gen", "--family", "haar", "--n", "2", "--seed", "5"]
        assert CliRunner().invoke(main, args).stdout == CliRunner().invoke(main, args).stdout

    def test_output_file_feeds_analyze(self, tmp_path):
        path = tmp_path / "basis.state"
        result = CliRunner().invoke(main, ["gen", "--family", "basis", "--n", "2", "--bits", "11", "-o", str(path)])
        assert result.exit_code == 0, result.output
        analyzed = CliRunner().invoke(main, ["analyze", str(path), "--s", "1,2"])
        assert analyzed.exit_code == 0, analyzed.output
        assert "simplifies: reduces (i=1)" in analyzed.stdout

    def test_forced_fixed_point(self):
        result = CliRunner().invoke(main, ["gen", "--family", "forced_fixed_point", "--n", "2", "--s", "1,2"])
        assert result.exit_code == 0, result.output
        assert not any(line.startswith("11 ") for line in result.stdout.splitlines())

    def test_bad_bits(self):
        result = CliRunner().invoke(main, ["gen", "--family", "basis", "--n", "2", "--bits", "101"])
        assert result.exit_code == 65
