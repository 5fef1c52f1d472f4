"""The deference-lab command line: reports, exit codes, determinism."""

import json
import subprocess
import sys

import pytest

from deference_lab import SearchExhaustedError
from deference_lab.cli import (
    EXIT_EXHAUSTED,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_TRUST_HOLDS,
    load_scenario,
    main,
    scenario_digest,
    scenario_to_document,
)
from deference_lab.sampling import ScoreEstimate

ANTI = {
    "worlds": ["w1", "w2"],
    "agent": [0.5, 0.5],
    "expert": [[0.0, 1.0], [1.0, 0.0]],
    "gambles": {"bet": [1.0, -1.0], "flat": [2.0, 2.0]},
}
TRUTH = {
    "worlds": ["w1", "w2"],
    "agent": [0.5, 0.5],
    "expert": [[1.0, 0.0], [0.0, 1.0]],
}
MIRROR_AGENT = {
    "worlds": ["w1", "w2"],
    "agent": [0.3, 0.7],
    "expert": [[0.3, 0.7], [0.3, 0.7]],
}


@pytest.fixture
def scenario_file(tmp_path):
    def write(document, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return str(path)

    return write


def run_cli(capsys, *argv) -> tuple[int, dict | None]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


class TestCheck:
    def test_anti_expert_reports_violation(self, capsys, scenario_file):
        code, report = run_cli(capsys, "check", scenario_file(ANTI))
        assert code == EXIT_OK
        assert report["global"]["holds"] is False
        assert report["global"]["witness_event"] == ["w2"]
        assert report["global"]["margin"] == pytest.approx(0.5, abs=1e-9)

    def test_truth_expert_holds(self, capsys, scenario_file):
        code, report = run_cli(capsys, "check", scenario_file(TRUTH))
        assert code == EXIT_OK
        assert report["global"]["holds"] is True

    def test_named_gamble_local_check(self, capsys, scenario_file):
        code, report = run_cli(capsys, "check", scenario_file(ANTI), "--gamble", "bet")
        assert code == EXIT_OK
        assert report["local"]["holds"] is False
        assert report["local"]["witness_event"] == ["w2"]
        assert report["local"]["witness_value"] == -1.0

    def test_missing_gamble_name(self, capsys, scenario_file):
        code = main(["check", scenario_file(ANTI), "--gamble", "nope"])
        assert code == EXIT_INPUT
        assert "nope" in capsys.readouterr().err

    def test_unnormalized_agent_row(self, capsys, scenario_file):
        bad = dict(ANTI, agent=[0.5, 0.4])
        code = main(["check", scenario_file(bad)])
        assert code == EXIT_INPUT
        assert "agent mass sums to 0.9" in capsys.readouterr().err

    def test_truncated_file(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"worlds": ["w1", "w2"], "agent": [0.5')
        code = main(["check", str(path)])
        assert code == EXIT_INPUT
        assert "line" in capsys.readouterr().err  # json diagnostics carry position

    def test_missing_file(self, capsys):
        assert main(["check", "/nonexistent/path.json"]) == EXIT_INPUT

    def test_expert_row_validation_names_the_row(self, capsys, scenario_file):
        bad = dict(TRUTH, expert=[[1.0, 0.0], [0.3, 0.3]])
        code = main(["check", scenario_file(bad)])
        assert code == EXIT_INPUT
        assert "expert row 2" in capsys.readouterr().err


class TestScore:
    def test_agent_as_expert_scores_exactly_zero(self, capsys, scenario_file):
        code, report = run_cli(
            capsys, "score", scenario_file(MIRROR_AGENT), "--samples", "5000"
        )
        assert code == EXIT_OK
        assert report["gap"]["value"] == 0.0
        assert report["gap"]["std_error"] == 0.0
        assert report["identity"]["value"] == 0.0

    def test_truth_expert_gap_negative(self, capsys, scenario_file):
        code, report = run_cli(
            capsys, "score", scenario_file(TRUTH), "--samples", "200000", "--seed", "3"
        )
        assert code == EXIT_OK
        gap = report["gap"]
        assert gap["value"] < -3 * gap["std_error"]

    def test_identity_subcommand(self, capsys, scenario_file):
        code, report = run_cli(
            capsys, "identity", scenario_file(ANTI), "--samples", "50000"
        )
        assert code == EXIT_OK
        assert report["identity"]["value"] > 0.0

    def test_rejects_bad_sigma(self, capsys, scenario_file):
        assert main(["score", scenario_file(ANTI), "--sigma", "0"]) == EXIT_INPUT
        assert main(["score", scenario_file(ANTI), "--samples", "0"]) == EXIT_INPUT


class TestAeTrust:
    def test_anti_expert_frequency(self, capsys, scenario_file):
        code, report = run_cli(
            capsys, "ae-trust", scenario_file(ANTI), "--samples", "100000"
        )
        assert code == EXIT_OK
        freq = report["violation_frequency"]
        assert freq["value"] == pytest.approx(0.5, abs=0.01)

    def test_truth_expert_frequency_zero(self, capsys, scenario_file):
        code, report = run_cli(
            capsys, "ae-trust", scenario_file(TRUTH), "--samples", "20000"
        )
        assert report["violation_frequency"]["value"] == 0.0


class TestCounterexample:
    def test_anti_expert_full_pipeline(self, capsys, scenario_file):
        code, report = run_cli(
            capsys, "counterexample", scenario_file(ANTI), "--samples", "50000"
        )
        assert code == EXIT_OK
        box = report["box"]
        assert box["orientation"] == "negative_side"
        assert box["event"] == ["w2"]
        assert box["delta"] > 0.0
        measure = report["measure"]
        assert measure["kind"] == "mixture"
        assert measure["bumps"][0]["weight"] == 0.5  # succeeds at the first rung
        assert measure["base_weight"] > 0.0
        gap = report["gap"]
        assert gap["value"] > 5 * gap["std_error"]

    def test_trust_holding_scenario_exits_3(self, capsys, scenario_file):
        code, report = run_cli(capsys, "counterexample", scenario_file(TRUTH))
        assert code == EXIT_TRUST_HOLDS
        assert report["verdict"]["holds"] is True
        assert "box" not in report

    def test_search_exhaustion_exits_4(self, capsys, scenario_file, monkeypatch):
        best = ScoreEstimate(value=-0.01, std_error=0.002, samples=100, seed=0)

        def exhausted(*args, **kwargs):
            raise SearchExhaustedError("no luck", best_weight=0.875, best_estimate=best)

        monkeypatch.setattr("deference_lab.cli.build_adversarial_measure", exhausted)
        code, report = run_cli(
            capsys, "counterexample", scenario_file(ANTI), "--samples", "100"
        )
        assert code == EXIT_EXHAUSTED
        assert report["best_weight"] == 0.875
        assert report["gap"]["value"] == -0.01
        assert "no luck" in report["error"]


class TestReportContracts:
    def test_round_trip_scenario(self, scenario_file):
        scenario, gambles = load_scenario(scenario_file(ANTI))
        document = scenario_to_document(scenario, gambles)
        path2 = scenario_file(document, name="roundtrip.json")
        again, gambles2 = load_scenario(path2)
        assert again.space == scenario.space
        assert again.agent == scenario.agent
        assert again.expert == scenario.expert
        assert gambles2 == gambles

    def test_digest_depends_on_labels_and_numbers(self, scenario_file):
        a, _ = load_scenario(scenario_file(ANTI))
        t, _ = load_scenario(scenario_file(TRUTH))
        assert scenario_digest(a) != scenario_digest(t)
        relabeled = dict(ANTI, worlds=["north", "south"])
        r, _ = load_scenario(scenario_file(relabeled, name="relabel.json"))
        assert scenario_digest(r) != scenario_digest(a)
        assert scenario_digest(a) == scenario_digest(load_scenario(scenario_file(ANTI))[0])

    def test_text_format(self, capsys, scenario_file):
        code = main(["check", scenario_file(ANTI), "--format", "text"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "holds" in out and "w2" in out
        assert "wall_clock_s" in out

    def test_json_mode_keeps_timing_out_of_the_document(self, capsys, scenario_file):
        code = main(["check", scenario_file(ANTI)])
        captured = capsys.readouterr()
        assert "wall_clock_s" not in captured.out
        assert "wall_clock_s" in captured.err

    def test_seventeen_digit_floats_round_trip(self, capsys, scenario_file):
        code, report = run_cli(
            capsys, "score", scenario_file(ANTI), "--samples", "10000", "--seed", "1"
        )
        from deference_lab import MeasureSpec, expected_gap

        scenario, _ = load_scenario(scenario_file(ANTI))
        direct = expected_gap(scenario, MeasureSpec.gaussian(1.0), 10_000, 1)
        assert report["gap"]["value"] == direct.value  # parsed back bit-identically


class TestByteIdentity:
    def test_repeated_runs_identical(self, scenario_file):
        path = scenario_file(ANTI)
        args = [sys.executable, "-m", "deference_lab.cli"]

        def run():
            return subprocess.run(
                args + ["score", path, "--samples", "20000", "--seed", "42"],
                capture_output=True,
                check=True,
            ).stdout

        first, second = run(), run()
        assert first == second

    def test_installed_entry_point(self, scenario_file):
        result = subprocess.run(
            ["deference-lab", "check", scenario_file(ANTI)], capture_output=True
        )
        assert result.returncode == EXIT_OK
        assert json.loads(result.stdout)["global"]["holds"] is False
