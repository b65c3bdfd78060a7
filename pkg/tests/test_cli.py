"""CLI contract tests: outputs, exit codes, determinism, comparison flow."""

import pytest

from platoonsim.cli import EXIT_CONFIG, EXIT_OK, main

FAST_SIM = "sim: {duration: 6.0, seed: 5}\n"


@pytest.fixture()
def short_scenario(tmp_path):
    path = tmp_path / "short.yaml"
    path.write_text("controllers: {lateral: pure_pursuit}\n" + FAST_SIM)
    return path


class TestRun:
    def test_writes_trace_and_metrics(self, tmp_path, short_scenario, capsys):
        out = tmp_path / "r1"
        code = main(["run", "--scenario", str(short_scenario), "--out", str(out)])
        assert code == EXIT_OK
        assert (out / "trace.csv").is_file()
        assert (out / "metrics.csv").is_file()

    def test_missing_scenario_exits_2(self, tmp_path):
        code = main(["run", "--scenario", str(tmp_path / "nope.yaml"), "--out", str(tmp_path)])
        assert code == EXIT_CONFIG

    def test_invalid_scenario_exits_2(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("sim: {duration: -3}\n")
        code = main(["run", "--scenario", str(bad), "--out", str(tmp_path / "o")])
        assert code == EXIT_CONFIG

    def test_seed_determinism(self, tmp_path, short_scenario):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--scenario", str(short_scenario), "--out", str(out1), "--seed", "7"]) == EXIT_OK
        assert main(["run", "--scenario", str(short_scenario), "--out", str(out2), "--seed", "7"]) == EXIT_OK
        assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()

    def test_builtin_scenario_by_name(self, tmp_path):
        out = tmp_path / "builtin"
        code = main(["run", "--scenario", "lane_change_pp", "--out", str(out), "--seed", "1"])
        assert code == EXIT_OK

    def test_lateral_override(self, tmp_path, short_scenario):
        out1, out2 = tmp_path / "pp", tmp_path / "st"
        main(["run", "--scenario", str(short_scenario), "--out", str(out1)])
        main(["run", "--scenario", str(short_scenario), "--out", str(out2), "--lateral", "stanley"])
        assert (out1 / "trace.csv").read_bytes() != (out2 / "trace.csv").read_bytes()


class TestCompare:
    def test_single_scenario_compare(self, tmp_path, short_scenario, capsys):
        out = tmp_path / "cmp"
        code = main(["compare", "--scenario", str(short_scenario), "--out", str(out)])
        assert code == EXIT_OK
        for name in (
            "trace_pp.csv",
            "trace_stanley.csv",
            "metrics_pp.csv",
            "metrics_stanley.csv",
            "comparison.csv",
            "comparison.txt",
        ):
            assert (out / name).is_file(), name
        assert "stanley" in capsys.readouterr().out

    def test_seed_mismatch_refused(self, tmp_path):
        a = tmp_path / "a.yaml"
        b = tmp_path / "b.yaml"
        a.write_text("controllers: {lateral: pure_pursuit}\nsim: {duration: 6.0, seed: 1}\n")
        b.write_text("controllers: {lateral: stanley}\nsim: {duration: 6.0, seed: 2}\n")
        code = main(
            ["compare", "--scenario", str(a), "--scenario-stanley", str(b), "--out", str(tmp_path / "o")]
        )
        assert code == EXIT_CONFIG

    def test_non_comparable_scenarios_refused(self, tmp_path):
        a = tmp_path / "a.yaml"
        b = tmp_path / "b.yaml"
        a.write_text("controllers: {lateral: pure_pursuit}\nsim: {duration: 6.0}\n")
        b.write_text("controllers: {lateral: stanley, d_goal: 0.7}\nsim: {duration: 6.0}\n")
        code = main(
            ["compare", "--scenario", str(a), "--scenario-stanley", str(b), "--out", str(tmp_path / "o")]
        )
        assert code == EXIT_CONFIG

    def test_reference_pair_compares(self, tmp_path):
        out = tmp_path / "ref"
        code = main(
            [
                "compare",
                "--scenario",
                "lane_change_pp",
                "--scenario-stanley",
                "lane_change_stanley",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        # The reconstructed experiment flags Stanley's larger follower-2
        # negative excursions for both signals.
        text = (out / "comparison.txt").read_text()
        assert "negative lateral-velocity excursion: stanley" in text
        assert "negative yaw excursion: stanley" in text

    def test_two_vehicle_compare(self, tmp_path):
        doc = tmp_path / "two.yaml"
        doc.write_text(
            "vehicles:\n"
            "  - {id: lead, chassis: ackermann, v: 0.2}\n"
            "  - {id: f1, chassis: differential, x: -0.5, v: 0.2}\n"
            + FAST_SIM
        )
        out = tmp_path / "o"
        assert main(["compare", "--scenario", str(doc), "--out", str(out)]) == EXIT_OK
        text = (out / "comparison.txt").read_text()
        assert "larger" not in text  # no follower-2 flag with a single follower


class TestAnalyze:
    def test_roundtrip_metrics(self, tmp_path, short_scenario):
        out = tmp_path / "r"
        main(["run", "--scenario", str(short_scenario), "--out", str(out)])
        direct = (out / "metrics.csv").read_text()
        (out / "metrics.csv").unlink()
        code = main(["analyze", "--scenario", str(short_scenario), "--out", str(out)])
        assert code == EXIT_OK
        recomputed = (out / "metrics.csv").read_text()
        direct_lines = direct.splitlines()
        recomputed_lines = recomputed.splitlines()
        assert direct_lines[0] == recomputed_lines[0]
        # The trace serializes floats at 9 significant digits, so recomputed
        # metrics agree to that precision rather than byte-for-byte.
        for line_a, line_b in zip(direct_lines[1:], recomputed_lines[1:]):
            a, b = line_a.split(","), line_b.split(",")
            assert a[:2] == b[:2]
            for cell_a, cell_b in zip(a[2:], b[2:]):
                if cell_a == "":
                    assert cell_b == ""
                else:
                    assert float(cell_b) == pytest.approx(float(cell_a), rel=1e-6, abs=1e-9)

    def test_missing_trace_exits_2(self, tmp_path, short_scenario):
        code = main(["analyze", "--scenario", str(short_scenario), "--out", str(tmp_path / "none")])
        assert code == EXIT_CONFIG


class TestParser:
    def test_help_lists_subcommands(self, capsys):
        with pytest.raises(SystemExit):
            main(["--help"])
        text = capsys.readouterr().out
        for sub in ("run", "compare", "analyze", "serve"):
            assert sub in text

    def test_bad_port_rejected(self):
        assert main(["serve", "--port", "70000"]) == EXIT_CONFIG


class TestServeErrors:
    def test_busy_port_exits_1(self):
        import socket

        from platoonsim.cli import EXIT_RUNTIME

        sock = socket.socket()
        sock.bind(("127.0.0.1", 0))
        sock.listen(1)
        port = sock.getsockname()[1]
        try:
            assert main(["serve", "--scenario", "teleop", "--port", str(port)]) == EXIT_RUNTIME
        finally:
            sock.close()
