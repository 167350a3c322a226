import numpy as np

from esirrt import OccupancyGrid, save_pgm
from esirrt.cli import main


def write_map(tmp_path, free, name="map.pgm"):
    path = tmp_path / name
    path.write_bytes(save_pgm(OccupancyGrid(free)))
    return str(path)


def open_map(tmp_path, size=30):
    return write_map(tmp_path, np.ones((size, size), dtype=bool))


class TestExitCodes:
    def test_plan_success(self, tmp_path, capsys):
        rc = main(
            [
                "plan",
                "--map", open_map(tmp_path),
                "--start", "3.5,3.5",
                "--goal", "26.5,26.5",
                "--planner", "esirrt",
                "--iters", "50",
            ]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "initial_cost=" in out and "final_cost=" in out

    def test_invalid_map_bytes(self, tmp_path):
        bad = tmp_path / "bad.pgm"
        bad.write_bytes(b"not a pgm")
        rc = main(
            ["plan", "--map", str(bad), "--start", "1,1", "--goal", "2,2"]
        )
        assert rc == 1

    def test_malformed_point(self, tmp_path):
        rc = main(
            ["plan", "--map", open_map(tmp_path), "--start", "oops", "--goal", "2,2"]
        )
        assert rc == 1

    def test_disconnected_is_planning_failure(self, tmp_path):
        free = np.ones((20, 20), dtype=bool)
        free[:, 10] = False
        rc = main(
            [
                "plan",
                "--map", write_map(tmp_path, free),
                "--start", "3.5,3.5",
                "--goal", "16.5,16.5",
                "--planner", "sirrt",
            ]
        )
        assert rc == 2

    def test_missing_map_file_is_io_error(self, tmp_path):
        rc = main(
            [
                "plan",
                "--map", str(tmp_path / "nope.pgm"),
                "--start", "1,1",
                "--goal", "2,2",
            ]
        )
        assert rc == 3

    def test_unwritable_output_is_io_error(self, tmp_path):
        rc = main(
            [
                "plan",
                "--map", open_map(tmp_path),
                "--start", "3.5,3.5",
                "--goal", "26.5,26.5",
                "--iters", "10",
                "--csv", str(tmp_path / "no" / "such" / "dir" / "t.csv"),
            ]
        )
        assert rc == 3


class TestPlanOutputs:
    def test_csv_and_svg_written(self, tmp_path):
        csv = tmp_path / "trace.csv"
        svg = tmp_path / "plan.svg"
        rc = main(
            [
                "plan",
                "--map", "open50",
                "--start", "5.5,5.5",
                "--goal", "44.5,44.5",
                "--iters", "30",
                "--csv", str(csv),
                "--svg", str(svg),
            ]
        )
        assert rc == 0
        lines = csv.read_text().splitlines()
        assert lines[0] == "iteration,best_cost"
        assert len(lines) == 31
        assert svg.read_text().startswith("<svg")

    def test_bundled_map_names(self, tmp_path):
        rc = main(
            [
                "plan",
                "--map", "narrow_passage",
                "--start", "15.5,30.5",
                "--goal", "85.5,30.5",
                "--planner", "sirrt",
                "--iters", "0",
            ]
        )
        assert rc == 0


class TestBenchCommand:
    def test_bench_writes_all_csvs(self, tmp_path):
        out = tmp_path / "bench"
        rc = main(
            [
                "bench",
                "--map", "open50",
                "--start", "5.5,5.5",
                "--goal", "44.5,44.5",
                "--planners", "sirrt,esirrt",
                "--trials", "2",
                "--iters", "5",
                "--out-dir", str(out),
            ]
        )
        assert rc == 0
        assert (out / "trials.csv").exists()
        assert (out / "stats.csv").exists()
        assert (out / "trace_sirrt_0.csv").exists()
        assert (out / "trace_esirrt_1.csv").exists()


class TestSkeletonCommand:
    def test_renders_skeleton_and_corners(self, tmp_path, capsys):
        out = tmp_path / "skel.svg"
        rc = main(["skeleton", "--map", "multi_room", "--out", str(out)])
        assert rc == 0
        svg = out.read_text()
        assert '<g class="skeleton">' in svg
        assert '<g class="corners">' in svg
        assert "skeleton pixels=" in capsys.readouterr().out


class TestConfigFile:
    def test_config_applies_and_cli_overrides(self, tmp_path, capsys):
        cfg = tmp_path / "p.cfg"
        cfg.write_text("iters = 12\nseed = 4  # comment\neta = 8\n")
        rc = main(
            [
                "plan",
                "--map", "open50",
                "--start", "5.5,5.5",
                "--goal", "44.5,44.5",
                "--config", str(cfg),
                "--csv", str(tmp_path / "t.csv"),
            ]
        )
        assert rc == 0
        # config iters honored
        assert len((tmp_path / "t.csv").read_text().splitlines()) == 13
        rc = main(
            [
                "plan",
                "--map", "open50",
                "--start", "5.5,5.5",
                "--goal", "44.5,44.5",
                "--config", str(cfg),
                "--iters", "7",
                "--csv", str(tmp_path / "t2.csv"),
            ]
        )
        assert rc == 0
        # explicit flag wins over the config file
        assert len((tmp_path / "t2.csv").read_text().splitlines()) == 8

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "p.cfg"
        cfg.write_text("warp_speed = 9\n")
        rc = main(
            [
                "plan",
                "--map", "open50",
                "--start", "5.5,5.5",
                "--goal", "44.5,44.5",
                "--config", str(cfg),
            ]
        )
        assert rc == 1

    def test_non_numeric_value_rejected(self, tmp_path):
        cfg = tmp_path / "p.cfg"
        cfg.write_text("eta = fast\n")
        rc = main(
            [
                "plan",
                "--map", "open50",
                "--start", "5.5,5.5",
                "--goal", "44.5,44.5",
                "--config", str(cfg),
            ]
        )
        assert rc == 1
