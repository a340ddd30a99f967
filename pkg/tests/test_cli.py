import numpy as np
import pytest

from helpers import random_batch
from sweepjoin import Rect, save_mbr_csv
from sweepjoin import cli as sjcli
from sweepjoin import engine, nested_loop_join


def write_csv(path, rows):
    path.write_text("".join(f"{i},{xl},{yl},{xu},{yu}\n" for i, xl, yl, xu, yu in rows))


@pytest.fixture
def three_rect_files(tmp_path):
    # exactly two intersecting pairs: (1, 11) and (2, 12)
    left = tmp_path / "left.csv"
    right = tmp_path / "right.csv"
    write_csv(left, [(1, 0.0, 0.0, 0.1, 0.1),
                     (2, 0.5, 0.5, 0.6, 0.6),
                     (3, 0.9, 0.9, 1.0, 1.0)])
    write_csv(right, [(11, 0.05, 0.05, 0.15, 0.15),
                      (12, 0.55, 0.55, 0.65, 0.65),
                      (13, 0.2, 0.2, 0.3, 0.3)])
    lrects = [Rect(1, 0.0, 0.1, 0.0, 0.1), Rect(2, 0.5, 0.6, 0.5, 0.6),
              Rect(3, 0.9, 1.0, 0.9, 1.0)]
    rrects = [Rect(11, 0.05, 0.15, 0.05, 0.15), Rect(12, 0.55, 0.65, 0.55, 0.65),
              Rect(13, 0.2, 0.3, 0.2, 0.3)]
    assert nested_loop_join(lrects, rrects) == {(1, 11), (2, 12)}
    return str(left), str(right)


class TestCmdJoin:
    def test_reports_result_count(self, three_rect_files, capsys):
        left, right = three_rect_files
        rc = sjcli.main(["join", "--left", left, "--right", right,
                         "--k", "4", "--verify"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "result_count=2" in out
        assert "partition_s=" in out and "total_s=" in out

    def test_csv_format(self, three_rect_files, capsys):
        left, right = three_rect_files
        rc = sjcli.main(["join", "--left", left, "--right", right,
                         "--layout", "2d", "--k", "3", "--format", "csv"])
        out = capsys.readouterr().out.strip().splitlines()
        assert rc == 0
        assert out[0] == sjcli.CSV_HEADER
        fields = out[1].split(",")
        assert fields[0] == "2d" and fields[1] == "3" and fields[-1] == "2"

    def test_axis_auto_rejected_for_grid(self, three_rect_files, capsys):
        left, right = three_rect_files
        rc = sjcli.main(["join", "--left", left, "--right", right,
                         "--layout", "2d", "--axis", "auto"])
        assert rc == 1
        assert "auto" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        rc = sjcli.main(["join", "--left", str(tmp_path / "nope.csv"),
                         "--right", str(tmp_path / "nope.csv")])
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_verify_detects_fault_injected_engine(self, three_rect_files,
                                                  capsys, monkeypatch):
        left, right = three_rect_files
        real_join = engine.join

        def broken_join(r, s, cfg):
            report = real_join(r, s, cfg)
            report.result_count += 1
            report.pairs = np.vstack([report.pairs, [[3, 13]]])
            return report

        monkeypatch.setattr(sjcli.engine, "join", broken_join)
        rc = sjcli.main(["join", "--left", left, "--right", right, "--verify"])
        assert rc == 1
        assert "MISMATCH" in capsys.readouterr().err

    def test_verify_size_limit(self, three_rect_files, capsys, monkeypatch):
        left, right = three_rect_files
        monkeypatch.setattr(sjcli, "VERIFY_LIMIT", 2)
        rc = sjcli.main(["join", "--left", left, "--right", right, "--verify"])
        assert rc == 1
        assert "at most" in capsys.readouterr().err

    def test_epsilon_join_with_verify(self, tmp_path, capsys):
        pl, pr = tmp_path / "p.csv", tmp_path / "q.csv"
        write_csv(pl, [(1, 0.5, 0.5, 0.5, 0.5)])
        write_csv(pr, [(2, 0.55, 0.5, 0.55, 0.5), (3, 0.9, 0.9, 0.9, 0.9)])
        rc = sjcli.main(["join", "--left", str(pl), "--right", str(pr),
                         "--epsilon", "0.1", "--verify"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "result_count=1" in out

    def test_raw_coordinates_normalized(self, tmp_path, capsys):
        left, right = tmp_path / "l.csv", tmp_path / "r.csv"
        write_csv(left, [(1, 100.0, 100.0, 140.0, 140.0)])
        write_csv(right, [(2, 120.0, 120.0, 160.0, 160.0), (3, 900.0, 900.0, 950.0, 950.0)])
        rc = sjcli.main(["join", "--left", str(left), "--right", str(right),
                         "--k", "4", "--verify"])
        out = capsys.readouterr()
        assert rc == 0
        assert "result_count=1" in out.out
        assert "normalizing" in out.err

    def test_python_backend_flag(self, three_rect_files, capsys):
        left, right = three_rect_files
        rc = sjcli.main(["join", "--left", left, "--right", right,
                         "--backend", "python"])
        assert rc == 0
        assert "result_count=2" in capsys.readouterr().out


class TestCmdBench:
    def test_grid_row_count_and_consistency(self, three_rect_files, capsys):
        left, right = three_rect_files
        rc = sjcli.main(["bench", "--left", left, "--right", right,
                         "--k-list", "1,10", "--threads-list", "1", "--reps", "2"])
        out = capsys.readouterr().out.strip().splitlines()
        assert rc == 0
        assert out[0] == sjcli.CSV_HEADER
        rows = [line.split(",") for line in out[1:]]
        assert len(rows) == 4  # 2 k values x 1 thread count x 2 reps
        assert {row[-1] for row in rows} == {"2"}
        assert [row[4] for row in rows] == ["0", "1", "0", "1"]

    def test_mixed_layouts_skip_invalid_axis(self, three_rect_files, capsys):
        left, right = three_rect_files
        rc = sjcli.main(["bench", "--left", left, "--right", right,
                         "--layout-list", "1d,2d", "--k-list", "4",
                         "--axis-list", "x,auto"])
        captured = capsys.readouterr()
        rows = captured.out.strip().splitlines()[1:]
        assert rc == 0
        assert len(rows) == 3  # 1d gets x+auto, 2d only x
        assert "skipping axis=auto" in captured.err

    def test_inconsistent_counts_fail(self, three_rect_files, capsys, monkeypatch):
        left, right = three_rect_files
        counter = iter(range(100))

        def flaky_join(r, s, cfg):
            rep = engine.JoinReport(next(counter), None, 0.0, 0.0, 0.0, 0.0)
            return rep

        monkeypatch.setattr(sjcli.engine, "join", flaky_join)
        rc = sjcli.main(["bench", "--left", left, "--right", right,
                         "--k-list", "1,2"])
        assert rc == 1
        assert "varied" in capsys.readouterr().err


class TestCmdTune:
    def test_recommends_rule_of_thumb(self, tmp_path, capsys):
        left, right = tmp_path / "l.csv", tmp_path / "r.csv"
        # every rectangle exactly 0.01 wide: K = 1 / (10 * 0.01) = 10
        rows = [(i, 0.05 * i, 0.2, 0.05 * i + 0.01, 0.21) for i in range(10)]
        write_csv(left, rows)
        write_csv(right, rows)
        rc = sjcli.main(["tune", "--left", str(left), "--right", str(right)])
        out = capsys.readouterr().out
        assert rc == 0
        assert "recommended K: 10" in out
        assert "recommended layout: 1d" in out
        assert "auto" in out

    def test_stats_only(self, three_rect_files, capsys):
        left, right = three_rect_files
        rc = sjcli.main(["tune", "--left", left, "--right", right, "--stats-only"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "cardinality" in out
        assert "recommended" not in out

    def test_point_data_capped_with_warning(self, tmp_path, capsys):
        left = tmp_path / "pts.csv"
        write_csv(left, [(i, 0.1 * i, 0.1 * i, 0.1 * i, 0.1 * i) for i in range(5)])
        rc = sjcli.main(["tune", "--left", str(left), "--right", str(left)])
        captured = capsys.readouterr()
        assert rc == 0
        assert "recommended K: 20000" in captured.out
        assert "warning" in captured.err

    def test_stats_match_recomputation(self, tmp_path, capsys):
        rng = np.random.default_rng(80)
        batch = random_batch(rng, 500, 0.01)
        path = tmp_path / "d.csv"
        save_mbr_csv(batch, path)
        rc = sjcli.main(["tune", "--left", str(path), "--right", str(path),
                         "--stats-only"])
        out = capsys.readouterr().out
        assert rc == 0
        from sweepjoin import compute_stats
        stats = compute_stats(batch)
        assert f"{stats.avg_x_extent:.9f}" in out
        assert str(stats.cardinality) in out


class TestCmdGenerate:
    def test_generate_then_join_binary(self, tmp_path, capsys):
        left = tmp_path / "l.bin"
        right = tmp_path / "r.bin"
        assert sjcli.main(["generate", "--out", str(left), "--n", "500",
                           "--extent-x", "0.01", "--extent-y", "0.01",
                           "--seed", "1"]) == 0
        assert sjcli.main(["generate", "--out", str(right), "--n", "400",
                           "--extent-x", "0.01", "--extent-y", "0.01",
                           "--seed", "2"]) == 0
        rc = sjcli.main(["join", "--left", str(left), "--right", str(right),
                         "--verify"])
        assert rc == 0

    def test_points_flag(self, tmp_path, capsys):
        out_path = tmp_path / "p.csv"
        assert sjcli.main(["generate", "--out", str(out_path), "--n", "50",
                           "--points"]) == 0
        from sweepjoin import load_mbr_csv
        batch, stats = load_mbr_csv(out_path)
        assert stats.avg_x_extent == 0.0
        assert len(batch) == 50
