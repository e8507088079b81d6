import json
import xml.etree.ElementTree as ET

import pytest

from sigfatigue.cli import main


def run(argv):
    return main(argv)


def gen_fixture(tmp_path, extra=()):
    out = tmp_path / "corpus"
    argv = [
        "generate", "--pattern", "sharp_drop", "--seed", "42", "--noise-cv", "0",
        "--duration", "120", "--change-days", "61", "--out", str(out), *extra,
    ]
    assert run(argv) == 0
    return out / "sharp_drop_0000.csv", out / "sharp_drop_0000.manifest.json"


class TestGenerate:
    def test_single_series_outputs(self, tmp_path):
        csv_path, manifest_path = gen_fixture(tmp_path)
        assert csv_path.exists() and manifest_path.exists()
        manifest = json.loads(manifest_path.read_text())
        assert manifest["ground_truth"]["change_days"] == [61]
        header = csv_path.read_text().splitlines()[0]
        assert header == "date,impressions,clicks"

    def test_all_patterns(self, tmp_path):
        out = tmp_path / "all"
        assert run(["generate", "--all", "--n", "2", "--seed", "7", "--out", str(out)]) == 0
        assert len(list(out.glob("*.csv"))) == 14
        assert len(list(out.glob("*.manifest.json"))) == 14

    def test_invalid_noise_cv_exits_2(self, tmp_path, capsys):
        code = run([
            "generate", "--pattern", "sharp_drop", "--noise-cv", "0.9",
            "--out", str(tmp_path / "x"),
        ])
        assert code == 2
        assert "noise_cv" in capsys.readouterr().err

    def test_determinism_byte_identical(self, tmp_path):
        a_csv, a_man = gen_fixture(tmp_path / "a")
        b_csv, b_man = gen_fixture(tmp_path / "b")
        assert a_csv.read_bytes() == b_csv.read_bytes()
        assert a_man.read_bytes() == b_man.read_bytes()


class TestDetect:
    def test_report_and_plot(self, tmp_path):
        csv_path, _ = gen_fixture(tmp_path)
        report_path = tmp_path / "report.json"
        svg_path = tmp_path / "report.svg"
        code = run([
            "detect", str(csv_path), "--k", "1.5",
            "--out", str(report_path), "--plot", str(svg_path),
        ])
        assert code == 0
        report = json.loads(report_path.read_text())
        assert len(report["change_points"]) == 1
        assert report["change_points"][0]["date"] == "2024-03-01"  # day 61
        root = ET.fromstring(svg_path.read_text())
        assert root.tag.endswith("svg")

    def test_extreme_k_no_change_points(self, tmp_path):
        csv_path, _ = gen_fixture(tmp_path)
        out = tmp_path / "r.json"
        assert run(["detect", str(csv_path), "--k", "99", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["change_points"] == []

    def test_malformed_csv_exits_2_naming_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("date,impressions,clicks\n2024-01-01,100,5\noops,1,1\n")
        assert run(["detect", str(bad)]) == 2
        assert "line 3" in capsys.readouterr().err

    def test_short_series_exits_3(self, tmp_path):
        short = tmp_path / "short.csv"
        rows = ["date,impressions,clicks"] + [
            f"2024-01-{d:02d},100,5" for d in range(1, 11)
        ]
        short.write_text("\n".join(rows) + "\n")
        assert run(["detect", str(short), "--window", "14"]) == 3

    def test_detect_determinism(self, tmp_path):
        csv_path, _ = gen_fixture(tmp_path)
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(["detect", str(csv_path), "--k", "1.5", "--out", str(a)])
        run(["detect", str(csv_path), "--k", "1.5", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestWastage:
    def test_requires_cpc_without_cost_column(self, tmp_path, capsys):
        csv_path, _ = gen_fixture(tmp_path)
        assert run(["wastage", str(csv_path), "--k", "1.5"]) == 2
        assert "cpc" in capsys.readouterr().err

    def test_report_with_cpc(self, tmp_path):
        csv_path, _ = gen_fixture(tmp_path)
        out = tmp_path / "w.json"
        daily = tmp_path / "w.csv"
        code = run([
            "wastage", str(csv_path), "--k", "1.5", "--cpc", "1.25",
            "--out", str(out), "--daily-csv", str(daily),
        ])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["cpc_benchmark"] == 1.25
        assert report["total_wastage"] > 0
        assert daily.read_text().splitlines()[0] == "date,lost_clicks,wastage"

    def test_constant_series_zero_wastage(self, tmp_path):
        const = tmp_path / "const.csv"
        rows = ["date,impressions,clicks"]
        import datetime as dt

        for i in range(120):
            d = dt.date(2024, 1, 1) + dt.timedelta(days=i)
            rows.append(f"{d.isoformat()},50000,1000")
        const.write_text("\n".join(rows) + "\n")
        out = tmp_path / "w.json"
        assert run(["wastage", str(const), "--cpc", "1.0", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["total_wastage"] == 0.0


class TestEvaluateAndSweep:
    def test_evaluate_generated_corpus(self, tmp_path):
        out = tmp_path / "metrics.json"
        code = run([
            "evaluate", "--pattern", "sharp_drop", "--n", "5", "--seed", "9",
            "--duration", "120", "--method", "signature", "--k", "1.5",
            "--out", str(out),
        ])
        assert code == 0
        metrics = json.loads(out.read_text())["metrics"]
        assert metrics["recall"] == 1.0
        assert metrics["precision"] > 0

    def test_evaluate_from_corpus_dir(self, tmp_path):
        corpus_dir = tmp_path / "corpus"
        run([
            "generate", "--pattern", "sharp_drop", "--n", "3", "--seed", "4",
            "--duration", "120", "--out", str(corpus_dir),
        ])
        out = tmp_path / "m.json"
        code = run([
            "evaluate", "--corpus", str(corpus_dir), "--pattern", "sharp_drop",
            "--method", "signature", "--k", "1.5", "--out", str(out),
        ])
        assert code == 0
        assert json.loads(out.read_text())["n_series"] == 3

    def test_evaluate_determinism(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        argv = [
            "evaluate", "--pattern", "sharp_drop", "--n", "4", "--seed", "12",
            "--duration", "120", "--method", "signature", "--k", "1.5",
        ]
        run(argv + ["--out", str(a)])
        run(argv + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_sweep_nine_rows(self, tmp_path):
        out_json = tmp_path / "sweep.json"
        out_csv = tmp_path / "sweep.csv"
        code = run([
            "sweep", "--pattern", "sharp_drop", "--n", "3", "--seed", "5",
            "--duration", "120", "--bootstrap", "10",
            "--out", str(out_json), "--csv", str(out_csv),
        ])
        assert code == 0
        rows = json.loads(out_json.read_text())["rows"]
        assert len(rows) == 9
        lines = out_csv.read_text().splitlines()
        assert len(lines) == 10
        assert lines[0].startswith("window,threshold_k,depth,precision")


def test_unknown_method_choices_guard():
    with pytest.raises(SystemExit) as err:
        main(["evaluate", "--pattern", "sharp_drop", "--method", "nope"])
    assert err.value.code == 2
