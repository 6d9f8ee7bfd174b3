import csv
import math
import shutil
import subprocess

import numpy as np
import pytest

from ordrep import cli, learners
from ordrep.core import Dataset, read_csv, write_csv
from ordrep.metrics import EvaluationReport

FAST_NN = ["--hidden", "2", "--epochs", "30"]


@pytest.fixture()
def data(tmp_path):
    path = tmp_path / "d.csv"
    assert cli.main(["gen", "--space", "r2", "--classes", "5", "--n", "60", "--seed", "1",
                     "--out", str(path)]) == 0
    return path


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestGen:
    def test_writes_dataset_and_noiseless_column(self, data, capsys):
        d = read_csv(data)
        assert len(d) == 60 and d.dim == 2
        assert rows(data)[0][-1] == "noiseless_label"

    def test_prints_summary(self, tmp_path, capsys):
        cli.main(["gen", "--space", "r4", "--classes", "10", "--n", "30", "--out", str(tmp_path / "x.csv")])
        out = capsys.readouterr().out
        assert "class counts" in out and "corruption rate" in out

    def test_usage_errors(self, tmp_path):
        out = str(tmp_path / "x.csv")
        assert cli.main(["gen", "--space", "r2", "--classes", "7", "--out", out]) == 2
        assert cli.main(["gen", "--space", "r2", "--classes", "5"]) == 2
        assert cli.main(["gen", "--space", "r2", "--classes", "5", "--n", "0", "--out", out]) == 2


class TestTrainEval:
    def test_round_trip_and_schema(self, data, tmp_path):
        model = tmp_path / "m.txt"
        report = tmp_path / "r.csv"
        assert cli.main(["train", "--data", str(data), "--model", "unn", *FAST_NN, "--out", str(model)]) == 0
        assert (tmp_path / "m.txt.log").exists()
        assert cli.main(["eval", "--model-file", str(model), "--data", str(data), "--out", str(report)]) == 0
        table = rows(report)
        assert tuple(table[0]) == EvaluationReport.COLUMNS
        assert len(table) == 2 and int(table[1][-1]) == 60

    def test_perfect_model_scores_zero(self, tmp_path):
        x = np.array([[0.0], [0.1], [0.9], [1.0]])
        path = tmp_path / "sep.csv"
        write_csv(path, Dataset(x, [1, 1, 2, 2], 2))
        model, report = tmp_path / "m.txt", tmp_path / "r.csv"
        assert cli.main(["train", "--data", str(path), "--model", "csvm", "--kernel", "linear",
                         "--C", "100", "--out", str(model)]) == 0
        assert cli.main(["eval", "--model-file", str(model), "--data", str(path), "--out", str(report)]) == 0
        assert float(rows(report)[1][0]) == 0.0

    def test_every_model_trains(self, data, tmp_path):
        for name in learners.MODELS:
            extra = ["--C", "10"] if name in learners.SVM_MODELS else FAST_NN
            out = tmp_path / f"{name}.txt"
            assert cli.main(["train", "--data", str(data), "--model", name, *extra, "--out", str(out)]) == 0
            assert learners.load(out).name == name

    def test_usage_errors(self, data, tmp_path):
        out = str(tmp_path / "m.txt")
        assert cli.main(["train", "--data", str(data), "--out", out]) == 2
        assert cli.main(["train", "--data", str(data), "--model", "csvm"]) == 2
        assert cli.main(["train", "--data", str(data), "--model", "unn", "--kernel", "linear", "--out", out]) == 2
        assert cli.main(["train", "--data", str(data), "--model", "cnn", "--C", "1", "--out", out]) == 2
        assert cli.main(["frobnicate"]) == 2

    def test_runtime_errors(self, data, tmp_path):
        assert cli.main(["eval", "--model-file", str(tmp_path / "missing"), "--data", str(data)]) == 1
        model = tmp_path / "m.txt"
        cli.main(["train", "--data", str(data), "--model", "cnn", *FAST_NN, "--out", str(model)])
        wide = tmp_path / "wide.csv"
        write_csv(wide, Dataset(np.zeros((4, 3)), [1, 2, 3, 4], 5))
        assert cli.main(["eval", "--model-file", str(model), "--data", str(wide)]) == 1

    def test_config_file_and_override(self, data, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(f"# comment\nmodel = unn\nhidden = 2\nepochs = 5\ndata = {data}\n")
        out = tmp_path / "m.txt"
        assert cli.main(["train", "--config", str(cfg), "--epochs", "7", "--out", str(out)]) == 0
        log = (tmp_path / "m.txt.log").read_text()
        assert "config epochs=7" in log and "config hidden=2" in log
        cfg.write_text("model = unn\nbogus = 1\n")
        assert cli.main(["train", "--config", str(cfg), "--data", str(data), "--out", str(out)]) == 2


class TestCurve:
    def test_rows_and_means(self, data, tmp_path):
        out = tmp_path / "c.csv"
        assert cli.main(["curve", "--data", str(data), "--model", "cnn", *FAST_NN,
                         "--sizes", "10:20:10", "--runs", "3", "--seed", "5", "--out", str(out)]) == 0
        table = rows(out)
        assert tuple(table[0]) == cli.CURVE_HEADER
        body = table[1:]
        assert len(body) == 2 * (3 + 1)
        for size, block in (("10", body[:4]), ("20", body[4:])):
            runs, mean = block[:3], block[3]
            assert [r[0] for r in block] == [size] * 4 and mean[1] == "mean"
            assert [int(r[2]) for r in runs] == [5, 6, 7]
            mers = [float(r[3]) for r in runs]
            assert float(mean[3]) == pytest.approx(math.fsum(mers) / 3, abs=1e-15)

    def test_single_run_mean_equals_row(self, data, tmp_path):
        out = tmp_path / "c.csv"
        cli.main(["curve", "--data", str(data), "--model", "unn", *FAST_NN, "--sizes", "15",
                  "--runs", "1", "--out", str(out)])
        run, mean = rows(out)[1:]
        assert run[3:] == mean[3:]

    def test_deterministic_and_thread_independent(self, data, tmp_path, monkeypatch):
        args = ["curve", "--data", str(data), "--model", "onn", *FAST_NN, "--sizes", "10:20:10", "--runs", "2"]
        outs = []
        for i, threads in enumerate(("0", "0", "2")):
            monkeypatch.setenv("ORDREP_THREADS", threads)
            out = tmp_path / f"c{i}.csv"
            assert cli.main(args + ["--out", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_usage_errors(self, data):
        base = ["curve", "--data", str(data), "--model", "cnn"]
        assert cli.main(base + ["--sizes", "60"]) == 2
        assert cli.main(base + ["--sizes", "20:10:5"]) == 2
        assert cli.main(base + ["--sizes", "a:b"]) == 2
        assert cli.main(base + ["--runs", "0"]) == 2


class TestLoocv:
    def test_trains_once_per_row(self, tmp_path, monkeypatch, capsys):
        path = tmp_path / "d.csv"
        cli.main(["gen", "--space", "r2", "--classes", "5", "--n", "10", "--out", str(path)])
        calls = []
        real = learners.train

        def counting(config, dataset):
            calls.append(len(dataset))
            return real(config, dataset)

        monkeypatch.setattr(learners, "train", counting)
        out = tmp_path / "l.csv"
        assert cli.main(["loocv", "--data", str(path), "--model", "cnn", *FAST_NN, "--out", str(out)]) == 0
        assert calls == [9] * 10
        assert tuple(rows(out)[0]) == EvaluationReport.COLUMNS
        assert "trainings 10" in (tmp_path / "l.csv.log").read_text()


@pytest.mark.skipif(shutil.which("ordrep") is None, reason="console script not installed")
def test_console_script(tmp_path):
    out = tmp_path / "d.csv"
    done = subprocess.run(["ordrep", "gen", "--space", "r2", "--classes", "5", "--n", "20",
                           "--out", str(out)], capture_output=True, text=True)
    assert done.returncode == 0 and out.exists()
    bad = subprocess.run(["ordrep", "gen"], capture_output=True, text=True)
    assert bad.returncode == 2
