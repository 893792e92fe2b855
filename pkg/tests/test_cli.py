import csv
import subprocess
import sys

import numpy as np
import pytest

from conftest import write_ucr
from ohit.cli import main
from ohit.datasets import load_series
from ohit.simulate import gaussian_blobs


def _imbalanced(tmp_path, n_min, n_maj, d=24, seed=0, name="train.csv"):
    rng = np.random.default_rng(seed)
    P, _ = gaussian_blobs((n_min // 2, n_min - n_min // 2), d=d, seed=seed)
    N = rng.normal(loc=4.0, size=(n_maj, d))
    labels = ["1"] * n_min + ["-1"] * n_maj
    order = rng.permutation(n_min + n_maj)
    X = np.vstack([P, N])[order]
    return write_ucr(tmp_path / name, [labels[i] for i in order], X)


def test_method_none_copies_file(tmp_path):
    src = _imbalanced(tmp_path, 10, 30)
    out = tmp_path / "out.csv"
    assert main(["resample", "--input", str(src), "--output", str(out), "--minority", "1", "--method", "none"]) == 0
    assert out.read_bytes() == src.read_bytes()


def test_ohit_balances_wafer_shaped(tmp_path, capsys):
    src = _imbalanced(tmp_path, 97, 903)
    out = tmp_path / "out.csv"
    clusters = tmp_path / "clusters.csv"
    shrink = tmp_path / "shrink.csv"
    argv = ["resample", "--input", str(src), "--output", str(out), "--minority", "1", "--seed", "3",
            "--dump-clusters", str(clusters), "--dump-shrinkage", str(shrink)]
    assert main(argv) == 0
    data = load_series(out)
    n_min = data.labels.count("1")
    m = len(shrink.read_text().splitlines()) - 1
    assert 903 <= n_min <= 903 + m
    assert data.labels.count("-1") == 903
    # original rows come first and are unchanged
    orig = load_series(src)
    np.testing.assert_array_equal(data.series[: orig.n], orig.series)
    assert data.labels[: orig.n] == orig.labels
    assert len(clusters.read_text().splitlines()) == 98
    assert "n_min 97 ->" in capsys.readouterr().out


def test_resample_deterministic(tmp_path):
    src = _imbalanced(tmp_path, 20, 60)
    outs = []
    for i in range(2):
        out = tmp_path / f"o{i}.csv"
        main(["resample", "--input", str(src), "--output", str(out), "--minority", "1", "--method", "smote", "--seed", "4"])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_synthetic_label_and_tab_delimiter(tmp_path):
    rng = np.random.default_rng(1)
    src = write_ucr(tmp_path / "t.tsv", ["a"] * 6 + ["b"] * 10, rng.normal(size=(16, 5)), delimiter="\t")
    out = tmp_path / "o.tsv"
    argv = ["resample", "--input", str(src), "--output", str(out), "--minority", "a", "--method", "ros",
            "--delimiter", "\\t", "--synthetic-label", "syn", "--znormalize"]
    assert main(argv) == 0
    data = load_series(out, "\t")
    assert data.labels.count("syn") == 4
    np.testing.assert_allclose(data.series[:16].mean(axis=1), 0, atol=1e-12)


@pytest.mark.parametrize("extra", [["--eta", "lots"], ["--method", "adasyn"], ["--k", "x"]])
def test_bad_flags_exit_2(tmp_path, extra):
    src = _imbalanced(tmp_path, 5, 10)
    with pytest.raises(SystemExit) as exc:
        main(["resample", "--input", str(src), "--output", str(tmp_path / "o.csv"), "--minority", "1", *extra])
    assert exc.value.code == 2


def test_invalid_parameter_exit_2(tmp_path):
    src = _imbalanced(tmp_path, 5, 10)
    assert main(["resample", "--input", str(src), "--output", str(tmp_path / "o.csv"), "--minority", "1", "--k", "0"]) == 2


def test_data_errors_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,0,1\n2,0\n")
    assert main(["resample", "--input", str(bad), "--output", str(tmp_path / "o.csv"), "--minority", "1"]) == 1
    assert "bad.csv:2:" in capsys.readouterr().err
    src = _imbalanced(tmp_path, 5, 10)
    assert main(["resample", "--input", str(src), "--output", str(tmp_path / "o.csv"), "--minority", "zzz"]) == 1
    assert main(["resample", "--input", str(tmp_path / "missing.csv"), "--output", str(tmp_path / "o.csv"), "--minority", "1"]) == 1


def _config(tmp_path, datasets, methods="none, ros", extra=""):
    lines = ["[benchmark]", f"methods = {methods}", "seeds = 0", extra, ""]
    for name, train, test in datasets:
        lines += [f"[dataset {name}]", f"train = {train}", f"test = {test}", "minority = 1", ""]
    p = tmp_path / "bench.ini"
    p.write_text("\n".join(lines))
    return p


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_benchmark_two_methods(tmp_path):
    _imbalanced(tmp_path, 10, 30, name="a_train.csv")
    _imbalanced(tmp_path, 20, 40, seed=1, name="a_test.csv")
    cfg = _config(tmp_path, [("A", "a_train.csv", "a_test.csv")])
    out = tmp_path / "res"
    assert main(["benchmark", "--config", str(cfg), "--out-dir", str(out)]) == 0
    summary = _rows(out / "summary.csv")
    assert [(r["dataset"], r["method"]) for r in summary] == [("A", "none"), ("A", "ros")]
    assert {r["method"] for r in _rows(out / "averages.csv")} == {"none", "ros"}
    assert (out / "report.json").exists() and (out / "report.csv").exists()


def test_config_inline_comments_and_defaults(tmp_path):
    from ohit.cli import read_benchmark_config

    p = tmp_path / "c.ini"
    p.write_text(
        "[benchmark]\nseeds = 1, 2 ; two seeds\nk_cls = 3   # classifier k\nkappa = 4\nk = 6\n"
        "[dataset W]\ntrain = sub/a.tsv\ntest = b.tsv\nminority = 5, 2\ndelimiter = tab\n"
    )
    (ds,), methods, cfg = read_benchmark_config(str(p))
    assert methods == ["none", "ros", "smote", "ohit"]
    assert cfg.seeds == (1, 2) and cfg.k_cls == 3 and (cfg.ohit.k, cfg.ohit.kappa) == (6, 4)
    assert ds.name == "W" and ds.minority_labels == ("5", "2") and ds.delimiter == "\t"
    assert ds.train_path == str(tmp_path / "sub" / "a.tsv")


def test_benchmark_missing_file_is_recorded(tmp_path):
    _imbalanced(tmp_path, 10, 30, name="a_train.csv")
    _imbalanced(tmp_path, 20, 40, seed=1, name="a_test.csv")
    cfg = _config(tmp_path, [("A", "a_train.csv", "a_test.csv"), ("B", "a_train.csv", "nope.csv")], methods="none, ohit")
    out = tmp_path / "res"
    assert main(["benchmark", "--config", str(cfg), "--out-dir", str(out)]) == 0
    errors = [r for r in _rows(out / "report.csv") if r["metric"] == "error"]
    assert {r["dataset"] for r in errors} == {"B"} and len(errors) == 2
    wil = _rows(out / "wilcoxon.csv")
    assert wil[0]["ohit vs"] == "none" and 0 <= float(wil[0]["f1"]) <= 1


@pytest.mark.parametrize(
    "text",
    ["not an ini file", "[benchmark]\nmethods = none\n", "[benchmark]\nmethods = magic\n[dataset A]\ntrain=a\ntest=b\nminority=1\n",
     "[benchmark]\n[dataset A]\ntrain = a.csv\n"],
)
def test_bad_config_exit_2(tmp_path, text):
    p = tmp_path / "c.ini"
    p.write_text(text)
    assert main(["benchmark", "--config", str(p), "--out-dir", str(tmp_path / "o")]) == 2


def test_unreadable_config_exit_2(tmp_path):
    assert main(["benchmark", "--config", str(tmp_path / "absent.ini"), "--out-dir", str(tmp_path / "o")]) == 2


def test_module_entry_point(tmp_path):
    src = _imbalanced(tmp_path, 6, 12)
    out = tmp_path / "o.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "ohit", "resample", "--input", str(src), "--output", str(out), "--minority", "1", "--method", "ros"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert load_series(out).labels.count("1") == 12


def test_benchmark_twelve_wins_pvalue(tmp_path):
    # overlapping classes at IR 10: unresampled k-NN rarely predicts the minority
    entries = []
    for i in range(12):
        rng = np.random.default_rng(100 + i)
        for split, (n_min, n_maj) in (("train", (20, 200)), ("test", (40, 400))):
            X = np.vstack([rng.normal(loc=0.6, size=(n_min, 10)), rng.normal(size=(n_maj, 10))])
            write_ucr(tmp_path / f"d{i}_{split}.csv", ["1"] * n_min + ["0"] * n_maj, X)
        entries.append((f"D{i}", f"d{i}_train.csv", f"d{i}_test.csv"))
    cfg = _config(tmp_path, entries, methods="none, ohit")
    out = tmp_path / "res"
    assert main(["benchmark", "--config", str(cfg), "--out-dir", str(out)]) == 0
    summary = {(r["dataset"], r["method"]): float(r["gmean"]) for r in _rows(out / "summary.csv")}
    assert all(summary[(ds, "ohit")] > summary[(ds, "none")] for ds, _, _ in entries)
    (row,) = _rows(out / "wilcoxon.csv")
    assert float(row["gmean"]) == 2 / 4096
    assert abs(float(row["gmean"]) - 4.9e-4) < 1e-5
