import json
import subprocess
import sys

import numpy as np
import pytest


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "canon22", *map(str, args)],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def write_tsv(path, series, labels):
    lines = []
    for lab, x in zip(labels, series):
        lines.append("\t".join([str(lab)] + [repr(float(v)) for v in x]))
    path.write_text("\n".join(lines) + "\n")


def two_class(n_per=10, length=128, seed=0, gap=3.0):
    rng = np.random.default_rng(seed)
    series, labels = [], []
    for _ in range(n_per):
        series.append(np.sin(2 * np.pi * np.arange(length) / 16.0) + 0.2 * rng.normal(size=length))
        labels.append(1)
    for _ in range(n_per):
        series.append(gap * rng.normal(size=length))
        labels.append(2)
    return series, labels


@pytest.fixture()
def dataset(tmp_path):
    series, labels = two_class()
    p = tmp_path / "toy.tsv"
    write_tsv(p, series, labels)
    return p


def summary_line(proc):
    assert proc.stdout.strip(), proc.stderr
    payload = json.loads(proc.stdout.strip().splitlines()[-1])
    return payload


# -- extract ---------------------------------------------------------------

def test_extract_writes_csv_rows(dataset, tmp_path):
    out = tmp_path / "f.csv"
    proc = run_cli("extract", "--input", dataset, "--output", out, "--format", "csv")
    assert proc.returncode == 0, proc.stderr
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 21  # header + 20 series
    payload = summary_line(proc)
    assert payload["n_series"] == 20
    assert payload["seed"] == 0


def test_extract_constant_series_flagged_exit_zero(tmp_path):
    p = tmp_path / "const.tsv"
    write_tsv(p, [np.full(64, 2.0), np.arange(64.0)], ["a", "b"])
    out = tmp_path / "f.csv"
    proc = run_cli("extract", "--input", p, "--output", out)
    assert proc.returncode == 0
    payload = summary_line(proc)
    assert payload["flagged_series"] >= 1
    assert "DegenerateInput" in out.read_text()


def test_extract_missing_file_exit_two(tmp_path):
    proc = run_cli("extract", "--input", tmp_path / "nope.tsv", "--output", tmp_path / "o.csv")
    assert proc.returncode == 2
    assert proc.stderr.strip() != ""


def test_extract_malformed_file_exit_two(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("1\t0.5\tpotato\n")
    proc = run_cli("extract", "--input", p, "--output", tmp_path / "o.csv")
    assert proc.returncode == 2
    assert proc.stdout == ""  # diagnostics belong on stderr
    assert "error" in proc.stderr


def test_extract_json_format_round_trip(dataset, tmp_path):
    out = tmp_path / "f.json"
    proc = run_cli("extract", "--input", dataset, "--output", out, "--format", "json")
    assert proc.returncode == 0
    records = json.loads(out.read_text())
    assert len(records) == 20
    assert set(records[0]) == {"id", "features", "special"}


def test_extract_threads_byte_identical(dataset, tmp_path):
    outs = []
    for k in (1, 4):
        out = tmp_path / f"f{k}.csv"
        proc = run_cli(
            "extract", "--input", dataset, "--output", out, "--threads", k
        )
        assert proc.returncode == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_extract_rerun_byte_identical(dataset, tmp_path):
    blobs = []
    for i in (1, 2):
        out = tmp_path / f"r{i}.csv"
        proc = run_cli("extract", "--input", dataset, "--output", out)
        assert proc.returncode == 0
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]


# -- classify ----------------------------------------------------------------

def test_classify_separable_split(tmp_path):
    tr_s, tr_l = two_class(seed=1)
    te_s, te_l = two_class(seed=2)
    tr = tmp_path / "d_TRAIN.tsv"
    te = tmp_path / "d_TEST.tsv"
    write_tsv(tr, tr_s, tr_l)
    write_tsv(te, te_s, te_l)
    proc = run_cli("classify", "--input", tr, te, "--seed", 5)
    assert proc.returncode == 0, proc.stderr
    payload = summary_line(proc)
    assert payload["balanced_accuracy"] == 1.0
    assert payload["unbalanced_accuracy"] == 1.0
    assert payload["seed"] == 5
    assert payload["n_train"] == 20
    assert payload["n_test"] == 20


def test_classify_identical_files_perfect_training(dataset):
    proc = run_cli("classify", "--input", dataset, dataset)
    assert proc.returncode == 0
    payload = summary_line(proc)
    assert payload["unbalanced_accuracy"] == 1.0


def test_classify_same_seed_byte_identical(tmp_path, dataset):
    r1 = run_cli("classify", "--input", dataset, dataset, "--seed", 9)
    r2 = run_cli("classify", "--input", dataset, dataset, "--seed", 9)
    assert r1.stdout == r2.stdout
    assert r1.returncode == r2.returncode == 0


# -- select -------------------------------------------------------------------

@pytest.fixture()
def task_dir(tmp_path):
    d = tmp_path / "tasks"
    d.mkdir()
    for j in range(3):
        series, labels = two_class(n_per=6, seed=10 + j)
        write_tsv(d / f"task{j}.tsv", series, labels)
    return d


def test_select_runs_and_is_deterministic(task_dir, tmp_path):
    out1 = tmp_path / "sel1.json"
    out2 = tmp_path / "sel2.json"
    a = run_cli("select", "--input", task_dir, "--output", out1,
                "--repeats", 100, "--seed", 3)
    assert a.returncode == 0, a.stderr
    b = run_cli("select", "--input", task_dir, "--output", out2,
                "--repeats", 100, "--seed", 3)
    assert b.returncode == 0
    assert out1.read_bytes() == out2.read_bytes()
    payload = json.loads(out1.read_text())
    assert payload["canonical"]
    assert payload["provenance"]
    assert json.loads(a.stdout.strip().splitlines()[-1])["seed"] == 3


def test_select_empty_dir_exit_two(tmp_path):
    d = tmp_path / "empty"
    d.mkdir()
    proc = run_cli("select", "--input", d, "--output", tmp_path / "s.json")
    assert proc.returncode == 2
    assert proc.stderr.strip() != ""


# -- bench ---------------------------------------------------------------------

def test_bench_grid_and_fit(tmp_path):
    out = tmp_path / "times.csv"
    proc = run_cli(
        "bench", "--output", out, "--lengths", "50,64,80,100,128", "--reps", 1
    )
    assert proc.returncode == 0, proc.stderr
    assert "reps" in proc.stderr.lower()  # reps < 3 warns
    payload = summary_line(proc)
    assert "exponent" in payload
    assert payload["lengths"] == [50, 64, 80, 100, 128]
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "series_id,length,seconds"
    assert len(lines) == 1 + 40 * 5


def test_bench_rejects_bad_lengths(tmp_path):
    proc = run_cli(
        "bench", "--output", tmp_path / "t.csv", "--lengths", "50,banana"
    )
    assert proc.returncode == 2


# -- project2d --------------------------------------------------------------------

def test_project2d_output_table(dataset, tmp_path):
    out = tmp_path / "proj.csv"
    proc = run_cli("project2d", "--input", dataset, "--output", out, "--seed", 7)
    assert proc.returncode == 0, proc.stderr
    payload = summary_line(proc)
    assert payload["seed"] == 7
    assert payload["pair_accuracy"] >= 0.9
    lines = out.read_text().strip().split("\n")
    header = lines[0].split(",")
    assert len(header) == 3
    assert header[2] == "label"
    assert len(lines) == 21


def test_project2d_deterministic(dataset, tmp_path):
    o1, o2 = tmp_path / "p1.csv", tmp_path / "p2.csv"
    r1 = run_cli("project2d", "--input", dataset, "--output", o1, "--seed", 1)
    r2 = run_cli("project2d", "--input", dataset, "--output", o2, "--seed", 1)
    assert r1.returncode == r2.returncode == 0
    assert o1.read_bytes() == o2.read_bytes()
    s1, s2 = summary_line(r1), summary_line(r2)
    s1.pop("output"), s2.pop("output")
    assert s1 == s2


# -- global behaviour ---------------------------------------------------------------

def test_no_subcommand_usage_error():
    proc = run_cli()
    assert proc.returncode == 2


def test_summary_lines_are_sorted_json(dataset, tmp_path):
    proc = run_cli(
        "extract", "--input", dataset, "--output", tmp_path / "x.csv", "--seed", 42
    )
    line = proc.stdout.strip().splitlines()[-1]
    payload = json.loads(line)
    assert list(payload) == sorted(payload)
    assert payload["seed"] == 42
