import json
import subprocess
import sys

import pytest

from patentflow.cli import main

SPEC = {
    "node_count": 600,
    "classes": [["347", 0.2], ["400", 0.2], ["358", 0.2], ["435", 0.4]],
    "year_range": [1998, 2007],
    "assignees": [["canoncorp", 0.3], ["alpha", 0.4], ["beta", 0.3]],
    "edge_model": {"out_degree_mean": 3.0},
    "planted_crossover": {
        "target_class": "347",
        "source_class_a": "400",
        "source_class_b": "358",
        "crossover_year": 2003,
    },
    "dominant_assignee": "canoncorp",
}


@pytest.fixture
def data_dir(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(SPEC), encoding="utf-8")
    out = tmp_path / "data"
    code = main(["gen", "--spec", str(spec_path), "--seed", "7", "--out", str(out)])
    assert code == 0
    return out


def _dataset_args(data_dir):
    return [
        "--citations", str(data_dir / "citations.tsv"),
        "--patents", str(data_dir / "patents.tsv"),
    ]


def test_gen_outputs(data_dir):
    assert (data_dir / "citations.tsv").exists()
    assert (data_dir / "patents.tsv").exists()
    assert len((data_dir / "patents.tsv").read_text().splitlines()) == 600


def test_rank_command(data_dir, tmp_path, capsys):
    out = tmp_path / "rank"
    code = main(["rank", *_dataset_args(data_dir), "--damping", "0.5",
                 "--top", "20", "--out", str(out)])
    assert code == 0
    assert (out / "scores_d0.5.tsv").exists()
    assert (out / "rank_table.txt").exists()
    assert (out / "rank_table.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["command"] == "rank"
    assert summary["converged"] is True
    assert summary["damping"] == 0.5
    assert "wall" not in " ".join(summary)
    # build report lands on stderr as one JSON line
    err_lines = capsys.readouterr().err.strip().splitlines()
    report = json.loads(err_lines[0])
    assert report["nodes"] == 600
    lines = (out / "scores_d0.5.tsv").read_text().splitlines()
    assert len(lines) == 600


def test_sweep_default_five_values(data_dir, tmp_path):
    out = tmp_path / "sweep"
    code = main(["sweep", *_dataset_args(data_dir), "--out", str(out)])
    assert code == 0
    for d in ("0.01", "0.15", "0.5", "0.85", "0.99"):
        assert (out / f"scores_d{d}.tsv").exists()
    summary = json.loads((out / "sweep_summary.json").read_text())
    assert [run["damping"] for run in summary["runs"]] == [0.01, 0.15, 0.5, 0.85, 0.99]
    iters = [run["iterations"] for run in summary["runs"]]
    assert iters == sorted(iters)


def test_flow_command_both_metrics(data_dir, tmp_path):
    out = tmp_path / "flow"
    code = main(["flow", *_dataset_args(data_dir), "--target-class", "347",
                 "--out", str(out)])
    assert code == 0
    lines = (out / "flow_347.csv").read_text().splitlines()
    assert lines[0] == "target_class,source_class,year,metric,value"
    metrics = {line.split(",")[3] for line in lines[1:]}
    assert metrics == {"citation-count", "pagerank-sum"}


def test_flow_single_metric(data_dir, tmp_path):
    out = tmp_path / "flow1"
    code = main(["flow", *_dataset_args(data_dir), "--target-class", "347",
                 "--metric", "citation-count", "--out", str(out)])
    assert code == 0
    lines = (out / "flow_347.csv").read_text().splitlines()
    metrics = {line.split(",")[3] for line in lines[1:]}
    assert metrics == {"citation-count"}


def test_flow_unknown_class_warns(data_dir, tmp_path, capsys):
    out = tmp_path / "flow_none"
    code = main(["flow", *_dataset_args(data_dir), "--target-class", "000",
                 "--out", str(out)])
    assert code == 0
    assert "no patent has class" in capsys.readouterr().err
    assert len((out / "flow_000.csv").read_text().splitlines()) == 1


def test_exclude_flow_command(data_dir, tmp_path):
    out = tmp_path / "exflow"
    code = main(["exclude-flow", *_dataset_args(data_dir), "--target-class", "347",
                 "--exclude-assignee", "canoncorp", "--out", str(out)])
    assert code == 0
    assert (out / "flow_347.csv").exists()
    report = json.loads((out / "exclusion_report.json").read_text())
    assert report["assignee"] == "canoncorp"
    assert report["excluded_total"] == (
        report["owned"] + report["cites_owned"] + report["cited_by_owned"]
    )
    summary = json.loads((out / "summary.json").read_text())
    assert summary["nodes"] == 600 - report["excluded_total"]


def test_patent_command(data_dir, tmp_path):
    # pick a patent id with citations from the generated metadata
    first_id = (data_dir / "patents.tsv").read_text().splitlines()[0].split("\t")[0]
    out = tmp_path / "patent"
    code = main(["patent", *_dataset_args(data_dir), first_id, "--out", str(out)])
    assert code == 0
    payload = json.loads((out / f"patent_{first_id}.json").read_text())
    assert payload["patent_id"] == first_id
    assert payload["score"] > 0
    assert isinstance(payload["breakdown"], list)


def test_patent_unknown_id_domain_error(data_dir, tmp_path, capsys):
    code = main(["patent", *_dataset_args(data_dir), "doesnotexist",
                 "--out", str(tmp_path / "x")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_missing_file_is_error(tmp_path, capsys):
    code = main(["rank", "--citations", str(tmp_path / "no.tsv"),
                 "--patents", str(tmp_path / "no2.tsv"), "--out", str(tmp_path)])
    assert code == 1


def test_bad_damping_domain_error(data_dir, tmp_path, capsys):
    code = main(["rank", *_dataset_args(data_dir), "--damping", "1.5",
                 "--out", str(tmp_path / "x")])
    assert code == 1


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["not-a-command"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["rank", "--citations", "c.tsv"])  # missing --patents
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["flow", "--citations", "a", "--patents", "b",
              "--target-class", "1", "--metric", "bogus"])
    assert exc.value.code == 2


def test_env_defaults_and_flag_precedence(data_dir, tmp_path, monkeypatch):
    out_env = tmp_path / "env"
    monkeypatch.setenv("PATENTFLOW_EPSILON", "1e-4")
    monkeypatch.setenv("PATENTFLOW_DAMPING", "0.15")
    code = main(["rank", *_dataset_args(data_dir), "--out", str(out_env)])
    assert code == 0
    summary = json.loads((out_env / "summary.json").read_text())
    assert summary["epsilon"] == 1e-4
    assert summary["damping"] == 0.15

    out_flag = tmp_path / "flag"
    code = main(["rank", *_dataset_args(data_dir), "--damping", "0.85",
                 "--epsilon", "1e-8", "--out", str(out_flag)])
    assert code == 0
    summary = json.loads((out_flag / "summary.json").read_text())
    assert summary["epsilon"] == 1e-8
    assert summary["damping"] == 0.85


def test_module_invocation_subprocess(data_dir, tmp_path):
    out = tmp_path / "subproc"
    proc = subprocess.run(
        [sys.executable, "-m", "patentflow", "rank", *_dataset_args(data_dir),
         "--damping", "0.5", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (out / "summary.json").exists()
    report = json.loads(proc.stderr.strip().splitlines()[0])
    assert report["nodes"] == 600
