"""Command-line interface: exit codes and artifact stability."""

import json

import pytest

from fppgraph.cli import (EXIT_IO, EXIT_OK, EXIT_USAGE, SCHEMA_VERSION, main)


def _edge_file(tmp_path, name="g.txt"):
    p = tmp_path / name
    lines = []
    for i in range(30):
        lines.append(f"{i} {(i + 1) % 30} {1.0 + (i % 5)}")
        lines.append(f"{i} {(i + 7) % 30} {2.0 + (i % 3)}")
    p.write_text("\n".join(lines) + "\n")
    return str(p)


def test_partition_auto(tmp_path, capsys):
    path = _edge_file(tmp_path)
    code = main(["partition", "--graph", path, "--weighted", "--undirected",
                 "--auto", "--cache-bytes", "2000", "--no-timestamp"])
    assert code == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["schema_version"] == SCHEMA_VERSION
    assert payload["partition_count"] >= 1
    assert "generated_at" not in payload


def test_partition_export_plan(tmp_path, capsys):
    path = _edge_file(tmp_path)
    part_file = tmp_path / "plan.txt"
    code = main(["partition", "--graph", path, "--weighted", "--undirected",
                 "--random", "3", "--part-out", str(part_file),
                 "--no-timestamp"])
    assert code == EXIT_OK
    rows = part_file.read_text().split()
    assert len(rows) == 30
    assert set(rows) <= {"0", "1", "2"}


def test_run_sssp_verified(tmp_path, capsys):
    path = _edge_file(tmp_path)
    code = main(["run", "--app", "sssp", "--graph", path, "--weighted",
                 "--undirected", "--random", "4", "--sources", "0,5,10",
                 "--verify", "--no-timestamp"])
    assert code == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["verified"] is True
    assert payload["metrics"]["work_ratio"] > 0


def test_run_sssp_on_unweighted_is_usage_error(tmp_path, capsys):
    path = _edge_file(tmp_path)
    code = main(["run", "--app", "sssp", "--graph", path, "--undirected",
                 "--random", "2"])
    assert code == EXIT_USAGE


def test_missing_graph_file_is_io_error(capsys):
    code = main(["run", "--app", "bfs", "--graph", "/does/not/exist",
                 "--undirected", "--random", "2"])
    assert code == EXIT_IO


def test_bad_flag_is_usage_error(capsys):
    assert main(["run", "--app", "sssp", "--gen", "grid:4x4",
                 "--no-such-flag"]) == EXIT_USAGE


def test_generated_graph_apps(capsys):
    for app, extra in (("bc", ["--samples", "8"]),
                       ("ncp", ["--seed-fraction", "0.1"]),
                       ("ll", ["--landmarks", "3"])):
        code = main(["run", "--app", app, "--gen", "grid:6x6", "--weighted",
                     "--random", "4", "--no-timestamp"] + extra)
        assert code == EXIT_OK, app
        capsys.readouterr()


def test_bench_modes(tmp_path, capsys):
    out = tmp_path / "bench.json"
    code = main(["bench", "--mode", "schedulers", "--gen", "grid:6x6",
                 "--weighted", "--kind", "sssp", "--queries", "4",
                 "--repeats", "2", "--parts", "4", "--no-timestamp",
                 "-o", str(out)])
    assert code == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["schema_version"] == SCHEMA_VERSION

    csv_out = tmp_path / "bench.csv"
    code = main(["bench", "--mode", "yield", "--gen", "grid:6x6",
                 "--weighted", "--kind", "sssp", "--queries", "4",
                 "--thresholds", "1,2", "--parts", "4", "--format", "csv",
                 "--no-timestamp", "-o", str(csv_out)])
    assert code == EXIT_OK
    assert csv_out.read_text().startswith("functor,")


def test_reruns_are_byte_identical(tmp_path):
    path = _edge_file(tmp_path)
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        code = main(["run", "--app", "ppr", "--graph", path, "--weighted",
                     "--undirected", "--random", "4", "--sources", "1,2",
                     "--no-timestamp", "-o", str(out)])
        assert code == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_rw_run_with_verify(capsys):
    code = main(["run", "--app", "rw", "--gen", "random:50:200",
                 "--weighted", "--undirected", "--random", "3",
                 "--walk-length", "20", "--sources", "0,1", "--verify",
                 "--no-timestamp"])
    assert code == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["verified"] is True
