from __future__ import annotations

import pytest

from hyperweave.chat import ENV_API_KEY
from hyperweave.cli import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, run_command
from hyperweave.hgt import write_hgt

_GENERATE = ["--nodes", "40", "--edges", "80", "--steps", "2", "--attempts", "5", "--seed", "3"]


def _summary(directory) -> dict[str, str]:
    lines = (directory / "summary.txt").read_text().splitlines()
    return dict(line.split("=", 1) for line in lines)


def _tree(directory) -> dict[str, bytes]:
    return {
        str(p.relative_to(directory)): p.read_bytes()
        for p in sorted(directory.rglob("*")) if p.is_file()
    }


def test_no_command_is_a_usage_error() -> None:
    assert run_command([]) == EXIT_USAGE


def test_unknown_flag_is_a_usage_error(tmp_path) -> None:
    assert run_command(["measure", "--input", str(tmp_path / "g.hgt"), "--bogus"]) == EXIT_USAGE


def test_missing_input_is_a_usage_error(tmp_path) -> None:
    assert run_command(["measure", "--input", str(tmp_path / "absent.hgt")]) == EXIT_USAGE
    assert run_command(["measure"]) == EXIT_USAGE


def test_bad_config_is_a_usage_error(tmp_path) -> None:
    config = tmp_path / "bad.json"
    config.write_text('{"attach_probability": 3}')
    argv = ["generate", "--config", str(config), "--output", str(tmp_path / "out")]
    assert run_command(argv) == EXIT_USAGE
    assert run_command(["generate", "--config", str(tmp_path / "absent.json")]) == EXIT_USAGE


def test_malformed_hypergraph_is_a_runtime_error(tmp_path) -> None:
    path = tmp_path / "broken.hgt"
    path.write_text("#HGT1\n0\t1,2\nnot a line\n")
    assert run_command(["measure", "--input", str(path), "--output", str(tmp_path / "out")]) == EXIT_RUNTIME


def test_undecodable_hypergraph_is_a_runtime_error(tmp_path) -> None:
    path = tmp_path / "binary.hgt"
    path.write_bytes(b"#HGT1\n0\t1,2\n1\t\xfe\xff\n")
    assert run_command(["measure", "--input", str(path), "--output", str(tmp_path / "out")]) == EXIT_RUNTIME


def test_measure_static_hypergraph(tmp_path, make_random_hypergraph) -> None:
    graph = make_random_hypergraph(1)
    graph.temporal = False
    path = tmp_path / "static.hgt"
    write_hgt(graph, path)
    out = tmp_path / "out"
    assert run_command(["measure", "--input", str(path), "--output", str(out)]) == EXIT_OK
    summary = _summary(out)
    for key in ("P6", "P7", "P8"):
        assert summary[f"{key}.status"] == "skipped"
    assert summary["P1.status"] == "ok"
    assert (out / "report" / "P1_degree.csv").exists()
    assert not (out / "report" / "P6_temporal_locality.csv").exists()


def test_compare_with_itself(tmp_path, make_random_hypergraph, capsys) -> None:
    path = tmp_path / "g.hgt"
    write_hgt(make_random_hypergraph(2, min_size=2), path)
    out = tmp_path / "out"
    argv = ["compare", "--input", str(path), "--generated", str(path), "--output", str(out)]
    assert run_command(argv) == EXIT_OK
    summary = _summary(out)
    assert summary["average_gamma"] == "1"
    assert summary["P1.gamma"] == "1"
    assert (out / "report" / "comparison.csv").exists()
    assert "Average gamma: 1.0000" in capsys.readouterr().out


def test_generate_replays_byte_for_byte(tmp_path) -> None:
    first, second = tmp_path / "a", tmp_path / "b"
    assert run_command(["generate", *_GENERATE, "--output", str(first)]) == EXIT_OK
    assert run_command(["generate", *_GENERATE, "--output", str(second)]) == EXIT_OK
    tree = _tree(first)
    assert {"generated.hgt", "counters.csv", "summary.txt"} <= set(tree)
    assert any(name.startswith("plots/") for name in tree)
    assert tree == _tree(second)
    assert _summary(first)["backend"] == "oracle"


def test_generate_against_reference(tmp_path, make_random_hypergraph) -> None:
    reference = tmp_path / "ref.hgt"
    write_hgt(make_random_hypergraph(3, num_nodes=40, num_edges=100, min_size=2), reference)
    out = tmp_path / "out"
    argv = ["generate", *_GENERATE, "--reference", str(reference), "--output", str(out)]
    assert run_command(argv) == EXIT_OK
    assert "average_gamma" in _summary(out)


def test_generate_with_profiles(tmp_path) -> None:
    profiles = tmp_path / "profiles.csv"
    profiles.write_text("".join(f"{i},dept=d{i % 3},Member {i}\n" for i in range(25)))
    out = tmp_path / "out"
    argv = ["generate", "--input", str(profiles), "--edges", "40", "--steps", "1",
            "--output", str(out)]
    assert run_command(argv) == EXIT_OK
    assert _summary(out)["nodes"] == "25"


def test_unparsable_profiles_are_a_usage_error(tmp_path) -> None:
    profiles = tmp_path / "profiles.csv"
    profiles.write_text("0,dept=a,Lead\n1,dept=b,Counsel, part time\n")
    argv = ["generate", "--input", str(profiles), "--output", str(tmp_path / "out")]
    assert run_command(argv) == EXIT_USAGE


def test_remote_backend_without_credential(tmp_path, monkeypatch) -> None:
    monkeypatch.delenv(ENV_API_KEY, raising=False)
    out = tmp_path / "out"
    argv = ["generate", "--backend", "remote", "--base-url", "http://127.0.0.1:9",
            "--output", str(out)]
    assert run_command(argv) == EXIT_RUNTIME
    assert not (out / "generated.hgt").exists()


def test_simulate_writes_rank_degree_outputs(tmp_path) -> None:
    argv = ["simulate", "--nodes", "50", "--edges", "600", "--size", "3", "--seed", "5"]
    first, second = tmp_path / "a", tmp_path / "b"
    assert run_command([*argv, "--output", str(first)]) == EXIT_OK
    assert run_command([*argv, "--output", str(second)]) == EXIT_OK
    assert _tree(first) == _tree(second)
    summary = _summary(first)
    assert summary["zipf.status"] == "ok"
    assert summary["zipf.selections"] == "1200"
    assert (first / "plots" / "rank_degree.svg").exists()
    assert (first / "report" / "rank_degree.csv").exists()


def test_simulate_with_too_few_selections(tmp_path) -> None:
    out = tmp_path / "out"
    argv = ["simulate", "--nodes", "20", "--edges", "10", "--size", "3", "--output", str(out)]
    assert run_command(argv) == EXIT_OK
    assert _summary(out)["zipf.status"].startswith("insufficient data")


@pytest.mark.parametrize("size", ["1", "0"])
def test_simulate_rejects_edges_below_two_nodes(tmp_path, size: str) -> None:
    argv = ["simulate", "--nodes", "20", "--edges", "10", "--size", size,
            "--output", str(tmp_path / "out")]
    assert run_command(argv) == EXIT_USAGE


def test_sweep_grid(tmp_path) -> None:
    argv = ["sweep", *_GENERATE, "--p-values", "0.55,0.85", "--k-values", "1,3"]
    first, second = tmp_path / "a", tmp_path / "b"
    assert run_command([*argv, "--output", str(first)]) == EXIT_OK
    assert run_command([*argv, "--output", str(second)]) == EXIT_OK
    rows = (first / "sweep.csv").read_text().splitlines()
    assert len(rows) == 5
    assert (first / "sweep.csv").read_bytes() == (second / "sweep.csv").read_bytes()


@pytest.mark.parametrize("grid", [["--p-values", "x"], ["--backend", "remote"]])
def test_sweep_usage_errors(tmp_path, grid) -> None:
    argv = ["sweep", *_GENERATE, *grid, "--output", str(tmp_path / "out")]
    assert run_command(argv) == EXIT_USAGE
