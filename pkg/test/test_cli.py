import json
import os

import pytest

from src.cli_commands import (
    EXIT_FAILED,
    EXIT_INCONCLUSIVE,
    EXIT_MALFORMED,
    EXIT_NOT_FOUND,
    EXIT_OK,
    build_parser,
    run,
)
from src.plane_geometry import two_line_scheme


@pytest.fixture
def workspace(tmp_path):
    """Configurazione con log, cache e rapporti dentro tmp_path."""
    config = {
        "log_directory": str(tmp_path / "logs"),
        "cache_path": str(tmp_path / "alpha_cache.jsonl"),
        "reports": {"output_directory": str(tmp_path / "reports")},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    return tmp_path


def _run(workspace, capsys, *argv):
    code = run(list(argv) + ["--config", str(workspace / "config.json")])
    out = capsys.readouterr().out
    return code, out


def _write(path, document):
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


def test_dims_single_point(workspace, capsys):
    scheme = _write(workspace / "point.json", {"points": [[1, 0, 0]], "multiplicities": [1]})
    code, out = _run(workspace, capsys, "dims", "--scheme", scheme, "--degree", "1")
    assert code == EXIT_OK
    assert json.loads(out)["dimension"] == 2


def test_dims_two_line_scheme(workspace, capsys):
    scheme = _write(workspace / "two_line.json", two_line_scheme(2).to_json())
    code, out = _run(workspace, capsys, "dims", "--scheme", scheme, "--degree", "2")
    assert code == EXIT_OK
    assert json.loads(out)["dimension"] == 1


def test_dims_empty_scheme(workspace, capsys):
    scheme = _write(workspace / "empty.json", {"points": [], "multiplicities": []})
    code, out = _run(workspace, capsys, "dims", "--scheme", scheme, "--degree", "3")
    assert code == EXIT_OK
    assert json.loads(out)["dimension"] == 10


def test_dims_type_with_multiplicity(workspace, capsys):
    code, out = _run(workspace, capsys, "dims", "--type", "2,3", "--mult", "2", "--degree", "3")
    assert code == EXIT_OK
    assert json.loads(out)["dimension"] == 0


def test_alpha_of_type(workspace, capsys):
    code, out = _run(workspace, capsys, "alpha", "--type", "2,3", "--t", "1")
    assert code == EXIT_OK
    assert json.loads(out) == {"t": 1, "alpha": 2}
    assert os.path.exists(workspace / "alpha_cache.jsonl")


def test_alpha_not_found_below_cap(workspace, capsys):
    code, out = _run(workspace, capsys, "alpha", "--type", "2,3", "--t", "2", "--degree-cap", "3")
    assert code == EXIT_NOT_FOUND
    assert json.loads(out)["alpha"] is None


def test_alpha_generic_configuration(workspace, capsys):
    code, out = _run(workspace, capsys, "alpha", "--type", "1,2", "--generic-seed", "7", "--no-cache")
    assert code == EXIT_OK
    assert json.loads(out)["alpha"] == 2


def test_certificate_and_replay(workspace, capsys):
    saved = workspace / "cert.json"
    code, out = _run(workspace, capsys, "certificate", "--type", "3,4,5", "--mu", "1", "--d", "3", "--m", "2",
                     "--output", str(saved))
    document = json.loads(out)
    assert code == EXIT_OK
    assert document["degree"] == 5
    assert document["verified"]
    assert document["rank_check"]["agrees"]

    code, out = _run(workspace, capsys, "certificate", "--verify-only", str(saved))
    assert code == EXIT_OK
    assert json.loads(out)["certificate_id"] == document["certificate_id"]

    tampered = json.loads(saved.read_text(encoding="utf-8"))
    tampered["final"]["degree"] += 1
    code, out = _run(workspace, capsys, "certificate", "--verify-only", _write(workspace / "bad.json", tampered))
    assert code == EXIT_FAILED
    assert json.loads(out)["verified"] is False


def test_certificate_inconclusive(workspace, capsys):
    code, out = _run(workspace, capsys, "certificate", "--type", "1,2", "--mu", "1", "--d", "3")
    assert code == EXIT_INCONCLUSIVE
    assert json.loads(out)["certificate"]["terminal_reason"] == "Inconclusive"


def test_certificate_requires_parameters(workspace, capsys):
    code, _ = _run(workspace, capsys, "certificate", "--type", "1,2")
    assert code == EXIT_MALFORMED


def test_waldschmidt_report(workspace, capsys):
    code, out = _run(workspace, capsys, "waldschmidt", "--type", "1,2", "--t-max", "2", "--m-max", "1")
    document = json.loads(out)
    assert code == EXIT_OK
    assert document["upper_bound"]["value"] == "3/2"
    assert document["stabilization"]["passed"]


def test_basis(workspace, capsys):
    scheme = _write(workspace / "two_line.json", two_line_scheme(2).to_json())
    code, out = _run(workspace, capsys, "basis", "--scheme", scheme, "--degree", "2")
    document = json.loads(out)
    assert code == EXIT_OK
    assert len(document["basis"]) == 1
    assert len(document["basis"][0]) == len(document["monomials"]) == 6


def test_demo(workspace, capsys):
    code, out = _run(workspace, capsys, "demo", "--t-max", "2")
    assert code == EXIT_OK
    assert json.loads(out)["sequences_differ"]


def test_table_writes_reports(workspace, capsys):
    code, out = _run(workspace, capsys, "table", "--b-max", "2", "--c-max", "3", "--m-max", "1")
    assert code == EXIT_OK
    assert json.loads(out)["failed"] is False
    reports = workspace / "reports"
    assert (reports / "table_report.md").exists()
    envelope = json.loads((reports / "table_report.json").read_text(encoding="utf-8"))
    assert envelope["kind"] == "table"


def test_table_markdown_output(workspace, capsys):
    code, out = _run(workspace, capsys, "table", "--b-max", "1", "--c-max", "1", "--m-max", "1",
                     "--no-write", "--format", "markdown")
    assert code == EXIT_OK
    assert "| type" in out
    assert not (workspace / "reports").exists()


def test_cache_commands(workspace, capsys):
    _run(workspace, capsys, "alpha", "--type", "2,3")
    code, out = _run(workspace, capsys, "cache", "stats")
    assert code == EXIT_OK
    assert json.loads(out)["entries"] == 1
    code, out = _run(workspace, capsys, "cache", "clear")
    assert json.loads(out)["entries"] == 0
    code, _ = _run(workspace, capsys, "cache", "stats", "--no-cache")
    assert code == EXIT_MALFORMED


@pytest.mark.parametrize("argv", [
    ["alpha", "--type", "3,2"],
    ["alpha", "--type", "2,3", "--t", "0"],
    ["dims", "--type", "2,3"],
    ["dims", "--type", "2,3", "--scheme", "x.json", "--degree", "1"],
    ["frobnicate"],
])
def test_malformed_input(workspace, capsys, argv):
    code, _ = _run(workspace, capsys, *argv)
    assert code == EXIT_MALFORMED


def test_bad_scheme_files(workspace, capsys):
    floats = _write(workspace / "floats.json", {"points": [[1, 0.5, 0]], "multiplicities": [1]})
    code, _ = _run(workspace, capsys, "dims", "--scheme", floats, "--degree", "1")
    assert code == EXIT_MALFORMED
    broken = workspace / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    code, _ = _run(workspace, capsys, "dims", "--scheme", str(broken), "--degree", "1")
    assert code == EXIT_MALFORMED
    code, _ = _run(workspace, capsys, "dims", "--scheme", str(workspace / "missing.json"), "--degree", "1")
    assert code == EXIT_MALFORMED


def test_parser_lists_subcommands():
    help_text = build_parser().format_help()
    for command in ("dims", "alpha", "waldschmidt", "certificate", "table", "basis", "demo", "cache"):
        assert command in help_text


def test_alpha_scheme_with_high_multiplicity(workspace, capsys):
    scheme = _write(workspace / "fat.json", {"points": [[1, 0, 0]], "multiplicities": [20]})
    code, out = _run(workspace, capsys, "alpha", "--scheme", scheme, "--t", "1")
    assert code == EXIT_OK
    assert json.loads(out)["alpha"] == 20
