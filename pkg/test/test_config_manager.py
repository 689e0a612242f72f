import json

import pytest

from src.config_manager import ConfigManager
from src.report_interface import ReportWriter


def _config(tmp_path, document):
    path = tmp_path / "config.json"
    path.write_text(document if isinstance(document, str) else json.dumps(document), encoding="utf-8")
    return ConfigManager(str(path))


def test_missing_file_uses_defaults(tmp_path):
    config = ConfigManager(str(tmp_path / "nested" / "config.json"))
    assert config.get_nested("rank", "rational_column_cutoff") == 91
    assert config.get_nested("verification", "max_matrix_entries") == 1_000_000
    assert (tmp_path / "nested").is_dir()


def test_invalid_json_uses_defaults(tmp_path):
    config = _config(tmp_path, "{broken")
    assert config.get("cache_path") == "data/alpha_cache.jsonl"


def test_partial_sections_are_merged(tmp_path):
    config = _config(tmp_path, {"rank": {"num_primes": 3}, "log_level": "DEBUG"})
    assert config.get_nested("rank", "num_primes") == 3
    assert config.get_nested("rank", "numpy_column_threshold") == 600
    assert config.get("log_level") == "DEBUG"


@pytest.mark.parametrize("document", [
    {"rank": {"num_primes": 0}},
    {"rank": {"rational_column_cutoff": -1}},
    {"verification": []},
    [1, 2],
])
def test_invalid_values_fall_back_to_defaults(tmp_path, document):
    config = _config(tmp_path, document)
    assert config.get_nested("rank", "num_primes") == 2
    assert config.get_nested("rank", "rational_column_cutoff") == 91


def test_get_nested_default(tmp_path):
    config = _config(tmp_path, {})
    assert config.get_nested("rank", "missing", default=7) == 7
    assert config.get_nested("log_level", "x", default="d") == "d"


def test_save_and_reload(tmp_path):
    config = _config(tmp_path, {})
    config.config["alpha"]["degree_cap_factor"] = 6
    config.save_config(config.config)
    assert ConfigManager(config.config_path).get_nested("alpha", "degree_cap_factor") == 6


def test_report_writer_formats(tmp_path):
    config = _config(tmp_path, {"reports": {"output_directory": str(tmp_path / "out")}})
    writer = ReportWriter(config_manager=config)
    rows = [{"type": "(1,2)", "value": "3/2"}, {"type": "(2,3)", "value": "2/1"}]
    assert writer.render(rows, "csv").splitlines()[0] == "type,value"
    assert "(2,3)" in writer.render(rows, "markdown")
    flat = writer.render({"a": {"b": 1}, "c": [1, 2]}, "csv")
    assert "a.b,1" in flat
    path = writer.write({"x": 1}, "sample")
    assert json.loads(open(path, encoding="utf-8").read()) == {"x": 1}
    with pytest.raises(ValueError):
        writer.render(rows, "yaml")
