import logging

import pytest

from holofem.base import ImproperConfiguration
from holofem.config import load_config, parse_bool


@pytest.mark.parametrize("value", ["1", "true", "Yes", " ON "])
def test_parse_bool_true(value):
    assert parse_bool(value) is True


@pytest.mark.parametrize("value", ["0", "False", "no", "off"])
def test_parse_bool_false(value):
    assert parse_bool(value) is False


def test_parse_bool_invalid():
    with pytest.raises(ImproperConfiguration, match="expected a boolean"):
        parse_bool("maybe")


class TestLoadConfig:
    def test_values(self, tmp_path):
        path = tmp_path / "holofem.cfg"
        path.write_text(
            "# unit square runs\n"
            "\n"
            "quad-points = 32\n"
            "threshold=1e-3   # lower than usual\n"
            "no_progress = true\n"
        )
        config = load_config(path)
        assert config == {"quad_points": "32", "threshold": "1e-3", "no_progress": "true"}
        assert config.quad_points == "32"

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.cfg"
        path.write_text("# nothing\n")
        assert load_config(path) == {}

    @pytest.mark.parametrize("line", ["seed", "= 3", "quad points = 3"])
    def test_malformed_line(self, tmp_path, line):
        path = tmp_path / "bad.cfg"
        path.write_text("seed = 3\n%s\n" % line)
        with pytest.raises(ImproperConfiguration, match="line 2: expected key=value"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ImproperConfiguration, match="cannot read config file"):
            load_config(tmp_path / "missing.cfg")

    def test_repeated_key(self, tmp_path, caplog):
        path = tmp_path / "twice.cfg"
        path.write_text("seed = 1\nseed = 2\n")
        with caplog.at_level(logging.WARNING, logger="holofem.config"):
            config = load_config(path)
        assert config.seed == "2"
        assert "line 2: seed set more than once" in caplog.text
