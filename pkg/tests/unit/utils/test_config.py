import logging

import pytest

from saltext.cellnopt.utils import config

try:
    from salt.exceptions import SaltInvocationError
except ImportError:
    pass


@pytest.mark.parametrize(
    "value,expected",
    [(True, True), ("yes", True), (" On ", True), ("1", True), ("false", False), ("0", False)],
)
def test_parse_bool(value, expected):
    assert config.parse_bool(value) is expected


def test_parse_bool_rejects():
    with pytest.raises(ValueError):
        config.parse_bool("maybe")


def test_parse_times():
    assert config.parse_times("0, 10 30") == (0.0, 10.0, 30.0)
    assert config.parse_times([5, "7.5"]) == (5.0, 7.5)


def test_flatten():
    assert config.flatten({"alpha": 1, "ga": {"seed": 3}}) == {"alpha": 1, "ga.seed": 3}


def test_defaults():
    cfg = config.load_config()
    assert cfg == config.PipelineConfig()
    assert cfg.alpha == 1e-4
    assert cfg.preprocessing.max_inputs == 2
    assert cfg.ga.population_size == 50


def test_read_config_file(tmp_path):
    path = tmp_path / "cellnopt.conf"
    path.write_text("# run settings\n\nalpha = 0.01\nga.seed=9\npreprocessing.do_expand=no\n")
    assert config.read_config_file(str(path)) == {
        "alpha": "0.01",
        "ga.seed": "9",
        "preprocessing.do_expand": "no",
    }
    cfg = config.load_config(path=str(path))
    assert cfg.alpha == 0.01
    assert cfg.ga.seed == 9
    assert cfg.preprocessing.do_expand is False


def test_read_config_file_bad_line(tmp_path):
    path = tmp_path / "cellnopt.conf"
    path.write_text("alpha=0.1\nseed 3\n")
    with pytest.raises(SaltInvocationError, match="line 2"):
        config.read_config_file(str(path))


def test_read_config_file_missing(tmp_path):
    with pytest.raises(SaltInvocationError, match="Cannot read configuration file"):
        config.read_config_file(str(tmp_path / "missing.conf"))
    with pytest.raises(SaltInvocationError, match="Cannot read configuration file"):
        config.load_config(path=str(tmp_path))


def test_precedence(tmp_path):
    path = tmp_path / "cellnopt.conf"
    path.write_text("alpha=0.01\nga.seed=9\n")
    profiles = {"lab": {"alpha": 0.5, "na_fac": 0.5, "ga": {"seed": 1, "workers": 2}}}
    cfg = config.load_config(
        profile="lab",
        option=profiles.get,
        path=str(path),
        overrides={"ga": {"seed": 4}, "na_fac": None},
    )
    assert cfg.alpha == 0.01
    assert cfg.na_fac == 0.5
    assert cfg.ga.seed == 4
    assert cfg.ga.workers == 2


def test_missing_profile_warns(caplog):
    with caplog.at_level(logging.WARNING):
        cfg = config.load_config(profile="nope", option=lambda name: None)
    assert cfg == config.PipelineConfig()
    assert "nope is empty or missing" in caplog.text


def test_profile_needs_option():
    with pytest.raises(SaltInvocationError, match="inside Salt"):
        config.load_config(profile="lab")


def test_profile_must_be_mapping():
    with pytest.raises(SaltInvocationError, match="not a mapping"):
        config.load_config(profile="lab", option=lambda name: "alpha=1")


@pytest.mark.parametrize(
    "settings,match",
    [
        ({"ga.colour": "red"}, "Unknown configuration key"),
        ({"alpha": "lots"}, "Invalid value for alpha"),
        ({"alpha": "-1"}, "alpha must be >= 0"),
        ({"max_iter": "0"}, "max_iter must be >= 1"),
        ({"preprocessing.max_inputs": "1"}, "at least 2"),
        ({"ga.population_size": "1"}, "Invalid GA configuration"),
    ],
)
def test_build_config_errors(settings, match):
    with pytest.raises(SaltInvocationError, match=match):
        config.build_config(settings)


def test_optional_values():
    cfg = config.build_config({"max_iter": "none", "times": "10, 30", "ga.bit_mutation_prob": ""})
    assert cfg.max_iter is None
    assert cfg.times == (10.0, 30.0)
    assert cfg.ga.bit_mutation_prob is None


def test_to_dict():
    cfg = config.build_config({"pkn": "toy.sif", "times": "10", "ga.workers": "3"})
    flat = cfg.to_dict()
    assert "pkn" not in flat
    assert flat["times"] == [10.0]
    assert flat["ga.workers"] == 3
    assert flat["preprocessing.max_inputs"] == 2
    assert "ga.workers" not in cfg.to_dict(with_workers=False)
