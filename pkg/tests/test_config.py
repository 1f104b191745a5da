# test_config.py

import pytest

from chshlab.config import LabConfig, config, lab_config, lab_settings, load_config_file, protocol_config
from chshlab.errors import ConfigError


def test_env_defaults(monkeypatch):
    monkeypatch.setenv("CHSHLAB_SEED", "7")
    monkeypatch.setenv("CHSHLAB_PROBE_RESTARTS", "5")
    cfg = LabConfig.from_env()
    assert cfg.seed == 7 and cfg.probe_restarts == 5
    assert cfg.jordan_tol == pytest.approx(1e-7)


def test_missing_file_means_no_values():
    assert load_config_file(None) == {}


def test_keys_keep_their_case(tmp_path):
    path = tmp_path / "lab.cfg"
    path.write_text("# desk scale\nn=10\nN=3\nn_s=10\nm=2\n")
    values = load_config_file(str(path))
    assert values == {"n": "10", "N": "3", "n_s": "10", "m": "2"}
    cfg = protocol_config(values)
    assert (cfg.n, cfg.N, cfg.n_s, cfg.m) == (10, 3, 10, 2)


def test_overrides_win_over_the_file():
    cfg = protocol_config({"seed": "4", "delta": "0.4"}, seed=9)
    assert cfg.seed == 9 and cfg.delta == pytest.approx(0.4)


def test_lab_settings_in_the_file():
    before = dict(vars(config))
    values = {"probe_restarts": "12", "log_level": "DEBUG", "n": "10"}
    lab = lab_config(values)
    assert lab.probe_restarts == 12 and lab.log_level == "DEBUG"
    assert protocol_config(values).n == 10
    assert vars(config) == before


def test_lab_settings_apply_inside_the_block_only():
    before = dict(vars(config))
    with lab_settings(lab_config({"jordan_tol": "1e-5"})) as active:
        assert active is config
        assert config.jordan_tol == pytest.approx(1e-5)
    assert vars(config) == before


@pytest.mark.parametrize(
    "values",
    [
        {"colour": "blue"},
        {"n": "ten"},
        {"delta": "1.5"},
        {"q": "12"},
        {"probe_restarts": "many"},
    ],
)
def test_bad_values_are_config_errors(values):
    with pytest.raises(ConfigError):
        lab_config(values)
        protocol_config(values)


def test_unreadable_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config_file(str(tmp_path / "missing.cfg"))
    path = tmp_path / "empty.cfg"
    path.write_text("n\n")
    with pytest.raises(ConfigError):
        load_config_file(str(path))
