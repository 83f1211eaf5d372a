from pathlib import Path

import pytest

from modules.data import config_data
from modules.utils import SettingsError


def test_parse_config_text():
    text = "# run\npipeline = sht\n\n seed=3 # inline\nout=results\nseed = 4\n"
    assert config_data.parse_config_text(text) == {"pipeline": "sht", "seed": "4", "out": "results"}


@pytest.mark.parametrize("text", ["pipeline sht", "=3"])
def test_parse_config_text_rejects_malformed_line(text):
    with pytest.raises(SettingsError, match="Line 1"):
        config_data.parse_config_text(text)


def test_load_config_file(tmp_path: Path):
    path = tmp_path / "run.cfg"
    path.write_text("pipeline=twophase\nsynthetic=two-plateau\n")
    config_data.load_config_file(path)
    assert config_data.pipeline.get() == "twophase"
    assert config_data.synthetic.get() == "two-plateau"


def test_load_missing_config_file(tmp_path: Path):
    with pytest.raises(SettingsError):
        config_data.load_config_file(tmp_path / "absent.cfg")


def test_entry_defaults_and_parsing():
    assert config_data.seed.get() == 0
    assert config_data.out.get() == Path("out")
    assert config_data.input_path.get() is None
    config_data.seed.set(12)
    assert config_data.settings["seed"] == "12"
    assert config_data.seed.get() == 12
    config_data.raw_dumps.set(True)
    assert config_data.settings["raw_dumps"] == "true"
    assert config_data.raw_dumps.get() is True


def test_entry_parse_error():
    config_data.settings["threads"] = "two"
    with pytest.raises(SettingsError, match="threads"):
        config_data.threads.get()


def test_entry_get_once_resets():
    config_data.noise_sigma.set(0.25)
    assert config_data.noise_sigma.get_once() == 0.25
    assert config_data.noise_sigma.get() == 0.0
    assert "noise_sigma" not in config_data.settings


def test_check_keys_lists_valid_keys():
    config_data.settings.update({"pipeline": "sht", "beta": "0.1", "betta": "0.2"})
    with pytest.raises(SettingsError) as err:
        config_data.check_keys(["beta", "iters"])
    assert "betta" in str(err.value)
    assert "iters" in str(err.value)
    assert "pipeline" in str(err.value)


def test_check_keys_accepts_known_keys():
    config_data.settings.update({"pipeline": "sht", "seed": "1", "beta": "0.1"})
    config_data.check_keys(["beta"])


def test_check_required():
    with pytest.raises(SettingsError, match="pipeline"):
        config_data.check_required()
    config_data.pipeline.set("sht")
    with pytest.raises(SettingsError, match="input or synthetic"):
        config_data.check_required()
    config_data.synthetic.set("two-plateau")
    config_data.check_required()
    config_data.input_path.set("image.pgm")
    with pytest.raises(SettingsError):
        config_data.check_required()
