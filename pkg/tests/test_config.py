#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

from unittest.mock import patch, mock_open
import unittest.mock
import tempfile

from jot_sdk import config

CONFIG_INI = """
[quad]
tol = 1e-8
limit = 50

[truncation]
epsilon = ${JOT_EPSILON:1e-5}

[output]
digits = ${JOT_DIGITS_WITHOUT_DEFAULT}
"""


class TestLoadConfig(unittest.TestCase):
    def test_get_config_file(self):
        with patch("os.environ", new={}):
            self.assertEqual(config.get_config_file(), config.JOT_CONFIG_FILE)
        with patch("os.environ", new={"CONFIG_FILE": "config.file"}):
            self.assertEqual("config.file", config.get_config_file())

    def test_init_config(self):
        with patch("builtins.open", mock_open(read_data="[quad]\ntol=1e-8")):
            self.assertEqual("1e-8", config.init_config("some_file")["quad"]["tol"])
        with patch("builtins.open", side_effect=FileNotFoundError):
            with self.assertRaises(RuntimeError):
                config.get_config_file("some_file")

    def test_init_config_from_dict(self):
        with patch("os.environ", new={}):
            parser = config.init_config({"dickman": {"step": "0.01"}})
        self.assertEqual("0.01", parser["dickman"]["step"])

    def test_read_config(self):
        with patch("builtins.open", mock_open(read_data=CONFIG_INI)):
            self.assertEqual(
                ["quad", "truncation", "output"], config.read_config("path").sections()
            )
        with patch("builtins.open", mock_open(read_data=CONFIG_INI)), patch(
            "os.environ", new={}
        ):
            self.assertEqual("1e-5", config.read_config("path")["truncation"]["epsilon"])
        with patch("builtins.open", mock_open(read_data=CONFIG_INI)), patch(
            "os.environ", new={"JOT_EPSILON": "1e-3"}
        ):
            self.assertEqual("1e-3", config.read_config("path")["truncation"]["epsilon"])
        with patch("builtins.open", side_effect=FileNotFoundError):
            self.assertEqual([], config.read_config("path").sections())

    def test_clean_section(self):
        with patch("builtins.open", mock_open(read_data=CONFIG_INI)):
            section = config.read_config("path")["quad"]
        self.assertEqual({"tol": 1e-8, "limit": 50}, config.clean_section(section))
        self.assertEqual({"tol": 1e-8, "limit": 3}, config.clean_section(section, limit=3))

    def test_load_additional(self):
        with patch("builtins.open", mock_open(read_data=CONFIG_INI)):
            with tempfile.TemporaryDirectory() as tmp_dir, tempfile.NamedTemporaryFile(
                dir=tmp_dir, suffix=".conf"
            ) as tmp_file, tempfile.NamedTemporaryFile(
                dir=tmp_dir, suffix=".noconf"
            ), patch(
                "os.environ",
                new={"CONFIG_ADDITIONAL_LOCATION": f"{tmp_dir}, path_dont_exist"},
            ):
                self.assertEqual([tmp_file.name], config.load_additional())

        with patch("os.environ", new={"CONFIG_ADDITIONAL_LOCATION": ""}):
            self.assertFalse(config.load_additional())


def test_defaults():
    from jot_sdk.config import Settings

    settings = Settings()
    assert settings.TRUNCATION_EPSILON == 1e-6
    assert settings.POISSON_RATE_MAX == 1e9
    assert settings.OUTPUT_DIGITS == 12


def test_extra_attributes_allowed(monkeypatch):
    from jot_sdk.config import settings, Settings

    # Should not raise ValueError: "Settings" object has no field "NEW_KID_ON_THE_BLOCK"
    settings.NEW_KID_ON_THE_BLOCK = "1"

    # Configuration can be also loaded from a dictionary-like object
    monkeypatch.setattr(
        Settings.Config, "conf_file", {"new-section": {"my-key": "value"}}
    )
    settings = Settings()
    assert settings.NEW_SECTION_MY_KEY == "value"  # noqa


def test_config_file_overrides_defaults(monkeypatch):
    from jot_sdk.config import Settings

    monkeypatch.setattr(Settings.Config, "conf_file", {"quad": {"tol": "1e-8"}})
    assert Settings().QUAD_TOL == 1e-8
