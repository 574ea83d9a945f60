#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

import json
import logging
import unittest
from logging import makeLogRecord, INFO

import numpy as np
import pytest

from jot_sdk import log
from jot_sdk.config import FormatType


def record(**kwargs):
    return makeLogRecord({"levelno": INFO, "levelname": "INFO", "msg": "message", **kwargs})


class TestGelf(unittest.TestCase):
    def test_log_record(self):
        with log.bind_run(command="urn", config_hash="abc", seed=42):
            line = json.loads(log.CloudGELFFormatter().format(record()))

        self.assertEqual(line["level"], "INFO")
        self.assertEqual(line["message"], "message")
        self.assertEqual(
            [line["command"], line["configHash"], line["seed"]], ["urn", "abc", 42]
        )
        self.assertNotIn("_traceback", line)

    def test_context_is_reset(self):
        with log.bind_run(command="urn"):
            with log.bind_run(seed=1) as context:
                self.assertEqual(context, {"command": "urn", "seed": 1})
            self.assertEqual(log.run_context.get(), {"command": "urn"})
        line = json.loads(log.CloudGELFFormatter().format(record()))
        self.assertIsNone(line["command"])

    def test_traceback(self):
        try:
            raise ValueError("boom")
        except ValueError:
            import sys

            line = json.loads(log.CloudGELFFormatter().format(record(exc_info=sys.exc_info())))
        self.assertIn("boom", line["_traceback"])


class TestSetup(unittest.TestCase):
    def test_config_dict(self):
        gelf = log.get_config_dict(logging.DEBUG, FormatType.GELF)
        self.assertEqual(
            gelf["formatters"]["standard"]["class"], "jot_sdk.log.CloudGELFFormatter"
        )
        human = log.get_config_dict(logging.DEBUG, FormatType.HUMAN)
        self.assertIn("format", human["formatters"]["standard"])

    def test_invalid_format(self):
        with self.assertRaises(RuntimeError):
            log.setup_logging(logging.INFO, "xml")

    def test_setup(self):
        log.setup_logging(logging.ERROR, FormatType.HUMAN)
        self.assertEqual(logging.getLogger().level, logging.ERROR)


@pytest.mark.parametrize(
    "value, expected",
    [
        ("x" * 200, "x" * 150 + "..."),
        ("short", "short"),
        (list(range(25)), list(range(20)) + ["..."]),
        (np.arange(3), [0, 1, 2]),
        ({"a": {"b": "y" * 151}}, {"a": {"b": "y" * 150 + "..."}}),
    ],
)
def test_prepare_for_logging(value, expected):
    assert log.prepare_for_logging(value) == expected
