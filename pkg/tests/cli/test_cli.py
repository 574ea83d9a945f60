#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

import json
import unittest
from unittest.mock import patch

import pytest
from pytest import CaptureFixture

from jot_sdk.__main__ import main
from jot_sdk.__version__ import __version__
from jot_sdk.acceptance import AcceptanceReport
from jot_sdk.cli import schema
from jot_sdk.diagnostics import TestReport
from jot_sdk.errors import ConfigError, ExitCode

IBP_DOCUMENT = {"model": "ibp", "c": 1, "theta": 1, "n": 5, "seed": 42}


def run_jot(*argv) -> int:
    with patch("sys.argv", new=["jot", "-q", *argv]):
        try:
            main()
        except SystemExit as ex:
            return int(ex.code)
    return ExitCode.OK


@pytest.fixture
def document(tmp_path):
    def write(payload, name="run.json"):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)

    return write


class TestSchema(unittest.TestCase):
    def test_flat_model(self):
        doc = schema.parse_document(dict(IBP_DOCUMENT))
        self.assertEqual(doc.model.family, "ibp")
        self.assertEqual(doc.model.params, {"c": 1, "theta": 1})
        self.assertEqual((doc.n, doc.seed), (5, 42))

    def test_nested_model(self):
        doc = schema.parse_document(
            {"model": {"family": "stable", "params": {"c": 1, "alpha": 0.5}}, "n": 3}
        )
        self.assertEqual(schema.build_levy(doc.model).family, "stable")

    def test_pointers(self):
        for payload, pointer in (
            ({"seed": -1}, "/seed"),
            ({"bogus": 1}, "/bogus"),
            ({"truncation": {"mode": "never"}}, "/truncation/mode"),
            ({"output": {"format": "xml"}}, "/output/format"),
            ({"threshold": 2.0}, "/threshold"),
        ):
            with self.assertRaises(ConfigError) as ctx:
                schema.parse_document(payload)
            self.assertEqual(ctx.exception.pointer, pointer, payload)

    def test_model_errors(self):
        doc = schema.parse_document({"model": "stable", "alpha": 1.5, "c": 1})
        with self.assertRaises(ConfigError) as ctx:
            schema.build_levy(doc.model)
        self.assertEqual(ctx.exception.pointer, "/model/params/alpha")

        with self.assertRaises(ConfigError) as ctx:
            schema.build_levy(schema.parse_document({"model": "ibp"}).model)
        self.assertEqual(ctx.exception.pointer, "/model/family")

        with self.assertRaises(ConfigError) as ctx:
            schema.build_urn(
                schema.parse_document({"model": "bfry", "sigma": 0.5}).model, schema.ScalingSpec()
            )
        self.assertEqual(ctx.exception.pointer, "/model/params/alpha")

    def test_grid(self):
        self.assertEqual(len(schema.expand_grid("0.1..5")), schema.GRID_POINTS)
        self.assertEqual(schema.expand_grid({"start": 0, "stop": 1, "num": 3}), [0.0, 0.5, 1.0])
        self.assertEqual(schema.expand_grid([1.0, 2.0]), [1.0, 2.0])

    def test_pointer_escaping(self):
        self.assertEqual(schema.pointer(("a/b", 0, "__root__")), "/a~1b/0")


def test_sample_matrix_reproducible(tmp_path, document):
    path = document(IBP_DOCUMENT)
    assert run_jot("sample-matrix", "-c", path, "-o", str(tmp_path / "first")) == ExitCode.OK
    assert run_jot("sample-matrix", "-c", path, "-o", str(tmp_path / "second")) == ExitCode.OK

    for name in ("matrix.csv", "stats.json"):
        first = (tmp_path / "first" / name).read_bytes()
        assert first == (tmp_path / "second" / name).read_bytes()

    lines = (tmp_path / "first" / "matrix.csv").read_text().splitlines()
    assert lines[0].startswith("# config_hash=") and lines[0].endswith("seed=42")
    assert len(lines) == 2 + 5

    stats = json.loads((tmp_path / "first" / "stats.json").read_text())
    assert stats["seed"] == 42
    assert stats["replicates"] == 1


def test_seed_override(tmp_path, document):
    path = document(IBP_DOCUMENT)
    assert run_jot("sample-matrix", "-c", path, "--seed", "7", "-o", str(tmp_path)) == ExitCode.OK
    assert json.loads((tmp_path / "stats.json").read_text())["seed"] == 7


def test_sample_measure(tmp_path, document):
    path = document(
        {"model": "scale_invariant", "theta": 1.0, "replicates": 2, "truncation": {"value": 1e-3}}
    )
    assert run_jot("sample-measure", "-c", path, "-o", str(tmp_path)) == ExitCode.OK
    payload = json.loads((tmp_path / "measure.json").read_text())
    assert len(payload["measures"]) == 2
    assert len(payload["total_mass"]) == 2


def test_urn(tmp_path, document):
    path = document({"model": "ibp", "c": 2, "theta": 1, "n": 4, "seed": 3})
    assert run_jot("urn", "-c", path, "-o", str(tmp_path)) == ExitCode.OK
    lines = (tmp_path / "rows.csv").read_text().splitlines()
    assert len(lines) == 1 + 4
    stats = json.loads((tmp_path / "stats.json").read_text())
    assert stats["states"][0]["n"] == 4


def test_dickman(tmp_path, document):
    path = document({"c": 1, "grid": [0.5, 1.5], "output": {"format": "json"}})
    assert run_jot("dickman", "-c", path, "-o", str(tmp_path)) == ExitCode.OK
    payload = json.loads((tmp_path / "dickman.json").read_text())
    assert payload["pdf"][0] == pytest.approx(0.56146, abs=1e-4)


def test_dickman_csv(tmp_path, document):
    path = document({"grid": "0.1..5"})
    assert run_jot("dickman", "-c", path, "-o", str(tmp_path)) == ExitCode.OK
    lines = (tmp_path / "dickman.csv").read_text().splitlines()
    assert lines[1] == "t,pdf,cdf"
    assert len(lines) == 2 + 50


def test_diagnose_lecam(tmp_path, document):
    path = document({"test": "lecam", "inputs": {"weights": [0.5, 0.5]}})
    assert run_jot("diagnose", "-c", path, "-o", str(tmp_path)) == ExitCode.OK
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["pass"] is True
    assert report["tv"] == pytest.approx(0.19818, abs=1e-4)


def test_bridge_coupled(tmp_path, document):
    path = document(
        {"model": "scale_invariant", "theta": 1.0, "n": 4, "coupled": True, "replicates": 3}
    )
    assert run_jot("bridge", "-c", path, "-o", str(tmp_path)) == ExitCode.OK
    payload = json.loads((tmp_path / "partition.json").read_text())
    assert payload["mode"] == "coupled"
    assert len(payload["partitions"]) == 3


def test_accept_failure(tmp_path, mocker):
    report = AcceptanceReport(
        seed=0,
        scale=1.0,
        reports=[TestReport(name="lecam/two_halves", passed=False)],
        passed=False,
    )
    mocker.patch("jot_sdk.acceptance.run_acceptance", return_value=report)
    assert run_jot("accept", "-o", str(tmp_path)) == ExitCode.ACCEPTANCE_FAILURE
    assert json.loads((tmp_path / "report.json").read_text())["pass"] is False


@pytest.mark.parametrize(
    "payload, argv",
    [
        ({"model": "ibp", "c": 1, "seed": -1, "n": 3}, ["sample-matrix"]),
        ({"model": "ibp", "c": 1}, ["sample-matrix"]),
        ({"model": "stable", "c": 1, "alpha": 2.0, "n": 3}, ["sample-matrix"]),
        ({"model": "beta_process", "c": 1, "theta": 1, "n": 3}, ["bridge"]),
        ({"test": "nothing"}, ["diagnose"]),
    ],
)
def test_config_errors(tmp_path, document, payload, argv):
    path = document(payload)
    assert run_jot(*argv, "-c", path, "-o", str(tmp_path)) == ExitCode.CONFIG_ERROR


def test_missing_document(tmp_path):
    missing = str(tmp_path / "missing.yaml")
    assert run_jot("sample-matrix", "-c", missing) == ExitCode.CONFIG_ERROR


def test_yaml_document(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("model: ibp\nc: 1\ntheta: 1\nn: 2\n")
    assert run_jot("sample-matrix", "-c", str(path), "-o", str(tmp_path)) == ExitCode.OK


def test_version(capsys: CaptureFixture):
    assert run_jot("version") == ExitCode.OK
    assert capsys.readouterr().out.strip() == __version__
