#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

from unittest.mock import patch

import pytest
from pytest import CaptureFixture

from jot_sdk.__main__ import main
from jot_sdk.cli import accept, bridge, diagnose, dickman, posterior, sample, urn, version
from jot_sdk.errors import ExitCode, NumericalError


@pytest.mark.parametrize(
    "argv, module, name",
    [
        (["jot", "sample-measure"], sample, "execute_measure"),
        (["jot", "sample-matrix", "-c", "run.yaml"], sample, "execute_matrix"),
        (["jot", "urn", "--seed", "1"], urn, "execute"),
        (["jot", "posterior"], posterior, "execute_posterior"),
        (["jot", "predictive", "--replicates", "3"], posterior, "execute_predictive"),
        (["jot", "bridge"], bridge, "execute"),
        (["jot", "dickman", "-o", "table"], dickman, "execute"),
        (["jot", "diagnose"], diagnose, "execute"),
        (["jot", "accept", "--scale", "0.1", "--criteria", "1,8"], accept, "execute"),
        (["jot", "version"], version, "execute"),
    ],
)
def test_main(argv, module, name):
    with patch("sys.argv", new=argv):
        with patch.object(module, name, return_value=ExitCode.OK) as mock:
            main()
            mock.assert_called_once()


def test_accept_arguments():
    with patch("sys.argv", new=["jot", "accept", "--scale", "0.1", "--criteria", "1,8"]):
        with patch.object(accept, "execute", return_value=ExitCode.OK) as mock:
            main()
    arguments = mock.call_args[0][0]
    assert arguments.scale == 0.1
    assert arguments.criteria == [1, 8]


@pytest.mark.parametrize(
    "side_effect, code",
    [
        (None, ExitCode.ACCEPTANCE_FAILURE),
        (NumericalError("diverged"), ExitCode.NUMERICAL_FAILURE),
        (RuntimeError("unexpected"), ExitCode.NUMERICAL_FAILURE),
    ],
)
def test_exit_codes(side_effect, code):
    with patch("sys.argv", new=["jot", "accept"]):
        with patch.object(
            accept, "execute", return_value=ExitCode.ACCEPTANCE_FAILURE, side_effect=side_effect
        ):
            with pytest.raises(SystemExit) as ex:
                main()
    assert ex.value.code == code


def test_help(capsys: CaptureFixture):
    with patch("sys.argv", new=["jot", "don't know"]):
        with pytest.raises(SystemExit):
            main()
    with patch("sys.argv", new=["jot"]):
        with pytest.raises(SystemExit) as ex:
            main()
    assert ex.value.code == ExitCode.CONFIG_ERROR
    with patch("sys.argv", new=["jot", "--help"]):
        with pytest.raises(SystemExit):
            main()
    out = capsys.readouterr()
    assert "usage: jot [-h] [-v] [-vv] [-q]" in out.out
