#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""CLI: "diagnose" command"""

#
# Runs one diagnostic on the document's `inputs`:
#
#   chi_square  {hist_a, hist_b, level=1e-3}
#   ks          {samples_a, samples_b, level=1e-2}
#   tv          {samples_a, samples_b, bins=50, threshold=0.02}
#   lecam       {weights, draws=100000}
#   tail_index  {samples | path, k_frac=0.1, bootstrap=200}
#   tau_beta    {beta, window=[lower, upper], bins=50, threshold=0.05}, model
#
# Sample lists may be given as `<name>_path`: a CSV file of numbers.
#

import argparse
import logging
from typing import Any, Dict, Text

from jot_sdk import cli
from jot_sdk.errors import ConfigError, ExitCode

logger = logging.getLogger(__name__)

TESTS = ("chi_square", "ks", "tv", "lecam", "tail_index", "tau_beta")


def _input(inputs: Dict[Text, Any], name: Text, default: Any = ...) -> Any:
    import numpy as np

    if name in inputs:
        return inputs[name]
    if f"{name}_path" in inputs:
        path = inputs[f"{name}_path"]
        try:
            return np.loadtxt(path, delimiter=",", comments="#", ndmin=1)
        except (OSError, ValueError) as ex:
            raise ConfigError(f"/inputs/{name}_path", f"cannot read {path}: {ex}") from ex
    if default is ...:
        raise ConfigError(f"/inputs/{name}", "required")
    return default


def _diagnose(doc, output: cli.Output, arguments) -> ExitCode:
    from jot_sdk import diagnostics
    from jot_sdk.cli import schema
    from jot_sdk.diagnostics import TestReport
    from jot_sdk.special import RngStream

    schema.require(doc, "diagnose", "test")
    inputs = doc.inputs
    rng = RngStream(doc.seed)

    if doc.test == "chi_square":
        level = _input(inputs, "level", 1e-3)
        outcome = diagnostics.chi_square_two_sample(
            _input(inputs, "hist_a"), _input(inputs, "hist_b")
        )
        report = TestReport(
            name="chi_square",
            statistic=outcome.statistic,
            p_value=outcome.p_value,
            threshold=level,
            passed=outcome.p_value > level,
        )

    elif doc.test == "ks":
        level = _input(inputs, "level", 1e-2)
        outcome = diagnostics.ks_two_sample(
            _input(inputs, "samples_a"), _input(inputs, "samples_b")
        )
        report = TestReport(
            name="ks",
            statistic=outcome.statistic,
            p_value=outcome.p_value,
            threshold=level,
            passed=outcome.p_value > level,
        )

    elif doc.test == "tv":
        threshold = _input(inputs, "threshold", 0.02)
        estimate = diagnostics.tv_histogram(
            _input(inputs, "samples_a"),
            _input(inputs, "samples_b"),
            bins=int(_input(inputs, "bins", 50)),
        )
        report = TestReport(
            name="tv",
            tv=estimate.tv,
            threshold=threshold,
            passed=estimate.tv <= threshold,
            details={"noise": estimate.noise},
        )

    elif doc.test == "lecam":
        result = diagnostics.lecam_check(
            _input(inputs, "weights"), rng, draws=int(_input(inputs, "draws", 100_000))
        )
        report = TestReport(
            name="lecam",
            tv=result.tv,
            threshold=result.bound,
            passed=result.passed,
            details={"method": result.method, "stderr": result.stderr},
        )

    elif doc.test == "tail_index":
        result = diagnostics.tail_index(
            _input(inputs, "samples"),
            k_frac=_input(inputs, "k_frac", 0.1),
            rng=rng,
            bootstrap=int(_input(inputs, "bootstrap", 200)),
        )
        report = TestReport(
            name="tail_index",
            statistic=result.index,
            passed=result.power_law,
            details=result.dict(),
        )

    elif doc.test == "tau_beta":
        schema.require(doc, "diagnose tau_beta", "model")
        threshold = _input(inputs, "threshold", 0.05)
        result = diagnostics.tau_beta_compare(
            schema.build_levy(doc.model),
            _input(inputs, "beta"),
            tuple(_input(inputs, "window")),
            doc.replicates,
            rng,
            bins=int(_input(inputs, "bins", 50)),
            trunc=schema.build_truncation(doc.truncation),
            jobs=cli.jobs(arguments),
        )
        report = TestReport(
            name="tau_beta",
            tv=result.tv,
            threshold=threshold,
            passed=result.tv <= threshold,
            details={"stderr": result.stderr, "window_count": result.window_count},
        )

    else:
        raise ConfigError("/test", f"expected one of {TESTS}")

    report = report.copy(update={"seeds": [doc.seed]})
    if not report.passed:
        logger.warning("Diagnostic %s did not pass", report.name)

    output.write_json("report.json", report.to_json())
    return ExitCode.OK


def execute(arguments):
    """Run one diagnostic"""
    return cli.run("diagnose", arguments, _diagnose)


def add_subparser(subparsers):
    """
    Command arguments parser

    :param subparsers:
    :return:
    """

    diagnose_parser = subparsers.add_parser(
        "diagnose",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Run a single diagnostic.",
        description=f"Run one of {', '.join(TESTS)} and write report.json.",
    )
    cli.add_run_options(diagnose_parser)
    diagnose_parser.set_defaults(command=execute)
