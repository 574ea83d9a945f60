#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""CLI: "accept" command"""

import argparse
import logging

from jot_sdk import cli
from jot_sdk.errors import ExitCode

logger = logging.getLogger(__name__)


def criteria_list(value: str):
    """Comma-separated criterion numbers"""
    try:
        return [int(item) for item in value.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {value!r}")


def _accept(doc, output: cli.Output, arguments) -> ExitCode:
    from jot_sdk import acceptance

    report = acceptance.run_acceptance(
        doc.seed,
        scale=doc.scale,
        criteria=doc.criteria,
        jobs=cli.jobs(arguments),
        config_hash=output.config_hash,
    )
    output.write_json("report.json", report.to_json())

    failed = [r.name for r in report.reports if not r.passed]
    if failed:
        logger.error("Acceptance failed: %s", failed)
        return ExitCode.ACCEPTANCE_FAILURE

    logger.info("Acceptance passed: %s checks", len(report.reports))
    return ExitCode.OK


def execute(arguments):
    """Run the acceptance battery"""
    return cli.run("accept", arguments, _accept)


def add_subparser(subparsers):
    """
    Command arguments parser

    :param subparsers:
    :return:
    """

    accept_parser = subparsers.add_parser(
        "accept",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Run the acceptance battery.",
        description="Run the acceptance criteria and write report.json; "
        "exit status 3 if any criterion fails.",
    )
    cli.add_run_options(accept_parser)
    accept_parser.add_argument(
        "--scale",
        help="Fraction of the full replicate counts (overrides the document).",
        type=float,
        default=None,
    )
    accept_parser.add_argument(
        "--criteria",
        help="Comma-separated criterion numbers (all by default).",
        type=criteria_list,
        default=None,
    )
    accept_parser.set_defaults(command=execute)
