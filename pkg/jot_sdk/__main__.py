#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""Command line interface"""

import sys
import argparse
import logging

from jot_sdk.cli import (
    accept,
    add_logging_options,
    bridge,
    diagnose,
    dickman,
    exit_code,
    posterior,
    sample,
    urn,
    version,
)
from jot_sdk import config, log
from jot_sdk.errors import ExitCode, JotError

logger = logging.getLogger(__name__)


def main() -> None:
    """
    CLI - run as a standalone python app

    :return:
    """

    parser = argparse.ArgumentParser(
        prog="jot",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        description="JOT feature allocation CLI. 'jot' samples scaled-subordinator "
        "measures, feature matrices and partitions, runs posterior inference "
        "and the verification battery.",
    )

    add_logging_options(parser)
    subparsers = parser.add_subparsers(dest="command", help="JOT commands")

    # Sample measures and feature matrices
    sample.add_subparser(subparsers)

    # Stream urn rows
    urn.add_subparser(subparsers)

    # Posterior and predictive sampling
    posterior.add_subparser(subparsers)

    # Poisson-Kingman bridge partitions
    bridge.add_subparser(subparsers)

    # Dickman density table
    dickman.add_subparser(subparsers)

    # Single diagnostics
    diagnose.add_subparser(subparsers)

    # Acceptance battery
    accept.add_subparser(subparsers)

    # Output SDK version
    version.add_subparser(subparsers)

    arguments = parser.parse_args()
    log.setup_logging(
        arguments.loglevel or logging.WARNING,
        log_format=config.settings.LOG_FORMAT,
    )

    if not getattr(arguments, "command", None):
        # Print usage
        parser.print_help()
        sys.exit(ExitCode.CONFIG_ERROR)

    try:
        code = arguments.command(arguments)
    except JotError as ex:
        logger.error("%s: %s", type(ex).__name__, ex)
        code = exit_code(ex)
    except Exception:
        logger.exception("Unexpected failure")
        code = ExitCode.NUMERICAL_FAILURE

    if code:
        sys.exit(int(code))


if __name__ == "__main__":
    main()
