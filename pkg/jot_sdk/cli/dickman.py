#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""CLI: "dickman" command"""

import argparse
import csv
import logging

from jot_sdk import cli
from jot_sdk.errors import ConfigError, DomainError, ExitCode

logger = logging.getLogger(__name__)

DEFAULT_GRID = "0.1..5"


def _dickman(doc, output: cli.Output, arguments) -> ExitCode:
    import numpy as np

    from jot_sdk import levy
    from jot_sdk.cli import schema
    from jot_sdk.config import settings

    c = 1.0 if doc.c is None else doc.c
    grid = schema.expand_grid(DEFAULT_GRID) if doc.grid is None else doc.grid
    if not grid:
        raise ConfigError("/grid", "empty grid")

    t = np.asarray(grid, dtype=float)
    if np.any(t <= 0):
        raise ConfigError("/grid", "grid points must be positive")
    try:
        pdf = levy.dickman_pdf(c, t)
        cdf = levy.dickman_cdf(c, t)
    except DomainError as ex:
        raise ConfigError(f"/{ex.name}", ex.reason) from ex

    if doc.output.format == "json":
        output.write_json("dickman.json", {"c": c, "t": t, "pdf": pdf, "cdf": cdf})
        return ExitCode.OK

    digits = settings.OUTPUT_DIGITS

    def write_table(stream):
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["t", "pdf", "cdf"])
        for row in zip(t, pdf, cdf):
            writer.writerow([f"{value:.{digits}g}" for value in row])

    output.write_csv("dickman.csv", write_table)
    return ExitCode.OK


def execute(arguments):
    """Tabulate the Dickman density"""
    return cli.run("dickman", arguments, _dickman)


def add_subparser(subparsers):
    """
    Command arguments parser

    :param subparsers:
    :return:
    """

    dickman_parser = subparsers.add_parser(
        "dickman",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Tabulate the Dickman density.",
        description="Density and distribution function of the scale-invariant "
        "total mass on a grid; write dickman.csv (plot-ready).",
    )
    cli.add_run_options(dickman_parser)
    dickman_parser.set_defaults(command=execute)
