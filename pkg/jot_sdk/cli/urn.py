#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""CLI: "urn" command"""

import argparse
import logging

from jot_sdk import cli
from jot_sdk.cli.sample import replicate_name
from jot_sdk.errors import ExitCode

logger = logging.getLogger(__name__)


def _urn(doc, output: cli.Output, arguments) -> ExitCode:
    from jot_sdk import urns
    from jot_sdk.cli import schema

    schema.require(doc, "urn", "model", "n")
    model = schema.build_urn(doc.model, doc.pstar)

    # rows are streamed, replicates run in order
    states = []
    for i, stream in enumerate(cli.streams(doc.seed, doc.replicates)):

        def write_rows(f, stream=stream):
            states.append(urns.stream_rows(model, doc.n, stream, f))

        output.write_csv(replicate_name("rows", "csv", i, doc.replicates), write_rows)

    output.write_json(
        "stats.json",
        {
            "model": model.kind,
            "replicates": doc.replicates,
            "states": [
                {
                    "n": state.n,
                    "K_n": state.K_n,
                    "classes": {str(k): v for k, v in sorted(state.classes.items())},
                }
                for state in states
            ],
        },
    )
    return ExitCode.OK


def execute(arguments):
    """Run an urn scheme row by row"""
    return cli.run("urn", arguments, _urn)


def add_subparser(subparsers):
    """
    Command arguments parser

    :param subparsers:
    :return:
    """

    urn_parser = subparsers.add_parser(
        "urn",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Stream rows of an urn scheme.",
        description="Run the ibp, stable_jot or bfry urn and write rows.csv "
        "(feature ids per row) and stats.json.",
    )
    cli.add_run_options(urn_parser)
    urn_parser.set_defaults(command=execute)
