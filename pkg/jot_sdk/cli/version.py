#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""CLI: "version" command"""

import argparse

from jot_sdk.errors import ExitCode


def execute(*args):
    """Print SDK version"""

    from jot_sdk.__version__ import __version__

    print(__version__)
    return ExitCode.OK


def add_subparser(subparsers):
    """
    Command arguments parser

    :param subparsers:
    :return:
    """

    version_parser = subparsers.add_parser(
        "version",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Print SDK version and exit.",
    )
    version_parser.set_defaults(command=execute)
