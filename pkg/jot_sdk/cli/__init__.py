#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""CLI: utility functions"""

import argparse
import logging
import pathlib
from typing import Any, Callable, Dict, List, Optional, Text, Union

import yaml

from jot_sdk import util
from jot_sdk.config import settings
from jot_sdk.errors import ConfigError, ExitCode
from jot_sdk.special import RngStream

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT = "out"

# Command-line options that replace document fields
OVERRIDES = ("seed", "replicates", "scale", "criteria")


def add_logging_options(parser: argparse.ArgumentParser) -> None:
    """
    Add common logging argument parameters

    :param parser:
    :return:
    """
    logging_arguments = parser.add_argument_group("Logging options")

    logging_arguments.add_argument(
        "-v",
        "--verbose",
        help="Set logging to INFO.",
        action="store_const",
        dest="loglevel",
        const=logging.INFO,
    )
    logging_arguments.add_argument(
        "-vv",
        "--debug",
        help="Set logging to DEBUG.",
        action="store_const",
        dest="loglevel",
        const=logging.DEBUG,
    )
    logging_arguments.add_argument(
        "-q",
        "--quiet",
        help="Set logging to ERROR.",
        action="store_const",
        dest="loglevel",
        const=logging.ERROR,
    )


def add_run_options(parser: argparse.ArgumentParser) -> None:
    """
    Add the options shared by every run command

    :param parser:
    :return:
    """
    run_arguments = parser.add_argument_group("Run options")

    run_arguments.add_argument(
        "-c", "--config", help="Run document (JSON or YAML).", default=None
    )
    run_arguments.add_argument(
        "-o", "--out", help="Output directory.", default=DEFAULT_OUTPUT
    )
    run_arguments.add_argument(
        "--seed", help="Root seed (overrides the document).", type=int, default=None
    )
    run_arguments.add_argument(
        "--replicates",
        help="Number of replicates (overrides the document).",
        type=int,
        default=None,
    )
    run_arguments.add_argument(
        "--jobs",
        help="Parallel jobs for replicate loops (JOT_JOBS by default).",
        type=int,
        default=None,
    )


def load_document(path: Optional[Text]) -> Dict[Text, Any]:
    """
    Read a run document: YAML is a superset of JSON, so both load

    :param path:
    :return:
    """
    if path is None:
        return {}

    try:
        with open(path, encoding="utf-8") as f:
            document = yaml.safe_load(f)
    except OSError as ex:
        raise ConfigError("", f"cannot read {path}: {ex.strerror}")
    except yaml.YAMLError as ex:
        raise ConfigError("", f"{path} is not valid JSON/YAML: {ex}")

    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ConfigError("", "the run document must be an object")
    return document


def effective_document(arguments: argparse.Namespace) -> Dict[Text, Any]:
    """Run document with command-line overrides applied"""
    document = load_document(getattr(arguments, "config", None))
    for name in OVERRIDES:
        if getattr(arguments, name, None) is not None:
            document[name] = getattr(arguments, name)
    return document


class Output:
    """
    Output directory of a run: every file carries the config hash and seed

        JSON files embed them as fields, CSV files as a leading comment line.
    """

    def __init__(self, directory: Union[Text, pathlib.Path], config_hash: Text, seed: int):
        self.directory = pathlib.Path(directory)
        self.config_hash = config_hash
        self.seed = seed
        self.written: List[pathlib.Path] = []

    def path(self, name: Text) -> pathlib.Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        return self.directory / name

    def header(self) -> Dict[Text, Any]:
        return {"config_hash": self.config_hash, "seed": self.seed}

    def write_json(self, name: Text, payload: Dict[Text, Any]) -> pathlib.Path:
        path = self.path(name)
        path.write_bytes(util.dumps({**self.header(), **payload}) + b"\n")
        logger.info("Written: %s", path)
        self.written.append(path)
        return path

    def write_csv(self, name: Text, writer: Callable) -> pathlib.Path:
        """`writer(stream)` writes the CSV body"""
        path = self.path(name)
        with open(path, "w", encoding="utf-8", newline="") as stream:
            stream.write(f"# config_hash={self.config_hash} seed={self.seed}\n")
            writer(stream)
        logger.info("Written: %s", path)
        self.written.append(path)
        return path


def streams(seed: int, replicates: int) -> List[RngStream]:
    """One derived stream per replicate, in replicate order"""
    return RngStream(seed).spawn(replicates)


def jobs(arguments: argparse.Namespace) -> int:
    return getattr(arguments, "jobs", None) or settings.JOT_JOBS


def exit_code(ex: BaseException) -> ExitCode:
    """Exit status for an exception escaping a command"""
    return getattr(ex, "exit_code", ExitCode.NUMERICAL_FAILURE)


def run(name: Text, arguments: argparse.Namespace, body: Callable) -> ExitCode:
    """
    Validate the run document, bind the run context and call
        `body(document, output, arguments)`

    :param name:        command name
    :param arguments:   parsed command line
    :param body:
    :return:
    """
    from jot_sdk import log
    from jot_sdk.cli import schema

    document = effective_document(arguments)
    run_document = schema.parse_document(document)
    digest = util.config_hash({"command": name, **document})
    output = Output(arguments.out, digest, run_document.seed)

    with log.bind_run(command=name, config_hash=digest, seed=run_document.seed):
        logger.info("Running %s (config hash %s)", name, digest)
        logger.debug("Run document: %s", log.prepare_for_logging(document))
        return body(run_document, output, arguments)
