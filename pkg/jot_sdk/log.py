#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""Logging"""

import os
import time
import contextlib
import logging.config
from contextvars import ContextVar
from traceback import format_exc
from typing import Any, Dict, Iterator, Optional

import numpy as np
import orjson

from jot_sdk import config

#
# Run context: command, config hash and seed of the current run.
#   Copied into replicate workers by util.ContextVarExecutor.
#
run_context: ContextVar[Dict[str, Any]] = ContextVar("run_context", default={})


@contextlib.contextmanager
def bind_run(**values: Any) -> Iterator[Dict[str, Any]]:
    """
    Attach values to the run context for the duration of the block

    >>> with bind_run(command="urn", seed=42):
    >>>     ...

    """
    token = run_context.set({**run_context.get(), **values})
    try:
        yield run_context.get()
    finally:
        run_context.reset(token)


def setup_logging(
    log_level: Optional[int] = None, log_format: Optional[config.FormatType] = None
):
    """
    Set log level either to the level provided as argument
    or get it from LOG_LEVEL setting

    :param log_level:
    :param log_format:
    :return:
    """
    log_level = log_level or config.settings.LOG_LEVEL
    log_format = log_format or config.settings.LOG_FORMAT

    logging.getLogger().setLevel(log_level)

    try:
        logging.config.dictConfig(get_config_dict(log_level, log_format))
    except KeyError:
        raise RuntimeError(f"Invalid log format: {log_format!r}")


class CloudGELFFormatter(logging.Formatter):
    """Graylog Extended Format (GELF) formatter"""

    def format(self, record: logging.LogRecord):
        context = run_context.get()

        line = {
            # Timestamp in milliseconds
            "@timestamp": int(round(time.time() * 1000)),
            "level": record.levelname,
            "process": os.getpid(),
            "thread": str(record.thread),
            "logger": record.name,
            "message": record.getMessage(),
            "command": context.get("command"),
            "configHash": context.get("config_hash"),
            "seed": context.get("seed"),
        }

        if record.exc_info:
            line["_traceback"] = format_exc()

        return orjson.dumps(line, default=str).decode()


def get_config_dict(log_level: int, log_format: config.FormatType) -> Dict:
    """Logging configuration dictionary"""

    handlers = {
        "default": {
            "level": log_level,
            "formatter": "standard",
            "class": "logging.StreamHandler",
        },
    }
    loggers = {
        "": {"handlers": ["default"], "level": log_level, "propagate": True},
    }

    conf = {
        "gelf": {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "standard": {"class": "jot_sdk.log.CloudGELFFormatter"},
            },
            "handlers": handlers,
            "loggers": loggers,
        },
        "human": {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "standard": {
                    "format": "%(asctime)s %(levelname)-8s %(name)s - %(message)s",
                }
            },
            "handlers": handlers,
            "loggers": loggers,
        },
    }

    return conf[log_format]


###############################################################################
#                                                                             #
#  Limit log message size                                                     #
#                                                                             #
###############################################################################
def _trim(s):
    """Trim long string to LOG_ENTRY_MAX_STRING(+3) length"""
    return (
        s
        if not isinstance(s, str) or len(s) < config.settings.LOG_ENTRY_MAX_STRING
        else s[: config.settings.LOG_ENTRY_MAX_STRING] + "..."
    )


def _copy(d):
    """Recursively copy values, trimming long strings and long sequences"""

    if isinstance(d, dict):
        return {k: _copy(v) for k, v in d.items()}
    elif isinstance(d, (list, tuple, np.ndarray)):
        items = list(np.ravel(d).tolist()) if isinstance(d, np.ndarray) else list(d)
        limit = config.settings.LOG_ENTRY_MAX_ITEMS
        head = [_copy(v) for v in items[:limit]]
        return head + ["..."] if len(items) > limit else head
    else:
        return _trim(d)


def prepare_for_logging(record):
    """
    Trim long strings and sequences before logging a record

    :param record:  value to log
    :return:
    """
    return _copy(record)
