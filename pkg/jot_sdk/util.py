#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""Utility functions"""

import math
import hashlib
import logging
from contextvars import copy_context
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Text, TypeVar

import numpy as np
import orjson
import pydantic

from jot_sdk import config

logger = logging.getLogger(__name__)

T = TypeVar("T")

ORJSON_OPTIONS = orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_SORT_KEYS


def orjson_dumps(v, *, default):
    """
    orjson.dumps returns bytes, to match standard json.dumps we need to decode

    :param v:
    :param default:
    :return:
    """
    return orjson.dumps(v, default=default, option=ORJSON_OPTIONS).decode()


def round_floats(value: Any, digits: Optional[int] = None) -> Any:
    """
    Recursively round floats to a number of significant digits,
        so that emitted files are byte-identical across reruns

    :param value:
    :param digits:  significant digits (OUTPUT_DIGITS setting by default)
    :return:
    """
    digits = digits or config.settings.OUTPUT_DIGITS

    if isinstance(value, dict):
        return {k: round_floats(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v, digits) for v in value]
    if isinstance(value, np.ndarray):
        return round_floats(value.tolist(), digits)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value) or value == 0.0:
            return value
        return float(f"{value:.{digits}g}")
    return value


def dumps(value: Any) -> bytes:
    """Serialize to JSON with rounded floats and sorted keys"""
    if isinstance(value, pydantic.BaseModel):
        value = value.dict()
    return orjson.dumps(
        round_floats(value), option=ORJSON_OPTIONS | orjson.OPT_INDENT_2
    )


def config_hash(document: Dict[Text, Any]) -> Text:
    """
    Stable hash of a config document: sha256 of its canonical JSON

    :param document:
    :return:
    """
    canonical = orjson.dumps(document, option=ORJSON_OPTIONS)
    return hashlib.sha256(canonical).hexdigest()


class ContextVarExecutor(ThreadPoolExecutor):
    """Copy existing contextVars before executing"""

    def submit(self, *args, **kwargs):
        ctx = copy_context()

        return super().submit(ctx.run, *args, **kwargs)


def run_replicates(
    func: Callable[..., T], streams: Sequence[Any], jobs: Optional[int] = None
) -> List[T]:
    """
    Run `func(stream)` for every derived stream, in parallel if jobs > 1

        results are returned in stream order regardless of completion order

    :param func:
    :param streams:
    :param jobs:
    :return:
    """
    jobs = jobs or config.settings.JOT_JOBS
    if jobs <= 1 or len(streams) <= 1:
        return [func(stream) for stream in streams]

    logger.debug("Running %s replicates with %s jobs", len(streams), jobs)
    with ContextVarExecutor(max_workers=jobs) as executor:
        return list(executor.map(func, streams))


def replicate(
    func: Callable[[Any], T],
    count: int,
    rng: Any,
    jobs: Optional[int] = None,
    chunk: int = 1000,
) -> List[T]:
    """
    Call `func(stream)` `count` times: replicates are grouped in chunks,
        each chunk consumes its own stream derived from `rng`

        The chunking does not depend on `jobs`, so results are identical
        for any degree of parallelism.

    :param func:
    :param count:
    :param rng:     RngStream
    :param jobs:
    :param chunk:
    :return:
    """
    sizes = [min(chunk, count - start) for start in range(0, count, chunk)]

    def run_chunk(pair):
        size, stream = pair
        return [func(stream) for _ in range(size)]

    parts = run_replicates(run_chunk, list(zip(sizes, rng.spawn(len(sizes)))), jobs)
    return [value for part in parts for value in part]


class BaseModel(pydantic.BaseModel):
    """
    Override Pydantic's BaseModel defaults:

        - use faster orjson for objects serialization (numpy arrays included)

        - make all instances immutable
            (with an exception of `urns.UrnState` - single owner, mutated in place)

        - allow arbitrary types (numpy arrays, scipy distributions)

    """

    class Config:
        """Alter default config for base models"""

        json_dumps = orjson_dumps

        allow_mutation = False

        allow_population_by_field_name = True

        arbitrary_types_allowed = True

        use_enum_values = True

    def dict(self, *args, **kwargs) -> Dict[Text, Any]:
        """
        Alter parent defaults when exporting:

            - exclude "None" values
            - export fields by alias

        """
        params = {
            "exclude_none": kwargs["exclude_none"]
            if "exclude_none" in kwargs
            else True,
            "by_alias": kwargs["by_alias"] if "by_alias" in kwargs else True,
        }

        return super().dict(*args, **{**kwargs, **params})
