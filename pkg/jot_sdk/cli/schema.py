#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""CLI: run document schema"""

#
# One schema for all commands:
#
#   {model: {family, params}, n, replicates, seed,
#    truncation: {mode, value}, pstar: {kind, params}, output: {format}, ...}
#
# A flat form {model: "ibp", c: 1, theta: 1, n: 5} is accepted as well:
# keys that are not run options become model parameters.
#

from typing import Any, Dict, Iterable, List, Optional, Text, Union

import numpy as np
from pydantic import Extra, ValidationError, root_validator, validator

from jot_sdk import levy, measures, urns
from jot_sdk.config import settings
from jot_sdk.errors import ConfigError, DomainError
from jot_sdk.levy import LevyDensity, TruncationMode, TruncationRule
from jot_sdk.measures import ScalingKind, ScalingLaw
from jot_sdk.util import BaseModel

# Models served by the urn schemes rather than a Lévy density
URN_KINDS = ("ibp", "stable_jot", "bfry")

# Flat documents: these keys always go to the model parameters
MODEL_KEYS = ("c",)

OUTPUT_FORMATS = ("csv", "json")

GRID_POINTS = 50


class Schema(BaseModel):
    """Unknown keys are schema violations"""

    class Config:
        extra = Extra.forbid


class ModelSpec(Schema):
    family: Text

    params: Dict[Text, Any] = {}


class TruncationSpec(Schema):
    mode: TruncationMode = TruncationMode.RELATIVE_FLOOR

    value: float = None  # type: ignore

    @validator("value", pre=True, always=True)
    def default_value(cls, value):
        return settings.TRUNCATION_EPSILON if value is None else value


class ScalingSpec(Schema):
    kind: ScalingKind = ScalingKind.LARGEST_JUMP

    params: Dict[Text, Any] = {}


class OutputSpec(Schema):
    format: Text = "csv"

    @validator("format")
    def known(cls, value):
        if value not in OUTPUT_FORMATS:
            raise ValueError(f"expected one of {OUTPUT_FORMATS}")
        return value


class ObservationSpec(Schema):
    """Observed rows: either per-feature counts or per-row feature ids"""

    n: Optional[int] = None

    counts: Optional[List[int]] = None

    rows: Optional[List[List[int]]] = None

    @root_validator(skip_on_failure=True)
    def one_form(cls, values):
        if (values.get("counts") is None) == (values.get("rows") is None):
            raise ValueError("give exactly one of counts or rows")
        if values.get("counts") is not None and values.get("n") is None:
            raise ValueError("counts need the row count n")
        return values


class RunDocument(Schema):
    """Validated run document"""

    model: Optional[ModelSpec] = None

    n: Optional[int] = None

    replicates: int = 1

    seed: int = 0

    truncation: TruncationSpec = TruncationSpec()

    pstar: ScalingSpec = ScalingSpec()

    output: OutputSpec = OutputSpec()

    # sample-measure: scaled subordinator ζ·λ instead of JOT(λ, P°)
    zeta: Optional[float] = None

    # bridge
    threshold: float = 1.0

    max_tries: int = 100_000

    coupled: bool = False

    surrogate_power: Optional[float] = None

    # posterior, predictive
    observations: Optional[ObservationSpec] = None

    variant: Text = "conditional"

    route: Text = "direct"

    # dickman
    c: Optional[float] = None

    grid: Optional[List[float]] = None

    # diagnose
    test: Optional[Text] = None

    inputs: Dict[Text, Any] = {}

    # accept
    scale: float = 1.0

    criteria: Optional[List[int]] = None

    @root_validator(pre=True)
    def flat_model(cls, values):
        model = values.get("model")
        if isinstance(model, str):
            values = dict(values)
            params = {
                key: values.pop(key)
                for key in list(values)
                if key not in cls.__fields__ or key in MODEL_KEYS
            }
            values["model"] = {"family": model, "params": params}
        return values

    @validator("n")
    def rows(cls, value):
        if value is not None and value < 0:
            raise ValueError("must be non-negative")
        return value

    @validator("replicates", "max_tries")
    def positive_count(cls, value):
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @validator("seed")
    def non_negative(cls, value):
        if value < 0:
            raise ValueError("must be non-negative")
        return value

    @validator("threshold")
    def unit_threshold(cls, value):
        if not 0 < value <= 1:
            raise ValueError("must be in (0, 1]")
        return value

    @validator("scale")
    def positive_scale(cls, value):
        if not value > 0:
            raise ValueError("must be positive")
        return value

    @validator("grid", pre=True)
    def expand(cls, value):
        return expand_grid(value)


def expand_grid(value: Any) -> Any:
    """
    A grid is a list of points, "start..stop" (50 points),
        or {start, stop, num}
    """
    if isinstance(value, str):
        start, sep, stop = value.partition("..")
        if not sep:
            raise ValueError("expected 'start..stop'")
        value = {"start": float(start), "stop": float(stop)}
    if isinstance(value, dict):
        unknown = set(value) - {"start", "stop", "num"}
        if unknown:
            raise ValueError(f"unknown grid keys {sorted(unknown)}")
        value = np.linspace(
            float(value["start"]), float(value["stop"]), int(value.get("num", GRID_POINTS))
        ).tolist()
    return value


def pointer(loc: Iterable[Union[int, Text]]) -> Text:
    """JSON pointer of a pydantic error location"""
    parts = [str(part).replace("~", "~0").replace("/", "~1") for part in loc]
    return "/" + "/".join(part for part in parts if part != "__root__")


def from_validation(ex: ValidationError, prefix: Text = "") -> ConfigError:
    """First error of a pydantic validation failure as a ConfigError"""
    error = ex.errors()[0]
    return ConfigError(prefix + pointer(error["loc"]), error["msg"])


def parse_document(document: Dict[Text, Any]) -> RunDocument:
    """
    Validate a run document

    :param document:
    :return:
    """
    try:
        return RunDocument.parse_obj(document)
    except ValidationError as ex:
        raise from_validation(ex) from ex


def require(doc: RunDocument, command: Text, *names: Text):
    """Command-specific required fields"""
    for name in names:
        if getattr(doc, name) is None:
            raise ConfigError(f"/{name}", f"required by {command}")


def _param_error(ex: DomainError, params: Dict[Text, Any], prefix: Text) -> ConfigError:
    if ex.name in params:
        return ConfigError(f"{prefix}/params/{ex.name}", ex.reason)
    return ConfigError(prefix, str(ex))


def build_levy(model: ModelSpec) -> LevyDensity:
    """
    Lévy density of a model specification

    :param model:
    :return:
    """
    if model.family in URN_KINDS:
        raise ConfigError("/model/family", f"{model.family} is an urn model, not a Lévy family")
    if model.family == "custom":
        raise ConfigError("/model/family", "custom densities are only available from Python")
    if model.family not in levy.FAMILIES:
        raise ConfigError("/model/family", f"expected one of {levy.FAMILIES + URN_KINDS}")

    try:
        return levy.make_levy(model.family, **model.params)
    except DomainError as ex:
        raise _param_error(ex, model.params, "/model") from ex


def build_scaling(spec: ScalingSpec) -> ScalingLaw:
    """Scaling law P° of a `pstar` specification"""
    try:
        return measures.make_scaling(spec.kind, **dict(spec.params))
    except ValidationError as ex:
        raise from_validation(ex, "/pstar/params") from ex
    except DomainError as ex:
        raise _param_error(ex, spec.params, "/pstar") from ex


def build_truncation(spec: TruncationSpec) -> TruncationRule:
    try:
        return TruncationRule(mode=spec.mode, value=spec.value)
    except DomainError as ex:
        raise ConfigError("/truncation/value", ex.reason) from ex


def build_urn(model: ModelSpec, pstar: ScalingSpec) -> urns.UrnModel:
    """
    Urn model of a model specification

        ibp(c, theta)
        stable_jot(alpha), scaling law from `pstar`
        bfry(sigma, alpha, theta): BFRY urn over the stable-beta density

    :param model:
    :param pstar:
    :return:
    """
    params = dict(model.params)
    try:
        if model.family == "ibp":
            return urns.IbpModel(**params)
        if model.family == "stable_jot":
            return urns.StableJotModel(pstar=build_scaling(pstar), **params)
        if model.family == "bfry":
            missing = {"sigma", "alpha", "theta"} - set(params)
            if missing:
                raise ConfigError(f"/model/params/{sorted(missing)[0]}", "required by bfry")
            return urns.stable_beta_bfry_model(**params)
    except ValidationError as ex:
        raise from_validation(ex, "/model/params") from ex
    except DomainError as ex:
        raise _param_error(ex, params, "/model") from ex
    except TypeError as ex:
        raise ConfigError("/model/params", str(ex)) from ex

    raise ConfigError("/model/family", f"expected one of {URN_KINDS}")
