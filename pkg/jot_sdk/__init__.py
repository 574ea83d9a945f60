#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""Scaled-subordinator (JOT) feature allocation SDK for Python"""

from .__version__ import __version__

from jot_sdk.special import RngStream

from jot_sdk.levy import (
    LevyDensity,
    TruncationRule,
    dickman_cdf,
    dickman_pdf,
    make_levy,
    sample_ranked_jumps,
)

from jot_sdk.measures import (
    UnitaryMeasure,
    make_scaling,
    sample_jot,
    sample_scaled_levy,
    thin,
    total_mass,
)

from jot_sdk.featmat import FeatureMatrix, sample_bernoulli_matrix

from jot_sdk.urns import run_urn

__all__ = [
    "__version__",
    "RngStream",
    "LevyDensity",
    "TruncationRule",
    "dickman_cdf",
    "dickman_pdf",
    "make_levy",
    "sample_ranked_jumps",
    "UnitaryMeasure",
    "make_scaling",
    "sample_jot",
    "sample_scaled_levy",
    "thin",
    "total_mass",
    "FeatureMatrix",
    "sample_bernoulli_matrix",
    "run_urn",
]
