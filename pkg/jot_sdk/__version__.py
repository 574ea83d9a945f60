#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""JOT feature-allocation SDK: version info"""

__name__ = "jot-sdk"
__description__ = (
    "Sampling, posterior inference and verification of scaled-subordinator "
    "feature allocation models"
)
__url__ = "https://github.com/jot-sdk/jot-sdk/"
__version__ = "1.0.0"
__author__ = "jot-sdk contributors"
__author_email__ = "jot-sdk@users.noreply.github.com"
__license__ = "MIT"
__copyright__ = "Copyright 2026, jot-sdk contributors"
