"""Censuses, closed-form bounds and nibble diagnostics.

The experiment runner lives in itlab.analysis.experiment and is not
imported here, since it pulls in the constructions package.
"""

from itlab.analysis.bounds import (
    BoundReport,
    bound_report,
    check_lll_condition,
    first_moment,
    first_moment_crossover,
    lll_threshold,
)
from itlab.analysis.census import common_neighbour_census, matching_census, sampled_common_neighbour_census
from itlab.analysis.diagnostics import trajectory_report

__all__ = [
    "BoundReport",
    "bound_report",
    "check_lll_condition",
    "common_neighbour_census",
    "first_moment",
    "first_moment_crossover",
    "lll_threshold",
    "matching_census",
    "sampled_common_neighbour_census",
    "trajectory_report",
]
