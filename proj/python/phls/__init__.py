"""Hierarchical location-service simulator and cost model."""

from ._core import (
    GridHierarchy,
    RegionId,
    analytic,
    predict_avg,
    predict_linear,
    run_scenario,
    select_server,
    sweep,
    update_avg_velocity,
    __version__,
)

__all__ = [
    "GridHierarchy",
    "RegionId",
    "analytic",
    "predict_avg",
    "predict_linear",
    "run_scenario",
    "select_server",
    "sweep",
    "update_avg_velocity",
    "__version__",
]
