"""Exact Multicut solvers for graphs that are planar up to a few edges or crossings."""

from .core import (
    INF,
    InfeasibleError,
    Instance,
    InstanceError,
    InternalConsistencyError,
    Solution,
    parse_instance,
    serialize_instance,
)
from .crossing import solve_crossing
from .cuts import oracle_min_multicut, verify_multicut
from .dual import planar_multicut_exact
from .generate import GenConfig, generate
from .kplanar import KPlanarConfig, solve_kplanar

__all__ = [
    "INF",
    "GenConfig",
    "InfeasibleError",
    "Instance",
    "InstanceError",
    "InternalConsistencyError",
    "KPlanarConfig",
    "Solution",
    "generate",
    "oracle_min_multicut",
    "parse_instance",
    "planar_multicut_exact",
    "serialize_instance",
    "solve_crossing",
    "solve_kplanar",
    "verify_multicut",
]
