"""
Independent queens on the torus Z_n^d
"""

from .certificates import (
    complete_placement,
    impossibility_2d,
    impossibility_3d,
    known_max_2d,
    power_sum,
    upper_bound,
)
from .constructions import best_construction, construct
from .core import ConstructionError, PreconditionError
from .lines import Placement, verify_by_maps, verify_pairwise
from .log import SweepExperiment
from .solver import exists_independent, max_independent
