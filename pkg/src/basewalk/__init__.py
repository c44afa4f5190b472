"""Multistage matroid maintenance: exact, greedy, rounding and online solvers."""
from .errors import (BasewalkError, ConfigError, InfeasibleError, InvalidInputError,
                     InvalidSolutionError, InvariantViolation, ProtocolError, ResourceLimitError)
from .instance import (IntervalInstance, MmmInstance, SolutionSequence, cost_breakdown,
                       load_instance, load_solution, mmm_cost, msm_cost, save_instance,
                       save_solution, to_interval_exact, to_interval_online, validate_solution)
from .matroid import (GraphicMatroid, Matroid, ParallelMatroid, PartitionMatroid,
                      UniformMatroid, matroid_from_dict)
from .generators import FAMILIES, generate
from .solvers import ALGORITHMS, RoundingParams, solve

__version__ = "0.1.0"
