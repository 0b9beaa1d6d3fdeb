"""Multi-objective genetic algorithm for the multi-vehicle pickup and delivery
problem with time windows (vehicles, tardiness, travel cost)."""

from .estimator import ExhaustiveFront, ParetoGA
from .evaluation import (
    ObjectiveVector,
    ScheduleReport,
    Solution,
    Verdict,
    check_solution,
    format_tours,
    objectives,
    parse_tours,
    simulate_route,
)
from .ga import (
    GAConfig,
    correct,
    correct_capacity,
    correct_precedence,
    decode,
    encode,
    evolve,
    init_populations,
    one_point_crossover,
    split_crossover,
    swap_mutation,
)
from .instance import (
    Fleet,
    Instance,
    Node,
    load_instance,
    paper_instance,
    parse_instance,
    random_instance,
    serialize_instance,
)
from .oracle import OracleResult, enumerate_front
from .pareto import ParetoArchive, archive_insert, dominates, non_dominated_filter

__version__ = "0.1.0"

__all__ = [
    "ExhaustiveFront",
    "Fleet",
    "GAConfig",
    "Instance",
    "Node",
    "ObjectiveVector",
    "OracleResult",
    "ParetoArchive",
    "ParetoGA",
    "ScheduleReport",
    "Solution",
    "Verdict",
    "archive_insert",
    "check_solution",
    "correct",
    "correct_capacity",
    "correct_precedence",
    "decode",
    "dominates",
    "encode",
    "enumerate_front",
    "evolve",
    "format_tours",
    "init_populations",
    "load_instance",
    "non_dominated_filter",
    "objectives",
    "one_point_crossover",
    "paper_instance",
    "parse_instance",
    "parse_tours",
    "random_instance",
    "serialize_instance",
    "simulate_route",
    "split_crossover",
    "swap_mutation",
]
