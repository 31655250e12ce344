"""tropdiv: exact divisor theory on metric graphs and tropical curves."""

from .rationals import INF, NEG_INF, RationalParseError, format_rational, parse_rational
from .graphs import Graph, GraphError, GraphPoint, MetricGraph, Rescaling, Subdivision
from .divisors import (Divisor, DivisorError, canonical_divisor, is_q_divisor,
                       is_z_divisor, retract_divisor)
from .functions import (FunctionError, RationalFunction, end_ramp, random_function,
                        slope_bound, snap_ramp)
from .chipfiring import (ChipFiringError, UnitGraph, dhar_reduce, is_q_reduced,
                         laplacian_apply, wins_effective)
from .ranks import (RankError, RankReport, discrete_rank, discrete_rank_with_witness,
                    linear_equiv, metric_rank, tropical_rank)

__all__ = [
    "INF", "NEG_INF", "RationalParseError", "format_rational", "parse_rational",
    "Graph", "GraphError", "GraphPoint", "MetricGraph", "Rescaling", "Subdivision",
    "Divisor", "DivisorError", "canonical_divisor", "is_q_divisor", "is_z_divisor",
    "retract_divisor",
    "FunctionError", "RationalFunction", "end_ramp", "random_function",
    "slope_bound", "snap_ramp",
    "ChipFiringError", "UnitGraph", "dhar_reduce", "is_q_reduced",
    "laplacian_apply", "wins_effective",
    "RankError", "RankReport", "discrete_rank", "discrete_rank_with_witness",
    "linear_equiv", "metric_rank", "tropical_rank",
]

__version__ = "0.1.0"
