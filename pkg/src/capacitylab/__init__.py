"""capacitylab: capacity of multi-dimensional constrained channels.

Builds transfer operators (standard, periodic, 1-vertex) over constraint
digraphs, runs certified high-precision Perron iteration, assembles
rigorous and heuristic entropy bounds, and cross-checks everything against
an exact brute-force counting oracle.
"""

from .errors import (CapacityLabError, CapacityLimitError, CheckpointError,
                     FormatError)
from .graphs import (AxisReport, ConstraintGraph, ConstraintSystem,
                     ValidationReport, find_friendly_colours,
                     hard_square_graph, hard_square_system, load_system,
                     monomer_dimer_system, save_system, validate_system)
from .words import (StateSpace, chain_word_count, decode_code, encode_word,
                    enumerate_constrained_words, enumerate_helical_slab_words,
                    enumerate_slab_words, enumerate_words)
from .operators import (BitsetRows, TransferOperator, build_row_transfer_2d,
                        build_slab_transfer_3d, export_operator_text,
                        import_operator_text, quadratic_form_count)
from .one_vertex import (OneVertexOperator, build_one_vertex_2d,
                         build_one_vertex_3d)
from .spectral import (IterationConfig, SpectralEstimate,
                       as_operator, collatz_wielandt_bounds,
                       perron_radius, read_checkpoint,
                       write_checkpoint)
from .oracle import (ExactCount, brute_count_box, brute_count_monomer_dimer,
                     brute_count_slanted_2d, brute_count_slanted_3d,
                     count_monomer_dimer_colorings)
from .bounds import (BoundReport, EntropyBound, FriendlyBoundReport,
                     HeuristicBracketReport, SandwichReport, bound_report,
                     bounds_periodic_2d, corner_ratio_lower_bound_3d,
                     friendly_lower_bound_2d, heuristic_bracket_2d,
                     lower_bound_open_2d, lower_bound_periodic_2d,
                     sandwich_check_one_vertex, upper_bound_open_2d,
                     upper_bound_periodic_2d, upper_bound_periodic_3d)

__version__ = "0.1.0"

__all__ = [
    "CapacityLabError", "CapacityLimitError", "CheckpointError", "FormatError",
    "AxisReport", "ConstraintGraph", "ConstraintSystem", "ValidationReport",
    "find_friendly_colours", "hard_square_graph", "hard_square_system",
    "load_system", "monomer_dimer_system", "save_system", "validate_system",
    "StateSpace", "chain_word_count", "decode_code", "encode_word",
    "enumerate_constrained_words", "enumerate_helical_slab_words",
    "enumerate_slab_words", "enumerate_words",
    "BitsetRows", "TransferOperator", "build_row_transfer_2d",
    "build_slab_transfer_3d", "export_operator_text", "import_operator_text",
    "quadratic_form_count",
    "OneVertexOperator", "build_one_vertex_2d", "build_one_vertex_3d",
    "IterationConfig", "SpectralEstimate", "as_operator",
    "collatz_wielandt_bounds",
    "perron_radius", "read_checkpoint", "write_checkpoint",
    "ExactCount", "brute_count_box", "brute_count_monomer_dimer",
    "brute_count_slanted_2d", "brute_count_slanted_3d",
    "count_monomer_dimer_colorings",
    "BoundReport", "EntropyBound", "FriendlyBoundReport",
    "HeuristicBracketReport", "SandwichReport", "bound_report",
    "bounds_periodic_2d", "corner_ratio_lower_bound_3d",
    "friendly_lower_bound_2d", "heuristic_bracket_2d", "lower_bound_open_2d",
    "lower_bound_periodic_2d", "sandwich_check_one_vertex",
    "upper_bound_open_2d", "upper_bound_periodic_2d",
    "upper_bound_periodic_3d",
]
