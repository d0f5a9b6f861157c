"""Soundness analysis for workflow nets.

The package decides classical, k-, generalised and structural soundness,
computes the set of sound budgets, and generates the hardness-reduction
gadgets, cross-validated at desk scale by a brute-force oracle.
"""

from .nets import (
    MAX_TOKENS,
    NetError,
    NetMetrics,
    NotEnabled,
    NotEnabledAt,
    NotOnPath,
    Overflow,
    PetriNet,
    ProducesIntoInitial,
    ConsumesFromFinal,
    ValidationError,
    WorkflowNet,
    validate_workflow,
)
from .textfmt import ParseError, ParsedNet, parse_net, serialize_net, serialize_workflow
from .explore import (
    BoundednessVerdict,
    CapExceeded,
    ExploreCaps,
    IncompleteGraph,
    NotBounded,
    ReachGraph,
    backward_reachable,
    build_reach_graph,
    decide_boundedness,
    decide_cyclicity,
    karp_miller,
    quasi_liveness,
)
from .ilp import (
    BoxTooLarge,
    IntegerProgram,
    Solution,
    build_ilp_n,
    build_ilp_s,
    feasible_rational,
    homogeneous_witness,
    marking_of,
    slack_extended,
    solve_box_bounded,
)
from .bounds import (
    BoundReport,
    ScaleTooLarge,
    SteinitzResult,
    bound_budget_ell,
    bound_generalised_K,
    bound_placecover,
    bound_structural_K,
    bound_z_norm_cap,
    steinitz_extended_reorder_small,
    steinitz_reorder_small,
)
from .soundness import (
    RemovalReport,
    SoundNums,
    Verdict,
    check_1_sound,
    check_classical,
    check_generalised,
    check_k_sound,
    check_structural,
    compute_sound_numbers,
    covering_run,
    nonredundant_saturation,
    oracle_k_sound,
    remove_redundant,
    scale_net,
    short_circuit,
)
from .gadgets import (
    CountingGadget,
    GenerationFailed,
    NotConservative,
    NotReversible,
    ReductionInstance,
    SumMismatch,
    expspace_reduction,
    fig1_examples,
    is_conservative,
    is_reversible,
    naive_counting_gadget,
    pspace_reduction,
    random_workflow,
    structural_hardness_transform,
    suggest_cn,
)

__version__ = "0.1.0"
