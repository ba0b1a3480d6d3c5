"""Graph-structure toolkit: balanced separators, shallow minors, treewidth, expanders."""

from .bounds import BoundParams, BoundValue, FitResult, eval_b, eval_f, eval_p, fit_exponent, solve_a
from .families import (
    ExpansionCertificate,
    FamilySpec,
    c_delta_graph,
    certify_expansion_at_least,
    complete_graph,
    cycle_graph,
    expansion_of,
    generate_family,
    grid_graph,
    parse_family_spec,
    path_graph,
    random_cubic,
    random_tree,
    star_graph,
)
from .graphs import Graph, bfs_ball, components, induced_subgraph, read_graph, write_graph
from .minors import (
    BranchModel,
    MinorResult,
    PipelineReport,
    branch_model_violations,
    contract_model,
    find_clique_model_exact,
    greedy_shallow_clique,
    identity_model,
    nabla_exact,
    nabla_greedy,
    subgraph_expansion_pipeline,
    validate_branch_model,
)
from .separators import (
    BalanceCertificate,
    DichotomyResult,
    Separator,
    balance_certificate,
    engine_balanced_separator,
    optimal_balanced_separator,
    prs_dichotomy,
    separator_from_expansion,
    separator_violations,
    verify_cb_separators,
)
from .treewidth import (
    TreeDecomposition,
    decomposition_from_separators,
    exact_treewidth,
    expander_tw_lower_bound,
    separator_from_decomposition,
    validate_decomposition,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
