"""Statistical validation of community robustness.

Compares Variation-of-Information perturbation curves of an observed
network against a configuration-model null through three functional-data
significance tests (GP Bayes factor, FPCA + Anderson-Darling, and
interval-wise permutation testing).
"""

__version__ = "0.1.0"

from .community import detect, detect_fast_greedy, detect_louvain, modularity
from .fpca import ad_two_sample, benjamini_hochberg, fpca_test, marginal_fpca
from .generate import GeneratorSpec, LabeledGraph, generate
from .gp import (
    GPModel,
    RatioSeries,
    bayes_factor,
    fit_hyperparameters,
    gp_test,
    log_marginal_likelihood,
)
from .graph import (
    Graph,
    connected_components,
    degree_sequence,
    graph_summary,
    load_edge_list,
    serialize_edge_list,
)
from .iwt import adjust, basis_expand, interval_tests, iwt_test
from .partitions import (
    Partition,
    entropy,
    mutual_information,
    variation_of_information,
)
from .pipeline import (
    CurveGrid,
    VICurveSet,
    build_null_curve,
    build_observed_curve,
    default_grid,
    run_pipeline,
)
from .rewire import configuration_model, is_graphical, rewire, rng_stream

__all__ = [
    "CurveGrid",
    "GPModel",
    "GeneratorSpec",
    "Graph",
    "LabeledGraph",
    "Partition",
    "RatioSeries",
    "VICurveSet",
    "ad_two_sample",
    "adjust",
    "basis_expand",
    "bayes_factor",
    "benjamini_hochberg",
    "build_null_curve",
    "build_observed_curve",
    "configuration_model",
    "connected_components",
    "default_grid",
    "degree_sequence",
    "detect",
    "detect_fast_greedy",
    "detect_louvain",
    "entropy",
    "fit_hyperparameters",
    "fpca_test",
    "generate",
    "gp_test",
    "graph_summary",
    "interval_tests",
    "is_graphical",
    "iwt_test",
    "load_edge_list",
    "log_marginal_likelihood",
    "marginal_fpca",
    "modularity",
    "mutual_information",
    "rewire",
    "rng_stream",
    "run_pipeline",
    "serialize_edge_list",
    "variation_of_information",
]
