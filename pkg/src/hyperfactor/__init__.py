"""Constructive embedding of partial edge-colorings of complete uniform
multihypergraphs into (connected) factorizations, with exact bound
calculators, verifiers, and a brute-force oracle."""

from .model import (
    Coloring,
    Instance,
    MultiHypergraph,
    complete_hypergraph,
    degree_in_class,
    is_partial_factorization,
)
from .arithmetic import (
    check_admissible,
    corollary_presets,
    derived_params,
    qmax_74,
    qmax_75,
    ryser_diagnostic,
    theorem12_hypothesis,
    theorem14_hypothesis,
)
from .amalgam import (
    AmalgamState,
    assert_amalgam_identities,
    build_amalgam,
    color_full_alpha_edges,
    color_penultimate_edges,
    color_star_edges,
)
from .detachment import DetachmentResult, fair_detach, single_split
from .connectivity import components, count_wings, is_cut_vertex, is_irregular
from .pipelines import (
    EmbeddingJob,
    embed_thm11,
    embed_thm12,
    embed_thm13,
    embed_thm14,
    run_job,
)
from .verification import oracle_extend, verify_extension, verify_factorization

__version__ = "0.1.0"
