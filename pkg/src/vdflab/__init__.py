"""vdflab: a desk-scale lab for testing properties of vertex-weighted graphs.

Exact rational arithmetic throughout: distances, densities, regularity
certificates, and farness thresholds are computed as fractions, never
floats.  Randomized procedures are reproducible from explicit 64-bit seeds.
"""

from .wgraph import (
    Graph,
    VertexDistribution,
    WeightedGraph,
    conditioned,
    edge_weight,
    induced,
    induced_copies,
    induced_copy_exists,
    pair_density,
    parse_weighted_graph,
    format_weighted_graph,
    set_weight,
)
from .properties import (
    BadnessRecord,
    GraphProperty,
    HereditaryProperty,
    R_bound,
    badness,
    builtin_property,
    closed_under_blowups,
    hereditary_core,
    is_extendable_at,
    minimal_forbidden_family,
    satisfies,
)
from .distance import (
    distance_to_property,
    distance_to_property_closed_form,
    edit_distance,
    is_far,
    triangle_deletion_distance,
)
from .regularity import (
    Partition,
    RegularityReport,
    balanced_partition,
    boost_refinement,
    certify_pair,
    counting_lemma_check,
    delta_counting,
    internal_pair_weight,
    low_internal_partition,
    partition_index,
    representatives,
    strong_partition,
    szemeredi_partition,
    turan_ramsey_sets,
    weighted_copy_mass,
)
from .structure import (
    DecompositionParams,
    EmbeddingScheme,
    StructuredDecomposition,
    embeds,
    heavy_light_split,
    psi_F,
    regularity_cleanup,
    structured_partition,
)
from .tester import (
    TesterConfig,
    TesterOutcome,
    large_inputs_tester,
    nhw_tester,
    nlw_tester,
    sample_vertices,
    size_aware_tester,
    trivial_property_tester,
    vdf_tester,
)
from .blowup import (
    Blowup,
    avoiding_blowup,
    dn_blowup,
    project,
    random_contraction,
    verify_blowup_farness,
)
from .gallery import (
    GalleryPair,
    cycle_star_pair,
    density_pair,
    non_extendable_pair,
    non_hereditary_pair,
    tv_distance_estimate,
)
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    estimate_probability,
    run_experiment,
    sweep,
    verify_suite,
    wilson_interval,
)

__version__ = "0.1.0"
