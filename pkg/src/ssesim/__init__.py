"""Shotgun-sequencing erasure channel: simulation, assembly, decoding,
statistics, and achievable-rate formulas.

The working alphabet is the trit {0, 1, erased}; ``TritString`` packs a
string of trits into two integer bit planes.  ``channel`` draws seeded reads
of a cyclic codeword, ``assembly`` merges them into islands, ``stats``
measures coverage and suffix-size laws against their exact expectations,
``rates`` evaluates the closed-form rate expressions, and ``decoder`` runs
the claim-enumeration decoder at toy scale.
"""

from .assembly import (
    IslandSet,
    MergeFailure,
    OrderedMerge,
    TrueOrdering,
    build_islands,
    true_islands,
    true_ordered_merge,
    true_ordering,
)
from .channel import (
    ChannelOutput,
    ChannelParams,
    Read,
    Truth,
    apply_erasures,
    child_seed,
    generate_codebook,
    random_codebook,
    random_codeword,
    sample_reads,
    stage_rng,
    transmit,
    transmit_codeword,
)
from .decoder import (
    DecodeResult,
    DecoderConfig,
    SearchSpaceError,
    filter_islands,
    is_typical_tuple,
    oracle_decode,
    typicality_decode,
)
from .errors import DomainError
from .rates import (
    CurveRow,
    candidate_growth_bound,
    coverage_depth,
    rate_curve,
    rate_gap,
    rate_gap_limit,
    rates_csv,
    sse_rate_bound,
    ssc_capacity,
    ssc_short_rate,
)
from .stats import (
    ConcentrationSummary,
    CoverageReport,
    SuffixSizeHistogram,
    TypicalityThresholds,
    chain_island_count,
    concentration_experiment,
    count_prefix_compatible,
    coverage,
    expected_suffix_size_count,
    expected_suffix_size_counts,
    forward_successor_distances,
    hoeffding_one_sided,
    hoeffding_two_sided,
    suffix_size_histogram,
    typicality_thresholds,
)
from .tritstring import (
    ERASED,
    MergeError,
    TritString,
    compatible,
    compatible_substring_positions,
    fold_cyclic,
    is_l_compatible,
    measure,
    merge,
)

__version__ = "0.1.0"
