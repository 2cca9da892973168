"""Count-min style sketches of order-aware moments of weighted event streams."""

from .dual import (
    LinearFunctional,
    infiltration_product,
    pairing,
    shuffle_product,
)
from .features import (
    EventMapKind,
    apply_event_inplace,
    brute_force_oracle,
    concat_features,
    event_polynomial,
    features_from_arrays,
    oracle_level,
    stream_features,
)
from .hashing import (
    AffineHash,
    HashFamilySpec,
    eval_hash,
    eval_hash_array,
    hash_word,
    sample_hashes,
    smallest_prime_geq,
)
from .sketch import (
    CandidateCapError,
    HeavyPatternResult,
    OrderSketch,
    dense_pullback,
    heavy_hitter_patterns,
    mine_heavy_patterns,
    table_shape_for,
)
from .experiments import (
    ErrorReport,
    ExperimentOneConfig,
    ExperimentTwoConfig,
    LogisticModel,
    MarkovExperimentConfig,
    StreamClass,
    error_metric,
    gen_heavy_tail_stream,
    gen_markov_stream,
    run_experiment_1,
    run_experiment_2,
    train_linear_classifier,
)
from .tensor import (
    Event,
    GradedTensor,
    Stream,
    l1_level_norm,
    l1_norm_upto,
    scale_stream,
    truncated_product,
    word_from_index,
    word_from_text,
    word_index,
    word_to_text,
)

__version__ = "0.1.0"

__all__ = [
    "AffineHash",
    "CandidateCapError",
    "ErrorReport",
    "Event",
    "EventMapKind",
    "ExperimentOneConfig",
    "ExperimentTwoConfig",
    "GradedTensor",
    "HashFamilySpec",
    "HeavyPatternResult",
    "LinearFunctional",
    "LogisticModel",
    "MarkovExperimentConfig",
    "OrderSketch",
    "Stream",
    "StreamClass",
    "apply_event_inplace",
    "brute_force_oracle",
    "concat_features",
    "dense_pullback",
    "error_metric",
    "eval_hash",
    "eval_hash_array",
    "event_polynomial",
    "features_from_arrays",
    "gen_heavy_tail_stream",
    "gen_markov_stream",
    "hash_word",
    "heavy_hitter_patterns",
    "infiltration_product",
    "l1_level_norm",
    "l1_norm_upto",
    "mine_heavy_patterns",
    "oracle_level",
    "pairing",
    "run_experiment_1",
    "run_experiment_2",
    "sample_hashes",
    "scale_stream",
    "shuffle_product",
    "smallest_prime_geq",
    "stream_features",
    "table_shape_for",
    "train_linear_classifier",
    "truncated_product",
    "word_from_index",
    "word_from_text",
    "word_index",
    "word_to_text",
]
