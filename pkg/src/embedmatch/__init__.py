"""embedmatch: two-step schema matching with embedding-vector similarity.

The pipeline matches tables first (schema-based, instance-based or combined),
lets a human optionally confirm or reject the candidates, then matches
attributes within the surviving table pairs and scores the result against a
gold alignment.
"""

from .attribute_matcher import (
    AttributeCorrespondence,
    ScoreMatrix,
    comment_based_similarities,
    instance_based_similarities,
    name_based_similarities,
    reject_unsupported_table_matches,
    select_correspondences,
)
from .embedding import (
    EmbeddingProvider,
    FixtureEmbeddingProvider,
    HashEmbeddingProvider,
    RemoteEmbeddingProvider,
    TextPrepConfig,
    aggregate_mean,
    aggregate_sum,
    coherent_group_similarity,
    cosine_similarity,
    embed_text,
    hash_embed,
    preprocess_label,
    similarity_score,
)
from .errors import (
    ConflictError,
    ContractViolation,
    MatchError,
    NotFoundError,
    ParseError,
    StateError,
    TransportError,
    ValidationError,
)
from .evaluation import (
    BenchmarkProblem,
    EvalReport,
    benchmark_run,
    evaluate,
    macro_average,
    micro_average,
    match_schemas,
)
from .model import (
    Attribute,
    DataKind,
    GoldAlignment,
    Schema,
    Table,
    classify_data_kind,
    load_alignment,
    load_instances,
    load_schema,
    save_schema,
)
from .representation import (
    ColumnRepresentation,
    RepresentationStore,
    TableSchemaRepresentation,
    column_representation,
    representation_robustness,
    table_schema_representation,
)
from .run import (
    RunInputs,
    RunState,
    apply_decision,
    build_provider,
    load_run,
    new_run,
    persist_run,
    report,
    run_attribute_phase,
    run_table_phase,
)
from .sampling import (
    SamplingConfig,
    adaptive_sample_size,
    distinct_sample,
    n_most_common_sample,
    n_random_sample,
    split_half,
)
from .table_matcher import (
    MatchConfig,
    TableCandidate,
    averaged_table_similarity,
    combined_candidates,
    instance_based_candidates,
    schema_based_candidates,
)

__version__ = "0.1.0"
