"""Word embeddings from co-occurrence statistics, low-rank category and
relation subspaces, and the knowledge-base extension tools built on them."""

from .analogy import (
    MODES,
    VALID_LEX_TAGS,
    BenchmarkResult,
    TagTable,
    analogy_benchmark,
    filter_candidates,
    solve_query,
)
from .corpus import (
    CooccurrenceMatrix,
    Vocabulary,
    build_vocabulary,
    count_cooccurrences,
    tokenize,
)
from .errors import ContractError, FormatError, TrainingDivergedError
from .kb_extend import (
    ExtensionResult,
    RelationExperimentResult,
    extend_category,
    extend_relation,
    relation_accuracy_experiment,
)
from .manifest import RunManifest
from .subspace import (
    CaptureExperimentResult,
    CategorySet,
    RelationSet,
    SubspaceBasis,
    capture,
    capture_rate,
    cv_capture_experiment,
    get_basis,
    load_category,
    load_relation,
    member_vectors,
    save_category,
    save_relation,
)
from .training import (
    EmbeddingSet,
    TrainConfig,
    sn_loss,
    sn_loss_gradients,
    train_sn,
    weight_f,
)
from .vector_fit import (
    FitConfig,
    FitResult,
    count_target_cooccurrences,
    fit_loss,
    fit_loss_gradients,
    learn_vector,
    order_and_cosine,
    weight_g,
)

__all__ = [
    "BenchmarkResult",
    "CaptureExperimentResult",
    "CategorySet",
    "ContractError",
    "CooccurrenceMatrix",
    "EmbeddingSet",
    "ExtensionResult",
    "FitConfig",
    "FitResult",
    "FormatError",
    "MODES",
    "RelationExperimentResult",
    "RelationSet",
    "RunManifest",
    "SubspaceBasis",
    "TagTable",
    "TrainConfig",
    "TrainingDivergedError",
    "VALID_LEX_TAGS",
    "Vocabulary",
    "analogy_benchmark",
    "build_vocabulary",
    "capture",
    "capture_rate",
    "count_cooccurrences",
    "count_target_cooccurrences",
    "cv_capture_experiment",
    "extend_category",
    "extend_relation",
    "filter_candidates",
    "fit_loss",
    "fit_loss_gradients",
    "get_basis",
    "learn_vector",
    "load_category",
    "load_relation",
    "member_vectors",
    "order_and_cosine",
    "relation_accuracy_experiment",
    "save_category",
    "save_relation",
    "sn_loss",
    "sn_loss_gradients",
    "solve_query",
    "tokenize",
    "train_sn",
    "weight_f",
    "weight_g",
]
