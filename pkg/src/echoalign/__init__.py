"""echoalign: noisy-label dataset curation by instance modification and
similarity-based selection, with an executable theory-verification suite."""

__version__ = "0.1.0"

from .data import (Dataset, LabeledInstance, SynthWorldSpec, generate_world,
                   read_feature_file, write_feature_file)
from .errors import EchoAlignError
from .modify import ModifiedPair, ModifierConfig, ingest_external, modify
from .noise import NoiseSpec, inject
from .select import (SelectionResult, SweepCurve, cosine_similarity,
                     run_pipeline, select, sweep)
from .theory import (LinearWorldSpec, TheoryReport, ks_two_sample,
                     mutual_information_discrete, ols_fit,
                     rademacher_estimate, run_theory_suite, verify_alignment,
                     verify_error_reduction, verify_estimator_variance)
from .train import (EvalReport, TrainConfig, evaluate_pipeline,
                    selection_quality, train_classifier)

__all__ = [
    "Dataset", "LabeledInstance", "SynthWorldSpec", "generate_world",
    "read_feature_file", "write_feature_file", "EchoAlignError",
    "ModifiedPair", "ModifierConfig", "ingest_external", "modify",
    "NoiseSpec", "inject", "SelectionResult", "SweepCurve",
    "cosine_similarity", "run_pipeline", "select", "sweep",
    "LinearWorldSpec", "TheoryReport", "ks_two_sample",
    "mutual_information_discrete", "ols_fit", "rademacher_estimate",
    "run_theory_suite", "verify_alignment", "verify_error_reduction",
    "verify_estimator_variance", "EvalReport", "TrainConfig",
    "evaluate_pipeline", "selection_quality", "train_classifier",
    "__version__",
]
