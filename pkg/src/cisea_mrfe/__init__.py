"""Instruction-conditioned sentiment classifier with multi-receptive-field
depthwise convolution and an emotion-evaluator context encoder, built on a
small reverse-mode autodiff core."""

from .augmentation import (
    AugmentedSample,
    OfflineParaphraseProvider,
    ProviderError,
    SynonymProvider,
    augment_corpus,
)
from .data import LabeledCorpus, keyword_judge, load_csv, make_synthetic_corpus
from .eece import EmotionSpace, NegationRules, eece_forward
from .embedding import EmbeddingMatrix, embed, load_contextual, save_contextual
from .instruction import (
    InstructionTemplate,
    TemplateRegistry,
    Vocab,
    apply_instruction,
    build_vocab,
    tokenize,
)
from .model import EncodedSample, ModelConfig, build_params, forward, make_variant
from .sade import SadeConfig, sade_forward
from .tensor import ParameterStore, Tensor, finite_difference_check, no_grad
from .training import (
    Checkpoint,
    EvalReport,
    TrainConfig,
    evaluate,
    flops_estimate,
    load_checkpoint,
    profile,
    run_ablation,
    save_checkpoint,
    train,
    welch_ttest,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentedSample",
    "Checkpoint",
    "EmbeddingMatrix",
    "EmotionSpace",
    "EncodedSample",
    "EvalReport",
    "InstructionTemplate",
    "LabeledCorpus",
    "ModelConfig",
    "NegationRules",
    "OfflineParaphraseProvider",
    "ParameterStore",
    "ProviderError",
    "SadeConfig",
    "SynonymProvider",
    "TemplateRegistry",
    "Tensor",
    "TrainConfig",
    "Vocab",
    "apply_instruction",
    "augment_corpus",
    "build_params",
    "build_vocab",
    "eece_forward",
    "embed",
    "evaluate",
    "finite_difference_check",
    "flops_estimate",
    "forward",
    "keyword_judge",
    "load_checkpoint",
    "load_contextual",
    "load_csv",
    "make_synthetic_corpus",
    "make_variant",
    "no_grad",
    "profile",
    "run_ablation",
    "sade_forward",
    "save_checkpoint",
    "save_contextual",
    "tokenize",
    "train",
    "welch_ttest",
]
