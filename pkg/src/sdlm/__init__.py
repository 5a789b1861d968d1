"""Unified speech-text masked diffusion language model at desk scale.

A single discrete vocabulary covers text words, control tokens, and toy
speech codes. A small bidirectional transformer is trained from scratch
(gradients derived and computed in-repo) with a selective-masking diffusion
objective over multi-task sequence layouts, and decoded with a
confidence-ordered iterative unmasking sampler that yields a text
"thinking" segment alongside a speech-token reply.
"""

__version__ = "0.1.0"

from .vocab import VocabSpec, TokenClass, build_vocab
from .toycodec import CodecSpec, WpsCheck
from .sequence import TaskKind, TaskSample
from .diffusion import MaskedBatch, gamma
from .denoiser import DenoiserParams, ModelConfig
from .trainer import StageConfig
from .sampler import GenerationTrace, Response, unmask_target
from .records import DatasetRecord

__all__ = [
    "VocabSpec",
    "TokenClass",
    "build_vocab",
    "CodecSpec",
    "WpsCheck",
    "TaskKind",
    "TaskSample",
    "MaskedBatch",
    "gamma",
    "DenoiserParams",
    "ModelConfig",
    "StageConfig",
    "GenerationTrace",
    "Response",
    "unmask_target",
    "DatasetRecord",
    "__version__",
]
