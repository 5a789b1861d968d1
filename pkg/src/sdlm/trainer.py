"""Two-stage multi-task curriculum training.

Each step draws one task from the stage's categorical mixture, builds a
single-task batch with one noise level per sequence, and applies the
task's loss weight to the gradient. The per-step random stream is keyed
by (stage seed, step index), so resuming from a checkpoint reproduces
the uninterrupted run bit for bit.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .denoiser import (
    AdamState,
    DenoiserParams,
    apply_update,
    init_adam,
    loss_and_grad,
)
from .diffusion import MaskedBatch, corrupt_batch
from .records import DatasetRecord
from .sequence import TaskKind, build
from .tokenizer import WordTokenizer
from .toycodec import CodecSpec
from .vocab import VocabSpec

Datasets = dict[TaskKind, list[DatasetRecord]]

LR_FLOOR_FRACTION = 0.1


class DataExhaustedError(RuntimeError):
    """Raised when the sampled task has no records to draw from."""


@dataclass(frozen=True)
class StageConfig:
    """One curriculum stage: task mixture, weights, and schedule."""

    name: str
    tasks: tuple[TaskKind, ...]
    proportions: tuple[float, ...]
    loss_weights: tuple[float, ...]
    steps: int
    batch_size: int
    seq_cap: int
    lr: float
    warmup_steps: int
    seed: int

    def __post_init__(self) -> None:
        if not self.tasks:
            raise ValueError("a stage needs at least one task")
        if len(set(self.tasks)) != len(self.tasks):
            raise ValueError("duplicate task in stage")
        if len(self.proportions) != len(self.tasks):
            raise ValueError("one proportion per task required")
        if len(self.loss_weights) != len(self.tasks):
            raise ValueError("one loss weight per task required")
        if any(p < 0 for p in self.proportions):
            raise ValueError("proportions must be nonnegative")
        if abs(sum(self.proportions) - 1.0) > 1e-9:
            raise ValueError(
                f"proportions must sum to 1, got {sum(self.proportions)!r}"
            )
        if any(w < 0 for w in self.loss_weights):
            raise ValueError("loss weights must be nonnegative")
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.seq_cap < 2:
            raise ValueError("seq_cap must be at least 2")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.warmup_steps < 0:
            raise ValueError("warmup_steps must be nonnegative")

    def weight_of(self, task: TaskKind) -> float:
        return self.loss_weights[self.tasks.index(task)]


def stage1_config(
    steps: int,
    batch_size: int = 16,
    seq_cap: int = 160,
    lr: float = 1e-3,
    warmup_steps: int = 100,
    seed: int = 0,
) -> StageConfig:
    """Speech-text alignment stage: TTS and ASR with a text LM anchor."""
    return StageConfig(
        name="stage1",
        tasks=(TaskKind.TTS, TaskKind.ASR, TaskKind.T2T),
        proportions=(0.4, 0.4, 0.2),
        loss_weights=(1.0, 1.0, 1.0),
        steps=steps,
        batch_size=batch_size,
        seq_cap=seq_cap,
        lr=lr,
        warmup_steps=warmup_steps,
        seed=seed,
    )


def stage2_config(
    steps: int,
    batch_size: int = 16,
    seq_cap: int = 160,
    lr: float = 5e-4,
    warmup_steps: int = 100,
    seed: int = 1,
) -> StageConfig:
    """Dialogue stage: thinking tasks plus retained ASR/TTS."""
    return StageConfig(
        name="stage2",
        tasks=(TaskKind.S2S, TaskKind.S2T, TaskKind.T2T, TaskKind.ASR,
               TaskKind.TTS),
        proportions=(0.3, 0.3, 0.2, 0.1, 0.1),
        loss_weights=(1.0, 1.0, 1.0, 1.0, 1.0),
        steps=steps,
        batch_size=batch_size,
        seq_cap=seq_cap,
        lr=lr,
        warmup_steps=warmup_steps,
        seed=seed,
    )


def sample_task(stage: StageConfig, rng: np.random.Generator) -> TaskKind:
    """Draw one task from the stage mixture."""
    idx = rng.choice(len(stage.tasks), p=np.asarray(stage.proportions))
    return stage.tasks[int(idx)]


def lr_at(stage: StageConfig, step: int) -> float:
    """Linear warmup then cosine decay to a 10% floor; ``step`` is 0-based."""
    if not 0 <= step < max(stage.steps, 1):
        raise ValueError(f"step {step} outside [0, {stage.steps})")
    if stage.warmup_steps > 0 and step < stage.warmup_steps:
        return stage.lr * (step + 1) / stage.warmup_steps
    span = stage.steps - stage.warmup_steps
    if span <= 1:
        return stage.lr
    progress = (step - stage.warmup_steps) / (span - 1)
    floor = LR_FLOOR_FRACTION
    return stage.lr * (floor + (1.0 - floor) * 0.5 * (1.0 + math.cos(math.pi * progress)))


def _build_batch(
    stage: StageConfig,
    task: TaskKind,
    records: list[DatasetRecord],
    tok: WordTokenizer,
    vocab: VocabSpec,
    codec: CodecSpec,
    rng: np.random.Generator,
) -> MaskedBatch:
    if not records:
        raise DataExhaustedError(
            f"{stage.name}: no {task.value} records available"
        )
    picks = rng.integers(0, len(records), size=stage.batch_size)
    samples = []
    for pick in picks:
        record = records[int(pick)]
        sample = build(task, record.user_text, record.think_text,
                       record.reply_text, tok, vocab, codec, rng)
        if len(sample.tokens) > stage.seq_cap:
            raise ValueError(
                f"{stage.name}: {task.value} sequence of length "
                f"{len(sample.tokens)} exceeds cap {stage.seq_cap} "
                f"(user {record.user_text!r})"
            )
        samples.append(sample)
    ts = rng.random(stage.batch_size)
    return corrupt_batch(samples, ts, rng, vocab.mask_id)


@dataclass(frozen=True)
class StepMetrics:
    """One training step's record for the metrics log."""

    step: int
    task: str
    loss: float
    weighted_loss: float
    lr: float
    masked_count: int
    mean_t: float


def compute_step(
    params: DenoiserParams,
    stage: StageConfig,
    datasets: Datasets,
    step: int,
    tok: WordTokenizer,
    vocab: VocabSpec,
    codec: CodecSpec,
) -> tuple[TaskKind, MaskedBatch, float, dict[str, np.ndarray]]:
    """Sample a task, build its batch, and return the weighted gradients."""
    rng = np.random.default_rng([stage.seed, step])
    task = sample_task(stage, rng)
    batch = _build_batch(stage, task, datasets.get(task, []), tok, vocab,
                         codec, rng)
    loss, grads = loss_and_grad(params, batch)
    weight = stage.weight_of(task)
    if weight != 1.0:
        for grad in grads.values():
            grad *= weight
    return task, batch, loss.value, grads


def train_step(
    params: DenoiserParams,
    opt_state: AdamState,
    stage: StageConfig,
    datasets: Datasets,
    step: int,
    tok: WordTokenizer,
    vocab: VocabSpec,
    codec: CodecSpec,
) -> StepMetrics:
    """One optimizer update; mutates ``params`` and ``opt_state`` in place."""
    task, batch, loss, grads = compute_step(
        params, stage, datasets, step, tok, vocab, codec
    )
    lr = lr_at(stage, step)
    apply_update(params, grads, opt_state, lr)
    return StepMetrics(
        step=step,
        task=task.value,
        loss=loss,
        weighted_loss=stage.weight_of(task) * loss,
        lr=lr,
        masked_count=batch.masked_count,
        mean_t=float(batch.t.mean()),
    )


def run_stage(
    params: DenoiserParams,
    opt_state: AdamState,
    stage: StageConfig,
    datasets: Datasets,
    tok: WordTokenizer,
    vocab: VocabSpec,
    codec: CodecSpec,
    start_step: int = 0,
    on_metrics: Callable[[StepMetrics], None] | None = None,
    checkpoint_every: int = 0,
    checkpoint_fn: Callable[[int], None] | None = None,
) -> list[StepMetrics]:
    """Run a stage from ``start_step`` to its configured step count."""
    if not 0 <= start_step <= stage.steps:
        raise ValueError(
            f"start_step {start_step} outside [0, {stage.steps}]"
        )
    metrics = []
    for step in range(start_step, stage.steps):
        entry = train_step(params, opt_state, stage, datasets, step, tok,
                           vocab, codec)
        metrics.append(entry)
        if on_metrics is not None:
            on_metrics(entry)
        done = step + 1
        if (checkpoint_fn is not None and checkpoint_every > 0
                and (done % checkpoint_every == 0 or done == stage.steps)):
            checkpoint_fn(done)
    return metrics


def run_curriculum(
    params: DenoiserParams,
    stages: list[tuple[StageConfig, Datasets]],
    tok: WordTokenizer,
    vocab: VocabSpec,
    codec: CodecSpec,
    on_metrics: Callable[[StepMetrics], None] | None = None,
) -> list[StepMetrics]:
    """Run stages in order; later stages continue from the same parameters.

    Optimizer state is fresh per stage, only the weights carry over.
    """
    all_metrics = []
    for stage, datasets in stages:
        opt_state = init_adam(params)
        all_metrics.extend(run_stage(
            params, opt_state, stage, datasets, tok, vocab, codec,
            on_metrics=on_metrics,
        ))
    return all_metrics


def metrics_log_lines(metrics: list[StepMetrics]) -> list[str]:
    """Line-oriented training log, one step per line."""
    lines = ["# step\ttask\tloss\tweighted_loss\tlr\tmasked\tmean_t"]
    for m in metrics:
        lines.append(
            f"{m.step}\t{m.task}\t{m.loss:.6f}\t{m.weighted_loss:.6f}"
            f"\t{m.lr:.8f}\t{m.masked_count}\t{m.mean_t:.4f}"
        )
    return lines
