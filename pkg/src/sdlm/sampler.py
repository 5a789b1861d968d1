"""Iterative confidence-based unmasking sampler with trace capture.

Generation initializes the target as n mask tokens after the condition
prefix and runs T refinement steps, i = T down to 1. Each step recomputes
logits, scores every still-masked position by the peak of its temperature-
scaled softmax, and commits the highest-confidence positions; committed
tokens are never revised, and the condition is never touched.

The per-step quota is cumulative: after step i exactly
ceil(n * (T - i + 1) / T) positions are unmasked, so the count grows
linearly and reaches n at i = 1. Token choice is argmax and the commit
order ranks the untempered confidences, so temperature changes only the
confidences recorded in the trace, never the output. The whole procedure
is deterministic: no RNG is consumed anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .denoiser import DenoiserParams, forward
from .sequence import (
    ExtractedSegments,
    MalformedGenerationError,
    TaskKind,
    build_condition,
    extract_segments,
    task_of_token,
)
from .tokenizer import WordTokenizer
from .toycodec import CodecSpec, decode
from .vocab import VocabSpec, id_to_speech_code


def unmask_target(i: int, n: int, T: int) -> int:
    """Cumulative unmasked-position quota after step ``i`` of ``T``.

    Steps count down from T to 1; the quota ceil(n * (T - i + 1) / T)
    rises linearly from ceil(n / T) at the first executed step to n at
    the last.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 1 <= i <= T:
        raise ValueError(f"step index {i} outside [1, {T}]")
    return (n * (T - i + 1) + T - 1) // T


@dataclass(frozen=True)
class TraceStep:
    """One refinement step: scores seen and commitments made."""

    step: int  # i, counting down from T to 1
    cumulative: int  # required unmasked count after this step
    masked_positions: tuple[int, ...]  # still masked when the step began
    confidences: tuple[float, ...]  # aligned with masked_positions
    selected: tuple[int, ...]  # newly unmasked positions (S_i)
    chosen_tokens: tuple[int, ...]  # aligned with selected


@dataclass(frozen=True)
class GenerationTrace:
    """Full record of one generation."""

    condition_length: int
    n: int
    T: int
    temperature: float
    steps: tuple[TraceStep, ...]
    final_tokens: tuple[int, ...]

    @property
    def cumulative_counts(self) -> tuple[int, ...]:
        return tuple(s.cumulative for s in self.steps)


@dataclass(frozen=True)
class Response:
    """Parsed output of one request."""

    think_text: str
    reply_text: str
    reply_modality: str
    reply_ids: tuple[int, ...]
    speech_truncated: bool
    trace: GenerationTrace


def _confidences(logits: np.ndarray, temperature: float) -> np.ndarray:
    """Peak softmax probability per row at the given temperature."""
    z = logits.astype(np.float64) / temperature
    z = z - z.max(axis=1, keepdims=True)
    return 1.0 / np.exp(z).sum(axis=1)


def generate(
    params: DenoiserParams,
    condition: list[int] | np.ndarray,
    n: int,
    T: int,
    temperature: float = 1.0,
    vocab: VocabSpec | None = None,
) -> tuple[np.ndarray, GenerationTrace]:
    """Fill ``n`` masked target positions after ``condition`` in ``T`` steps.

    The mask id is the last vocabulary id (the unified layout appends it);
    when ``vocab`` is given, the condition must start with a task token
    and the vocab must match the model.
    """
    condition = [int(t) for t in condition]
    if n < 1 or T < 1:
        raise ValueError(f"need n >= 1 and T >= 1, got n={n}, T={T}")
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    cfg = params.config
    total_len = len(condition) + n
    if total_len > cfg.max_len:
        raise ValueError(
            f"condition ({len(condition)}) + n ({n}) exceeds max_len {cfg.max_len}"
        )
    if vocab is not None:
        if vocab.total != cfg.vocab_total:
            raise ValueError(
                f"vocab total {vocab.total} does not match model "
                f"vocab_total {cfg.vocab_total}"
            )
        if not condition:
            raise ValueError("condition is empty")
        task_of_token(vocab, condition[0])  # raises if not a task token
    mask_id = cfg.vocab_total - 1

    x = np.empty(total_len, dtype=np.int64)
    x[: len(condition)] = condition
    x[len(condition):] = mask_id
    still_masked = np.arange(len(condition), total_len, dtype=np.int64)

    unmasked = 0
    steps: list[TraceStep] = []
    for i in range(T, 0, -1):
        quota = unmask_target(i, n, T)
        delta = quota - unmasked
        if still_masked.size == 0:
            steps.append(TraceStep(i, quota, (), (), (), ()))
            continue
        logits = forward(params, x)
        rows = logits[still_masked]
        conf = _confidences(rows, temperature)
        base = conf if temperature == 1.0 else _confidences(rows, 1.0)
        picks = rows.argmax(axis=1)
        # Rank untempered confidence descending, position ascending on
        # ties; max softmax probabilities can reorder across temperatures,
        # so selecting on the tempered ones would let temperature change
        # the committed tokens.
        order = np.lexsort((still_masked, -base))
        chosen = order[:delta]
        sel_pos = still_masked[chosen]
        sel_tok = picks[chosen]
        x[sel_pos] = sel_tok
        unmasked += len(sel_pos)
        steps.append(TraceStep(
            step=i,
            cumulative=quota,
            masked_positions=tuple(int(p) for p in still_masked),
            confidences=tuple(float(c) for c in conf),
            selected=tuple(int(p) for p in sel_pos),
            chosen_tokens=tuple(int(t) for t in sel_tok),
        ))
        keep = np.ones(still_masked.size, dtype=bool)
        keep[chosen] = False
        still_masked = still_masked[keep]

    trace = GenerationTrace(
        condition_length=len(condition),
        n=n,
        T=T,
        temperature=temperature,
        steps=tuple(steps),
        final_tokens=tuple(int(t) for t in x),
    )
    return x, trace


def respond(
    params: DenoiserParams,
    task: TaskKind,
    user_payload: str | list[int],
    n: int,
    T: int,
    vocab: VocabSpec,
    codec: CodecSpec,
    tok: WordTokenizer,
    temperature: float = 1.0,
    rng: np.random.Generator | None = None,
) -> Response:
    """Run one request end to end: build condition, generate, parse, decode.

    ``rng`` is used only to encode a string speech payload (variant choice);
    omitted, it defaults to a fixed seed so responses stay deterministic.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    condition = build_condition(task, user_payload, tok, vocab, codec, rng)
    tokens, trace = generate(params, condition, n, T, temperature, vocab=vocab)
    try:
        parts = extract_segments(tokens, vocab)
    except MalformedGenerationError as err:
        err.trace = trace
        raise
    think_text = tok.decode(parts.think_ids)
    truncated = False
    if parts.reply_modality == "speech":
        codes = [id_to_speech_code(vocab, t) for t in parts.reply_ids]
        decoded = decode(codec, codes)
        reply_text = decoded.text
        truncated = decoded.truncated
    else:
        reply_text = tok.decode(parts.reply_ids)
    return Response(
        think_text=think_text,
        reply_text=reply_text,
        reply_modality=parts.reply_modality,
        reply_ids=parts.reply_ids,
        speech_truncated=truncated,
        trace=trace,
    )


def trace_lines(trace: GenerationTrace) -> list[str]:
    """Line-oriented trace export, one step per line.

    Columns (tab-separated): step index, cumulative count, comma-joined
    newly unmasked indices, and min/mean/max confidence over the positions
    that were still masked when the step began ("-" when none were).
    """
    lines = [
        f"# n={trace.n} T={trace.T} temperature={trace.temperature} "
        f"condition_length={trace.condition_length}"
    ]
    for s in trace.steps:
        if s.confidences:
            conf = np.array(s.confidences)
            stats = f"{conf.min():.6f}\t{conf.mean():.6f}\t{conf.max():.6f}"
        else:
            stats = "-\t-\t-"
        new = ",".join(str(i) for i in s.selected)
        lines.append(f"{s.step}\t{s.cumulative}\t{new}\t{stats}")
    return lines
