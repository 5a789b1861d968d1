"""Forward masking process, cosine schedule, and masked cross-entropy loss.

Corruption is selective: condition positions are copied through untouched,
and each target position is independently replaced by the mask id with
probability ``gamma(t)``. The loss reads only masked target positions, so
predictions anywhere else cannot affect training.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sequence import TaskSample


def gamma(t):
    """Masking probability cos(pi/2 * (1 - t)) for noise level t in [0, 1].

    Computed as sin(pi/2 * t), the same function with exact floating-point
    values at both endpoints: gamma(0) == 0.0 and gamma(1) == 1.0.
    """
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"noise level must lie in [0, 1], got {t}")
    out = np.sin(0.5 * np.pi * arr)
    return float(out) if arr.ndim == 0 else out


@dataclass
class MaskedBatch:
    """A batch of corrupted sequences, padded to a common length.

    ``mask_flags[b, i]`` is true exactly where ``xt`` holds the mask id in
    place of ``x0``; condition positions and padding are never flagged.
    Padding fills ``x0``/``xt`` with the mask id beyond ``lengths[b]`` with
    all flags false, so both the loss and attention can ignore it.
    """

    x0: np.ndarray  # [B, L] int64
    xt: np.ndarray  # [B, L] int64
    mask_flags: np.ndarray  # [B, L] bool
    condition_flags: np.ndarray  # [B, L] bool
    t: np.ndarray  # [B] float64
    lengths: np.ndarray  # [B] int64

    @property
    def batch_size(self) -> int:
        return self.x0.shape[0]

    @property
    def seq_len(self) -> int:
        return self.x0.shape[1]

    @property
    def masked_count(self) -> int:
        return int(self.mask_flags.sum())


@dataclass(frozen=True)
class MaskedLoss:
    """Masked cross-entropy value with the count it was averaged over."""

    value: float
    masked_count: int

    @property
    def empty(self) -> bool:
        return self.masked_count == 0


def corrupt(
    sample: TaskSample,
    t: float,
    rng: np.random.Generator,
    mask_id: int,
) -> MaskedBatch:
    """Corrupt one sample at noise level ``t`` (batch of one, no padding)."""
    return corrupt_batch([sample], np.array([t], dtype=np.float64), rng, mask_id)


def corrupt_batch(
    samples: list[TaskSample],
    ts: np.ndarray,
    rng: np.random.Generator,
    mask_id: int,
    pad_to: int | None = None,
) -> MaskedBatch:
    """Corrupt a batch, one independent noise level per sequence."""
    ts = np.asarray(ts, dtype=np.float64)
    if ts.shape != (len(samples),):
        raise ValueError(
            f"need one noise level per sample, got {ts.shape} for {len(samples)}"
        )
    probs = gamma(ts)  # validates range
    lengths = np.array([len(s.tokens) for s in samples], dtype=np.int64)
    width = int(lengths.max()) if pad_to is None else pad_to
    if pad_to is not None and int(lengths.max()) > pad_to:
        raise ValueError(f"sequence of length {lengths.max()} exceeds pad_to={pad_to}")

    batch = len(samples)
    x0 = np.full((batch, width), mask_id, dtype=np.int64)
    xt = np.full((batch, width), mask_id, dtype=np.int64)
    mask_flags = np.zeros((batch, width), dtype=bool)
    condition_flags = np.zeros((batch, width), dtype=bool)

    for b, sample in enumerate(samples):
        n = lengths[b]
        x0[b, :n] = sample.tokens
        xt[b, :n] = sample.tokens
        condition_flags[b, list(sample.condition_positions)] = True
        targets = np.fromiter(sample.target_positions, dtype=np.int64,
                              count=len(sample.target_positions))
        if targets.size:
            hit = rng.random(targets.size) < probs[b]
            chosen = targets[hit]
            xt[b, chosen] = mask_id
            mask_flags[b, chosen] = True

    return MaskedBatch(x0=x0, xt=xt, mask_flags=mask_flags,
                       condition_flags=condition_flags, t=ts, lengths=lengths)


def masked_loss(logits: np.ndarray, batch: MaskedBatch) -> MaskedLoss:
    """Mean cross-entropy of ``x0`` under ``logits`` at masked positions.

    The sum over the masked set is divided by its size; an empty masked set
    yields value 0.0 with ``masked_count`` 0.
    """
    expected = (batch.batch_size, batch.seq_len)
    if logits.ndim != 3 or logits.shape[:2] != expected:
        raise ValueError(
            f"logits shape {logits.shape} does not match batch {expected}"
        )
    flags = batch.mask_flags
    count = int(flags.sum())
    if count == 0:
        return MaskedLoss(value=0.0, masked_count=0)
    rows = logits[flags]  # [count, V]
    targets = batch.x0[flags]
    peak = rows.max(axis=1, keepdims=True)
    logz = peak[:, 0] + np.log(np.exp(rows - peak).sum(axis=1))
    picked = rows[np.arange(count), targets]
    return MaskedLoss(value=float(np.mean(logz - picked)), masked_count=count)
