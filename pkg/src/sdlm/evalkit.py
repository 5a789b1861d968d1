"""Metrics and diagnostics: WER, TTS/ASR/QA harnesses, masking probes.

Scoring is pure and model-agnostic: the generation harnesses accept either
DenoiserParams or any callable with the responder signature, so plumbing
can be verified with oracles before a model exists. Thinking segments are
never graded; only the reply counts.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from . import toycodec
from .denoiser import DenoiserParams
from .diffusion import corrupt
from .sampler import Response, respond
from .sequence import MalformedGenerationError, TaskKind, TaskSample
from .tokenizer import WordTokenizer
from .toycodec import CodecSpec, WpsCheck, duration_seconds, normalize, wps_validate
from .vocab import VocabSpec


class UndefinedRateError(ValueError):
    """Raised for WER against an empty reference with a nonempty hypothesis."""


def edit_distance(reference: Sequence[str], hypothesis: Sequence[str]) -> int:
    """Word-level Levenshtein distance, all edits cost 1."""
    ref, hyp = list(reference), list(hypothesis)
    prev = list(range(len(hyp) + 1))
    for i, r in enumerate(ref, start=1):
        cur = [i] + [0] * len(hyp)
        for j, h in enumerate(hyp, start=1):
            cur[j] = min(
                prev[j - 1] + (r != h),  # substitution / match
                prev[j] + 1,  # deletion
                cur[j - 1] + 1,  # insertion
            )
        prev = cur
    return prev[len(hyp)]


def wer(reference: str | Sequence[str], hypothesis: str | Sequence[str]) -> float:
    """Word error rate: edit distance divided by reference length."""
    ref = reference.split() if isinstance(reference, str) else list(reference)
    hyp = hypothesis.split() if isinstance(hypothesis, str) else list(hypothesis)
    if not ref:
        if hyp:
            raise UndefinedRateError(
                "WER is undefined for an empty reference and nonempty hypothesis"
            )
        return 0.0
    return edit_distance(ref, hyp) / len(ref)


_UNITS = ["zero", "one", "two", "three", "four", "five", "six", "seven",
          "eight", "nine"]
_TEENS = ["ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
          "sixteen", "seventeen", "eighteen", "nineteen"]
_TENS = ["twenty", "thirty", "forty", "fifty", "sixty", "seventy",
         "eighty", "ninety"]
_UNIT_VALUES = {w: i for i, w in enumerate(_UNITS)}
_TEEN_VALUES = {w: 10 + i for i, w in enumerate(_TEENS)}
_TEN_VALUES = {w: 20 + 10 * i for i, w in enumerate(_TENS)}


def number_to_words(n: int) -> str:
    """English words for an integer in [0, 999], hyphenating 21-99 compounds.

    Hyphenation keeps every value below one hundred a single whitespace
    token, so templated sentences built from these words have the same
    token length for every value.
    """
    if not 0 <= n <= 999:
        raise ValueError(f"number out of supported range [0, 999]: {n}")
    if n < 10:
        return _UNITS[n]
    if n < 20:
        return _TEENS[n - 10]
    if n < 100:
        tens, rem = divmod(n, 10)
        word = _TENS[tens - 2]
        return f"{word}-{_UNITS[rem]}" if rem else word
    hundreds, rem = divmod(n, 100)
    word = f"{_UNITS[hundreds]} hundred"
    return f"{word} {number_to_words(rem)}" if rem else word


def _consume_number(tokens: list[str], i: int) -> tuple[int | None, int]:
    """Parse a number-word run starting at ``i``; return (value, next index)."""
    total: int | None = None
    j = i
    if (j + 1 < len(tokens) and tokens[j] in _UNIT_VALUES
            and tokens[j + 1] == "hundred"):
        total = _UNIT_VALUES[tokens[j]] * 100
        j += 2
    if j < len(tokens):
        word = tokens[j]
        if word in _TEEN_VALUES:
            total = (total or 0) + _TEEN_VALUES[word]
            j += 1
        elif word in _TEN_VALUES:
            total = (total or 0) + _TEN_VALUES[word]
            j += 1
            if j < len(tokens) and tokens[j] in _UNIT_VALUES and tokens[j] != "zero":
                total += _UNIT_VALUES[tokens[j]]
                j += 1
        elif word in _UNIT_VALUES and (total is not None or j == i):
            total = (total or 0) + _UNIT_VALUES[word]
            j += 1
    return total, j


def normalize_answer(text: str) -> str:
    """Lowercase, strip punctuation, and map number words <= 999 to digits."""
    clean = re.sub(r"[^a-z0-9 ]+", " ", text.lower())
    tokens = clean.split()
    out: list[str] = []
    i = 0
    while i < len(tokens):
        value, j = _consume_number(tokens, i)
        if value is not None and j > i:
            out.append(str(value))
            i = j
        else:
            out.append(tokens[i])
            i += 1
    return " ".join(out)


Responder = Callable[..., Response]


def model_responder(
    params: DenoiserParams,
    tok: WordTokenizer,
    vocab: VocabSpec,
    codec: CodecSpec,
    temperature: float = 1.0,
) -> Responder:
    """Wrap trained parameters as a (task, payload, n, T) -> Response callable."""

    def _respond(task: TaskKind, payload, n: int, T: int) -> Response:
        return respond(params, task, payload, n, T, vocab, codec, tok,
                       temperature=temperature)

    return _respond


def _as_responder(model, tok, vocab, codec) -> Responder:
    if isinstance(model, DenoiserParams):
        return model_responder(model, tok, vocab, codec)
    if callable(model):
        return model
    raise TypeError(f"model must be DenoiserParams or a responder, got {model!r}")


@dataclass(frozen=True)
class EvalReport:
    """Corpus WER report; errors are length-weighted over references."""

    wer: float
    n_items: int
    n_malformed: int
    ref_words: int
    errors: int
    item_wers: tuple[float, ...]
    wps_counts: dict[WpsCheck, int] | None = None

    @property
    def empty(self) -> bool:
        return self.n_items == 0


def gold_tts_length(codec: CodecSpec, text: str) -> int:
    """Target length for a TTS request: frames plus the closing delimiter."""
    return codec.frames_per_char * len(normalize(text)) + 1


def gold_text_length(tok: WordTokenizer, text: str) -> int:
    """Target length for an ASR request: word ids plus the closing delimiter."""
    return len(tok.encode(text)) + 1


def _resolve_n(n_policy, gold: int) -> int:
    if n_policy == "gold":
        return gold
    if isinstance(n_policy, int):
        return n_policy
    return int(n_policy(gold))


def tts_eval(
    model,
    texts: Sequence[str],
    tok: WordTokenizer,
    vocab: VocabSpec,
    codec: CodecSpec,
    T: int | None = None,
    n_policy="gold",
    steps_policy=None,
) -> EvalReport:
    """Generate speech for each text, decode, and score WER vs the input.

    ``T`` fixes the step count; alternatively ``steps_policy(n) -> T``
    derives it from each item's target length. Malformed generations score
    WER 1.0 for the item and are counted separately. The WPS check runs on
    the reference word count against the generated duration.
    """
    responder = _as_responder(model, tok, vocab, codec)
    total_errors = 0
    total_ref = 0
    malformed = 0
    item_wers = []
    wps_counts: Counter = Counter()
    for text in texts:
        clean = normalize(text)
        ref = clean.split()
        n = _resolve_n(n_policy, gold_tts_length(codec, text))
        steps = steps_policy(n) if steps_policy is not None else T
        if steps is None:
            raise ValueError("provide either T or steps_policy")
        try:
            resp = responder(TaskKind.TTS, text, n, steps)
            dist = edit_distance(ref, resp.reply_text.split())
            seconds = duration_seconds(codec, resp.reply_ids)
            wps_counts[wps_validate(len(ref), seconds)] += 1
        except MalformedGenerationError:
            malformed += 1
            dist = len(ref)
        total_errors += dist
        total_ref += len(ref)
        item_wers.append(dist / len(ref) if ref else 0.0)
    return EvalReport(
        wer=total_errors / total_ref if total_ref else 0.0,
        n_items=len(texts),
        n_malformed=malformed,
        ref_words=total_ref,
        errors=total_errors,
        item_wers=tuple(item_wers),
        wps_counts=dict(wps_counts),
    )


def asr_eval(
    model,
    texts: Sequence[str],
    tok: WordTokenizer,
    vocab: VocabSpec,
    codec: CodecSpec,
    T: int | None = None,
    n_policy="gold",
    steps_policy=None,
    seed: int = 0,
) -> EvalReport:
    """Encode each text as speech, transcribe with the model, score WER."""
    responder = _as_responder(model, tok, vocab, codec)
    total_errors = 0
    total_ref = 0
    malformed = 0
    item_wers = []
    for idx, text in enumerate(texts):
        clean = normalize(text)
        ref = clean.split()
        codes = toycodec.encode(codec, text, np.random.default_rng([seed, idx]))
        n = _resolve_n(n_policy, gold_text_length(tok, clean))
        steps = steps_policy(n) if steps_policy is not None else T
        if steps is None:
            raise ValueError("provide either T or steps_policy")
        try:
            resp = responder(TaskKind.ASR, codes, n, steps)
            dist = edit_distance(ref, resp.reply_text.split())
        except MalformedGenerationError:
            malformed += 1
            dist = len(ref)
        total_errors += dist
        total_ref += len(ref)
        item_wers.append(dist / len(ref) if ref else 0.0)
    return EvalReport(
        wer=total_errors / total_ref if total_ref else 0.0,
        n_items=len(texts),
        n_malformed=malformed,
        ref_words=total_ref,
        errors=total_errors,
        item_wers=tuple(item_wers),
    )


@dataclass(frozen=True)
class QaReport:
    """Exact-match QA accuracy over normalized replies."""

    accuracy: float
    n_items: int
    n_correct: int
    n_malformed: int

    @property
    def empty(self) -> bool:
        return self.n_items == 0


def qa_accuracy(golds: Sequence[str], replies: Sequence[str | None]) -> QaReport:
    """Exact match after normalization; None replies count as wrong."""
    if len(golds) != len(replies):
        raise ValueError(
            f"{len(golds)} gold answers but {len(replies)} replies"
        )
    if not golds:
        return QaReport(accuracy=0.0, n_items=0, n_correct=0, n_malformed=0)
    correct = 0
    malformed = 0
    for gold, reply in zip(golds, replies):
        if reply is None:
            malformed += 1
            continue
        if normalize_answer(gold) == normalize_answer(reply):
            correct += 1
    return QaReport(
        accuracy=correct / len(golds),
        n_items=len(golds),
        n_correct=correct,
        n_malformed=malformed,
    )


def qa_eval(
    model,
    records,
    tok: WordTokenizer,
    vocab: VocabSpec,
    codec: CodecSpec,
    T: int | None = None,
    steps_policy=None,
) -> QaReport:
    """Answer each record's question as T2T and score the reply exactly.

    The target length is each record's own gold length (think, separator,
    reply, closing delimiter), so corpora with and without thinking are
    each evaluated in their own training format.
    """
    responder = _as_responder(model, tok, vocab, codec)
    golds: list[str] = []
    replies: list[str | None] = []
    for record in records:
        n = (len(tok.encode(record.think_text)) + 1
             + len(tok.encode(record.reply_text)) + 1)
        steps = steps_policy(n) if steps_policy is not None else T
        if steps is None:
            raise ValueError("provide either T or steps_policy")
        golds.append(record.reply_text)
        try:
            resp = responder(TaskKind.T2T, record.user_text, n, steps)
            replies.append(resp.reply_text)
        except MalformedGenerationError:
            replies.append(None)
    return qa_accuracy(golds, replies)


@dataclass(frozen=True)
class ProbeResult:
    """Empirical masked fraction with a 99% binomial interval."""

    t: float
    mean_fraction: float
    ci_low: float
    ci_high: float
    trials: int
    target_positions: int


def masking_probe(
    t: float,
    sample: TaskSample,
    trials: int,
    mask_id: int,
    seed: int = 0,
) -> ProbeResult:
    """Repeatedly corrupt ``sample`` at level ``t`` and measure mask rates."""
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")
    n_targets = len(sample.target_positions)
    masked = 0
    for trial in range(trials):
        batch = corrupt(sample, t, np.random.default_rng([seed, trial]), mask_id)
        masked += batch.masked_count
    total = trials * n_targets
    p_hat = masked / total
    z = 2.5758293035489004  # 99% two-sided normal quantile
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / total)
    return ProbeResult(
        t=t,
        mean_fraction=p_hat,
        ci_low=max(0.0, p_hat - half),
        ci_high=min(1.0, p_hat + half),
        trials=trials,
        target_positions=n_targets,
    )


def metrics_lines(entries: Sequence[tuple[str, float, int]]) -> list[str]:
    """Line-oriented metrics: name, value, count (tab separated)."""
    return [f"{name}\t{value:.6f}\t{count}" for name, value, count in entries]
