"""Task sequence layouts, condition/target partition, and output parsing.

Five tasks share one grammar: a task token, a delimited input block, then a
delimited target block. Text blocks are bracketed by <|sot|>/<|eot|>, speech
blocks by <|sos|>/<|eos|>:

    TTS  [<|t2s|>, <|sot|>, text,   <|eot|>, <|sos|>, speech, <|eos|>]
    ASR  [<|asr|>, <|sos|>, speech, <|eos|>, <|sot|>, text,   <|eot|>]
    S2S  [<|s2s|>, <|sos|>, speech, <|eos|>, <|sot|>, think, <|eot|>,
          <|sos|>, speech, <|eos|>]
    S2T  [<|s2t|>, <|sos|>, speech, <|eos|>, <|sot|>, think, SEP, reply,
          <|eot|>]
    T2T  [<|t2t|>, <|sot|>, text,   <|eot|>, <|sot|>, think, SEP, reply,
          <|eot|>]

The condition set C is the prefix through the delimiter that opens the
target block; the target set Y is everything after it, including interior
and closing delimiters, which the model must emit itself. S2T and T2T pack
thinking and reply into one text block, split by the tokenizer's literal
"\\n\\n" separator word (text id 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import toycodec
from .tokenizer import WordTokenizer
from .toycodec import CodecSpec
from .vocab import TokenClass, VocabSpec, classify, special_id, speech_code_to_id

SEP_TEXT_ID = 1  # WordTokenizer reserves id 1 for the "\n\n" separator word

TEXT = "text"
SPEECH = "speech"


class TaskKind(Enum):
    TTS = "tts"
    ASR = "asr"
    S2S = "s2s"
    S2T = "s2t"
    T2T = "t2t"

    @property
    def token_name(self) -> str:
        return _TASK_TOKEN[self]

    @property
    def input_modality(self) -> str:
        return TEXT if self in (TaskKind.TTS, TaskKind.T2T) else SPEECH

    @property
    def reply_modality(self) -> str:
        return SPEECH if self in (TaskKind.TTS, TaskKind.S2S) else TEXT

    @property
    def has_thinking(self) -> bool:
        return self in (TaskKind.S2S, TaskKind.S2T, TaskKind.T2T)


_TASK_TOKEN = {
    TaskKind.TTS: "<|t2s|>",
    TaskKind.ASR: "<|asr|>",
    TaskKind.S2S: "<|s2s|>",
    TaskKind.S2T: "<|s2t|>",
    TaskKind.T2T: "<|t2t|>",
}


class FormatError(ValueError):
    """Raised when a record is missing fields its task requires."""


@dataclass(frozen=True)
class Segment:
    """Half-open span [start, stop) of one content region, delimiters excluded."""

    role: str  # "user" | "think" | "reply"
    modality: str  # "text" | "speech"
    start: int
    stop: int


@dataclass(frozen=True)
class TaskSample:
    """One laid-out training sequence with its condition/target partition."""

    task: TaskKind
    tokens: tuple[int, ...]
    condition_positions: tuple[int, ...]
    target_positions: tuple[int, ...]
    segments: tuple[Segment, ...]


@dataclass(frozen=True)
class ExtractedSegments:
    """Thinking and reply content recovered from a generated sequence."""

    think_ids: tuple[int, ...]
    reply_ids: tuple[int, ...]
    reply_modality: str


class MalformedGenerationError(ValueError):
    """Generated sequence violates the task grammar.

    Carries the partial parse recovered before the violation; the sampler
    attaches the generation trace before re-raising.
    """

    def __init__(self, message: str, partial: ExtractedSegments):
        super().__init__(message)
        self.partial = partial
        self.trace = None


def _check_toolkit(tok: WordTokenizer, vocab: VocabSpec, codec: CodecSpec) -> None:
    if vocab.text_size != tok.size:
        raise ValueError(
            f"vocab text region ({vocab.text_size}) does not match "
            f"tokenizer size ({tok.size})"
        )
    if vocab.speech_size != codec.speech_size:
        raise ValueError(
            f"vocab speech region ({vocab.speech_size}) does not match "
            f"codec speech_size ({codec.speech_size})"
        )


def _require(task: TaskKind, name: str, value: str, nonempty: bool) -> None:
    if nonempty and not value.strip():
        raise FormatError(f"{task.value} requires nonempty {name}")
    if not nonempty and value.strip():
        raise FormatError(f"{task.value} does not use {name}, got {value!r}")


def validate_fields(task: TaskKind, user: str, think: str, reply: str) -> None:
    """Check the field requirements of ``task``; raise FormatError otherwise."""
    if task in (TaskKind.TTS, TaskKind.ASR):
        _require(task, "user_text", user, nonempty=True)
        _require(task, "think_text", think, nonempty=False)
        _require(task, "reply_text", reply, nonempty=False)
    elif task in (TaskKind.S2S, TaskKind.S2T):
        _require(task, "user_text", user, nonempty=True)
        _require(task, "reply_text", reply, nonempty=True)
    else:  # T2T: empty user block doubles as unconditional text modeling
        _require(task, "reply_text", reply, nonempty=True)


def _encode_speech(
    codec: CodecSpec,
    vocab: VocabSpec,
    text: str,
    rng: np.random.Generator,
) -> list[int]:
    return [speech_code_to_id(vocab, c) for c in toycodec.encode(codec, text, rng)]


def _condition_tokens(
    task: TaskKind,
    user_payload: str | list[int],
    tok: WordTokenizer,
    vocab: VocabSpec,
    codec: CodecSpec,
    rng: np.random.Generator | None,
) -> tuple[list[int], Segment]:
    """Task token, input block, and the target-opening delimiter."""
    sot = special_id(vocab, "<|sot|>")
    eot = special_id(vocab, "<|eot|>")
    sos = special_id(vocab, "<|sos|>")
    eos = special_id(vocab, "<|eos|>")

    if task.input_modality == TEXT:
        if not isinstance(user_payload, str):
            raise TypeError(f"{task.value} input is text, got token list")
        body = tok.encode(user_payload)
        open_in, close_in = sot, eot
    else:
        if isinstance(user_payload, str):
            if rng is None:
                raise ValueError("encoding a speech input requires an rng")
            body = _encode_speech(codec, vocab, user_payload, rng)
        else:
            body = [speech_code_to_id(vocab, c) for c in user_payload]
        open_in, close_in = sos, eos

    tokens = [special_id(vocab, task.token_name), open_in]
    user_seg = Segment("user", task.input_modality, 2, 2 + len(body))
    tokens.extend(body)
    tokens.append(close_in)
    # The delimiter opening the target block: <|sos|> only for TTS.
    tokens.append(sos if task is TaskKind.TTS else sot)
    return tokens, user_seg


def build_condition(
    task: TaskKind,
    user_payload: str | list[int],
    tok: WordTokenizer,
    vocab: VocabSpec,
    codec: CodecSpec,
    rng: np.random.Generator | None = None,
) -> list[int]:
    """Condition prefix for generation; speech payloads may be raw codes."""
    _check_toolkit(tok, vocab, codec)
    tokens, _ = _condition_tokens(task, user_payload, tok, vocab, codec, rng)
    return tokens


def build(
    task: TaskKind,
    user_text: str,
    think_text: str,
    reply_text: str,
    tok: WordTokenizer,
    vocab: VocabSpec,
    codec: CodecSpec,
    rng: np.random.Generator,
) -> TaskSample:
    """Lay out one complete training sequence for ``task``.

    TTS and ASR derive both sides from ``user_text`` (the codec guarantees
    the speech rendering matches); the dialogue tasks take the reply, and
    optionally the thinking text, from their own fields.
    """
    _check_toolkit(tok, vocab, codec)
    validate_fields(task, user_text, think_text, reply_text)
    eot = special_id(vocab, "<|eot|>")
    sos = special_id(vocab, "<|sos|>")
    eos = special_id(vocab, "<|eos|>")

    tokens, user_seg = _condition_tokens(task, user_text, tok, vocab, codec, rng)
    open_idx = len(tokens) - 1
    segments = [user_seg]

    if task is TaskKind.TTS:
        frames = _encode_speech(codec, vocab, user_text, rng)
        segments.append(Segment("reply", SPEECH, len(tokens), len(tokens) + len(frames)))
        tokens.extend(frames)
        tokens.append(eos)
    elif task is TaskKind.ASR:
        text_ids = tok.encode(user_text)
        segments.append(Segment("reply", TEXT, len(tokens), len(tokens) + len(text_ids)))
        tokens.extend(text_ids)
        tokens.append(eot)
    elif task is TaskKind.S2S:
        think_ids = tok.encode(think_text)
        segments.append(Segment("think", TEXT, len(tokens), len(tokens) + len(think_ids)))
        tokens.extend(think_ids)
        tokens.extend([eot, sos])
        frames = _encode_speech(codec, vocab, reply_text, rng)
        segments.append(Segment("reply", SPEECH, len(tokens), len(tokens) + len(frames)))
        tokens.extend(frames)
        tokens.append(eos)
    else:  # S2T, T2T: one text block holding think, separator, reply
        think_ids = tok.encode(think_text)
        segments.append(Segment("think", TEXT, len(tokens), len(tokens) + len(think_ids)))
        tokens.extend(think_ids)
        tokens.append(SEP_TEXT_ID)
        reply_ids = tok.encode(reply_text)
        segments.append(Segment("reply", TEXT, len(tokens), len(tokens) + len(reply_ids)))
        tokens.extend(reply_ids)
        tokens.append(eot)

    return TaskSample(
        task=task,
        tokens=tuple(tokens),
        condition_positions=tuple(range(open_idx + 1)),
        target_positions=tuple(range(open_idx + 1, len(tokens))),
        segments=tuple(segments),
    )


def partition(sample: TaskSample) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The stored (C, Y) partition of a sample's positions."""
    return sample.condition_positions, sample.target_positions


def task_of_token(vocab: VocabSpec, token_id: int) -> TaskKind:
    """TaskKind whose task token is ``token_id``."""
    for task in TaskKind:
        if token_id == special_id(vocab, task.token_name):
            return task
    raise ValueError(f"token id {token_id} is not a task token")


def _parse_span(
    tokens: list[int],
    start: int,
    closing: int,
    modality: str,
    vocab: VocabSpec,
) -> tuple[list[int], int | None]:
    """Collect content ids from ``start`` until ``closing``.

    Returns (ids, index-of-closing) or (ids, None) when the sequence ends
    first. A token of the wrong region raises ValueError carrying the ids
    parsed so far.
    """
    wanted = TokenClass.TEXT if modality == TEXT else TokenClass.SPEECH
    ids: list[int] = []
    for i in range(start, len(tokens)):
        token = tokens[i]
        if token == closing:
            return ids, i
        if classify(vocab, token) is not wanted:
            raise _SpanError(ids, i, token)
        ids.append(token)
    return ids, None


class _SpanError(Exception):
    def __init__(self, ids: list[int], index: int, token: int):
        self.ids = ids
        self.index = index
        self.token = token


def extract_segments(
    tokens: list[int] | np.ndarray,
    vocab: VocabSpec,
    sep_id: int = SEP_TEXT_ID,
) -> ExtractedSegments:
    """Parse a full generated sequence back into thinking and reply ids.

    Trailing tokens after the target's closing delimiter are ignored: the
    sampler fills every position, so content past the close is padding the
    model chose to emit. A missing delimiter, or a token of the wrong
    modality inside a span, raises MalformedGenerationError carrying the
    partial parse.
    """
    tokens = [int(t) for t in tokens]

    def fail(message: str, think: list[int], reply: list[int], modality: str):
        partial = ExtractedSegments(tuple(think), tuple(reply), modality)
        raise MalformedGenerationError(message, partial)

    if not tokens:
        fail("empty sequence", [], [], TEXT)
    try:
        task = task_of_token(vocab, tokens[0])
    except ValueError:
        fail(f"position 0 holds {tokens[0]}, not a task token", [], [], TEXT)
    modality = task.reply_modality

    sot = special_id(vocab, "<|sot|>")
    eot = special_id(vocab, "<|eot|>")
    sos = special_id(vocab, "<|sos|>")
    eos = special_id(vocab, "<|eos|>")
    open_in, close_in = (sot, eot) if task.input_modality == TEXT else (sos, eos)

    if len(tokens) < 2 or tokens[1] != open_in:
        fail(f"{task.value} input block must open at position 1", [], [], modality)
    try:
        close_idx = tokens.index(close_in, 2)
    except ValueError:
        fail(f"{task.value} input block never closes", [], [], modality)
    target_open = sos if task is TaskKind.TTS else sot
    open_idx = close_idx + 1
    if open_idx >= len(tokens) or tokens[open_idx] != target_open:
        fail(f"{task.value} target block must open after the input", [], [], modality)
    body_start = open_idx + 1

    if task is TaskKind.TTS:
        try:
            reply, end = _parse_span(tokens, body_start, eos, SPEECH, vocab)
        except _SpanError as err:
            fail(f"non-speech token {err.token} at {err.index} in speech reply",
                 [], err.ids, modality)
        if end is None:
            fail("speech reply never closes with <|eos|>", [], reply, modality)
        return ExtractedSegments((), tuple(reply), SPEECH)

    if task is TaskKind.ASR:
        try:
            reply, end = _parse_span(tokens, body_start, eot, TEXT, vocab)
        except _SpanError as err:
            fail(f"non-text token {err.token} at {err.index} in text reply",
                 [], err.ids, modality)
        if end is None:
            fail("text reply never closes with <|eot|>", [], reply, modality)
        return ExtractedSegments((), tuple(reply), TEXT)

    if task is TaskKind.S2S:
        try:
            think, end = _parse_span(tokens, body_start, eot, TEXT, vocab)
        except _SpanError as err:
            fail(f"non-text token {err.token} at {err.index} in thinking",
                 err.ids, [], modality)
        if end is None:
            fail("thinking block never closes with <|eot|>", think, [], modality)
        reply_open = end + 1
        if reply_open >= len(tokens) or tokens[reply_open] != sos:
            fail("speech reply must open right after thinking", think, [], modality)
        try:
            reply, end = _parse_span(tokens, reply_open + 1, eos, SPEECH, vocab)
        except _SpanError as err:
            fail(f"non-speech token {err.token} at {err.index} in speech reply",
                 think, err.ids, modality)
        if end is None:
            fail("speech reply never closes with <|eos|>", think, reply, modality)
        return ExtractedSegments(tuple(think), tuple(reply), SPEECH)

    # S2T / T2T: one text block, split on the first separator word.
    try:
        block, end = _parse_span(tokens, body_start, eot, TEXT, vocab)
    except _SpanError as err:
        fail(f"non-text token {err.token} at {err.index} in text target",
             [], err.ids, modality)
    if end is None:
        fail("text target never closes with <|eot|>", [], block, modality)
    if sep_id in block:
        cut = block.index(sep_id)
        return ExtractedSegments(tuple(block[:cut]), tuple(block[cut + 1:]), TEXT)
    # No separator emitted: read the whole block as the reply.
    return ExtractedSegments((), tuple(block), TEXT)
