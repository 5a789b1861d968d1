"""Unified token space: text region, control tokens, speech codes, mask.

Token ids are laid out in four contiguous, disjoint regions:

    [0, text_size)                    text words
    [text_size, speech_offset)        the 9 control tokens
    [speech_offset, mask_id)          speech codes
    {mask_id}                         the single mask token

Speech codes are stored offset by ``text_size + 9`` so the regions never
collide; the mask token is appended after the speech region.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

SPECIAL_NAMES: tuple[str, ...] = (
    "<|t2s|>",
    "<|asr|>",
    "<|s2s|>",
    "<|s2t|>",
    "<|t2t|>",
    "<|sot|>",
    "<|eot|>",
    "<|sos|>",
    "<|eos|>",
)

N_SPECIAL = len(SPECIAL_NAMES)


class TokenClass(Enum):
    TEXT = "text"
    SPECIAL = "special"
    SPEECH = "speech"
    MASK = "mask"


@dataclass(frozen=True)
class VocabSpec:
    """Immutable layout of the unified vocabulary."""

    text_size: int
    speech_size: int
    special_names: tuple[str, ...] = field(default=SPECIAL_NAMES)

    def __post_init__(self) -> None:
        if self.text_size < 1:
            raise ValueError(f"text_size must be >= 1, got {self.text_size}")
        if self.speech_size < 1:
            raise ValueError(f"speech_size must be >= 1, got {self.speech_size}")
        if self.special_names != SPECIAL_NAMES:
            raise ValueError(
                f"special_names must be the {N_SPECIAL} fixed control tokens in order"
            )

    @property
    def special_offset(self) -> int:
        return self.text_size

    @property
    def speech_offset(self) -> int:
        return self.text_size + N_SPECIAL

    @property
    def mask_id(self) -> int:
        return self.speech_offset + self.speech_size

    @property
    def total(self) -> int:
        return self.mask_id + 1


def build_vocab(text_size: int, speech_size: int) -> VocabSpec:
    """Construct a vocabulary layout from the two region sizes."""
    return VocabSpec(text_size=text_size, speech_size=speech_size)


def classify(spec: VocabSpec, token_id: int) -> TokenClass:
    """Map a token id to its region."""
    if not 0 <= token_id < spec.total:
        raise ValueError(f"token id {token_id} outside [0, {spec.total})")
    if token_id < spec.text_size:
        return TokenClass.TEXT
    if token_id < spec.speech_offset:
        return TokenClass.SPECIAL
    if token_id < spec.mask_id:
        return TokenClass.SPEECH
    return TokenClass.MASK


def speech_code_to_id(spec: VocabSpec, code: int) -> int:
    """Offset a raw speech code into the unified id space."""
    if not 0 <= code < spec.speech_size:
        raise ValueError(f"speech code {code} outside [0, {spec.speech_size})")
    return spec.speech_offset + code


def id_to_speech_code(spec: VocabSpec, token_id: int) -> int:
    """Inverse of :func:`speech_code_to_id`."""
    if not spec.speech_offset <= token_id < spec.mask_id:
        raise ValueError(
            f"token id {token_id} outside speech region "
            f"[{spec.speech_offset}, {spec.mask_id})"
        )
    return token_id - spec.speech_offset


def special_id(spec: VocabSpec, name: str) -> int:
    """Id of a control token by name."""
    try:
        index = spec.special_names.index(name)
    except ValueError:
        raise KeyError(f"unknown special token {name!r}") from None
    return spec.text_size + index


def special_name(spec: VocabSpec, token_id: int) -> str:
    """Name of a control token by id."""
    if classify(spec, token_id) is not TokenClass.SPECIAL:
        raise ValueError(f"token id {token_id} is not in the special region")
    return spec.special_names[token_id - spec.text_size]
