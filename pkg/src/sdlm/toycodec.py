"""Deterministic toy codec mapping text to discrete speech codes and back.

Each character of a normalized string becomes ``frames_per_char`` codes.
A character has ``variants_per_char`` interchangeable codes (variant j of
character c is ``index(c) * r + j``), so the encoder is stochastic while
the decoder stays exact: it collapses every run of ``frames_per_char``
codes by majority vote over characters, pooling the counts of a
character's variants so that one corrupted frame in a run of three can
never outvote two agreeing frames.

Codes are raw indices in [0, speech_size); embedding them into the unified
vocabulary is the vocab module's job. The notional frame rate is 25 codes
per second, which grounds duration and the words-per-second validity check.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

DEFAULT_CHARSET = "abcdefghijklmnopqrstuvwxyz 0123456789"

FRAME_RATE = 25  # codes per second


class UnencodableInputError(ValueError):
    """Raised when normalized text contains a character outside the charset."""


class UnmappableCodeError(ValueError):
    """Raised when a code does not correspond to any (character, variant)."""


class InvalidMeasurementError(ValueError):
    """Raised when a WPS check is requested with a nonpositive duration."""


class WpsCheck(Enum):
    PASS = "pass"
    REJECT_TOO_SLOW = "reject-too-slow"
    REJECT_TOO_FAST = "reject-too-fast"
    SKIPPED = "skipped"


WPS_MIN = 1.5
WPS_MAX = 5.5
WPS_MIN_WORDS = 5


@dataclass(frozen=True)
class CodecSpec:
    """Immutable parameters of the toy codec."""

    charset: str = DEFAULT_CHARSET
    variants_per_char: int = 2
    frames_per_char: int = 2
    speech_size: int = 500
    frame_rate: int = FRAME_RATE

    def __post_init__(self) -> None:
        if not self.charset:
            raise ValueError("charset must be nonempty")
        if len(set(self.charset)) != len(self.charset):
            raise ValueError("charset characters must be unique")
        if self.variants_per_char < 1:
            raise ValueError("variants_per_char must be >= 1")
        if self.frames_per_char < 1:
            raise ValueError("frames_per_char must be >= 1")
        used = self.variants_per_char * len(self.charset)
        if used > self.speech_size:
            raise ValueError(
                f"need {used} codes for {len(self.charset)} chars x "
                f"{self.variants_per_char} variants, but speech_size is "
                f"{self.speech_size}"
            )
        if self.frame_rate < 1:
            raise ValueError("frame_rate must be >= 1")

    @property
    def used_codes(self) -> int:
        """Number of codes actually mapped to (character, variant) pairs."""
        return self.variants_per_char * len(self.charset)

    def variant(self, char: str, j: int) -> int:
        """Code for variant ``j`` of ``char``."""
        index = self.charset.find(char)
        if index < 0:
            raise UnencodableInputError(f"character {char!r} not in charset")
        if not 0 <= j < self.variants_per_char:
            raise ValueError(f"variant {j} outside [0, {self.variants_per_char})")
        return index * self.variants_per_char + j

    def char_of(self, code: int) -> str:
        """Character whose variant set contains ``code``."""
        if not 0 <= code < self.used_codes:
            raise UnmappableCodeError(
                f"code {code} outside mapped range [0, {self.used_codes})"
            )
        return self.charset[code // self.variants_per_char]


@dataclass(frozen=True)
class DecodeResult:
    """Decoded text plus a flag for a dropped trailing partial run."""

    text: str
    truncated: bool = False


def normalize(text: str) -> str:
    """Lowercase, read hyphens as spaces, collapse whitespace, strip ends.

    Hyphenated compounds ("twenty-one") are spoken as separate words, so
    the speech front end treats the hyphen as a word gap.
    """
    return " ".join(text.lower().replace("-", " ").split())


def encode(spec: CodecSpec, text: str, rng: np.random.Generator) -> list[int]:
    """Encode normalized ``text`` as ``frames_per_char`` codes per character.

    Each frame independently picks a uniform variant of its character, so
    repeated calls differ when ``variants_per_char > 1`` but always decode
    to the same string.
    """
    clean = normalize(text)
    codes: list[int] = []
    for char in clean:
        index = spec.charset.find(char)
        if index < 0:
            raise UnencodableInputError(
                f"character {char!r} not in codec charset"
            )
        base = index * spec.variants_per_char
        for _ in range(spec.frames_per_char):
            codes.append(base + int(rng.integers(0, spec.variants_per_char)))
    return codes


def decode(spec: CodecSpec, codes: list[int] | np.ndarray) -> DecodeResult:
    """Collapse runs of ``frames_per_char`` codes back to characters.

    Each complete run votes by majority over characters, with every
    variant of a character counting toward it; ties go to the smallest
    character index (equivalently, the smallest code after pooling). A
    trailing partial run is dropped and flagged.
    """
    codes = [int(c) for c in codes]
    for code in codes:
        if not 0 <= code < spec.used_codes:
            raise UnmappableCodeError(
                f"code {code} outside mapped range [0, {spec.used_codes})"
            )
    d = spec.frames_per_char
    n_runs, remainder = divmod(len(codes), d)
    chars = []
    for r in range(n_runs):
        run = codes[r * d : (r + 1) * d]
        counts = Counter(code // spec.variants_per_char for code in run)
        top = max(counts.values())
        winner = min(idx for idx, count in counts.items() if count == top)
        chars.append(spec.charset[winner])
    return DecodeResult(text="".join(chars), truncated=remainder != 0)


def duration_seconds(spec: CodecSpec, codes: list[int] | np.ndarray) -> float:
    """Notional duration of a code sequence at the codec frame rate."""
    return len(codes) / spec.frame_rate


def wps_validate(word_count: int, duration_seconds: float) -> WpsCheck:
    """Words-per-second validity check for synthesized speech.

    Texts under ``WPS_MIN_WORDS`` words skip the check; otherwise the rate
    must fall inside [WPS_MIN, WPS_MAX] inclusive.
    """
    if word_count < WPS_MIN_WORDS:
        return WpsCheck.SKIPPED
    if duration_seconds <= 0:
        raise InvalidMeasurementError(
            f"duration must be positive for {word_count} words, "
            f"got {duration_seconds}"
        )
    wps = word_count / duration_seconds
    if wps < WPS_MIN:
        return WpsCheck.REJECT_TOO_SLOW
    if wps > WPS_MAX:
        return WpsCheck.REJECT_TOO_FAST
    return WpsCheck.PASS
