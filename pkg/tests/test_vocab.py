"""Vocabulary layout: region boundaries, classification, round trips."""

import numpy as np
import pytest

from sdlm.vocab import (
    SPECIAL_NAMES,
    TokenClass,
    build_vocab,
    classify,
    id_to_speech_code,
    special_id,
    special_name,
    speech_code_to_id,
)


def test_reference_layout_boundaries():
    # Reference configuration: 126,464 text ids, 500 speech codes.
    spec = build_vocab(126_464, 500)
    assert spec.special_offset == 126_464
    assert spec.speech_offset == 126_473
    assert spec.mask_id == 126_973
    assert spec.total == 126_974


def test_reference_special_ids():
    spec = build_vocab(126_464, 500)
    assert special_id(spec, "<|t2s|>") == 126_464
    assert special_id(spec, "<|asr|>") == 126_465
    assert special_id(spec, "<|s2s|>") == 126_466
    assert special_id(spec, "<|s2t|>") == 126_467
    assert special_id(spec, "<|t2t|>") == 126_468
    assert special_id(spec, "<|sot|>") == 126_469
    assert special_id(spec, "<|eot|>") == 126_470
    assert special_id(spec, "<|sos|>") == 126_471
    assert special_id(spec, "<|eos|>") == 126_472


def test_reference_speech_region_endpoints():
    spec = build_vocab(126_464, 500)
    assert speech_code_to_id(spec, 0) == 126_473
    assert speech_code_to_id(spec, 499) == 126_972
    assert classify(spec, 126_473) is TokenClass.SPEECH
    assert classify(spec, 126_972) is TokenClass.SPEECH
    assert classify(spec, 126_973) is TokenClass.MASK


def test_toy_layout():
    spec = build_vocab(10, 4)
    assert spec.special_offset == 10
    assert spec.speech_offset == 19
    assert spec.mask_id == 23
    assert spec.total == 24
    assert [classify(spec, i) for i in (0, 9)] == [TokenClass.TEXT] * 2
    assert [classify(spec, i) for i in (10, 18)] == [TokenClass.SPECIAL] * 2
    assert [classify(spec, i) for i in (19, 22)] == [TokenClass.SPEECH] * 2
    assert classify(spec, 23) is TokenClass.MASK


def test_classify_partitions_whole_range():
    spec = build_vocab(10, 4)
    counts = {cls: 0 for cls in TokenClass}
    for i in range(spec.total):
        counts[classify(spec, i)] += 1
    assert counts[TokenClass.TEXT] == 10
    assert counts[TokenClass.SPECIAL] == 9
    assert counts[TokenClass.SPEECH] == 4
    assert counts[TokenClass.MASK] == 1


def test_classify_rejects_out_of_range():
    spec = build_vocab(10, 4)
    with pytest.raises(ValueError):
        classify(spec, -1)
    with pytest.raises(ValueError):
        classify(spec, spec.total)


def test_special_names_fixed_order():
    assert SPECIAL_NAMES == (
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
    spec = build_vocab(10, 4)
    for name in SPECIAL_NAMES:
        assert special_name(spec, special_id(spec, name)) == name


def test_speech_round_trip_fuzz():
    rng = np.random.default_rng(0)
    for _ in range(200):
        text_size = int(rng.integers(1, 2000))
        speech_size = int(rng.integers(1, 800))
        spec = build_vocab(text_size, speech_size)
        code = int(rng.integers(0, speech_size))
        token = speech_code_to_id(spec, code)
        assert classify(spec, token) is TokenClass.SPEECH
        assert id_to_speech_code(spec, token) == code


def test_speech_conversion_bounds():
    spec = build_vocab(10, 4)
    with pytest.raises(ValueError):
        speech_code_to_id(spec, -1)
    with pytest.raises(ValueError):
        speech_code_to_id(spec, 4)
    with pytest.raises(ValueError):
        id_to_speech_code(spec, 18)
    with pytest.raises(ValueError):
        id_to_speech_code(spec, 23)


def test_build_vocab_rejects_empty_regions():
    with pytest.raises(ValueError):
        build_vocab(0, 4)
    with pytest.raises(ValueError):
        build_vocab(10, 0)


def test_special_id_unknown_name():
    spec = build_vocab(10, 4)
    with pytest.raises(KeyError):
        special_id(spec, "<|bogus|>")
