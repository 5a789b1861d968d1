"""Toy codec: round trips, majority-vote decoding, duration, WPS check."""

import numpy as np
import pytest

from sdlm.toycodec import (
    DEFAULT_CHARSET,
    CodecSpec,
    InvalidMeasurementError,
    UnencodableInputError,
    UnmappableCodeError,
    WpsCheck,
    decode,
    duration_seconds,
    encode,
    normalize,
    wps_validate,
)


def random_text(rng, max_len=40):
    # Raw text with uppercase and messy whitespace so normalize() matters.
    pool = DEFAULT_CHARSET + DEFAULT_CHARSET.upper() + "   "
    length = int(rng.integers(0, max_len))
    return "".join(pool[int(rng.integers(0, len(pool)))] for _ in range(length))


def test_default_spec_values():
    spec = CodecSpec()
    assert spec.charset == "abcdefghijklmnopqrstuvwxyz 0123456789"
    assert len(spec.charset) == 37
    assert spec.variants_per_char == 2
    assert spec.frames_per_char == 2
    assert spec.speech_size == 500
    assert spec.frame_rate == 25
    assert spec.used_codes == 74


def test_spec_validation():
    with pytest.raises(ValueError):
        CodecSpec(charset="")
    with pytest.raises(ValueError):
        CodecSpec(charset="aa")
    with pytest.raises(ValueError):
        CodecSpec(variants_per_char=0)
    with pytest.raises(ValueError):
        CodecSpec(frames_per_char=0)
    with pytest.raises(ValueError):
        # 2 * 37 = 74 codes needed, only 73 available.
        CodecSpec(speech_size=73)


def test_normalize():
    assert normalize("  Hello   WORLD ") == "hello world"
    assert normalize("a\t\nb") == "a b"
    assert normalize("twenty-one") == "twenty one"
    assert normalize("") == ""
    assert normalize("   ") == ""


def test_encode_deterministic_duplication_when_single_variant():
    spec = CodecSpec(charset="abcdefghijklmnopqrstuvwxyz",
                     variants_per_char=1, frames_per_char=2, speech_size=26)
    rng = np.random.default_rng(0)
    assert encode(spec, "ab", rng) == [0, 0, 1, 1]


def test_encode_variant_set_membership():
    spec = CodecSpec(charset="abcdefghijklmnopqrstuvwxyz",
                     variants_per_char=3, frames_per_char=1, speech_size=100)
    rng = np.random.default_rng(0)
    for _ in range(50):
        codes = encode(spec, "a", rng)
        assert len(codes) == 1
        assert codes[0] in {0, 1, 2}


def test_encode_length_law():
    spec = CodecSpec()
    rng = np.random.default_rng(1)
    for _ in range(200):
        text = random_text(rng)
        codes = encode(spec, text, rng)
        assert len(codes) == spec.frames_per_char * len(normalize(text))


def test_encode_rejects_unknown_character():
    spec = CodecSpec()
    rng = np.random.default_rng(0)
    with pytest.raises(UnencodableInputError) as err:
        encode(spec, "café", rng)
    assert "é" in str(err.value)


def test_decode_trivial_cases():
    spec = CodecSpec(charset="abcdefghijklmnopqrstuvwxyz",
                     variants_per_char=1, frames_per_char=2, speech_size=26)
    assert decode(spec, [0, 0, 1, 1]).text == "ab"
    assert decode(spec, []).text == ""
    assert decode(spec, []).truncated is False


def test_decode_flags_trailing_partial_run():
    spec = CodecSpec()
    rng = np.random.default_rng(2)
    codes = encode(spec, "abc", rng)
    result = decode(spec, codes[:-1])
    assert result.truncated is True
    assert result.text == "ab"


def test_decode_rejects_unmapped_code():
    spec = CodecSpec()
    with pytest.raises(UnmappableCodeError):
        decode(spec, [spec.used_codes])
    with pytest.raises(UnmappableCodeError):
        decode(spec, [-1])


def test_round_trip_fuzz():
    spec = CodecSpec()
    rng = np.random.default_rng(3)
    for _ in range(300):
        text = random_text(rng)
        codes = encode(spec, text, rng)
        result = decode(spec, codes)
        assert result.text == normalize(text)
        assert result.truncated is False


def test_round_trip_across_parameterizations():
    rng = np.random.default_rng(4)
    for r in (1, 2, 3):
        for d in (1, 2, 3):
            spec = CodecSpec(variants_per_char=r, frames_per_char=d,
                             speech_size=500)
            for _ in range(30):
                text = random_text(rng, max_len=20)
                assert decode(spec, encode(spec, text, rng)).text == normalize(text)


def test_single_frame_corruption_recovery_exhaustive():
    # With d=3 a single corrupted frame per run cannot win the majority
    # vote, so decode recovers the text exactly. Exhaustive over every
    # (position, replacement-code) pair for a 5-char string.
    spec = CodecSpec(variants_per_char=2, frames_per_char=3, speech_size=500)
    rng = np.random.default_rng(5)
    text = "ab c1"
    clean = encode(spec, text, rng)
    for pos in range(len(clean)):
        for bad in range(spec.used_codes):
            if bad == clean[pos]:
                continue
            corrupted = list(clean)
            corrupted[pos] = bad
            assert decode(spec, corrupted).text == text, (pos, bad)


def test_majority_tie_breaks_to_smallest_code():
    # d=2 with two different characters in one run is a 1-1 tie; the
    # character with the smaller codes must win regardless of order.
    spec = CodecSpec(variants_per_char=2, frames_per_char=2, speech_size=500)
    b_variant = spec.variant("b", 0)  # code 2
    z_variant = spec.variant("z", 1)  # code 51
    assert decode(spec, [b_variant, z_variant]).text == "b"
    assert decode(spec, [z_variant, b_variant]).text == "b"


def test_variant_counts_pool_per_character():
    # Two different variants of 'b' plus one 'a' frame: code-level counts
    # are 1-1-1, but both 'b' frames agree on the character, so 'b' wins.
    spec = CodecSpec(variants_per_char=2, frames_per_char=3, speech_size=500)
    run = [spec.variant("b", 0), spec.variant("b", 1), spec.variant("a", 0)]
    assert decode(spec, run).text == "b"
    assert decode(spec, run[::-1]).text == "b"


def test_duration_seconds():
    spec = CodecSpec()
    assert duration_seconds(spec, [0] * 25) == 1.0
    assert duration_seconds(spec, []) == 0.0
    assert duration_seconds(spec, [0] * 10) == 0.4


def test_wps_examples():
    assert wps_validate(10, 4.0) is WpsCheck.PASS          # 2.5 wps
    assert wps_validate(20, 2.0) is WpsCheck.REJECT_TOO_FAST  # 10 wps
    assert wps_validate(3, 0.1) is WpsCheck.SKIPPED


def test_wps_boundaries_inclusive():
    # 1.5 and 5.5 words per second both pass; just outside rejects.
    assert wps_validate(6, 4.0) is WpsCheck.PASS       # exactly 1.5
    assert wps_validate(11, 2.0) is WpsCheck.PASS      # exactly 5.5
    assert wps_validate(149, 100.0) is WpsCheck.REJECT_TOO_SLOW  # 1.49
    assert wps_validate(551, 100.0) is WpsCheck.REJECT_TOO_FAST  # 5.51


def test_wps_skip_threshold():
    assert wps_validate(4, 1.0) is WpsCheck.SKIPPED
    assert wps_validate(5, 2.0) is WpsCheck.PASS  # 2.5 wps, exactly 5 words


def test_wps_invalid_measurement():
    with pytest.raises(InvalidMeasurementError):
        wps_validate(5, 0.0)
    with pytest.raises(InvalidMeasurementError):
        wps_validate(10, -1.0)
