"""Tests for scoring and diagnostics, with brute-force oracles."""

import itertools
from functools import lru_cache

import numpy as np
import pytest

from sdlm import evalkit, toycodec
from sdlm.evalkit import (
    EvalReport,
    ProbeResult,
    UndefinedRateError,
    asr_eval,
    edit_distance,
    masking_probe,
    metrics_lines,
    normalize_answer,
    number_to_words,
    qa_accuracy,
    qa_eval,
    tts_eval,
    wer,
)
from sdlm.records import DatasetRecord
from sdlm.sampler import Response
from sdlm.sequence import MalformedGenerationError, TaskKind, build
from sdlm.tokenizer import WordTokenizer
from sdlm.toycodec import CodecSpec, WpsCheck
from sdlm.vocab import build_vocab

LEXICON = ["red", "blue", "green", "cat", "dog", "bird", "runs", "sits",
           "sees", "small", "big", "old"]


@pytest.fixture(scope="module")
def kit():
    tok = WordTokenizer(LEXICON)
    codec = CodecSpec(speech_size=74)
    vocab = build_vocab(tok.size, codec.speech_size)
    return tok, vocab, codec


@lru_cache(maxsize=None)
def brute_distance(ref: tuple, hyp: tuple) -> int:
    if not ref:
        return len(hyp)
    if not hyp:
        return len(ref)
    return min(
        brute_distance(ref[1:], hyp[1:]) + (ref[0] != hyp[0]),
        brute_distance(ref[1:], hyp) + 1,
        brute_distance(ref, hyp[1:]) + 1,
    )


def test_wer_examples():
    assert wer("a b c", "a b c") == 0.0
    assert wer("a b c", "a x c") == pytest.approx(1 / 3)
    assert wer("a b c", "a c") == pytest.approx(1 / 3)
    assert wer("a b c", "a b x c") == pytest.approx(1 / 3)
    assert wer("a", "x y z") == 3.0
    assert wer("a b", "") == 1.0


def test_wer_accepts_word_lists():
    assert wer(["a", "b"], ["a", "b"]) == 0.0
    assert wer(["a", "b"], "a b") == 0.0


def test_wer_empty_reference():
    assert wer("", "") == 0.0
    assert wer([], []) == 0.0
    with pytest.raises(UndefinedRateError):
        wer("", "a")


def test_edit_distance_matches_brute_force_exhaustively():
    words = ("a", "b", "c")
    seqs = [
        seq
        for length in range(5)
        for seq in itertools.product(words, repeat=length)
    ]
    for ref in seqs:
        for hyp in seqs:
            assert edit_distance(ref, hyp) == brute_distance(ref, hyp), (
                ref, hyp,
            )


def test_edit_distance_fuzz_longer_sequences():
    rng = np.random.default_rng(11)
    words = ["a", "b", "c", "d"]
    for _ in range(200):
        ref = tuple(rng.choice(words, size=rng.integers(0, 8)))
        hyp = tuple(rng.choice(words, size=rng.integers(0, 8)))
        assert edit_distance(ref, hyp) == brute_distance(ref, hyp)


def test_number_to_words_table():
    cases = {
        0: "zero",
        5: "five",
        10: "ten",
        13: "thirteen",
        20: "twenty",
        21: "twenty-one",
        40: "forty",
        99: "ninety-nine",
        100: "one hundred",
        105: "one hundred five",
        342: "three hundred forty-two",
        999: "nine hundred ninety-nine",
    }
    for n, words in cases.items():
        assert number_to_words(n) == words


def test_number_to_words_range():
    with pytest.raises(ValueError):
        number_to_words(-1)
    with pytest.raises(ValueError):
        number_to_words(1000)


def test_number_words_round_trip():
    for n in range(1000):
        assert normalize_answer(number_to_words(n)) == str(n)


def test_normalize_answer():
    assert normalize_answer("Forty-two.") == "42"
    assert normalize_answer("the answer is twenty one") == "the answer is 21"
    assert normalize_answer("42") == "42"
    assert normalize_answer("seven hundred") == "700"
    assert normalize_answer("hundred") == "hundred"
    assert normalize_answer("  Big   DOG ") == "big dog"
    assert normalize_answer("twelve, then thirty four") == "12 then 34"


def test_qa_accuracy_scoring():
    report = qa_accuracy(
        ["forty two", "five", "ten"],
        ["42", "six", None],
    )
    assert report.n_items == 3
    assert report.n_correct == 1
    assert report.n_malformed == 1
    assert report.accuracy == pytest.approx(1 / 3)


def test_qa_accuracy_empty_and_mismatch():
    empty = qa_accuracy([], [])
    assert empty.empty
    assert empty.n_items == 0
    assert empty.accuracy == 0.0
    with pytest.raises(ValueError):
        qa_accuracy(["a"], [])


def _speech_response(codec, text, rng):
    clean = toycodec.normalize(text)
    codes = toycodec.encode(codec, clean, rng)
    return Response(
        think_text="",
        reply_text=clean,
        reply_modality="speech",
        reply_ids=tuple(codes),
        speech_truncated=False,
        trace=None,
    )


def test_tts_eval_identity_oracle_scores_zero(kit):
    tok, vocab, codec = kit
    texts = ["red cat runs", "big dog sees small bird", "old green bird sits"]

    def oracle(task, payload, n, T):
        assert task is TaskKind.TTS
        assert n == codec.frames_per_char * len(toycodec.normalize(payload)) + 1
        return _speech_response(codec, payload, np.random.default_rng(0))

    report = tts_eval(oracle, texts, tok, vocab, codec, T=8)
    assert report.wer == 0.0
    assert report.n_items == 3
    assert report.n_malformed == 0
    assert report.errors == 0
    assert report.item_wers == (0.0, 0.0, 0.0)
    assert sum(report.wps_counts.values()) == 3


def test_tts_eval_wps_counts(kit):
    tok, vocab, codec = kit
    # Five short words pass the rate check; three words skip it.
    passing = "red cat dog big old"
    short = "red cat dog"

    def oracle(task, payload, n, T):
        return _speech_response(codec, payload, np.random.default_rng(0))

    report = tts_eval(oracle, [passing, short], tok, vocab, codec, T=4)
    assert report.wps_counts[WpsCheck.PASS] == 1
    assert report.wps_counts[WpsCheck.SKIPPED] == 1


def test_tts_eval_malformed_counts_as_full_error(kit):
    tok, vocab, codec = kit
    texts = ["red cat runs", "big dog sits"]

    def oracle(task, payload, n, T):
        if payload.startswith("red"):
            raise MalformedGenerationError("no close", None)
        return _speech_response(codec, payload, np.random.default_rng(0))

    report = tts_eval(oracle, texts, tok, vocab, codec, T=4)
    assert report.n_malformed == 1
    assert report.item_wers[0] == 1.0
    assert report.item_wers[1] == 0.0
    # Length-weighted: 3 errors over 6 reference words.
    assert report.wer == pytest.approx(0.5)


def test_tts_eval_length_weighted_corpus_wer(kit):
    tok, vocab, codec = kit
    texts = ["red cat", "big dog sees small bird runs old"]

    def oracle(task, payload, n, T):
        words = toycodec.normalize(payload).split()
        words[0] = "blue"  # one substitution per item
        return _speech_response(codec, " ".join(words), np.random.default_rng(0))

    report = tts_eval(oracle, texts, tok, vocab, codec, T=4)
    assert report.errors == 2
    assert report.ref_words == 9
    assert report.wer == pytest.approx(2 / 9)
    assert report.item_wers == pytest.approx((1 / 2, 1 / 7))


def test_tts_eval_empty_dataset(kit):
    tok, vocab, codec = kit
    report = tts_eval(lambda *a: None, [], tok, vocab, codec, T=4)
    assert report.empty
    assert report.n_items == 0
    assert report.wer == 0.0


def test_tts_eval_steps_policy_sets_t_per_item(kit):
    tok, vocab, codec = kit
    seen = []

    def oracle(task, payload, n, T):
        seen.append((n, T))
        return _speech_response(codec, payload, np.random.default_rng(0))

    tts_eval(oracle, ["red cat", "big dog sees"], tok, vocab, codec,
             steps_policy=lambda n: max(1, n // 4))
    for n, T in seen:
        assert T == max(1, n // 4)


def test_asr_eval_decoding_oracle_scores_zero(kit):
    tok, vocab, codec = kit
    texts = ["red cat runs", "small bird sits"]

    def oracle(task, payload, n, T):
        assert task is TaskKind.ASR
        decoded = toycodec.decode(codec, list(payload))
        return Response(
            think_text="",
            reply_text=decoded.text,
            reply_modality="text",
            reply_ids=tuple(tok.encode(decoded.text)),
            speech_truncated=False,
            trace=None,
        )

    report = asr_eval(oracle, texts, tok, vocab, codec, T=4)
    assert report.wer == 0.0
    assert report.n_malformed == 0
    assert report.wps_counts is None


def test_asr_eval_gold_length_is_words_plus_close(kit):
    tok, vocab, codec = kit
    seen = []

    def oracle(task, payload, n, T):
        seen.append(n)
        decoded = toycodec.decode(codec, list(payload))
        return Response("", decoded.text, "text",
                        tuple(tok.encode(decoded.text)), False, None)

    asr_eval(oracle, ["red cat runs", "big dog"], tok, vocab, codec, T=2)
    assert seen == [4, 3]


def test_qa_eval_uses_reply_only(kit):
    tok, vocab, codec = kit
    records = [
        DatasetRecord(TaskKind.T2T, "red plus blue", "red blue red", "green"),
        DatasetRecord(TaskKind.T2T, "cat plus dog", "cat dog cat", "bird"),
    ]

    def oracle(task, payload, n, T):
        assert task is TaskKind.T2T
        # Wrong thinking, right answer: must still count as correct.
        answer = "green" if payload.startswith("red") else "dog"
        return Response("nonsense think", answer, "text",
                        tuple(tok.encode(answer)), False, None)

    report = qa_eval(oracle, records, tok, vocab, codec, T=4)
    assert report.n_items == 2
    assert report.n_correct == 1
    assert report.accuracy == 0.5


def test_qa_eval_gold_length_tracks_record_thinking(kit):
    tok, vocab, codec = kit
    with_think = DatasetRecord(TaskKind.T2T, "red", "cat dog bird", "green")
    without = DatasetRecord(TaskKind.T2T, "red", "", "green")
    seen = []

    def oracle(task, payload, n, T):
        seen.append(n)
        return Response("", "green", "text", tuple(tok.encode("green")),
                        False, None)

    qa_eval(oracle, [with_think, without], tok, vocab, codec, T=2)
    # think ids + separator + reply ids + closing delimiter
    assert seen == [3 + 1 + 1 + 1, 0 + 1 + 1 + 1]


def test_qa_eval_malformed_counts_wrong(kit):
    tok, vocab, codec = kit
    records = [DatasetRecord(TaskKind.T2T, "red", "", "green")]

    def oracle(task, payload, n, T):
        raise MalformedGenerationError("bad", None)

    report = qa_eval(oracle, records, tok, vocab, codec, T=2)
    assert report.n_correct == 0
    assert report.n_malformed == 1


def test_masking_probe_degenerate_levels(kit):
    tok, vocab, codec = kit
    sample = build(TaskKind.TTS, "red cat", "", "", tok, vocab, codec,
                   np.random.default_rng(0))
    at_zero = masking_probe(0.0, sample, trials=120, mask_id=vocab.mask_id)
    assert at_zero.mean_fraction == 0.0
    assert at_zero.ci_low == 0.0 and at_zero.ci_high == 0.0
    at_one = masking_probe(1.0, sample, trials=120, mask_id=vocab.mask_id)
    assert at_one.mean_fraction == 1.0
    assert at_one.ci_low == 1.0 and at_one.ci_high == 1.0


def test_masking_probe_interval_covers_schedule(kit):
    tok, vocab, codec = kit
    sample = build(TaskKind.TTS, "big dog sees", "", "", tok, vocab, codec,
                   np.random.default_rng(1))
    probe = masking_probe(0.5, sample, trials=400, mask_id=vocab.mask_id)
    expected = np.sin(np.pi / 4)
    assert probe.ci_low <= expected <= probe.ci_high
    assert probe.ci_high - probe.ci_low < 0.1
    assert probe.trials == 400
    assert probe.target_positions == len(sample.target_positions)


def test_masking_probe_is_deterministic(kit):
    tok, vocab, codec = kit
    sample = build(TaskKind.ASR, "red cat", "", "", tok, vocab, codec,
                   np.random.default_rng(2))
    a = masking_probe(0.3, sample, trials=150, mask_id=vocab.mask_id, seed=5)
    b = masking_probe(0.3, sample, trials=150, mask_id=vocab.mask_id, seed=5)
    assert a == b


def test_masking_probe_rejects_few_trials(kit):
    tok, vocab, codec = kit
    sample = build(TaskKind.ASR, "red cat", "", "", tok, vocab, codec,
                   np.random.default_rng(3))
    with pytest.raises(ValueError):
        masking_probe(0.5, sample, trials=99, mask_id=vocab.mask_id)


def test_metrics_lines_format():
    lines = metrics_lines([("wer", 0.125, 200), ("qa_accuracy", 0.5, 300)])
    assert lines == ["wer\t0.125000\t200", "qa_accuracy\t0.500000\t300"]
