"""Shared fixtures: the two training runs that back the end-to-end criteria.

The stage-1 run (copy corpus) feeds the speech-alignment, steps-sweep, and
temperature criteria; the paired stage-2 runs (thinking-qa corpus with and
without thinking text) feed the ablation criterion. Both honor the budgets
stated in the acceptance tests; the step counts here are calibrated so a
single desktop core finishes well inside them.
"""

import time
from dataclasses import dataclass

import pytest

from sdlm.datagen import (copy_records, full_lexicon, lm_records, qa_records,
                          toy_sentences)
from sdlm.denoiser import DenoiserParams, ModelConfig, init, init_adam
from sdlm.records import DatasetRecord, by_task
from sdlm.tokenizer import WordTokenizer
from sdlm.toycodec import CodecSpec
from sdlm.trainer import run_stage, stage1_config, stage2_config
from sdlm.vocab import VocabSpec, build_vocab

STAGE1_STEPS = 12000
STAGE1_LR = 1e-3
STAGE1_WARMUP = 300
STAGE2_STEPS = 3000
STAGE2_LR = 1e-3
STAGE2_WARMUP = 100
TRAIN_SENTENCES = 2000
HELDOUT_SENTENCES = 200
QA_TRAIN = 2000
QA_TEST = 200


@dataclass
class ToolkitBundle:
    tok: WordTokenizer
    vocab: VocabSpec
    codec: CodecSpec


@dataclass
class Stage1Run:
    params: DenoiserParams
    kit: ToolkitBundle
    train_sentences: list[str]
    heldout_sentences: list[str]
    seconds: float


@dataclass
class AblationRun:
    with_thinking: DenoiserParams
    without_thinking: DenoiserParams
    test_with: list[DatasetRecord]
    test_without: list[DatasetRecord]
    seconds: float


@pytest.fixture(scope="session")
def kit() -> ToolkitBundle:
    tok = WordTokenizer(full_lexicon())
    codec = CodecSpec()
    vocab = build_vocab(tok.size, codec.speech_size)
    return ToolkitBundle(tok, vocab, codec)


@pytest.fixture(scope="session")
def stage1_run(kit: ToolkitBundle) -> Stage1Run:
    sentences = toy_sentences(TRAIN_SENTENCES + HELDOUT_SENTENCES, seed=42)
    train = sentences[:TRAIN_SENTENCES]
    heldout = sentences[TRAIN_SENTENCES:]
    records = copy_records(train) + lm_records(train)
    datasets = by_task(records)
    params = init(ModelConfig(kit.vocab.total, dim=128, layers=4, heads=4,
                              max_len=160, seed=0))
    opt = init_adam(params)
    stage = stage1_config(steps=STAGE1_STEPS, lr=STAGE1_LR,
                          warmup_steps=STAGE1_WARMUP, seed=0)
    start = time.time()
    run_stage(params, opt, stage, datasets, kit.tok, kit.vocab, kit.codec)
    seconds = time.time() - start
    return Stage1Run(params, kit, train, heldout, seconds)


def _train_stage2(init_params: DenoiserParams, records, kit: ToolkitBundle,
                  seed: int) -> DenoiserParams:
    params = init_params.copy()
    opt = init_adam(params)
    sentences = toy_sentences(400, seed=43)
    datasets = by_task(records + copy_records(sentences))
    stage = stage2_config(steps=STAGE2_STEPS, lr=STAGE2_LR,
                          warmup_steps=STAGE2_WARMUP, seed=seed)
    run_stage(params, opt, stage, datasets, kit.tok, kit.vocab, kit.codec)
    return params


@pytest.fixture(scope="session")
def ablation_run(stage1_run: Stage1Run) -> AblationRun:
    kit = stage1_run.kit
    train_with = qa_records(QA_TRAIN, seed=7, with_thinking=True)
    train_without = qa_records(QA_TRAIN, seed=7, with_thinking=False)
    seen = frozenset(r.user_text for r in train_with)
    test_with = qa_records(QA_TEST, seed=8, with_thinking=True,
                           exclude_questions=seen)
    test_without = [DatasetRecord(r.task, r.user_text, "", r.reply_text)
                    for r in test_with]
    start = time.time()
    with_model = _train_stage2(stage1_run.params, train_with, kit, seed=1)
    without_model = _train_stage2(stage1_run.params, train_without, kit,
                                  seed=1)
    seconds = time.time() - start
    return AblationRun(with_model, without_model, test_with, test_without,
                       seconds)
