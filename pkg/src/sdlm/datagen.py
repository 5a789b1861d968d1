"""Synthetic corpora: copy sentences for ASR/TTS and arithmetic-chain QA.

Everything is seed-deterministic: the same kind, size, and seed always
produce the same records. The combined lexicon is a package constant so
every run shares one tokenizer layout and checkpoints stay compatible
across stages.
"""

from __future__ import annotations

import itertools

import numpy as np

from .evalkit import number_to_words
from .records import DatasetRecord
from .sequence import TaskKind

# Every lexicon word is exactly four characters, and any two words differ
# in at least two character positions. Uniform word length keeps the
# speech-frame offset of the k-th word identical across sentences, which
# is what makes cross-modal alignment learnable for a million-parameter
# denoiser within the toy training budget; the pairwise character distance
# keeps every word pair at least four speech frames apart, so one blurred
# frame cannot turn one word into another.
LEXICON = (
    "able", "acid", "aged", "area", "army", "away", "baby", "back",
    "ball", "band", "base", "bath", "bear", "belt", "bird", "blue",
    "boat", "body", "bone", "book", "born", "bowl", "bush", "cake",
    "calm", "camp", "card", "cash", "cell", "chat", "chip", "city",
    "club", "coal", "code", "cold", "copy", "cost", "crew", "crop",
    "dark", "data", "dawn", "days", "dead", "debt", "deep", "deny",
    "desk", "dial",
)

QA_FIXED_WORDS = ("what", "is", "plus", "minus", "then")
_NUMBER_WORDS = tuple(sorted(
    {w for n in range(100) for w in number_to_words(n).split()}
))

# Operand ranges keep every intermediate and final value inside [0, 99]
# while leaving the full (a, op, b, c) space much larger than a training
# corpus, so held-out questions exercise composition, not recall.
QA_AB_MAX = 15
QA_C_MAX = 9


def full_lexicon() -> tuple[str, ...]:
    """Every word any generator can emit, in sorted order."""
    return tuple(sorted(set(LEXICON) | set(QA_FIXED_WORDS) | set(_NUMBER_WORDS)))


def toy_sentences(
    count: int,
    seed: int,
    min_words: int = 5,
    max_words: int = 5,
) -> list[str]:
    """Distinct random sentences over the 50-word lexicon.

    The default draws fixed five-word sentences: together with the uniform
    word length this pins every condition/target position pair, the regime
    where the toy copy tasks are reliably learnable at desk scale. Callers
    can widen the band for harder corpora.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    rng = np.random.default_rng(seed)
    seen: set[str] = set()
    out: list[str] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * (count + 10):
            raise RuntimeError("sentence space exhausted; lower count")
        n_words = int(rng.integers(min_words, max_words + 1))
        sentence = " ".join(
            LEXICON[int(i)] for i in rng.integers(0, len(LEXICON), size=n_words)
        )
        if sentence not in seen:
            seen.add(sentence)
            out.append(sentence)
    return out


def copy_records(sentences: list[str]) -> list[DatasetRecord]:
    """One ASR and one TTS record per sentence."""
    out = []
    for sentence in sentences:
        out.append(DatasetRecord(TaskKind.ASR, sentence, "", ""))
        out.append(DatasetRecord(TaskKind.TTS, sentence, "", ""))
    return out


def lm_records(sentences: list[str]) -> list[DatasetRecord]:
    """Text-only records: T2T with an empty user block."""
    return [DatasetRecord(TaskKind.T2T, "", "", s) for s in sentences]


def qa_triples() -> list[tuple[int, str, int, int]]:
    """All valid (a, op, b, c) chains, deterministically ordered."""
    triples = []
    for a, b, c in itertools.product(
        range(1, QA_AB_MAX + 1), range(1, QA_AB_MAX + 1), range(1, QA_C_MAX + 1)
    ):
        triples.append((a, "plus", b, c))
        if a + b - c >= 0:
            triples.append((a, "minus", b, c))
    return triples


def qa_question(a: int, op: str, b: int, c: int) -> str:
    return (
        f"what is {number_to_words(a)} plus {number_to_words(b)} "
        f"{op} {number_to_words(c)}"
    )


def qa_thinking(a: int, op: str, b: int, c: int) -> tuple[str, str]:
    """Step-by-step partial results and the final answer, all in words."""
    s1 = a + b
    s2 = s1 + c if op == "plus" else s1 - c
    think = (
        f"{number_to_words(a)} plus {number_to_words(b)} is "
        f"{number_to_words(s1)} then {number_to_words(s1)} {op} "
        f"{number_to_words(c)} is {number_to_words(s2)}"
    )
    return think, number_to_words(s2)


# Stage-two mixture weights are 0.3/0.3/0.2 for the three dialogue tasks,
# so records cycle through this 3:3:2 pattern.
_QA_TASK_CYCLE = (
    TaskKind.S2S, TaskKind.S2T, TaskKind.T2T,
    TaskKind.S2S, TaskKind.S2T, TaskKind.T2T,
    TaskKind.S2S, TaskKind.S2T,
)


def qa_records(
    count: int,
    seed: int,
    with_thinking: bool = True,
    exclude_questions: frozenset[str] | set[str] = frozenset(),
) -> list[DatasetRecord]:
    """Distinct arithmetic-chain QA records across the dialogue tasks.

    The same count and seed always select the same question chains and
    task assignment; ``with_thinking=False`` only blanks the think field.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    pool = qa_triples()
    order = np.random.default_rng(seed).permutation(len(pool))
    records = []
    for idx in order:
        if len(records) >= count:
            break
        a, op, b, c = pool[int(idx)]
        question = qa_question(a, op, b, c)
        if question in exclude_questions:
            continue
        think, answer = qa_thinking(a, op, b, c)
        task = _QA_TASK_CYCLE[len(records) % len(_QA_TASK_CYCLE)]
        records.append(DatasetRecord(
            task=task,
            user_text=question,
            think_text=think if with_thinking else "",
            reply_text=answer,
        ))
    if len(records) < count:
        raise ValueError(
            f"only {len(records)} distinct chains available after exclusions, "
            f"needed {count}"
        )
    return records
