"""Word-level text tokenizer with a fixed vocabulary.

Ids double as the text region of the unified vocabulary, so the layout is
deterministic and serializable: id 0 is the unknown-word token, id 1 is the
literal "\\n\\n" separator used to split thinking from reply inside a single
text block, and the remaining ids are the known words in sorted order.
"""

from __future__ import annotations

from collections.abc import Iterable

UNK_WORD = "<unk>"
SEP_WORD = "\n\n"
RESERVED = (UNK_WORD, SEP_WORD)


class WordTokenizer:
    """Maps whitespace-separated words to contiguous ids starting at 0."""

    def __init__(self, words: Iterable[str]):
        vocab = sorted(set(words))
        for word in vocab:
            if word in RESERVED:
                raise ValueError(f"{word!r} is reserved")
            if not word or word.split() != [word]:
                raise ValueError(f"invalid vocabulary word {word!r}")
        self._words: tuple[str, ...] = RESERVED + tuple(vocab)
        self._ids = {word: i for i, word in enumerate(self._words)}

    @classmethod
    def from_texts(cls, texts: Iterable[str]) -> "WordTokenizer":
        """Build a vocabulary from every word occurring in ``texts``."""
        seen: set[str] = set()
        for text in texts:
            seen.update(text.lower().split())
        return cls(seen)

    @property
    def size(self) -> int:
        return len(self._words)

    @property
    def unk_id(self) -> int:
        return 0

    @property
    def sep_id(self) -> int:
        return 1

    @property
    def words(self) -> tuple[str, ...]:
        """All words in id order, including the two reserved entries."""
        return self._words

    def __len__(self) -> int:
        return len(self._words)

    def __contains__(self, word: str) -> bool:
        return word in self._ids

    def encode(self, text: str) -> list[int]:
        """Ids for the whitespace-split words of lowercased ``text``."""
        return [self._ids.get(word, 0) for word in text.lower().split()]

    def decode(self, ids: Iterable[int]) -> str:
        """Space-joined words for ``ids``."""
        return " ".join(self.word(i) for i in ids)

    def word(self, token_id: int) -> str:
        if not 0 <= token_id < len(self._words):
            raise ValueError(
                f"text id {token_id} outside [0, {len(self._words)})"
            )
        return self._words[token_id]
