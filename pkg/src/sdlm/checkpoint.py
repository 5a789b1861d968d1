"""Binary checkpoint format (magic ``MDSC``).

Layout, all integers little endian:

- 4 magic bytes ``MDSC``
- u32 format version
- u64 byte length of the UTF-8 config block, then the block itself
  (``key = value`` lines describing model, codec, tokenizer, optimizer
  flag, and any run metadata)
- each parameter tensor in declaration order: u64 element count followed
  by the elements as float32
- when the optimizer flag is set: Adam first moments in the same order,
  then second moments
- u64 checksum: the sum of every preceding byte, modulo 2**64

A checkpoint is self-contained: loading reconstructs the tokenizer,
codec, vocabulary, parameters, and optimizer state without outside help.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import format_config, get_bool, get_int, get_str, parse_config
from .denoiser import AdamState, DenoiserParams, ModelConfig, tensor_shapes
from .records import escape_field, unescape_field
from .tokenizer import WordTokenizer
from .toycodec import CodecSpec
from .vocab import VocabSpec, build_vocab

MAGIC = b"MDSC"
VERSION = 1

_RESERVED_PREFIXES = ("model.", "codec.", "tokenizer.", "optimizer.")


class CheckpointFormatError(ValueError):
    """Raised for an unreadable or inconsistent checkpoint file."""


@dataclass
class Checkpoint:
    """Everything needed to resume training or serve requests."""

    params: DenoiserParams
    opt_state: AdamState | None
    tokenizer: WordTokenizer
    codec: CodecSpec
    vocab: VocabSpec
    meta: dict[str, str]

    @property
    def extra(self) -> dict[str, str]:
        """Run metadata stored alongside the reserved sections."""
        return {
            k: v
            for k, v in self.meta.items()
            if not k.startswith(_RESERVED_PREFIXES)
        }


def _config_block(
    config: ModelConfig,
    tok: WordTokenizer,
    codec: CodecSpec,
    opt_state: AdamState | None,
    extra: dict[str, str] | None,
) -> str:
    if codec.charset != codec.charset.strip():
        raise CheckpointFormatError(
            "charsets with leading or trailing whitespace cannot be stored"
        )
    entries: dict[str, str] = {
        "model.vocab_total": str(config.vocab_total),
        "model.dim": str(config.dim),
        "model.layers": str(config.layers),
        "model.heads": str(config.heads),
        "model.max_len": str(config.max_len),
        "model.mlp_ratio": str(config.mlp_ratio),
        "model.seed": str(config.seed),
        "codec.charset": escape_field(codec.charset),
        "codec.variants_per_char": str(codec.variants_per_char),
        "codec.frames_per_char": str(codec.frames_per_char),
        "codec.speech_size": str(codec.speech_size),
        "codec.frame_rate": str(codec.frame_rate),
        "tokenizer.words": "\t".join(escape_field(w) for w in tok.words[2:]),
        "optimizer.included": "true" if opt_state is not None else "false",
    }
    if opt_state is not None:
        entries["optimizer.step"] = str(opt_state.step)
    for key, value in (extra or {}).items():
        if key.startswith(_RESERVED_PREFIXES):
            raise CheckpointFormatError(f"extra key {key!r} uses a reserved prefix")
        entries[key] = value
    return format_config(entries)


def _array_bytes(arr: np.ndarray) -> bytes:
    data = np.ascontiguousarray(arr, dtype="<f4")
    return struct.pack("<Q", data.size) + data.tobytes()


def save_checkpoint(
    path: str | Path,
    params: DenoiserParams,
    tok: WordTokenizer,
    codec: CodecSpec,
    opt_state: AdamState | None = None,
    extra: dict[str, str] | None = None,
) -> None:
    """Serialize parameters (and optionally optimizer state) to ``path``."""
    shapes = tensor_shapes(params.config)
    block = _config_block(params.config, tok, codec, opt_state, extra)
    encoded = block.encode("utf-8")
    buf = bytearray()
    buf += MAGIC
    buf += struct.pack("<I", VERSION)
    buf += struct.pack("<Q", len(encoded))
    buf += encoded
    for name in shapes:
        buf += _array_bytes(params.tensors[name])
    if opt_state is not None:
        for name in shapes:
            buf += _array_bytes(opt_state.m[name])
        for name in shapes:
            buf += _array_bytes(opt_state.v[name])
    buf += struct.pack("<Q", _checksum(buf))
    Path(path).write_bytes(bytes(buf))


def _checksum(data: bytes | bytearray | memoryview) -> int:
    total = int(np.frombuffer(data, dtype=np.uint8).sum(dtype=np.uint64))
    return total % (1 << 64)


class _Reader:
    def __init__(self, data: bytes, path: str):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise CheckpointFormatError(
                f"{self.path}: truncated (needed {count} bytes at "
                f"offset {self.pos})"
            )
        chunk = self.data[self.pos:self.pos + count]
        self.pos += count
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def array(self, name: str, shape: tuple[int, ...]) -> np.ndarray:
        count = self.u64()
        expected = int(np.prod(shape, dtype=np.int64)) if shape else 1
        if count != expected:
            raise CheckpointFormatError(
                f"{self.path}: tensor {name!r} has {count} elements, "
                f"expected {expected}"
            )
        raw = self.take(4 * count)
        return np.frombuffer(raw, dtype="<f4").reshape(shape).copy()


def load_checkpoint(path: str | Path) -> Checkpoint:
    """Read and verify a checkpoint; rebuild all components."""
    path = Path(path)
    data = path.read_bytes()
    if len(data) < len(MAGIC) + 4 + 8 + 8:
        raise CheckpointFormatError(f"{path}: too short to be a checkpoint")
    body, tail = data[:-8], data[-8:]
    declared = struct.unpack("<Q", tail)[0]
    actual = _checksum(body)
    if declared != actual:
        raise CheckpointFormatError(
            f"{path}: checksum mismatch (stored {declared}, computed {actual})"
        )
    reader = _Reader(body, str(path))
    if reader.take(4) != MAGIC:
        raise CheckpointFormatError(f"{path}: bad magic")
    version = reader.u32()
    if version != VERSION:
        raise CheckpointFormatError(
            f"{path}: unsupported version {version} (expected {VERSION})"
        )
    block_len = reader.u64()
    meta = parse_config(reader.take(block_len).decode("utf-8"))

    model_config = ModelConfig(
        vocab_total=get_int(meta, "model.vocab_total"),
        dim=get_int(meta, "model.dim"),
        layers=get_int(meta, "model.layers"),
        heads=get_int(meta, "model.heads"),
        max_len=get_int(meta, "model.max_len"),
        mlp_ratio=get_int(meta, "model.mlp_ratio"),
        seed=get_int(meta, "model.seed"),
    )
    codec = CodecSpec(
        charset=unescape_field(get_str(meta, "codec.charset")),
        variants_per_char=get_int(meta, "codec.variants_per_char"),
        frames_per_char=get_int(meta, "codec.frames_per_char"),
        speech_size=get_int(meta, "codec.speech_size"),
        frame_rate=get_int(meta, "codec.frame_rate"),
    )
    words_field = get_str(meta, "tokenizer.words")
    words = [unescape_field(w) for w in words_field.split("\t")] if words_field else []
    tok = WordTokenizer(words)
    vocab = build_vocab(tok.size, codec.speech_size)
    if vocab.total != model_config.vocab_total:
        raise CheckpointFormatError(
            f"{path}: vocabulary total {vocab.total} does not match "
            f"model.vocab_total {model_config.vocab_total}"
        )

    shapes = tensor_shapes(model_config)
    tensors = {name: reader.array(name, shape) for name, shape in shapes.items()}
    params = DenoiserParams(config=model_config, tensors=tensors)

    opt_state = None
    if get_bool(meta, "optimizer.included"):
        m = {name: reader.array(name, shape) for name, shape in shapes.items()}
        v = {name: reader.array(name, shape) for name, shape in shapes.items()}
        opt_state = AdamState(m=m, v=v, step=get_int(meta, "optimizer.step"))

    if reader.pos != len(body):
        raise CheckpointFormatError(
            f"{path}: {len(body) - reader.pos} unexpected trailing bytes"
        )
    return Checkpoint(
        params=params,
        opt_state=opt_state,
        tokenizer=tok,
        codec=codec,
        vocab=vocab,
        meta=meta,
    )
