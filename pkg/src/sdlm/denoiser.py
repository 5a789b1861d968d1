"""Bidirectional transformer denoiser with hand-derived gradients.

A small pre-normalization transformer over the unified vocabulary: token
plus learned positional embeddings, full (non-causal) multi-head
self-attention, GELU MLPs, a final LayerNorm, and a linear head back to
the vocabulary. The model never sees the noise level; the mask pattern in
its input carries that information.

Everything is plain NumPy. The backward pass is written out analytically
layer by layer, and verified against central differences in the tests, so
training has no autodiff dependency. Batches may be padded: a per-sequence
length excludes padded keys from attention, and the masked loss never
reads padded positions, so padding cannot influence any gradient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diffusion import MaskedBatch, MaskedLoss, masked_loss

LN_EPS = 1e-5
NEG_INF = -1e30
_GELU_C = math.sqrt(2.0 / math.pi)
_GELU_K = 0.044715


@dataclass(frozen=True)
class ModelConfig:
    """Architecture hyperparameters; shapes are fully determined by these."""

    vocab_total: int
    dim: int = 128
    layers: int = 4
    heads: int = 4
    max_len: int = 512
    mlp_ratio: int = 4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.vocab_total < 2:
            raise ValueError("vocab_total must be >= 2")
        if self.dim < 1 or self.heads < 1 or self.max_len < 1:
            raise ValueError("dim, heads, and max_len must be positive")
        if self.layers < 0:
            raise ValueError("layers must be >= 0")
        if self.mlp_ratio < 1:
            raise ValueError("mlp_ratio must be >= 1")
        if self.dim % self.heads != 0:
            raise ValueError(
                f"dim ({self.dim}) must be divisible by heads ({self.heads})"
            )

    @property
    def head_dim(self) -> int:
        return self.dim // self.heads


@dataclass
class DenoiserParams:
    """Named parameter tensors in their fixed declaration order."""

    config: ModelConfig
    tensors: dict[str, np.ndarray]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    @property
    def n_params(self) -> int:
        return sum(t.size for t in self.tensors.values())

    @property
    def dtype(self) -> np.dtype:
        return next(iter(self.tensors.values())).dtype

    def astype(self, dtype) -> "DenoiserParams":
        return DenoiserParams(
            config=self.config,
            tensors={k: v.astype(dtype) for k, v in self.tensors.items()},
        )

    def copy(self) -> "DenoiserParams":
        return DenoiserParams(
            config=self.config,
            tensors={k: v.copy() for k, v in self.tensors.items()},
        )


def tensor_shapes(config: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Parameter names and shapes in declaration (serialization) order."""
    d, v = config.dim, config.vocab_total
    hidden = config.mlp_ratio * d
    shapes: dict[str, tuple[int, ...]] = {
        "tok_emb": (v, d),
        "pos_emb": (config.max_len, d),
    }
    for i in range(config.layers):
        p = f"layer{i}."
        shapes[p + "ln1.g"] = (d,)
        shapes[p + "ln1.b"] = (d,)
        shapes[p + "attn.wq"] = (d, d)
        shapes[p + "attn.bq"] = (d,)
        shapes[p + "attn.wk"] = (d, d)
        shapes[p + "attn.bk"] = (d,)
        shapes[p + "attn.wv"] = (d, d)
        shapes[p + "attn.bv"] = (d,)
        shapes[p + "attn.wo"] = (d, d)
        shapes[p + "attn.bo"] = (d,)
        shapes[p + "ln2.g"] = (d,)
        shapes[p + "ln2.b"] = (d,)
        shapes[p + "mlp.w1"] = (d, hidden)
        shapes[p + "mlp.b1"] = (hidden,)
        shapes[p + "mlp.w2"] = (hidden, d)
        shapes[p + "mlp.b2"] = (d,)
    shapes["ln_f.g"] = (d,)
    shapes["ln_f.b"] = (d,)
    shapes["out.w"] = (d, v)
    shapes["out.b"] = (v,)
    return shapes


def init(config: ModelConfig, dtype=np.float32) -> DenoiserParams:
    """Seeded initialization: weights N(0, 0.02), norm scales 1, biases 0."""
    rng = np.random.default_rng(config.seed)
    tensors: dict[str, np.ndarray] = {}
    for name, shape in tensor_shapes(config).items():
        leaf = name.rsplit(".", 1)[-1]
        if leaf in ("g",):
            arr = np.ones(shape)
        elif leaf in ("b", "bq", "bk", "bv", "bo", "b1", "b2") or name == "out.b":
            arr = np.zeros(shape)
        else:
            arr = rng.normal(0.0, 0.02, size=shape)
        tensors[name] = arr.astype(dtype)
    return DenoiserParams(config=config, tensors=tensors)


def _gelu(x: np.ndarray) -> np.ndarray:
    u = _GELU_C * (x + _GELU_K * x * x * x)
    return 0.5 * x * (1.0 + np.tanh(u))


def _gelu_grad(x: np.ndarray) -> np.ndarray:
    u = _GELU_C * (x + _GELU_K * x * x * x)
    t = np.tanh(u)
    du = _GELU_C * (1.0 + 3.0 * _GELU_K * x * x)
    return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du


def _ln_forward(x: np.ndarray, g: np.ndarray, b: np.ndarray):
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = (x - mu) * inv
    return g * xhat + b, (xhat, inv)


def _ln_backward(dy, cache, g):
    xhat, inv = cache
    dg = (dy * xhat).sum(axis=(0, 1))
    db = dy.sum(axis=(0, 1))
    dxhat = dy * g
    dx = inv * (
        dxhat
        - dxhat.mean(axis=-1, keepdims=True)
        - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
    )
    return dx, dg, db


def _split_heads(x: np.ndarray, heads: int) -> np.ndarray:
    b, l, d = x.shape
    return x.reshape(b, l, heads, d // heads).transpose(0, 2, 1, 3)


def _merge_heads(x: np.ndarray) -> np.ndarray:
    b, h, l, hd = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, l, h * hd)


def _check_tokens(config: ModelConfig, x: np.ndarray) -> None:
    if x.shape[1] > config.max_len:
        raise ValueError(
            f"sequence length {x.shape[1]} exceeds max_len {config.max_len}"
        )
    if x.size and (x.min() < 0 or x.max() >= config.vocab_total):
        raise ValueError(
            f"token ids must lie in [0, {config.vocab_total}), "
            f"got range [{x.min()}, {x.max()}]"
        )


def _forward_cached(params: DenoiserParams, x: np.ndarray,
                    lengths: np.ndarray | None):
    """Run the model on int tokens [B, L]; return (logits, cache)."""
    cfg = params.config
    _check_tokens(cfg, x)
    p = params.tensors
    batch, seq = x.shape
    dtype = params.dtype

    key_bias = None
    if lengths is not None:
        valid = np.arange(seq)[None, :] < np.asarray(lengths)[:, None]
        if not valid.all():
            key_bias = np.where(valid, 0.0, NEG_INF).astype(dtype)
            key_bias = key_bias[:, None, None, :]  # [B, 1, 1, L]

    h = p["tok_emb"][x] + p["pos_emb"][:seq][None, :, :]
    cache: dict = {"x": x, "h0": h, "layers": [], "key_bias": key_bias}

    scale = 1.0 / math.sqrt(cfg.head_dim)
    for i in range(cfg.layers):
        pre = f"layer{i}."
        lc: dict = {"h_in": h}
        a, lc["ln1"] = _ln_forward(h, p[pre + "ln1.g"], p[pre + "ln1.b"])
        lc["a"] = a
        q = _split_heads(a @ p[pre + "attn.wq"] + p[pre + "attn.bq"], cfg.heads)
        k = _split_heads(a @ p[pre + "attn.wk"] + p[pre + "attn.bk"], cfg.heads)
        v = _split_heads(a @ p[pre + "attn.wv"] + p[pre + "attn.bv"], cfg.heads)
        scores = (q @ k.transpose(0, 1, 3, 2)) * scale
        if key_bias is not None:
            scores = scores + key_bias
        scores -= scores.max(axis=-1, keepdims=True)
        e = np.exp(scores)
        probs = e / e.sum(axis=-1, keepdims=True)
        ctx = _merge_heads(probs @ v)
        attn_out = ctx @ p[pre + "attn.wo"] + p[pre + "attn.bo"]
        lc.update(q=q, k=k, v=v, probs=probs, ctx=ctx)
        h = h + attn_out

        lc["m_in"] = h
        m, lc["ln2"] = _ln_forward(h, p[pre + "ln2.g"], p[pre + "ln2.b"])
        lc["m"] = m
        z1 = m @ p[pre + "mlp.w1"] + p[pre + "mlp.b1"]
        act = _gelu(z1)
        lc.update(z1=z1, act=act)
        h = h + act @ p[pre + "mlp.w2"] + p[pre + "mlp.b2"]
        cache["layers"].append(lc)

    cache["hf_in"] = h
    hf, cache["ln_f"] = _ln_forward(h, p["ln_f.g"], p["ln_f.b"])
    cache["hf"] = hf
    logits = hf @ p["out.w"] + p["out.b"]
    return logits, cache


def forward(
    params: DenoiserParams,
    tokens: np.ndarray | list[int],
    lengths: np.ndarray | None = None,
) -> np.ndarray:
    """Per-position logits over the vocabulary; [L] in gives [L, V] out."""
    x = np.asarray(tokens, dtype=np.int64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    logits, _ = _forward_cached(params, x, lengths)
    return logits[0] if single else logits


def _backward(params: DenoiserParams, cache: dict,
              dlogits: np.ndarray) -> dict[str, np.ndarray]:
    cfg = params.config
    p = params.tensors
    grads = {name: np.zeros_like(arr) for name, arr in params.tensors.items()}
    x = cache["x"]
    batch, seq = x.shape
    d = cfg.dim

    hf = cache["hf"]
    grads["out.w"] += hf.reshape(-1, d).T @ dlogits.reshape(-1, cfg.vocab_total)
    grads["out.b"] += dlogits.sum(axis=(0, 1))
    dhf = dlogits @ p["out.w"].T
    dh, dg, db = _ln_backward(dhf, cache["ln_f"], p["ln_f.g"])
    grads["ln_f.g"] += dg
    grads["ln_f.b"] += db

    scale = 1.0 / math.sqrt(cfg.head_dim)
    for i in reversed(range(cfg.layers)):
        pre = f"layer{i}."
        lc = cache["layers"][i]

        # MLP branch: h_out = m_in + gelu(ln2(m_in) @ w1 + b1) @ w2 + b2
        dz2 = dh
        grads[pre + "mlp.w2"] += (
            lc["act"].reshape(-1, lc["act"].shape[-1]).T
            @ dz2.reshape(-1, d)
        )
        grads[pre + "mlp.b2"] += dz2.sum(axis=(0, 1))
        dact = dz2 @ p[pre + "mlp.w2"].T
        dz1 = dact * _gelu_grad(lc["z1"])
        grads[pre + "mlp.w1"] += (
            lc["m"].reshape(-1, d).T @ dz1.reshape(-1, dz1.shape[-1])
        )
        grads[pre + "mlp.b1"] += dz1.sum(axis=(0, 1))
        dm = dz1 @ p[pre + "mlp.w1"].T
        dln2, dg, db = _ln_backward(dm, lc["ln2"], p[pre + "ln2.g"])
        grads[pre + "ln2.g"] += dg
        grads[pre + "ln2.b"] += db
        dh = dh + dln2  # residual join at m_in

        # Attention branch: m_in = h_in + attn(ln1(h_in))
        d_attn = dh
        ctx = lc["ctx"]
        grads[pre + "attn.wo"] += ctx.reshape(-1, d).T @ d_attn.reshape(-1, d)
        grads[pre + "attn.bo"] += d_attn.sum(axis=(0, 1))
        dctx = _split_heads(d_attn @ p[pre + "attn.wo"].T, cfg.heads)
        probs, q, k, v = lc["probs"], lc["q"], lc["k"], lc["v"]
        dprobs = dctx @ v.transpose(0, 1, 3, 2)
        dv = probs.transpose(0, 1, 3, 2) @ dctx
        dscores = probs * (dprobs - (dprobs * probs).sum(axis=-1, keepdims=True))
        dq = (dscores @ k) * scale
        dk = (dscores.transpose(0, 1, 3, 2) @ q) * scale
        dq_m, dk_m, dv_m = (_merge_heads(t) for t in (dq, dk, dv))
        a = lc["a"]
        a_flat = a.reshape(-1, d)
        for w_name, b_name, grad_m in (
            ("attn.wq", "attn.bq", dq_m),
            ("attn.wk", "attn.bk", dk_m),
            ("attn.wv", "attn.bv", dv_m),
        ):
            grads[pre + w_name] += a_flat.T @ grad_m.reshape(-1, d)
            grads[pre + b_name] += grad_m.sum(axis=(0, 1))
        da = (
            dq_m @ p[pre + "attn.wq"].T
            + dk_m @ p[pre + "attn.wk"].T
            + dv_m @ p[pre + "attn.wv"].T
        )
        dln1, dg, db = _ln_backward(da, lc["ln1"], p[pre + "ln1.g"])
        grads[pre + "ln1.g"] += dg
        grads[pre + "ln1.b"] += db
        dh = dh + dln1  # residual join at h_in

    grads["pos_emb"][:seq] += dh.sum(axis=0)
    np.add.at(grads["tok_emb"], x, dh)
    return grads


def loss_and_grad(
    params: DenoiserParams, batch: MaskedBatch
) -> tuple[MaskedLoss, dict[str, np.ndarray]]:
    """Masked cross-entropy on the batch and its gradient for every tensor."""
    logits, cache = _forward_cached(params, batch.xt, batch.lengths)
    loss = masked_loss(logits, batch)
    if loss.empty:
        return loss, {k: np.zeros_like(v) for k, v in params.tensors.items()}

    flags = batch.mask_flags
    count = loss.masked_count
    rows = logits[flags]
    rows = rows - rows.max(axis=1, keepdims=True)
    e = np.exp(rows)
    soft = e / e.sum(axis=1, keepdims=True)
    soft[np.arange(count), batch.x0[flags]] -= 1.0
    dlogits = np.zeros_like(logits)
    dlogits[flags] = soft / count
    return loss, _backward(params, cache, dlogits)


@dataclass
class AdamState:
    """First/second moment estimates and the shared step counter."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    step: int = 0


def init_adam(params: DenoiserParams) -> AdamState:
    return AdamState(
        m={k: np.zeros_like(t) for k, t in params.tensors.items()},
        v={k: np.zeros_like(t) for k, t in params.tensors.items()},
        step=0,
    )


def apply_update(
    params: DenoiserParams,
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float,
    weight_decay: float = 0.01,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """One AdamW step with decoupled weight decay; mutates params and state."""
    state.step += 1
    t = state.step
    bc1 = 1.0 - beta1 ** t
    bc2 = 1.0 - beta2 ** t
    for name, tensor in params.tensors.items():
        grad = grads[name]
        if grad.shape != tensor.shape:
            raise ValueError(
                f"gradient shape {grad.shape} does not match "
                f"{name} shape {tensor.shape}"
            )
        m = state.m[name]
        v = state.v[name]
        m *= beta1
        m += (1.0 - beta1) * grad
        v *= beta2
        v += (1.0 - beta2) * grad * grad
        update = (m / bc1) / (np.sqrt(v / bc2) + eps)
        if weight_decay:
            update = update + weight_decay * tensor
        tensor -= lr * update
