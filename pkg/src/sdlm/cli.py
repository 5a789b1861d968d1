"""Command-line surface: data generation, training, generation, eval, probes.

Subcommands: gen-data, train, generate, eval, probe. Runs that write files
also write a manifest (config snapshot, seeds, version) next to them; runs
that print to stdout emit the same manifest as leading comment lines, so a
redirected report is self-describing either way.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, datagen
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .config import (
    format_config,
    get_float,
    get_int,
    get_str,
    read_config,
    write_config,
)
from .denoiser import DenoiserParams, ModelConfig, init, init_adam
from .evalkit import asr_eval, masking_probe, qa_eval, tts_eval
from .records import by_task, read_records, write_records
from .sampler import respond, trace_lines, unmask_target
from .sequence import MalformedGenerationError, TaskKind, build
from .tokenizer import WordTokenizer
from .toycodec import CodecSpec, normalize
from .trainer import StageConfig, metrics_log_lines, run_stage
from .vocab import build_vocab


class CliError(ValueError):
    """User-facing failure with a clean message and exit code 1."""


def _manifest_entries(command: str, args_pairs: dict[str, str]) -> dict[str, str]:
    entries = {"manifest.command": command, "manifest.version": __version__}
    entries.update(args_pairs)
    return entries


def _write_manifest(path: Path, entries: dict[str, str]) -> None:
    write_config(path, entries)


def _manifest_comment_lines(entries: dict[str, str]) -> list[str]:
    return [f"# {line}" for line in format_config(entries).splitlines()]


def default_codec() -> CodecSpec:
    return CodecSpec()


def default_toolkit(codec: CodecSpec | None = None):
    """The package-standard tokenizer/vocab/codec trio."""
    codec = codec or default_codec()
    tok = WordTokenizer(datagen.full_lexicon())
    vocab = build_vocab(tok.size, codec.speech_size)
    return tok, vocab, codec


# ---------------------------------------------------------------- gen-data

def _cmd_gen_data(args: argparse.Namespace) -> int:
    if args.size < 1:
        raise CliError("--size must be at least 1")
    out = Path(args.out)
    exclude: set[str] = set()
    if args.exclude:
        exclude = {r.user_text for r in read_records(args.exclude)}
    if args.kind == "copy-asr-tts":
        records = datagen.copy_records(datagen.toy_sentences(args.size, args.seed))
    elif args.kind == "lm":
        records = datagen.lm_records(datagen.toy_sentences(args.size, args.seed))
    else:
        records = datagen.qa_records(
            args.size, args.seed,
            with_thinking=not args.no_thinking,
            exclude_questions=exclude,
        )
    header = (f"kind={args.kind} size={args.size} seed={args.seed} "
              f"with_thinking={not args.no_thinking}")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_records(out, records, header=header)
    _write_manifest(out.with_suffix(out.suffix + ".manifest"), _manifest_entries(
        "gen-data",
        {
            "gen.kind": args.kind,
            "gen.size": str(args.size),
            "gen.seed": str(args.seed),
            "gen.with_thinking": str(not args.no_thinking).lower(),
            "gen.exclude": args.exclude or "",
            "gen.out": str(out),
            "gen.records": str(len(records)),
        },
    ))
    print(f"wrote {len(records)} records to {out}")
    return 0


# ------------------------------------------------------------------- train

_STAGE_TASKS = {
    "stage1": ((TaskKind.TTS, TaskKind.ASR, TaskKind.T2T), (0.4, 0.4, 0.2)),
    "stage2": (
        (TaskKind.S2S, TaskKind.S2T, TaskKind.T2T, TaskKind.ASR, TaskKind.TTS),
        (0.3, 0.3, 0.2, 0.1, 0.1),
    ),
}


def _codec_from_config(cfg: dict[str, str]) -> CodecSpec:
    base = default_codec()
    return CodecSpec(
        charset=get_str(cfg, "codec.charset", base.charset),
        variants_per_char=get_int(cfg, "codec.variants_per_char",
                                  base.variants_per_char),
        frames_per_char=get_int(cfg, "codec.frames_per_char",
                                base.frames_per_char),
        speech_size=get_int(cfg, "codec.speech_size", base.speech_size),
        frame_rate=get_int(cfg, "codec.frame_rate", base.frame_rate),
    )


def _model_from_config(cfg: dict[str, str], vocab_total: int) -> ModelConfig:
    return ModelConfig(
        vocab_total=vocab_total,
        dim=get_int(cfg, "model.dim", 128),
        layers=get_int(cfg, "model.layers", 4),
        heads=get_int(cfg, "model.heads", 4),
        max_len=get_int(cfg, "model.max_len", 160),
        mlp_ratio=get_int(cfg, "model.mlp_ratio", 4),
        seed=get_int(cfg, "model.seed", 0),
    )


def _stage_from_config(cfg: dict[str, str], name: str,
                       seed_override: int | None) -> StageConfig:
    tasks, proportions = _STAGE_TASKS[name]
    weights = tuple(
        get_float(cfg, f"{name}.weight_{task.value}", 1.0) for task in tasks
    )
    seed_default = 0 if name == "stage1" else 1
    seed = get_int(cfg, f"{name}.seed", seed_default)
    if seed_override is not None:
        seed = seed_override if name == "stage1" else seed_override + 1
    return StageConfig(
        name=name,
        tasks=tasks,
        proportions=proportions,
        loss_weights=weights,
        steps=get_int(cfg, f"{name}.steps"),
        batch_size=get_int(cfg, f"{name}.batch_size", 16),
        seq_cap=get_int(cfg, f"{name}.seq_cap", 160),
        lr=get_float(cfg, f"{name}.lr", 1e-3 if name == "stage1" else 5e-4),
        warmup_steps=get_int(cfg, f"{name}.warmup_steps", 100),
        seed=seed,
    )


def _stage_data_paths(cfg: dict[str, str], name: str) -> list[Path]:
    value = get_str(cfg, f"{name}.data")
    paths = [Path(p.strip()) for p in value.split(",") if p.strip()]
    if not paths:
        raise CliError(f"{name}.data lists no dataset files")
    return paths


def _selected_stages(cfg: dict[str, str], choice: str) -> list[str]:
    configured = [s for s in ("stage1", "stage2") if f"{s}.steps" in cfg]
    if not configured:
        raise CliError("config defines no stage (need stage1.steps or "
                       "stage2.steps)")
    if choice == "all":
        return configured
    name = f"stage{choice}"
    if name not in configured:
        raise CliError(f"--stage {choice} requested but {name}.steps missing")
    return [name]


def _cmd_train(args: argparse.Namespace) -> int:
    if not args.config:
        raise CliError("train requires --config")
    cfg_path = Path(args.config)
    if not cfg_path.exists():
        raise CliError(f"config file not found: {cfg_path}")
    cfg = read_config(cfg_path)

    stage_names = _selected_stages(cfg, args.stage)
    stages = [_stage_from_config(cfg, name, args.seed) for name in stage_names]

    # Validate every referenced path before any compute.
    data_paths = {name: _stage_data_paths(cfg, name) for name in stage_names}
    for name, paths in data_paths.items():
        for path in paths:
            if not path.exists():
                raise CliError(f"{name}.data path not found: {path}")
    init_path = get_str(cfg, "run.init", "")
    if init_path and not Path(init_path).exists():
        raise CliError(f"run.init checkpoint not found: {init_path}")
    if args.resume and not Path(args.resume).exists():
        raise CliError(f"--resume checkpoint not found: {args.resume}")

    out_dir = Path(args.out or get_str(cfg, "run.out", "runs/train"))
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint_every = get_int(cfg, "run.checkpoint_every", 0)

    codec = _codec_from_config(cfg)
    tok, vocab, codec = default_toolkit(codec)

    resume_from: Checkpoint | None = None
    start_stage_step = 0
    if args.resume:
        resume_from = load_checkpoint(args.resume)
        params = resume_from.params
        if resume_from.opt_state is None:
            raise CliError(
                f"--resume checkpoint {args.resume} lacks optimizer state"
            )
        resume_stage = resume_from.extra.get("train.stage", "")
        if resume_stage not in stage_names:
            raise CliError(
                f"--resume checkpoint is for {resume_stage!r}, which is not "
                f"among the selected stages {stage_names}"
            )
        stage_names = stage_names[stage_names.index(resume_stage):]
        stages = stages[-len(stage_names):]
        start_stage_step = int(resume_from.extra.get("train.step", "0"))
    elif init_path:
        loaded = load_checkpoint(init_path)
        params = loaded.params
        if loaded.vocab != vocab:
            raise CliError(
                "run.init checkpoint vocabulary does not match this config"
            )
    else:
        params = init(_model_from_config(cfg, vocab.total))
    if params.config.vocab_total != vocab.total:
        raise CliError(
            f"model vocab_total {params.config.vocab_total} does not match "
            f"toolkit total {vocab.total}"
        )

    manifest = _manifest_entries("train", {
        "train.config_path": str(cfg_path),
        "train.stage_choice": args.stage,
        "train.out": str(out_dir),
        "train.resume": args.resume or "",
        "train.seed_override": "" if args.seed is None else str(args.seed),
    })
    for key, value in cfg.items():
        manifest[f"config.{key}"] = value
    for stage in stages:
        manifest[f"resolved.{stage.name}.seed"] = str(stage.seed)
    _write_manifest(out_dir / "manifest.txt", manifest)

    for index, (name, stage) in enumerate(zip(stage_names, stages)):
        records = []
        for path in data_paths[name]:
            records.extend(read_records(path))
        datasets = by_task(records)
        missing = [t.value for t in stage.tasks
                   if stage.proportions[stage.tasks.index(t)] > 0
                   and not datasets.get(t)]
        if missing:
            raise CliError(
                f"{name} data has no records for task(s): {', '.join(missing)}"
            )

        if index == 0 and resume_from is not None:
            opt = resume_from.opt_state
            start = start_stage_step
        else:
            opt = init_adam(params)
            start = 0

        def save_at(done: int, stage=stage, opt=opt) -> None:
            extra = {"train.stage": stage.name, "train.step": str(done)}
            tag = "" if done == stage.steps else f"-step{done}"
            save_checkpoint(out_dir / f"{stage.name}{tag}.mdsc", params, tok,
                            codec, opt_state=opt, extra=extra)

        metrics = run_stage(
            params, opt, stage, datasets, tok, vocab, codec,
            start_step=start,
            checkpoint_every=checkpoint_every,
            checkpoint_fn=save_at if checkpoint_every > 0 else None,
        )
        save_at(stage.steps)
        metrics_path = out_dir / f"metrics-{stage.name}.tsv"
        metrics_path.write_text(
            "\n".join(metrics_log_lines(metrics)) + "\n", encoding="utf-8"
        )
        mean_tail = (np.mean([m.loss for m in metrics[-50:]])
                     if metrics else float("nan"))
        print(f"{stage.name}: {len(metrics)} steps, "
              f"final-loss(mean50)={mean_tail:.4f}, "
              f"checkpoint={out_dir / (stage.name + '.mdsc')}")
    return 0


# ---------------------------------------------------------------- generate

def _default_n(task: TaskKind, payload: str, tok: WordTokenizer,
               codec: CodecSpec) -> int | None:
    if task is TaskKind.TTS:
        return codec.frames_per_char * len(normalize(payload)) + 1
    if task is TaskKind.ASR:
        return len(tok.encode(payload)) + 1
    return None


def _cmd_generate(args: argparse.Namespace) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    tok, vocab, codec = ckpt.tokenizer, ckpt.vocab, ckpt.codec
    task = TaskKind(args.task)
    n = args.n or _default_n(task, args.input, tok, codec)
    if n is None:
        raise CliError(f"--n is required for task {task.value}")
    T = args.T or n
    rng = np.random.default_rng(args.seed)
    lines = _manifest_comment_lines(_manifest_entries("generate", {
        "generate.checkpoint": args.checkpoint,
        "generate.task": task.value,
        "generate.input": args.input,
        "generate.n": str(n),
        "generate.T": str(T),
        "generate.temperature": str(args.temperature),
        "generate.seed": str(args.seed),
    }))
    try:
        response = respond(ckpt.params, task, args.input, n, T, vocab, codec,
                           tok, temperature=args.temperature, rng=rng)
    except MalformedGenerationError as exc:
        if args.trace and exc.trace is not None:
            Path(args.trace).write_text(
                "\n".join(trace_lines(exc.trace)) + "\n", encoding="utf-8"
            )
        raise CliError(f"malformed generation: {exc}") from exc
    lines.append(f"task: {task.value}")
    lines.append(f"think: {response.think_text}")
    lines.append(f"reply: {response.reply_text}")
    if response.reply_modality == "speech":
        lines.append(f"speech_frames: {len(response.reply_ids)}")
        lines.append(f"truncated: {str(response.speech_truncated).lower()}")
    report = "\n".join(lines)
    print(report)
    if args.trace:
        Path(args.trace).write_text(
            "\n".join(trace_lines(response.trace)) + "\n", encoding="utf-8"
        )
    if args.out:
        Path(args.out).write_text(report + "\n", encoding="utf-8")
    return 0


# -------------------------------------------------------------------- eval

def _parse_steps_spec(spec: str) -> list[tuple[str, object]]:
    """Parse ``--steps``: comma list of integers, ``n``, or ``n/K``."""
    settings: list[tuple[str, object]] = []
    for raw in spec.split(","):
        token = raw.strip()
        if not token:
            continue
        if token == "n":
            settings.append((token, lambda n: n))
        elif token.startswith("n/"):
            try:
                divisor = int(token[2:])
            except ValueError:
                raise CliError(f"bad steps token {token!r}") from None
            if divisor < 1:
                raise CliError(f"bad steps token {token!r}")
            settings.append(
                (token, lambda n, d=divisor: max(1, n // d))
            )
        else:
            try:
                fixed = int(token)
            except ValueError:
                raise CliError(f"bad steps token {token!r}") from None
            if fixed < 1:
                raise CliError(f"bad steps token {token!r}")
            settings.append((token, fixed))
    if not settings:
        raise CliError(f"--steps spec {spec!r} names no settings")
    return settings


def _cmd_eval(args: argparse.Namespace) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    tok, vocab, codec = ckpt.tokenizer, ckpt.vocab, ckpt.codec
    records = read_records(args.data)
    settings = _parse_steps_spec(args.steps)

    lines = _manifest_comment_lines(_manifest_entries("eval", {
        "eval.checkpoint": args.checkpoint,
        "eval.suite": args.suite,
        "eval.data": args.data,
        "eval.steps": args.steps,
        "eval.seed": str(args.seed),
    }))
    empty = False
    if args.suite in ("tts", "asr"):
        task = TaskKind.TTS if args.suite == "tts" else TaskKind.ASR
        texts = [r.user_text for r in records if r.task is task]
        empty = not texts
        lines.append("# steps\twer\tmalformed\titems")
        for label, setting in settings:
            kwargs = ({"T": setting} if isinstance(setting, int)
                      else {"steps_policy": setting})
            if args.suite == "tts":
                report = tts_eval(ckpt.params, texts, tok, vocab, codec,
                                  **kwargs)
            else:
                report = asr_eval(ckpt.params, texts, tok, vocab, codec,
                                  seed=args.seed, **kwargs)
            lines.append(f"{label}\t{report.wer:.6f}\t{report.n_malformed}"
                         f"\t{report.n_items}")
    else:
        empty = not records
        lines.append("# steps\taccuracy\tmalformed\titems")
        for label, setting in settings:
            kwargs = ({"T": setting} if isinstance(setting, int)
                      else {"steps_policy": setting})
            report = qa_eval(ckpt.params, records, tok, vocab, codec,
                             **kwargs)
            lines.append(f"{label}\t{report.accuracy:.6f}"
                         f"\t{report.n_malformed}\t{report.n_items}")

    output = "\n".join(lines)
    print(output)
    if args.out:
        Path(args.out).write_text(output + "\n", encoding="utf-8")
    if empty:
        print(f"warning: no {args.suite} items in {args.data}; "
              f"zero-count report", file=sys.stderr)
    return 0


# ------------------------------------------------------------------- probe

def parse_trace_file(text: str) -> dict[str, object]:
    """Parse a generation trace written by ``generate --trace``.

    Verifies the header, the per-step schedule against unmask_target, and
    the monotone cumulative counts; returns a summary mapping.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# "):
        raise CliError("trace file missing header line")
    header: dict[str, str] = {}
    for pair in lines[0][2:].split():
        key, _, value = pair.partition("=")
        if not _:
            raise CliError(f"bad trace header field {pair!r}")
        header[key] = value
    try:
        n = int(header["n"])
        T = int(header["T"])
        temperature = float(header["temperature"])
        condition_length = int(header["condition_length"])
    except (KeyError, ValueError) as exc:
        raise CliError(f"bad trace header: {exc}") from exc
    rows = []
    for line in lines[1:]:
        fields = line.split("\t")
        if len(fields) != 6:
            raise CliError(f"trace row needs 6 fields: {line!r}")
        step, cumulative = int(fields[0]), int(fields[1])
        selected = ([int(x) for x in fields[2].split(",")] if fields[2]
                    else [])
        rows.append((step, cumulative, selected))
    if len(rows) != T:
        raise CliError(f"trace has {len(rows)} rows, expected T={T}")
    total = 0
    for row_index, (step, cumulative, selected) in enumerate(rows):
        expected_i = T - row_index
        if step != expected_i:
            raise CliError(f"row {row_index}: step {step}, expected {expected_i}")
        quota = unmask_target(expected_i, n, T)
        if cumulative != quota:
            raise CliError(
                f"row {row_index}: cumulative {cumulative}, schedule says {quota}"
            )
        total += len(selected)
        if total > cumulative:
            raise CliError(f"row {row_index}: unmasked {total} > quota")
    return {
        "n": n,
        "T": T,
        "temperature": temperature,
        "condition_length": condition_length,
        "rows": len(rows),
        "total_unmasked": total,
    }


def _cmd_probe(args: argparse.Namespace) -> int:
    lines = _manifest_comment_lines(_manifest_entries("probe", {
        "probe.schedule": ",".join(args.schedule or []),
        "probe.t": args.t or "",
        "probe.data": args.data or "",
        "probe.trials": str(args.trials),
        "probe.seed": str(args.seed),
        "probe.parse_trace": args.parse_trace or "",
    }))
    did_anything = False

    for spec in args.schedule or []:
        did_anything = True
        try:
            n_str, t_str = spec.split(",")
            n, T = int(n_str), int(t_str)
        except ValueError:
            raise CliError(f"bad --schedule {spec!r}; expected N,T") from None
        lines.append(f"# schedule n={n} T={T}")
        lines.append("# i\tcumulative\tnew")
        previous = 0
        for i in range(T, 0, -1):
            quota = unmask_target(i, n, T)
            lines.append(f"{i}\t{quota}\t{quota - previous}")
            previous = quota

    if args.t:
        if not args.data:
            raise CliError("--t needs --data to build the probe sample")
        records = read_records(args.data)
        if not (0 <= args.index < len(records)):
            raise CliError(
                f"--index {args.index} outside dataset of {len(records)} records"
            )
        if args.checkpoint:
            ckpt = load_checkpoint(args.checkpoint)
            tok, vocab, codec = ckpt.tokenizer, ckpt.vocab, ckpt.codec
        else:
            tok, vocab, codec = default_toolkit()
        record = records[args.index]
        sample = build(record.task, record.user_text, record.think_text,
                       record.reply_text, tok, vocab, codec,
                       np.random.default_rng(args.seed))
        lines.append("# t\tmean_fraction\tci_low\tci_high\ttrials\tpositions")
        for raw in args.t.split(","):
            did_anything = True
            try:
                level = float(raw)
            except ValueError:
                raise CliError(f"bad --t value {raw!r}") from None
            result = masking_probe(level, sample, args.trials, vocab.mask_id,
                                   seed=args.seed)
            lines.append(
                f"{level}\t{result.mean_fraction:.6f}\t{result.ci_low:.6f}"
                f"\t{result.ci_high:.6f}\t{result.trials}"
                f"\t{result.target_positions}"
            )

    if args.parse_trace:
        did_anything = True
        summary = parse_trace_file(
            Path(args.parse_trace).read_text(encoding="utf-8")
        )
        lines.append(f"# trace {args.parse_trace}")
        for key in ("n", "T", "temperature", "condition_length", "rows",
                    "total_unmasked"):
            lines.append(f"trace.{key}\t{summary[key]}")

    if not did_anything:
        raise CliError("probe needs --schedule, --t, or --parse-trace")
    output = "\n".join(lines)
    print(output)
    if args.out:
        Path(args.out).write_text(output + "\n", encoding="utf-8")
    return 0


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdlm",
        description="Masked-diffusion speech-text toy model toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write a synthetic dataset file")
    p.add_argument("--kind", required=True,
                   choices=("copy-asr-tts", "lm", "thinking-qa"))
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--no-thinking", action="store_true",
                   help="emit the ablation corpus with empty think_text")
    p.add_argument("--exclude",
                   help="dataset file whose questions must not reappear")
    p.add_argument("--config", help="unused; accepted for uniformity")
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("train", help="run the training curriculum")
    p.add_argument("--config", required=True)
    p.add_argument("--stage", choices=("1", "2", "all"), default="all")
    p.add_argument("--seed", type=int, default=None,
                   help="override stage seeds (stage2 uses seed+1)")
    p.add_argument("--out", help="output directory (overrides run.out)")
    p.add_argument("--resume", help="checkpoint to continue from")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("generate", help="answer one request from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--task", required=True,
                   choices=tuple(t.value for t in TaskKind))
    p.add_argument("--input", required=True)
    p.add_argument("-n", type=int, default=None,
                   help="target length (defaults to gold for tts/asr)")
    p.add_argument("-T", type=int, default=None,
                   help="diffusion steps (defaults to n)")
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--trace", help="write the generation trace here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write the printed response here")
    p.add_argument("--config", help="unused; accepted for uniformity")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("eval", help="score a checkpoint on a dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--suite", required=True, choices=("tts", "asr", "qa"))
    p.add_argument("--data", required=True)
    p.add_argument("--steps", default="n",
                   help="comma list: integers, n, or n/K (default n)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write the report here")
    p.add_argument("--config", help="unused; accepted for uniformity")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("probe", help="schedule tables, masking probes, traces")
    p.add_argument("--schedule", action="append",
                   help="N,T pair; repeatable")
    p.add_argument("--t", help="comma list of noise levels to probe")
    p.add_argument("--data", help="dataset file for the probe sample")
    p.add_argument("--index", type=int, default=0,
                   help="record index within --data")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--checkpoint", help="toolkit source (default lexicon "
                                        "toolkit when omitted)")
    p.add_argument("--parse-trace", help="validate and summarize a trace file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write the report here")
    p.add_argument("--config", help="unused; accepted for uniformity")
    p.set_defaults(func=_cmd_probe)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
