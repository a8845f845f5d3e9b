"""Command-line entry point: ``auscult <subcommand> ...``.

Exit status is 0 on success, 1 on a data or configuration error and 2 on a
usage error. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .augment import ConfigurationError
from .config import PipelineConfig, load_config
from .cycles import MODES, apply_rearrangement, plan_rearrangement, rearranged_boundaries
from .ddpm.checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .ddpm.denoiser import EpsilonPredictor
from .ddpm.diffusion import reverse_sample
from .ddpm.schedule import NoiseSchedule
from .ddpm.train import TrainConfig, prepare_ecg, train_toy_denoiser
from .dsp import InvalidBandError, Signal, mel_spectrogram, normalize
from .fixtures import make_fixtures
from .hpss import apply_hpss_plan, draw_hpss_plan
from .io import (
    ManifestError,
    WavFormatError,
    load_cycles,
    load_manifest,
    load_record,
    load_wav,
    read_table,
    write_cycles,
    write_json_atomic,
    write_wav,
)
from .metrics import MetricsReport, aggregate_subject, as_label, compute_metrics, confusion
from .pipeline import apply_copy, extract_fragments, load_bank, plan_copy, to_internal_rate
from .records import LABELS
from .rng import RandomStream

SEED_ENV = "AUSCULT_SEED"


class CliError(Exception):
    """A user-facing failure with a one-line message."""


def _seed(value) -> int:
    if value is None:
        env = os.environ.get(SEED_ENV)
        if env is None:
            raise CliError(f"no seed given: pass --seed or set {SEED_ENV}")
        value = env
    try:
        seed = int(value)
    except ValueError:
        raise CliError(f"seed must be an integer, got {value!r}") from None
    if not 0 <= seed < 2**64:
        raise CliError("seed must be between 0 and 2**64 - 1")
    return seed


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise CliError(f"file not found: {p}")
    return p


def _out_dir(path: str) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cmd_fixtures(args) -> int:
    manifest = make_fixtures(_out_dir(args.out), _seed(args.seed), args.count, args.seconds,
                             args.noise_clips)
    print(manifest)
    return 0


def cmd_augment(args) -> int:
    config = load_config(_existing(args.config)) if args.config else PipelineConfig()
    seed = _seed(args.seed if args.seed is not None else config.seed)
    copies = args.copies if args.copies is not None else config.copies
    if copies < 1:
        raise CliError("--copies must be positive")
    out_arg = args.out or config.out_dir
    if out_arg is None:
        raise CliError("no output directory: pass --out or set out_dir in the config")
    out = _out_dir(out_arg)
    bank = load_bank(config.noise_bank, lambda p: load_wav(_existing(p)))
    rows = load_manifest(_existing(args.manifest))
    for row in rows:
        record, resampled = to_internal_rate(load_record(row))
        for k in range(copies):
            sidecar = plan_copy(record, config, seed, k)
            augmented, applied = apply_copy(record, sidecar, bank)
            stem = f"{record.id}__aug{k}"
            write_wav(out / f"{stem}.wav", augmented.pcg)
            if augmented.ecg is not None:
                write_wav(out / f"{record.id}__ecg__aug{k}.wav", augmented.ecg)
            if augmented.cycles is not None:
                write_cycles(out / f"{stem}.cycles.csv", augmented.cycles)
            sidecar.update(applied=applied, resampled=resampled, label=record.label)
            write_json_atomic(out / f"{stem}.json", sidecar)
    print(f"wrote {len(rows) * copies} augmented record(s) to {out}")
    return 0


def cmd_hpss(args) -> int:
    signal = load_wav(_existing(args.input))
    plan = draw_hpss_plan(RandomStream(_seed(args.seed)).child("hpss"))
    write_wav(args.out, apply_hpss_plan(signal, plan))
    if args.plan:
        write_json_atomic(args.plan, plan.to_dict())
    return 0


def cmd_rearrange(args) -> int:
    signal = load_wav(_existing(args.input))
    bounds = load_cycles(_existing(args.cycles))
    if bounds.n_cycles < 2:
        raise CliError("need at least two annotated heart cycles to rearrange")
    rng = RandomStream(_seed(args.seed)).child("rearrange")
    mode = None if args.mode == "random" else args.mode
    plan = plan_rearrangement(bounds.n_cycles, rng, mode=mode, probability=args.probability)
    out_sig = apply_rearrangement(signal, bounds, plan["order"]) if plan["applied"] else signal
    write_wav(args.out, out_sig)
    if args.cycles_out:
        write_cycles(args.cycles_out, rearranged_boundaries(bounds, plan["order"]))
    print(json.dumps(plan))
    return 0


def cmd_ddpm_train(args) -> int:
    overrides = {"preset": args.preset, "norm": args.norm, "steps": args.steps}
    base = load_config(_existing(args.config)).train.to_dict() if args.config else {}
    base.update({k: v for k, v in overrides.items() if v is not None})
    config = TrainConfig.from_dict(base)
    records = [load_record(r) for r in load_manifest(_existing(args.manifest))]
    records = [r for r in records if r.ecg is not None]
    if not records:
        raise CliError("manifest has no records with an ECG channel")
    result = train_toy_denoiser(records, config, RandomStream(_seed(args.seed)).child("ddpm-train"))
    save_checkpoint(args.out, result.model, extra={"train": config.to_dict(),
                                                   "best_step": result.best_step,
                                                   "best_val": result.best_val})
    if args.history:
        write_json_atomic(args.history, {"train_losses": result.train_losses,
                                         "val_losses": result.val_losses,
                                         "initial_val": result.initial_val,
                                         "best_val": result.best_val,
                                         "best_step": result.best_step})
    print(f"validation loss {result.initial_val:.4f} -> {result.best_val:.4f} (step {result.best_step})")
    return 0


def _sampling_schedule(extra: dict, which: str) -> NoiseSchedule:
    train = TrainConfig.from_dict(extra.get("train", {}))
    if which == "inference":
        return NoiseSchedule.from_betas(train.inference_betas)
    return train.schedule


def cmd_ddpm_sample(args) -> int:
    model, extra = load_checkpoint(_existing(args.checkpoint))
    train = TrainConfig.from_dict(extra.get("train", {}))
    rate = train.sample_rate_hz
    ecg = prepare_ecg(load_wav(_existing(args.ecg)), rate)
    mel = mel_spectrogram(ecg, rate, train.window_len, model.hop, model.hparams["n_mels"])
    length = len(ecg) if args.seconds is None else int(round(args.seconds * rate))
    if length < 1:
        raise CliError("requested length is empty")
    label = LABELS.index(args.label) if args.label else None
    rng = RandomStream(_seed(args.seed)).child("ddpm-sample")
    y = reverse_sample(EpsilonPredictor(model, label), mel.bands, _sampling_schedule(extra, args.schedule),
                       rng, length)
    pcg = normalize(Signal(np.clip(y, -1e6, 1e6), rate))
    write_wav(args.out, pcg)
    if args.fragments:
        stem = Path(args.out)
        for i, frag in enumerate(extract_fragments(pcg, args.fragment_seconds, args.fragments)):
            write_wav(stem.with_name(f"{stem.stem}__frag{i}{stem.suffix}"), frag)
    return 0


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def cmd_metrics(args) -> int:
    preds = read_table(_existing(args.preds))
    labels = read_table(_existing(args.labels))
    missing = sorted(set(labels) - set(preds))
    if missing:
        raise CliError(f"no prediction for {len(missing)} id(s), e.g. {missing[0]!r}")
    y_pred, y_true = [], []
    for rid, values in labels.items():
        truth = {as_label(v) for v in values}
        if len(truth) != 1:
            raise CliError(f"conflicting labels for {rid!r}")
        vals = preds[rid]
        if all(_is_number(v) for v in vals):
            decision = aggregate_subject([float(v) for v in vals], args.threshold)
        elif len(vals) == 1:
            decision = as_label(vals[0])
        else:
            raise CliError(f"{rid!r}: repeated predictions must be numeric scores")
        y_pred.append(decision)
        y_true.append(truth.pop())
    report = compute_metrics(confusion(y_pred, y_true))
    if args.json:
        print(report.to_json())
    else:
        print(MetricsReport.header())
        print(report.row())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="auscult", description="PCG/ECG augmentation and synthesis tools.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    seed_help = f"master seed (default: ${SEED_ENV})"

    s = sub.add_parser("fixtures", help="write a synthetic paired dataset")
    s.add_argument("--seed", help=seed_help)
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seconds", type=float, default=6.0)
    s.add_argument("--noise-clips", type=int, default=2)
    s.set_defaults(func=cmd_fixtures)

    s = sub.add_parser("augment", help="write augmented copies of every manifest record")
    s.add_argument("--manifest", required=True)
    s.add_argument("--config", help="pipeline config JSON (defaults apply when omitted)")
    s.add_argument("--seed", help=seed_help)
    s.add_argument("--out")
    s.add_argument("--copies", type=int)
    s.set_defaults(func=cmd_augment)

    s = sub.add_parser("hpss", help="two-stage HPSS reconstruction of one WAV")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seed", help=seed_help)
    s.add_argument("--plan", help="write the drawn parameters here as JSON")
    s.set_defaults(func=cmd_hpss)

    s = sub.add_parser("rearrange", help="shuffle annotated heart cycles of one WAV")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--cycles", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--cycles-out")
    s.add_argument("--seed", help=seed_help)
    s.add_argument("--mode", choices=(*MODES, "random"), default="random")
    s.add_argument("--probability", type=float, default=0.75,
                   help="chance of rearranging when --mode is random")
    s.set_defaults(func=cmd_rearrange)

    s = sub.add_parser("ddpm-train", help="train the toy ECG-conditioned PCG denoiser")
    s.add_argument("--manifest", required=True)
    s.add_argument("--out", required=True, help="checkpoint path")
    s.add_argument("--config")
    s.add_argument("--seed", help=seed_help)
    s.add_argument("--steps", type=int)
    s.add_argument("--preset", choices=("diffwave", "wavegrad"))
    s.add_argument("--norm", choices=("l1", "l2"))
    s.add_argument("--history", help="write loss curves here as JSON")
    s.set_defaults(func=cmd_ddpm_train)

    s = sub.add_parser("ddpm-sample", help="generate a PCG conditioned on an ECG")
    s.add_argument("--checkpoint", required=True)
    s.add_argument("--ecg", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seed", help=seed_help)
    s.add_argument("--label", choices=LABELS)
    s.add_argument("--seconds", type=float, help="output length (default: the ECG's)")
    s.add_argument("--schedule", choices=("train", "inference"), default="train")
    s.add_argument("--fragment-seconds", type=float, default=1.5)
    s.add_argument("--fragments", type=int, default=0, help="also write this many fragments")
    s.set_defaults(func=cmd_ddpm_sample)

    s = sub.add_parser("metrics", help="print the classification measures row")
    s.add_argument("--preds", required=True, help="CSV id,prediction (label or score; repeated ids are fragments)")
    s.add_argument("--labels", required=True, help="CSV id,label")
    s.add_argument("--threshold", type=float, default=0.5)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_metrics)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CliError, ConfigurationError, ManifestError, WavFormatError, CheckpointError,
            InvalidBandError, ValueError, OSError) as exc:
        print(f"auscult {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
