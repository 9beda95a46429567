"""Command-line interface.

Subcommands:
    run            Evaluate each subject's 2-class recordings end to end.
    pairs          Evaluate every class pair of multi-class recordings.
    baseline-erds  ERD-feature baseline under the same CV protocol.
    synth          Generate a synthetic recording with known structure.
    report         Re-render summary tables from a finished run directory.
    validate       Check recorded epoch sets against the storage contract.

Exit status is 0 only when every requested unit of work succeeds.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .epochs import read_epochset
from .filterbank import BandSpec
from .pipeline import RunConfig, baseline_erds, pairs, run
from .reports import rerender
from .synth import PlantedEffect, SynthSpec, generate

logger = logging.getLogger(__name__)


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument(
        "--manifest",
        action="append",
        metavar="PATH",
        help="epoch-set manifest (repeatable)",
    )
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--repeats", type=int, help="CV repetitions")
    parser.add_argument("--folds", type=int, help="CV folds")
    parser.add_argument("--rounds", type=int, help="boosting rounds")
    parser.add_argument("--n-max", type=int, help="largest band-group size")
    parser.add_argument(
        "--backend", choices=["morlet", "butterworth"], help="filterbank backend"
    )
    parser.add_argument(
        "--pair",
        nargs=2,
        metavar=("CLASS_A", "CLASS_B"),
        help="restrict evaluation to one class pair",
    )
    parser.add_argument(
        "--class-aware",
        action="store_true",
        default=None,
        help="use the labeled channel-scoring variant",
    )
    parser.add_argument(
        "--ica",
        action="store_true",
        default=None,
        help="enable artifact removal before windowing",
    )
    parser.add_argument("--jobs", type=int, help="parallel subject workers")


def _build_config(args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    if args.config:
        raw = json.loads(Path(args.config).read_text())
    if args.manifest:
        raw["manifests"] = list(args.manifest)
    if args.out is not None:
        raw["out_dir"] = args.out
    for key in ("seed", "repeats", "folds", "rounds", "backend", "jobs"):
        value = getattr(args, key)
        if value is not None:
            raw[key] = value
    if args.n_max is not None:
        raw["n_max"] = args.n_max
    if args.pair is not None:
        raw["class_pair"] = list(args.pair)
    if args.class_aware is not None:
        raw["class_aware"] = args.class_aware
    if args.ica is not None:
        pre = dict(raw.get("preprocess", {}))
        pre["ica_enabled"] = args.ica
        raw["preprocess"] = pre
    cfg = RunConfig.from_dict(raw)
    if not cfg.manifests:
        raise SystemExit("no manifests given (use --manifest or a config file)")
    return cfg


def _parse_effect(text: str) -> PlantedEffect:
    """Parse CLASS:CHANNEL:LO-HI:MULT, e.g. left:C3:8-12:0.4."""
    parts = text.split(":")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"effect must be CLASS:CHANNEL:LO-HI:MULT, got {text!r}"
        )
    cls, channel, band_text, mult_text = parts
    try:
        lo_text, hi_text = band_text.split("-")
        band = BandSpec(float(lo_text), float(hi_text))
        mult = float(mult_text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad effect {text!r}: {exc}") from exc
    return PlantedEffect(class_name=cls, channel=channel, band=band, multiplier=mult)


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    reports, failures = run(cfg)
    for rep in reports:
        best = rep.per_n[rep.best_n]
        print(
            f"{rep.subject_id}: {best['mean_pct']:.2f}% "
            f"(channel {rep.selected_channel}, n={rep.best_n})"
        )
    for message in failures:
        print(f"FAILED {message}", file=sys.stderr)
    print(f"outputs in {cfg.out_dir}")
    return 1 if failures else 0


def _cmd_pairs(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    by_pair, failures = pairs(cfg)
    for name, reports in by_pair.items():
        if reports:
            mean = sum(r.per_n[r.best_n]["mean_pct"] for r in reports) / len(reports)
            print(f"{name}: {mean:.2f}% over {len(reports)} subjects")
    for message in failures:
        print(f"FAILED {message}", file=sys.stderr)
    print(f"outputs in {cfg.out_dir}")
    return 1 if failures else 0


def _cmd_baseline(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    results, failures = baseline_erds(cfg)
    for entry in results:
        print(f"{entry['subject_id']}: {entry['mean_pct']:.2f}%")
    for message in failures:
        print(f"FAILED {message}", file=sys.stderr)
    print(f"outputs in {cfg.out_dir}")
    return 1 if failures else 0


def _cmd_synth(args: argparse.Namespace) -> int:
    spec = SynthSpec(
        fs_hz=args.fs,
        n_trials_per_class=args.trials_per_class,
        trial_s=args.trial_s,
        cue_s=args.cue_s,
        classes=tuple(args.classes.split(",")),
        channels=tuple(args.channels.split(",")),
        background_exponent=args.exponent,
        background_amplitude=args.amplitude,
        effects=tuple(args.effect or ()),
        seed=args.seed,
    )
    epochs = generate(spec)
    manifest = _write_synth(epochs, args.out)
    print(f"wrote {manifest}")
    return 0


def _write_synth(epochs, out_dir: str) -> Path:
    from .epochs import write_epochset

    return write_epochset(epochs, out_dir)


def _cmd_report(args: argparse.Namespace) -> int:
    written = rerender(args.run_dir)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    status = 0
    for manifest in args.manifests:
        try:
            epochs = read_epochset(manifest)
        except Exception as exc:
            print(f"INVALID {manifest}: {exc}", file=sys.stderr)
            status = 1
            continue
        print(
            f"OK {manifest}: subject {epochs.subject_id}, "
            f"{epochs.n_trials} trials x {epochs.n_channels} channels "
            f"x {epochs.n_samples} samples at {epochs.fs_hz:g} Hz, "
            f"classes {epochs.classes}"
        )
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onechan",
        description="Single-channel motor-imagery EEG classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evaluate each subject end to end")
    _add_run_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_pairs = sub.add_parser("pairs", help="evaluate every class pair")
    _add_run_flags(p_pairs)
    p_pairs.set_defaults(func=_cmd_pairs)

    p_base = sub.add_parser("baseline-erds", help="ERD-feature baseline")
    _add_run_flags(p_base)
    p_base.set_defaults(func=_cmd_baseline)

    p_synth = sub.add_parser("synth", help="generate a synthetic recording")
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--trials-per-class", type=int, default=100)
    p_synth.add_argument("--fs", type=float, default=250.0)
    p_synth.add_argument("--trial-s", type=float, default=7.0)
    p_synth.add_argument("--cue-s", type=float, default=3.0)
    p_synth.add_argument("--classes", default="left,right")
    p_synth.add_argument("--channels", default="C3,Cz,C4")
    p_synth.add_argument("--amplitude", type=float, default=1.0)
    p_synth.add_argument("--exponent", type=float, default=1.0)
    p_synth.add_argument(
        "--effect",
        action="append",
        type=_parse_effect,
        metavar="CLASS:CHANNEL:LO-HI:MULT",
        help="planted band-power effect (repeatable)",
    )
    p_synth.set_defaults(func=_cmd_synth)

    p_report = sub.add_parser("report", help="re-render run summary tables")
    p_report.add_argument("run_dir")
    p_report.set_defaults(func=_cmd_report)

    p_val = sub.add_parser("validate", help="check stored epoch sets")
    p_val.add_argument("manifests", nargs="+")
    p_val.set_defaults(func=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
