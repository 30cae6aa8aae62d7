"""Command-line entry: validate pair files and run adapter training."""

from __future__ import annotations

import argparse
import sys

from .pairs import PairsError, validate_pairs
from .training import TrainerError, TrainerManifest, train


def cmd_validate(args: argparse.Namespace) -> int:
    report = validate_pairs(args.pairs)
    print(f"records: {report.total}")
    print(f"per label: {report.per_label}")
    if report.rejects:
        for line, reason in report.rejects:
            print(f"reject line {line}: {reason}")
        return 1
    print("all records valid")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    manifest = TrainerManifest.load(args.manifest)
    result = train(manifest)
    if result.dry_run:
        print(f"dry run ok: {result.pairs_report.total} pairs validated, nothing trained")
        return 0
    print(f"steps: {result.steps}")
    print(f"initial loss: {result.initial_loss:.4f}  final loss: {result.final_loss:.4f}")
    print(f"adapter written to {result.output_dir}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="adapter-trainer",
        description="Low-rank adapter fine-tuning on exported prompt-response pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a pair file against the label contract")
    p.add_argument("pairs")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("train", help="run training from a manifest file")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_train)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TrainerError, PairsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
