"""Batch command-line interface.

Subcommands map one-to-one onto pipeline stages; ``all`` runs every stage.
Flags override the corresponding config keys. Exit code 0 only when the
requested stages completed fully.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config, validate_paths
from .distances import DistanceError
from .embfile import EmbeddingFileError
from .ingest import IngestError
from .novelty import NoveltyError
from .pipeline import (
    PipelineError,
    run_all,
    run_diagnostics,
    run_exposure_grid,
    run_falsification,
    run_irf,
    run_leads,
    run_main_table,
    run_novelty,
)
from .regression import RegressionError
from .stationarity import StationarityError
from .whitening import WhiteningError

_STAGES = {
    "novelty": run_novelty,
    "main-table": run_main_table,
    "leads": run_leads,
    "falsify": run_falsification,
    "exposures": run_exposure_grid,
    "irf": run_irf,
    "diagnostics": run_diagnostics,
}

_ERRORS = (
    ConfigError,
    PipelineError,
    IngestError,
    EmbeddingFileError,
    DistanceError,
    NoveltyError,
    RegressionError,
    StationarityError,
    WhiteningError,
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", "-c", required=True, help="YAML run config")
    parser.add_argument("--output-dir", help="override output_dir")
    parser.add_argument("--timezone", help="override analysis timezone")
    parser.add_argument("--seed", type=int, help="override random seed")
    parser.add_argument(
        "--primary-exposure", help="override the primary exposure name"
    )
    parser.add_argument(
        "--metric", choices=["energy", "mmd2"], help="override novelty metric"
    )
    parser.add_argument(
        "--window-days", type=int, help="override the novelty reference window"
    )
    parser.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noveldyn",
        description=(
            "Daily distributional novelty of an embedded post corpus and its "
            "dynamic response to media-attention exposure."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ["validate", *_STAGES, "all"]:
        p = sub.add_parser(name)
        _add_common(p)
    return parser


def _overrides(args) -> dict:
    out = {}
    if args.output_dir is not None:
        out["output_dir"] = args.output_dir
    if args.timezone is not None:
        out["timezone"] = args.timezone
    if args.seed is not None:
        out["seed"] = args.seed
    if args.primary_exposure is not None:
        out["primary_exposure"] = args.primary_exposure
    return out


def _novelty_overrides(config, args):
    updates = {}
    if args.metric is not None:
        updates["metric"] = args.metric
    if args.window_days is not None:
        updates["window_days"] = args.window_days
    if not updates:
        return config
    from dataclasses import replace

    from .novelty import NoveltyConfig

    base = {
        "metric": config.novelty.metric,
        "window_days": config.novelty.window_days,
        "min_day_posts": config.novelty.min_day_posts,
        "min_ref_posts": config.novelty.min_ref_posts,
        "within": config.novelty.within,
        "gamma_rule": config.novelty.gamma_rule,
    }
    if "metric" in updates and "window_days" not in updates:
        base.pop("window_days")  # let the new metric pick its default window
    base.update(updates)
    return replace(config, novelty=NoveltyConfig(**base))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(args.config, overrides=_overrides(args))
        config = _novelty_overrides(config, args)
        if args.command == "validate":
            paths = validate_paths(config)
            print(f"config ok: {len(paths)} input file(s) present")
            print(f"output dir: {config.output_dir}")
            print(f"specs: {', '.join(s.label() for s in config.specs)}")
            return 0
        if args.command == "all":
            bundle = run_all(config)
        else:
            bundle = _STAGES[args.command](config)
        for stage, files in bundle.files.items():
            for f in files:
                print(f"[{stage}] wrote {f}")
        return 0
    except _ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
