#!/usr/bin/env python3
"""Generate the synthetic input fixture (posts, embeddings, transcripts,
external series, config) into a directory, ready for `noveldyn all`."""

import argparse
from pathlib import Path

from noveldyn.synthdata import DEFAULT_DAYS, build_fixture


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("root", type=Path, help="directory to write the fixture into")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--days", type=int, default=DEFAULT_DAYS)
    args = parser.parse_args()
    config_path = build_fixture(args.root, seed=args.seed, days=args.days)
    print(f"wrote fixture under {args.root}")
    print(f"config: {config_path}")
    print(f"run:    noveldyn all -c {config_path}")


if __name__ == "__main__":
    main()
