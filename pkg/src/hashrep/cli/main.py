"""``hashrep <command> --config <path> [--seed] [--format] [--out] [--trials]``.

Exit codes: 0 success, 1 configuration error, 2 computation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .commands import ComputationError, run
from .config import COMMANDS, ConfigError, load_config, parse_config
from .table import emit

log = logging.getLogger("hashrep")

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hashrep", description="Hashing-based quantum repeater calculations.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, type=Path, help="YAML scenario document")
    p.add_argument("--seed", type=int, help="override the document seed")
    p.add_argument("--format", choices=("csv", "json"), help="override the output format")
    p.add_argument("--out", type=Path, help="write here instead of stdout")
    p.add_argument("--trials", type=int, help="override the Monte Carlo trial count")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if cfg.command is not None and cfg.command != args.command:
            raise ConfigError(f"document is for {cfg.command!r}, not {args.command!r}")
        overrides = {k: getattr(args, k) for k in ("seed", "format", "trials") if getattr(args, k) is not None}
        if overrides:
            cfg = parse_config({**cfg.model_dump(mode="json", exclude_none=True), **overrides})
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        table = run(args.command, cfg)
    except ComputationError as e:
        print(f"computation error: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    text = emit(table, cfg.format)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
        if cfg.format == "csv":
            meta = args.out.with_name(args.out.name + ".meta.json")
            meta.write_text(json.dumps(table.metadata, indent=2) + "\n")
        log.info("wrote %d rows to %s", len(table.rows), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
