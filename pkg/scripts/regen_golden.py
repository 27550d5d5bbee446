"""Rewrite tests/golden/<preset>.csv from the current code.

Usage: python3 scripts/regen_golden.py [preset-name ...]
"""

import sys
from pathlib import Path

from hashrep.cli.main import main

ROOT = Path(__file__).resolve().parents[1]


def regen(name: str) -> None:
    preset = ROOT / "presets" / f"{name}.yaml"
    command = next(
        line.split(":", 1)[1].strip() for line in preset.read_text().splitlines() if line.startswith("command:")
    )
    out = ROOT / "tests" / "golden" / f"{name}.csv"
    rc = main([command, "--config", str(preset), "--out", str(out)])
    out.with_name(out.name + ".meta.json").unlink(missing_ok=True)
    print(f"{name}: exit {rc}")


if __name__ == "__main__":
    names = sys.argv[1:] or sorted(p.stem for p in (ROOT / "presets").glob("*.yaml"))
    for name in names:
        regen(name)
