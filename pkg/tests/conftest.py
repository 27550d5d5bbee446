from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
ROOT = TESTS.parent
PRESETS = ROOT / "presets"
GOLDEN = TESTS / "golden"


def preset_command(name: str) -> str:
    for line in (PRESETS / f"{name}.yaml").read_text().splitlines():
        if line.startswith("command:"):
            return line.split(":", 1)[1].strip()
    raise KeyError(name)

def run_preset(name: str, out_dir: Path, *extra: str) -> Path:
    from hashrep.cli.main import main

    out = out_dir / f"{name}.csv"
    rc = main([preset_command(name), "--config", str(PRESETS / f"{name}.yaml"), "--out", str(out), *extra])
    assert rc == 0, f"{name} exited {rc}"
    return out

@pytest.fixture(scope="session")
def mc_validate_csv(tmp_path_factory) -> Path:
    """The slow Monte Carlo preset, run once per session."""
    return run_preset("mc_validate", tmp_path_factory.mktemp("mc"))


ACCEPTANCE: dict = {}


@pytest.fixture
def verdict():
    """Record and print one pass/fail line for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
