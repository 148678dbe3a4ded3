import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from jrcswarm.scenario import ScenarioConfig, load_config  # noqa: E402
from jrcswarm.physics import Position3D  # noqa: E402

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def reference_cfg() -> ScenarioConfig:
    return load_config(CONFIGS / "reference_3targets.json")


def make_cfg(targets, **kw) -> ScenarioConfig:
    pts = tuple(Position3D(float(t[0]), float(t[1]), 0.0) for t in targets)
    return ScenarioConfig(targets=pts, **kw)


@pytest.fixture
def criterion(request):
    """Record one acceptance line; call as ``criterion(label, passed, detail)``."""
    lines = request.config.__dict__.setdefault("acceptance_lines", [])

    def record(label: str, passed: bool, detail: str = "") -> bool:
        lines.append(f"{'PASS' if passed else 'FAIL'}  {label}" + (f"  ({detail})" if detail else ""))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
