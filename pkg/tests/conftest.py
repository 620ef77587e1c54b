from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

from stablefrac.localmodel import LocalModel

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))


@pytest.fixture(scope="session")
def frozen() -> dict:
    return json.loads((HERE / "data" / "oracle_values.json").read_text())


# Models that recur across modules.
EX11 = LocalModel.of((1, [1]))                       # 2 - z - w after transfer
EASY2 = LocalModel.of((1, [1]), (1, [2]))            # (y+x+ix^2)(y+2x+ix^2)
EXEX = LocalModel.of((1, [1]), (2, [1]))             # y+x shared, one deeper branch
PEX = LocalModel.of((1, []), (4, [1]), (2, []))      # three data of mixed depth
FLAT = LocalModel.of((1, []), (2, []))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
