"""Recompute the reference values in tests/data/oracles.json.

Run only when an oracle itself changes; the tests read the frozen file.
"""
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402


def main():
    out = ROOT / "tests" / "data" / "oracles.json"
    out.write_text(json.dumps(oracles.compute_all(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
