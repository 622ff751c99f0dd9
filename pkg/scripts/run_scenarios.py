"""Run every scenario in scripts/scenarios through the CLI and list the reports.

    python scripts/run_scenarios.py [--out-dir reports] [--format json|csv]
"""

import argparse
import sys
from pathlib import Path

from kazhdan_lab.cli import main

HERE = Path(__file__).resolve().parent


def run(out_dir: str, fmt: str) -> int:
    worst = 0
    for scenario in sorted((HERE / "scenarios").glob("*.toml")):
        if scenario.name == "riesz.toml":  # a measure file, not a scenario
            continue
        print(f"== {scenario.name}")
        rc = main(["run", str(scenario), "--out-dir", out_dir, "--format", fmt])
        worst = max(worst, rc)
    return worst


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="reports")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    args = parser.parse_args()
    sys.exit(run(args.out_dir, args.format))
