"""Run every config in scripts/configs (or the ones named) and write JSON + CSV to results/."""

import argparse
import sys
import time
from pathlib import Path

from boolinf.harness.config import load_config
from boolinf.harness.experiments import run_experiment
from boolinf.harness.report import write_report, write_rows_csv

HERE = Path(__file__).resolve().parent


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("configs", nargs="*", type=Path)
    parser.add_argument("--results", type=Path, default=HERE.parent / "results")
    args = parser.parse_args(argv)
    configs = args.configs or sorted((HERE / "configs").glob("*.cfg"))
    args.results.mkdir(parents=True, exist_ok=True)
    failed = 0
    for path in configs:
        config = load_config(path)
        start = time.perf_counter()
        result = run_experiment(config)
        write_report(result, args.results / f"{path.stem}.json")
        write_rows_csv(result["rows"], args.results / f"{path.stem}.csv")
        violations = result["summary"].get("violations", 0)
        failed += bool(violations)
        print(f"{path.stem:<24} {config.experiment:<17} rows={len(result['rows']):<5} "
              f"violations={violations} {time.perf_counter() - start:6.1f}s")
    return 2 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
