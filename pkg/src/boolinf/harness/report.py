"""Report documents: config, rows, summary, provenance."""

from __future__ import annotations

import csv
import json
from datetime import datetime, timezone

from .. import __version__


def make_report(config: dict, rows: list, summary: dict, seed) -> dict:
    return {
        "config": config,
        "rows": rows,
        "summary": summary,
        "provenance": {
            "package": "boolinf",
            "version": __version__,
            "seed": seed,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def without_timestamp(report: dict) -> dict:
    clone = json.loads(json.dumps(report))
    clone["provenance"].pop("timestamp", None)
    return clone


def _flatten(row: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in row.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        elif isinstance(value, list):
            flat[name] = json.dumps(value)
        else:
            flat[name] = value
    return flat


def write_rows_csv(rows: list, path) -> None:
    flat = [_flatten(r) for r in rows]
    fields = sorted({key for r in flat for key in r})
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for r in flat:
            writer.writerow(r)


def write_report(report: dict, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(report))
