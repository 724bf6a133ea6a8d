#!/usr/bin/env python3
"""Download the USA-road-t.BAY travel-time graph from the 9th DIMACS
Implementation Challenge mirror into the repository's data/ directory
(or $EHROUTE_DATA_DIR when set).

The file stays gzipped on disk; every loader in this repository reads
.gr and .gr.gz interchangeably.  Run with no arguments:

    python3 scripts/fetch_dimacs_bay.py
"""

from __future__ import annotations

import os
import sys
import urllib.request
from pathlib import Path

NAME = "USA-road-t.BAY.gr.gz"
URLS = [
    "https://www.diag.uniroma1.it/challenge9/data/USA-road-t/USA-road-t.BAY.gr.gz",
    "http://www.diag.uniroma1.it/challenge9/data/USA-road-t/USA-road-t.BAY.gr.gz",
]


def data_dir() -> Path:
    env = os.environ.get("EHROUTE_DATA_DIR")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent.parent / "data"


def main() -> int:
    target_dir = data_dir()
    target_dir.mkdir(parents=True, exist_ok=True)
    target = target_dir / NAME
    if target.exists() and target.stat().st_size > 0:
        print(f"already present: {target}")
        return 0
    tmp = target.with_suffix(".part")
    last_error: Exception | None = None
    for url in URLS:
        print(f"fetching {url}")
        try:
            with urllib.request.urlopen(url, timeout=60) as resp, open(tmp, "wb") as out:
                total = 0
                while True:
                    chunk = resp.read(1 << 20)
                    if not chunk:
                        break
                    out.write(chunk)
                    total += len(chunk)
                    print(f"\r  {total / 1e6:.1f} MB", end="", flush=True)
            print()
            tmp.replace(target)
            print(f"saved {target} ({total / 1e6:.1f} MB)")
            return 0
        except Exception as exc:  # noqa: BLE001 - report and try the next mirror
            last_error = exc
            print(f"  failed: {exc}")
            tmp.unlink(missing_ok=True)
    print(f"could not download {NAME}: {last_error}", file=sys.stderr)
    print(
        "fetch it manually and place it (gzipped or not) under "
        f"{target_dir}/ or a directory named by EHROUTE_DATA_DIR",
        file=sys.stderr,
    )
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
