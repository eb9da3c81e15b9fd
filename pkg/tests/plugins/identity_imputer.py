#!/usr/bin/env python3
"""Identity-stub imputer plugin: copies data.csv, filling gaps with 0.

Reads only the task directory contract (input/data.csv, input/mask.csv),
writes output/imputed.csv. Deliberately framework-free: this is what the
smallest possible external plugin looks like.
"""

import csv
import sys
from pathlib import Path


def main(task_dir: str) -> int:
    task = Path(task_dir)
    with open(task / "input" / "data.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    out_dir = task / "output"
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "imputed.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in body:
            w.writerow(row[:2] + [cell if cell.strip() else "0.0" for cell in row[2:]])
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
