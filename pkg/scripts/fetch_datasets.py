#!/usr/bin/env python3
"""Download the three public benchmark datasets from the UCI repository
into data/ and normalize them to headered CSV files genflow can load.

Produces:
    data/wbc.csv        Wisconsin Breast Cancer (original); rows with
                        missing cells dropped -> 683 rows, 10 feature
                        columns (sample id retained as a feature, where
                        it ranks low), label column 'class' (2=benign,
                        4=malignant).
    data/german.csv     German Credit (numeric encoding, 24 features),
                        label column 'risk' (1=good, 2=bad).
    data/telescope.csv  MAGIC Gamma Telescope, 10 features, label
                        column 'class' (g/h).

Requires outbound HTTPS to archive.ics.uci.edu.
"""

import csv
import sys
import urllib.request
from pathlib import Path

BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"

SOURCES = {
    "wbc": (
        f"{BASE}/breast-cancer-wisconsin/breast-cancer-wisconsin.data",
        ["sample_id", "clump_thickness", "cell_size_uniformity",
         "cell_shape_uniformity", "marginal_adhesion", "epithelial_cell_size",
         "bare_nuclei", "bland_chromatin", "normal_nucleoli", "mitoses",
         "class"],
    ),
    "german": (
        f"{BASE}/statlog/german/german.data-numeric",
        [f"a{i}" for i in range(1, 25)] + ["risk"],
    ),
    "telescope": (
        f"{BASE}/magic/magic04.data",
        ["length", "width", "size", "conc", "conc1", "asym",
         "m3long", "m3trans", "alpha", "dist", "class"],
    ),
}


def fetch(name: str, out_dir: Path) -> Path:
    url, header = SOURCES[name]
    print(f"fetching {url}")
    raw = urllib.request.urlopen(url, timeout=60).read().decode()
    out = out_dir / f"{name}.csv"
    dropped = 0
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for line in raw.splitlines():
            line = line.strip()
            if not line:
                continue
            cells = line.split(",") if "," in line else line.split()
            if len(cells) != len(header):
                dropped += 1
                continue
            if "?" in cells:
                dropped += 1
                continue
            w.writerow(cells)
    print(f"wrote {out} ({dropped} rows dropped)")
    return out


def main(argv):
    out_dir = Path(argv[1]) if len(argv) > 1 else Path(__file__).parent.parent / "data"
    out_dir.mkdir(exist_ok=True)
    for name in SOURCES:
        fetch(name, out_dir)


if __name__ == "__main__":
    main(sys.argv)
