"""Convert the UCI kr-vs-kp file to the numeric CSV layout ``load_csv`` reads.

Each categorical attribute is replaced by the rank of its value among the
sorted distinct values of that column; the class column becomes 1 for
``won`` and -1 otherwise.

    python scripts/encode_krvskp.py kr-vs-kp.data kr-vs-kp.csv
"""

import argparse
import csv
import sys


def encode(rows):
    width = len(rows[0])
    codes = []
    for j in range(width - 1):
        values = sorted({r[j] for r in rows})
        codes.append({v: i for i, v in enumerate(values)})
    out = []
    for r in rows:
        out.append([codes[j][r[j]] for j in range(width - 1)] + [1 if r[-1].strip() == "won" else -1])
    return out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("source")
    p.add_argument("target")
    args = p.parse_args(argv)
    with open(args.source, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows or len({len(r) for r in rows}) != 1:
        sys.exit("input is empty or has rows of different lengths")
    with open(args.target, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(encode(rows))


if __name__ == "__main__":
    main()
