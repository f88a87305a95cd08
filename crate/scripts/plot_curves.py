#!/usr/bin/env python3
"""Plot curves-v1 or pickands-v1 CSV files written by `dynex`.

    dynex closed-form --example LinkedPeriodic_3_2_2 --out lp.csv
    python3 scripts/plot_curves.py lp.csv --column D --save lp.png
"""
import argparse
import csv
from collections import defaultdict

import matplotlib.pyplot as plt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", nargs="+")
    ap.add_argument("--column", default="D")
    ap.add_argument("--save")
    args = ap.parse_args()

    series = defaultdict(lambda: ([], []))
    for path in args.csv:
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                if row["schema"] not in ("curves-v1", "pickands-v1"):
                    raise SystemExit(f"{path}: unsupported schema {row['schema']}")
                label = row.get("example") or row["model"]
                xs, ys = series[label]
                xs.append(float(row["alpha"]))
                ys.append(float(row[args.column]))

    for label, (xs, ys) in sorted(series.items()):
        plt.plot(xs, ys, label=label)
    plt.xlabel("alpha")
    plt.ylabel(args.column)
    plt.legend(fontsize="small")
    if args.save:
        plt.savefig(args.save, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
