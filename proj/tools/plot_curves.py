#!/usr/bin/env python3
"""Render gain/sensitivity CSVs produced by mrid (optional helper).

Usage: plot_curves.py out.png curve1.csv [curve2.csv ...]

Curves use the k,freq_hz,value,value_db,provenance,flag schema; flagged rows
are dropped. Requires matplotlib.
"""
import csv
import sys


def read_curve(path):
    freqs, vals = [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            if int(float(row["flag"])) != 0:
                continue
            freqs.append(float(row["freq_hz"]))
            vals.append(float(row["value_db"]))
    return freqs, vals


def main():
    if len(sys.argv) < 3:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = sys.argv[1]
    fig, ax = plt.subplots(figsize=(9, 4.5))
    for path in sys.argv[2:]:
        freqs, vals = read_curve(path)
        ax.plot(freqs, vals, label=path, linewidth=1.0)
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel("magnitude [dB]")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
