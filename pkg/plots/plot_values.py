"""Plot running-value curves from match trace CSVs.

Usage:
    plot-values --out FIG.png CSV[:LABEL] [CSV[:LABEL] ...]

Each positional argument names a trace CSV, optionally suffixed with a
display label after the last ':'. The traces are the ones the game
simulator's CLI writes: a header line followed by one row per step, with a
step-index column `t` and running-average payoff columns such as `u1_avg`
and `u2_avg`. This tool reads those files as plain CSV; it does not import
the simulator.

Long traces are thinned to at most --max-points points for plotting, always
keeping the first and the exact final point, so the end of a curve equals
the file's final running average bit for bit.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def parse_series_arg(text: str) -> tuple[str, str]:
    """Split 'PATH[:LABEL]' on the last colon; default label is the stem."""
    path, sep, label = text.rpartition(":")
    if not sep or not path:
        path, label = text, ""
    if not label:
        label = os.path.splitext(os.path.basename(path))[0]
    return path, label


def load_series(path: str, column: str) -> tuple[np.ndarray, np.ndarray]:
    """Read (t, column) from a trace CSV.

    Raises ValueError naming the column when the file lacks it.
    """
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        fields = reader.fieldnames or []
        for needed in ("t", column):
            if needed not in fields:
                raise ValueError(
                    f"column {needed!r} not found in {path} (columns: {', '.join(fields)})"
                )
        t, v = [], []
        for row in reader:
            t.append(float(row["t"]))
            v.append(float(row[column]))
    if not t:
        raise ValueError(f"no data rows in {path}")
    return np.asarray(t), np.asarray(v)


def downsample(t: np.ndarray, v: np.ndarray, max_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Thin to at most max_points indices, keeping the first and exact last."""
    if max_points < 2:
        raise ValueError(f"max_points must be >= 2, got {max_points}")
    n = len(t)
    if n <= max_points:
        return t, v
    idx = np.unique(np.linspace(0, n - 1, max_points).round().astype(int))
    return t[idx], v[idx]


def build_figure(series: list[tuple[str, np.ndarray, np.ndarray]], title: str | None = None):
    """series: (label, t, value) triples, already downsampled."""
    fig, ax = plt.subplots(figsize=(8, 5))
    for label, t, v in series:
        ax.plot(t, v, label=label, linewidth=1.4)
    ax.set_xlabel("time")
    ax.set_ylabel("value")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    return fig, ax


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-values",
        description="Plot running-value curves from trace CSVs.",
    )
    parser.add_argument("inputs", nargs="+", metavar="CSV[:LABEL]",
                        help="trace CSV, optionally with a display label")
    parser.add_argument("--out", required=True, help="output figure path (e.g. fig.png)")
    parser.add_argument("--column", default="u1_avg",
                        help="running-average column to plot (default u1_avg)")
    parser.add_argument("--max-points", type=int, default=2000,
                        help="downsample each curve to at most this many points")
    parser.add_argument("--title", help="optional figure title")
    args = parser.parse_args(argv)

    series = []
    try:
        for item in args.inputs:
            path, label = parse_series_arg(item)
            t, v = load_series(path, args.column)
            series.append((label, *downsample(t, v, args.max_points)))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    fig, _ = build_figure(series, args.title)
    fig.savefig(args.out, dpi=150)
    plt.close(fig)
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
