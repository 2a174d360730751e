"""PNG figures and CSV tables for reports.

Figures are drawn with matplotlib's Agg backend, so nothing needs a
display.  Every figure is paired with a CSV holding the plotted numbers.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bundle import slice_table  # noqa: E402
from .metrics import volume_report  # noqa: E402
from .slicing import uniform_partition  # noqa: E402


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def slice_count_curve(diam: float, epsilons, safety: float = 0.999):
    """``(eps, slices, step)`` rows for the uniform partition."""
    rows = []
    for eps in epsilons:
        part = uniform_partition(diam, eps, safety)
        rows.append((float(eps), part.slices, part.width))
    return rows


def write_curve(out_dir, diam: float = 5.0, epsilons=None, safety: float = 0.999):
    """Slice count against epsilon.  Returns the written paths."""
    if epsilons is None:
        epsilons = [k / 10 for k in range(1, 11)]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = slice_count_curve(diam, epsilons, safety)
    csv_path = out / "slice_curve.csv"
    _write_csv(csv_path, ("epsilon", "slices", "step"), rows)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot([r[0] for r in rows], [r[1] for r in rows], marker="o")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("number of slices")
    ax.set_title(f"slice count, diam = {diam:g}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    png_path = out / "slice_curve.png"
    fig.savefig(png_path, dpi=100)
    plt.close(fig)
    return [csv_path, png_path]


def write_report(fsm, out_dir):
    """Per-slice summary and component volumes as CSV, plus one PNG."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = slice_table(fsm)
    slices_csv = out / "slices.csv"
    _write_csv(slices_csv, ("slice", "theta", "triangles", "bounded_components", "bounded_area"),
               rows)

    vols = volume_report(fsm.graph)
    volumes_csv = out / "volumes.csv"
    _write_csv(volumes_csv, ("component", "volume", "vertices"),
               [(v.component, "infinite" if v.infinite else v.volume, v.vertices) for v in vols])

    theta = [r[1] for r in rows]
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    top.step(theta, [r[3] for r in rows], where="post")
    top.set_ylabel("bounded components")
    top.grid(True, alpha=0.3)
    bottom.step(theta, [r[4] for r in rows], where="post", color="tab:orange")
    bottom.set_ylabel("bounded free area")
    bottom.set_xlabel("theta (rad)")
    bottom.set_xlim(0, 2 * math.pi)
    bottom.grid(True, alpha=0.3)
    finite = [v for v in vols if not v.infinite]
    top.set_title(f"{fsm.partition.slices} slices, {fsm.graph.n_components} components "
                  f"({len(finite)} bounded)")
    fig.tight_layout()
    png = out / "slices.png"
    fig.savefig(png, dpi=100)
    plt.close(fig)
    return [slices_csv, volumes_csv, png]
