"""Report rendering: delimited summaries plus figures.

The report path writes CSV tables (byte-stable for a fixed
configuration) and matplotlib PNG figures next to them: a gallery of
the enumerated trees and the envelope class counts across caps.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .forests import (
    Forest,
    automorphism_count,
    corolla_count,
    enumerate_trees,
)


def tree_layout(F: Forest):
    """Positions for vertices, leaf tips and root tips of a level tree:
    level i at height i, elements spread by subtree width."""
    spans = [[1] * w for w in F.widths]
    for i in range(F.length):
        for v in range(F.widths[i + 1]):
            kids = [e for e in range(F.widths[i]) if F.chain[i](e) == v]
            spans[i + 1][v] = max(1, sum(spans[i][k] for k in kids))
    # x positions, computed top-down so children center under parents
    xs = [[0.0] * w for w in F.widths]
    cursor = [0.0]

    def place(level, elem, left):
        if level == 0:
            xs[0][elem] = left + spans[0][elem] / 2.0
            return
        kids = [e for e in range(F.widths[level - 1]) if F.chain[level - 1](e) == elem]
        offset = left
        for k in kids:
            place(level - 1, k, offset)
            offset += spans[level - 1][k]
        if kids:
            xs[level][elem] = sum(xs[level - 1][k] for k in kids) / len(kids)
        else:
            xs[level][elem] = left + spans[level][elem] / 2.0

    left = 0.0
    for r in range(F.widths[F.length]):
        place(F.length, r, left)
        left += spans[F.length][r]
    return xs


def draw_tree(ax, F: Forest, title: str = ""):
    xs = tree_layout(F)
    for i in range(F.length):
        for e in range(F.widths[i]):
            ax.plot([xs[i][e], xs[i + 1][F.chain[i](e)]], [i, i + 1],
                    color="black", linewidth=1)
    for e in range(F.widths[0]):
        ax.plot([xs[0][e], xs[0][e]], [-0.45, 0], color="black", linewidth=1)
    for i in range(1, F.length + 1):
        ax.scatter(xs[i], [i] * F.widths[i], s=34, color="black", zorder=3)
    for r in range(F.widths[F.length]):
        ax.plot([xs[F.length][r], xs[F.length][r]], [F.length, F.length + 0.45],
                color="black", linewidth=1)
    ax.set_title(title, fontsize=8)
    ax.set_axis_off()
    ax.set_ylim(-0.6, max(F.length + 0.6, 1.2))


def render_tree_gallery(trees, path: str, columns: int = 6):
    rows = (len(trees) + columns - 1) // columns
    fig, axes = plt.subplots(max(rows, 1), columns,
                             figsize=(2.0 * columns, 1.8 * max(rows, 1)))
    axes = axes.reshape(-1) if hasattr(axes, "reshape") else [axes]
    for ax in axes:
        ax.set_axis_off()
    for ax, F in zip(axes, trees):
        draw_tree(ax, F, title=f"v={corolla_count(F)} |Aut|={automorphism_count(F)}")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def write_tree_csv(trees, path: str):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "height", "widths", "vertices", "automorphisms", "encoding"])
        for k, F in enumerate(trees):
            from .forests import forest_encoding

            writer.writerow([
                k, F.length, " ".join(map(str, F.widths)),
                corolla_count(F), automorphism_count(F), repr(forest_encoding(F)),
            ])


def render_envelope_caps(counts_by_cap: dict, path: str, title: str):
    """counts_by_cap: {label: [(cap, count), ...]}."""
    fig, ax = plt.subplots(figsize=(5, 3.2))
    for label, series in sorted(counts_by_cap.items()):
        caps = [c for c, _ in series]
        counts = [n for _, n in series]
        ax.plot(caps, counts, marker="o", label=label)
    ax.set_xlabel("cap")
    ax.set_ylabel("classes")
    ax.set_title(title, fontsize=9)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def write_envelope_csv(rows, path: str):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["object", "cap", "strict", "exclude_empty",
                         "classes", "plain_classes", "stabilized", "inner_limit_ok"])
        for row in rows:
            writer.writerow(row)


def write_report(out_dir: str, pattern: str, max_height: int, max_width: int,
                 envelope_data=None):
    """CSV + PNG report for the enumeration window (and optionally the
    envelope class counts across caps).  Returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    trees = enumerate_trees(pattern, max_height, max_width)
    paths = []
    csv_path = os.path.join(out_dir, "trees.csv")
    write_tree_csv(trees, csv_path)
    paths.append(csv_path)
    gallery_path = os.path.join(out_dir, "tree_gallery.png")
    render_tree_gallery(trees[:48], gallery_path)
    paths.append(gallery_path)
    if envelope_data:
        rows, series = envelope_data
        env_csv = os.path.join(out_dir, "envelope.csv")
        write_envelope_csv(rows, env_csv)
        paths.append(env_csv)
        env_png = os.path.join(out_dir, "envelope_caps.png")
        render_envelope_caps(series, env_png, "envelope classes by cap")
        paths.append(env_png)
    return paths
