"""Figures for CLI reports, rendered off-screen with the Agg backend."""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import List, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _family(cid: str) -> str:
    return cid.split(".", 1)[0]


def plot_report(report, path) -> Path:
    """Stacked PASS/FAIL counts per check family."""
    passed, failed = Counter(), Counter()
    for r in report.records:
        (passed if r.passed else failed)[_family(r.id)] += 1
    fams = sorted(set(passed) | set(failed))
    fig, ax = plt.subplots(figsize=(max(6, 0.7 * len(fams) + 2), 4))
    xs = range(len(fams))
    p = [passed[f] for f in fams]
    ax.bar(xs, p, color="#4c8c4a", label="PASS")
    ax.bar(xs, [failed[f] for f in fams], bottom=p, color="#b8433a", label="FAIL")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(fams, rotation=40, ha="right")
    ax.set_ylabel("checks")
    ax.legend(frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_filtration(histories: Sequence[Tuple[str, List[int]]], target: int, path) -> Path:
    """Classes of V_R modulo the relations against the filtration radius R."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, counts in histories:
        ax.plot(range(len(counts)), counts, marker="o", label=label)
    ax.axhline(target, color="0.5", ls="--", lw=1)
    ax.set_xlabel("radius R")
    ax.set_ylabel("classes in V_R")
    if len(histories) <= 8:
        ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
