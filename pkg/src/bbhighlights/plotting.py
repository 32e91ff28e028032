"""Figures written next to the delimited reports.

Uses the non-interactive Agg canvas and strips the ``Software`` PNG tag
so identical data produce identical bytes.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_PNG_META = {"Software": None}


def _style(ax):
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    ax.grid(True, alpha=0.3, linewidth=0.6)


def plot_k_sweep(entries: Sequence[tuple[int, float]], argmax_k: int, path, title: str = "") -> None:
    ks = [k for k, _ in entries]
    f1 = [f for _, f in entries]
    fig, ax = plt.subplots(figsize=(5, 3.2), dpi=120)
    ax.plot(ks, f1, marker="o", color="#1f5a96")
    best = dict(entries)[argmax_k]
    ax.axvline(argmax_k, color="#b33", linestyle="--", linewidth=0.8)
    ax.annotate(f"K={argmax_k}\nF1={best:.3f}", (argmax_k, best), textcoords="offset points",
                xytext=(6, -24), fontsize=8)
    ax.set_xlabel("K (plays selected)")
    ax.set_ylabel("mean F1")
    ax.set_xticks(ks)
    ax.set_ylim(0, 1.02)
    if title:
        ax.set_title(title, fontsize=10)
    _style(ax)
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)


def plot_we_curve(annotated: Sequence, selected: Iterable[int], path, title: str = "") -> None:
    """Home-team win expectancy after each play, selected plays marked."""
    selected = set(selected)
    xs = list(range(len(annotated) + 1))
    ys = [annotated[0].we_before] + [a.we_after for a in annotated]
    fig, ax = plt.subplots(figsize=(7, 3.2), dpi=120)
    ax.step(xs, ys, where="post", color="#444", linewidth=1.0)
    hx = [i + 1 for i, a in enumerate(annotated) if a.play.id in selected]
    hy = [annotated[i - 1].we_after for i in hx]
    ax.scatter(hx, hy, s=14, color="#d0602a", zorder=3, label="selected")
    ax.axhline(0.5, color="#999", linewidth=0.6, linestyle=":")
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("play")
    ax.set_ylabel("home win expectancy")
    if title:
        ax.set_title(title, fontsize=10)
    ax.legend(loc="upper left", fontsize=8, frameon=False)
    _style(ax)
    fig.tight_layout()
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)
