"""Hasse-diagram rendering (DOT text and matplotlib figures)."""

from __future__ import annotations

from .core import PoRelation, some_linear_extension
from .order import min_chain_partition


def _label(t: tuple) -> str:
    return ", ".join(str(v) for v in t)


def to_dot(r: PoRelation, name: str = "porel") -> str:
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i, t in enumerate(r.labels):
        ident = str(r.name_of(i)).replace('"', '\\"')
        text = _label(t).replace('"', '\\"')
        lines.append(f'  n{i} [label="{text}", tooltip="{ident}"];')
    for a, b in r.cover_edges():
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def levels(r: PoRelation) -> list[int]:
    """Longest-path depth of each element from the minimal elements."""
    depth = [0] * len(r)
    succ_covers: dict = {}
    for a, b in r.cover_edges():
        succ_covers.setdefault(a, []).append(b)
    for i in some_linear_extension(r):
        for b in succ_covers.get(i, ()):
            depth[b] = max(depth[b], depth[i] + 1)
    return depth


def save_hasse_figure(r: PoRelation, path: str, title: str | None = None) -> None:
    """Draw the Hasse diagram bottom-up, colouring elements by chain of a minimum chain partition."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    depth = levels(r)
    chain_of = {}
    for c, chain in enumerate(min_chain_partition(r).chains):
        for i in chain:
            chain_of[i] = c
    by_level: dict = {}
    for i, d in enumerate(depth):
        by_level.setdefault(d, []).append(i)
    pos = {}
    for d, items in by_level.items():
        items.sort(key=lambda i: (chain_of.get(i, 0), i))
        for k, i in enumerate(items):
            pos[i] = (k - (len(items) - 1) / 2, d)
    width = max((len(v) for v in by_level.values()), default=1)
    height = max(by_level, default=0) + 1
    fig, ax = plt.subplots(figsize=(max(3.0, 1.6 * width), max(2.5, 1.1 * height)))
    cmap = plt.get_cmap("tab10")
    for a, b in r.cover_edges():
        (x1, y1), (x2, y2) = pos[a], pos[b]
        ax.annotate("", xy=(x2, y2), xytext=(x1, y1), arrowprops=dict(arrowstyle="->", color="0.4", shrinkA=12, shrinkB=12))
    for i, (x, y) in pos.items():
        ax.text(
            x, y, _label(r.labels[i]), ha="center", va="center", fontsize=8,
            bbox=dict(boxstyle="round", fc=cmap(chain_of.get(i, 0) % 10), alpha=0.35),
        )
    ax.set_xlim(-width / 2 - 0.5, width / 2 + 0.5)
    ax.set_ylim(-0.7, height - 0.3)
    ax.axis("off")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
