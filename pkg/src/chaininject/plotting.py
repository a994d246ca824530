"""Render sweep rows to PNG figures next to the CSV output."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _num(row: dict, key: str) -> float | None:
    value = row.get(key, "")
    if value in ("", None):
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        return None


def _label(row: dict) -> str:
    n = int(row["n_chains"])
    scheme = "single" if n == 1 else "multiple"
    return f"{scheme}, n_e={row['n_e']}"


def _series(rows, x_key, y_key, group):
    out: dict[str, tuple[list[float], list[float]]] = {}
    for row in rows:
        if not str(row.get("status", "ok")).startswith("ok"):
            continue
        x, y = _num(row, x_key), _num(row, y_key)
        if x is None or y is None or y <= 0:
            continue
        xs, ys = out.setdefault(group(row), ([], []))
        xs.append(x)
        ys.append(y)
    return out


def plot_rows(rows: list[dict], experiment: str, path: str | Path) -> Path:
    """Draw the figure for ``experiment`` and write it to ``path``."""
    path = Path(path)
    rows = [r for r in rows if r.get("method") == "analytic" or experiment == "simulate"]
    if experiment == "fig2a":
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        for label, (xs, ys) in sorted(_series(rows, "d", "infidelity", _label).items()):
            ax.semilogy(xs, ys, "o-", ms=4, label=label)
        ax.set_xlabel("code distance d")
        ax.set_ylabel("logical infidelity")
    elif experiment == "fig4":
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        for label, (xs, ys) in sorted(_series(rows, "infidelity", "overhead", _label).items()):
            ax.loglog(xs, ys, "o-", ms=4, label=label)
        ax.set_xlabel("logical infidelity")
        ax.set_ylabel("overhead (qubit-time)")
    elif experiment in ("fig2b", "fig3", "custom"):
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        group = lambda r: f"d={r['d']}, {_label(r)}"  # noqa: E731
        for label, (xs, ys) in sorted(_series(rows, "theta_L", "infidelity", group).items()):
            ax.loglog(xs, ys, "o-", ms=3, label=label)
        ax.set_xlabel("target logical angle (rad)")
        ax.set_ylabel("logical infidelity")
    else:
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        group = lambda r: f"{r['d']} {r['method']}"  # noqa: E731
        for label, (xs, ys) in sorted(_series(rows, "theta_L", "P_t", group).items()):
            ax.plot(xs, ys, "o", ms=4, label=label)
        ax.set_xlabel("target logical angle (rad)")
        ax.set_ylabel("acceptance probability")
    ax.set_title(experiment)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
