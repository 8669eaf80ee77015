"""SVG line charts of pattern cuts."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_COLORS = {180: "tab:red", 164: "tab:red", 150: "tab:green", 134: "tab:green", 110: "tab:blue", 72: "tab:orange", 50: "tab:cyan"}
_FIXED = {"Cont": "black", "continuous": "black", "3bit": "tab:red", "2bit": "tab:green", "1bit": "tab:blue"}


def _style(label: str) -> dict:
    if label in _FIXED:
        return {"color": _FIXED[label], "linestyle": "-"}
    digits = "".join(ch for ch in label if ch.isdigit())
    color = _COLORS.get(int(digits), None) if digits else None
    return {"color": color, "linestyle": "--" if label.startswith(("G", "E")) else "-"}


def plot_cuts(
    theta_deg: np.ndarray,
    curves: Mapping[str, np.ndarray],
    path,
    title: str = "",
    target_deg: float | None = None,
    ylim: tuple[float, float] | None = (10.0, 45.0),
    provenance: str | None = None,
) -> Path:
    """Overlay dB curves against the reflection angle and save as SVG."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": "rismask", "font.size": 10}):
        fig, ax = plt.subplots(figsize=(8, 5))
        for label, db in curves.items():
            ax.plot(theta_deg, db, label=label, linewidth=1.4, **_style(label))
        if target_deg is not None:
            ax.axvline(target_deg, color="0.6", linewidth=0.8, linestyle=":")
        ax.set_xlim(float(theta_deg[0]), float(theta_deg[-1]))
        if ylim is not None:
            ax.set_ylim(*ylim)
        ax.set_xlabel(r"Reflection angle $\theta_r$ [deg]")
        ax.set_ylabel("Amplitude [dB]")
        ax.grid(True, which="major", alpha=0.4)
        ax.legend(loc="upper left", bbox_to_anchor=(1.01, 1.0), fontsize=9)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        meta = {"Date": None, "Creator": "rismask"}
        if provenance:
            meta["Description"] = provenance
        fig.savefig(path, format="svg", metadata=meta)
        plt.close(fig)
    return path
