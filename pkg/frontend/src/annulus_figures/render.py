"""The six figure kinds rendered from annulus CSV outputs.

Rendering is deterministic: fixed Agg backend, fixed style, no embedded
timestamps, inputs never mutated. Each renderer takes parsed blocks and
draws onto a fresh figure; ``render`` wires file I/O around them.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from . import csv_io  # noqa: E402
from .csv_io import SchemaError  # noqa: E402

FIGURE_KINDS = (
    "cpi_spread",
    "or_sweep",
    "fasty_bars",
    "ablation_bars",
    "sweep_curves",
    "multi_panel",
)

_STYLE = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "annulus-figures",
}

CLASS_ORDER = ("low", "medium", "high", "other")


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    format: str = "png"

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")
        if self.format not in ("png", "svg"):
            raise SchemaError(f"unsupported format {self.format!r}")
        if not self.inputs:
            raise SchemaError("at least one input CSV is required")


def _short(name: str) -> str:
    return name if len(name) <= 18 else name[:15] + "..."


def draw_cpi_spread(fig, sim):
    groups: dict[str, list[float]] = {}
    for row in sim.rows:
        if row["cpi_t"] == "":
            continue
        groups.setdefault(
            csv_io.density_class(row["circuit"]), []
        ).append(float(row["cpi_t"]))
    labels = [c for c in CLASS_ORDER if c in groups]
    data = [sorted(groups[c]) for c in labels]
    ax = fig.subplots()
    ax.boxplot(data, tick_labels=labels, showfliers=False)
    for i, values in enumerate(data, start=1):
        span = 0.28
        offsets = [
            -span / 2 + span * k / max(len(values) - 1, 1)
            for k in range(len(values))
        ]
        ax.plot(
            [i + off for off in offsets], values,
            linestyle="none", marker="o", markersize=3, alpha=0.6,
        )
    ax.set_xlabel("workload density class")
    ax.set_ylabel("CPI_T (t-steps per T instruction)")
    ax.set_title("CPI_T spread across the pool")


def draw_or_sweep(fig, sim):
    ax_cpi, ax_rho = fig.subplots(1, 2)
    circuits: dict[str, list[tuple[int, float, float]]] = {}
    for row in sim.rows:
        if row["cpi_t"] == "" or row["rho_route"] == "":
            continue
        circuits.setdefault(row["circuit"], []).append(
            (int(row["L"]), float(row["cpi_t"]), float(row["rho_route"]))
        )
    for name, points in sorted(circuits.items()):
        points.sort()
        ells = [p[0] for p in points]
        ax_cpi.plot(ells, [p[1] for p in points], marker="o",
                    label=_short(name))
        ax_rho.plot(ells, [p[2] for p in points], marker="s",
                    label=_short(name))
    for ax, ylabel, title in (
        (ax_cpi, "CPI_T (t-steps per T instruction)", "CPI_T vs outer rings"),
        (ax_rho, "rho_route (ratio)", "routing inflation vs outer rings"),
    ):
        ax.set_xlabel("outer rings (OR)")
        ax.set_ylabel(ylabel)
        ax.set_title(title)
    ax_cpi.legend(fontsize=6)


def draw_fasty_bars(fig, sim_on, sim_off):
    on = {row["circuit"]: float(row["t_total"]) for row in sim_on.rows}
    off = {row["circuit"]: float(row["t_total"]) for row in sim_off.rows}
    shared = sorted(set(on) & set(off))
    if not shared:
        raise SchemaError("fasty_bars inputs share no circuits")
    speedups = [off[name] / on[name] for name in shared]
    ax = fig.subplots()
    ax.bar(range(len(shared)), speedups)
    ax.axhline(1.0, linestyle="--", linewidth=0.8)
    ax.set_xticks(range(len(shared)))
    ax.set_xticklabels([_short(n) for n in shared], rotation=45, ha="right",
                       fontsize=6)
    ax.set_ylabel("T_total speedup (off / on, ratio)")
    ax.set_title("fast-Y speedup per workload")


def draw_ablation_bars(fig, sweep):
    param = sweep.rows[0]["param"]
    by_circuit: dict[str, dict[float, float]] = {}
    for row in sweep.rows:
        if row["metric"] != "cpi_t" or row["metric_value"] == "":
            continue
        by_circuit.setdefault(row["circuit"], {})[float(row["value"])] = (
            float(row["metric_value"])
        )
    names = sorted(by_circuit)
    changes = []
    for name in names:
        values = by_circuit[name]
        if len(values) < 2:
            raise SchemaError("ablation_bars needs two parameter values")
        baseline = values[max(values)]
        ablated = values[min(values)]
        changes.append((ablated - baseline) / baseline * 100)
    ax = fig.subplots()
    ax.bar(range(len(names)), changes)
    ax.axhline(0.0, linewidth=0.8)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels([_short(n) for n in names], rotation=45, ha="right",
                       fontsize=6)
    ax.set_ylabel("CPI_T change (%)")
    ax.set_title(f"CPI_T with {param} zeroed vs default")


def draw_sweep_curves(fig, sweep):
    param = sweep.rows[0]["param"]
    metrics = sorted({row["metric"] for row in sweep.rows})
    axes = fig.subplots(1, len(metrics))
    if len(metrics) == 1:
        axes = [axes]
    for ax, metric in zip(axes, metrics):
        per_circuit: dict[str, list[tuple[float, float]]] = {}
        for row in sweep.rows:
            if row["metric"] != metric or row["metric_value"] == "":
                continue
            per_circuit.setdefault(row["circuit"], []).append(
                (float(row["value"]), float(row["metric_value"]))
            )
        for name, points in sorted(per_circuit.items()):
            points.sort()
            ax.plot([p[0] for p in points], [p[1] for p in points],
                    marker="o", label=_short(name))
        ax.set_xlabel(param)
        ax.set_ylabel(metric)
        ax.set_title(f"{metric} vs {param}")
    axes[0].legend(fontsize=6)


def draw_multi_panel(fig, workloads, aggregate):
    ax_sd, ax_agg = fig.subplots(1, 2, width_ratios=[2, 1])
    labels = [row["workload"] for row in workloads.rows]
    slowdowns = [float(row["slowdown"]) for row in workloads.rows]
    ax_sd.bar(range(len(labels)), slowdowns)
    ax_sd.axhline(1.0, linestyle="--", linewidth=0.8)
    ax_sd.set_xticks(range(len(labels)))
    ax_sd.set_xticklabels(labels, fontsize=7)
    ax_sd.set_xlabel("workload")
    ax_sd.set_ylabel("slowdown (T_conc / T_alone, ratio)")
    ax_sd.set_title("per-workload slowdown")

    agg = aggregate.rows[0]
    names = ["mean_slowdown", "efficiency", "jain"]
    values = [float(agg[n]) for n in names]
    bars = ax_agg.bar(range(3), values)
    ax_agg.set_xticks(range(3))
    ax_agg.set_xticklabels(["mean\nslowdown", "efficiency", "Jain"],
                           fontsize=7)
    ax_agg.set_ylabel("value (ratio)")
    ax_agg.set_title("aggregate")
    for bar, value in zip(bars, values):
        ax_agg.text(bar.get_x() + bar.get_width() / 2, value,
                    f"{value:.3f}", ha="center", va="bottom", fontsize=7)


def render(spec: FigureSpec) -> Path:
    """Draw the requested figure kind and write the image file."""
    with plt.rc_context(_STYLE):
        fig = plt.figure(figsize=(7.5, 3.4) if spec.kind in (
            "or_sweep", "sweep_curves", "multi_panel",
        ) else (5.5, 3.6))
        try:
            if spec.kind == "cpi_spread":
                draw_cpi_spread(fig, csv_io.read_sim(spec.inputs[0]))
            elif spec.kind == "or_sweep":
                draw_or_sweep(fig, csv_io.read_sim(spec.inputs[0]))
            elif spec.kind == "fasty_bars":
                if len(spec.inputs) != 2:
                    raise SchemaError(
                        "fasty_bars needs two inputs: fast-Y on, fast-Y off"
                    )
                draw_fasty_bars(fig, csv_io.read_sim(spec.inputs[0]),
                                csv_io.read_sim(spec.inputs[1]))
            elif spec.kind == "ablation_bars":
                draw_ablation_bars(fig, csv_io.read_sweep(spec.inputs[0]))
            elif spec.kind == "sweep_curves":
                draw_sweep_curves(fig, csv_io.read_sweep(spec.inputs[0]))
            else:
                draw_multi_panel(fig, *csv_io.read_multi(spec.inputs[0]))
            fig.tight_layout()
            out = Path(spec.output)
            out.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(out, format=spec.format, metadata={"Date": None})
        finally:
            plt.close(fig)
    return Path(spec.output)
