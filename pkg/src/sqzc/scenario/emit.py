"""CSV and SVG writers for sweeps, Wigner grids and number distributions."""
import csv
import io
import math

import numpy as np

from ..fock.wigner import WignerGrid
from .sweep import SweepResult

__all__ = [
    "DistributionTable",
    "EmitError",
    "format_value",
    "emit_csv",
    "emit_svg",
    "distribution_table",
]


class EmitError(OSError):
    pass


class DistributionTable:
    """Simulated ``P(N)`` next to the ideal squeezed vacuum of equal mean."""

    columns = ("N", "p_simulated", "p_ideal_squeezed")

    def __init__(self, simulated, ideal):
        self.simulated = np.asarray(simulated, dtype=float)
        self.ideal = np.asarray(ideal, dtype=float)

    def rows(self):
        return [(n, float(s), float(i)) for n, (s, i) in enumerate(zip(self.simulated, self.ideal))]


def distribution_table(rho2):
    from ..fock.states import (ideal_squeezed_distribution, number_distribution,
                               single_mode_moments, squeeze_for_photon_number)
    p = number_distribution(rho2)
    _, n_bar, _ = single_mode_moments(rho2)
    ideal = ideal_squeezed_distribution(squeeze_for_photon_number(max(n_bar, 0.0)), len(p))
    return DistributionTable(p, ideal)


def format_value(v):
    """Text form used in CSV cells; floats keep 17 significant digits."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "nan"
        return "%.17g" % v
    if v is None:
        return ""
    return str(v)


def _table(obj):
    if isinstance(obj, SweepResult):
        return obj.columns, [[r.get(c, "") for c in obj.columns] for r in obj.rows]
    if isinstance(obj, WignerGrid):
        return ("x", "p", "w"), obj.triples().tolist()
    if isinstance(obj, DistributionTable):
        return obj.columns, obj.rows()
    raise TypeError(f"cannot tabulate {type(obj).__name__}")


def emit_csv(obj, path):
    """Write a sweep, Wigner grid or distribution table as CSV (overwrites)."""
    columns, rows = _table(obj)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise EmitError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _figure():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    matplotlib.rcParams["svg.hashsalt"] = "sqzc"
    return plt


def _limits(values):
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return -1.0, 1.0
    lo, hi = float(finite.min()), float(finite.max())
    if hi - lo <= 1e-12 * max(1.0, abs(lo)):
        pad = 0.05 * max(abs(lo), 1.0)
        return lo - pad, hi + pad
    return lo, hi


def _heatmap(plt, x, y, z, xlabel, ylabel, zlabel):
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    lo, hi = _limits(z)
    mesh = ax.pcolormesh(x, y, z, shading="nearest", vmin=lo, vmax=hi, cmap="viridis")
    cb = fig.colorbar(mesh, ax=ax)
    cb.set_label(zlabel)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    return fig


def _sweep_figure(plt, result, quantity, reference):
    axes = result.axes
    if len(axes) == 1:
        name = axes[0].variable
        fig, ax = plt.subplots(figsize=(5.5, 4.0))
        quantities = [q for q in (quantity, "fock_" + quantity) if q in result.columns]
        if not quantities:
            quantities = [quantity]
        for label in result.variants:
            for q in quantities:
                if q not in result.columns:
                    continue
                xs = result.column(name, label)
                ys = [float(v) for v in result.column(q, label)]
                style = "o-" if q.startswith("fock_") else "-"
                ax.plot(xs, ys, style, label=f"{label} {q}")
        if reference is not None:
            ax.axhline(reference, color="k", linestyle="--", linewidth=1)
        ax.set_xlabel(name)
        ax.set_ylabel(quantity)
        ax.legend(fontsize="small")
        return fig
    if len(axes) == 2:
        label = result.variants[0]
        a, b = axes
        xs, ys = np.array(a.values()), np.array(b.values())
        z = np.array([float(v) for v in result.column(quantity, label)]).reshape(len(xs), len(ys)).T
        return _heatmap(plt, xs, ys, z, a.variable, b.variable, quantity)
    raise ValueError(f"can only plot 1-D or 2-D sweeps, got {len(axes)} axes")


def emit_svg(obj, path, *, quantity="var_min", reference=None, title=None):
    """Self-contained SVG: line plot for 1-D sweeps, heatmap for 2-D data.

    ``reference`` draws a dashed horizontal line (1-D plots only).
    """
    plt = _figure()
    if isinstance(obj, WignerGrid):
        fig = _heatmap(plt, obj.x, obj.p, obj.values, "Re alpha", "Im alpha", "W")
    elif isinstance(obj, SweepResult):
        fig = _sweep_figure(plt, obj, quantity, reference)
    elif isinstance(obj, DistributionTable):
        fig, ax = plt.subplots(figsize=(5.5, 4.0))
        N = np.arange(len(obj.simulated))
        ax.bar(N, obj.simulated, color="tab:blue", label="simulated")
        ax.bar(N, obj.ideal, fill=False, edgecolor="k", label="ideal squeezed")
        ax.set_xlabel("N")
        ax.set_ylabel("P(N)")
        ax.legend(fontsize="small")
    else:
        arr = np.asarray(obj, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"can only plot 1-D or 2-D data, got {arr.ndim}-D")
        fig = _heatmap(plt, np.arange(arr.shape[1]), np.arange(arr.shape[0]), arr, "x", "y", "value")
    if title:
        fig.axes[0].set_title(title)
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise EmitError(f"cannot write {path}: {exc.strerror or exc}") from exc
    finally:
        plt.close(fig)
