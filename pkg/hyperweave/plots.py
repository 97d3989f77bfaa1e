"""SVG rendering of pattern statistics."""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from typing import Optional, Union

import matplotlib
from matplotlib.figure import Figure

from hyperweave.errors import PlotSpecError
from hyperweave.patterns import DoiSeries, LocalityResult, PersistenceResult
from hyperweave.powerlaw import DistributionHistogram
from hyperweave.report import PatternEntry, PatternReport

logger = logging.getLogger(__name__)

LOGLOG = "loglog"
LINE = "line"

_RC = {"svg.hashsalt": "hyperweave", "svg.fonttype": "none"}


@dataclass(frozen=True)
class PlotSpec:
    """
    One plot panel.

    Attributes:
        kind: "loglog" scatter or "line" series.
        title: Panel title.
        xlabel: X axis label.
        ylabel: Y axis label.
        series: (x, y) points.
        fit: Optional (slope, intercept) overlay, y = 10**intercept * x**slope.
    """

    kind: str
    title: str
    xlabel: str
    ylabel: str
    series: tuple[tuple[float, float], ...]
    fit: Optional[tuple[float, float]] = None

    def check(self) -> None:
        if self.kind not in (LOGLOG, LINE):
            raise PlotSpecError(f"unknown plot kind {self.kind!r}")
        if not self.series:
            raise PlotSpecError(f"{self.title}: no points to plot")
        if self.kind == LOGLOG:
            bad = [(x, y) for x, y in self.series if x <= 0 or y <= 0]
            if bad:
                raise PlotSpecError(f"{self.title}: non-positive point {bad[0]} on log axes")


def emit_plot(spec: PlotSpec, path: Union[str, os.PathLike]) -> None:
    """
    Render a spec as a standalone SVG file.

    Equal specs produce identical bytes. Data points are drawn under the
    SVG id ``markers``, the overlay under ``fit``.

    Raises:
        PlotSpecError: On an empty series or a non-positive log-log point.
    """
    spec.check()
    xs = [x for x, _ in spec.series]
    ys = [y for _, y in spec.series]
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(5, 4), tight_layout=True)
        ax = fig.subplots()
        if spec.kind == LOGLOG:
            ax.set_xscale("log")
            ax.set_yscale("log")
            ax.scatter(xs, ys, s=12, gid="markers")
        else:
            ax.plot(xs, ys, marker="o", markersize=3, gid="markers")
        if spec.fit is not None:
            slope, intercept = spec.fit
            lo, hi = min(xs), max(xs)
            fx = [lo, hi] if lo != hi else [lo]
            ax.plot(fx, [10 ** intercept * x ** slope for x in fx],
                    linestyle="--", color="black", gid="fit")
        ax.set_title(spec.title)
        ax.set_xlabel(spec.xlabel)
        ax.set_ylabel(spec.ylabel)
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.debug("Rendered %s", path)


def _histogram_spec(entry: PatternEntry, hist: DistributionHistogram, label: str) -> PlotSpec:
    fit = None
    if entry.fit is not None:
        # the fit is on per-value density; scale back to counts
        fit = (entry.fit.slope, entry.fit.intercept + math.log10(hist.total))
    return PlotSpec(LOGLOG, f"{entry.key} {entry.name}", label, "count",
                    tuple((float(v), float(c)) for v, c in hist.pairs()), fit)


def pattern_plot_spec(entry: PatternEntry) -> Optional[PlotSpec]:
    """Plot spec of one report entry, or None when there is nothing to draw."""
    stat = entry.statistic
    if stat is None:
        return None
    labels = {"P1": "degree", "P2": "hyperedge size", "P3": "intersection size",
              "P5": "group degree", "P7": "inter-event gap"}
    if isinstance(stat, PersistenceResult):
        stat = stat.histogram
    if isinstance(stat, DistributionHistogram):
        return _histogram_spec(entry, stat, labels[entry.key]) if len(stat) else None
    if isinstance(stat, LocalityResult):
        return PlotSpec(LINE, f"{entry.key} {entry.name}", "edge index", "reuse fraction",
                        tuple((float(t), float(f)) for t, f in stat.series))
    if isinstance(stat, DoiSeries):
        return PlotSpec(LINE, f"{entry.key} {entry.name}", "edges", "DoI", stat.points)
    points = tuple((float(r), float(s)) for r, s in enumerate(stat, start=1) if s > 0)
    if not points:
        return None
    fit = (entry.fit.slope, entry.fit.intercept) if entry.fit else None
    return PlotSpec(LOGLOG, f"{entry.key} {entry.name}", "rank", "singular value", points, fit)


def write_report_plots(report: PatternReport, directory: Union[str, os.PathLike]) -> list[str]:
    """Write one SVG per drawable pattern, named like its CSV."""
    os.makedirs(directory, exist_ok=True)
    written = []
    for entry in report.entries:
        spec = pattern_plot_spec(entry)
        if spec is None:
            continue
        path = os.path.join(directory, f"{entry.key}_{entry.name}.svg")
        emit_plot(spec, path)
        written.append(path)
    return written
