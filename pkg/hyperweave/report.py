"""Pattern reports: all eight statistics of a hypergraph, optionally scored against a reference."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Optional, Union

import numpy as np
import pandas as pd

from hyperweave.errors import FitUndefinedError, UndefinedMetricError
from hyperweave.hypergraph import TemporalHypergraph
from hyperweave.patterns import (DoiSeries, LocalityResult, PersistenceResult,
                                 degree_distribution, density_of_interactions_series,
                                 group_degree_distribution, hyperedge_size_distribution,
                                 intersecting_pair_counts, intersection_size_distribution,
                                 persistence_interevent_distribution, relative_checkpoints,
                                 singular_value_spectrum, temporal_locality)
from hyperweave.powerlaw import (DistributionHistogram, PowerLawFit, fit_loglog_line,
                                 fit_power_law, goodness_of_fit_gamma)

logger = logging.getLogger(__name__)

PATTERN_NAMES: dict[str, str] = {
    "P1": "degree",
    "P2": "hyperedge_size",
    "P3": "intersection_size",
    "P4": "singular_values",
    "P5": "group_degree",
    "P6": "temporal_locality",
    "P7": "persistence",
    "P8": "density_of_interactions",
}

GAMMA_PATTERNS = ("P1", "P2", "P3", "P4", "P5", "P7")
TEMPORAL_PATTERNS = ("P6", "P7", "P8")
NO_TIMESTAMPS = "hypergraph has no timestamps"


@dataclass(frozen=True)
class ReportSettings:
    locality_window: int = 10
    group_size: int = 2
    spectrum_k: int = 50
    doi_checkpoints: int = 10

    @classmethod
    def from_config(cls, config: Any) -> "ReportSettings":
        """Pick the report fields off any object that carries them, GenerationConfig included."""
        defaults = cls()
        return cls(**{
            name: getattr(config, name, getattr(defaults, name))
            for name in ("locality_window", "group_size", "spectrum_k", "doi_checkpoints")
        })


@dataclass(frozen=True)
class PatternEntry:
    """
    One pattern of a report.

    Attributes:
        key: Pattern key, "P1" to "P8".
        statistic: Raw statistic of the generated hypergraph, absent when it
            could not be computed.
        fit: Power-law or log-log fit of the statistic, where one applies.
        skipped: Reason the pattern was skipped, absent otherwise.
        reference_fit: Fit of the same statistic on the reference hypergraph.
        gamma: Slope agreement score against the reference.
        distance: Series distance against the reference (P6, P8).
        note: Why a comparison value is missing although the pattern ran.
    """

    key: str
    statistic: Any = None
    fit: Optional[PowerLawFit] = None
    skipped: Optional[str] = None
    reference_fit: Optional[PowerLawFit] = None
    gamma: Optional[float] = None
    distance: Optional[float] = None
    note: Optional[str] = None

    @property
    def name(self) -> str:
        return PATTERN_NAMES[self.key]

    @property
    def status(self) -> str:
        return "skipped" if self.skipped else "ok"


@dataclass(frozen=True)
class PatternReport:
    entries: tuple[PatternEntry, ...]
    compared: bool = False
    settings: ReportSettings = field(default_factory=ReportSettings)

    def entry(self, key: str) -> PatternEntry:
        for e in self.entries:
            if e.key == key:
                return e
        raise KeyError(key)

    def gammas(self) -> dict[str, float]:
        return {e.key: e.gamma for e in self.entries if e.gamma is not None}

    @property
    def average_gamma(self) -> Optional[float]:
        """Unweighted mean of the available gamma scores."""
        values = list(self.gammas().values())
        return float(np.mean(values)) if values else None


def _spectrum_fit(spectrum: list[float]) -> PowerLawFit:
    return fit_loglog_line(range(1, len(spectrum) + 1), spectrum)


def _measure(
    key: str, graph: TemporalHypergraph, settings: ReportSettings
) -> tuple[Any, Optional[PowerLawFit], Optional[str]]:
    """Compute one pattern; returns (statistic, fit, note on a missing fit)."""
    if key in TEMPORAL_PATTERNS and not graph.temporal:
        raise UndefinedMetricError(NO_TIMESTAMPS)

    histogram_patterns: dict[str, Callable[[], DistributionHistogram]] = {
        "P1": lambda: degree_distribution(graph),
        "P2": lambda: hyperedge_size_distribution(graph),
        "P3": lambda: intersection_size_distribution(graph),
        "P5": lambda: group_degree_distribution(graph, settings.group_size),
    }
    if key in histogram_patterns:
        hist = histogram_patterns[key]()
        try:
            return hist, fit_power_law(hist), None
        except FitUndefinedError as exc:
            return hist, None, str(exc)
    if key == "P4":
        spectrum = singular_value_spectrum(graph, settings.spectrum_k)
        try:
            return spectrum, _spectrum_fit(spectrum), None
        except FitUndefinedError as exc:
            return spectrum, None, str(exc)
    if key == "P6":
        return temporal_locality(graph, settings.locality_window), None, None
    if key == "P7":
        result = persistence_interevent_distribution(graph)
        return result, result.fit, None if result.fit else "no power-law fit for the gaps"
    checkpoints = relative_checkpoints(graph.m, settings.doi_checkpoints)
    if not checkpoints:
        raise UndefinedMetricError("density of interactions needs at least 2 edges")
    return density_of_interactions_series(graph, checkpoints), None, None


def doi_at_fractions(graph: TemporalHypergraph, count: int = 10) -> list[float]:
    """DoI at every one of ``count`` relative checkpoints, repeats included."""
    if graph.m < 2:
        raise UndefinedMetricError("density of interactions needs at least 2 edges")
    cumulative = intersecting_pair_counts(graph)
    return [int(cumulative[t]) / (t * (t - 1) // 2)
            for t in relative_checkpoints(graph.m, count, distinct=False)]


def _compare(
    key: str,
    gen: PatternEntry,
    real_stat: Any,
    real_fit: Optional[PowerLawFit],
    real: TemporalHypergraph,
    generated: TemporalHypergraph,
    settings: ReportSettings,
) -> PatternEntry:
    if key == "P6":
        distance = abs(gen.statistic.mean - real_stat.mean)
        return replace(gen, distance=distance)
    if key == "P8":
        a = doi_at_fractions(real, settings.doi_checkpoints)
        b = doi_at_fractions(generated, settings.doi_checkpoints)
        return replace(gen, distance=float(np.mean(np.abs(np.subtract(a, b)))))
    entry = replace(gen, reference_fit=real_fit)
    if gen.fit is None or real_fit is None:
        side = "generated" if gen.fit is None else "reference"
        return replace(entry, note=f"no fit on the {side} hypergraph")
    try:
        return replace(entry, gamma=goodness_of_fit_gamma(real_fit, gen.fit))
    except FitUndefinedError as exc:
        return replace(entry, note=str(exc))


def pattern_report(
    real: Optional[TemporalHypergraph],
    generated: TemporalHypergraph,
    config: Any = None,
) -> PatternReport:
    """
    Measure P1 to P8 on a hypergraph and optionally score it against a reference.

    A pattern that is undefined for either hypergraph becomes a skipped
    entry with the reason; the report itself never fails on a pattern.

    Args:
        real: Reference hypergraph, or None for a plain measurement.
        generated: Hypergraph to measure.
        config: ReportSettings, GenerationConfig or None for defaults.

    Returns:
        PatternReport with one entry per pattern, in key order.
    """
    settings = config if isinstance(config, ReportSettings) else ReportSettings.from_config(config)
    entries = []
    for key in PATTERN_NAMES:
        try:
            statistic, fit, note = _measure(key, generated, settings)
        except UndefinedMetricError as exc:
            logger.warning("Skipping %s (%s): %s", key, PATTERN_NAMES[key], exc)
            entries.append(PatternEntry(key, skipped=str(exc)))
            continue
        entry = PatternEntry(key, statistic=statistic, fit=fit, note=note)
        if real is not None:
            try:
                real_stat, real_fit, _ = _measure(key, real, settings)
                entry = _compare(key, entry, real_stat, real_fit, real, generated, settings)
            except UndefinedMetricError as exc:
                logger.warning("Skipping %s comparison: reference %s", key, exc)
                entry = replace(entry, skipped=f"reference: {exc}")
        entries.append(entry)
    return PatternReport(tuple(entries), compared=real is not None, settings=settings)


def _frame(entry: PatternEntry) -> Optional[pd.DataFrame]:
    stat = entry.statistic
    if stat is None:
        return None
    if isinstance(stat, PersistenceResult):
        stat = stat.histogram
    if isinstance(stat, DistributionHistogram):
        return pd.DataFrame({"value": list(stat.values), "count": list(stat.counts)})
    if isinstance(stat, LocalityResult):
        return pd.DataFrame(stat.series, columns=["t", "reuse_fraction"])
    if isinstance(stat, DoiSeries):
        return pd.DataFrame(stat.points, columns=["t", "doi"])
    return pd.DataFrame({"rank": range(1, len(stat) + 1), "singular_value": stat})


def pattern_frames(report: PatternReport) -> dict[str, pd.DataFrame]:
    """CSV-ready table per measured pattern, keyed by file stem (e.g. ``P1_degree``)."""
    frames = {}
    for entry in report.entries:
        frame = _frame(entry)
        if frame is not None:
            frames[f"{entry.key}_{entry.name}"] = frame
    return frames


def comparison_frame(report: PatternReport) -> pd.DataFrame:
    rows = []
    for e in report.entries:
        rows.append({
            "pattern": e.key,
            "name": e.name,
            "status": e.status,
            "slope_real": e.reference_fit.slope if e.reference_fit else None,
            "slope_gen": e.fit.slope if e.fit else None,
            "gamma": e.gamma,
            "distance": e.distance,
        })
    return pd.DataFrame(rows)


def write_report_csvs(report: PatternReport, directory: Union[str, os.PathLike]) -> list[str]:
    """
    Write one CSV per measured pattern, plus ``comparison.csv`` for a comparison.

    Returns:
        Paths written, in pattern order.
    """
    os.makedirs(directory, exist_ok=True)
    written = []
    for stem, frame in pattern_frames(report).items():
        path = os.path.join(directory, f"{stem}.csv")
        frame.to_csv(path, index=False, lineterminator="\n")
        written.append(path)
    if report.compared:
        path = os.path.join(directory, "comparison.csv")
        comparison_frame(report).to_csv(path, index=False, lineterminator="\n", float_format="%.10g")
        written.append(path)
    return written


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.10g}"


def summary_lines(report: PatternReport) -> list[str]:
    """Machine-readable ``key=value`` lines describing the report."""
    lines = []
    for e in report.entries:
        prefix = e.key
        lines.append(f"{prefix}.name={e.name}")
        lines.append(f"{prefix}.status={e.status}")
        if e.skipped:
            lines.append(f"{prefix}.reason={e.skipped}")
            continue
        if e.fit is not None:
            lines.append(f"{prefix}.slope={_fmt(e.fit.slope)}")
            lines.append(f"{prefix}.r2={_fmt(e.fit.r_squared)}")
        if isinstance(e.statistic, LocalityResult):
            lines.append(f"{prefix}.mean={_fmt(e.statistic.mean)}")
        if isinstance(e.statistic, PersistenceResult):
            lines.append(f"{prefix}.burstiness={_fmt(e.statistic.burstiness)}")
        if isinstance(e.statistic, DoiSeries) and e.statistic.points:
            lines.append(f"{prefix}.final_doi={_fmt(e.statistic.points[-1][1])}")
        if report.compared:
            if e.reference_fit is not None:
                lines.append(f"{prefix}.slope_real={_fmt(e.reference_fit.slope)}")
            if e.gamma is not None:
                lines.append(f"{prefix}.gamma={_fmt(e.gamma)}")
            if e.distance is not None:
                lines.append(f"{prefix}.distance={_fmt(e.distance)}")
    if report.compared:
        lines.append(f"average_gamma={_fmt(report.average_gamma)}")
    return lines


def write_summary(
    report: PatternReport,
    path: Union[str, os.PathLike],
    extra: Optional[dict[str, Any]] = None,
) -> None:
    """Write summary lines, preceded by any extra ``key=value`` pairs."""
    lines = [f"{k}={v}" for k, v in (extra or {}).items()] + summary_lines(report)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
