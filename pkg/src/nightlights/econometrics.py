"""Annual series, the lights-GDP regression, and base-year indexing.

GDP is modelled as a line in the lights statistic,

    gdp = beta0 + beta1 * lights

fitted over the years the two series share.  Series travel as two-column CSV
files (``year,value`` header, LF line endings); evaluation reports add a
predicted and residual column plus a trailing ``# mse=`` comment line.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, TextIO

import numpy as np

from .errors import DegenerateDataError, NightlightsError
from .regression import LinearFit, fit_ols, mse


@dataclass(frozen=True)
class AnnualSeries:
    """Ordered year -> value map; years strictly increasing, values finite."""

    years: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        years = np.array(self.years, dtype=np.int64, copy=True)
        values = np.array(self.values, dtype=np.float64, copy=True)
        if years.ndim != 1 or values.ndim != 1 or years.size != values.size:
            raise NightlightsError("series years and values must be 1-D and the same length")
        if years.size == 0:
            raise NightlightsError("series must contain at least one year")
        if np.any(np.diff(years) <= 0):
            raise NightlightsError("series years must be strictly increasing and unique")
        if not np.all(np.isfinite(values)):
            raise NightlightsError("series values must be finite")
        years.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, float]) -> "AnnualSeries":
        return cls.from_pairs(mapping.items())

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]]) -> "AnnualSeries":
        items = sorted((int(y), float(v)) for y, v in pairs)
        years = [y for y, _ in items]
        if len(set(years)) != len(years):
            raise NightlightsError("duplicate year in series")
        return cls(years=np.array(years, dtype=np.int64),
                   values=np.array([v for _, v in items], dtype=np.float64))

    def get(self, year: int) -> float:
        idx = np.searchsorted(self.years, year)
        if idx >= self.years.size or self.years[idx] != year:
            raise NightlightsError(f"year {year} not in series")
        return float(self.values[idx])

    def items(self) -> list[tuple[int, float]]:
        return [(int(y), float(v)) for y, v in zip(self.years, self.values)]

    def __len__(self) -> int:
        return int(self.years.size)


@dataclass(frozen=True)
class GDPModel:
    """Fitted lights-to-GDP line plus the years it was trained on."""

    fit: LinearFit
    training_years: tuple[int, ...]

    @property
    def beta0(self) -> float:
        return self.fit.intercept

    @property
    def beta1(self) -> float:
        return self.fit.slope


@dataclass(frozen=True)
class EvaluationReport:
    """Per-year (year, actual, predicted, residual) rows and their MSE."""

    rows: tuple[tuple[int, float, float, float], ...]
    mse: float


def align(a: AnnualSeries, b: AnnualSeries) -> list[tuple[int, float, float]]:
    """(year, a_value, b_value) over the years both series contain, ascending."""
    common, ia, ib = np.intersect1d(a.years, b.years, return_indices=True)
    if common.size == 0:
        raise NightlightsError("series share no years")
    return [
        (int(y), float(a.values[i]), float(b.values[j]))
        for y, i, j in zip(common, ia, ib)
    ]


def fit_gdp_model(lights: AnnualSeries, gdp: AnnualSeries) -> GDPModel:
    """Fit gdp = beta0 + beta1 * lights over the shared years (at least 3)."""
    aligned = align(lights, gdp)
    if len(aligned) < 3:
        raise DegenerateDataError(f"GDP fit needs at least 3 aligned years, got {len(aligned)}")
    years = [y for y, _, _ in aligned]
    fit = fit_ols([l for _, l, _ in aligned], [g for _, _, g in aligned])
    return GDPModel(fit=fit, training_years=tuple(years))


def predict_gdp(model: GDPModel, light: float) -> float:
    return float(model.beta0 + model.beta1 * float(light))


def evaluate(model: GDPModel, lights: AnnualSeries, gdp: AnnualSeries) -> EvaluationReport:
    """Apply a fitted model year by year and report residuals and MSE."""
    aligned = align(lights, gdp)
    rows = []
    for year, light, actual in aligned:
        predicted = predict_gdp(model, light)
        rows.append((year, actual, predicted, actual - predicted))
    report_mse = mse([r[1] for r in rows], [r[2] for r in rows])
    return EvaluationReport(rows=tuple(rows), mse=report_mse)


def index_to_base(series: AnnualSeries, base_year: int) -> AnnualSeries:
    """Divide the whole series by its base-year value (base year becomes 1.0)."""
    base = series.get(base_year)
    if base == 0.0:
        raise NightlightsError(f"cannot index on zero value at base year {base_year}")
    return AnnualSeries(years=series.years, values=series.values / base)


# ---------------------------------------------------------------------------
# CSV formats
# ---------------------------------------------------------------------------

def series_to_text(series: AnnualSeries) -> str:
    lines = ["year,value"]
    lines += [f"{y},{v!r}" for y, v in series.items()]
    return "\n".join(lines) + "\n"


def series_from_text(text: str) -> AnnualSeries:
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows or [c.strip() for c in rows[0]] != ["year", "value"]:
        raise NightlightsError("series CSV must start with a 'year,value' header")
    pairs = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise NightlightsError(f"series CSV line {lineno}: expected 2 columns, got {len(row)}")
        try:
            pairs.append((int(row[0]), float(row[1])))
        except ValueError:
            raise NightlightsError(f"series CSV line {lineno}: unparseable row {row!r}") from None
    if not pairs:
        raise NightlightsError("series CSV has no data rows")
    return AnnualSeries.from_pairs(pairs)


def read_series(source: str | Path | TextIO) -> AnnualSeries:
    if hasattr(source, "read"):
        return series_from_text(source.read())
    return series_from_text(Path(source).read_text())


def write_series(series: AnnualSeries, target: str | Path | TextIO) -> None:
    text = series_to_text(series)
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", newline="") as fh:
            fh.write(text)


def report_to_text(report: EvaluationReport) -> str:
    lines = ["year,actual,predicted,residual"]
    lines += [f"{y},{a!r},{p!r},{r!r}" for y, a, p, r in report.rows]
    lines.append(f"# mse={report.mse!r}")
    return "\n".join(lines) + "\n"


def write_report(report: EvaluationReport, target: str | Path | TextIO) -> None:
    text = report_to_text(report)
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", newline="") as fh:
            fh.write(text)
