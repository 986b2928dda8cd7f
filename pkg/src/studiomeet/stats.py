"""Assessment statistics for judged design schemes.

Two expert judges independently rate every scheme on a seven-point scale
across novelty, completeness and feasibility (consensual assessment). This
module ingests those ratings and produces: descriptive stats per strategy and
dimension, percent improvements, a one-tailed independent-samples t-test per
dimension (Welch's unequal-variance form with Welch-Satterthwaite degrees of
freedom), and inter-judge reliability reported both as the Pearson
correlation of the two judges' pooled scores and as ICC(2,k) — two-way
random effects, absolute agreement, average of k raters (McGraw & Wong 1996;
Shrout & Fleiss 1979).

The t-test groups are per-scheme means across judges, the standard unit for
consensual assessment.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import t as t_dist

from .errors import (
    DegenerateVariance,
    DuplicateRecord,
    EmptyInput,
    ParseError,
    RangeError,
    TooFewSamples,
    TooFewSchemes,
)

DIMENSIONS = ("novelty", "completeness", "feasibility")
STRATEGIES = (1, 2)

CSV_HEADER = ("judge", "scheme", "strategy", "novelty", "completeness", "feasibility")

#: Per-group variance substituted when both groups are constant, so the
#: direction of a pure shift still yields a (tiny) finite p instead of 0/0.
EPSILON_VARIANCE = 1e-12


@dataclass(frozen=True)
class ScoreRecord:
    """One judge's ratings of one scheme."""

    judge: str
    scheme: str
    strategy: int
    novelty: int
    completeness: int
    feasibility: int

    def score(self, dimension: str) -> int:
        return getattr(self, dimension)


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    mean: float
    sd: float
    variance: float

    def to_dict(self) -> dict[str, float]:
        return {"n": self.n, "mean": self.mean, "sd": self.sd, "variance": self.variance}


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    p: float
    degenerate: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {"t": self.t, "df": self.df, "p": self.p, "degenerate": self.degenerate}


@dataclass(frozen=True)
class ReliabilityResult:
    pearson: float
    icc2k: float

    def to_dict(self) -> dict[str, float]:
        return {"pearson": self.pearson, "icc2k": self.icc2k}


@dataclass(frozen=True)
class DimensionReport:
    per_strategy: Mapping[int, DescriptiveStats]
    percent_improvement: float
    test: TTestResult
    significant: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "per_strategy": {str(s): d.to_dict() for s, d in self.per_strategy.items()},
            "percent_improvement": self.percent_improvement,
            "t_test": self.test.to_dict(),
            "significant": self.significant,
        }


@dataclass(frozen=True)
class StatReport:
    dimensions: Mapping[str, DimensionReport]
    reliability: ReliabilityResult
    alpha: float = 0.05

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha": self.alpha,
            "dimensions": {d: r.to_dict() for d, r in self.dimensions.items()},
            "reliability": self.reliability.to_dict(),
        }


# ---------------------------------------------------------------------------
# ingestion


def ingest_scores(source: str | Path | Iterable[str]) -> list[ScoreRecord]:
    """Parse and validate the score CSV.

    Header must be exactly ``judge,scheme,strategy,novelty,completeness,
    feasibility``. Raises :class:`ParseError` (with row number) on malformed
    rows, :class:`RangeError` for scores outside 1..7, and
    :class:`DuplicateRecord` when a (judge, scheme) pair repeats.
    """
    if isinstance(source, (str, Path)):
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = list(source)
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(0, "empty file") from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise ParseError(1, f"header must be {','.join(CSV_HEADER)}")

    records: list[ScoreRecord] = []
    seen: dict[tuple[str, str], int] = {}
    scheme_strategy: dict[str, int] = {}
    for row_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise ParseError(row_no, f"expected {len(CSV_HEADER)} columns, got {len(row)}")
        judge, scheme = row[0].strip(), row[1].strip()
        if not judge or not scheme:
            raise ParseError(row_no, "judge and scheme must be non-empty")
        try:
            strategy = int(row[2])
            scores = [int(cell) for cell in row[3:6]]
        except ValueError as exc:
            raise ParseError(row_no, f"non-integer value: {exc}") from None
        if strategy not in STRATEGIES:
            raise ParseError(row_no, f"strategy must be 1 or 2, got {strategy}")
        for dim, value in zip(DIMENSIONS, scores):
            if not 1 <= value <= 7:
                raise RangeError(row_no, f"{dim}={value} outside [1,7]")
        key = (judge, scheme)
        if key in seen:
            raise DuplicateRecord(row_no, f"(judge={judge}, scheme={scheme}) already seen at row {seen[key]}")
        seen[key] = row_no
        if scheme in scheme_strategy and scheme_strategy[scheme] != strategy:
            raise ParseError(row_no, f"scheme {scheme} assigned to both strategies")
        scheme_strategy[scheme] = strategy
        records.append(ScoreRecord(judge, scheme, strategy, *scores))
    return records


# ---------------------------------------------------------------------------
# descriptive statistics


def mean_sd(values: Sequence[float]) -> DescriptiveStats:
    """Mean with sample standard deviation (n-1 denominator)."""
    if len(values) == 0:
        raise EmptyInput("mean_sd needs at least one value")
    arr = np.asarray(values, dtype=float)
    variance = float(arr.var(ddof=1)) if arr.size > 1 else 0.0
    return DescriptiveStats(n=arr.size, mean=float(arr.mean()), sd=math.sqrt(variance),
                            variance=variance)


def percent_improvement(mean_s1: float, mean_s2: float) -> float:
    """Relative gain of strategy 2 over strategy 1, in percent."""
    if mean_s1 <= 0:
        raise ValueError("mean_s1 must be positive")
    return (mean_s2 - mean_s1) / mean_s1 * 100.0


# ---------------------------------------------------------------------------
# t-test


def t_test_one_tailed(
    group1: Sequence[float],
    group2: Sequence[float],
    direction: str = "greater",
) -> TTestResult:
    """Welch's independent-samples t-test, one-tailed.

    ``direction="greater"`` tests whether group2 exceeds group1 (p is the
    upper tail of t = (mean2 - mean1) / se); ``"less"`` is the mirror. When
    both groups have zero variance the epsilon-variance rule substitutes a
    tiny per-group variance so a pure mean shift reports p < 1e-6 with the
    ``degenerate`` flag set, rather than dividing by zero.
    """
    if direction not in ("greater", "less"):
        raise ValueError("direction must be 'greater' or 'less'")
    if len(group1) < 2 or len(group2) < 2:
        raise TooFewSamples("each group needs at least two observations")
    g1 = np.asarray(group1, dtype=float)
    g2 = np.asarray(group2, dtype=float)
    n1, n2 = g1.size, g2.size
    v1 = float(g1.var(ddof=1))
    v2 = float(g2.var(ddof=1))
    degenerate = v1 == 0.0 and v2 == 0.0
    if degenerate:
        v1 = v2 = EPSILON_VARIANCE
    q1, q2 = v1 / n1, v2 / n2
    se = math.sqrt(q1 + q2)
    t = (float(g2.mean()) - float(g1.mean())) / se
    df = (q1 + q2) ** 2 / (q1**2 / (n1 - 1) + q2**2 / (n2 - 1))
    p = float(t_dist.sf(t, df))
    if direction == "less":
        p = 1.0 - p
    return TTestResult(t=t, df=df, p=p, degenerate=degenerate)


# ---------------------------------------------------------------------------
# inter-rater reliability


def inter_rater_reliability(ratings: Sequence[Sequence[float]]) -> ReliabilityResult:
    """Reliability across judges for a judges x schemes matrix.

    Returns both the Pearson correlation between the judges' pooled scores
    (mean of pairwise correlations when there are more than two judges) and
    ICC(2,k) from the two-way random-effects ANOVA decomposition. Raises
    :class:`DegenerateVariance` when a judge's ratings are constant (the
    correlation is undefined there) or when the decomposition's denominator
    MSR + (MSC - MSE)/n is not positive, where the estimator stops being a
    correlation (it can otherwise explode past 1 on near-zero between-scheme
    variance).
    """
    matrix = np.asarray(ratings, dtype=float)
    if matrix.ndim != 2:
        raise ValueError("ratings must be a 2-D judges x schemes matrix")
    n_judges, n_schemes = matrix.shape
    if n_judges < 2:
        raise TooFewSchemes("need at least two judges")
    if n_schemes < 3:
        raise TooFewSchemes("need at least three schemes")
    if np.any(matrix.var(axis=1) == 0.0):
        raise DegenerateVariance("a judge's ratings are constant; correlation undefined")

    correlations = []
    for a in range(n_judges):
        for b in range(a + 1, n_judges):
            correlations.append(float(np.corrcoef(matrix[a], matrix[b])[0, 1]))
    pearson = float(np.mean(correlations))

    # Two-way ANOVA with schemes as targets (n) and judges as raters (k).
    targets = matrix.T
    n, k = targets.shape
    grand = targets.mean()
    ms_rows = targets.mean(axis=1).var(ddof=1) * k
    ms_cols = targets.mean(axis=0).var(ddof=1) * n
    ss_total = ((targets - grand) ** 2).sum()
    ss_error = ss_total - ms_rows * (n - 1) - ms_cols * (k - 1)
    ms_error = ss_error / ((n - 1) * (k - 1))
    denominator = ms_rows + (ms_cols - ms_error) / n
    scale = max(ms_rows, ms_cols, ms_error, 1e-30)
    if denominator <= scale * 1e-9:
        raise DegenerateVariance(
            "between-scheme variance too small for ICC(2,k); the decomposition is degenerate"
        )
    icc2k = (ms_rows - ms_error) / denominator
    return ReliabilityResult(pearson=pearson, icc2k=float(icc2k))


def rating_matrix(
    records: Sequence[ScoreRecord], dimension: str | None = None
) -> tuple[list[str], list[str], list[list[int]]]:
    """Judges x schemes matrix for one dimension, or pooled over all three
    (columns ordered scheme-major, dimension-minor). Every judge must have
    rated every scheme."""
    judges = sorted({r.judge for r in records})
    schemes = sorted({r.scheme for r in records})
    by_key = {(r.judge, r.scheme): r for r in records}
    dims = [dimension] if dimension else list(DIMENSIONS)
    matrix: list[list[int]] = []
    for judge in judges:
        row: list[int] = []
        for scheme in schemes:
            record = by_key.get((judge, scheme))
            if record is None:
                raise ValueError(f"judge {judge} did not rate scheme {scheme}")
            row.extend(record.score(d) for d in dims)
        matrix.append(row)
    return judges, schemes, matrix


# ---------------------------------------------------------------------------
# full report


def scheme_means(records: Sequence[ScoreRecord], dimension: str, strategy: int) -> list[float]:
    """Per-scheme mean across judges; the observation unit for the t-test."""
    per_scheme: dict[str, list[int]] = {}
    for record in records:
        if record.strategy == strategy:
            per_scheme.setdefault(record.scheme, []).append(record.score(dimension))
    return [float(np.mean(v)) for _, v in sorted(per_scheme.items())]


def compute_report(records: Sequence[ScoreRecord], alpha: float = 0.05) -> StatReport:
    """Descriptives, improvements and significance per dimension, plus
    inter-judge reliability pooled over every scheme and dimension."""
    if not records:
        raise EmptyInput("no score records")
    dimensions: dict[str, DimensionReport] = {}
    for dim in DIMENSIONS:
        groups = {s: scheme_means(records, dim, s) for s in STRATEGIES}
        per_strategy = {s: mean_sd(groups[s]) for s in STRATEGIES if groups[s]}
        if len(per_strategy) < 2:
            raise TooFewSamples(f"dimension {dim}: both strategies need schemes")
        test = t_test_one_tailed(groups[1], groups[2], direction="greater")
        dimensions[dim] = DimensionReport(
            per_strategy=per_strategy,
            percent_improvement=percent_improvement(per_strategy[1].mean, per_strategy[2].mean),
            test=test,
            significant=test.p < alpha,
        )
    _, _, matrix = rating_matrix(records)
    reliability = inter_rater_reliability(matrix)
    return StatReport(dimensions=dimensions, reliability=reliability, alpha=alpha)


def emit_plot_data(report: StatReport) -> str:
    """CSV of (strategy, dimension, mean, sd) for the mean-with-SD plot;
    deterministic bytes for identical reports."""
    if not report.dimensions:
        raise EmptyInput("report has no dimensions")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["strategy", "dimension", "mean", "sd"])
    for strategy in STRATEGIES:
        for dim in DIMENSIONS:
            stats = report.dimensions[dim].per_strategy[strategy]
            writer.writerow([strategy, dim, f"{stats.mean:.6f}", f"{stats.sd:.6f}"])
    return buf.getvalue()
