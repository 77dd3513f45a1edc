"""Perturbation variants of the network analysis and matrix comparisons.

Two knobs: raising the confidence-score floor (e.g. keeping only CS=10
links) and dropping co-classified patents (any patent carrying two or more
technology tags after splitting).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ingest import PatentCitationTable, PatentTable
from .metrics import Window
from .netcore import (
    SimilarityMatrix,
    build_layers,
    cosine_rows,
    normalize_rows,
    project_tech_field,
    project_tech_tech,
)
from .subset import (
    AnalysisTable,
    AssignmentTable,
    DEFAULT_MIN_CONFIDENCE,
)


@dataclass(frozen=True)
class VariantSpec:
    name: str
    min_confidence: int = DEFAULT_MIN_CONFIDENCE
    drop_coclassified: bool = False
    periods: tuple[Window, ...] = ()

    def __post_init__(self):
        if not 1 <= self.min_confidence <= 10:
            raise ValueError("min_confidence must be in [1, 10]")


@dataclass
class VariantOutput:
    spec: VariantSpec
    # per period label, for each tech scheme
    similarity_sci: dict[str, SimilarityMatrix] = field(default_factory=dict)
    similarity_tech: dict[str, SimilarityMatrix] = field(default_factory=dict)
    o_counts: dict[str, np.ndarray] = field(default_factory=dict)
    o_labels: dict[str, tuple] = field(default_factory=dict)
    empty_periods: list[str] = field(default_factory=list)


def apply_variant(
    analysis: AnalysisTable,
    assignments: AssignmentTable,
    spec: VariantSpec,
) -> AnalysisTable:
    """Filter the analysis table per the variant, leaving the baseline intact."""
    rows = [r for r in analysis if r.confidence >= spec.min_confidence]
    if spec.drop_coclassified:
        tags: dict[str, set] = {}
        for a in assignments:
            tags.setdefault(a.patent_id, set()).add(a.lcet)
        rows = [r for r in rows if len(tags.get(r.patent_id, ())) <= 1]
    return AnalysisTable(rows=rows)


def run_variant(
    spec: VariantSpec,
    analysis: AnalysisTable,
    assignments: AssignmentTable,
    patent_cites: PatentCitationTable,
    patents: Optional[PatentTable] = None,
) -> VariantOutput:
    """Redo the similarity networks with the variant's filters in force.

    An empty period is reported, not fatal.
    """
    filtered = apply_variant(analysis, assignments, spec)
    out = VariantOutput(spec=spec)
    for window in spec.periods:
        label = window.label()
        slice_ = filtered.restricted(window.start_year, window.end_year)
        if len(slice_) == 0:
            out.empty_periods.append(label)
            continue
        scheme = "cpc4" if patents is not None else "lcet10"
        layers = build_layers(slice_, patent_cites, patents=patents, tech_scheme=scheme)
        o_tilde = project_tech_field(layers.B, layers.M, layers.A)
        O = normalize_rows(o_tilde)
        out.o_counts[label] = o_tilde.counts
        out.o_labels[label] = (o_tilde.row_labels, o_tilde.col_labels)
        out.similarity_sci[label] = cosine_rows(O, period=label)
        p_tilde = project_tech_tech(layers.B, layers.H, layers.B_target)
        out.similarity_tech[label] = cosine_rows(normalize_rows(p_tilde), period=label)
    return out


@dataclass
class ComparisonReport:
    period: str
    labels: tuple[str, ...]
    combined: np.ndarray  # upper triangle baseline, lower triangle variant
    max_abs_delta: float
    rank_agreement: dict[str, float]  # per-row concordance of ordered pairs


def _row_rank_agreement(base_row: np.ndarray, var_row: np.ndarray, skip: int) -> float:
    """Fraction of off-diagonal ordered pairs ranked the same way in both rows."""
    idx = [i for i in range(len(base_row)) if i != skip]
    pairs = concordant = 0
    for a_i in range(len(idx)):
        for b_i in range(a_i + 1, len(idx)):
            a, b = idx[a_i], idx[b_i]
            d_base = base_row[a] - base_row[b]
            d_var = var_row[a] - var_row[b]
            pairs += 1
            if d_base * d_var > 0 or (d_base == 0 and d_var == 0):
                concordant += 1
    return concordant / pairs if pairs else 1.0


def compare(baseline: SimilarityMatrix, variant: SimilarityMatrix) -> ComparisonReport:
    """Combined-triangle matrix plus delta statistics.

    The upper triangle holds the baseline similarities, the lower triangle
    the variant's, mirroring the robustness-figure tabulation.
    """
    if baseline.labels != variant.labels:
        raise ValueError("label mismatch between baseline and variant")
    if baseline.period and variant.period and baseline.period != variant.period:
        raise ValueError("period mismatch between baseline and variant")
    n = len(baseline.labels)
    combined = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i < j:
                combined[i, j] = baseline.values[i, j]
            elif i > j:
                combined[i, j] = variant.values[i, j]
            else:
                combined[i, j] = baseline.values[i, j]
    delta = np.abs(baseline.values - variant.values)
    rank_agreement = {
        lbl: _row_rank_agreement(baseline.values[i], variant.values[i], i)
        for i, lbl in enumerate(baseline.labels)
    }
    return ComparisonReport(
        period=baseline.period,
        labels=baseline.labels,
        combined=combined,
        max_abs_delta=float(delta.max()) if n else 0.0,
        rank_agreement=rank_agreement,
    )
