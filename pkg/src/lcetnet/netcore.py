"""Sparse network layers and their projections.

Layers: B (patent x technology), A (paper x field), M (patent -> paper
citations), H (patent -> patent citations). Projections: technology-field
counts O~ = B'MA, technology-technology counts P~ = B'HB, their
row-stochastic forms O and P, cosine similarity of rows, and the directed
bibliographic-coupling matrices D (shared papers) and T (shared patents).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .ingest import PatentCitationTable, PatentTable
from .subset import AnalysisTable
from .vocab import LCET_ORDER, cpc4_class


@dataclass
class SparseBinaryMatrix:
    """Binary incidence matrix with row/column labels, CSR storage."""

    matrix: sp.csr_matrix
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[tuple[str, str]],
        row_labels: Sequence[str],
        col_labels: Sequence[str],
    ) -> "SparseBinaryMatrix":
        row_index = {lbl: i for i, lbl in enumerate(row_labels)}
        col_index = {lbl: j for j, lbl in enumerate(col_labels)}
        coords = sorted({(row_index[r], col_index[c]) for r, c in pairs})
        if coords:
            rows, cols = zip(*coords)
            data = np.ones(len(coords), dtype=np.int64)
        else:
            rows, cols, data = [], [], []
        mat = sp.csr_matrix(
            (data, (rows, cols)), shape=(len(row_labels), len(col_labels)), dtype=np.int64
        )
        return cls(matrix=mat, row_labels=tuple(row_labels), col_labels=tuple(col_labels))

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def entries(self) -> list[tuple[int, int]]:
        coo = self.matrix.tocoo()
        return sorted(zip(coo.row.tolist(), coo.col.tolist()))


@dataclass
class CountMatrix:
    counts: np.ndarray  # 2-d nonnegative integer array
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]

    def total(self) -> int:
        return int(self.counts.sum())


@dataclass
class ShareMatrix:
    shares: np.ndarray
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    empty_rows: frozenset[str] = frozenset()


@dataclass
class SimilarityMatrix:
    values: np.ndarray  # K x K symmetric
    labels: tuple[str, ...]
    undefined: frozenset[str] = frozenset()  # rows with no citations
    period: str = ""


@dataclass
class CouplingMatrix:
    values: np.ndarray  # K x K directed, row k normalized by diag_counts[k]
    labels: tuple[str, ...]
    diag_counts: dict[str, int] = field(default_factory=dict)
    undefined: frozenset[str] = frozenset()


@dataclass
class Layers:
    """All citation layers for one analysis slice."""

    B: SparseBinaryMatrix  # citing patents x technologies
    A: SparseBinaryMatrix  # cited papers x fields
    M: SparseBinaryMatrix  # citing patents x cited papers
    H: SparseBinaryMatrix  # citing patents x cited patents
    B_target: SparseBinaryMatrix  # cited patents x target class scheme
    tech_scheme: str = "lcet10"


def build_layers(
    analysis: AnalysisTable,
    patent_cites: PatentCitationTable,
    patents: Optional[PatentTable] = None,
    tech_scheme: str = "lcet10",
) -> Layers:
    """Construct B, A, M, H restricted to the analysis slice in force.

    tech_scheme selects the cited-side class space of the patent projection:
    "lcet10" reuses the ten-technology B (H becomes square over the citing
    patents), "cpc4" maps cited patents to their 4-digit CPC classes and
    needs the full patent table.
    """
    if tech_scheme not in ("lcet10", "cpc4"):
        raise ValueError(f"unknown tech_scheme: {tech_scheme!r}")
    patent_ids = tuple(sorted(analysis.citing_patents()))
    paper_ids = tuple(sorted(analysis.cited_papers()))
    tech_labels = tuple(str(t) for t in LCET_ORDER)
    field_labels = tuple(sorted(analysis.distinct_fields()))

    B = SparseBinaryMatrix.from_pairs(
        {(r.patent_id, str(r.lcet)) for r in analysis}, patent_ids, tech_labels
    )
    A = SparseBinaryMatrix.from_pairs(
        {(r.paper_id, r.wos_field) for r in analysis}, paper_ids, field_labels
    )
    M = SparseBinaryMatrix.from_pairs(
        {(r.patent_id, r.paper_id) for r in analysis}, patent_ids, paper_ids
    )

    citing = set(patent_ids)
    if tech_scheme == "lcet10":
        edges = {
            (e.citing_id, e.cited_id)
            for e in patent_cites
            if e.citing_id in citing and e.cited_id in citing
        }
        H = SparseBinaryMatrix.from_pairs(edges, patent_ids, patent_ids)
        B_target = B
    else:
        if patents is None:
            raise ValueError("cpc4 scheme needs the patent table for cited-side classes")
        edges = {
            (e.citing_id, e.cited_id)
            for e in patent_cites
            if e.citing_id in citing and patents.get(e.cited_id) is not None
        }
        cited_ids = tuple(sorted({c for _, c in edges}))
        class_pairs = set()
        for cid in cited_ids:
            for code in patents.get(cid).cpc_codes:
                class_pairs.add((cid, cpc4_class(code)))
        class_labels = tuple(sorted({c for _, c in class_pairs}))
        H = SparseBinaryMatrix.from_pairs(edges, patent_ids, cited_ids)
        B_target = SparseBinaryMatrix.from_pairs(class_pairs, cited_ids, class_labels)
    return Layers(B=B, A=A, M=M, H=H, B_target=B_target, tech_scheme=tech_scheme)


def _check_inner(left: SparseBinaryMatrix, right: SparseBinaryMatrix, what: str) -> None:
    if left.shape[0] != right.shape[0]:
        raise ValueError(
            f"dimension mismatch in {what}: {left.shape} versus {right.shape}"
        )


def project_tech_field(
    B: SparseBinaryMatrix, M: SparseBinaryMatrix, A: SparseBinaryMatrix
) -> CountMatrix:
    """O~ = B'MA: citations from technology k to field l.

    Evaluated as (B'M)A so the intermediate stays K x N2; never builds a
    dense patent x paper product.
    """
    _check_inner(B, M, "B'M")
    if M.shape[1] != A.shape[0]:
        raise ValueError(f"dimension mismatch in MA: {M.shape} versus {A.shape}")
    km = B.matrix.T @ M.matrix  # K x N2, citation counts per paper
    counts = np.asarray((km @ A.matrix).todense(), dtype=np.int64)
    return CountMatrix(counts=counts, row_labels=B.col_labels, col_labels=A.col_labels)


def project_tech_tech(
    B: SparseBinaryMatrix, H: SparseBinaryMatrix, B_target: SparseBinaryMatrix
) -> CountMatrix:
    """P~ = B'HB_target: citation edges from technology k1 to class k2."""
    _check_inner(B, H, "B'H")
    if H.shape[1] != B_target.shape[0]:
        raise ValueError(f"dimension mismatch in HB: {H.shape} versus {B_target.shape}")
    kh = B.matrix.T @ H.matrix
    counts = np.asarray((kh @ B_target.matrix).todense(), dtype=np.int64)
    return CountMatrix(counts=counts, row_labels=B.col_labels, col_labels=B_target.col_labels)


def normalize_rows(count: CountMatrix) -> ShareMatrix:
    """Row-stochastic form; all-zero rows stay zero and are listed as empty."""
    totals = count.counts.sum(axis=1)
    shares = np.zeros(count.counts.shape, dtype=np.float64)
    nonzero = totals > 0
    shares[nonzero] = count.counts[nonzero] / totals[nonzero, None]
    empty = frozenset(lbl for lbl, t in zip(count.row_labels, totals) if t == 0)
    return ShareMatrix(
        shares=shares,
        row_labels=count.row_labels,
        col_labels=count.col_labels,
        empty_rows=empty,
    )


def cosine_rows(shares: ShareMatrix, period: str = "") -> SimilarityMatrix:
    """Pairwise cosine similarity of share rows.

    Pairs involving an empty row get similarity 0 and the row is marked
    undefined; diagonal is exactly 1 for non-empty rows.
    """
    norms = np.linalg.norm(shares.shares, axis=1)
    nonzero = norms > 0
    unit = np.zeros_like(shares.shares)
    unit[nonzero] = shares.shares[nonzero] / norms[nonzero, None]
    sims = unit @ unit.T
    sims = (sims + sims.T) / 2.0
    np.fill_diagonal(sims, np.where(nonzero, 1.0, 0.0))
    undefined = frozenset(lbl for lbl, nz in zip(shares.row_labels, nonzero) if not nz)
    return SimilarityMatrix(
        values=sims, labels=shares.row_labels, undefined=undefined, period=period
    )


def _coupling(binary: sp.csr_matrix, labels: tuple[str, ...]) -> CouplingMatrix:
    overlap = np.asarray((binary @ binary.T).todense(), dtype=np.int64)
    diag = np.diag(overlap).astype(np.int64)
    values = np.zeros(overlap.shape, dtype=np.float64)
    nonzero = diag > 0
    values[nonzero] = overlap[nonzero] / diag[nonzero, None]
    return CouplingMatrix(
        values=values,
        labels=labels,
        diag_counts={lbl: int(d) for lbl, d in zip(labels, diag)},
        undefined=frozenset(lbl for lbl, nz in zip(labels, nonzero) if not nz),
    )


def bibcoup_paper(B: SparseBinaryMatrix, M: SparseBinaryMatrix) -> CouplingMatrix:
    """D: share of the distinct papers cited by k1 that k2 also cites."""
    _check_inner(B, M, "B'M")
    C = (B.matrix.T @ M.matrix) > 0  # K x N2 boolean
    return _coupling(C.astype(np.int64).tocsr(), B.col_labels)


def bibcoup_patent(B: SparseBinaryMatrix, H: SparseBinaryMatrix) -> CouplingMatrix:
    """T: share of the distinct patents cited by k1 that k2 also cites."""
    _check_inner(B, H, "B'H")
    S = (B.matrix.T @ H.matrix) > 0
    return _coupling(S.astype(np.int64).tocsr(), B.col_labels)


def top_k_fields(
    O: ShareMatrix, k: int = 4
) -> dict[str, tuple[list[tuple[str, float]], float]]:
    """Per technology: the k largest field shares plus the residual share.

    Ties are broken by ascending field-label order; zero shares never make
    the list, so the residual of an empty row is 0.
    """
    out: dict[str, tuple[list[tuple[str, float]], float]] = {}
    for i, row_label in enumerate(O.row_labels):
        row = O.shares[i]
        ranked = sorted(
            ((lbl, float(s)) for lbl, s in zip(O.col_labels, row) if s > 0),
            key=lambda p: (-p[1], p[0]),
        )
        top = ranked[:k]
        residual = float(sum(s for _, s in ranked[k:]))
        out[row_label] = (top, residual)
    return out


def threshold_edges(
    values: np.ndarray,
    labels: Sequence[str],
    keep_fraction: float,
    directed: bool = False,
) -> list[tuple[str, str, float]]:
    """Largest keep_fraction of off-diagonal entries, ties at the cutoff kept.

    Symmetric matrices rank unordered pairs; directed ones rank every
    ordered off-diagonal entry. Output sorted by descending weight, then
    labels.
    """
    if not 0 < keep_fraction <= 1:
        raise ValueError("keep_fraction must be in (0, 1]")
    n = len(labels)
    candidates: list[tuple[float, str, str]] = []
    for i in range(n):
        for j in range(n):
            if i == j or (not directed and j <= i):
                continue
            candidates.append((float(values[i, j]), labels[i], labels[j]))
    if not candidates:
        return []
    candidates.sort(key=lambda t: (-t[0], t[1], t[2]))
    n_keep = math.ceil(keep_fraction * len(candidates))
    cutoff = candidates[n_keep - 1][0]
    return [(a, b, w) for w, a, b in candidates if w >= cutoff]


# Flat-table export: integer counts exact, reals at 17 significant digits.

def format_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def write_matrix(path, row_labels: Sequence[str], col_labels: Sequence[str], values: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("row\tcol\tvalue\n")
        for i, r in enumerate(row_labels):
            for j, c in enumerate(col_labels):
                fh.write(f"{r}\t{c}\t{format_value(values[i, j])}\n")


def write_edges(path, edges: Iterable[tuple[str, str, float]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("source\ttarget\tweight\n")
        for a, b, w in edges:
            fh.write(f"{a}\t{b}\t{format_value(w)}\n")
