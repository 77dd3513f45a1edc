"""The four-step LCET subsetting pipeline.

Step 1 selects patents carrying Y02E10/Y02E30/Y02E50 codes, step 2
disaggregates them into the ten technologies (with multi-purpose splitting
and per-(patent, technology) dedup), step 3 joins surviving science
citations, step 4 completes paper metadata and drops fieldless papers.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .ingest import (
    Location,
    Origin,
    PaperTable,
    PatentTable,
    ScienceCitationTable,
)
from .vocab import Lcet, classify_code, is_lcet_code, split_multipurpose

log = logging.getLogger(__name__)

DEFAULT_MIN_CONFIDENCE = 4  # keeps links with CS > 3

__all__ = [
    "DEFAULT_MIN_CONFIDENCE",
    "LcetAssignment",
    "AssignmentTable",
    "JoinedRow",
    "JoinedTable",
    "AnalysisRow",
    "AnalysisTable",
    "CitationFlag",
    "FlagKind",
    "select_lcet",
    "split_multipurpose",
    "join_science",
    "complete_metadata",
    "flag_implausible",
    "run_subset",
]


@dataclass(frozen=True)
class LcetAssignment:
    patent_id: str
    lcet: Lcet
    source_code: str
    via_split: bool


@dataclass
class AssignmentTable:
    assignments: list[LcetAssignment]
    unmapped: dict[str, int] = field(default_factory=dict)  # code -> occurrences

    def __len__(self) -> int:
        return len(self.assignments)

    def __iter__(self) -> Iterator[LcetAssignment]:
        return iter(self.assignments)

    def unique_patents(self) -> set[str]:
        return {a.patent_id for a in self.assignments}

    def by_patent(self) -> dict[str, list[LcetAssignment]]:
        out: dict[str, list[LcetAssignment]] = {}
        for a in self.assignments:
            out.setdefault(a.patent_id, []).append(a)
        return out

    def tags_of(self, patent_id: str) -> set[Lcet]:
        return {a.lcet for a in self.assignments if a.patent_id == patent_id}


def select_lcet(patents: PatentTable) -> AssignmentTable:
    """Steps 1+2: tag every Y02E10/30/50 patent with its technologies.

    Direct 7-digit tags win over split-generated ones when both produce the
    same (patent, technology) pair; within a pair only one assignment is
    kept, preferring the lexicographically smallest source code.
    """
    assignments: list[LcetAssignment] = []
    unmapped: dict[str, int] = {}
    for rec in patents:
        chosen: dict[Lcet, LcetAssignment] = {}
        for code in sorted(rec.cpc_codes):
            if not is_lcet_code(code):
                continue
            techs, via_split = classify_code(code)
            if not techs:
                unmapped[code] = unmapped.get(code, 0) + 1
                continue
            for tech in techs:
                cand = LcetAssignment(rec.patent_id, tech, code, via_split)
                prev = chosen.get(tech)
                if prev is None or (prev.via_split and not via_split):
                    chosen[tech] = cand
        for tech in sorted(chosen, key=lambda t: t.value):
            assignments.append(chosen[tech])
    for code, n in sorted(unmapped.items()):
        log.warning("unmapped Y02E code %s on %d patents", code, n)
    return AssignmentTable(assignments=assignments, unmapped=unmapped)


@dataclass(frozen=True)
class JoinedRow:
    patent_id: str
    lcet: Lcet
    paper_id: str
    confidence: int
    origin: Origin
    location: Location


@dataclass
class JoinedTable:
    rows: list[JoinedRow]
    min_confidence: int

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[JoinedRow]:
        return iter(self.rows)

    def citing_patents(self) -> set[str]:
        return {r.patent_id for r in self.rows}


def join_science(
    assignments: AssignmentTable,
    citations: ScienceCitationTable,
    min_confidence: int = DEFAULT_MIN_CONFIDENCE,
) -> JoinedTable:
    """Step 3: cross assignments with confidence-filtered science citations.

    A patent carrying two technologies and citing three papers yields six
    rows; patents with no surviving citation are absent.
    """
    by_patent = citations.by_patent()
    rows: list[JoinedRow] = []
    for assignment in assignments:
        for cit in by_patent.get(assignment.patent_id, ()):
            if cit.confidence < min_confidence:
                continue
            rows.append(
                JoinedRow(
                    patent_id=assignment.patent_id,
                    lcet=assignment.lcet,
                    paper_id=cit.paper_id,
                    confidence=cit.confidence,
                    origin=cit.origin,
                    location=cit.location,
                )
            )
    return JoinedTable(rows=rows, min_confidence=min_confidence)


@dataclass(frozen=True)
class AnalysisRow:
    patent_id: str
    lcet: Lcet
    paper_id: str
    confidence: int
    origin: Origin
    location: Location
    grant_year: int
    pub_year: int
    wos_field: str

    @property
    def lag(self) -> int:
        return self.grant_year - self.pub_year


@dataclass
class AnalysisTable:
    rows: list[AnalysisRow]
    dropped_fieldless: int = 0
    dropped_unknown_paper: int = 0

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[AnalysisRow]:
        return iter(self.rows)

    def distinct_fields(self) -> set[str]:
        return {r.wos_field for r in self.rows}

    def citing_patents(self) -> set[str]:
        return {r.patent_id for r in self.rows}

    def cited_papers(self) -> set[str]:
        return {r.paper_id for r in self.rows}

    def restricted(self, start_year: int, end_year: int) -> "AnalysisTable":
        """Rows whose citing patent was granted within [start_year, end_year]."""
        return AnalysisTable(rows=[r for r in self.rows if start_year <= r.grant_year <= end_year])


def complete_metadata(
    joined: JoinedTable, papers: PaperTable, patents: PatentTable
) -> AnalysisTable:
    """Step 4: attach years and fields; drop fieldless or unknown papers."""
    rows: list[AnalysisRow] = []
    dropped_fieldless = 0
    dropped_unknown = 0
    for row in joined:
        paper = papers.get(row.paper_id)
        if paper is None:
            dropped_unknown += 1
            log.info("dropping citation %s->%s: unknown paper", row.patent_id, row.paper_id)
            continue
        if paper.wos_field is None:
            dropped_fieldless += 1
            continue
        patent = patents.get(row.patent_id)
        if patent is None:
            dropped_unknown += 1
            log.info("dropping citation %s->%s: unknown patent", row.patent_id, row.paper_id)
            continue
        rows.append(
            AnalysisRow(
                patent_id=row.patent_id,
                lcet=row.lcet,
                paper_id=row.paper_id,
                confidence=row.confidence,
                origin=row.origin,
                location=row.location,
                grant_year=patent.grant_year,
                pub_year=paper.pub_year,
                wos_field=paper.wos_field,
            )
        )
    table = AnalysisTable(
        rows=rows,
        dropped_fieldless=dropped_fieldless,
        dropped_unknown_paper=dropped_unknown,
    )
    log.info(
        "analysis table: %d rows, %d fields, %d fieldless dropped, %d unknown dropped",
        len(table),
        len(table.distinct_fields()),
        dropped_fieldless,
        dropped_unknown,
    )
    return table


class FlagKind(str, enum.Enum):
    NEGATIVE_LAG = "negative_lag"
    IMPLAUSIBLE_FIELD = "implausible_field"
    LOW_CONFIDENCE = "low_confidence"


@dataclass(frozen=True)
class CitationFlag:
    patent_id: str
    paper_id: str
    flag: FlagKind
    detail: str


def flag_implausible(
    analysis: AnalysisTable,
    blocklist: Optional[dict[Lcet, set[str]]] = None,
    low_confidence_below: int = 0,
) -> list[CitationFlag]:
    """Advisory plausibility flags; never mutates or filters the analysis table.

    The blocklist maps a technology to field names considered implausible
    for it; it is empty by default so no curation is invented.
    """
    blocklist = blocklist or {}
    flags: list[CitationFlag] = []
    seen: set[tuple[str, str, FlagKind]] = set()

    def add(row: AnalysisRow, kind: FlagKind, detail: str) -> None:
        key = (row.patent_id, row.paper_id, kind)
        if key not in seen:
            seen.add(key)
            flags.append(CitationFlag(row.patent_id, row.paper_id, kind, detail))

    for row in analysis:
        if row.lag < 0:
            add(row, FlagKind.NEGATIVE_LAG, f"lag={row.lag}")
        if row.wos_field in blocklist.get(row.lcet, ()):
            add(row, FlagKind.IMPLAUSIBLE_FIELD, f"{row.lcet}:{row.wos_field}")
        if row.confidence < low_confidence_below:
            add(row, FlagKind.LOW_CONFIDENCE, f"cs={row.confidence}")
    return flags


def load_blocklist(path) -> dict[Lcet, set[str]]:
    """Read 'LCET<TAB>field name' lines into a per-technology field set."""
    out: dict[Lcet, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            tech_name, field_name = line.split("\t", 1)
            out.setdefault(Lcet(tech_name), set()).add(field_name)
    return out


def run_subset(
    patents: PatentTable,
    papers: PaperTable,
    citations: ScienceCitationTable,
    min_confidence: int = DEFAULT_MIN_CONFIDENCE,
    blocklist: Optional[dict[Lcet, set[str]]] = None,
) -> tuple[AssignmentTable, JoinedTable, AnalysisTable, list[CitationFlag]]:
    """All four steps plus flagging, in order."""
    assignments = select_lcet(patents)
    joined = join_science(assignments, citations, min_confidence=min_confidence)
    analysis = complete_metadata(joined, papers, patents)
    flags = flag_implausible(analysis, blocklist=blocklist)
    return assignments, joined, analysis, flags
