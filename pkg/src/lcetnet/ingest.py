"""Parsers for the four input record streams.

All inputs are UTF-8 tab-separated files with a header row. A column map
translates logical column names (id, year, ...) to whatever the file calls
them, so arbitrary column names and orders are accepted.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

log = logging.getLogger(__name__)

DEFAULT_PATENT_YEARS = (1836, 2019)
DEFAULT_PAPER_YEARS = (1800, 2019)
DEFAULT_MAX_BAD_FRACTION = 0.01


class ParseError(Exception):
    """Fatal input problem: unreadable source, missing column, duplicate keys."""


class Origin(str, enum.Enum):
    APPLICANT = "applicant"
    EXAMINER = "examiner"
    UNKNOWN = "unknown"


class Location(str, enum.Enum):
    FRONT = "front"
    BODY = "body"
    BOTH = "both"


@dataclass(frozen=True)
class PatentRecord:
    patent_id: str
    grant_year: int
    cpc_codes: frozenset[str]


@dataclass(frozen=True)
class PaperRecord:
    paper_id: str
    pub_year: int
    wos_field: Optional[str]  # None = fieldless, excluded at subset step 4
    doi: Optional[str] = None
    title: Optional[str] = None
    venue: Optional[str] = None
    venue_kind: Optional[str] = None  # "journal" | "conference"


@dataclass(frozen=True)
class ScienceCitation:
    patent_id: str
    paper_id: str
    confidence: int
    origin: Origin = Origin.UNKNOWN
    location: Location = Location.FRONT


@dataclass(frozen=True)
class PatentCitation:
    citing_id: str
    cited_id: str


@dataclass
class Diagnostics:
    """Per-parser accounting: rows_in = rows_kept + rows_rejected."""

    source: str = ""
    rows_in: int = 0
    rows_kept: int = 0
    rejected: dict[str, int] = field(default_factory=dict)

    @property
    def rows_rejected(self) -> int:
        return sum(self.rejected.values())

    def reject(self, line_no: int, reason: str, detail: str = "") -> None:
        self.rejected[reason] = self.rejected.get(reason, 0) + 1
        log.info("reject file=%s line=%d reason=%s %s", self.source, line_no, reason, detail)


def _read_rows(path, columns: dict[str, str], required: Iterable[str]) -> Iterator[tuple[int, dict[str, str]]]:
    """Yield (line_no, logical-name -> value) dicts for each data row."""
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    with fh:
        header_line = fh.readline()
        if not header_line:
            raise ParseError(f"{path}: empty file, header expected")
        header = header_line.rstrip("\n").split("\t")
        positions = {}
        for logical in required:
            name = columns.get(logical, logical)
            if name not in header:
                raise ParseError(f"{path}: missing mandatory column {name!r} (for {logical!r})")
            positions[logical] = header.index(name)
        for logical, name in columns.items():
            if logical not in positions and name in header:
                positions[logical] = header.index(name)
        for line_no, line in enumerate(fh, start=2):
            cells = line.rstrip("\n").split("\t")
            row = {}
            for logical, pos in positions.items():
                row[logical] = cells[pos] if pos < len(cells) else ""
            yield line_no, row


def _check_bad_fraction(diag: Diagnostics, max_bad_fraction: float) -> None:
    if diag.rows_in and diag.rows_rejected / diag.rows_in > max_bad_fraction:
        raise ParseError(
            f"{diag.source}: {diag.rows_rejected}/{diag.rows_in} rows rejected, "
            f"above threshold {max_bad_fraction:.2%}"
        )


@dataclass
class PatentTable:
    records: dict[str, PatentRecord]
    diagnostics: Diagnostics

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[PatentRecord]:
        return iter(self.records.values())

    def __contains__(self, patent_id: str) -> bool:
        return patent_id in self.records

    def get(self, patent_id: str) -> Optional[PatentRecord]:
        return self.records.get(patent_id)


@dataclass
class PaperTable:
    records: dict[str, PaperRecord]
    diagnostics: Diagnostics

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[PaperRecord]:
        return iter(self.records.values())

    def get(self, paper_id: str) -> Optional[PaperRecord]:
        return self.records.get(paper_id)

    @property
    def fieldless_count(self) -> int:
        return sum(1 for r in self.records.values() if r.wos_field is None)


@dataclass
class ScienceCitationTable:
    records: dict[tuple[str, str], ScienceCitation]
    diagnostics: Diagnostics

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[ScienceCitation]:
        return iter(self.records.values())

    def by_patent(self) -> dict[str, list[ScienceCitation]]:
        out: dict[str, list[ScienceCitation]] = {}
        for cit in self.records.values():
            out.setdefault(cit.patent_id, []).append(cit)
        return out


@dataclass
class PatentCitationTable:
    records: list[PatentCitation]
    diagnostics: Diagnostics

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[PatentCitation]:
        return iter(self.records)


def parse_patents(
    path,
    columns: Optional[dict[str, str]] = None,
    year_bounds: tuple[int, int] = DEFAULT_PATENT_YEARS,
    max_bad_fraction: float = DEFAULT_MAX_BAD_FRACTION,
) -> PatentTable:
    """Parse the patent table: columns id, year, cpc (cpc codes ';'-separated)."""
    columns = columns or {}
    diag = Diagnostics(source=str(path))
    records: dict[str, PatentRecord] = {}
    duplicates: list[str] = []
    lo, hi = year_bounds
    for line_no, row in _read_rows(path, columns, required=("id", "year", "cpc")):
        diag.rows_in += 1
        pid = row["id"].strip()
        if not pid:
            diag.reject(line_no, "empty_id")
            continue
        try:
            year = int(row["year"])
        except ValueError:
            diag.reject(line_no, "bad_year", row["year"])
            continue
        if not lo <= year <= hi:
            diag.reject(line_no, "year_out_of_bounds", str(year))
            continue
        codes = frozenset(c.strip() for c in row["cpc"].split(";") if c.strip())
        if not codes:
            diag.reject(line_no, "no_cpc_codes")
            continue
        rec = PatentRecord(patent_id=pid, grant_year=year, cpc_codes=codes)
        if pid in records:
            if records[pid] == rec:  # identical re-statement is a benign dup
                diag.reject(line_no, "duplicate_row")
            else:
                duplicates.append(pid)
            continue
        records[pid] = rec
        diag.rows_kept += 1
    if duplicates:
        raise ParseError(f"{path}: conflicting duplicate patent ids: {sorted(set(duplicates))}")
    _check_bad_fraction(diag, max_bad_fraction)
    return PatentTable(records=records, diagnostics=diag)


def parse_papers(
    path,
    columns: Optional[dict[str, str]] = None,
    year_bounds: tuple[int, int] = DEFAULT_PAPER_YEARS,
    max_bad_fraction: float = DEFAULT_MAX_BAD_FRACTION,
) -> PaperTable:
    """Parse the paper table: columns id, year, field, plus optional doi/title/venue/venue_kind."""
    columns = columns or {}
    diag = Diagnostics(source=str(path))
    records: dict[str, PaperRecord] = {}
    duplicates: list[str] = []
    lo, hi = year_bounds
    for line_no, row in _read_rows(path, columns, required=("id", "year", "field")):
        diag.rows_in += 1
        pid = row["id"].strip()
        if not pid:
            diag.reject(line_no, "empty_id")
            continue
        try:
            year = int(row["year"])
        except ValueError:
            diag.reject(line_no, "bad_year", row["year"])
            continue
        if not lo <= year <= hi:
            diag.reject(line_no, "year_out_of_bounds", str(year))
            continue
        fld = row["field"].strip() or None  # fieldless papers kept, excluded at step 4
        rec = PaperRecord(
            paper_id=pid,
            pub_year=year,
            wos_field=fld,
            doi=row.get("doi", "").strip() or None,
            title=row.get("title", "").strip() or None,
            venue=row.get("venue", "").strip() or None,
            venue_kind=row.get("venue_kind", "").strip() or None,
        )
        if pid in records:
            if records[pid] == rec:
                diag.reject(line_no, "duplicate_row")
            else:
                duplicates.append(pid)
            continue
        records[pid] = rec
        diag.rows_kept += 1
    if duplicates:
        raise ParseError(f"{path}: conflicting duplicate paper ids: {sorted(set(duplicates))}")
    _check_bad_fraction(diag, max_bad_fraction)
    return PaperTable(records=records, diagnostics=diag)


_ORIGINS = {o.value: o for o in Origin}
_LOCATIONS = {l.value: l for l in Location}


def parse_science_citations(
    path,
    columns: Optional[dict[str, str]] = None,
    max_bad_fraction: float = DEFAULT_MAX_BAD_FRACTION,
) -> ScienceCitationTable:
    """Parse patent->paper links; duplicates collapse keeping the max confidence."""
    columns = columns or {}
    diag = Diagnostics(source=str(path))
    records: dict[tuple[str, str], ScienceCitation] = {}
    for line_no, row in _read_rows(path, columns, required=("patent_id", "paper_id", "confidence")):
        diag.rows_in += 1
        pat, pap = row["patent_id"].strip(), row["paper_id"].strip()
        if not pat or not pap:
            diag.reject(line_no, "empty_id")
            continue
        try:
            conf = int(row["confidence"])
        except ValueError:
            diag.reject(line_no, "bad_confidence", row["confidence"])
            continue
        if not 1 <= conf <= 10:
            diag.reject(line_no, "confidence_out_of_range", str(conf))
            continue
        origin = _ORIGINS.get(row.get("origin", "").strip(), Origin.UNKNOWN)
        location = _LOCATIONS.get(row.get("location", "").strip(), Location.FRONT)
        key = (pat, pap)
        prev = records.get(key)
        if prev is None or conf > prev.confidence:
            records[key] = ScienceCitation(pat, pap, conf, origin, location)
        diag.rows_kept += 1  # collapsed duplicates count as kept, not rejected
    _check_bad_fraction(diag, max_bad_fraction)
    return ScienceCitationTable(records=records, diagnostics=diag)


def parse_patent_citations(
    path,
    columns: Optional[dict[str, str]] = None,
    keep: Optional[Callable[[str, str], bool]] = None,
    max_bad_fraction: float = DEFAULT_MAX_BAD_FRACTION,
) -> PatentCitationTable:
    """Stream patent->patent edges; `keep` filters before buffering.

    The full corpus has tens of millions of edges; with a `keep` predicate
    (e.g. incidence to the LCET subset) memory stays proportional to the
    retained subgraph.
    """
    columns = columns or {}
    diag = Diagnostics(source=str(path))
    seen: set[tuple[str, str]] = set()
    records: list[PatentCitation] = []
    for line_no, row in _read_rows(path, columns, required=("citing_id", "cited_id")):
        diag.rows_in += 1
        citing, cited = row["citing_id"].strip(), row["cited_id"].strip()
        if not citing or not cited:
            diag.reject(line_no, "empty_id")
            continue
        if citing == cited:
            diag.reject(line_no, "self_citation", citing)
            continue
        if keep is not None and not keep(citing, cited):
            diag.rows_kept += 1  # filtered by design, not malformed
            continue
        pair = (citing, cited)
        if pair in seen:
            diag.rows_kept += 1
            continue
        seen.add(pair)
        records.append(PatentCitation(citing, cited))
        diag.rows_kept += 1
    _check_bad_fraction(diag, max_bad_fraction)
    return PatentCitationTable(records=records, diagnostics=diag)


# Round-trip writers: writing a parsed table and re-parsing yields an equal table.

def write_patents(table: PatentTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("id\tyear\tcpc\n")
        for rec in table:
            fh.write(f"{rec.patent_id}\t{rec.grant_year}\t{';'.join(sorted(rec.cpc_codes))}\n")


def write_papers(table: PaperTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("id\tyear\tfield\tdoi\ttitle\tvenue\tvenue_kind\n")
        for rec in table:
            fh.write(
                "\t".join(
                    [
                        rec.paper_id,
                        str(rec.pub_year),
                        rec.wos_field or "",
                        rec.doi or "",
                        rec.title or "",
                        rec.venue or "",
                        rec.venue_kind or "",
                    ]
                )
                + "\n"
            )


def write_science_citations(table: ScienceCitationTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("patent_id\tpaper_id\tconfidence\torigin\tlocation\n")
        for cit in table:
            fh.write(
                f"{cit.patent_id}\t{cit.paper_id}\t{cit.confidence}"
                f"\t{cit.origin.value}\t{cit.location.value}\n"
            )


def write_patent_citations(table: PatentCitationTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("citing_id\tcited_id\n")
        for edge in table:
            fh.write(f"{edge.citing_id}\t{edge.cited_id}\n")
