import random

import pytest

from lcetnet.ingest import (
    Diagnostics,
    Location,
    Origin,
    PaperRecord,
    PaperTable,
    PatentCitation,
    PatentCitationTable,
    PatentRecord,
    PatentTable,
    ScienceCitation,
    ScienceCitationTable,
)


def make_patents(rows):
    """rows: iterable of (patent_id, grant_year, cpc_codes)."""
    records = {
        pid: PatentRecord(pid, year, frozenset(codes)) for pid, year, codes in rows
    }
    return PatentTable(records=records, diagnostics=Diagnostics())


def make_papers(rows):
    """rows: iterable of (paper_id, pub_year, field_or_None)."""
    records = {pid: PaperRecord(pid, year, fld) for pid, year, fld in rows}
    return PaperTable(records=records, diagnostics=Diagnostics())


def make_science(rows):
    """rows: (patent_id, paper_id, confidence[, origin, location])."""
    records = {}
    for row in rows:
        pat, pap, conf = row[:3]
        origin = row[3] if len(row) > 3 else Origin.UNKNOWN
        location = row[4] if len(row) > 4 else Location.FRONT
        records[(pat, pap)] = ScienceCitation(pat, pap, conf, origin, location)
    return ScienceCitationTable(records=records, diagnostics=Diagnostics())


def make_patent_cites(pairs):
    records = [PatentCitation(a, b) for a, b in pairs]
    return PatentCitationTable(records=records, diagnostics=Diagnostics())


@pytest.fixture
def rng():
    return random.Random(20240817)
