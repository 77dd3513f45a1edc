"""Time-series and aggregate citation statistics.

Everything here is a pure reduction over the immutable ingest/subset
tables; years are keyed on patent grant year throughout.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Optional

from .ingest import (
    Location,
    Origin,
    PaperTable,
    PatentCitationTable,
    PatentTable,
)
from .subset import AnalysisTable, AssignmentTable
from .vocab import LCET_ORDER, Lcet

ALL_SCOPE = "All"


@dataclass(frozen=True)
class Window:
    start_year: int
    end_year: int

    @property
    def width(self) -> int:
        return self.end_year - self.start_year + 1

    def __contains__(self, year: int) -> bool:
        return self.start_year <= year <= self.end_year

    def label(self) -> str:
        return f"{self.start_year}-{self.end_year}"


def make_windows(start_year: int, end_year: int, width: int = 4, anchor: str = "end") -> list[Window]:
    """Tile [start_year, end_year] with fixed-width windows, no gap or overlap.

    anchor="end" aligns the last window to end_year (the first may start
    before start_year); anchor="start" aligns the first window instead.
    """
    if width < 1 or end_year < start_year:
        raise ValueError("bad window range")
    windows = []
    if anchor == "end":
        hi = end_year
        while hi >= start_year:
            windows.append(Window(hi - width + 1, hi))
            hi -= width
        windows.reverse()
    elif anchor == "start":
        lo = start_year
        while lo <= end_year:
            windows.append(Window(lo, lo + width - 1))
            lo += width
    else:
        raise ValueError(f"unknown anchor: {anchor!r}")
    return windows


@dataclass
class TimeSeries:
    series_id: str
    points: list[tuple[object, float]]  # (year or window label, value)
    unit: str = "count"  # "count" | "share"
    flagged: frozenset = frozenset()  # zero-denominator keys


def _year_counts(years, lo: Optional[int] = None, hi: Optional[int] = None) -> list[tuple[int, int]]:
    counts = Counter(years)
    if not counts:
        return []
    lo = min(counts) if lo is None else lo
    hi = max(counts) if hi is None else hi
    return [(y, counts.get(y, 0)) for y in range(lo, hi + 1)]


def annual_counts(
    scope: str,
    group: Optional[Lcet] = None,
    patents: Optional[PatentTable] = None,
    papers: Optional[PaperTable] = None,
    assignments: Optional[AssignmentTable] = None,
    analysis: Optional[AnalysisTable] = None,
) -> TimeSeries:
    """One point per calendar year in coverage; missing years emitted as 0.

    Scopes: all_patents, all_papers, lcet (patents assigned to `group`),
    lcet_citing (patents of `group` with at least one surviving science
    citation).
    """
    if scope == "all_patents":
        years = [p.grant_year for p in patents]
    elif scope == "all_papers":
        years = [p.pub_year for p in papers]
    elif scope == "lcet":
        if group is None:
            raise ValueError("scope 'lcet' needs a group")
        grant = {p.patent_id: p.grant_year for p in patents}
        years = [grant[a.patent_id] for a in assignments if a.lcet == group]
    elif scope == "lcet_citing":
        if group is None:
            raise ValueError("scope 'lcet_citing' needs a group")
        citing = {r.patent_id for r in analysis if r.lcet == group}
        grant = {p.patent_id: p.grant_year for p in patents}
        years = [grant[pid] for pid in citing]
    else:
        raise ValueError(f"unknown scope: {scope!r}")
    name = scope if group is None else f"{scope}:{group}"
    return TimeSeries(series_id=name, points=[(y, float(c)) for y, c in _year_counts(years)])


GROUP_OF_PREFIX = {"Y02E10": "Renewables", "Y02E30": "Nuclear", "Y02E50": "Fuels"}


def lcet_share_of_total(
    group_scheme: str,
    patents: PatentTable,
    assignments: AssignmentTable,
) -> list[TimeSeries]:
    """Annual share series.

    ten_lcets: each technology's share of that year's LCET assignments
    (multi-tag patents count once per tag, so shares stack to 1).
    three_groups: Y02E10/30/50 patents as a fraction of all patents that
    year (a patent counts once per group it appears in).
    """
    grant = {p.patent_id: p.grant_year for p in patents}
    if group_scheme == "ten_lcets":
        per_year: dict[int, Counter] = defaultdict(Counter)
        for a in assignments:
            per_year[grant[a.patent_id]][str(a.lcet)] += 1
        if not per_year:
            return [TimeSeries(f"lcet_share:{t}", [], unit="share") for t in LCET_ORDER]
        lo, hi = min(per_year), max(per_year)
        out = []
        for tech in LCET_ORDER:
            pts, flagged = [], set()
            for y in range(lo, hi + 1):
                total = sum(per_year[y].values())
                if total == 0:
                    pts.append((y, 0.0))
                    flagged.add(y)
                else:
                    pts.append((y, per_year[y][str(tech)] / total))
            out.append(
                TimeSeries(f"lcet_share:{tech}", pts, unit="share", flagged=frozenset(flagged))
            )
        return out
    if group_scheme == "three_groups":
        total_per_year = Counter(p.grant_year for p in patents)
        members: dict[str, set[tuple[str, int]]] = {g: set() for g in GROUP_OF_PREFIX.values()}
        for a in assignments:
            members[GROUP_OF_PREFIX[a.source_code[:6]]].add((a.patent_id, grant[a.patent_id]))
        if not total_per_year:
            return [TimeSeries(f"group_share:{g}", [], unit="share") for g in members]
        lo, hi = min(total_per_year), max(total_per_year)
        out = []
        for name, patset in members.items():
            per_year = Counter(y for _, y in patset)
            pts, flagged = [], set()
            for y in range(lo, hi + 1):
                total = total_per_year.get(y, 0)
                if total == 0:
                    pts.append((y, 0.0))
                    flagged.add(y)
                else:
                    pts.append((y, per_year.get(y, 0) / total))
            out.append(
                TimeSeries(f"group_share:{name}", pts, unit="share", flagged=frozenset(flagged))
            )
        return out
    raise ValueError(f"unknown group_scheme: {group_scheme!r}")


def science_share(
    windows: list[Window],
    assignments: AssignmentTable,
    analysis: AnalysisTable,
    patent_cites: PatentCitationTable,
    patents: PatentTable,
) -> dict[Lcet, TimeSeries]:
    """Per technology and window: sci / (sci + pat) citation share.

    sci counts surviving science citations made by the technology's patents
    granted in the window; pat counts patent citations made by the same
    patents. Other non-patent references never enter the denominator.
    """
    grant = {p.patent_id: p.grant_year for p in patents}
    tags: dict[str, set[Lcet]] = defaultdict(set)
    for a in assignments:
        tags[a.patent_id].add(a.lcet)

    sci: dict[tuple[Lcet, int], int] = Counter()
    for r in analysis:
        for w_i, w in enumerate(windows):
            if r.grant_year in w:
                sci[(r.lcet, w_i)] += 1
                break
    pat: dict[tuple[Lcet, int], int] = Counter()
    for e in patent_cites:
        year = grant.get(e.citing_id)
        if year is None:
            continue
        for tech in tags.get(e.citing_id, ()):
            for w_i, w in enumerate(windows):
                if year in w:
                    pat[(tech, w_i)] += 1
                    break

    out: dict[Lcet, TimeSeries] = {}
    for tech in LCET_ORDER:
        pts, flagged = [], set()
        for w_i, w in enumerate(windows):
            s, p = sci.get((tech, w_i), 0), pat.get((tech, w_i), 0)
            if s + p == 0:
                pts.append((w.label(), 0.0))
                flagged.add(w.label())
            else:
                pts.append((w.label(), s / (s + p)))
        out[tech] = TimeSeries(
            f"science_share:{tech}", pts, unit="share", flagged=frozenset(flagged)
        )
    return out


@dataclass
class LagStats:
    count: int
    mean: float
    min: int
    max: int


def citation_lags(analysis: AnalysisTable) -> dict[str, LagStats]:
    """Per-technology and overall lag statistics (grant year - pub year).

    Negative lags are included; the overall row averages over citation
    links, not over technologies.
    """
    per_tech: dict[str, list[int]] = defaultdict(list)
    for r in analysis:
        per_tech[str(r.lcet)].append(r.lag)
        per_tech[ALL_SCOPE].append(r.lag)
    out = {}
    for scope, lags in per_tech.items():
        out[scope] = LagStats(
            count=len(lags), mean=sum(lags) / len(lags), min=min(lags), max=max(lags)
        )
    return out


@dataclass
class AggregateRow:
    lcet: str
    total_patents: int
    citing_patents: int
    citing_ratio: float
    science_citations: int
    cites_per_patent_all: float
    cites_per_patent_citing: float
    avg_confidence: float
    pct_applicant: float
    pct_examiner: float
    pct_text_only: float
    pct_front_only: float
    oldest_patent: Optional[int]
    youngest_patent: Optional[int]
    avg_patent_year: float
    oldest_paper: Optional[int]
    youngest_paper: Optional[int]
    avg_paper_year: float
    avg_lag: float


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def aggregate_table(
    assignments: AssignmentTable,
    analysis: AnalysisTable,
    patents: PatentTable,
) -> list[AggregateRow]:
    """One row per technology plus an overall row.

    The overall row carries totals over unique patents/citations for the
    count columns and simple averages of the per-technology values for the
    ratio columns.
    """
    grant = {p.patent_id: p.grant_year for p in patents}
    total_pats: dict[str, set[str]] = defaultdict(set)
    for a in assignments:
        total_pats[str(a.lcet)].add(a.patent_id)
    rows_by_tech: dict[str, list] = defaultdict(list)
    for r in analysis:
        rows_by_tech[str(r.lcet)].append(r)

    def build(scope: str, total: set[str], rows: list) -> AggregateRow:
        citing = {r.patent_id for r in rows}
        n_cit = len(rows)
        confs = [r.confidence for r in rows]
        pat_years = sorted({grant[p] for p in citing}) if citing else []
        citing_years = [grant[r.patent_id] for r in rows]
        pap_years = [r.pub_year for r in rows]
        uniq_pap_years = sorted({(r.paper_id, r.pub_year) for r in rows})
        pap_bounds = sorted(y for _, y in uniq_pap_years) if uniq_pap_years else []
        return AggregateRow(
            lcet=scope,
            total_patents=len(total),
            citing_patents=len(citing),
            citing_ratio=_ratio(len(citing), len(total)),
            science_citations=n_cit,
            cites_per_patent_all=_ratio(n_cit, len(total)),
            cites_per_patent_citing=_ratio(n_cit, len(citing)),
            avg_confidence=_ratio(sum(confs), n_cit),
            pct_applicant=100 * _ratio(sum(1 for r in rows if r.origin == Origin.APPLICANT), n_cit),
            pct_examiner=100 * _ratio(sum(1 for r in rows if r.origin == Origin.EXAMINER), n_cit),
            pct_text_only=100 * _ratio(sum(1 for r in rows if r.location == Location.BODY), n_cit),
            pct_front_only=100 * _ratio(sum(1 for r in rows if r.location == Location.FRONT), n_cit),
            oldest_patent=pat_years[0] if pat_years else None,
            youngest_patent=pat_years[-1] if pat_years else None,
            avg_patent_year=_ratio(sum(citing_years), len(citing_years)),
            oldest_paper=pap_bounds[0] if pap_bounds else None,
            youngest_paper=pap_bounds[-1] if pap_bounds else None,
            avg_paper_year=_ratio(sum(pap_years), len(pap_years)),
            avg_lag=_ratio(sum(r.lag for r in rows), n_cit),
        )

    rows = [build(str(t), total_pats.get(str(t), set()), rows_by_tech.get(str(t), [])) for t in LCET_ORDER]
    overall = build(ALL_SCOPE, assignments.unique_patents(), list(analysis))
    # Ratio columns of the overall row are simple averages across technologies.
    present = [r for r in rows if r.total_patents > 0]
    if present:
        n = len(present)
        overall.citing_ratio = sum(r.citing_ratio for r in present) / n
        overall.cites_per_patent_all = sum(r.cites_per_patent_all for r in present) / n
        overall.cites_per_patent_citing = sum(r.cites_per_patent_citing for r in present) / n
    rows.append(overall)
    return rows


@dataclass
class RankedRecord:
    scope: str
    key: str  # paper id, field name, venue name, or patent id
    count_in_scope: int
    count_total: int
    detail: str = ""


def most_cited(
    kind: str,
    analysis: AnalysisTable,
    papers: Optional[PaperTable] = None,
) -> list[RankedRecord]:
    """Most cited paper / field / journal, or most citing patent.

    One record per technology plus the overall record; ties broken by
    ascending identifier.
    """

    def key_of(row) -> Optional[str]:
        if kind == "paper":
            return row.paper_id
        if kind == "field":
            return row.wos_field
        if kind == "journal":
            if papers is None:
                return None
            rec = papers.get(row.paper_id)
            return rec.venue if rec and rec.venue else None
        if kind == "citing_patent":
            return row.patent_id
        raise ValueError(f"unknown kind: {kind!r}")

    per_scope: dict[str, Counter] = defaultdict(Counter)
    total: Counter = Counter()
    for r in analysis:
        k = key_of(r)
        if k is None:
            continue
        per_scope[str(r.lcet)][k] += 1
        total[k] += 1

    out = []
    scopes = [str(t) for t in LCET_ORDER] + [ALL_SCOPE]
    for scope in scopes:
        counts = total if scope == ALL_SCOPE else per_scope.get(scope, Counter())
        if not counts:
            continue
        key = min(counts, key=lambda k: (-counts[k], k))
        detail = ""
        if kind == "paper" and papers is not None:
            rec = papers.get(key)
            if rec is not None:
                detail = rec.title or ""
        out.append(
            RankedRecord(
                scope=scope,
                key=key,
                count_in_scope=counts[key],
                count_total=total[key],
                detail=detail,
            )
        )
    return out


@dataclass
class ClassRow:
    cpc_code: str
    first_year: int
    last_year: int
    n_patents: int
    science_cites: int
    patent_cites: int
    forward_cites: int


def per_class_table(
    patents: PatentTable,
    assignments: AssignmentTable,
    analysis: AnalysisTable,
    patent_cites: PatentCitationTable,
) -> list[ClassRow]:
    """Statistics per full-resolution Y02E code across all LCET patents.

    Science cites count distinct surviving patent-paper links of the
    class's patents; patent cites count edges they make; forward cites
    count edges they receive from any patent in the corpus.
    """
    lcet_patents = assignments.unique_patents()
    members: dict[str, set[str]] = defaultdict(set)
    for pid in lcet_patents:
        for code in patents.get(pid).cpc_codes:
            if code[:6] in ("Y02E10", "Y02E30", "Y02E50"):
                members[code].add(pid)

    sci_links: dict[str, set[str]] = defaultdict(set)  # patent -> papers
    for r in analysis:
        sci_links[r.patent_id].add(r.paper_id)
    made: Counter = Counter()
    received: Counter = Counter()
    for e in patent_cites:
        made[e.citing_id] += 1
        received[e.cited_id] += 1

    rows = []
    for code in sorted(members):
        pids = members[code]
        years = [patents.get(p).grant_year for p in pids]
        rows.append(
            ClassRow(
                cpc_code=code,
                first_year=min(years),
                last_year=max(years),
                n_patents=len(pids),
                science_cites=sum(len(sci_links.get(p, ())) for p in pids),
                patent_cites=sum(made.get(p, 0) for p in pids),
                forward_cites=sum(received.get(p, 0) for p in pids),
            )
        )
    return rows
