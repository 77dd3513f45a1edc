"""Stage orchestration: ingest -> subset -> network -> metrics -> robustness.

Each stage writes its outputs under the configured output directory and
records a stamp with the digest of raw inputs plus config; rerunning with
unchanged inputs reuses the cached stage outputs. The export stage writes
a manifest listing every output with its content digest.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Optional

from . import ingest as ing
from . import metrics as met
from . import netcore as net
from . import robustness as rob
from . import subset as sub
from .config import RunConfig
from .robustness import VariantSpec
from .vocab import LCET_ORDER, FieldVocabulary

log = logging.getLogger(__name__)


class InvariantViolation(Exception):
    """Internal consistency check failed (CLI exit code 3)."""


def _require(condition: bool, invariant: str) -> None:
    if not condition:
        raise InvariantViolation(invariant)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _config_key(cfg: RunConfig) -> str:
    relevant = {
        "columns": cfg.columns,
        "patent_years": cfg.patent_years,
        "paper_years": cfg.paper_years,
        "max_bad_fraction": cfg.max_bad_fraction,
        "min_confidence": cfg.min_confidence,
        "periods": [w.label() for w in cfg.periods],
        "window_width": cfg.window_width,
        "window_anchor": cfg.window_anchor,
        "window_range": cfg.window_range,
        "tech_schemes": cfg.tech_schemes,
        "keep_fraction_similarity": cfg.keep_fraction_similarity,
        "keep_fraction_coupling": cfg.keep_fraction_coupling,
        "top_k": cfg.top_k,
        "variants": [
            (v.name, v.min_confidence, v.drop_coclassified, [w.label() for w in v.periods])
            for v in cfg.variants
        ],
    }
    return hashlib.sha256(json.dumps(relevant, sort_keys=True, default=list).encode()).hexdigest()


def _inputs_key(cfg: RunConfig) -> str:
    h = hashlib.sha256()
    for path in cfg.input_paths():
        h.update(path.encode())
        h.update(sha256_file(path).encode())
    h.update(_config_key(cfg).encode())
    return h.hexdigest()


def _stamp_path(cfg: RunConfig, stage: str) -> str:
    return os.path.join(cfg.output_dir, f".{stage}.stamp.json")


def _is_cached(cfg: RunConfig, stage: str, key: str) -> Optional[list[str]]:
    try:
        with open(_stamp_path(cfg, stage), encoding="utf-8") as fh:
            stamp = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    if stamp.get("key") != key:
        return None
    outputs = stamp.get("outputs", [])
    for rel in outputs:
        if not os.path.exists(os.path.join(cfg.output_dir, rel)):
            return None
    return outputs


def _write_stamp(cfg: RunConfig, stage: str, key: str, outputs: list[str]) -> None:
    with open(_stamp_path(cfg, stage), "w", encoding="utf-8") as fh:
        json.dump({"key": key, "outputs": sorted(outputs)}, fh, indent=1, sort_keys=True)


@dataclass
class Tables:
    patents: ing.PatentTable
    papers: ing.PaperTable
    science: ing.ScienceCitationTable
    patent_cites: ing.PatentCitationTable
    fields: Optional[FieldVocabulary] = None


@dataclass
class SubsetResult:
    assignments: sub.AssignmentTable
    joined: sub.JoinedTable
    analysis: sub.AnalysisTable
    flags: list[sub.CitationFlag]


@dataclass
class Runner:
    """Loads tables lazily and runs stages with per-stage caching."""

    cfg: RunConfig
    _tables: Optional[Tables] = None
    _subset: Optional[SubsetResult] = None
    _key: Optional[str] = None
    outputs: list[str] = field(default_factory=list)

    @property
    def key(self) -> str:
        if self._key is None:
            self._key = _inputs_key(self.cfg)
        return self._key

    def _out(self, *parts: str) -> str:
        path = os.path.join(self.cfg.output_dir, *parts)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        rel = os.path.relpath(path, self.cfg.output_dir)
        if rel not in self.outputs:
            self.outputs.append(rel)
        return path

    def tables(self) -> Tables:
        if self._tables is None:
            cfg = self.cfg
            patents = ing.parse_patents(
                cfg.patents_path,
                cfg.columns.get("patents"),
                year_bounds=cfg.patent_years,
                max_bad_fraction=cfg.max_bad_fraction,
            )
            papers = ing.parse_papers(
                cfg.papers_path,
                cfg.columns.get("papers"),
                year_bounds=cfg.paper_years,
                max_bad_fraction=cfg.max_bad_fraction,
            )
            science = ing.parse_science_citations(
                cfg.science_citations_path,
                cfg.columns.get("science_citations"),
                max_bad_fraction=cfg.max_bad_fraction,
            )
            lcet_ids = {
                p.patent_id for p in patents if any(code[:6] in ("Y02E10", "Y02E30", "Y02E50") for code in p.cpc_codes)
            }
            patent_cites = ing.parse_patent_citations(
                cfg.patent_citations_path,
                cfg.columns.get("patent_citations"),
                keep=lambda citing, cited: citing in lcet_ids or cited in lcet_ids,
                max_bad_fraction=cfg.max_bad_fraction,
            )
            fields = FieldVocabulary.from_file(cfg.fields_path) if cfg.fields_path else None
            self._tables = Tables(patents, papers, science, patent_cites, fields)
        return self._tables

    def subset(self) -> SubsetResult:
        if self._subset is None:
            t = self.tables()
            blocklist = sub.load_blocklist(self.cfg.blocklist_path) if self.cfg.blocklist_path else None
            assignments, joined, analysis, flags = sub.run_subset(
                t.patents,
                t.papers,
                t.science,
                min_confidence=self.cfg.min_confidence,
                blocklist=blocklist,
            )
            if t.fields is not None:
                for name in analysis.distinct_fields():
                    _require(name in t.fields, f"field {name!r} missing from vocabulary")
            self._subset = SubsetResult(assignments, joined, analysis, flags)
        return self._subset

    # ---------------- stages ----------------

    def run_ingest(self) -> list[str]:
        cached = _is_cached(self.cfg, "ingest", self.key)
        if cached is not None:
            log.info("ingest: cached")
            self.outputs.extend(p for p in cached if p not in self.outputs)
            return cached
        t = self.tables()
        ing.write_patents(t.patents, self._out("ingest", "patents.tsv"))
        ing.write_papers(t.papers, self._out("ingest", "papers.tsv"))
        ing.write_science_citations(t.science, self._out("ingest", "science_citations.tsv"))
        ing.write_patent_citations(t.patent_cites, self._out("ingest", "patent_citations.tsv"))
        diag = {
            name: {
                "source": d.source,
                "rows_in": d.rows_in,
                "rows_kept": d.rows_kept,
                "rejected": d.rejected,
            }
            for name, d in (
                ("patents", t.patents.diagnostics),
                ("papers", t.papers.diagnostics),
                ("science_citations", t.science.diagnostics),
                ("patent_citations", t.patent_cites.diagnostics),
            )
        }
        with open(self._out("ingest", "diagnostics.json"), "w", encoding="utf-8") as fh:
            json.dump(diag, fh, indent=1, sort_keys=True)
        outputs = [p for p in self.outputs if p.startswith("ingest")]
        _write_stamp(self.cfg, "ingest", self.key, outputs)
        return outputs

    def run_subset_stage(self) -> list[str]:
        cached = _is_cached(self.cfg, "subset", self.key)
        if cached is not None:
            log.info("subset: cached")
            self.outputs.extend(p for p in cached if p not in self.outputs)
            return cached
        s = self.subset()
        with open(self._out("subset", "assignments.tsv"), "w", encoding="utf-8") as fh:
            fh.write("patent_id\tlcet\tsource_code\tvia_split\n")
            for a in s.assignments:
                fh.write(f"{a.patent_id}\t{a.lcet}\t{a.source_code}\t{int(a.via_split)}\n")
        with open(self._out("subset", "joined.tsv"), "w", encoding="utf-8") as fh:
            fh.write("patent_id\tlcet\tpaper_id\tconfidence\torigin\tlocation\n")
            for r in s.joined:
                fh.write(
                    f"{r.patent_id}\t{r.lcet}\t{r.paper_id}\t{r.confidence}"
                    f"\t{r.origin.value}\t{r.location.value}\n"
                )
        with open(self._out("subset", "analysis.tsv"), "w", encoding="utf-8") as fh:
            fh.write(
                "patent_id\tlcet\tpaper_id\tconfidence\torigin\tlocation"
                "\tgrant_year\tpub_year\twos_field\n"
            )
            for r in s.analysis:
                fh.write(
                    f"{r.patent_id}\t{r.lcet}\t{r.paper_id}\t{r.confidence}"
                    f"\t{r.origin.value}\t{r.location.value}"
                    f"\t{r.grant_year}\t{r.pub_year}\t{r.wos_field}\n"
                )
        with open(self._out("subset", "flags.tsv"), "w", encoding="utf-8") as fh:
            fh.write("patent_id\tpaper_id\tflag\tdetail\n")
            for f in s.flags:
                fh.write(f"{f.patent_id}\t{f.paper_id}\t{f.flag.value}\t{f.detail}\n")
        summary = {
            "assignments": len(s.assignments),
            "unique_lcet_patents": len(s.assignments.unique_patents()),
            "unmapped_codes": s.assignments.unmapped,
            "joined_rows": len(s.joined),
            "citing_patents": len(s.analysis.citing_patents()),
            "cited_papers": len(s.analysis.cited_papers()),
            "analysis_rows": len(s.analysis),
            "distinct_fields": len(s.analysis.distinct_fields()),
            "dropped_fieldless": s.analysis.dropped_fieldless,
            "dropped_unknown_paper": s.analysis.dropped_unknown_paper,
            "flags": len(s.flags),
            "min_confidence": self.cfg.min_confidence,
        }
        with open(self._out("subset", "summary.json"), "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=1, sort_keys=True)
        outputs = [p for p in self.outputs if p.startswith("subset")]
        _write_stamp(self.cfg, "subset", self.key, outputs)
        return outputs

    def run_network(self) -> list[str]:
        cached = _is_cached(self.cfg, "network", self.key)
        if cached is not None:
            log.info("network: cached")
            self.outputs.extend(p for p in cached if p not in self.outputs)
            return cached
        t = self.tables()
        s = self.subset()
        cfg = self.cfg
        for window in cfg.periods:
            p = window.label()
            slice_ = s.analysis.restricted(window.start_year, window.end_year)
            layers = net.build_layers(slice_, t.patent_cites, patents=t.patents, tech_scheme="lcet10")
            o_tilde = net.project_tech_field(layers.B, layers.M, layers.A)
            _require(
                o_tilde.total() == len(slice_),
                "sum of technology-field counts equals analysis rows in period",
            )
            O = net.normalize_rows(o_tilde)
            sim_sci = net.cosine_rows(O, period=p)
            net.write_matrix(self._out("network", f"otilde_{p}.tsv"), o_tilde.row_labels, o_tilde.col_labels, o_tilde.counts)
            net.write_matrix(self._out("network", f"o_{p}.tsv"), O.row_labels, O.col_labels, O.shares)
            net.write_matrix(self._out("network", f"sim_sci_{p}.tsv"), sim_sci.labels, sim_sci.labels, sim_sci.values)
            net.write_edges(
                self._out("network", f"fig6a_{p}.tsv"),
                net.threshold_edges(sim_sci.values, sim_sci.labels, cfg.keep_fraction_similarity, directed=False),
            )
            top = net.top_k_fields(O, k=cfg.top_k)
            with open(self._out("network", f"top_fields_{p}.tsv"), "w", encoding="utf-8") as fh:
                fh.write("lcet\trank\tfield\tshare\n")
                for tech in O.row_labels:
                    entries, residual = top[tech]
                    for rank, (fname, share) in enumerate(entries, start=1):
                        fh.write(f"{tech}\t{rank}\t{fname}\t{net.format_value(share)}\n")
                    fh.write(f"{tech}\t0\tall others\t{net.format_value(residual)}\n")
            p_tilde = net.project_tech_tech(layers.B, layers.H, layers.B_target)
            P = net.normalize_rows(p_tilde)
            net.write_matrix(self._out("network", f"ptilde_{p}.tsv"), p_tilde.row_labels, p_tilde.col_labels, p_tilde.counts)
            net.write_matrix(self._out("network", f"p_{p}.tsv"), P.row_labels, P.col_labels, P.shares)
            D = net.bibcoup_paper(layers.B, layers.M)
            T = net.bibcoup_patent(layers.B, layers.H)
            net.write_matrix(self._out("network", f"d_{p}.tsv"), D.labels, D.labels, D.values)
            net.write_matrix(self._out("network", f"t_{p}.tsv"), T.labels, T.labels, T.values)
            net.write_edges(
                self._out("network", f"appF_paper_{p}.tsv"),
                net.threshold_edges(D.values, D.labels, cfg.keep_fraction_coupling, directed=True),
            )
            net.write_edges(
                self._out("network", f"appF_patent_{p}.tsv"),
                net.threshold_edges(T.values, T.labels, cfg.keep_fraction_coupling, directed=True),
            )
            if "cpc4" in cfg.tech_schemes:
                layers4 = net.build_layers(slice_, t.patent_cites, patents=t.patents, tech_scheme="cpc4")
                p4 = net.project_tech_tech(layers4.B, layers4.H, layers4.B_target)
                P4 = net.normalize_rows(p4)
                sim_tech = net.cosine_rows(P4, period=p)
                net.write_matrix(self._out("network", f"p_cpc4_{p}.tsv"), P4.row_labels, P4.col_labels, P4.shares)
                net.write_matrix(self._out("network", f"sim_tech_{p}.tsv"), sim_tech.labels, sim_tech.labels, sim_tech.values)
                net.write_edges(
                    self._out("network", f"fig6b_{p}.tsv"),
                    net.threshold_edges(sim_tech.values, sim_tech.labels, cfg.keep_fraction_similarity, directed=False),
                )
        outputs = [p for p in self.outputs if p.startswith("network")]
        _write_stamp(self.cfg, "network", self.key, outputs)
        return outputs

    def run_metrics(self) -> list[str]:
        cached = _is_cached(self.cfg, "metrics", self.key)
        if cached is not None:
            log.info("metrics: cached")
            self.outputs.extend(p for p in cached if p not in self.outputs)
            return cached
        t = self.tables()
        s = self.subset()
        cfg = self.cfg

        def write_series(path, series_list, key_name="year"):
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(f"series\t{key_name}\tvalue\tflagged\n")
                for ts in series_list:
                    for k, v in ts.points:
                        fh.write(f"{ts.series_id}\t{k}\t{net.format_value(v)}\t{int(k in ts.flagged)}\n")

        write_series(
            self._out("metrics", "fig2a.tsv"),
            [
                met.annual_counts("all_patents", patents=t.patents),
                met.annual_counts("all_papers", papers=t.papers),
            ],
        )
        write_series(
            self._out("metrics", "fig4.tsv"),
            [
                met.annual_counts("lcet", group=tech, patents=t.patents, assignments=s.assignments)
                for tech in LCET_ORDER
            ]
            + [
                met.annual_counts(
                    "lcet_citing", group=tech, patents=t.patents, analysis=s.analysis
                )
                for tech in LCET_ORDER
            ],
        )
        shares = met.lcet_share_of_total("ten_lcets", t.patents, s.assignments)
        with open(self._out("metrics", "fig3.tsv"), "w", encoding="utf-8") as fh:
            fh.write("year\t" + "\t".join(str(tech) for tech in LCET_ORDER) + "\n")
            if shares[0].points:
                years = [y for y, _ in shares[0].points]
                cols = {ts.series_id.split(":", 1)[1]: dict(ts.points) for ts in shares}
                for y in years:
                    vals = [net.format_value(cols[str(tech)][y]) for tech in LCET_ORDER]
                    fh.write(f"{y}\t" + "\t".join(vals) + "\n")
        write_series(
            self._out("metrics", "appD.tsv"),
            met.lcet_share_of_total("three_groups", t.patents, s.assignments),
        )
        grant_years = [p.grant_year for p in t.patents]
        if cfg.window_range:
            lo, hi = cfg.window_range
        else:
            lo, hi = min(grant_years), max(grant_years)
        windows = met.make_windows(lo, hi, cfg.window_width, cfg.window_anchor)
        sci_share = met.science_share(windows, s.assignments, s.analysis, t.patent_cites, t.patents)
        write_series(
            self._out("metrics", "fig5.tsv"),
            [sci_share[tech] for tech in LCET_ORDER],
            key_name="window",
        )

        agg = met.aggregate_table(s.assignments, s.analysis, t.patents)
        with open(self._out("metrics", "tabA1.tsv"), "w", encoding="utf-8") as fh:
            fh.write(
                "lcet\ttotal_patents\tciting_patents\tciting_ratio\tscience_citations"
                "\tcites_per_patent_all\tcites_per_patent_citing\n"
            )
            for row in agg:
                fh.write(
                    f"{row.lcet}\t{row.total_patents}\t{row.citing_patents}"
                    f"\t{net.format_value(row.citing_ratio)}\t{row.science_citations}"
                    f"\t{net.format_value(row.cites_per_patent_all)}"
                    f"\t{net.format_value(row.cites_per_patent_citing)}\n"
                )
        with open(self._out("metrics", "tabB1.tsv"), "w", encoding="utf-8") as fh:
            fh.write(
                "lcet\tciting_patents\tcited_papers\tcitations\tavg_confidence"
                "\tpct_applicant\tpct_examiner\tpct_text_only\tpct_front_only\n"
            )
            papers_per: dict[str, set] = {}
            for r in s.analysis:
                papers_per.setdefault(str(r.lcet), set()).add(r.paper_id)
            papers_per[met.ALL_SCOPE] = s.analysis.cited_papers()
            for row in agg:
                fh.write(
                    f"{row.lcet}\t{row.citing_patents}\t{len(papers_per.get(row.lcet, ()))}"
                    f"\t{row.science_citations}\t{net.format_value(row.avg_confidence)}"
                    f"\t{net.format_value(row.pct_applicant)}\t{net.format_value(row.pct_examiner)}"
                    f"\t{net.format_value(row.pct_text_only)}\t{net.format_value(row.pct_front_only)}\n"
                )
        lags = met.citation_lags(s.analysis)
        with open(self._out("metrics", "tabB2.tsv"), "w", encoding="utf-8") as fh:
            fh.write(
                "lcet\toldest_patent\tyoungest_patent\tavg_patent_year"
                "\toldest_paper\tyoungest_paper\tavg_paper_year\tavg_lag\tmin_lag\tmax_lag\n"
            )
            for row in agg:
                stat = lags.get(row.lcet)
                fh.write(
                    f"{row.lcet}\t{row.oldest_patent or ''}\t{row.youngest_patent or ''}"
                    f"\t{net.format_value(row.avg_patent_year)}"
                    f"\t{row.oldest_paper or ''}\t{row.youngest_paper or ''}"
                    f"\t{net.format_value(row.avg_paper_year)}"
                    f"\t{net.format_value(row.avg_lag)}"
                    f"\t{stat.min if stat else ''}\t{stat.max if stat else ''}\n"
                )

        def write_ranked(path, records):
            with open(path, "w", encoding="utf-8") as fh:
                fh.write("scope\tkey\tcount_in_scope\tcount_total\tdetail\n")
                for r in records:
                    fh.write(f"{r.scope}\t{r.key}\t{r.count_in_scope}\t{r.count_total}\t{r.detail}\n")

        write_ranked(self._out("metrics", "tabB3.tsv"), met.most_cited("paper", s.analysis, t.papers))
        write_ranked(self._out("metrics", "tabB4.tsv"), met.most_cited("field", s.analysis))
        write_ranked(self._out("metrics", "tabB5.tsv"), met.most_cited("journal", s.analysis, t.papers))
        write_ranked(self._out("metrics", "tabB6.tsv"), met.most_cited("citing_patent", s.analysis))

        classes = met.per_class_table(t.patents, s.assignments, s.analysis, t.patent_cites)
        with open(self._out("metrics", "tabB7.tsv"), "w", encoding="utf-8") as fh:
            fh.write("cpc_code\tfirst_year\tlast_year\tn_patents\tscience_cites\tpatent_cites\tforward_cites\n")
            for c in classes:
                fh.write(
                    f"{c.cpc_code}\t{c.first_year}\t{c.last_year}\t{c.n_patents}"
                    f"\t{c.science_cites}\t{c.patent_cites}\t{c.forward_cites}\n"
                )
        outputs = [p for p in self.outputs if p.startswith("metrics")]
        _write_stamp(self.cfg, "metrics", self.key, outputs)
        return outputs

    def run_robustness(self) -> list[str]:
        cached = _is_cached(self.cfg, "robustness", self.key)
        if cached is not None:
            log.info("robustness: cached")
            self.outputs.extend(p for p in cached if p not in self.outputs)
            return cached
        t = self.tables()
        s = self.subset()
        cfg = self.cfg
        for spec in cfg.variants:
            baseline_spec = VariantSpec(
                name="baseline", min_confidence=cfg.min_confidence, periods=spec.periods
            )
            baseline = rob.run_variant(baseline_spec, s.analysis, s.assignments, t.patent_cites, t.patents)
            variant = rob.run_variant(spec, s.analysis, s.assignments, t.patent_cites, t.patents)
            report_rows = []
            for window in spec.periods:
                p = window.label()
                for side, b_maps, v_maps in (
                    ("sci", baseline.similarity_sci, variant.similarity_sci),
                    ("tech", baseline.similarity_tech, variant.similarity_tech),
                ):
                    if p not in b_maps or p not in v_maps:
                        continue
                    rep = rob.compare(b_maps[p], v_maps[p])
                    net.write_matrix(
                        self._out("robustness", f"{spec.name}_{side}_{p}.tsv"),
                        rep.labels,
                        rep.labels,
                        rep.combined,
                    )
                    report_rows.append((p, side, rep))
            with open(self._out("robustness", f"{spec.name}_report.tsv"), "w", encoding="utf-8") as fh:
                fh.write("period\tside\tmax_abs_delta\t" + "\t".join(f"rank_{l}" for l in (report_rows[0][2].labels if report_rows else ())) + "\n")
                for p, side, rep in report_rows:
                    ranks = "\t".join(net.format_value(rep.rank_agreement[l]) for l in rep.labels)
                    fh.write(f"{p}\t{side}\t{net.format_value(rep.max_abs_delta)}\t{ranks}\n")
            if variant.empty_periods:
                with open(self._out("robustness", f"{spec.name}_empty_periods.txt"), "w", encoding="utf-8") as fh:
                    for p in variant.empty_periods:
                        fh.write(p + "\n")
        outputs = [p for p in self.outputs if p.startswith("robustness")]
        _write_stamp(self.cfg, "robustness", self.key, outputs)
        return outputs

    def run_export(self) -> str:
        """Write the manifest covering every file under the output directory."""
        manifest = {}
        for root, _dirs, files in os.walk(self.cfg.output_dir):
            for name in sorted(files):
                path = os.path.join(root, name)
                rel = os.path.relpath(path, self.cfg.output_dir)
                if name == "manifest.json" or name.startswith("."):
                    continue
                manifest[rel] = sha256_file(path)
        out = os.path.join(self.cfg.output_dir, "manifest.json")
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=1, sort_keys=True)
        return out

    def run_all(self) -> str:
        self.run_ingest()
        self.run_subset_stage()
        self.run_network()
        self.run_metrics()
        self.run_robustness()
        return self.run_export()
