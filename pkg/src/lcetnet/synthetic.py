"""Seeded synthetic corpus generator for tests and benchmarks.

The generated files obey every ingest invariant and exercise the whole
pipeline: multi-class and multi-purpose patents, fieldless papers,
duplicate citation rows, the full confidence range.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass

WOS_FIELDS = (
    "Energy & Fuels",
    "Engineering, Electrical & Electronic",
    "Materials Science",
    "Optics",
    "Mechanics",
    "Geology",
    "Thermodynamics",
    "Chemical Engineering",
    "Biochemistry & Molecular Biology",
    "Environmental Engineering",
    "Nuclear Science & Technology",
    "Physics, Fluids & Plasmas",
)

# One characteristic 7-digit branch per technology, plus sibling codes.
LCET_CODES = (
    "Y02E10/50", "Y02E10/541", "Y02E10/549",  # PV
    "Y02E10/70", "Y02E10/72", "Y02E10/723",  # Wind
    "Y02E10/40", "Y02E10/41", "Y02E10/44",  # Thermal
    "Y02E10/30", "Y02E10/38",  # Ocean
    "Y02E10/20", "Y02E10/22",  # Hydro
    "Y02E10/10", "Y02E10/12",  # Geo
    "Y02E50/10", "Y02E50/16",  # Biofuels
    "Y02E50/30", "Y02E50/343",  # Waste
    "Y02E30/30", "Y02E30/38", "Y02E30/40",  # Fission
    "Y02E30/10", "Y02E30/122",  # Fusion
)
MULTI_PURPOSE_CODES = ("Y02E10/00", "Y02E10/60", "Y02E50/00", "Y02E30/00")
OTHER_CODES = ("H01L21/02", "F03D13/20", "C12N15/09", "G21B1/00", "B63B35/44")


@dataclass
class SyntheticSizes:
    n_patents: int = 200
    n_papers: int = 300
    n_science_citations: int = 600
    n_patent_citations: int = 800


def generate_corpus(out_dir, seed: int = 7, sizes: SyntheticSizes = SyntheticSizes()) -> dict[str, str]:
    """Write a corpus into out_dir; same seed and sizes give identical bytes.

    Returns a mapping of logical name to file path.
    """
    rng = random.Random(seed)
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "patents": os.path.join(out_dir, "patents.tsv"),
        "papers": os.path.join(out_dir, "papers.tsv"),
        "science_citations": os.path.join(out_dir, "science_citations.tsv"),
        "patent_citations": os.path.join(out_dir, "patent_citations.tsv"),
        "fields": os.path.join(out_dir, "fields.tsv"),
    }

    patent_ids = [f"p{i:05d}" for i in range(1, sizes.n_patents + 1)]
    patent_years = {}
    with open(paths["patents"], "w", encoding="utf-8") as fh:
        fh.write("id\tyear\tcpc\n")
        for pid in patent_ids:
            year = rng.randint(1950, 2019)
            patent_years[pid] = year
            codes = set()
            n_lcet = rng.choices((0, 1, 2), weights=(2, 6, 2))[0]
            for _ in range(n_lcet):
                codes.add(rng.choice(LCET_CODES))
            if rng.random() < 0.05:
                codes.add(rng.choice(MULTI_PURPOSE_CODES))
            codes.add(rng.choice(OTHER_CODES))
            fh.write(f"{pid}\t{year}\t{';'.join(sorted(codes))}\n")

    paper_ids = [f"a{i:05d}" for i in range(1, sizes.n_papers + 1)]
    with open(paths["papers"], "w", encoding="utf-8") as fh:
        fh.write("id\tyear\tfield\tdoi\ttitle\tvenue\tvenue_kind\n")
        for aid in paper_ids:
            year = rng.randint(1900, 2018)
            fieldless = rng.random() < 0.05
            fld = "" if fieldless else rng.choice(WOS_FIELDS)
            doi = f"10.1000/{aid}" if rng.random() < 0.7 else ""
            venue = f"Journal {rng.randint(1, 20)}" if rng.random() < 0.8 else ""
            kind = ("journal" if rng.random() < 0.8 else "conference") if venue else ""
            fh.write(f"{aid}\t{year}\t{fld}\t{doi}\tPaper {aid}\t{venue}\t{kind}\n")

    with open(paths["science_citations"], "w", encoding="utf-8") as fh:
        fh.write("patent_id\tpaper_id\tconfidence\torigin\tlocation\n")
        for _ in range(sizes.n_science_citations):
            pid = rng.choice(patent_ids)
            aid = rng.choice(paper_ids)
            conf = rng.choices(range(1, 11), weights=(1, 1, 2, 2, 3, 3, 4, 5, 6, 10))[0]
            origin = rng.choices(("applicant", "examiner", "unknown"), weights=(8, 1, 1))[0]
            location = rng.choices(("front", "body", "both"), weights=(5, 3, 2))[0]
            fh.write(f"{pid}\t{aid}\t{conf}\t{origin}\t{location}\n")

    with open(paths["patent_citations"], "w", encoding="utf-8") as fh:
        fh.write("citing_id\tcited_id\n")
        for _ in range(sizes.n_patent_citations):
            citing = rng.choice(patent_ids)
            cited = rng.choice(patent_ids)
            if citing == cited:
                continue
            fh.write(f"{citing}\t{cited}\n")

    with open(paths["fields"], "w", encoding="utf-8") as fh:
        for name in WOS_FIELDS:
            fh.write(name + "\n")

    return paths


CONFIG_TEMPLATE = """\
inputs:
  patents: {patents}
  papers: {papers}
  science_citations: {science_citations}
  patent_citations: {patent_citations}
  fields: {fields}
bounds:
  patent_years: [1836, 2019]
  paper_years: [1800, 2019]
subset:
  min_confidence: 4
network:
  periods: [[1976, 1990], [1991, 2005], [2006, 2019]]
  tech_schemes: [lcet10, cpc4]
  keep_fraction_similarity: 0.667
  keep_fraction_coupling: 0.25
metrics:
  window_width: 4
  window_anchor: end
variants:
  - name: cs10
    min_confidence: 10
  - name: single_class
    drop_coclassified: true
output_dir: {output_dir}
"""


def write_config(out_dir, paths: dict[str, str], output_dir: str = "out") -> str:
    cfg_path = os.path.join(out_dir, "config.yaml")
    with open(cfg_path, "w", encoding="utf-8") as fh:
        fh.write(
            CONFIG_TEMPLATE.format(
                patents=os.path.basename(paths["patents"]),
                papers=os.path.basename(paths["papers"]),
                science_citations=os.path.basename(paths["science_citations"]),
                patent_citations=os.path.basename(paths["patent_citations"]),
                fields=os.path.basename(paths["fields"]),
                output_dir=output_dir,
            )
        )
    return cfg_path
