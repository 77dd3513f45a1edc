"""Run configuration: one declarative YAML file drives a whole run.

Every knob the analysis leaves open (window anchor, keep fractions,
blocklist, periods, variant specs) lives here so a run is reproducible
from config plus inputs alone.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

import yaml

from .metrics import Window
from .robustness import VariantSpec
from .subset import DEFAULT_MIN_CONFIDENCE


class ConfigError(Exception):
    """Invalid or incomplete run configuration (CLI exit code 1)."""


DEFAULT_PERIODS = ((1976, 1990), (1991, 2005), (2006, 2019))


@dataclass
class RunConfig:
    patents_path: str
    papers_path: str
    science_citations_path: str
    patent_citations_path: str
    fields_path: Optional[str] = None
    blocklist_path: Optional[str] = None
    columns: dict[str, dict[str, str]] = field(default_factory=dict)
    patent_years: tuple[int, int] = (1836, 2019)
    paper_years: tuple[int, int] = (1800, 2019)
    max_bad_fraction: float = 0.01
    min_confidence: int = DEFAULT_MIN_CONFIDENCE
    periods: tuple[Window, ...] = ()
    window_width: int = 4
    window_anchor: str = "end"
    window_range: Optional[tuple[int, int]] = None
    tech_schemes: tuple[str, ...] = ("lcet10", "cpc4")
    keep_fraction_similarity: float = 2 / 3
    keep_fraction_coupling: float = 0.25
    top_k: int = 4
    variants: tuple[VariantSpec, ...] = ()
    output_dir: str = "out"
    workers: int = 1

    def input_paths(self) -> list[str]:
        paths = [
            self.patents_path,
            self.papers_path,
            self.science_citations_path,
            self.patent_citations_path,
        ]
        if self.fields_path:
            paths.append(self.fields_path)
        if self.blocklist_path:
            paths.append(self.blocklist_path)
        return paths


def _windows(pairs) -> tuple[Window, ...]:
    out = []
    for pair in pairs:
        try:
            start, end = int(pair[0]), int(pair[1])
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError(f"bad period {pair!r}") from exc
        if end < start:
            raise ConfigError(f"period {pair!r} ends before it starts")
        out.append(Window(start, end))
    for a in out:
        for b in out:
            if a is not b and a.start_year <= b.end_year and b.start_year <= a.end_year:
                raise ConfigError(f"overlapping periods {a.label()} and {b.label()}")
    return tuple(out)


def load_config(path, overrides: Optional[dict] = None) -> RunConfig:
    """Parse and validate the YAML config; CLI flag overrides win over the file."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc

    base_dir = os.path.dirname(os.path.abspath(path))

    def resolve(p: Optional[str]) -> Optional[str]:
        if p is None:
            return None
        return p if os.path.isabs(p) else os.path.join(base_dir, p)

    inputs = raw.get("inputs", {})
    for key in ("patents", "papers", "science_citations", "patent_citations"):
        if key not in inputs:
            raise ConfigError(f"config missing inputs.{key}")

    bounds = raw.get("bounds", {})
    sub = raw.get("subset", {})
    net = raw.get("network", {})
    met = raw.get("metrics", {})

    periods = _windows(net.get("periods", DEFAULT_PERIODS))
    variants = []
    for v in raw.get("variants", []):
        if "name" not in v:
            raise ConfigError("variant without a name")
        try:
            variants.append(
                VariantSpec(
                    name=str(v["name"]),
                    min_confidence=int(v.get("min_confidence", sub.get("min_confidence", DEFAULT_MIN_CONFIDENCE))),
                    drop_coclassified=bool(v.get("drop_coclassified", False)),
                    periods=_windows(v["periods"]) if "periods" in v else periods,
                )
            )
        except ValueError as exc:
            raise ConfigError(f"bad variant {v.get('name')!r}: {exc}") from exc

    window_range = met.get("window_range")

    cfg = RunConfig(
        patents_path=resolve(inputs["patents"]),
        papers_path=resolve(inputs["papers"]),
        science_citations_path=resolve(inputs["science_citations"]),
        patent_citations_path=resolve(inputs["patent_citations"]),
        fields_path=resolve(inputs.get("fields")),
        blocklist_path=resolve(inputs.get("blocklist")),
        columns={k: dict(v) for k, v in raw.get("columns", {}).items()},
        patent_years=tuple(bounds.get("patent_years", (1836, 2019))),
        paper_years=tuple(bounds.get("paper_years", (1800, 2019))),
        max_bad_fraction=float(bounds.get("max_bad_fraction", 0.01)),
        min_confidence=int(sub.get("min_confidence", DEFAULT_MIN_CONFIDENCE)),
        periods=periods,
        window_width=int(met.get("window_width", 4)),
        window_anchor=str(met.get("window_anchor", "end")),
        window_range=tuple(window_range) if window_range else None,
        tech_schemes=tuple(net.get("tech_schemes", ("lcet10", "cpc4"))),
        keep_fraction_similarity=float(net.get("keep_fraction_similarity", 2 / 3)),
        keep_fraction_coupling=float(net.get("keep_fraction_coupling", 0.25)),
        top_k=int(net.get("top_k", 4)),
        variants=tuple(variants),
        output_dir=resolve(raw.get("output_dir", "out")),
        workers=int(raw.get("workers", 1)),
    )

    for key, value in (overrides or {}).items():
        if value is not None:
            setattr(cfg, key, value)

    if not 1 <= cfg.min_confidence <= 10:
        raise ConfigError(f"min_confidence {cfg.min_confidence} outside [1, 10]")
    for scheme in cfg.tech_schemes:
        if scheme not in ("lcet10", "cpc4"):
            raise ConfigError(f"unknown tech scheme {scheme!r}")
    for p in cfg.input_paths():
        if not os.path.exists(p):
            raise ConfigError(f"input path does not exist: {p}")
    return cfg
