import numpy as np
import pytest

from lcetnet import robustness, subset
from lcetnet.metrics import Window
from lcetnet.netcore import SimilarityMatrix
from lcetnet.vocab import Lcet

from conftest import make_patent_cites, make_patents, make_papers, make_science


def world():
    patents = make_patents(
        [
            ("p1", 1980, {"Y02E10/541"}),
            ("p2", 1985, {"Y02E10/541", "Y02E10/72"}),
            ("p3", 2005, {"Y02E10/72"}),
        ]
    )
    papers = make_papers(
        [("a1", 1970, "Optics"), ("a2", 1975, "Energy & Fuels"), ("a3", 1990, "Optics")]
    )
    citations = make_science(
        [("p1", "a1", 10), ("p2", "a2", 5), ("p3", "a3", 10)]
    )
    assignments, _, analysis, _ = subset.run_subset(patents, papers, citations)
    return patents, assignments, analysis


def test_spec_validation():
    with pytest.raises(ValueError):
        robustness.VariantSpec(name="bad", min_confidence=0)
    with pytest.raises(ValueError):
        robustness.VariantSpec(name="bad", min_confidence=11)


def test_apply_variant_confidence_floor():
    patents, assignments, analysis = world()
    spec = robustness.VariantSpec(name="cs10", min_confidence=10)
    filtered = robustness.apply_variant(analysis, assignments, spec)
    assert {r.confidence for r in filtered} == {10}
    assert filtered.citing_patents() == {"p1", "p3"}
    # baseline untouched
    assert len(analysis) == 4


def test_apply_variant_drop_coclassified():
    patents, assignments, analysis = world()
    spec = robustness.VariantSpec(name="single", drop_coclassified=True)
    filtered = robustness.apply_variant(analysis, assignments, spec)
    # p2 carries PV and Wind tags and is dropped entirely
    assert filtered.citing_patents() == {"p1", "p3"}


def test_run_variant_reports_empty_periods():
    patents, assignments, analysis = world()
    spec = robustness.VariantSpec(
        name="v",
        periods=(Window(1976, 1990), Window(1991, 2000), Window(2001, 2019)),
    )
    cites = make_patent_cites([("p3", "p1")])
    out = robustness.run_variant(spec, analysis, assignments, cites)
    assert out.empty_periods == ["1991-2000"]
    assert set(out.similarity_sci) == {"1976-1990", "2001-2019"}
    assert out.similarity_sci["1976-1990"].period == "1976-1990"


def test_run_variant_uses_cpc4_when_patent_table_given():
    patents, assignments, analysis = world()
    spec = robustness.VariantSpec(name="v", periods=(Window(1976, 2019),))
    cites = make_patent_cites([("p3", "p1")])
    out = robustness.run_variant(spec, analysis, assignments, cites, patents=patents)
    sim = out.similarity_tech["1976-2019"]
    assert set(sim.labels) == {str(t) for t in Lcet}
    # p1 (cited) carries one Y02E code: Wind's row cites the Y02E class space
    assert sim.undefined  # most technologies make no patent citations here


def test_compare_combined_triangles():
    labels = ("a", "b", "c")
    base = SimilarityMatrix(
        values=np.array([[1.0, 0.8, 0.2], [0.8, 1.0, 0.5], [0.2, 0.5, 1.0]]),
        labels=labels,
        period="1976-1990",
    )
    var = SimilarityMatrix(
        values=np.array([[1.0, 0.7, 0.3], [0.7, 1.0, 0.6], [0.3, 0.6, 1.0]]),
        labels=labels,
        period="1976-1990",
    )
    report = robustness.compare(base, var)
    assert report.combined[0, 1] == 0.8  # upper = baseline
    assert report.combined[1, 0] == 0.7  # lower = variant
    assert report.max_abs_delta == pytest.approx(0.1)
    # same ordering of the off-diagonal entries in every row
    assert all(v == 1.0 for v in report.rank_agreement.values())


def test_compare_rank_disagreement():
    labels = ("a", "b", "c")
    base = SimilarityMatrix(
        values=np.array([[1.0, 0.9, 0.1], [0.9, 1.0, 0.5], [0.1, 0.5, 1.0]]),
        labels=labels,
    )
    flipped = SimilarityMatrix(
        values=np.array([[1.0, 0.1, 0.9], [0.1, 1.0, 0.5], [0.9, 0.5, 1.0]]),
        labels=labels,
    )
    report = robustness.compare(base, flipped)
    assert report.rank_agreement["a"] == 0.0


def test_compare_label_mismatch_fatal():
    a = SimilarityMatrix(values=np.eye(2), labels=("a", "b"))
    b = SimilarityMatrix(values=np.eye(2), labels=("a", "c"))
    with pytest.raises(ValueError, match="label"):
        robustness.compare(a, b)


def test_compare_period_mismatch_fatal():
    a = SimilarityMatrix(values=np.eye(2), labels=("a", "b"), period="1976-1990")
    b = SimilarityMatrix(values=np.eye(2), labels=("a", "b"), period="1991-2005")
    with pytest.raises(ValueError, match="period"):
        robustness.compare(a, b)
