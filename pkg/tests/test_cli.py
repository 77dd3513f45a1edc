import json

import pytest
from click.testing import CliRunner

from lcetnet.cli import main


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    runner = CliRunner()
    result = runner.invoke(main, ["gen-synthetic", "--out-dir", str(out), "--seed", "11"])
    assert result.exit_code == 0, result.output
    return out


def test_gen_synthetic_outputs(corpus):
    for name in (
        "patents.tsv",
        "papers.tsv",
        "science_citations.tsv",
        "patent_citations.tsv",
        "config.yaml",
    ):
        assert (corpus / name).exists(), name


def test_gen_synthetic_deterministic(tmp_path, corpus):
    result = CliRunner().invoke(
        main, ["gen-synthetic", "--out-dir", str(tmp_path), "--seed", "11"]
    )
    assert result.exit_code == 0
    for name in ("patents.tsv", "papers.tsv", "science_citations.tsv", "patent_citations.tsv"):
        assert (tmp_path / name).read_bytes() == (corpus / name).read_bytes(), name


def test_gen_synthetic_rejects_bad_sizes(tmp_path):
    result = CliRunner().invoke(
        main, ["gen-synthetic", "--out-dir", str(tmp_path), "--patents", "0"]
    )
    assert result.exit_code == 1


def test_missing_config_exits_one(tmp_path):
    result = CliRunner().invoke(main, ["ingest", "-c", str(tmp_path / "nope.yaml")])
    assert result.exit_code == 1
    assert "config error" in result.output


def test_invalid_config_exits_one(tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("inputs:\n  patents: missing.tsv\n")
    result = CliRunner().invoke(main, ["ingest", "-c", str(cfg)])
    assert result.exit_code == 1


def test_bad_min_confidence_exits_one(corpus):
    result = CliRunner().invoke(
        main, ["subset", "-c", str(corpus / "config.yaml"), "--min-confidence", "99"]
    )
    assert result.exit_code == 1


def test_unparseable_input_exits_two(tmp_path, corpus):
    for name in (
        "config.yaml",
        "papers.tsv",
        "science_citations.tsv",
        "patent_citations.tsv",
        "fields.tsv",
    ):
        (tmp_path / name).write_bytes((corpus / name).read_bytes())
    (tmp_path / "patents.tsv").write_text(
        "id\tyear\tcpc\n" + "".join(f"p{i}\tnope\tY02E10/50\n" for i in range(20))
    )
    cfg = tmp_path / "config.yaml"
    result = CliRunner().invoke(
        main, ["ingest", "-c", str(cfg), "--output-dir", str(tmp_path / "out")]
    )
    assert result.exit_code == 2
    assert "parse error" in result.output


def test_all_pipeline_and_manifest(tmp_path, corpus):
    out = tmp_path / "run"
    result = CliRunner().invoke(
        main, ["all", "-c", str(corpus / "config.yaml"), "--output-dir", str(out)]
    )
    assert result.exit_code == 0, result.output
    manifest = json.loads((out / "manifest.json").read_text())
    assert "subset/analysis.tsv" in manifest
    assert any(k.startswith("network/sim_sci_") for k in manifest)
    assert any(k.startswith("metrics/") for k in manifest)
    assert all(len(v) == 64 for v in manifest.values())


def test_rerun_is_cached_and_identical(tmp_path, corpus):
    out = tmp_path / "run"
    args = ["all", "-c", str(corpus / "config.yaml"), "--output-dir", str(out)]
    assert CliRunner().invoke(main, args).exit_code == 0
    first = (out / "manifest.json").read_text()
    mtime = (out / "subset" / "analysis.tsv").stat().st_mtime_ns
    assert CliRunner().invoke(main, args).exit_code == 0
    assert (out / "manifest.json").read_text() == first
    # cached stage did not rewrite its outputs
    assert (out / "subset" / "analysis.tsv").stat().st_mtime_ns == mtime


def test_min_confidence_override_changes_subset(tmp_path, corpus):
    cfg = str(corpus / "config.yaml")
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out, floor in ((out_a, "1"), (out_b, "10")):
        result = CliRunner().invoke(
            main,
            ["subset", "-c", cfg, "--output-dir", str(out), "--min-confidence", floor],
        )
        assert result.exit_code == 0, result.output
    loose = json.loads((out_a / "subset" / "summary.json").read_text())
    strict = json.loads((out_b / "subset" / "summary.json").read_text())
    assert loose["joined_rows"] > strict["joined_rows"]
