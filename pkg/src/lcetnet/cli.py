"""Command-line entry point.

Exit codes: 1 = config error, 2 = input parse failure beyond threshold,
3 = internal invariant violation.
"""

from __future__ import annotations

import logging
import sys

import click

from .config import ConfigError, load_config
from .ingest import ParseError
from .pipeline import InvariantViolation, Runner
from .synthetic import SyntheticSizes, generate_corpus, write_config

log = logging.getLogger(__name__)


def _runner(config, min_confidence, output_dir) -> Runner:
    overrides = {}
    if min_confidence is not None:
        overrides["min_confidence"] = min_confidence
    if output_dir is not None:
        overrides["output_dir"] = output_dir
    cfg = load_config(config, overrides)
    return Runner(cfg)


def _stage(name):
    """Wrap a stage command with the shared flags and exit-code mapping."""

    def decorator(func):
        @click.command(name=name)
        @click.option("--config", "-c", required=True, type=click.Path(), help="Run config file.")
        @click.option("--min-confidence", type=int, default=None, help="Override the CS floor.")
        @click.option("--output-dir", type=click.Path(), default=None, help="Override the output directory.")
        @click.option("--verbose", "-v", is_flag=True, help="Log per-row diagnostics.")
        def wrapper(config, min_confidence, output_dir, verbose):
            logging.basicConfig(
                level=logging.INFO if verbose else logging.WARNING,
                format="%(levelname)s %(name)s %(message)s",
            )
            try:
                runner = _runner(config, min_confidence, output_dir)
                func(runner)
            except ConfigError as exc:
                click.echo(f"config error: {exc}", err=True)
                sys.exit(1)
            except ParseError as exc:
                click.echo(f"parse error: {exc}", err=True)
                sys.exit(2)
            except InvariantViolation as exc:
                click.echo(f"invariant violated: {exc}", err=True)
                sys.exit(3)

        return wrapper

    return decorator


@_stage("ingest")
def cmd_ingest(runner: Runner):
    """Parse and validate the input tables."""
    for path in runner.run_ingest():
        click.echo(path)


@_stage("subset")
def cmd_subset(runner: Runner):
    """Run the four-step LCET subsetting pipeline."""
    for path in runner.run_subset_stage():
        click.echo(path)


@_stage("network")
def cmd_network(runner: Runner):
    """Build layers, projections, similarity and coupling networks."""
    for path in runner.run_network():
        click.echo(path)


@_stage("metrics")
def cmd_metrics(runner: Runner):
    """Compute time-series and aggregate statistics."""
    for path in runner.run_metrics():
        click.echo(path)


@_stage("robustness")
def cmd_robustness(runner: Runner):
    """Re-run the network analysis under the configured variants."""
    for path in runner.run_robustness():
        click.echo(path)


@_stage("export")
def cmd_export(runner: Runner):
    """Write the output manifest with content digests."""
    click.echo(runner.run_export())


@_stage("all")
def cmd_all(runner: Runner):
    """Run every stage and write the manifest."""
    click.echo(runner.run_all())


@click.command(name="gen-synthetic")
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--out-dir", type=click.Path(), required=True)
@click.option("--patents", "n_patents", type=int, default=200, show_default=True)
@click.option("--papers", "n_papers", type=int, default=300, show_default=True)
@click.option("--science-citations", "n_sci", type=int, default=600, show_default=True)
@click.option("--patent-citations", "n_pat", type=int, default=800, show_default=True)
def cmd_gen_synthetic(seed, out_dir, n_patents, n_papers, n_sci, n_pat):
    """Generate a reproducible synthetic corpus plus a ready config file."""
    if min(n_patents, n_papers, n_sci, n_pat) <= 0:
        click.echo("sizes must be positive", err=True)
        sys.exit(1)
    sizes = SyntheticSizes(
        n_patents=n_patents,
        n_papers=n_papers,
        n_science_citations=n_sci,
        n_patent_citations=n_pat,
    )
    paths = generate_corpus(out_dir, seed=seed, sizes=sizes)
    cfg_path = write_config(out_dir, paths)
    for path in list(paths.values()) + [cfg_path]:
        click.echo(path)


@click.group()
def main():
    """Patent-science citation network analytics for low-carbon energy technologies."""


main.add_command(cmd_ingest)
main.add_command(cmd_subset)
main.add_command(cmd_network)
main.add_command(cmd_metrics)
main.add_command(cmd_robustness)
main.add_command(cmd_export)
main.add_command(cmd_all)
main.add_command(cmd_gen_synthetic)


if __name__ == "__main__":
    main()
