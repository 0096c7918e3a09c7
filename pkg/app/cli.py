"""Command-line front end.

Exit codes: 0 success, 1 failed verification, 2 bad usage or input,
3 size guard refusal.
"""
import functools
from pathlib import Path
from typing import Optional

import click
import structlog
import uvicorn

from app.api.models import SUITES
from app.poset import memory_estimate
from app.services.export_service import ExportService
from app.services.poset_service import CHECKS, PosetService
from app.services.verification_service import VerificationService
from app.utils.config_loader import CONFIG
from app.utils.exceptions import PosetError, SizeGuardError

logger = structlog.get_logger(__name__)

EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_SIZE_GUARD = 3

export = ExportService()


def guarded(command):
    """Map domain errors onto the exit-code contract."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except SizeGuardError as e:
            logger.info("Size guard refused command", command=ctx.command.name, detail=e.detail)
            click.echo(f"Error: {e.detail}", err=True)
            ctx.exit(EXIT_SIZE_GUARD)
        except PosetError as e:
            logger.info("Command rejected", command=ctx.command.name, error=type(e).__name__, detail=e.detail)
            click.echo(f"Error: {e.detail}", err=True)
            ctx.exit(EXIT_USAGE)
    return wrapper


def emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        export.write(text, out)


def announce_force(n: int, force: bool) -> None:
    if force and n > CONFIG['MAX_POSET_N']:
        estimate = memory_estimate(n) / 2 ** 20
        click.echo(f"PF_{n}: forcing past MAX_POSET_N={CONFIG['MAX_POSET_N']}, "
                   f"estimated memory {estimate:.1f} MiB", err=True)


n_option = click.option("--n", "n", type=click.IntRange(min=0), required=True, help="Matrix size n of PF_n.")
out_option = click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), default=None,
                          help="Write output to PATH instead of stdout.")
force_option = click.option("--force", is_flag=True, help="Override the configured size guard.")


@click.group()
def cli():
    """Bruhat poset of partial fixed-point-free involutions."""


@cli.command("enumerate")
@n_option
@click.option("--arcs", type=int, default=None, help="Only elements with this many arcs.")
@click.option("--format", "fmt", type=click.Choice(["oneline", "json"]), default="oneline")
@out_option
@guarded
def enumerate_command(n, arcs, fmt, out):
    """List the elements of PF_n in canonical order."""
    response = PosetService().enumerate(n, arcs)
    if fmt == "json":
        emit(export.to_json(response.elements), out)
    else:
        emit(export.lines(",".join(str(v) for v in w) for w in response.elements), out)


@cli.command()
@n_option
@click.option("--labels", is_flag=True, help="Label edges with the EL-labeling.")
@click.option("--highlight", is_flag=True, help="Colour the increasing chain from bottom to top.")
@click.option("--format", "fmt", type=click.Choice(["dot", "json"]), default="dot")
@force_option
@out_option
@guarded
def hasse(n, labels, highlight, fmt, force, out):
    """Export the Hasse diagram."""
    announce_force(n, force)
    response = PosetService(force=force).hasse(n, labels=labels, highlight=highlight)
    emit(export.hasse_dot(response) if fmt == "dot" else export.to_json(response), out)


@cli.command("compare")
@n_option
@click.option("--x", "x", required=True, help="First element, e.g. 2,1,0,0.")
@click.option("--y", "y", required=True, help="Second element.")
@guarded
def compare_command(n, x, y):
    """Print <, >, = or incomparable."""
    click.echo(PosetService().compare(n, x, y).relation)


@cli.command("interval")
@n_option
@click.option("--x", "x", required=True, help="Bottom of the interval.")
@click.option("--y", "y", required=True, help="Top of the interval.")
@click.option("--check-el", is_flag=True, help="Verify the EL conditions on the interval.")
@force_option
@out_option
@guarded
def interval_command(n, x, y, check_el, force, out):
    """List the members of [x, y]."""
    announce_force(n, force)
    response = PosetService(force=force).interval(n, x, y, check_el=check_el)
    lines = [f"# [{response.bottom}] .. [{response.top}]: size {response.size}, length {response.length}"]
    lines.extend(response.members)
    if response.el is not None:
        lines.append(f"# increasing_chains={response.el.increasing_chains} "
                     f"lex_smallest={'ok' if response.el.lex_smallest_ok else 'violated'}")
    emit(export.lines(lines), out)
    if response.el is not None and not response.el.passed:
        click.get_current_context().exit(EXIT_FAILED)


@cli.command()
@n_option
@click.option("--suite", type=click.Choice(SUITES + ["all"]), default="all")
@click.option("--json", "as_json", is_flag=True, help="Print machine-readable envelopes.")
@force_option
@out_option
@guarded
def verify(n, suite, as_json, force, out):
    """Run a verification suite; exit 0 iff it passes."""
    announce_force(n, force)
    reports = VerificationService(force=force).run(n, suite)
    if as_json:
        emit(export.to_json(reports if len(reports) > 1 else reports[0]), out)
    else:
        lines = []
        for report in reports:
            lines.append(f"{report.suite} n={report.n}: {'PASS' if report.passed else 'FAIL'}")
            lines.extend(f"  - {failure}" for failure in report.failures)
        emit(export.lines(lines), out)
    if not all(report.passed for report in reports):
        click.get_current_context().exit(EXIT_FAILED)


@cli.command()
@n_option
@click.option("--k", "k", type=int, default=None, help="Only the row for k arcs.")
@click.option("--check", type=click.Choice(list(CHECKS)), default=None)
@out_option
@guarded
def polys(n, k, check, out):
    """CSV table of the length generating functions."""
    response = PosetService().polys(n, k, check)
    emit(export.polys_csv(response.rows), out)
    for name, ok in response.checks.items():
        click.echo(f"{name}: {'ok' if ok else 'FAILED'}", err=True)
    if not all(response.checks.values()):
        click.get_current_context().exit(EXIT_FAILED)


@cli.command()
@n_option
@click.option("--q", "q", type=int, required=True, help="Field size.")
@click.option("--oracle", is_flag=True, help="Compare against an exhaustive census over F_q.")
@force_option
@out_option
@guarded
def zeta(n, q, oracle, force, out):
    """Point counts of alternating matrices by rank."""
    response = PosetService(force=force).zeta(n, q, oracle)
    emit(export.to_json(response), out)
    if response.agrees is False:
        click.get_current_context().exit(EXIT_FAILED)


@cli.command("mobius")
@n_option
@click.option("--x", "x", default=None, help="Bottom element (default: minimum).")
@click.option("--y", "y", default=None, help="Top element (default: maximum).")
@force_option
@guarded
def mobius_command(n, x, y, force):
    """Möbius function μ(x, y)."""
    if (x is None) != (y is None):
        raise click.UsageError("--x and --y must be given together")
    announce_force(n, force)
    click.echo(PosetService(force=force).mobius(n, x, y).mobius)


@cli.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP API."""
    uvicorn.run("app.main:app", host=host, port=port)


if __name__ == "__main__":
    cli()
