import logging
import sys
from pathlib import Path
from typing import Callable, Optional, Tuple

import click
from dotenv import load_dotenv

from src.cli.dependencies import get_cli_service
from src.cli.schemas import ResultBundle
from src.config import settings
from src.exceptions import EXIT_OK, EXIT_VALIDATION, AppException
from src.utils.logging import configure_logging

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger("src.main")

config_option = click.option(
    "--config", "config_path", required=True,
    type=click.Path(dir_okay=False, path_type=Path), help="JSON run configuration",
)
out_option = click.option(
    "--out", "out_dir", required=True,
    type=click.Path(file_okay=False, path_type=Path), help="Output directory",
)
seed_option = click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Base seed (u64)")
reps_option = click.option("--reps", type=click.IntRange(min=1), default=None, help="Replicates per cell")


def _execute(action: Callable[[], ResultBundle]) -> None:
    """Run a command and translate the outcome into an exit code."""
    try:
        bundle = action()
    except AppException as exc:
        click.secho(f"error: {exc.detail}", fg="red", err=True)
        logger.error(exc.detail)
        sys.exit(exc.exit_code)
    except (OSError, ValueError) as exc:
        click.secho(f"error: {exc}", fg="red", err=True)
        logger.error("%s", exc)
        sys.exit(EXIT_VALIDATION)

    colour = "green" if bundle.exit_code == EXIT_OK else "yellow"
    logger.info(click.style(
        f"{bundle.manifest.command} finished in {bundle.manifest.wall_time_s:.1f}s -> {bundle.out_dir}",
        fg=colour,
    ))
    for name in bundle.files:
        click.echo(str(Path(bundle.out_dir) / name))
    for failure in bundle.manifest.failures:
        click.secho(f"failed: {failure['scenario']} / {failure['model']}: {failure['error']}", fg="yellow", err=True)
    sys.exit(bundle.exit_code)


@click.group()
@click.option("--log-level", default=None, help="Overrides BUPD_LOG_LEVEL")
@click.version_option(settings.VERSION, prog_name=settings.PROJECT_NAME)
def cli(log_level: Optional[str]) -> None:
    """Bayesian basket-trial analysis, cutoff calibration and operating-characteristic simulation."""
    used_ini = configure_logging(level=log_level.upper() if log_level else None)
    logger.debug("Logging configured from %s", settings.LOG_CONFIG if used_ini else "basicConfig")


@cli.command()
@config_option
@click.option("--model", "models", multiple=True, help="Model name or kind; repeatable")
@seed_option
@out_option
def analyze(config_path: Path, models: Tuple[str, ...], seed: Optional[int], out_dir: Path) -> None:
    """Fit models to observed trial data."""
    service = get_cli_service()
    _execute(lambda: service.cmd_analyze(service.load_analyze(config_path, models, seed), out_dir))


@cli.command()
@config_option
@click.option("--model", "models", multiple=True, help="Model name or kind; repeatable")
@click.option("--alpha", type=float, default=None, help="Target per-type type-1 error")
@reps_option
@seed_option
@out_option
def calibrate(
    config_path: Path,
    models: Tuple[str, ...],
    alpha: Optional[float],
    reps: Optional[int],
    seed: Optional[int],
    out_dir: Path,
) -> None:
    """Calibrate decision cutoffs under the all-null scenario."""
    service = get_cli_service()
    _execute(lambda: service.cmd_calibrate(service.load_calibrate(config_path, models, alpha, reps, seed), out_dir))


@cli.command()
@config_option
@click.option(
    "--cutoffs", "cutoffs_path", default=None,
    type=click.Path(dir_okay=False, path_type=Path), help="Cutoffs JSON (e.g. a calibrate bundle)",
)
@reps_option
@seed_option
@out_option
def simulate(
    config_path: Path,
    cutoffs_path: Optional[Path],
    reps: Optional[int],
    seed: Optional[int],
    out_dir: Path,
) -> None:
    """Operating characteristics over a scenario x model grid."""
    service = get_cli_service()
    _execute(lambda: service.cmd_simulate(service.load_simulate(config_path, cutoffs_path, reps, seed), out_dir))


@cli.command()
@click.option(
    "--manifest", "manifest_path", required=True,
    type=click.Path(dir_okay=False, path_type=Path), help="manifest.json of an earlier run",
)
@out_option
def rerun(manifest_path: Path, out_dir: Path) -> None:
    """Re-execute a run from its manifest."""
    service = get_cli_service()
    _execute(lambda: service.rerun(manifest_path, out_dir))


if __name__ == "__main__":
    cli()
