"""
Command Line Interface for dilutehom.
"""

import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import click
import numpy as np

from . import __version__
from .checks import CheckContext, CheckRegistry
from .core.config import OUTPUT_FORMATS, SOLVER_METHODS, Config
from .core.errors import ConfigError, DilutehomError, NumericalError, ValidationError
from .core.results import CheckStatus, ResultTable, checks_table
from .disk import rate_sweep, solve_instance
from .geometry.curves import parse_shape
from .green.torus import TorusGreen, check_R_expansion
from .homogenization.sweeps import cell_sweep, continuity_scan, tensor_table
from .reporters import ReporterFactory


logger = logging.getLogger("dilutehom.cli")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _setup_logging(verbose: bool) -> None:
    root = logging.getLogger("dilutehom")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)
    logging.captureWarnings(True)


def _float_list(ctx, param, value: Optional[str]) -> Optional[List[float]]:
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}")


def _config(ctx) -> Config:
    return ctx.obj["config"]


def _apply_cell_options(
    config: Config,
    shape: Optional[str] = None,
    etas: Optional[List[float]] = None,
    method: Optional[str] = None,
    nodes: Optional[int] = None,
) -> Config:
    if shape is not None:
        config.geometry.shape = shape
    if etas is not None:
        config.sweep.etas = etas
    if method is not None:
        config.solver.method = method
    if nodes is not None:
        config.geometry.n_nodes = nodes
    return config.ensure_valid()


def _solver_options(config: Config) -> dict:
    return {
        "method": config.solver.method,
        "series_terms": config.solver.series_terms,
        "series_max_eta": config.solver.series_max_eta,
        "max_upsample": config.solver.max_upsample,
    }


def _emit(
    config: Config,
    command: str,
    table: ResultTable,
    outs: Sequence[str],
    save: bool = False,
    y_columns: Optional[List[str]] = None,
    x_column: Optional[str] = None,
) -> None:
    """
    Write ``table`` to every ``--out`` path (format from the suffix) and, with
    ``--save``, to every configured format in the output directory. Without
    either the CSV goes to stdout.
    """
    factory = ReporterFactory(command, config.to_dict())
    targets = []
    for path in outs:
        fmt = Path(path).suffix.lstrip(".").lower()
        if fmt not in OUTPUT_FORMATS:
            raise ConfigError(
                f"cannot infer an output format from {path!r}; use one of {list(OUTPUT_FORMATS)}"
            )
        targets.append((fmt, Path(path)))
    if save:
        directory = Path(config.output.directory)
        targets.extend((fmt, directory / f"{table.name}.{fmt}") for fmt in config.output.formats)

    if not targets:
        click.echo(factory.create_reporter("csv").render(table), nl=False)
        return
    for fmt, path in targets:
        written = factory.create_reporter(fmt, y_columns, x_column).write(table, str(path))
        logger.info(f"Wrote {fmt} report to {written}")


out_option = click.option(
    "--out", "-o", "outs",
    multiple=True,
    type=click.Path(dir_okay=False),
    help="Output file; format from the suffix (.csv, .json, .svg). Repeatable.",
)
save_option = click.option(
    "--save",
    is_flag=True,
    help="Write every configured output format into output.directory",
)
shape_option = click.option("--shape", help="Hole shape, e.g. circle:0.25 or ellipse:0.3,0.15")
eta_option = click.option("--eta", "etas", callback=_float_list, help="Comma-separated η values")


@click.group()
@click.version_option(version=__version__, prog_name="dilutehom")
@click.option(
    "--config", "-c",
    type=click.Path(exists=True, dir_okay=False),
    help="Path to configuration file"
)
@click.option(
    "--verbose", "-v",
    is_flag=True,
    help="Enable verbose output"
)
@click.option(
    "--jobs", "-j",
    type=click.IntRange(min=1),
    help="Worker processes for sweeps"
)
@click.pass_context
def cli(ctx, config: Optional[str], verbose: bool, jobs: Optional[int]):
    """
    dilutehom

    Boundary-integral homogenization of periodically perforated media with dilute holes.
    """
    ctx.ensure_object(dict)

    cfg = Config.load_from_file(config) if config else Config()
    if verbose:
        cfg.output.verbose = True
    if jobs is not None:
        cfg.output.jobs = jobs

    _setup_logging(cfg.output.verbose)
    ctx.obj["config"] = cfg


@cli.command()
@click.option("--check-expansion", is_flag=True, help="Fit the expansion of R near the origin")
@click.option(
    "--radii",
    callback=_float_list,
    default="0.2,0.1,0.05,0.025",
    show_default=True,
    help="Radii of the expansion fit",
)
@click.option(
    "--grid", "grid_size",
    type=click.IntRange(min=1),
    default=8,
    show_default=True,
    help="Points per axis of the G table",
)
@out_option
@save_option
@click.pass_context
def green(ctx, check_expansion: bool, radii: List[float], grid_size: int, outs, save: bool):
    """
    Evaluate the periodic Green's function G and its regular part R.
    """
    config = _config(ctx).ensure_valid()
    g = TorusGreen.from_config(config.green)

    if check_expansion:
        fit = check_R_expansion(g, radii)
        click.echo(f"R(0) = {fit.r0:.17g}")
        click.echo(f"slope = {fit.slope:.17g}")
        click.echo(f"quadratic coefficient = {fit.quadratic_coefficient:.17g}")
        table = ResultTable("expansion", ("radius", "direction", "residual"))
        for row in fit.rows:
            table.add_row(*row)
        table.summary = fit.to_dict()
        table.summary.pop("rows")
        if outs or save:
            _emit(config, "green", table, outs, save, y_columns=["residual"])
        return 0

    # shifted by a quarter step so no node sits on the lattice point
    axis = (np.arange(grid_size) + 0.25) / grid_size - 0.5
    points = [(float(x), float(y)) for x in axis for y in axis]
    table = ResultTable("green", ("x", "y", "G", "R"))
    for row in g.table(points):
        table.add_row(*row)
    table.summary = {"r0": g.r0, "splitting": g.splitting_parameter}
    _emit(config, "green", table, outs, save)
    return 0


@cli.command()
@shape_option
@eta_option
@click.option("--method", type=click.Choice(SOLVER_METHODS), help="Cell solver")
@click.option("--nodes", type=int, help="Boundary nodes per hole component")
@out_option
@save_option
@click.pass_context
def cell(ctx, shape, etas, method, nodes, outs, save: bool):
    """
    Solve the cell problem over an η sweep and report residuals and norms.
    """
    config = _apply_cell_options(_config(ctx), shape, etas, method, nodes)
    hole = parse_shape(config.geometry.shape, config.geometry.n_nodes)
    table = cell_sweep(
        hole,
        config.sweep.etas,
        green=TorusGreen.from_config(config.green),
        jobs=config.output.jobs,
        **_solver_options(config),
    )
    _emit(config, "cell", table, outs, save, y_columns=["l2_grad_chi", "expansion_gap"], x_column="eta")
    return 0


@cli.command()
@shape_option
@eta_option
@click.option("--method", type=click.Choice(SOLVER_METHODS), help="Cell solver")
@click.option("--nodes", type=int, help="Boundary nodes per hole component")
@click.option("--continuity", is_flag=True, help="Scan Ā on the η grid with adjacent jumps instead")
@out_option
@save_option
@click.pass_context
def tensor(ctx, shape, etas, method, nodes, continuity: bool, outs, save: bool):
    """
    Compute the effective tensor Ā(η) and its dilute expansion residual.
    """
    config = _apply_cell_options(_config(ctx), shape, etas, method, nodes)
    hole = parse_shape(config.geometry.shape, config.geometry.n_nodes)
    green_fn = TorusGreen.from_config(config.green)
    if continuity:
        table = continuity_scan(hole, config.sweep.etas, green=green_fn, jobs=config.output.jobs)
    else:
        table = tensor_table(
            hole, config.sweep.etas, green=green_fn, jobs=config.output.jobs, **_solver_options(config)
        )
    _emit(config, "tensor", table, outs, save, y_columns=["residual"] if not continuity else None)
    return 0


@cli.command()
@shape_option
@click.option("--epsilon", type=float, help="Lattice period ε")
@click.option("--eta", type=float, help="Hole scale η")
@out_option
@save_option
@click.pass_context
def solve(ctx, shape, epsilon: Optional[float], eta: Optional[float], outs, save: bool):
    """
    Solve one perforated-disk instance and write the fields on the sampling grid.
    """
    config = _config(ctx)
    if shape is not None:
        config.geometry.shape = shape
    if epsilon is not None:
        config.sweep.epsilons = [epsilon]
    if eta is not None:
        config.sweep.etas = [eta]
    config.ensure_valid()

    disk = config.disk
    instance = solve_instance(
        parse_shape(config.geometry.shape, config.geometry.n_nodes),
        config.sweep.epsilons[0],
        config.sweep.etas[0],
        green=TorusGreen.from_config(config.green),
        outer_radius=disk.outer_radius,
        f=disk.f,
        g=disk.g,
        boundary_nodes=disk.boundary_nodes,
        hole_nodes=disk.hole_nodes,
        radial_samples=disk.radial_samples,
        angular_samples=disk.angular_samples,
        max_upsample=config.solver.max_upsample,
    )
    table = instance.field_table()
    logger.info(
        f"zeta={table.summary['zeta_norm']:.3e}, u-u0={table.summary['uu_norm']:.3e} "
        f"on {table.summary['n_holes']} holes"
    )
    _emit(config, "solve", table, outs, save)
    return 0


@cli.command()
@shape_option
@click.option("--epsilon", "epsilons", callback=_float_list, help="Comma-separated ε values")
@eta_option
@out_option
@save_option
@click.pass_context
def rates(ctx, shape, epsilons, etas, outs, save: bool):
    """
    Sweep (ε, η) pairs and compare ‖ζ^ε‖ with the bound of each regime.
    """
    config = _config(ctx)
    if shape is not None:
        config.geometry.shape = shape
    if epsilons is not None:
        config.sweep.epsilons = epsilons
    if etas is not None:
        config.sweep.etas = etas
    config.ensure_valid()

    report = rate_sweep(config, jobs=config.output.jobs)
    _emit(config, "rates", report.to_table(), outs, save, y_columns=["zeta_norm", "bound"], x_column="eta")
    return 0


@cli.command()
@click.option("--only", multiple=True, help="Run only the named check (repeatable)")
@click.option("--skip-slow", is_flag=True, help="Skip checks marked slow")
@click.option(
    "--perturb-weight",
    type=float,
    default=0.0,
    help="Debug hook: scale one quadrature weight of the reference circle by (1 + DELTA)",
)
@click.option("--json", "json_path", type=click.Path(dir_okay=False), help="Also write a JSON report")
@click.option("--no-color", is_flag=True, help="Disable colored output")
@click.pass_context
def selftest(ctx, only, skip_slow: bool, perturb_weight: float, json_path: Optional[str], no_color: bool):
    """
    Run the acceptance checks and print a pass/fail table.
    """
    config = _config(ctx).ensure_valid()
    registry = CheckRegistry(CheckContext(config=config, perturb_weight=perturb_weight))
    results = registry.run(only=only, skip_slow=skip_slow)
    table = checks_table(results)

    factory = ReporterFactory("selftest", config.to_dict(), color_output=not no_color)
    click.echo(factory.create_reporter("console").render(table), nl=False)
    if json_path:
        factory.create_reporter("json").write(table, json_path)

    return 1 if any(r.status is CheckStatus.FAIL for r in results) else 0


@cli.command("init-config")
@click.option(
    "--output", "-o",
    default="dilutehom.yaml",
    show_default=True,
    help="Output configuration file path"
)
def init_config(output: str):
    """
    Generate a default configuration file.
    """
    Config().save_to_file(output)
    click.echo(f"Default configuration saved to: {output}")
    click.echo("Edit this file to customize shapes, sweeps and solver settings.")
    return 0


@cli.command("list-checks")
def list_checks():
    """
    List all available selftest checks.
    """
    registry = CheckRegistry()
    click.echo("Available checks:")
    click.echo("=" * 50)
    for name, description in registry.describe().items():
        click.echo(f"{name:<30} {description}")
    return 0


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI and return its exit code.

    0 on success, 1 on failed checks or unexpected errors, 2 on invalid input,
    3 on numerical failure and 130 when interrupted.
    """
    args = list(argv) if argv is not None else sys.argv[1:]
    try:
        rv = cli.main(args=args, prog_name="dilutehom", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        click.echo("\nInterrupted by user", err=True)
        return 130
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except (ValidationError, NumericalError) as e:
        click.echo(f"Error: {e}", err=True)
        return e.exit_code
    except DilutehomError as e:
        click.echo(f"Error: {e}", err=True)
        return 1
    except KeyboardInterrupt:
        click.echo("\nInterrupted by user", err=True)
        return 130
    except Exception as e:
        logger.debug("Unexpected error", exc_info=True)
        click.echo(f"Error: unexpected {type(e).__name__}: {e}", err=True)
        return 1
    return rv if isinstance(rv, int) else 0


def main():
    """Main entry point for the CLI."""
    sys.exit(run())


if __name__ == "__main__":
    main()
