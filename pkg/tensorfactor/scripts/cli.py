"""Typer CLI for tensorfactor.

Commands:
    simulate: Draw a data set from a reference setting and write every component to a directory.
    estimate: Read a series, run one method, and write loadings, factors, residuals and diagnostics.
    bench: Run a Monte Carlo experiment config and write the records and summary CSVs.
    signal: Print population (and optionally estimated) signal strengths across lag counts.
"""

import logging
import sys
from enum import IntEnum, unique
from pathlib import Path

import click
import numpy as np
import pandas as pd
import typer
from beartype.typing import Callable, List, Optional, Sequence, TypeVar
from pydantic import ValidationError

from .. import __version__
from ..bench.config import load_experiment_config
from ..bench.records import write_records
from ..bench.runner import run_experiment
from ..bench.summary import write_summary
from ..errors import TensorFactorError, UnknownPresetError
from ..estimators.diagnostics import Normalization
from ..estimators.moments import Flavor
from ..iterative.config import IterConfig
from ..iterative.engine import run as run_estimator
from ..simulation.generator import generate
from ..simulation.models import Setting, preset
from ..simulation.population import population_signal
from ..tensor.io import read_series, write_series

logger = logging.getLogger(__name__)

T_ = TypeVar("T_")

app = typer.Typer(name="tensorfactor", add_completion=False, help="Tensor factor model estimation.")


@unique
class ExitCode(IntEnum):
    """Process exit codes."""

    SUCCESS = 0
    USAGE = 1
    RUNTIME = 2


def _parse_list(text: str, cast: Callable[[str], T_], name: str) -> List[T_]:
    try:
        values = [cast(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError:
        raise typer.BadParameter(f"expected a comma-separated list, got {text!r}", param_hint=name) from None
    if not values:
        raise typer.BadParameter("expected at least one value", param_hint=name)
    return values


def _setting(value: str) -> Setting:
    try:
        return Setting.parse(value)
    except UnknownPresetError as err:
        raise typer.BadParameter(str(err), param_hint="--setting") from None


def _normalization(value: str) -> Normalization:
    try:
        return Normalization(value)
    except ValueError:
        raise typer.BadParameter(f"expected paper_eq or figure, got {value!r}", param_hint="--normalization") from None


def _write_matrix(matrix: np.ndarray, path: Path) -> None:
    pd.DataFrame(matrix).to_csv(path, header=False, index=False, float_format="%.17g", lineterminator="\n")


@app.callback()
def main_callback(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at DEBUG level."),
) -> None:
    """Tensor factor model estimation with TOPUP, TIPUP and their iterative refinements."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@app.command()
def simulate(
    setting: str = typer.Option("I", help="Reference setting: I, II or III."),
    lambda_: float = typer.Option(1.0, "--lambda", help="Signal scale."),
    T: int = typer.Option(256, "--T", "-T", help="Series length."),
    seed: int = typer.Option(0, help="Master seed."),
    rep: int = typer.Option(0, help="Replication index."),
    dims: Optional[str] = typer.Option(None, help="Comma-separated dimensions; defaults to 16,16."),
    out_dir: Path = typer.Option(Path("."), "--out-dir", "-o", help="Directory to write into."),
) -> None:
    """Draw one data set and write the observed, signal, noise and factor series plus the true loadings."""
    dim_list = _parse_list(dims, int, "--dims") if dims is not None else [16, 16]
    spec = preset(_setting(setting), lambda_=lambda_, T=T, seed=seed, dims=tuple(dim_list))
    truth = generate(spec, replication=rep)

    out_dir.mkdir(parents=True, exist_ok=True)
    write_series(truth.observed_series, out_dir / "series.bin")
    write_series(truth.signal_series, out_dir / "signal.bin")
    write_series(truth.noise_series, out_dir / "noise.bin")
    write_series(truth.factor_series, out_dir / "factors.bin")
    for k, basis in enumerate(truth.loadings.bases, start=1):
        _write_matrix(basis.cols, out_dir / f"loadings_mode{k}.csv")
    (out_dir / "spec.json").write_text(spec.model_dump_json(indent=2, by_alias=True))
    typer.echo(f"Wrote setting {spec.setting.value} (T={T}, lambda={lambda_}) to {out_dir}")


@app.command()
def estimate(
    input_path: Path = typer.Option(..., "--in", "-i", help="Series file (binary container or .csv)."),
    method: str = typer.Option("iTOPUP", help="Method preset, e.g. iTOPUP or TIPUP-1TOPUP."),
    ranks: str = typer.Option(..., help="Comma-separated ranks r_1,...,r_K."),
    h0: int = typer.Option(1, help="Lag count of the initializer (and of the iterator unless --h0-iter)."),
    h0_iter: Optional[int] = typer.Option(None, help="Lag count of the iterator."),
    epsilon: Optional[float] = typer.Option(None, help="Convergence tolerance."),
    max_iter: Optional[int] = typer.Option(None, help="Sweep cap."),
    normalization: str = typer.Option("figure", help="Signal strength normalization: figure or paper_eq."),
    out_dir: Path = typer.Option(Path("."), "--out-dir", "-o", help="Directory to write into."),
) -> None:
    """Estimate loadings, factors and residuals of a series with one method."""
    cfg = IterConfig.from_preset(
        method,
        _parse_list(ranks, int, "--ranks"),
        h0=h0,
        h0_iter=h0_iter,
        epsilon=epsilon,
        max_iter=max_iter,
        normalization=_normalization(normalization),
    )
    result = run_estimator(read_series(input_path), cfg)

    out_dir.mkdir(parents=True, exist_ok=True)
    for k, basis in enumerate(result.loadings.bases, start=1):
        _write_matrix(basis.cols, out_dir / f"loadings_mode{k}.csv")
    write_series(result.factors, out_dir / "factors.bin")
    write_series(result.residuals, out_dir / "residuals.bin")
    (out_dir / "diagnostics.json").write_text(result.report().model_dump_json(indent=2))
    typer.echo(f"{cfg.method}: {result.iterations_used} sweeps, converged={result.converged}; wrote {out_dir}")


@app.command()
def bench(
    config: Path = typer.Option(..., "--config", "-c", help="Experiment config file."),
    out: Path = typer.Option(Path("records.csv"), "--out", "-o", help="Records CSV."),
    summary: Optional[Path] = typer.Option(None, help="Summary CSV; defaults to <out>_summary.csv."),
    progress: bool = typer.Option(False, "--progress/--no-progress", help="Show a progress bar."),
) -> None:
    """Run a Monte Carlo experiment."""
    cfg = load_experiment_config(config)
    records = run_experiment(cfg, show_progress=progress)
    write_records(records, out)
    write_summary(records, summary if summary is not None else out.with_name(f"{out.stem}_summary.csv"))
    typer.echo(f"Wrote {len(records)} records to {out}")


def _signal_table(
    spec_setting: Setting,
    lambda_: float,
    h0_list: Sequence[int],
    norm: Normalization,
    empirical: bool,
    T: int,
    nrep: int,
    seed: int,
) -> pd.DataFrame:
    spec = preset(spec_setting, lambda_=lambda_, T=T, seed=seed)
    rows = []
    for h0 in h0_list:
        topup = population_signal(spec, h0, Flavor.TOPUP, norm)
        tipup = population_signal(spec, h0, Flavor.TIPUP, norm)
        for k in range(1, spec.order + 1):
            rows.append(
                {"h0": h0, "mode": k, "source": "population", "lambda_sq": topup[k - 1], "lambda_star_sq": tipup[k - 1]}
            )

    if empirical:
        estimated = []
        for rep in range(nrep):
            series = generate(spec, replication=rep).observed_series
            for h0 in h0_list:
                outer = run_estimator(series, IterConfig.from_preset("iTOPUP", spec.ranks, h0=h0, normalization=norm))
                inner = run_estimator(series, IterConfig.from_preset("iTIPUP", spec.ranks, h0=h0, normalization=norm))
                for k in range(1, spec.order + 1):
                    estimated.append(
                        {
                            "h0": h0,
                            "mode": k,
                            "lambda_sq": outer.diagnostics.lambda_sq[k - 1],
                            "lambda_star_sq": inner.diagnostics.lambda_star_sq[k - 1],
                        }
                    )
        medians = pd.DataFrame(estimated).groupby(["h0", "mode"], sort=True).median().reset_index()
        medians.insert(2, "source", f"median of {nrep}")
        rows.extend(medians.to_dict(orient="records"))

    return pd.DataFrame(rows).sort_values(["h0", "mode", "source"], kind="stable").reset_index(drop=True)


@app.command()
def signal(
    setting: str = typer.Option("I", help="Reference setting: I, II or III."),
    lambda_: float = typer.Option(1.0, "--lambda", help="Signal scale."),
    h0: str = typer.Option("1,2,3", help="Comma-separated lag counts."),
    normalization: str = typer.Option("figure", help="Signal strength normalization: figure or paper_eq."),
    empirical: bool = typer.Option(False, help="Also report medians of estimated strengths over simulated data."),
    T: int = typer.Option(1024, "--T", "-T", help="Series length of the simulated data."),
    nrep: int = typer.Option(20, help="Replications for the estimated strengths."),
    seed: int = typer.Option(0, help="Master seed."),
) -> None:
    """Print the signal strengths lambda_k^2 (TOPUP) and lambda*_k^2 (TIPUP) per mode and lag count."""
    table = _signal_table(
        _setting(setting),
        lambda_,
        _parse_list(h0, int, "--h0"),
        _normalization(normalization),
        empirical,
        T,
        nrep,
        seed,
    )
    typer.echo(table.to_string(index=False, float_format=lambda v: f"{v:.6g}"))


@app.command()
def version() -> None:
    """Print the package version."""
    typer.echo(__version__)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and map failures onto exit codes.

    Args:
        argv (Optional[Sequence[str]], optional): Arguments without the program name; sys.argv[1:] when None.
            Defaults to None.

    Returns:
        int: 0 on success, 1 on usage errors, 2 on runtime errors.
    """
    command = typer.main.get_command(app)
    try:
        args = list(argv) if argv is not None else None
        code = command.main(args=args, prog_name="tensorfactor", standalone_mode=False)
    except click.ClickException as err:
        err.show()
        return ExitCode.USAGE
    except click.exceptions.Abort:
        return ExitCode.USAGE
    except (ValidationError, UnknownPresetError) as err:
        typer.echo(f"Error: invalid arguments\n{err}", err=True)
        return ExitCode.USAGE
    except (TensorFactorError, OSError) as err:
        logger.error(str(err))
        typer.echo(f"Error: {err}", err=True)
        return ExitCode.RUNTIME
    return int(code) if isinstance(code, int) else ExitCode.SUCCESS


def run() -> None:
    """Console entry point."""
    sys.exit(main())
