#!/usr/bin/env python3
"""
ADMM Quant CLI
==============

Command-line front end: instance generation, single solves, protocol sweeps,
stationarity checks, brute-force oracles and parameter-condition checks.

Data goes to stdout or files; logs and progress go to stderr.

Exit codes: 0 success, 2 usage or input error, 3 divergence, 4 parameters
failing the decrease condition (override with --force).
"""

import csv
import io
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

import click
import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from admm_quant import __version__
from admm_quant.analysis.conditions import (
    check_decrease_condition,
    check_iadmm_condition,
    decrease_condition_value,
    iadmm_condition_value,
)
from admm_quant.analysis.oracle import brute_force_minimize
from admm_quant.analysis.stationarity import DEFAULT_TOLERANCE, is_rho_stationary
from admm_quant.errors import AdmmQuantError, DivergenceError
from admm_quant.experiments.generator import (
    PRESETS,
    InstanceSpec,
    generate_instance,
    load_instance_file,
    preset,
    save_instance_file,
)
from admm_quant.experiments.logistic import run_logistic_demo
from admm_quant.experiments.runner import Instance, ProtocolSpec, run_protocol
from admm_quant.solvers.config import GRADIENT_DESCENT, InnerSolverConfig, SolverConfig
from admm_quant.solvers.driver import SOLVERS, run

console = Console()
err_console = Console(stderr=True)

logger = logging.getLogger("admm_quant")

EXIT_USAGE = 2
EXIT_DIVERGED = 3
EXIT_INFEASIBLE = 4

ADMM_FAMILY = ("admm-q", "iadmm-q", "admm-r", "admm-s")


def _num(value: float) -> float:
    """12 significant digits"""
    return float(f"{value:.12g}")


def _clean(data: Any) -> Any:
    if isinstance(data, dict):
        return {k: _clean(v) for k, v in data.items()}
    if isinstance(data, (list, tuple, np.ndarray)):
        return [_clean(v) for v in data]
    if isinstance(data, (bool, np.bool_)):
        return bool(data)
    if isinstance(data, (float, np.floating)):
        return _num(float(data))
    if isinstance(data, np.integer):
        return int(data)
    return data


def _emit(data: Dict[str, Any], fmt: str) -> None:
    data = _clean(data)
    if fmt == "json":
        click.echo(json.dumps(data, indent=2))
        return
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(list(data))
    writer.writerow(
        [" ".join(repr(v) for v in value) if isinstance(value, list) else value for value in data.values()]
    )
    click.echo(buffer.getvalue(), nl=False)


def _fail(message: str, code: int = EXIT_USAGE) -> None:
    err_console.print(f"❌ {message}")
    sys.exit(code)


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Map library exceptions onto exit codes"""
    try:
        yield
    except DivergenceError as exc:
        _fail(str(exc), EXIT_DIVERGED)
    except AdmmQuantError as exc:
        _fail(f"{type(exc).__name__}: {exc}", EXIT_USAGE)


def _parse_vector(text: str, name: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {text!r}", param_hint=name)


def _check_out(path: Path) -> Path:
    if not path.parent.exists():
        _fail(f"output directory does not exist: {path.parent}")
    return path


format_option = click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "csv"]),
    default="json",
    show_default=True,
    help="Output format on stdout",
)


@click.group()
@click.version_option(version=__version__)
@click.option("--verbose", "-v", is_flag=True, help="Debug logging on stderr")
@click.option("--quiet", "-q", is_flag=True, help="Only warnings and errors on stderr")
def main(verbose: bool, quiet: bool):
    """ADMM Quant - ADMM-Q family solvers and benchmarks for discrete sets."""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


@main.command()
@click.option("--d", "d", type=int, help="Dimension")
@click.option("--v", "v", type=float, default=8.0, show_default=True, help="Lattice spacing")
@click.option("--sigma-q-sq", type=float, default=30.0, show_default=True, help="Variance of q entries")
@click.option("--b-scale", type=float, default=None, help="Std-dev of b entries [default: sqrt(d*sigma_q_sq)]")
@click.option("--preset", "preset_name", type=click.Choice(sorted(PRESETS)), help="Use a bundled (v, d, sigma) preset")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True)
def generate(
    d: Optional[int],
    v: float,
    sigma_q_sq: float,
    b_scale: Optional[float],
    preset_name: Optional[str],
    seed: int,
    out: Path,
):
    """Generate a random quadratic-over-lattice instance.

    Examples:
        admmq generate --d 2 --v 8 --sigma-q-sq 30 --seed 1 --out inst.json
        admmq generate --preset v8-d16-s30 --seed 4 --out inst.json
    """
    _check_out(out)
    with _exit_codes():
        if preset_name:
            spec = preset(preset_name, seed)
        elif d is None:
            _fail("either --d or --preset is required")
        else:
            spec = InstanceSpec(d=d, v=v, sigma_q_sq=sigma_q_sq, b_scale=b_scale, seed=seed)
        objective, discrete_set = generate_instance(spec)
        save_instance_file(out, objective, discrete_set, spec)
    logger.info("wrote %d-dimensional instance to %s", spec.d, out)


@main.command()
@click.option("--instance", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--algorithm", type=click.Choice(sorted(SOLVERS)), default="admm-q", show_default=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--gamma", type=float, default=None, help="Inexactness (iadmm-q) [default: 0.1]")
@click.option("--beta", type=float, default=None, help="Soft-indicator weight (admm-s) [default: 1]")
@click.option("--p", "mask_prob", type=float, default=None, help="Refresh probability (admm-r) [default: 1]")
@click.option("--iters", type=int, default=1000, show_default=True)
@click.option("--window", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--x0", "x0_text", default=None, help="Initial point, comma-separated")
@click.option(
    "--init",
    type=click.Choice(["zero", "random"]),
    default="zero",
    show_default=True,
    help="Start at P_A(0) or at a seeded random draw (ignored with --x0)",
)
@click.option("--trace", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Write the trace CSV here")
@click.option("--trace-stride", type=int, default=1, show_default=True)
@click.option("--force", is_flag=True, help="Run even if the decrease condition fails")
@format_option
def solve(
    instance: Path,
    algorithm: str,
    rho: float,
    gamma: Optional[float],
    beta: Optional[float],
    mask_prob: Optional[float],
    iters: int,
    window: int,
    seed: int,
    x0_text: Optional[str],
    init: str,
    trace: Optional[Path],
    trace_stride: int,
    force: bool,
    fmt: str,
):
    """Run one algorithm on an instance and print a summary.

    Examples:
        admmq solve --instance demo_1d.json --algorithm admm-q --rho 2
        admmq solve --instance inst.json --algorithm admm-s --rho 10 --beta 3 --trace run.csv
    """
    for flag, value, owner in (("--gamma", gamma, "iadmm-q"), ("--beta", beta, "admm-s"), ("--p", mask_prob, "admm-r")):
        if value is not None and algorithm != owner:
            raise click.UsageError(f"{flag} only applies to --algorithm {owner}")
    if trace is not None:
        _check_out(trace)

    with _exit_codes():
        objective, discrete_set = load_instance_file(instance)
        lipschitz, mu = objective.lipschitz_L, objective.weak_convexity_mu
        if algorithm in ADMM_FAMILY and not check_decrease_condition(lipschitz, mu, rho):
            message = f"decrease condition fails: L_f={lipschitz:.6g} mu={mu:.6g} rho={rho:.6g}"
            if not force:
                _fail(f"{message} (use --force to run anyway)", EXIT_INFEASIBLE)
            logger.warning("%s; running anyway", message)

        settings: Dict[str, Any] = dict(
            rho=rho, max_iters=iters, window=window, seed=seed, trace_stride=trace_stride
        )
        if algorithm == "iadmm-q":
            settings.update(gamma=0.1 if gamma is None else gamma, inner=InnerSolverConfig(mode=GRADIENT_DESCENT))
        if beta is not None:
            settings["beta"] = beta
        if mask_prob is not None:
            settings["mask_prob"] = mask_prob
        config = SolverConfig(**settings)

        if x0_text is not None:
            x0 = _parse_vector(x0_text, "--x0")
        elif init == "zero":
            x0 = np.zeros(discrete_set.dim)
        else:
            x0 = None
        result = run(algorithm, objective, discrete_set, config, x0)

        final = result.final_state
        point = discrete_set.project_unchecked(final.x)
        report = is_rho_stationary(objective, discrete_set, point, rho)
    if trace is not None:
        result.trace.to_csv(trace)
        logger.info("trace written to %s", trace)

    _emit(
        {
            "algorithm": algorithm,
            "rho": rho,
            "iterations": final.r,
            "final_objective": result.trace.records[-1].f_y,
            "best_window_objective": result.best_window_objective,
            "residual": float(np.linalg.norm(final.x - final.y)),
            "stationary": report.is_stationary,
            "converged": result.converged,
            "x": final.x,
            "y": final.y,
        },
        fmt,
    )


def _load_instances(source: Path) -> List[Instance]:
    files = sorted(source.glob("*.json")) if source.is_dir() else [source]
    if not files:
        _fail(f"no instance files in {source}")
    instances = []
    for path in files:
        try:
            objective, discrete_set = load_instance_file(path)
        except AdmmQuantError as exc:
            _fail(f"failed to load {path}: {exc}")
        instances.append(Instance(path.stem, objective, discrete_set))
    return instances


@main.command()
@click.option(
    "--instances",
    "source",
    type=click.Path(exists=True, path_type=Path),
    default=None,
    help="Instance file or directory of instance files",
)
@click.option("--generate", "n_generate", type=int, default=0, help="Generate this many instances instead")
@click.option("--preset", "preset_name", type=click.Choice(sorted(PRESETS)), default="v8-d16-s30", show_default=True)
@click.option("--protocol", "protocol_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--full-scale", is_flag=True, help="30,000 / 100,000 iterations and 50 inits")
@click.option("--algorithms", default=None, help="Comma-separated algorithm list (overrides the protocol)")
@click.option("--workers", type=int, default=None, help="Worker processes (overrides the protocol)")
@click.option("--seed", type=int, default=None, help="Protocol seed (overrides the protocol)")
@click.option("--compare", default="pgd:admm-q", show_default=True, help="Histogram pairs A:B, comma-separated")
@click.option("--bins", type=int, default=30, show_default=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
def sweep(
    source: Optional[Path],
    n_generate: int,
    preset_name: str,
    protocol_path: Optional[Path],
    full_scale: bool,
    algorithms: Optional[str],
    workers: Optional[int],
    seed: Optional[int],
    compare: str,
    bins: int,
    out: Path,
):
    """Run the benchmark protocol over instances and write CSV/JSON results.

    Writes sweep.csv, summary.json and one hist_<A>_vs_<B>.csv per compared pair.

    Examples:
        admmq sweep --instances instances/ --protocol protocol.toml --out results/
        admmq sweep --generate 5 --preset v8-d16-s30 --workers 4 --out results/
    """
    if (source is None) == (n_generate <= 0):
        raise click.UsageError("give exactly one of --instances or --generate")
    if bins < 1:
        raise click.BadParameter("must be at least 1", param_hint="--bins")
    _check_out(out)

    with _exit_codes():
        protocol = ProtocolSpec.load(protocol_path) if protocol_path else ProtocolSpec()
        overrides: Dict[str, Any] = {}
        if full_scale:
            overrides.update(n_inits=50, iters_admm=30000, iters_pgd=100000)
        if algorithms:
            overrides["algorithms"] = [a.strip() for a in algorithms.split(",") if a.strip()]
        if workers is not None:
            overrides["workers"] = workers
        if seed is not None:
            overrides["seed"] = seed
        if overrides:
            protocol = ProtocolSpec.from_dict({**protocol.to_dict(), **overrides})

        if source is not None:
            instances = _load_instances(source)
        else:
            instances = []
            for k in range(n_generate):
                objective, discrete_set = generate_instance(preset(preset_name, protocol.seed + k))
                instances.append(Instance(f"{preset_name}-{k}", objective, discrete_set))
        out.mkdir(exist_ok=True)

        with Progress(
            TextColumn("[bold blue]sweep"),
            BarColumn(),
            TextColumn("{task.completed}/{task.total}"),
            TimeElapsedColumn(),
            console=err_console,
            transient=True,
        ) as progress:
            bar = progress.add_task("sweep", total=None)

            def advance(done: int, total: int) -> None:
                progress.update(bar, completed=done, total=total)

            result = run_protocol(instances, protocol=protocol, progress=advance)

        result.to_csv(out / "sweep.csv")
        result.summary_json(out / "summary.json")
        for pair in (p for p in compare.split(",") if p.strip()):
            name_a, _, name_b = pair.strip().partition(":")
            if name_a in protocol.algorithms and name_b in protocol.algorithms:
                hist = result.histogram_csv(out / f"hist_{name_a}_vs_{name_b}.csv", name_a, name_b, bins)
                logger.info(
                    "%s - %s >= 0 on %.1f%% of runs", name_a, name_b, 100 * hist.fraction_nonnegative()
                )
    _print_summary(result.summary())
    logger.info("results written to %s", out)


def _print_summary(summary: Dict[str, Any]) -> None:
    table = Table(title="Best grid point per algorithm (median objective)")
    table.add_column("Instance", style="cyan")
    table.add_column("Algorithm", style="green")
    table.add_column("Hyper-parameters")
    table.add_column("q25", justify="right")
    table.add_column("Median", justify="right")
    table.add_column("q75", justify="right")
    table.add_column("Diverged", justify="right")
    for instance_id, per_alg in summary["instances"].items():
        for algorithm, entry in per_alg.items():
            if not entry.get("feasible"):
                table.add_row(instance_id, algorithm, "-", "-", "-", "-", "all")
                continue
            table.add_row(
                instance_id,
                algorithm,
                json.dumps(entry["hyper"]),
                f"{entry['q25']:.6g}",
                f"{entry['median']:.6g}",
                f"{entry['q75']:.6g}",
                f"{entry['n_diverged']}/{entry['n_runs']}",
            )
    err_console.print(table)


@main.command("check-stationary")
@click.option("--instance", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--point", required=True, help="Member of the set, comma-separated")
@click.option("--rho", type=float, required=True)
@click.option("--tol", type=float, default=DEFAULT_TOLERANCE, show_default=True)
@format_option
def check_stationary(instance: Path, point: str, rho: float, tol: float, fmt: str):
    """Is POINT rho-stationary for the instance?

    Example:
        admmq check-stationary --instance nonexistence_1d.json --point 0 --rho 0.5
    """
    x = _parse_vector(point, "--point")
    with _exit_codes():
        objective, discrete_set = load_instance_file(instance)
        report = is_rho_stationary(objective, discrete_set, x, rho, tol)
    data = report.to_dict()
    data.update(point=x, rho=rho)
    _emit(data, fmt)


@main.command()
@click.option("--instance", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--bounds", default=None, help="lo,hi box applied to every lattice coordinate")
@click.option("--limit", type=int, default=10**7, show_default=True, help="Largest set to enumerate")
@format_option
def bruteforce(instance: Path, bounds: Optional[str], limit: int, fmt: str):
    """Exact global minimizer by enumeration.

    Example:
        admmq bruteforce --instance grid49.json --bounds=-3,3
    """
    with _exit_codes():
        objective, discrete_set = load_instance_file(instance)
        if bounds is not None:
            box = _parse_vector(bounds, "--bounds")
            if box.size != 2:
                raise click.BadParameter("expected lo,hi", param_hint="--bounds")
            discrete_set = discrete_set.with_bounds(float(box[0]), float(box[1]))
        argmin, value = brute_force_minimize(objective, discrete_set, limit)
    _emit({"argmin": argmin, "value": value, "cardinality": int(discrete_set.cardinality)}, fmt)


@main.command("verify-conditions")
@click.option("--Lf", "lipschitz_L", type=float, required=True, help="Lipschitz constant of the gradient")
@click.option("--mu", type=float, default=0.0, show_default=True, help="Weak convexity modulus")
@click.option("--rho", type=float, required=True)
@click.option("--gamma", type=float, default=None, help="Also check the I-ADMM-Q condition")
@format_option
def verify_conditions(lipschitz_L: float, mu: float, rho: float, gamma: Optional[float], fmt: str):
    """Evaluate the parameter conditions of ADMM-Q and I-ADMM-Q.

    Example:
        admmq verify-conditions --Lf 1 --mu 0 --rho 1.5
    """
    if lipschitz_L <= 0 or mu < 0 or rho <= 0:
        raise click.BadParameter("need --Lf > 0, --mu >= 0 and --rho > 0")
    data: Dict[str, Any] = {
        "decrease": check_decrease_condition(lipschitz_L, mu, rho),
        "decrease_value": decrease_condition_value(lipschitz_L, mu, rho),
    }
    if gamma is not None:
        data["iadmm"] = check_iadmm_condition(lipschitz_L, mu, rho, gamma)
        data["iadmm_value"] = iadmm_condition_value(lipschitz_L, mu, rho, gamma)
    _emit(data, fmt)


@main.command("logistic-demo")
@click.option("--d", "d", type=int, default=20, show_default=True)
@click.option("--n", "n", type=int, default=500, show_default=True)
@click.option("--rho", type=float, default=None, help="Penalty [default: 6 L_f]")
@click.option("--gamma", type=float, default=0.1, show_default=True)
@click.option("--iters", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@format_option
def logistic_demo(d: int, n: int, rho: Optional[float], gamma: float, iters: int, seed: int, fmt: str):
    """Binarized logistic regression: I-ADMM-Q against GD+Proj."""
    with _exit_codes():
        result = run_logistic_demo(d=d, n=n, rho=rho, gamma=gamma, iters=iters, seed=seed)
    data = result.to_dict()
    data.pop("checks")
    data.update({f"check_{name}": report.ok for name, report in result.checks.items()})
    _emit(data, fmt)


@main.command()
def presets():
    """List the bundled (v, d, sigma_q^2) instance presets."""
    table = Table(title="Instance Presets")
    table.add_column("Name", style="cyan")
    table.add_column("v", justify="right")
    table.add_column("d", justify="right")
    table.add_column("sigma_q^2", justify="right")
    for name, (v, d, sigma_q_sq) in PRESETS.items():
        table.add_row(name, f"{v:g}", str(d), f"{sigma_q_sq:g}")
    console.print(table)


if __name__ == "__main__":
    main()
