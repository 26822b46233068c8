"""
Protocol Runner
===============

Executes the benchmark protocol: every (instance, algorithm, grid point,
initialization) combination is one independent task. Tasks run serially or on
a ``multiprocessing`` pool; results are sorted by task index before
aggregation, so the outcome never depends on scheduling.

All algorithms share the r-th initial point of an instance, drawn from the
stream keyed by (seed, r), and start from lambda0 = 0.
"""

import itertools
import json
import logging
import multiprocessing
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import psutil
import toml

from admm_quant.discrete_sets import DiscreteProductSet
from admm_quant.errors import AdmmQuantError, DivergenceError, InvalidConfigError
from admm_quant.objectives import SmoothObjective
from admm_quant.seeding import derive_seed, make_rng
from admm_quant.solvers.config import GRADIENT_DESCENT, InnerSolverConfig, SolverConfig
from admm_quant.solvers.driver import SOLVERS, initial_point, run

logger = logging.getLogger(__name__)

DEFAULT_RHO_GRID = tuple(10.0**k for k in range(-2, 7))
DEFAULT_BETA_GRID = tuple(10.0 ** (k / 2) for k in range(-10, 11))
DEFAULT_P_GRID = (0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99)
DEFAULT_ALGORITHMS = ("admm-q", "pgd", "gd-proj")


@dataclass
class ProtocolSpec:
    n_inits: int = 20
    iters_admm: int = 3000
    iters_pgd: int = 10000
    window: int = 50
    rho_grid: Tuple[float, ...] = DEFAULT_RHO_GRID
    beta_grid: Tuple[float, ...] = DEFAULT_BETA_GRID
    p_grid: Tuple[float, ...] = DEFAULT_P_GRID
    # I-ADMM-Q inexactness, fixed across the rho grid
    gamma: float = 0.1
    seed: int = 0
    init_scale: Optional[float] = None
    algorithms: Tuple[str, ...] = DEFAULT_ALGORITHMS
    workers: int = 1

    def __post_init__(self):
        for name in ("rho_grid", "beta_grid", "p_grid", "algorithms"):
            setattr(self, name, tuple(getattr(self, name)))
            if not getattr(self, name):
                raise InvalidConfigError(f"{name} must not be empty")
        if self.n_inits < 1:
            raise InvalidConfigError("n_inits must be >= 1")
        if min(self.iters_admm, self.iters_pgd) < 0 or self.window < 1:
            raise InvalidConfigError("iteration budgets must be >= 0 and window >= 1")
        if any(r <= 0 for r in self.rho_grid) or any(b <= 0 for b in self.beta_grid):
            raise InvalidConfigError("rho and beta grids must be positive")
        if any(not 0 < p <= 1 for p in self.p_grid):
            raise InvalidConfigError("p_grid entries must lie in (0, 1]")
        unknown = set(self.algorithms) - set(SOLVERS)
        if unknown:
            raise InvalidConfigError(f"unknown algorithms {sorted(unknown)}")
        if self.workers < 1:
            raise InvalidConfigError("workers must be >= 1")

    @classmethod
    def reduced(cls, **overrides: Any) -> "ProtocolSpec":
        """Desk-scale budget: 3,000 ADMM / 10,000 PGD iterations, 20 inits"""
        return cls(**overrides)

    @classmethod
    def full_scale(cls, **overrides: Any) -> "ProtocolSpec":
        """Full budget: 30,000 ADMM / 100,000 PGD iterations, 50 inits"""
        settings: Dict[str, Any] = dict(n_inits=50, iters_admm=30000, iters_pgd=100000)
        settings.update(overrides)
        return cls(**settings)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, tuple):
                data[key] = list(value)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ProtocolSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known - {"scale"}
        if unknown:
            raise InvalidConfigError(f"unknown protocol settings: {sorted(unknown)}")
        data = dict(data)
        scale = data.pop("scale", "reduced")
        if scale == "full":
            return cls.full_scale(**data)
        if scale != "reduced":
            raise InvalidConfigError("scale must be 'reduced' or 'full'")
        return cls.reduced(**data)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ProtocolSpec":
        """Read a protocol from a ``.toml`` or ``.json`` file"""
        path = Path(path)
        try:
            with open(path) as handle:
                if path.suffix == ".toml":
                    data = toml.load(handle)
                else:
                    data = json.load(handle)
        except (OSError, ValueError, toml.TomlDecodeError) as exc:
            raise InvalidConfigError(f"cannot read protocol {path}: {exc}") from exc
        return cls.from_dict(data.get("protocol", data))

    def grid(self, algorithm: str) -> List[Dict[str, float]]:
        """Hyper-parameter points swept for ``algorithm``"""
        if algorithm == "gd-proj":
            return [{}]
        if algorithm == "admm-s":
            return [{"rho": r, "beta": b} for r, b in itertools.product(self.rho_grid, self.beta_grid)]
        if algorithm == "admm-r":
            return [{"rho": r, "p": p} for r, p in itertools.product(self.rho_grid, self.p_grid)]
        if algorithm == "iadmm-q":
            return [{"rho": r, "gamma": self.gamma} for r in self.rho_grid]
        return [{"rho": r} for r in self.rho_grid]


@dataclass
class Instance:
    instance_id: str
    objective: SmoothObjective
    discrete_set: DiscreteProductSet


@dataclass(frozen=True)
class SweepTask:
    index: int
    instance_id: str
    algorithm: str
    hyper: Tuple[Tuple[str, float], ...]
    init: int

    @property
    def hyper_dict(self) -> Dict[str, float]:
        return dict(self.hyper)

    @property
    def hyper_json(self) -> str:
        return json.dumps(self.hyper_dict, sort_keys=True)


@dataclass
class TaskResult:
    task: SweepTask
    best_objective: float
    diverged: bool
    wall_time: float = 0.0
    # RSS growth of the worker while the task ran, bytes
    rss_delta: int = 0
    error: str = ""


@contextmanager
def resource_monitor() -> Iterator[Dict[str, float]]:
    """Wall time and RSS delta of the enclosed block"""
    process = psutil.Process()
    usage: Dict[str, float] = {}
    start_memory = process.memory_info().rss
    start_time = time.perf_counter()
    try:
        yield usage
    finally:
        usage["wall_time"] = time.perf_counter() - start_time
        usage["rss_delta"] = process.memory_info().rss - start_memory


def build_tasks(instances: Sequence[Instance], protocol: ProtocolSpec) -> List[SweepTask]:
    tasks: List[SweepTask] = []
    for instance in instances:
        for algorithm in protocol.algorithms:
            for hyper in protocol.grid(algorithm):
                for init in range(protocol.n_inits):
                    tasks.append(
                        SweepTask(len(tasks), instance.instance_id, algorithm, tuple(sorted(hyper.items())), init)
                    )
    return tasks


def shared_initial_point(instance: Instance, protocol: ProtocolSpec, init: int) -> np.ndarray:
    """x0 of initialization ``init``; identical for every algorithm"""
    return initial_point(instance.discrete_set, make_rng(protocol.seed, init), protocol.init_scale)


def task_config(task: SweepTask, protocol: ProtocolSpec) -> SolverConfig:
    hyper = task.hyper_dict
    iters = protocol.iters_pgd if task.algorithm == "pgd" else protocol.iters_admm
    settings: Dict[str, Any] = dict(
        rho=hyper.get("rho", 1.0),
        max_iters=iters,
        window=protocol.window,
        seed=derive_seed(protocol.seed, task.init),
        # only the end of the trace matters to a sweep
        trace_stride=max(iters, 1),
    )
    if task.algorithm == "admm-s":
        settings["beta"] = hyper["beta"]
    if task.algorithm == "admm-r":
        settings["mask_prob"] = hyper["p"]
    if task.algorithm == "iadmm-q":
        settings["gamma"] = hyper["gamma"]
        settings["inner"] = InnerSolverConfig(mode=GRADIENT_DESCENT)
    return SolverConfig(**settings)


def execute_task(task: SweepTask, instance: Instance, protocol: ProtocolSpec) -> TaskResult:
    x0 = shared_initial_point(instance, protocol, task.init)
    config = task_config(task, protocol)
    with resource_monitor() as usage:
        try:
            result = run(task.algorithm, instance.objective, instance.discrete_set, config, x0)
            outcome = (result.best_window_objective, False, "")
        except DivergenceError as exc:
            outcome = (float("nan"), True, str(exc))
        except AdmmQuantError as exc:
            # e.g. rho below mu: the x-update is not well posed at this grid point
            outcome = (float("nan"), True, f"{type(exc).__name__}: {exc}")
    return TaskResult(task, outcome[0], outcome[1], usage["wall_time"], int(usage["rss_delta"]), outcome[2])


# per-worker state, filled by the pool initializer
_WORKER_STATE: Dict[str, Any] = {}


def _init_worker(instances: Sequence[Instance], protocol: ProtocolSpec) -> None:
    _WORKER_STATE["instances"] = {inst.instance_id: inst for inst in instances}
    _WORKER_STATE["protocol"] = protocol


def _run_in_worker(task: SweepTask) -> TaskResult:
    return execute_task(task, _WORKER_STATE["instances"][task.instance_id], _WORKER_STATE["protocol"])


def run_protocol(
    instances: Union[Instance, Sequence[Instance]],
    algorithms: Optional[Sequence[str]] = None,
    protocol: Optional[ProtocolSpec] = None,
    progress: Optional[Callable[[int, int], None]] = None,
) -> "SweepResult":
    """
    Run every task of the protocol and aggregate.

    ``algorithms`` overrides ``protocol.algorithms``; ``progress`` is called
    with (done, total) after each finished task.
    """
    from admm_quant.experiments.aggregate import SweepResult

    if isinstance(instances, Instance):
        instances = [instances]
    protocol = protocol or ProtocolSpec()
    if algorithms is not None:
        protocol = ProtocolSpec.from_dict({**protocol.to_dict(), "algorithms": list(algorithms)})
    ids = [inst.instance_id for inst in instances]
    if len(set(ids)) != len(ids):
        raise InvalidConfigError("instance ids must be unique")

    tasks = build_tasks(instances, protocol)
    logger.info(
        "sweep: %d instances, %d algorithms, %d tasks, %d worker(s)",
        len(instances),
        len(protocol.algorithms),
        len(tasks),
        protocol.workers,
    )
    results: List[TaskResult] = []
    if protocol.workers == 1:
        by_id = {inst.instance_id: inst for inst in instances}
        for task in tasks:
            results.append(execute_task(task, by_id[task.instance_id], protocol))
            if progress:
                progress(len(results), len(tasks))
    else:
        with multiprocessing.Pool(
            protocol.workers, initializer=_init_worker, initargs=(list(instances), protocol)
        ) as pool:
            for result in pool.imap_unordered(_run_in_worker, tasks, chunksize=8):
                results.append(result)
                if progress:
                    progress(len(results), len(tasks))
    results.sort(key=lambda res: res.task.index)
    diverged = sum(res.diverged for res in results)
    if diverged:
        logger.info("sweep: %d of %d runs diverged", diverged, len(results))
    return SweepResult(protocol, ids, results)
