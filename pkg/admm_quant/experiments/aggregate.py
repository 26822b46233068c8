"""
Sweep Aggregation
=================

Quantiles per grid point, best-grid-point selection by median, and pairwise
difference histograms between algorithms over shared initializations.

Diverged runs are excluded from quantiles and counted; a grid point where more
than half of the runs diverged is infeasible and never selected as best.
"""

import csv
import json
import logging
import math
from collections import defaultdict
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from admm_quant.errors import InvalidConfigError, MismatchedRunsError
from admm_quant.experiments.runner import ProtocolSpec, TaskResult

logger = logging.getLogger(__name__)

SWEEP_HEADER = ("instance_id", "algorithm", "hyper_json", "init", "best_objective", "diverged")
HISTOGRAM_HEADER = ("bin_left", "bin_right", "count")

# (instance_id, init) -> best-window objective
RunTable = Dict[Tuple[str, int], float]


@dataclass
class GridPointStats:
    instance_id: str
    algorithm: str
    hyper_json: str
    median: float
    q25: float
    q75: float
    n_runs: int
    n_diverged: int

    @property
    def feasible(self) -> bool:
        return self.n_diverged * 2 <= self.n_runs and self.n_diverged < self.n_runs

    @property
    def complete(self) -> bool:
        """all n_inits runs contributed to the quantiles"""
        return self.n_diverged == 0


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    differences: np.ndarray
    # pairs dropped because one side diverged
    skipped: int = 0

    def to_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(HISTOGRAM_HEADER)
            for left, right, count in zip(self.edges[:-1], self.edges[1:], self.counts):
                writer.writerow([f"{left:.12g}", f"{right:.12g}", int(count)])

    def fraction_nonnegative(self) -> float:
        if self.differences.size == 0:
            return math.nan
        return float(np.mean(self.differences >= 0))


def _quantiles(values: np.ndarray) -> Tuple[float, float, float]:
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return math.nan, math.nan, math.nan
    q25, median, q75 = np.quantile(finite, [0.25, 0.5, 0.75])
    return float(median), float(q25), float(q75)


class SweepResult:
    """Per-init objectives of a sweep, kept in task order"""

    def __init__(self, protocol: ProtocolSpec, instance_ids: Sequence[str], results: List[TaskResult]):
        self.protocol = protocol
        self.instance_ids = list(instance_ids)
        self.results = sorted(results, key=lambda res: res.task.index)
        self._groups: Dict[Tuple[str, str, str], List[TaskResult]] = defaultdict(list)
        for res in self.results:
            self._groups[(res.task.instance_id, res.task.algorithm, res.task.hyper_json)].append(res)

    @property
    def algorithms(self) -> List[str]:
        seen: Dict[str, None] = {}
        for res in self.results:
            seen.setdefault(res.task.algorithm, None)
        return list(seen)

    def objectives(self, instance_id: str, algorithm: str, hyper_json: str) -> np.ndarray:
        """Best-window objectives by init index, NaN where the run diverged"""
        group = self._groups.get((instance_id, algorithm, hyper_json), [])
        return np.array([res.best_objective for res in sorted(group, key=lambda res: res.task.init)])

    def grid_stats(self) -> List[GridPointStats]:
        stats = []
        for (instance_id, algorithm, hyper_json), group in self._groups.items():
            values = np.array([res.best_objective for res in group])
            median, q25, q75 = _quantiles(values)
            n_diverged = sum(res.diverged for res in group)
            stats.append(
                GridPointStats(instance_id, algorithm, hyper_json, median, q25, q75, len(group), n_diverged)
            )
        return stats

    def best(self, instance_id: str, algorithm: str) -> Optional[GridPointStats]:
        """Feasible grid point with the smallest median; ties go to the earlier grid point"""
        candidates = [
            s
            for s in self.grid_stats()
            if s.instance_id == instance_id and s.algorithm == algorithm and s.feasible
        ]
        if not candidates:
            logger.warning("no feasible grid point for %s on %s", algorithm, instance_id)
            return None
        return min(candidates, key=lambda s: s.median)

    def best_runs(self, algorithm: str, instance_ids: Optional[Sequence[str]] = None) -> RunTable:
        """Per-init objectives at each instance's best grid point for ``algorithm``"""
        table: RunTable = {}
        for instance_id in instance_ids or self.instance_ids:
            best = self.best(instance_id, algorithm)
            if best is None:
                continue
            for init, value in enumerate(self.objectives(instance_id, algorithm, best.hyper_json)):
                table[(instance_id, init)] = float(value)
        return table

    def summary(self) -> Dict[str, Any]:
        """Best grid point and its quantiles per (instance, algorithm)"""
        out: Dict[str, Any] = {"protocol": self.protocol.to_dict(), "instances": {}}
        wall = [res.wall_time for res in self.results]
        rss = [res.rss_delta for res in self.results]
        out["resources"] = {
            "total_wall_time": float(sum(wall)),
            "max_task_wall_time": float(max(wall, default=0.0)),
            "max_rss_delta": int(max(rss, default=0)),
        }
        for instance_id in self.instance_ids:
            per_alg: Dict[str, Any] = {}
            for algorithm in self.algorithms:
                best = self.best(instance_id, algorithm)
                if best is None:
                    per_alg[algorithm] = {"feasible": False}
                    continue
                entry = asdict(best)
                del entry["instance_id"], entry["algorithm"]
                entry["hyper"] = json.loads(entry.pop("hyper_json"))
                entry["feasible"] = True
                entry["complete"] = best.complete
                per_alg[algorithm] = entry
            out["instances"][instance_id] = per_alg
        return out

    def to_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(SWEEP_HEADER)
            for res in self.results:
                task = res.task
                objective = "nan" if res.diverged else f"{res.best_objective:.12g}"
                writer.writerow(
                    [task.instance_id, task.algorithm, task.hyper_json, task.init, objective, int(res.diverged)]
                )

    def summary_json(self, path: Union[str, Path]) -> None:
        with open(path, "w") as handle:
            json.dump(self.summary(), handle, indent=2, sort_keys=True, allow_nan=True)
            handle.write("\n")

    def histogram_csv(self, path: Union[str, Path], algorithm_a: str, algorithm_b: str, bins: int = 30) -> Histogram:
        hist = pairwise_histogram(self.best_runs(algorithm_a), self.best_runs(algorithm_b), bins)
        hist.to_csv(path)
        return hist


def pairwise_histogram(runs_a: RunTable, runs_b: RunTable, bins: int = 30) -> Histogram:
    """
    Histogram of f(x_A) - f(x_B) over shared (instance, init) pairs, pooled
    across instances.
    """
    if bins < 1:
        raise InvalidConfigError("bins must be >= 1")
    if set(runs_a) != set(runs_b):
        missing = sorted(set(runs_a) ^ set(runs_b))[:5]
        raise MismatchedRunsError(f"run sets differ, e.g. {missing}")
    keys = sorted(runs_a)
    diffs = np.array([runs_a[k] - runs_b[k] for k in keys])
    finite = diffs[np.isfinite(diffs)]
    counts, edges = np.histogram(finite, bins=bins)
    return Histogram(edges, counts, finite, int(diffs.size - finite.size))
