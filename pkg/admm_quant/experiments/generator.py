"""
Instance Generator
==================

Random quadratic-over-lattice instances

    Q = Qt' Qt + q q',   Qt_ij ~ N(0, 1),  q_i ~ N(0, sigma_q^2)
    b_i ~ N(0, b_scale^2),  A = (v Z)^d

plus the bundled (v, d, sigma_q^2) presets of the benchmark table.
"""

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from admm_quant.discrete_sets import DiscreteProductSet
from admm_quant.errors import InvalidConfigError
from admm_quant.objectives import QuadraticObjective, save_instance
from admm_quant.seeding import make_rng

# stream key of instance draws, kept apart from the per-run init/mask streams
INSTANCE_STREAM = 7


@dataclass(frozen=True)
class InstanceSpec:
    d: int
    v: float = 8.0
    sigma_q_sq: float = 30.0
    # std-dev of the entries of b; None means sqrt(d * sigma_q_sq)
    b_scale: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise InvalidConfigError(f"d must be >= 1, got {self.d}")
        if not (self.v > 0 and math.isfinite(self.v)):
            raise InvalidConfigError(f"v must be positive, got {self.v}")
        if self.sigma_q_sq < 0:
            raise InvalidConfigError(f"sigma_q_sq must be >= 0, got {self.sigma_q_sq}")
        if self.b_scale is not None and self.b_scale < 0:
            raise InvalidConfigError(f"b_scale must be >= 0, got {self.b_scale}")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfigError("seed must be a 64-bit unsigned integer")

    @property
    def resolved_b_scale(self) -> float:
        if self.b_scale is not None:
            return self.b_scale
        return math.sqrt(self.d * self.sigma_q_sq)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "InstanceSpec":
        try:
            return cls(**data)
        except TypeError as exc:
            raise InvalidConfigError(f"bad instance spec: {exc}") from exc


# (v, d, sigma_q^2)
PRESETS: Dict[str, Tuple[float, int, float]] = {
    "v8-d8-s30": (8.0, 8, 30.0),
    "v8-d16-s30": (8.0, 16, 30.0),
    "v8-d32-s30": (8.0, 32, 30.0),
    "v8-d64-s30": (8.0, 64, 30.0),
    "v8-d16-s10": (8.0, 16, 10.0),
    "v8-d16-s50": (8.0, 16, 50.0),
    "v8-d16-s70": (8.0, 16, 70.0),
}


def preset(name: str, seed: int = 0) -> InstanceSpec:
    try:
        v, d, sigma_q_sq = PRESETS[name]
    except KeyError:
        raise InvalidConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return InstanceSpec(d=d, v=v, sigma_q_sq=sigma_q_sq, seed=seed)


def generate_instance(spec: InstanceSpec) -> Tuple[QuadraticObjective, DiscreteProductSet]:
    rng = make_rng(spec.seed, INSTANCE_STREAM)
    q_tilde = rng.standard_normal((spec.d, spec.d))
    q_vec = rng.normal(0.0, math.sqrt(spec.sigma_q_sq), spec.d)
    b = rng.normal(0.0, spec.resolved_b_scale, spec.d)
    Q = q_tilde.T @ q_tilde + np.outer(q_vec, q_vec)
    Q = 0.5 * (Q + Q.T)
    return QuadraticObjective(Q, b), DiscreteProductSet.lattice(spec.d, spec.v)


def save_instance_file(
    path: Union[str, Path],
    objective: QuadraticObjective,
    discrete_set: DiscreteProductSet,
    spec: Optional[InstanceSpec] = None,
) -> None:
    extra: Dict[str, Any] = {"set": discrete_set.to_dict()}
    if spec is not None:
        extra["spec"] = spec.to_dict()
    save_instance(path, objective, extra)


def load_instance_file(
    path: Union[str, Path]
) -> Tuple[QuadraticObjective, DiscreteProductSet]:
    """Read an instance written by :func:`save_instance_file`"""
    try:
        with open(path) as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfigError(f"cannot read instance {path}: {exc}") from exc
    if "set" not in data:
        raise InvalidConfigError(f"instance {path} has no 'set' description")
    return QuadraticObjective.from_dict(data), DiscreteProductSet.from_dict(data["set"])
