"""
Solver Configuration
====================

Plain dataclasses validated on construction. ``from_dict`` / ``to_dict`` let the
CLI and protocol files round-trip them through JSON or TOML.
"""

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, Optional, Union

from admm_quant.errors import InvalidConfigError

CLOSED_FORM = "closed_form"
GRADIENT_DESCENT = "gradient_descent"
INNER_MODES = (CLOSED_FORM, GRADIENT_DESCENT)

DUAL_INIT_ZERO = "zero"
DUAL_INIT_GRADIENT = "gradient"


@dataclass
class InnerSolverConfig:
    """
    Settings of the x-update.

    ``closed_form`` needs a quadratic objective; ``gradient_descent`` runs plain
    GD on the augmented Lagrangian, by default with step 2/(sigma + rho + L_f),
    sigma = rho - mu. ``tol`` is the gradient-norm target of exact updates done
    by GD; ``abs_grad_tol`` is the floor at which any inexact update is accepted.
    """

    mode: str = CLOSED_FORM
    step_size: Union[float, str] = "auto"
    max_inner_iters: int = 10000
    abs_grad_tol: float = 1e-12
    tol: float = 1e-10

    def __post_init__(self):
        if self.mode not in INNER_MODES:
            raise InvalidConfigError(f"inner mode must be one of {INNER_MODES}, got {self.mode!r}")
        if self.step_size != "auto":
            try:
                self.step_size = float(self.step_size)
            except (TypeError, ValueError) as exc:
                raise InvalidConfigError("step_size must be 'auto' or a number") from exc
            if not self.step_size > 0:
                raise InvalidConfigError("step_size must be positive")
        if self.max_inner_iters < 1:
            raise InvalidConfigError("max_inner_iters must be >= 1")
        if not (self.abs_grad_tol > 0 and self.tol > 0):
            raise InvalidConfigError("inner tolerances must be positive")

    def resolve_step(self, lipschitz_L: float, mu: float, rho: float) -> float:
        if self.step_size != "auto":
            return float(self.step_size)
        return 2.0 / ((rho - mu) + rho + lipschitz_L)


@dataclass
class SolverConfig:
    rho: float = 1.0
    gamma: float = 0.0
    beta: float = 1.0
    mask_prob: float = 1.0
    max_iters: int = 1000
    window: int = 50
    inner: InnerSolverConfig = field(default_factory=InnerSolverConfig)
    seed: int = 0
    # std-dev of the initial Gaussian draw; None means the set's spacing
    init_scale: Optional[float] = None
    dual_init: str = DUAL_INIT_ZERO
    trace_stride: int = 1
    keep_iterates: bool = False
    # GD+Proj settings
    gd_tol: float = 1e-8
    gd_max_iters: int = 100000

    def __post_init__(self):
        if isinstance(self.inner, dict):
            self.inner = InnerSolverConfig(**self.inner)
        checks = [
            (self.rho > 0 and math.isfinite(self.rho), "rho must be a positive finite number"),
            (self.gamma >= 0, "gamma must be >= 0"),
            (self.beta > 0, "beta must be > 0"),
            (0 < self.mask_prob <= 1, "mask_prob must lie in (0, 1]"),
            (self.max_iters >= 0, "max_iters must be >= 0"),
            (self.window >= 1, "window must be >= 1"),
            (self.trace_stride >= 1, "trace_stride must be >= 1"),
            (0 <= self.seed < 2**64, "seed must be a 64-bit unsigned integer"),
            (self.init_scale is None or self.init_scale > 0, "init_scale must be positive"),
            (self.dual_init in (DUAL_INIT_ZERO, DUAL_INIT_GRADIENT), "dual_init must be 'zero' or 'gradient'"),
            (self.gd_tol > 0 and self.gd_max_iters >= 1, "invalid GD+Proj settings"),
        ]
        for ok, message in checks:
            if not ok:
                raise InvalidConfigError(message)

    def replace(self, **changes: Any) -> "SolverConfig":
        data = self.to_dict()
        data.update(changes)
        return SolverConfig.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolverConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfigError(f"unknown solver settings: {sorted(unknown)}")
        return cls(**data)
