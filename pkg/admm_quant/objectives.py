"""
Smooth Objectives
=================

The solvers only talk to the :class:`SmoothObjective` contract: a value, a
gradient, the Lipschitz constant of the gradient ``lipschitz_L`` and the weak
convexity modulus ``weak_convexity_mu`` (``f + mu/2 ||x||^2`` is convex).

Two concrete objectives are provided:

* :class:`QuadraticObjective` ``1/2 x'Qx + b'x + c`` with Q symmetric
* :class:`LogisticObjective`  mean logistic loss of a linear classifier

Built-in objectives compute their constants; user objectives wrapped with
:class:`FunctionObjective` must declare them.
"""

import csv
import json
import logging
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple, Union

import numpy as np
import scipy.linalg
from scipy.special import expit, log_expit

from admm_quant.errors import (
    DimensionMismatchError,
    EigenSolverError,
    InvalidConfigError,
    NonFiniteInputError,
)

logger = logging.getLogger(__name__)


class SmoothObjective(ABC):
    """Contract every objective handed to a solver must satisfy"""

    dim: int

    @abstractmethod
    def value(self, x: np.ndarray) -> float:
        pass

    @abstractmethod
    def gradient(self, x: np.ndarray) -> np.ndarray:
        pass

    @property
    @abstractmethod
    def lipschitz_L(self) -> float:
        pass

    @property
    @abstractmethod
    def weak_convexity_mu(self) -> float:
        pass

    def value_batch(self, points: np.ndarray) -> np.ndarray:
        """Values at every row of an (n, dim) array; override when vectorizable"""
        return np.array([self.value(p) for p in points])

    def gradient_batch(self, points: np.ndarray) -> np.ndarray:
        return np.array([self.gradient(p) for p in points])

    def check_dim(self, x: Any, name: str = "x") -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.shape[0] != self.dim:
            raise DimensionMismatchError(self.dim, x.shape[-1] if x.ndim else 0, name)
        return x


class QuadraticObjective(SmoothObjective):
    """
    f(x) = 1/2 x'Qx + b'x + c

    ``Q`` is symmetrized on construction. ``c`` only shifts values; it lets small
    hand examples such as 1/2 (x - 0.4)^2 be written exactly.
    """

    def __init__(self, Q: Any, b: Any, c: float = 0.0):
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise DimensionMismatchError(Q.shape[0], Q.shape[-1], "Q (must be square)")
        if b.shape != (Q.shape[0],):
            raise DimensionMismatchError(Q.shape[0], b.shape[0], "b")
        if not (np.all(np.isfinite(Q)) and np.all(np.isfinite(b)) and math.isfinite(c)):
            raise NonFiniteInputError("quadratic data must be finite")
        if not np.array_equal(Q, Q.T):
            Q = 0.5 * (Q + Q.T)
        self.Q = Q
        self.b = b
        self.c = float(c)
        self.dim = Q.shape[0]
        self._constants: Optional[Tuple[float, float]] = None

    def value(self, x: np.ndarray) -> float:
        x = self.check_dim(x)
        return float(0.5 * x @ self.Q @ x + self.b @ x + self.c)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = self.check_dim(x)
        return self.Q @ x + self.b

    def value_batch(self, points: np.ndarray) -> np.ndarray:
        return 0.5 * np.einsum("ij,jk,ik->i", points, self.Q, points) + points @ self.b + self.c

    def gradient_batch(self, points: np.ndarray) -> np.ndarray:
        return points @ self.Q + self.b

    @property
    def lipschitz_L(self) -> float:
        return estimate_constants(self)[0]

    @property
    def weak_convexity_mu(self) -> float:
        return estimate_constants(self)[1]

    def unconstrained_minimizer(self) -> Optional[np.ndarray]:
        """Solution of Qx = -b when Q is positive definite, else None"""
        try:
            factor = scipy.linalg.cho_factor(self.Q, check_finite=False)
        except np.linalg.LinAlgError:
            return None
        return scipy.linalg.cho_solve(factor, -self.b, check_finite=False)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"Q": self.Q.tolist(), "b": self.b.tolist()}
        if self.c != 0.0:
            data["c"] = self.c
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "QuadraticObjective":
        if "Q" not in data or "b" not in data:
            raise InvalidConfigError("quadratic instance needs 'Q' and 'b'")
        return cls(data["Q"], data["b"], float(data.get("c", 0.0)))


class LogisticObjective(SmoothObjective):
    """
    Mean logistic loss (1/N) sum log(1 + exp(-y_i <w, x_i>)) with labels in {-1, +1}.

    Convex, so mu = 0; the gradient is lambda_max(X'X)/(4N)-Lipschitz.
    """

    def __init__(self, features: Any, labels: Any):
        features = np.asarray(features, dtype=float)
        labels = np.asarray(labels, dtype=float)
        if features.ndim != 2:
            raise DimensionMismatchError(2, features.ndim, "feature matrix rank")
        if labels.shape != (features.shape[0],):
            raise DimensionMismatchError(features.shape[0], labels.shape[0], "labels")
        if not np.all(np.isin(labels, (-1.0, 1.0))):
            raise InvalidConfigError("labels must be -1 or +1")
        if not np.all(np.isfinite(features)):
            raise NonFiniteInputError("features must be finite")
        self.features = features
        self.labels = labels
        self.n_samples, self.dim = features.shape
        self._constants: Optional[Tuple[float, float]] = None

    def _margins(self, w: np.ndarray) -> np.ndarray:
        return self.labels * (self.features @ w)

    def value(self, w: np.ndarray) -> float:
        w = self.check_dim(w, "w")
        # log1p(exp(-t)) == -log(sigmoid(t)), evaluated without overflow
        return float(-np.mean(log_expit(self._margins(w))))

    def gradient(self, w: np.ndarray) -> np.ndarray:
        w = self.check_dim(w, "w")
        weights = self.labels * expit(-self._margins(w))
        return -(self.features.T @ weights) / self.n_samples

    @property
    def lipschitz_L(self) -> float:
        return estimate_constants(self)[0]

    @property
    def weak_convexity_mu(self) -> float:
        return 0.0

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "LogisticObjective":
        """First column is the +/-1 label, the remaining columns are features"""
        data = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(data[:, 1:], data[:, 0])

    def to_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            for label, row in zip(self.labels, self.features):
                writer.writerow([f"{label:.0f}"] + [repr(float(v)) for v in row])


class FunctionObjective(SmoothObjective):
    """User-supplied objective; the caller declares L_f and mu"""

    def __init__(
        self,
        value_fn: Callable[[np.ndarray], float],
        gradient_fn: Callable[[np.ndarray], np.ndarray],
        dim: int,
        lipschitz_L: float,
        weak_convexity_mu: float = 0.0,
    ):
        if not lipschitz_L > 0 or weak_convexity_mu < 0:
            raise InvalidConfigError("need lipschitz_L > 0 and weak_convexity_mu >= 0")
        self._value_fn = value_fn
        self._gradient_fn = gradient_fn
        self.dim = dim
        self._L = float(lipschitz_L)
        self._mu = float(weak_convexity_mu)

    def value(self, x: np.ndarray) -> float:
        return float(self._value_fn(self.check_dim(x)))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self._gradient_fn(self.check_dim(x)), dtype=float)

    @property
    def lipschitz_L(self) -> float:
        return self._L

    @property
    def weak_convexity_mu(self) -> float:
        return self._mu


def quad_value(obj: QuadraticObjective, x: Any) -> float:
    return obj.value(x)


def quad_gradient(obj: QuadraticObjective, x: Any) -> np.ndarray:
    return obj.gradient(x)


def logistic_value(obj: LogisticObjective, w: Any) -> float:
    return obj.value(w)


def logistic_gradient(obj: LogisticObjective, w: Any) -> np.ndarray:
    return obj.gradient(w)


def _extreme_eigenvalues(matrix: np.ndarray) -> Tuple[float, float]:
    try:
        eigenvalues = scipy.linalg.eigh(matrix, eigvals_only=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"symmetric eigensolver failed: {exc}") from exc
    return float(eigenvalues[0]), float(eigenvalues[-1])


def estimate_constants(obj: Union[QuadraticObjective, LogisticObjective]) -> Tuple[float, float]:
    """
    (L_f, mu) for a built-in objective, cached on the instance.

    Quadratic: L_f = max |eig(Q)|, mu = max(0, -lambda_min(Q)).
    Logistic:  L_f = lambda_max(X'X) / (4N), mu = 0.
    """
    if obj._constants is not None:
        return obj._constants
    if isinstance(obj, QuadraticObjective):
        lam_min, lam_max = _extreme_eigenvalues(obj.Q)
        # L_f is the spectral norm of Q; an all-zero Q still needs a positive constant
        lipschitz = max(abs(lam_max), abs(lam_min), np.finfo(float).tiny)
        mu = max(0.0, -lam_min)
    elif isinstance(obj, LogisticObjective):
        gram = obj.features.T @ obj.features
        _, lam_max = _extreme_eigenvalues(gram)
        lipschitz = max(lam_max / (4.0 * obj.n_samples), np.finfo(float).tiny)
        mu = 0.0
    else:
        raise TypeError(f"cannot estimate constants for {type(obj).__name__}")
    obj._constants = (float(lipschitz), float(mu))
    logger.debug("%s constants: L_f=%.6g mu=%.6g", type(obj).__name__, lipschitz, mu)
    return obj._constants


def load_instance(path: Union[str, Path]) -> Tuple[QuadraticObjective, Dict[str, Any]]:
    """Read a quadratic instance file; returns the objective and the raw document"""
    with open(path) as handle:
        data = json.load(handle)
    return QuadraticObjective.from_dict(data), data


def save_instance(
    path: Union[str, Path], obj: QuadraticObjective, extra: Optional[Dict[str, Any]] = None
) -> None:
    """Write ``obj`` (plus any ``extra`` keys such as the set) as JSON; output is stable"""
    data = dict(extra or {})
    data.update(obj.to_dict())
    with open(path, "w") as handle:
        json.dump(data, handle, indent=2, sort_keys=True)
        handle.write("\n")


def make_two_gaussians(
    n_samples: int, dim: int, separation: float = 1.0, seed: int = 0
) -> LogisticObjective:
    """
    Balanced two-class data: x ~ N(y * m, I) with ||m|| = separation / 2 along a
    random direction, y = +/-1.
    """
    if n_samples < 2 or dim < 1:
        raise InvalidConfigError("need at least two samples and one feature")
    rng = np.random.Generator(np.random.Philox(seed))
    direction = rng.standard_normal(dim)
    direction /= np.linalg.norm(direction)
    labels = np.where(np.arange(n_samples) % 2 == 0, 1.0, -1.0)
    rng.shuffle(labels)
    features = rng.standard_normal((n_samples, dim)) + np.outer(labels, direction) * separation / 2
    return LogisticObjective(features, labels)


# -- contract spot checks ---------------------------------------------------


def check_gradient(obj: SmoothObjective, x: Any, h: float = 1e-6) -> float:
    """Relative error between the gradient and central finite differences"""
    x = obj.check_dim(x)
    analytic = obj.gradient(x)
    numeric = np.empty_like(x)
    for i in range(obj.dim):
        step = np.zeros_like(x)
        step[i] = h * max(1.0, abs(x[i]))
        numeric[i] = (obj.value(x + step) - obj.value(x - step)) / (2 * step[i])
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1.0)
    return float(np.linalg.norm(analytic - numeric) / scale)


def check_lipschitz(
    obj: SmoothObjective, rng: np.random.Generator, pairs: int = 1000, scale: float = 1.0
) -> float:
    """Largest observed ||grad f(x) - grad f(y)|| / ||x - y|| over random pairs"""
    worst = 0.0
    for _ in range(pairs):
        x = rng.normal(0.0, scale, obj.dim)
        y = rng.normal(0.0, scale, obj.dim)
        gap = np.linalg.norm(x - y)
        if gap > 0:
            worst = max(worst, float(np.linalg.norm(obj.gradient(x) - obj.gradient(y)) / gap))
    return worst


def check_weak_convexity(
    obj: SmoothObjective,
    rng: np.random.Generator,
    pairs: int = 1000,
    scale: float = 1.0,
    slack: float = 1e-9,
) -> int:
    """Number of midpoint-convexity violations of f + mu/2 ||.||^2"""
    mu = obj.weak_convexity_mu

    def regularized(z: np.ndarray) -> float:
        return obj.value(z) + 0.5 * mu * float(z @ z)

    violations = 0
    for _ in range(pairs):
        x = rng.normal(0.0, scale, obj.dim)
        y = rng.normal(0.0, scale, obj.dim)
        lhs = regularized(0.5 * (x + y))
        rhs = 0.5 * (regularized(x) + regularized(y))
        if lhs > rhs + slack * (1.0 + abs(rhs)):
            violations += 1
    return violations
