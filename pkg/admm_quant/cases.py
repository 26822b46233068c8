"""
Worked-example fixtures.

Each ``data/cases/<name>.toml`` file holds one array of tables per operation,
for example ``[[project]]``. Every entry carries a ``description``, an
``expected`` value and any number of input fields. Sets and quadratics use a
compact form:

    set = { kind = "lattice", dim = 2, v = 8 }     # homogeneous product
    set = { coords = [ { kind = "binary" }, ... ] }
    Q = [[2.0, 0.0], [0.0, 2.0]]
    b = [-1.2, 2.6]
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import toml

from admm_quant.discrete_sets import DiscreteProductSet, coordinate_from_dict
from admm_quant.errors import InvalidConfigError
from admm_quant.objectives import QuadraticObjective

CASES_DIR = Path(__file__).parent / "data" / "cases"
INSTANCES_DIR = Path(__file__).parent / "data" / "instances"

_METADATA_FIELDS = {"description", "expected", "timeout"}


@dataclass
class Case:
    description: str
    input: Dict[str, Any]
    expected: Any = None
    timeout: float = 1.0

    def __getitem__(self, key: str) -> Any:
        return self.input[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.input.get(key, default)

    @property
    def discrete_set(self) -> DiscreteProductSet:
        return build_set(self.input["set"])

    @property
    def objective(self) -> QuadraticObjective:
        return QuadraticObjective(self.input["Q"], self.input["b"], float(self.input.get("c", 0.0)))


def build_set(spec: Dict[str, Any]) -> DiscreteProductSet:
    if "coords" in spec:
        return DiscreteProductSet.from_dict(spec)
    spec = dict(spec)
    dim = int(spec.pop("dim", 1))
    return DiscreteProductSet([coordinate_from_dict(spec)] * dim)


def load_cases(name: str, section: str, cases_dir: Optional[Path] = None) -> List[Case]:
    """Entries of ``[[section]]`` in ``<cases_dir>/<name>.toml``"""
    path = (cases_dir or CASES_DIR) / f"{name}.toml"
    try:
        with open(path) as handle:
            data = toml.load(handle)
    except (OSError, toml.TomlDecodeError) as exc:
        raise InvalidConfigError(f"cannot load cases {path}: {exc}") from exc
    cases = []
    for entry in data.get(section, []):
        inputs = {k: v for k, v in entry.items() if k not in _METADATA_FIELDS}
        cases.append(
            Case(
                description=entry.get("description", ""),
                input=inputs,
                expected=entry.get("expected"),
                timeout=entry.get("timeout", 1.0),
            )
        )
    if not cases:
        raise InvalidConfigError(f"{path} has no [[{section}]] entries")
    return cases


def instance_path(name: str) -> Path:
    """Path of a bundled instance file, e.g. ``instance_path("demo_1d")``"""
    return INSTANCES_DIR / f"{name}.json"
