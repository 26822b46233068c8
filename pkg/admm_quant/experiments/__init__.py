"""
Benchmark harness: instance generation, protocol sweeps, aggregation and the
logistic-regression demo.
"""

from admm_quant.experiments.aggregate import Histogram, SweepResult, pairwise_histogram
from admm_quant.experiments.generator import (
    PRESETS,
    InstanceSpec,
    generate_instance,
    load_instance_file,
    preset,
    save_instance_file,
)
from admm_quant.experiments.logistic import LogisticDemoResult, run_logistic_demo
from admm_quant.experiments.runner import Instance, ProtocolSpec, SweepTask, TaskResult, run_protocol

__all__ = [
    "PRESETS",
    "Histogram",
    "Instance",
    "InstanceSpec",
    "LogisticDemoResult",
    "ProtocolSpec",
    "SweepResult",
    "SweepTask",
    "TaskResult",
    "generate_instance",
    "load_instance_file",
    "pairwise_histogram",
    "preset",
    "run_logistic_demo",
    "run_protocol",
    "save_instance_file",
]
