"""Python front end for the bergman-lab C++ core."""

import json

from ._core import (
    ConfigError,
    DomainError,
    HartogsKernel,
    KernelModel,
    PlanarDomain,
    PreconditionError,
    ScaleUnderflow,
    appendix_verifier,
    beta_alpha_gate,
    build_hartogs_kernel,
    build_kernel,
    classify_power_law,
    classify_stretched_exponential,
    classify_tabulated,
    hartogs_eval,
    kernel_eval,
    levi_min_eigenvalue,
    list_scenarios,
    metric,
)
from ._core import run_scenario as _run_scenario


def run_scenario(config):
    """Run a scenario from a config dict. Returns (csv_text, summary_dict, passed)."""
    csv_text, summary, passed = _run_scenario(json.dumps(config))
    return csv_text, json.loads(summary), passed


__all__ = [
    "ConfigError",
    "DomainError",
    "HartogsKernel",
    "KernelModel",
    "PlanarDomain",
    "PreconditionError",
    "ScaleUnderflow",
    "appendix_verifier",
    "beta_alpha_gate",
    "build_hartogs_kernel",
    "build_kernel",
    "classify_power_law",
    "classify_stretched_exponential",
    "classify_tabulated",
    "hartogs_eval",
    "kernel_eval",
    "levi_min_eigenvalue",
    "list_scenarios",
    "metric",
    "run_scenario",
]
