"""Exclusion-process simulation lab.

Closed-form density profiles, a seed-reproducible event-driven simulator,
coupled multi-class dynamics and the experiment harness, all backed by the
C++ core.
"""

from ._core import (
    Configuration,
    EventStream,
    ExperimentSpec,
    JumpKernel,
    ResultRow,
    ResultTable,
    StepProfileParams,
    Window,
    burgers_profile,
    characteristic_speeds,
    empirical_density,
    evolve_to,
    integrated_profile,
    lln_error,
    parse_spec,
    run_experiment,
    run_invariant_suite,
    sample_initial_step,
)

__all__ = [
    "Configuration",
    "EventStream",
    "ExperimentSpec",
    "JumpKernel",
    "ResultRow",
    "ResultTable",
    "StepProfileParams",
    "Window",
    "burgers_profile",
    "characteristic_speeds",
    "empirical_density",
    "evolve_to",
    "integrated_profile",
    "lln_error",
    "parse_spec",
    "run_experiment",
    "run_invariant_suite",
    "sample_initial_step",
]

__version__ = "0.1.0"
