"""Quantum scissors built from a nondegenerate parametric amplifier and a beamsplitter."""

from .detection import DetectorModel, PovmElement, conditioned_density, fidelity, povm_element
from .devices import DeviceParams, output_state_closed_form, output_state_oracle, squeeze_coefficient
from .estimator import QuantumScissors, check_amplitudes
from .exceptions import (
    InvalidDimensionError,
    OracleFailureError,
    ScissorsError,
    TruncationError,
    TruncationWarning,
    UndefinedMetricError,
    UnsupportedStateError,
    ZeroProbabilityHeraldError,
)
from .fock import (
    DensityMatrix,
    FockVector,
    MultimodeState,
    coherent_coefficients,
    expectation,
    fock_state,
    partial_trace,
)
from .metrics import MetricReport, mandel_q, metric_report, quadrature_variance, skew_information
from .scissors import HeraldedState, HeraldPattern, project_herald, truncate_max, truncate_min

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "DetectorModel",
    "DeviceParams",
    "FockVector",
    "HeraldPattern",
    "HeraldedState",
    "InvalidDimensionError",
    "MetricReport",
    "MultimodeState",
    "OracleFailureError",
    "PovmElement",
    "QuantumScissors",
    "ScissorsError",
    "TruncationError",
    "TruncationWarning",
    "UndefinedMetricError",
    "UnsupportedStateError",
    "ZeroProbabilityHeraldError",
    "check_amplitudes",
    "coherent_coefficients",
    "conditioned_density",
    "expectation",
    "fidelity",
    "fock_state",
    "mandel_q",
    "metric_report",
    "output_state_closed_form",
    "output_state_oracle",
    "partial_trace",
    "povm_element",
    "project_herald",
    "quadrature_variance",
    "skew_information",
    "squeeze_coefficient",
    "truncate_max",
    "truncate_min",
]
