"""Nonclassicality indicators for single-mode states."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Union

from .exceptions import UndefinedMetricError, UnsupportedStateError
from .fock import DensityMatrix, FockVector, expectation

__all__ = [
    "MetricReport",
    "mean_photon_number",
    "mandel_q",
    "quadrature_variance",
    "skew_information",
    "metric_report",
]

State = Union[FockVector, DensityMatrix]

VACUUM_MEAN = 1e-14


def mean_photon_number(state: State) -> float:
    return expectation(state, "a†a").real


def mandel_q(state: State) -> float:
    """``Var(n) / <n> - 1``: -1 for number states, 0 for coherent states."""
    mean = mean_photon_number(state)
    if mean < VACUUM_MEAN:
        raise UndefinedMetricError("Mandel Q is undefined for the vacuum (<n> = 0)")
    second = expectation(state, "a†aa†a").real
    return (second - mean * mean) / mean - 1.0


def quadrature_variance(state: State) -> float:
    """Variance of ``X = (a + a†) / 2``; coherent states give 1/4."""
    mean_a = expectation(state, "a")
    mean_x = mean_a.real  # (<a> + <a†>) / 2
    x2 = (
        expectation(state, "aa")
        + expectation(state, "aa†")
        + expectation(state, "a†a")
        + expectation(state, "a†a†")
    ).real / 4.0
    return x2 - mean_x * mean_x


def skew_information(state: FockVector) -> float:
    """Wigner-Yanase skew information of a pure state, ``1/2 + <a†a> - |<a>|^2``."""
    if not isinstance(state, FockVector):
        raise UnsupportedStateError("skew information is only defined here for pure states")
    mean_a = expectation(state, "a")
    return 0.5 + mean_photon_number(state) - abs(mean_a) ** 2


@dataclass(frozen=True)
class MetricReport:
    mean_n: float
    mandel_q: Optional[float]
    var_x: float
    skew_w: Optional[float]

    def as_dict(self) -> dict:
        return asdict(self)


def metric_report(state: State) -> MetricReport:
    """All indicators at once; undefined ones are ``None``."""
    try:
        q = mandel_q(state)
    except UndefinedMetricError:
        q = None
    w = skew_information(state) if isinstance(state, FockVector) else None
    return MetricReport(
        mean_n=mean_photon_number(state),
        mandel_q=q,
        var_x=quadrature_variance(state),
        skew_w=w,
    )
