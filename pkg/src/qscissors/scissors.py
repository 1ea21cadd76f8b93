"""Heralded truncation in the two detector placements.

* ``truncate_max`` -- detectors on both beamsplitter outputs (b reads ``N``, c reads 0);
  the amplifier idler ``a`` is left with Fock components ``0..N`` only.
* ``truncate_min`` -- detectors on the amplifier idler and one beamsplitter output
  (a reads ``N``, c reads 0); mode ``b`` is left with components ``>= N`` only.

``project_herald`` does the same post-selection generically on a full
three-mode state and serves as the independent check of both closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .devices import DeviceParams
from .exceptions import ZeroProbabilityHeraldError
from .fock import MODES, FockVector, MultimodeState, mode_index

__all__ = [
    "MIN_PROBABILITY",
    "HeraldPattern",
    "HeraldedState",
    "truncate_max",
    "truncate_min",
    "project_herald",
    "max_config_amplitudes",
    "min_config_amplitudes",
]

MIN_PROBABILITY = 1e-15


@dataclass(frozen=True)
class HeraldPattern:
    """``mode_n`` registers ``count`` photons while ``mode_zero`` registers none."""

    mode_n: str
    mode_zero: str
    count: int

    def __post_init__(self):
        mode_index(self.mode_n)
        mode_index(self.mode_zero)
        if self.mode_n == self.mode_zero:
            raise ValueError("the two detectors must watch different modes")
        if self.count < 0:
            raise ValueError(f"photon count must be >= 0, got {self.count}")

    @property
    def output_mode(self) -> str:
        (left,) = set(MODES) - {self.mode_n, self.mode_zero}
        return left

    @classmethod
    def max_config(cls, count: int) -> "HeraldPattern":
        return cls("b", "c", count)

    @classmethod
    def min_config(cls, count: int) -> "HeraldPattern":
        return cls("a", "c", count)


@dataclass(frozen=True)
class HeraldedState:
    state: FockVector
    probability: float

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0 + 1e-12:
            raise ValueError(f"herald probability {self.probability} outside [0, 1]")


def _finish(amps: np.ndarray, probability: float, what: str) -> HeraldedState:
    if probability < MIN_PROBABILITY:
        raise ZeroProbabilityHeraldError(f"{what} has probability {probability:.3g}")
    return HeraldedState(FockVector(amps / math.sqrt(probability)).normalize(), min(probability, 1.0))


def max_config_amplitudes(psi: np.ndarray, params: DeviceParams, count: int) -> np.ndarray:
    """Unnormalized idler amplitudes ``<n|_a`` for ``n = 0..count`` after the (count, 0) herald."""
    psi = np.asarray(psi, dtype=complex)
    n = np.arange(count + 1)
    k = count - n  # input photons that went to detector b
    psi_k = np.where(k < psi.size, psi[np.minimum(k, psi.size - 1)], 0.0)
    binom = np.exp(0.5 * (gammaln(count + 1) - gammaln(n + 1) - gammaln(k + 1)))
    pump = -complex(math.cos(params.phi), math.sin(params.phi)) * math.tanh(params.s)
    tc, mrc = params.T.conjugate(), -params.R.conjugate()
    return (1.0 / math.cosh(params.s)) * binom * psi_k * pump**n * tc**n * mrc**k


def truncate_max(state: FockVector, params: DeviceParams, count: int) -> HeraldedState:
    """Herald ``count`` photons at ``b`` and none at ``c``; the idler keeps levels ``0..count``.

    The probability is ``sech^2 s * sum_n C(count, n) |psi_{count-n}|^2 |T|^{2n} |R|^{2(count-n)} tanh^{2n} s``.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    amps = max_config_amplitudes(state.amplitudes, params, count)
    prob = float(np.sum(np.abs(amps) ** 2))
    return _finish(amps, prob, f"herald (b={count}, c=0)")


def min_config_amplitudes(psi: np.ndarray, params: DeviceParams, count: int) -> np.ndarray:
    """Unnormalized amplitudes of mode ``b`` on levels ``0..count+len(psi)-1`` after the (count, 0) herald."""
    psi = np.asarray(psi, dtype=complex)
    i = np.arange(psi.size)
    binom = np.exp(0.5 * (gammaln(i + count + 1) - gammaln(i + 1) - gammaln(count + 1)))
    pump = -complex(math.cos(params.phi), math.sin(params.phi)) * math.tanh(params.s)
    prefactor = (pump * params.T.conjugate()) ** count / math.cosh(params.s)
    out = np.zeros(count + psi.size, dtype=complex)
    out[count:] = prefactor * binom * psi * (-params.R.conjugate()) ** i
    return out


def truncate_min(state: FockVector, params: DeviceParams, count: int) -> HeraldedState:
    """Herald ``count`` photons at ``a`` and none at ``c``; mode ``b`` loses every level below ``count``.

    The infinite sum over input levels stops at the input cutoff; the neglected
    probability is bounded using ``state.tail`` and is kept far below the result
    for the default cutoffs.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if count >= 1 and (params.s == 0 or abs(params.T) == 0):
        raise ZeroProbabilityHeraldError(
            f"herald (a={count}, c=0) needs s > 0 and |T| > 0 (got s={params.s}, theta={params.theta})"
        )
    amps = min_config_amplitudes(state.amplitudes, params, count)
    prob = float(np.sum(np.abs(amps) ** 2))
    return _finish(amps, prob, f"herald (a={count}, c=0)")


def project_herald(full: MultimodeState, pattern: HeraldPattern) -> HeraldedState:
    """Post-select ``full`` on ``pattern`` by direct projection.

    The probability is the collected squared norm over the squared norm of ``full``.
    """
    k_n, k_0 = mode_index(pattern.mode_n), mode_index(pattern.mode_zero)
    k_out = mode_index(pattern.output_mode)
    if pattern.count >= full.cutoffs[k_n]:
        raise ValueError(f"count {pattern.count} is beyond the cutoff of mode {pattern.mode_n}")
    amps = np.zeros(full.cutoffs[k_out], dtype=complex)
    for triple, amp in full.terms.items():
        if triple[k_n] == pattern.count and triple[k_0] == 0:
            amps[triple[k_out]] += amp
    collected = float(np.vdot(amps, amps).real)
    total = full.norm_squared()
    if collected == 0.0 or total == 0.0:
        raise ZeroProbabilityHeraldError(f"no amplitude matches {pattern}")
    prob = collected / total
    if prob < MIN_PROBABILITY:
        raise ZeroProbabilityHeraldError(f"{pattern} has probability {prob:.3g}")
    return HeraldedState(FockVector(amps / math.sqrt(collected)).normalize(), min(prob, 1.0))
