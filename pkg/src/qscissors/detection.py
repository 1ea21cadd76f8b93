"""Imperfect photon-number-resolving detection.

A detector with efficiency ``eta`` and dark-count probability ``nu`` reports
``N`` counts on an ``m``-photon input with probability

    sum_{n=0}^{min(N, m)} Poisson(N - n; nu) * Binomial(n; m, eta)

i.e. ``n`` of the ``m`` photons are registered and ``N - n`` clicks are dark
counts. The POVM elements are diagonal in the Fock basis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidDimensionError, TruncationWarning, ZeroProbabilityHeraldError
from .fock import DensityMatrix, FockVector, MultimodeState, mode_index
from .scissors import MIN_PROBABILITY, HeraldPattern

__all__ = [
    "DetectorModel",
    "PovmElement",
    "povm_element",
    "conditioned_density",
    "fidelity",
]

POVM_TAIL_WARN = 1e-12


@dataclass(frozen=True)
class DetectorModel:
    eta: float = 1.0
    nu: float = 0.0
    max_count: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"efficiency eta must lie in [0, 1], got {self.eta}")
        if self.nu < 0:
            raise ValueError(f"dark-count probability nu must be >= 0, got {self.nu}")
        if self.max_count is not None and self.max_count < 0:
            raise ValueError("max_count must be >= 0")

    @property
    def is_ideal(self) -> bool:
        return self.eta == 1.0 and self.nu == 0.0


@dataclass(frozen=True)
class PovmElement:
    """Diagonal of ``Pi_N`` over Fock levels ``m = 0..dim-1``.

    ``tail_bound`` bounds the weight the element would put on levels at or
    above the cutoff, ``(1 - eta)^(dim - N)``.
    """

    count: int
    diagonal: np.ndarray
    tail_bound: float = 0.0

    @property
    def dim(self) -> int:
        return self.diagonal.size


def povm_element(model: DetectorModel, count: int, dim: int) -> PovmElement:
    """Fock-diagonal POVM element for ``count`` registered clicks."""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if dim < 1:
        raise InvalidDimensionError(f"dim must be >= 1, got {dim}")
    if model.max_count is not None and count > model.max_count:
        raise ValueError(f"detector resolves at most {model.max_count} photons, asked for {count}")
    eta, nu = model.eta, model.nu
    dark = [math.exp(-nu) * nu ** (count - n) / math.factorial(count - n) for n in range(count + 1)]
    diag = np.zeros(dim)
    for m in range(dim):
        diag[m] = sum(
            dark[n] * math.comb(m, n) * eta**n * (1.0 - eta) ** (m - n)
            for n in range(min(count, m) + 1)
        )
    bound = (1.0 - eta) ** (dim - count) if dim > count else 1.0
    return PovmElement(count, diag, bound)


def conditioned_density(
    full: MultimodeState, pattern: HeraldPattern, model: DetectorModel
) -> tuple[DensityMatrix, float]:
    """State of the undetected mode given imperfect (count, 0) detections.

    Returns the normalized density matrix and the herald probability, i.e. the
    trace of ``Tr_detected[Pi_0 Pi_N |full><full|]`` before normalization.
    """
    k_n, k_0 = mode_index(pattern.mode_n), mode_index(pattern.mode_zero)
    k_out = mode_index(pattern.output_mode)
    pi_n = povm_element(model, pattern.count, full.cutoffs[k_n])
    pi_0 = povm_element(model, 0, full.cutoffs[k_0])
    worst = max(pi_n.tail_bound, pi_0.tail_bound)
    if worst > POVM_TAIL_WARN and full.tail > POVM_TAIL_WARN:
        warnings.warn(f"POVM cutoff bound {worst:.3g} on a truncated state", TruncationWarning, stacklevel=2)

    psi = np.moveaxis(full.to_dense(), (k_out, k_n, k_0), (0, 1, 2))
    weights = np.outer(pi_n.diagonal, pi_0.diagonal)
    rho = np.einsum("xnz,nz,ynz->xy", psi, weights, psi.conj())
    prob = float(np.trace(rho).real)
    if prob < MIN_PROBABILITY:
        raise ZeroProbabilityHeraldError(f"{pattern} with {model} has probability {prob:.3g}")
    rho = DensityMatrix(0.5 * (rho + rho.conj().T) / prob)
    rho.validate()
    return rho, prob


def fidelity(rho: DensityMatrix, target: FockVector) -> float:
    """``<target|rho|target>``, clamped to [0, 1]."""
    if rho.dim != target.dim:
        raise InvalidDimensionError(f"density matrix has dim {rho.dim}, target has {target.dim}")
    v = target.amplitudes
    value = float(np.vdot(v, rho.matrix @ v).real)
    return min(max(value, 0.0), 1.0)
