"""scikit-learn style wrapper: input states in, heralded states out.

``QuantumScissors`` treats each row of ``X`` as the Fock amplitudes of the
state fed into the beamsplitter port and ``transform`` returns the normalized
heralded state for each row. The device is stateless, so ``fit`` only checks
the input and records its width.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .detection import DetectorModel, conditioned_density
from .devices import DeviceParams, auto_cutoffs, output_state_closed_form
from .fock import FockVector
from .scissors import HeraldPattern, truncate_max, truncate_min

__all__ = ["QuantumScissors", "check_amplitudes"]


def check_amplitudes(X, norm_tol: float = 1e-6) -> np.ndarray:
    """Validate a batch of state vectors; returns a 2-D complex array.

    ``sklearn.utils.check_array`` rejects complex input, hence this helper.
    A 1-D input is treated as a single state.
    """
    arr = np.asarray(X)
    if arr.dtype == object:
        raise TypeError("amplitudes must be numeric")
    arr = arr.astype(complex, copy=False)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"expected a non-empty 2-D array of amplitudes, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("amplitudes contain NaN or infinity")
    norms = np.sum(np.abs(arr) ** 2, axis=1)
    bad = np.nonzero(np.abs(norms - 1.0) > norm_tol)[0]
    if bad.size:
        raise ValueError(f"rows {bad[:5].tolist()} are not normalized (squared norms {norms[bad[:5]].tolist()})")
    return arr


class QuantumScissors(TransformerMixin, BaseEstimator):
    """Heralded Fock-space truncation of input states.

    Parameters
    ----------
    s, phi, theta : float
        Amplifier strength, pump phase and beamsplitter angle.
    n_photons : int
        Photon count required on the N-detector (the other detector must read 0).
    config : {"max", "min"}
        ``"max"`` keeps Fock levels ``0..n_photons`` of the idler; ``"min"``
        removes levels below ``n_photons`` from the beamsplitter output.
    eta, nu : float
        Detector efficiency and dark-count probability. Only used by
        :meth:`transform_density`; ``transform`` always gives the ideal state.
    """

    def __init__(self, s=0.5, phi=math.pi / 2, theta=math.pi / 4, n_photons=1, config="max", eta=1.0, nu=0.0):
        self.s = s
        self.phi = phi
        self.theta = theta
        self.n_photons = n_photons
        self.config = config
        self.eta = eta
        self.nu = nu

    def _device(self) -> DeviceParams:
        if self.config not in ("max", "min"):
            raise ValueError(f"config must be 'max' or 'min', got {self.config!r}")
        if int(self.n_photons) != self.n_photons or self.n_photons < 0:
            raise ValueError(f"n_photons must be a non-negative integer, got {self.n_photons!r}")
        return DeviceParams(self.s, self.phi, self.theta)

    def fit(self, X, y=None):
        self._device()
        DetectorModel(self.eta, self.nu)
        X = check_amplitudes(X)
        self.n_features_in_ = X.shape[1]
        return self

    def _check(self, X) -> np.ndarray:
        check_is_fitted(self, "n_features_in_")
        X = check_amplitudes(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} levels, the estimator was fitted with {self.n_features_in_}")
        return X

    @property
    def output_dim_(self) -> int:
        check_is_fitted(self, "n_features_in_")
        n = int(self.n_photons)
        return n + 1 if self.config == "max" else n + self.n_features_in_

    def _herald(self, row: np.ndarray):
        fn = truncate_max if self.config == "max" else truncate_min
        return fn(FockVector(row), self._device(), int(self.n_photons))

    def transform(self, X) -> np.ndarray:
        """Heralded output amplitudes, one row per input state."""
        X = self._check(X)
        out = np.zeros((X.shape[0], self.output_dim_), dtype=complex)
        for k, row in enumerate(X):
            amps = self._herald(row).state.amplitudes
            out[k, : amps.size] = amps
        return out

    def herald_probability(self, X) -> np.ndarray:
        """Success probability of the ideal herald for each input state."""
        X = self._check(X)
        return np.array([self._herald(row).probability for row in X])

    def transform_density(self, X) -> np.ndarray:
        """Output density matrices under the imperfect detector ``(eta, nu)``.

        Returns an array of shape ``(n_samples, d, d)`` where ``d`` is the idler
        (or beamsplitter-output) cutoff chosen for the full three-mode state.
        """
        X = self._check(X)
        params = self._device()
        model = DetectorModel(self.eta, self.nu)
        n = int(self.n_photons)
        pattern = HeraldPattern.max_config(n) if self.config == "max" else HeraldPattern.min_config(n)
        mats = []
        for row in X:
            psi = FockVector(row)
            full = output_state_closed_form(psi, params, auto_cutoffs(psi, params))
            rho, _ = conditioned_density(full, pattern, model)
            mats.append(rho.matrix)
        size = max(m.shape[0] for m in mats)
        out = np.zeros((len(mats), size, size), dtype=complex)
        for k, m in enumerate(mats):
            out[k, : m.shape[0], : m.shape[1]] = m
        return out
