"""Amplifier + beamsplitter action on ``|0>_a |0>_b |psi>_c``.

Two independent constructions of the three-mode output state are provided:

``output_state_closed_form``
    the analytic quadruple sum over (input level, pair number, split indices);
``output_state_oracle``
    brute force: the squeezing and beamsplitter generators are built as sparse
    matrices on a padded truncated space and exponentiated numerically.

They share nothing except the parameter container, so agreement between them
is a meaningful check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln

from .exceptions import InvalidDimensionError, OracleFailureError, TruncationError
from .fock import FockVector, MultimodeState

__all__ = [
    "DEFAULT_DIM",
    "ORACLE_PADDING",
    "DeviceParams",
    "squeeze_coefficient",
    "squeeze_coefficients",
    "pair_cutoff",
    "auto_cutoffs",
    "output_state_closed_form",
    "output_state_oracle",
    "max_abs_difference",
]

DEFAULT_DIM = 30
ORACLE_PADDING = 10
TAIL_BUDGET = 1e-9
UNITARITY_TOL = 1e-8

Cutoffs = Union[int, Sequence[int]]


@dataclass(frozen=True)
class DeviceParams:
    """Amplifier strength ``s``, pump phase ``phi`` and beamsplitter angle ``theta``.

    Transmittance and reflectance follow ``T = cos(theta)``, ``R = i sin(theta)``.
    """

    s: float
    phi: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        for name in ("s", "phi", "theta"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.s < 0:
            raise ValueError(f"amplifier strength s must be >= 0, got {self.s}")

    @property
    def xi(self) -> complex:
        return self.s * complex(math.cos(self.phi), math.sin(self.phi))

    @property
    def T(self) -> complex:
        return complex(math.cos(self.theta), 0.0)

    @property
    def R(self) -> complex:
        return complex(0.0, math.sin(self.theta))


def squeeze_coefficient(n: int, s: float, phi: float) -> complex:
    """Two-mode squeezed vacuum amplitude on ``|n, n>``: ``sech s (-e^{i phi} tanh s)^n``."""
    return (1.0 / math.cosh(s)) * (-complex(math.cos(phi), math.sin(phi)) * math.tanh(s)) ** n


def _powers(x: complex, count: int) -> np.ndarray:
    out = np.empty(count, dtype=complex)
    out[0] = 1.0
    for k in range(1, count):
        out[k] = out[k - 1] * x
    return out


def squeeze_coefficients(s: float, phi: float, count: int) -> np.ndarray:
    return _powers(-complex(math.cos(phi), math.sin(phi)) * math.tanh(s), count) / math.cosh(s)


def pair_cutoff(s: float, eps: float = 1e-14) -> int:
    """Smallest ``N`` with ``tanh(s)^(2N) < eps``: pair numbers beyond it are negligible."""
    t = math.tanh(s)
    if t == 0.0:
        return 1
    return int(math.floor(math.log(eps) / (2.0 * math.log(t)))) + 1


def auto_cutoffs(state: FockVector, params: DeviceParams, eps: float = 1e-14) -> tuple[int, int, int]:
    """Cutoffs that keep the dropped mass of the output state below roughly ``eps``."""
    d_a = max(pair_cutoff(params.s, eps), 2)
    probs = state.probabilities()
    # last input level carrying more than eps of the mass
    significant = np.nonzero(probs > eps)[0]
    d_in = max(int(significant[-1]) + 2 if significant.size else 1, state.dim, 2)
    # b and c share the n pair photons and the i input photons
    return d_a, d_a + d_in, d_a + d_in


def _as_cutoffs(cutoffs: Cutoffs) -> tuple[int, int, int]:
    if isinstance(cutoffs, (int, np.integer)):
        out = (int(cutoffs),) * 3
    else:
        out = tuple(int(d) for d in cutoffs)
    if len(out) != 3 or min(out) < 1:
        raise InvalidDimensionError(f"cutoffs must be a positive int or three positive ints, got {cutoffs!r}")
    return out


def output_state_closed_form(
    state: FockVector,
    params: DeviceParams,
    cutoffs: Cutoffs = DEFAULT_DIM,
    tail_budget: float = TAIL_BUDGET,
) -> MultimodeState:
    """Analytic output state ``R(theta) S(xi) |0, 0, psi>``.

    Each input level ``i`` and pair number ``n`` splits into ``j`` (of ``i``) and
    ``m`` (of ``n``) photons leaving through ``c``; the term lands on
    ``|n, i-j+n-m, j+m>`` with weight

        sqrt(i!) / (j! (i-j)!) * sqrt(n!) / (m! (n-m)!) * sqrt((i-j+n-m)!) * sqrt((j+m)!)
        * psi_i * A_n * T^j * conj(T)^(n-m) * R^m * (-conj(R))^(i-j)

    Combinatorial factors are evaluated through log-gamma. Terms falling outside
    ``cutoffs`` are dropped; if the dropped mass exceeds ``tail_budget`` a
    :class:`TruncationError` is raised.
    """
    d_a, d_b, d_c = _as_cutoffs(cutoffs)
    psi = state.amplitudes
    n_in = state.dim
    # keep pairs down to amplitude ~1e-16, not just mass 1e-14
    n_pairs = min(d_a, pair_cutoff(params.s, eps=1e-32))
    T, R = params.T, params.R

    i = np.arange(n_in).reshape(-1, 1, 1, 1)
    n = np.arange(n_pairs).reshape(1, -1, 1, 1)
    j = np.arange(n_in).reshape(1, 1, -1, 1)
    m = np.arange(n_pairs).reshape(1, 1, 1, -1)
    valid = (j <= i) & (m <= n)
    i_b, i_c = np.broadcast_arrays(i - j + n - m, j + m)
    keep = valid & (i_b < d_b) & (i_c < d_c) & (n < d_a)

    ii, nn, jj, mm = (np.broadcast_to(x, keep.shape)[keep] for x in (i, n, j, m))
    ob, oc = i_b[keep], i_c[keep]

    log_weight = (
        0.5 * gammaln(ii + 1) - gammaln(jj + 1) - gammaln(ii - jj + 1)
        + 0.5 * gammaln(nn + 1) - gammaln(mm + 1) - gammaln(nn - mm + 1)
        + 0.5 * gammaln(ob + 1) + 0.5 * gammaln(oc + 1)
    )
    top = max(n_in, n_pairs) + 1
    t_pow, tc_pow = _powers(T, top), _powers(T.conjugate(), top)
    r_pow, mrc_pow = _powers(R, top), _powers(-R.conjugate(), top)
    a_n = squeeze_coefficients(params.s, params.phi, n_pairs)

    amp = (
        np.exp(log_weight)
        * psi[ii] * a_n[nn]
        * t_pow[jj] * tc_pow[nn - mm] * r_pow[mm] * mrc_pow[ii - jj]
    )
    dense = np.zeros((d_a, d_b, d_c), dtype=complex)
    np.add.at(dense, (nn, ob, oc), amp)

    out = MultimodeState.from_dense(dense)
    tail = state.tail + max(state.norm_squared() - out.norm_squared(), 0.0)
    if tail > tail_budget:
        raise TruncationError(
            f"cutoffs {(d_a, d_b, d_c)} drop an estimated mass {tail:.3g} > {tail_budget:.1g} "
            f"(s={params.s}, input dim {n_in}); increase the cutoffs"
        )
    return out.with_tail(tail)


@lru_cache(maxsize=16)
def _pair_operators(d1: int, d2: int) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Annihilation operators of the first and second mode on a ``d1 * d2`` space."""
    def lower(d):
        return sp.diags(np.sqrt(np.arange(1, d, dtype=float)), 1, shape=(d, d), dtype=complex, format="csr")

    first = sp.kron(lower(d1), sp.identity(d2, dtype=complex), format="csr")
    second = sp.kron(sp.identity(d1, dtype=complex), lower(d2), format="csr")
    return first, second


def _check_unitary(before: np.ndarray, after: np.ndarray, what: str) -> None:
    drift = float(np.vdot(after, after).real - np.vdot(before, before).real)
    if abs(drift) > UNITARITY_TOL:
        raise OracleFailureError(f"truncated {what} exponential changed the norm by {drift:.3g}")


def output_state_oracle(
    state: FockVector,
    params: DeviceParams,
    cutoffs: Cutoffs = DEFAULT_DIM,
    padding: int = ORACLE_PADDING,
    tail_budget: float = TAIL_BUDGET,
) -> MultimodeState:
    """Output state by direct numerical exponentiation of the device generators.

    Squeezing: ``exp(conj(xi) a b - xi a^dag b^dag)`` on the (a, b) pair.
    Beamsplitter: ``exp(i theta (b^dag c + b c^dag))`` on the (b, c) pair.

    Each generator is a sparse matrix on its two-mode truncated space, padded by
    ``padding`` levels per mode; the result is restricted to ``cutoffs``.
    """
    d_out = _as_cutoffs(cutoffs)
    da, db, dc = (d + padding for d in d_out)
    if state.dim > dc:
        raise InvalidDimensionError(f"input has {state.dim} levels but mode c holds only {dc}")

    a, b = _pair_operators(da, db)
    xi = params.xi
    g_squeeze = (np.conj(xi) * (a @ b) - xi * (a.conj().T @ b.conj().T)).tocsr()
    vac = np.zeros(da * db, dtype=complex)
    vac[0] = 1.0
    pair = expm_multiply(g_squeeze, vac) if params.s != 0 else vac
    _check_unitary(vac, pair, "squeezing")

    psi = np.zeros(dc, dtype=complex)
    psi[: state.dim] = state.amplitudes
    # rows: a level; columns: flattened (b, c)
    full = np.einsum("ab,c->abc", pair.reshape(da, db), psi).reshape(da, db * dc)

    b2, c2 = _pair_operators(db, dc)
    g_split = (1j * params.theta * (b2.conj().T @ c2 + b2 @ c2.conj().T)).tocsr()
    if params.theta != 0:
        mixed = expm_multiply(g_split, full.T).T
    else:
        mixed = full
    _check_unitary(full.ravel(), mixed.ravel(), "beamsplitter")

    block = mixed.reshape(da, db, dc)[: d_out[0], : d_out[1], : d_out[2]]
    out = MultimodeState.from_dense(block)
    tail = state.tail + max(float(np.vdot(mixed, mixed).real) - out.norm_squared(), 0.0)
    if tail > tail_budget:
        raise TruncationError(
            f"cutoffs {d_out} drop an estimated mass {tail:.3g} > {tail_budget:.1g}; increase the cutoffs"
        )
    return out.with_tail(tail)


def max_abs_difference(first: MultimodeState, second: MultimodeState) -> float:
    """Largest ``|amp_1 - amp_2|`` over the union of stored triples."""
    if first.cutoffs == second.cutoffs:
        return float(np.max(np.abs(first.to_dense() - second.to_dense())))
    keys = set(first.terms) | set(second.terms)
    if not keys:
        return 0.0
    return max(abs(first.amplitude(k) - second.amplitude(k)) for k in keys)
