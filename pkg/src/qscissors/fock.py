"""Fock-space state containers and ladder-operator expectation values.

Three containers are used throughout the package:

* :class:`FockVector` -- a single-mode pure state, amplitudes indexed by photon number.
* :class:`MultimodeState` -- a sparse three-mode pure state over modes ``a``, ``b``, ``c``.
* :class:`DensityMatrix` -- a single-mode mixed state in the Fock basis.

All of them are immutable once built.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence, Union

import numpy as np
from scipy.special import gammainc, gammaln

from .exceptions import InvalidDimensionError, TruncationWarning

__all__ = [
    "MODES",
    "NORM_TOL",
    "FockVector",
    "MultimodeState",
    "DensityMatrix",
    "coherent_coefficients",
    "fock_state",
    "expectation",
    "ladder_matrix",
    "partial_trace",
    "mode_index",
]

MODES = ("a", "b", "c")
NORM_TOL = 1e-12
TAIL_WARN = 1e-12

Triple = tuple[int, int, int]


def mode_index(label: str) -> int:
    try:
        return MODES.index(label)
    except ValueError:
        raise ValueError(f"unknown mode label {label!r}; expected one of {MODES}") from None


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FockVector:
    """Single-mode pure state ``sum_n amplitudes[n] |n>``.

    ``tail`` is the probability mass known to lie above the cutoff (for example
    the part of a coherent state that does not fit in ``dim`` levels). It is
    informational and does not enter any arithmetic.
    """

    amplitudes: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0:
            raise InvalidDimensionError("a FockVector needs at least one level")
        object.__setattr__(self, "amplitudes", _frozen(amps))
        object.__setattr__(self, "tail", float(self.tail))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def normalize(self) -> "FockVector":
        """Return a unit-norm copy; a vector already within ``NORM_TOL`` is returned as is."""
        nrm2 = self.norm_squared()
        if nrm2 == 0.0:
            raise ValueError("cannot normalize the zero vector")
        if abs(nrm2 - 1.0) <= NORM_TOL:
            return self
        return FockVector(self.amplitudes / math.sqrt(nrm2), tail=self.tail / nrm2)

    def resize(self, dim: int) -> "FockVector":
        """Zero-pad (or cut) to ``dim`` levels. Cutting away nonzero amplitudes is an error."""
        if dim < 1:
            raise InvalidDimensionError(f"dim must be >= 1, got {dim}")
        if dim >= self.dim:
            out = np.zeros(dim, dtype=complex)
            out[: self.dim] = self.amplitudes
            return FockVector(out, tail=self.tail)
        if np.any(self.amplitudes[dim:] != 0):
            raise InvalidDimensionError(f"cannot shrink to {dim} levels without dropping amplitudes")
        return FockVector(self.amplitudes[:dim], tail=self.tail)

    def overlap(self, other: "FockVector") -> complex:
        """``<self|other>`` with implicit zero padding."""
        n = min(self.dim, other.dim)
        return complex(np.vdot(self.amplitudes[:n], other.amplitudes[:n]))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "re": [float(x) for x in self.amplitudes.real],
            "im": [float(x) for x in self.amplitudes.imag],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FockVector":
        re_, im_ = data["re"], data["im"]
        if not (len(re_) == len(im_) == int(data["dim"])):
            raise InvalidDimensionError("re/im lengths do not match dim")
        return cls(np.asarray(re_, dtype=float) + 1j * np.asarray(im_, dtype=float))


def fock_state(n: int, dim: int | None = None) -> FockVector:
    """The number state ``|n>`` in ``dim`` levels (default ``n + 1``)."""
    dim = n + 1 if dim is None else dim
    if n < 0 or n >= dim:
        raise InvalidDimensionError(f"|{n}> does not fit in {dim} levels")
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return FockVector(amps)


def coherent_coefficients(alpha: complex, dim: int) -> FockVector:
    """Fock expansion of the coherent state ``|alpha>`` truncated to ``dim`` levels.

    The coefficients are *not* renormalized; the missing mass is stored in
    ``FockVector.tail``.
    """
    if dim < 1:
        raise InvalidDimensionError(f"dim must be >= 1, got {dim}")
    alpha = complex(alpha)
    n = np.arange(dim)
    r = abs(alpha)
    if r == 0.0:
        amps = np.zeros(dim, dtype=complex)
        amps[0] = 1.0
        return FockVector(amps, tail=0.0)
    logmag = -0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1)
    amps = np.exp(logmag) * np.exp(1j * n * np.angle(alpha))
    # Pr[Poisson(|alpha|^2) >= dim]
    tail = float(gammainc(dim, r * r))
    return FockVector(amps, tail=tail)


@dataclass(frozen=True)
class MultimodeState:
    """Sparse pure state on modes ``(a, b, c)``.

    ``terms`` maps occupation triples to amplitudes and is kept sorted by triple,
    so iteration order is reproducible.
    """

    terms: Mapping[Triple, complex]
    cutoffs: tuple[int, int, int]
    tail: float = 0.0

    def __post_init__(self):
        cutoffs = tuple(int(d) for d in self.cutoffs)
        if len(cutoffs) != 3 or min(cutoffs) < 1:
            raise InvalidDimensionError(f"need three positive cutoffs, got {self.cutoffs}")
        clean = {}
        for key in sorted(self.terms):
            triple = tuple(int(k) for k in key)
            if any(k < 0 or k >= d for k, d in zip(triple, cutoffs)):
                raise InvalidDimensionError(f"triple {triple} outside cutoffs {cutoffs}")
            clean[triple] = complex(self.terms[key])
        object.__setattr__(self, "cutoffs", cutoffs)
        object.__setattr__(self, "terms", MappingProxyType(clean))
        object.__setattr__(self, "tail", float(self.tail))

    @classmethod
    def from_dense(cls, tensor: np.ndarray, tail: float = 0.0) -> "MultimodeState":
        """Sparse view of a dense ``(D_a, D_b, D_c)`` tensor; exact zeros are dropped."""
        tensor = np.asarray(tensor, dtype=complex)
        if tensor.ndim != 3 or min(tensor.shape) < 1:
            raise InvalidDimensionError(f"need a non-empty 3-index tensor, got shape {tensor.shape}")
        idx = np.argwhere(tensor != 0)  # already in lexicographic order
        values = tensor[tuple(idx.T)].tolist()
        terms = dict(zip(map(tuple, idx.tolist()), values))
        self = object.__new__(cls)
        object.__setattr__(self, "terms", MappingProxyType(terms))
        object.__setattr__(self, "cutoffs", tuple(int(d) for d in tensor.shape))
        object.__setattr__(self, "tail", float(tail))
        return self

    def with_tail(self, tail: float) -> "MultimodeState":
        out = object.__new__(type(self))
        object.__setattr__(out, "terms", self.terms)
        object.__setattr__(out, "cutoffs", self.cutoffs)
        object.__setattr__(out, "tail", float(tail))
        return out

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.cutoffs, dtype=complex)
        if self.terms:
            idx = np.array(list(self.terms.keys()), dtype=int)
            out[tuple(idx.T)] = np.fromiter(self.terms.values(), dtype=complex, count=len(self.terms))
        return out

    def amplitude(self, triple: Sequence[int]) -> complex:
        return self.terms.get(tuple(triple), 0j)

    def norm_squared(self) -> float:
        return float(sum(abs(v) ** 2 for v in self.terms.values()))

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class DensityMatrix:
    """Single-mode density operator in the Fock basis."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise InvalidDimensionError(f"density matrix must be square and non-empty, got {mat.shape}")
        object.__setattr__(self, "matrix", _frozen(mat))

    @classmethod
    def from_pure(cls, state: FockVector) -> "DensityMatrix":
        v = state.amplitudes
        return cls(np.outer(v, v.conj()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalize(self) -> "DensityMatrix":
        tr = self.trace()
        if tr <= 0:
            raise ValueError("cannot normalize a density matrix with non-positive trace")
        return DensityMatrix(self.matrix / tr)

    def validate(self, herm_tol: float = 1e-12, trace_tol: float = 1e-10, eig_tol: float = 1e-10) -> "DensityMatrix":
        """Raise ``ValueError`` unless the matrix is a physical, unit-trace state."""
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > herm_tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(self.trace() - 1.0) > trace_tol:
            raise ValueError(f"density matrix trace {self.trace()!r} is not 1")
        if np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() < -eig_tol:
            raise ValueError("density matrix has a negative eigenvalue")
        return self

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "re": [float(x) for x in self.matrix.real.ravel()],
            "im": [float(x) for x in self.matrix.imag.ravel()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "DensityMatrix":
        d = int(data["dim"])
        re_ = np.asarray(data["re"], dtype=float)
        im_ = np.asarray(data["im"], dtype=float)
        if re_.size != d * d or im_.size != d * d:
            raise InvalidDimensionError("re/im sizes do not match dim**2")
        return cls((re_ + 1j * im_).reshape(d, d))


# ---------------------------------------------------------------------------
# ladder-operator words

_TOKEN = re.compile(r"a(†|\^|\+|dag|d)?")


def parse_word(word: Union[str, Sequence[str]]) -> list[bool]:
    """Parse an operator word such as ``"a†a"`` or ``"a^ a^ a a"``.

    Returns a list of flags, True for a creation operator, in written order
    (leftmost operator first). A sequence of ``"a"``/``"ad"`` tokens is also accepted.
    """
    if not isinstance(word, str):
        word = "".join(word)
    text = word.replace(" ", "").replace("*", "")
    ops = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse operator word {word!r} at position {pos}")
        ops.append(m.group(1) is not None)
        pos = m.end()
    return ops


def _apply_word(ops: list[bool], block: np.ndarray) -> np.ndarray:
    """Apply the word to the columns of ``block`` without truncation (rows grow as needed)."""
    out = block
    for create in reversed(ops):
        rows = out.shape[0]
        if create:
            grown = np.zeros((rows + 1,) + out.shape[1:], dtype=complex)
            grown[1:] = out * np.sqrt(np.arange(1, rows + 1)).reshape((-1,) + (1,) * (out.ndim - 1))
            out = grown
        else:
            if rows == 1:
                out = np.zeros_like(out)
            else:
                out = out[1:] * np.sqrt(np.arange(1, rows)).reshape((-1,) + (1,) * (out.ndim - 1))
    return out


def _peak_raise(ops: list[bool]) -> int:
    """How far above its starting level the word pushes a component at any step."""
    level = peak = 0
    for create in reversed(ops):
        level += 1 if create else -1
        peak = max(peak, level)
    return peak


def ladder_matrix(word: Union[str, Sequence[str]], dim: int) -> np.ndarray:
    """Exact matrix elements ``<k|W|m>`` for ``k, m < dim``."""
    ops = parse_word(word)
    full = _apply_word(ops, np.eye(dim, dtype=complex))
    out = np.zeros((dim, dim), dtype=complex)
    rows = min(dim, full.shape[0])
    out[:rows] = full[:rows]
    return out


def expectation(state: Union[FockVector, DensityMatrix], word: Union[str, Sequence[str]]) -> complex:
    """``<W>`` for a ladder-operator word ``W`` such as ``"a†a"`` or ``"a†a†aa"``.

    The word is applied exactly to the stored amplitudes, so no error comes from
    the operator itself. A :class:`TruncationWarning` is issued when the word
    raises occupations above the cutoff of a state known to be truncated.
    """
    ops = parse_word(word)
    if isinstance(state, FockVector):
        v = state.amplitudes
        w = _apply_word(ops, v.reshape(-1, 1))[:, 0]
        if _peak_raise(ops) > 0 and state.tail > TAIL_WARN:
            warnings.warn(
                f"operator word {word!r} reaches above the cutoff of a state with tail mass {state.tail:.3g}",
                TruncationWarning,
                stacklevel=2,
            )
        n = min(v.size, w.size)
        return complex(np.vdot(v[:n], w[:n]))
    if isinstance(state, DensityMatrix):
        return complex(np.trace(state.matrix @ ladder_matrix(word, state.dim)))
    raise TypeError(f"expectation needs a FockVector or DensityMatrix, got {type(state).__name__}")


def partial_trace(state: MultimodeState, keep: str) -> DensityMatrix:
    """Reduced density matrix of mode ``keep``; its trace equals the input's squared norm."""
    k = mode_index(keep)
    psi = np.moveaxis(state.to_dense(), k, 0)
    flat = psi.reshape(psi.shape[0], -1)
    return DensityMatrix(flat @ flat.conj().T)
