"""Truncated diagonal (Riesz-spectral) generators and their fractional powers.

A :class:`DiagonalGenerator` is the finite section of an operator that is
diagonal in an orthonormal basis,

    A = sum_k lambda_k <., phi_k> phi_k,

so every function of ``-A`` acts entrywise on ``-lambda_k``. Fractional powers
use the principal branch of the complex logarithm, which is the sectorial
calculus on such operators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import DimensionError, ValidationError


def _as_complex_matrix(entries, name="matrix") -> np.ndarray:
    arr = np.asarray(entries, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A dense complex matrix expressed in a named orthonormal frame.

    ``np.asarray(op)`` returns the entries, so an ``OperatorMatrix`` can be
    passed anywhere a plain array is accepted.
    """

    entries: np.ndarray
    basis_tag: str = "euclidean"

    def __post_init__(self):
        arr = _as_complex_matrix(self.entries, "entries")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("OperatorMatrix entries must be finite (no NaN/Inf)")
        if not self.basis_tag:
            raise ValidationError("OperatorMatrix basis_tag must be non-empty")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def H(self) -> "OperatorMatrix":
        """Conjugate transpose (the adjoint in orthonormal coordinates)."""
        return OperatorMatrix(self.entries.conj().T, self.basis_tag)

    def __matmul__(self, other):
        return OperatorMatrix(self.entries @ np.asarray(other), self.basis_tag)

    def __repr__(self):
        return f"OperatorMatrix(shape={self.shape}, basis_tag={self.basis_tag!r})"


def as_matrix(x) -> np.ndarray:
    """Return a complex 2-D array view of ``x`` (OperatorMatrix, generator or array)."""
    if isinstance(x, DiagonalGenerator):
        return x.matrix()
    return _as_complex_matrix(np.asarray(x), "operand")


@dataclass(frozen=True, eq=False)
class DiagonalGenerator:
    """Finite section of a diagonal generator, given by its eigenvalues.

    Parameters
    ----------
    eigenvalues : sequence of complex
        Diagonal entries ``lambda_k``. All must satisfy ``Re lambda_k < 0`` and
        be pairwise distinct.
    mode_labels : sequence, optional
        Opaque labels, one per eigenvalue. Defaults to ``1..N``.
    alpha_hint : float, optional
        The polynomial stability exponent the operator is claimed to have.
    """

    eigenvalues: np.ndarray
    mode_labels: tuple = field(default=())
    alpha_hint: Optional[float] = None

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=complex).ravel()
        if lam.size < 1:
            raise ValidationError("DiagonalGenerator needs at least one eigenvalue")
        if not np.all(np.isfinite(lam)):
            raise ValidationError("eigenvalues must be finite")
        if np.any(lam.real >= 0):
            bad = lam[lam.real >= 0][0]
            raise ValidationError(
                f"every eigenvalue must have strictly negative real part (found {bad})"
            )
        if np.unique(lam).size != lam.size:
            raise ValidationError("eigenvalues must be pairwise distinct")
        labels = tuple(self.mode_labels) if len(self.mode_labels) else tuple(range(1, lam.size + 1))
        if len(labels) != lam.size:
            raise ValidationError(
                f"mode_labels has length {len(labels)} but there are {lam.size} eigenvalues"
            )
        if self.alpha_hint is not None and not self.alpha_hint >= 0:
            raise ValidationError("alpha_hint must be nonnegative")
        lam.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "mode_labels", labels)

    def __len__(self):
        return self.eigenvalues.size

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    def matrix(self) -> np.ndarray:
        return np.diag(self.eigenvalues)

    def to_json_dict(self) -> dict:
        return {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "labels": [_jsonable_label(lbl) for lbl in self.mode_labels],
            "alpha_hint": None if self.alpha_hint is None else float(self.alpha_hint),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "DiagonalGenerator":
        try:
            pairs = data["eigenvalues"]
        except KeyError:
            raise ValidationError("generator JSON needs an 'eigenvalues' list") from None
        eig = [complex(*p) if isinstance(p, (list, tuple)) else complex(p) for p in pairs]
        return cls(eig, tuple(data.get("labels") or ()), data.get("alpha_hint"))

    @classmethod
    def from_json(cls, text: str) -> "DiagonalGenerator":
        return cls.from_json_dict(json.loads(text))


def _jsonable_label(label: Any):
    if isinstance(label, (np.integer,)):
        return int(label)
    if isinstance(label, (int, float, str)) or label is None:
        return label
    return str(label)


def shifted_imaginary(n: int, sigma: float = 1.0) -> DiagonalGenerator:
    """Eigenvalues ``-sigma + i k`` for ``k = 1..n`` (exponentially stable)."""
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    k = np.arange(1, n + 1)
    return DiagonalGenerator(-sigma + 1j * k, tuple(int(i) for i in k), alpha_hint=0.0)


def polynomial_damped(n: int, alpha: float) -> DiagonalGenerator:
    """Eigenvalues ``-1/k**alpha + i k`` for ``k = 1..n``.

    The resolvent on the imaginary axis peaks at ``omega = k`` with height
    ``k**alpha``, so the generated semigroup is polynomially stable with ``alpha``.
    """
    if alpha <= 0:
        raise ValidationError("alpha must be positive")
    k = np.arange(1, n + 1, dtype=float)
    return DiagonalGenerator(-k ** (-float(alpha)) + 1j * k, tuple(range(1, n + 1)), float(alpha))


def fractional_power(gen: DiagonalGenerator, beta: float) -> OperatorMatrix:
    """Return ``(-A)**beta`` as a diagonal matrix.

    Uses ``exp(beta * Log(-lambda_k))`` with the principal logarithm; ``beta = 0``
    gives the identity and ``beta = 1`` gives ``-lambda_k`` exactly.
    """
    return OperatorMatrix(np.diag(_power_diagonal(gen, beta)), "eigenbasis")


def negative_fractional_power(gen: DiagonalGenerator, beta: float) -> OperatorMatrix:
    """Return ``(-A)**(-beta)``, the bounded inverse of :func:`fractional_power`."""
    return OperatorMatrix(np.diag(1.0 / _power_diagonal(gen, beta)), "eigenbasis")


def _power_diagonal(gen: DiagonalGenerator, beta: float) -> np.ndarray:
    if not isinstance(gen, DiagonalGenerator):
        raise TypeError("fractional powers are defined for DiagonalGenerator only")
    beta = float(beta)
    if not beta >= 0:
        raise ValidationError(f"beta must be nonnegative, got {beta}")
    neg = -gen.eigenvalues
    if np.any(neg.real <= 0):
        # unreachable for a validated generator, kept as a guard for the branch cut
        raise ValidationError("eigenvalue with nonnegative real part hits the branch cut")
    if beta == 0:
        return np.ones_like(neg)
    if beta == 1:
        return neg.copy()
    return np.exp(beta * np.log(neg))


def graph_norm(gen, beta: float, factor) -> float:
    """Largest singular value of ``(-A)**beta @ factor``.

    ``gen`` is normally a :class:`DiagonalGenerator`. A dense square matrix is
    also accepted for integer ``beta``, in which case the matrix power of ``-A``
    is used (this is how ``||(-A_1) B||`` is evaluated for the non-diagonal 2D
    wave block). For the adjoint-side quantity ``||(-A*)**gamma C*||`` pass the
    conjugate transpose of the C-factor and the adjoint generator; for diagonal
    generators ``|(-conj(lambda))**gamma| == |(-lambda)**gamma|``, so passing
    ``C.H`` with the same generator gives the same value.
    """
    fac = as_matrix(factor)
    if isinstance(gen, DiagonalGenerator):
        if fac.shape[0] != gen.size:
            raise DimensionError(
                f"factor has {fac.shape[0]} rows but the generator has {gen.size} modes"
            )
        scaled = _power_diagonal(gen, beta)[:, None] * fac
    else:
        m = as_matrix(gen)
        if m.shape[0] != m.shape[1]:
            raise DimensionError("dense generator must be square")
        if fac.shape[0] != m.shape[0]:
            raise DimensionError(f"factor has {fac.shape[0]} rows, generator has {m.shape[0]}")
        if float(beta) != int(beta) or beta < 0:
            raise ValidationError("dense generators support nonnegative integer beta only")
        scaled = np.linalg.matrix_power(-m, int(beta)) @ fac
    if scaled.size == 0:
        return 0.0
    return float(np.linalg.norm(scaled, 2))


def adjoint_graph_norm(gen, gamma: float, c_factor) -> float:
    """``||(-A*)**gamma C*||`` for a C-side factor given in its natural (p x N) shape."""
    c = as_matrix(c_factor)
    if isinstance(gen, DiagonalGenerator):
        adj = DiagonalGenerator(gen.eigenvalues.conj(), gen.mode_labels)
        return graph_norm(adj, gamma, c.conj().T)
    return graph_norm(as_matrix(gen).conj().T, gamma, c.conj().T)


def coordinate_column(size: int, index: int, weight: complex = 1.0) -> OperatorMatrix:
    """``weight * e_index`` as a ``size x 1`` column (0-based index)."""
    col = np.zeros((size, 1), dtype=complex)
    col[index, 0] = weight
    return OperatorMatrix(col)

