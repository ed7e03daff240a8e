"""Assembly of truncated 2x2 block operator matrices.

Off-diagonal blocks are stored in factored form ``left @ right`` because the
stability conditions constrain the two factors separately. Block layout::

    triangular        [[A1, B C ], [0,     A2]]
    lower_triangular  [[A1, 0   ], [B C,   A2]]
    full              [[A1, B1 C2], [B2 C1, A2]]

``coupling_12`` is always the top-right product and ``coupling_21`` the
bottom-left one.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from functools import cached_property
from typing import Optional, Union

import numpy as np

from ._exponents import Exponent, as_exponent, as_fraction, to_exact_string
from .errors import DimensionError, ValidationError
from .spectral import DiagonalGenerator, OperatorMatrix, as_matrix

TRIANGULAR = "triangular"
LOWER_TRIANGULAR = "lower_triangular"
FULL = "full"
KINDS = (TRIANGULAR, LOWER_TRIANGULAR, FULL)


@dataclass(frozen=True, eq=False)
class CouplingFactors:
    """Low-rank factors of an off-diagonal block, ``block = left @ right``.

    ``left`` is N x p (the B side), ``right`` is p x M (the C side). ``p = 0``
    encodes the zero coupling.
    """

    left: OperatorMatrix
    right: OperatorMatrix
    coupling_dim_finite: bool = True

    def __post_init__(self):
        left = self.left if isinstance(self.left, OperatorMatrix) else OperatorMatrix(self.left)
        right = self.right if isinstance(self.right, OperatorMatrix) else OperatorMatrix(self.right)
        if left.shape[1] != right.shape[0]:
            raise DimensionError(
                f"inner coupling dimensions disagree: left has {left.shape[1]} columns, "
                f"right has {right.shape[0]} rows"
            )
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @classmethod
    def zero(cls, rows: int, cols: int) -> "CouplingFactors":
        return cls(
            OperatorMatrix(np.zeros((rows, 0), dtype=complex)),
            OperatorMatrix(np.zeros((0, cols), dtype=complex)),
        )

    @property
    def rank_bound(self) -> int:
        return self.left.shape[1]

    def product(self) -> np.ndarray:
        return np.asarray(self.left) @ np.asarray(self.right)

    def scaled(self, left_scale=1.0, right_scale=1.0) -> "CouplingFactors":
        return CouplingFactors(
            OperatorMatrix(np.asarray(self.left) * left_scale, self.left.basis_tag),
            OperatorMatrix(np.asarray(self.right) * right_scale, self.right.basis_tag),
            self.coupling_dim_finite,
        )


@dataclass(frozen=True)
class Exponents:
    """Declared analysis exponents. Unused entries stay ``None``.

    ``alpha1``/``alpha2`` may be the ``"exponential"`` tag.
    """

    alpha1: Optional[Exponent] = None
    alpha2: Optional[Exponent] = None
    beta: Optional[Exponent] = None
    gamma: Optional[Exponent] = None
    beta1: Optional[Exponent] = None
    gamma1: Optional[Exponent] = None
    beta2: Optional[Exponent] = None
    gamma2: Optional[Exponent] = None

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name.startswith("alpha"):
                value = as_exponent(value, f.name)
            else:
                value = as_fraction(value, f.name)
            if not isinstance(value, str) and value < 0:
                raise ValidationError(f"exponent {f.name} must be nonnegative")
            object.__setattr__(self, f.name, value)

    def to_json_dict(self) -> dict:
        return {f.name: to_exact_string(getattr(self, f.name))
                for f in fields(self) if getattr(self, f.name) is not None}

    @classmethod
    def from_json_dict(cls, data: Optional[dict]) -> "Exponents":
        data = dict(data or {})
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ValidationError(f"unknown exponent keys: {sorted(unknown)}")
        return cls(**data)

    def swapped(self) -> "Exponents":
        return Exponents(
            alpha1=self.alpha2, alpha2=self.alpha1, beta=self.beta, gamma=self.gamma,
            beta1=self.beta2, gamma1=self.gamma2, beta2=self.beta1, gamma2=self.gamma1,
        )


def _spectral_abscissa(m: np.ndarray) -> float:
    return float(np.max(np.linalg.eigvals(m).real))


@dataclass(frozen=True, eq=False)
class BlockSystem:
    """A truncated 2x2 block generator.

    ``gen1``/``gen2`` keep the diagonal generators when the blocks came from
    one, so fractional powers remain available to the verdict layer.
    """

    kind: str
    a1: np.ndarray
    a2: np.ndarray
    coupling_12: Optional[CouplingFactors] = None
    coupling_21: Optional[CouplingFactors] = None
    exponents: Exponents = field(default_factory=Exponents)
    gen1: Optional[DiagonalGenerator] = None
    gen2: Optional[DiagonalGenerator] = None
    allow_unstable: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"kind must be one of {KINDS}, got {self.kind!r}")
        a1, a2 = as_matrix(self.a1).copy(), as_matrix(self.a2).copy()
        for name, a in (("a1", a1), ("a2", a2)):
            if a.shape[0] != a.shape[1]:
                raise DimensionError(f"{name} must be square, got {a.shape}")
            if not np.all(np.isfinite(a)):
                raise ValidationError(f"{name} has non-finite entries")
            a.setflags(write=False)
        n1, n2 = a1.shape[0], a2.shape[0]
        c12, c21 = self.coupling_12, self.coupling_21
        if self.kind == TRIANGULAR:
            if c21 is not None:
                raise ValidationError("triangular systems have no coupling_21")
            c12 = c12 if c12 is not None else CouplingFactors.zero(n1, n2)
        elif self.kind == LOWER_TRIANGULAR:
            if c12 is not None:
                raise ValidationError("lower triangular systems have no coupling_12")
            c21 = c21 if c21 is not None else CouplingFactors.zero(n2, n1)
        else:
            c12 = c12 if c12 is not None else CouplingFactors.zero(n1, n2)
            c21 = c21 if c21 is not None else CouplingFactors.zero(n2, n1)
        if c12 is not None and (c12.left.shape[0] != n1 or c12.right.shape[1] != n2):
            raise DimensionError(
                f"coupling_12 must map X2 -> X1: left needs {n1} rows (has {c12.left.shape[0]}), "
                f"right needs {n2} columns (has {c12.right.shape[1]})"
            )
        if c21 is not None and (c21.left.shape[0] != n2 or c21.right.shape[1] != n1):
            raise DimensionError(
                f"coupling_21 must map X1 -> X2: left needs {n2} rows (has {c21.left.shape[0]}), "
                f"right needs {n1} columns (has {c21.right.shape[1]})"
            )
        for name, gen, a in (("gen1", self.gen1, a1), ("gen2", self.gen2, a2)):
            if gen is not None and not np.array_equal(np.diag(gen.eigenvalues), a):
                raise ValidationError(f"{name} does not match the corresponding diagonal block")
        if not self.allow_unstable:
            for name, a, gen in (("a1", a1, self.gen1), ("a2", a2, self.gen2)):
                if gen is not None:
                    continue  # generators are validated on construction
                if _spectral_abscissa(a) >= 0:
                    raise ValidationError(
                        f"{name} spectrum must lie in the open left half-plane "
                        "(pass allow_unstable=True for instability demonstrations)"
                    )
        if not isinstance(self.exponents, Exponents):
            object.__setattr__(self, "exponents", Exponents(**dict(self.exponents)))
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", a2)
        object.__setattr__(self, "coupling_12", c12)
        object.__setattr__(self, "coupling_21", c21)

    @property
    def n1(self) -> int:
        return self.a1.shape[0]

    @property
    def n2(self) -> int:
        return self.a2.shape[0]

    @cached_property
    def matrix(self) -> np.ndarray:
        """The dense ``(N1+N2) x (N1+N2)`` generator."""
        n1, n2 = self.n1, self.n2
        out = np.zeros((n1 + n2, n1 + n2), dtype=complex)
        out[:n1, :n1] = self.a1
        out[n1:, n1:] = self.a2
        if self.coupling_12 is not None:
            out[:n1, n1:] = self.coupling_12.product()
        if self.coupling_21 is not None:
            out[n1:, :n1] = self.coupling_21.product()
        out.setflags(write=False)
        return out

    def with_exponents(self, **kwargs) -> "BlockSystem":
        return replace(self, exponents=replace(self.exponents, **kwargs))


Block = Union[np.ndarray, OperatorMatrix, DiagonalGenerator]


def _block(a: Block):
    if isinstance(a, DiagonalGenerator):
        return a.matrix(), a
    return as_matrix(a), None


def _factors(b, c, finite) -> CouplingFactors:
    if isinstance(b, CouplingFactors):
        return b
    return CouplingFactors(
        b if isinstance(b, OperatorMatrix) else OperatorMatrix(b),
        c if isinstance(c, OperatorMatrix) else OperatorMatrix(c),
        finite,
    )


def assemble_triangular(a1: Block, a2: Block, b, c, *, exponents=None,
                        y_finite: bool = True, allow_unstable: bool = False) -> BlockSystem:
    """Build ``[[A1, B C], [0, A2]]``.

    ``b`` may also be a ready :class:`CouplingFactors` (then ``c`` is ignored).
    The dense matrix is available as ``system.matrix``.
    """
    m1, g1 = _block(a1)
    m2, g2 = _block(a2)
    return BlockSystem(
        TRIANGULAR, m1, m2, coupling_12=_factors(b, c, y_finite),
        exponents=exponents or Exponents(), gen1=g1, gen2=g2, allow_unstable=allow_unstable,
    )


def assemble_full(a1: Block, a2: Block, b1, c1, b2, c2, *, exponents=None,
                  y1_finite: bool = True, y2_finite: bool = True,
                  allow_unstable: bool = False) -> BlockSystem:
    """Build ``[[A1, B1 C2], [B2 C1, A2]]``.

    Shapes: ``B1`` is N1 x p1, ``C2`` is p1 x N2 (so ``Y1`` has dimension p1),
    ``B2`` is N2 x p2 and ``C1`` is p2 x N1.
    """
    m1, g1 = _block(a1)
    m2, g2 = _block(a2)
    return BlockSystem(
        FULL, m1, m2,
        coupling_12=_factors(b1, c2, y1_finite),
        coupling_21=_factors(b2, c1, y2_finite),
        exponents=exponents or Exponents(), gen1=g1, gen2=g2, allow_unstable=allow_unstable,
    )


def similarity_swap(sys: BlockSystem) -> BlockSystem:
    """Conjugate by ``[[0, I], [I, 0]]``: exchange the two subsystems.

    An upper triangular system becomes lower triangular and vice versa; full
    systems stay full. Applying the swap twice returns an identical system.
    """
    kind = {TRIANGULAR: LOWER_TRIANGULAR, LOWER_TRIANGULAR: TRIANGULAR, FULL: FULL}[sys.kind]
    return BlockSystem(
        kind, sys.a2, sys.a1,
        coupling_12=sys.coupling_21, coupling_21=sys.coupling_12,
        exponents=sys.exponents.swapped(), gen1=sys.gen2, gen2=sys.gen1,
        allow_unstable=sys.allow_unstable,
    )


def as_upper(sys: BlockSystem) -> BlockSystem:
    """Return an upper triangular or full representative of ``sys``."""
    return similarity_swap(sys) if sys.kind == LOWER_TRIANGULAR else sys
