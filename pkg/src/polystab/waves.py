"""Coupled wave system: a strip-damped 2D wave driven by a pole-placed 1D wave.

The 2D wave on the square ``(0, pi)^2`` with Dirichlet conditions is
truncated in the sine basis ``phi_mn = (2/pi) sin(m z1) sin(n z2)``. A state
is stored in energy coordinates

    v   = sum a_mn phi_mn / sqrt(kappa_mn),
    v_t = sum b_mn phi_mn,            kappa_mn = m^2 + n^2,

so that the Euclidean norm of ``(a, b)`` equals ``||grad v||^2 + ||v_t||^2``.
The closed-loop 1D wave is modelled directly by its eigenvalues
``-1/|k|^p + i k pi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from ._exponents import as_fraction
from .blocks import BlockSystem, CouplingFactors, Exponents, TRIANGULAR
from .errors import ValidationError
from .spectral import DiagonalGenerator, OperatorMatrix


def _snap(value, name) -> Fraction:
    # placement exponents are written to JSON as rounded decimals such as 1.6667
    if isinstance(value, float):
        return Fraction(value).limit_denominator(100)
    return as_fraction(value, name)


@dataclass(frozen=True)
class WaveSpec:
    """Discretisation parameters of the coupled wave system."""

    n_modes_2d: int = 8
    n_modes_1d: int = 64
    placement_exponent: Fraction = Fraction(5, 3)
    coupling_decay: float = 2.0
    damping_strip: Tuple[float, float] = (0.0, 1.0)
    damping_coefficient: float = 1.0

    def __post_init__(self):
        for name in ("n_modes_2d", "n_modes_1d"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise ValidationError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        p = _snap(self.placement_exponent, "placement_exponent")
        if p <= 0:
            raise ValidationError("placement_exponent must be positive")
        object.__setattr__(self, "placement_exponent", p)
        if not float(self.coupling_decay) > 0:
            raise ValidationError("coupling_decay must be positive")
        object.__setattr__(self, "coupling_decay", float(self.coupling_decay))
        lo, hi = (float(x) for x in self.damping_strip)
        if not 0.0 <= lo < hi <= np.pi:
            raise ValidationError(f"damping strip ({lo}, {hi}) must satisfy 0 <= lo < hi <= pi")
        object.__setattr__(self, "damping_strip", (lo, hi))
        if not float(self.damping_coefficient) >= 0:
            raise ValidationError("damping_coefficient must be nonnegative")
        object.__setattr__(self, "damping_coefficient", float(self.damping_coefficient))

    @property
    def coupling_dim(self) -> int:
        return min(self.n_modes_2d, self.n_modes_1d)

    def to_json_dict(self) -> dict:
        out = {"n2d": self.n_modes_2d, "n1d": self.n_modes_1d,
               "placement_exponent": float(self.placement_exponent),
               "coupling_decay": self.coupling_decay, "strip": list(self.damping_strip)}
        if self.damping_coefficient != 1.0:
            out["damping"] = self.damping_coefficient
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "WaveSpec":
        known = {"n2d", "n1d", "placement_exponent", "coupling_decay", "strip", "damping"}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown WaveSpec keys: {sorted(unknown)}")
        d = cls()
        return cls(
            n_modes_2d=data.get("n2d", d.n_modes_2d),
            n_modes_1d=data.get("n1d", d.n_modes_1d),
            placement_exponent=data.get("placement_exponent", d.placement_exponent),
            coupling_decay=data.get("coupling_decay", d.coupling_decay),
            damping_strip=tuple(data.get("strip", d.damping_strip)),
            damping_coefficient=data.get("damping", d.damping_coefficient),
        )


def damping_overlap(m: int, m_prime: int, strip=(0.0, 1.0)) -> float:
    """``int_lo^hi sin(m z) sin(m' z) dz`` in closed form."""
    if m < 1 or m_prime < 1:
        raise ValidationError("mode numbers must be at least 1")
    lo, hi = strip

    def antiderivative(z):
        if m == m_prime:
            return z / 2 - np.sin(2 * m * z) / (4 * m)
        d, s = m - m_prime, m + m_prime
        return np.sin(d * z) / (2 * d) - np.sin(s * z) / (2 * s)

    return float(antiderivative(hi) - antiderivative(lo))


def mode_index(m: int, n: int, n_modes: int) -> int:
    """Position of mode ``(m, n)`` (1-based) inside one coordinate half."""
    return (m - 1) * n_modes + (n - 1)


def _kappa(n_modes: int) -> np.ndarray:
    k = np.arange(1, n_modes + 1)
    return (k[:, None] ** 2 + k[None, :] ** 2).ravel().astype(float)


def damping_matrix(spec: WaveSpec) -> np.ndarray:
    """``D[(m,n),(m',n')] = delta_nn' (2/pi) c overlap(m, m')`` in the velocity basis."""
    n = spec.n_modes_2d
    overlap = np.array([[damping_overlap(i, j, spec.damping_strip) for j in range(1, n + 1)]
                        for i in range(1, n + 1)])
    return spec.damping_coefficient * (2 / np.pi) * np.kron(overlap, np.eye(n))


def assemble_wave2d(spec: WaveSpec) -> np.ndarray:
    """Generator of the damped 2D wave in energy coordinates, ``2N^2 x 2N^2``.

    ``a' = sqrt(kappa) b`` and ``b' = -sqrt(kappa) a - D b``.
    """
    root = np.diag(np.sqrt(_kappa(spec.n_modes_2d)))
    d = damping_matrix(spec)
    return np.block([[np.zeros_like(root), root], [-root, -d]])


def assemble_wave1d_placed(spec: WaveSpec) -> DiagonalGenerator:
    """Eigenvalues ``-1/|k|^p + i k pi`` for ``k = 1..N`` then ``k = -1..-N``."""
    k = np.concatenate([np.arange(1, spec.n_modes_1d + 1), -np.arange(1, spec.n_modes_1d + 1)])
    p = float(spec.placement_exponent)
    mu = -np.abs(k).astype(float) ** (-p) + 1j * np.pi * k
    return DiagonalGenerator(mu, tuple(int(x) for x in k), p)


def assemble_wave_coupling(spec: WaveSpec) -> CouplingFactors:
    """Factors of the coupling that feeds the 1D wave into the 2D velocity.

    Column ``k`` of ``B`` puts ``(pi/2) k^{-decay}`` on the velocity of mode
    ``(k, k)`` (the factor ``pi/2`` converts ``sin(k z1) sin(k z2)`` into
    ``phi_kk``). Row ``k`` of ``C`` reads modes ``+k`` and ``-k`` of the 1D
    state with weight ``1/(k pi)``. The coupling space is a truncation of an
    infinite sequence space, hence ``coupling_dim_finite=False``.
    """
    n2, n1, p = spec.n_modes_2d, spec.n_modes_1d, spec.coupling_dim
    b = np.zeros((2 * n2 * n2, p))
    c = np.zeros((p, 2 * n1))
    for k in range(1, p + 1):
        b[n2 * n2 + mode_index(k, k, n2), k - 1] = (np.pi / 2) * k ** (-spec.coupling_decay)
        c[k - 1, k - 1] = 1 / (k * np.pi)
        c[k - 1, n1 + k - 1] = 1 / (k * np.pi)
    return CouplingFactors(OperatorMatrix(b, "wave2d-energy"), OperatorMatrix(c, "wave1d-modes"),
                           coupling_dim_finite=False)


WAVE_ALPHA_2D = Fraction(2)


def build_coupled_wave(spec: WaveSpec = WaveSpec()) -> BlockSystem:
    """Triangular system ``[[A1, B C], [0, A2]]`` with declared exponents
    ``alpha1 = 2`` (strip damping), ``alpha2 = p``, ``beta = gamma = 1``."""
    gen2 = assemble_wave1d_placed(spec)
    exponents = Exponents(alpha1=WAVE_ALPHA_2D, alpha2=spec.placement_exponent, beta=1, gamma=1)
    return BlockSystem(TRIANGULAR, assemble_wave2d(spec), gen2.matrix(),
                       coupling_12=assemble_wave_coupling(spec), exponents=exponents, gen2=gen2)


def wave2d_fields(spec: WaveSpec, state, z1, z2):
    """Evaluate ``(dv/dz1, dv/dz2, v_t)`` of a 2D state on a tensor grid."""
    n = spec.n_modes_2d
    state = np.asarray(state)
    a = state[: n * n].reshape(n, n) / np.sqrt(_kappa(n)).reshape(n, n)
    b = state[n * n:].reshape(n, n)
    k = np.arange(1, n + 1)
    s1, c1 = np.sin(np.outer(z1, k)), np.cos(np.outer(z1, k)) * k
    s2, c2 = np.sin(np.outer(z2, k)), np.cos(np.outer(z2, k)) * k
    scale = 2 / np.pi
    dv1 = scale * c1 @ a @ s2.T
    dv2 = scale * s1 @ a @ c2.T
    vt = scale * s1 @ b @ s2.T
    return dv1, dv2, vt
