"""Hypothesis checks for polynomial stability of block generators.

Exponent conditions are evaluated in exact rational arithmetic so that
boundary cases (margin exactly zero) are decided without rounding. The
norm condition for full systems is necessarily floating point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Sequence, Union

import numpy as np

from ._exponents import EXPONENTIAL, as_exponent, as_fraction, is_exponential, to_exact_string
from ._parallel import pmap
from .blocks import FULL, LOWER_TRIANGULAR, TRIANGULAR, BlockSystem, Exponents, similarity_swap
from .errors import ValidationError
from .resolvent import resolvent_direct
from .spectral import adjoint_graph_norm, graph_norm

AXIS_TOL = 1e-9


class Theorem(str, enum.Enum):
    """Which sufficient condition established the verdict.

    The string values are the stable identifiers used in JSON reports.
    """

    TRIANGULAR_POLYNOMIAL = "Thm3.1"
    TRIANGULAR_ONE_EXPONENTIAL = "Thm3.3"
    FULL_ALL_SMOOTH = "Thm3.4(i)"
    FULL_FINITE_Y1 = "Thm3.4(ii)"
    FULL_FINITE_Y2 = "Thm3.4(iii)"
    FULL_FINITE_BOTH = "Thm3.4(iv)"
    FULL_FIRST_EXPONENTIAL = "Thm3.5"
    FULL_SECOND_EXPONENTIAL = "Cor3.6"

    def __str__(self):
        return self.value


Number = Union[Fraction, float]


@dataclass(frozen=True)
class DeltaCertificate:
    """Sampled evidence for the smallness condition of a full system.

    ``loop_norm_max`` is the largest ``||C1 R1 B1 C2 R2 B2||`` seen on the
    grid and ``d_min_singular`` the smallest singular value of ``D_lambda``.
    This is a finite-grid proxy for a supremum over the closed right
    half-plane, so ``method`` is always ``"sampled"``.
    """

    loop_norm_max: float
    argmax: complex
    d_min_singular: float
    argmin: complex
    n_points: int
    method: str = "sampled"

    def delta_for(self, norm_product: float) -> float:
        """The delta implied by the sample: ``product < delta`` iff ``loop_norm_max < 1``.

        The loop norm is bilinear in the coupling factors, as is the product of
        graph norms, so the ratio is the largest product the sampled loop
        could tolerate before reaching one.
        """
        if self.loop_norm_max == 0:
            return float("inf")
        return float(norm_product / self.loop_norm_max)

    def to_json_dict(self) -> dict:
        return {"loop_norm_max": self.loop_norm_max,
                "argmax": [self.argmax.real, self.argmax.imag],
                "d_min_singular": self.d_min_singular,
                "argmin": [self.argmin.real, self.argmin.imag],
                "n_points": self.n_points, "method": self.method}


@dataclass(frozen=True)
class StabilityVerdict:
    applicable: Optional[Theorem]
    predicted_alpha: Optional[Union[Fraction, str]] = None
    condition_margins: Dict[str, Number] = field(default_factory=dict)
    graph_norm_product: Optional[float] = None
    delta_estimate: Optional[float] = None
    delta_method: Optional[str] = None
    conditional: bool = False
    notes: str = ""

    def __post_init__(self):
        if (self.applicable is None) != (self.predicted_alpha is None):
            raise ValidationError("predicted_alpha must be present exactly when a theorem applies")
        if self.applicable is not None:
            bad = {k: v for k, v in self.condition_margins.items() if v < 0}
            if bad:
                raise ValidationError(f"applicable verdict with negative margins {bad}")
        if self.graph_norm_product is not None and self.graph_norm_product < 0:
            raise ValidationError("graph_norm_product must be nonnegative")

    @property
    def stable(self) -> bool:
        return self.applicable is not None

    def to_json_dict(self) -> dict:
        alpha = self.predicted_alpha
        if alpha is not None and not is_exponential(alpha):
            alpha_num = float(alpha)
        else:
            alpha_num = alpha
        return {
            "theorem": None if self.applicable is None else self.applicable.value,
            "alpha": alpha_num,
            "alpha_exact": None if alpha is None else to_exact_string(alpha),
            "margins": {k: float(v) for k, v in self.condition_margins.items()},
            "margins_exact": {k: to_exact_string(v) for k, v in self.condition_margins.items()
                              if isinstance(v, Fraction)},
            "norm_product": self.graph_norm_product,
            "delta": None if self.delta_estimate is None else
            {"value": self.delta_estimate, "method": self.delta_method},
            "conditional": self.conditional,
            "notes": self.notes,
        }


def _alpha(value, name):
    if value is None:
        raise ValidationError(f"{name} is required")
    a = as_exponent(value, name)
    if not is_exponential(a):
        if a < 0:
            raise ValidationError(f"exponent {name} must be nonnegative")
        if a == 0:
            raise ValidationError(f"{name} must be positive; tag exponential stability as {EXPONENTIAL!r}")
    return a


def _nonneg(value, name, default=None):
    if value is None:
        if default is None:
            raise ValidationError(f"{name} is required")
        return default
    v = as_fraction(value, name)
    if v < 0:
        raise ValidationError(f"exponent {name} must be nonnegative")
    return v


def check_triangular(alpha1, alpha2, beta=None, gamma=None, y_finite: bool = False) -> StabilityVerdict:
    """Exponent conditions for ``[[A1, B C], [0, A2]]``.

    * One block exponential: stable with the other block's exponent, no
      condition on ``beta, gamma``. If both are exponential the result is
      exponential stability, reported as alpha 0.
    * Otherwise ``beta/alpha1 + gamma/alpha2 > 1`` (or ``>= 1`` when the
      coupling space is finite dimensional) gives ``alpha = max(alpha1, alpha2)``.
    """
    a1, a2 = _alpha(alpha1, "alpha1"), _alpha(alpha2, "alpha2")
    e1, e2 = is_exponential(a1), is_exponential(a2)
    if e1 or e2:
        # beta and gamma are validated if given, never used
        if beta is not None:
            _nonneg(beta, "beta")
        if gamma is not None:
            _nonneg(gamma, "gamma")
        if e1 and e2:
            return StabilityVerdict(Theorem.TRIANGULAR_ONE_EXPONENTIAL, Fraction(0),
                                    notes="both blocks exponentially stable: exponential stability (alpha 0)")
        alpha = a2 if e1 else a1
        which = "A1" if e1 else "A2"
        return StabilityVerdict(Theorem.TRIANGULAR_ONE_EXPONENTIAL, alpha,
                                notes=f"{which} exponentially stable; no smoothness needed on the coupling")
    b, g = _nonneg(beta, "beta"), _nonneg(gamma, "gamma")
    margin = b / a1 + g / a2 - 1
    name = "beta/alpha1+gamma/alpha2-1"
    if margin > 0 or (margin == 0 and y_finite):
        note = "finite coupling space allows equality" if margin == 0 else ""
        return StabilityVerdict(Theorem.TRIANGULAR_POLYNOMIAL, max(a1, a2), {name: margin}, notes=note)
    reason = ("margin is zero but the coupling space is infinite dimensional, strict inequality needed"
              if margin == 0 else "beta/alpha1 + gamma/alpha2 < 1")
    return StabilityVerdict(None, None, {name: margin}, notes=f"no verdict: {reason}")


def _full_branches(ex: Exponents, y1_finite: bool, y2_finite: bool):
    """Return ``(theorem, alpha, margins, note)`` for the first satisfied
    branch, or ``(None, None, margins, note)`` with every margin that was tried."""
    a1, a2 = _alpha(ex.alpha1, "alpha1"), _alpha(ex.alpha2, "alpha2")
    e1, e2 = is_exponential(a1), is_exponential(a2)
    if e1 and e2:
        return None, None, {}, "both blocks exponentially stable: outside the polynomial theorems"
    if e1:
        b2, g2 = _nonneg(ex.beta2, "beta2"), _nonneg(ex.gamma2, "gamma2")
        margins = {"beta2-alpha2": b2 - a2, "gamma2-alpha2": g2 - a2,
                   "beta2+gamma2-alpha2": b2 + g2 - a2}
        if b2 >= a2 and g2 >= a2:
            return Theorem.FULL_FIRST_EXPONENTIAL, a2, \
                {"beta2-alpha2": b2 - a2, "gamma2-alpha2": g2 - a2}, ""
        if y2_finite and b2 + g2 >= a2:
            return Theorem.FULL_FIRST_EXPONENTIAL, a2, {"beta2+gamma2-alpha2": b2 + g2 - a2}, \
                "finite coupling space Y2: beta2 + gamma2 >= alpha2 suffices"
        why = "beta2 + gamma2 < alpha2" if b2 + g2 < a2 else \
            "beta2 or gamma2 below alpha2 and Y2 not finite dimensional"
        return None, None, margins, f"no verdict: {why}"
    if e2:
        b1, g1 = _nonneg(ex.beta1, "beta1"), _nonneg(ex.gamma1, "gamma1")
        margins = {"beta1-alpha1": b1 - a1, "gamma1-alpha1": g1 - a1,
                   "beta1+gamma1-alpha1": b1 + g1 - a1}
        if b1 >= a1 and g1 >= a1:
            return Theorem.FULL_SECOND_EXPONENTIAL, a1, \
                {"beta1-alpha1": b1 - a1, "gamma1-alpha1": g1 - a1}, ""
        if y1_finite and b1 + g1 >= a1:
            return Theorem.FULL_SECOND_EXPONENTIAL, a1, {"beta1+gamma1-alpha1": b1 + g1 - a1}, \
                "finite coupling space Y1: beta1 + gamma1 >= alpha1 suffices"
        why = "beta1 + gamma1 < alpha1" if b1 + g1 < a1 else \
            "beta1 or gamma1 below alpha1 and Y1 not finite dimensional"
        return None, None, margins, f"no verdict: {why}"

    b1, g1 = _nonneg(ex.beta1, "beta1"), _nonneg(ex.gamma1, "gamma1")
    b2, g2 = _nonneg(ex.beta2, "beta2"), _nonneg(ex.gamma2, "gamma2")
    alpha = max(a1, a2)
    each1 = {"beta1-alpha1": b1 - a1, "gamma1-alpha1": g1 - a1}
    each2 = {"beta2-alpha2": b2 - a2, "gamma2-alpha2": g2 - a2}
    sum1 = {"beta1+gamma1-alpha1": b1 + g1 - a1}
    sum2 = {"beta2+gamma2-alpha2": b2 + g2 - a2}
    mixed = {"beta1/alpha1+gamma2/alpha2-1": b1 / a1 + g2 / a2 - 1,
             "beta2/alpha2+gamma1/alpha1-1": b2 / a2 + g1 / a1 - 1}
    # (theorem, needs finite Y1, needs finite Y2, margins)
    branches = [
        (Theorem.FULL_ALL_SMOOTH, False, False, {**each1, **each2}),
        (Theorem.FULL_FINITE_Y1, True, False, {**sum1, **each2}),
        (Theorem.FULL_FINITE_Y2, False, True, {**each1, **sum2}),
        (Theorem.FULL_FINITE_BOTH, True, True, {**mixed, **sum1, **sum2}),
    ]
    for theorem, need1, need2, margins in branches:
        if (need1 and not y1_finite) or (need2 and not y2_finite):
            continue
        if all(v >= 0 for v in margins.values()):
            return theorem, alpha, margins, ""
    tried = {**each1, **each2, **sum1, **sum2, **mixed}
    return None, None, tried, "no verdict: none of the four exponent branches holds"


def check_full(exponents: Exponents, y1_finite: bool = False, y2_finite: bool = False,
               graph_norms: Optional[Sequence[float]] = None,
               delta_estimate: Optional[Union[float, DeltaCertificate]] = None) -> StabilityVerdict:
    """Exponent and smallness conditions for ``[[A1, B1 C2], [B2 C1, A2]]``.

    ``graph_norms`` is ``(||(-A1)^b1 B1||, ||(-A1*)^g1 C1*||, ||(-A2)^b2 B2||,
    ||(-A2*)^g2 C2*||)``; their product must be below ``delta``. ``delta_estimate``
    may be a number or a :class:`DeltaCertificate`. Without one, an exponent
    branch that holds gives a verdict flagged ``conditional``.
    """
    if not isinstance(exponents, Exponents):
        exponents = Exponents(**dict(exponents))
    theorem, alpha, margins, note = _full_branches(exponents, y1_finite, y2_finite)
    product = None
    if graph_norms is not None:
        norms = [float(x) for x in graph_norms]
        if len(norms) != 4 or any(not np.isfinite(x) or x < 0 for x in norms):
            raise ValidationError("graph_norms must be four finite nonnegative numbers")
        product = float(np.prod(norms))
    if theorem is None:
        return StabilityVerdict(None, None, margins, product, notes=note)

    delta, method = None, None
    if isinstance(delta_estimate, DeltaCertificate):
        if product is None:
            raise ValidationError("a delta certificate needs graph norms to compare against")
        delta, method = delta_estimate.delta_for(product), delta_estimate.method
    elif delta_estimate is not None:
        delta, method = float(delta_estimate), "supplied"
        if delta < 0:
            raise ValidationError("delta must be nonnegative")
    if delta is None or product is None:
        text = "conditional on the smallness of the graph-norm product (no delta supplied)"
        return StabilityVerdict(theorem, alpha, margins, product, conditional=True,
                                notes="; ".join(x for x in (note, text) if x))
    if product < delta:
        margins = dict(margins)
        margins["delta-norm_product"] = delta - product if np.isfinite(delta) else float("inf")
        text = "delta from a sampled grid (heuristic)" if method == "sampled" else ""
        return StabilityVerdict(theorem, alpha, margins, product, delta, method,
                                notes="; ".join(x for x in (note, text) if x))
    margins = dict(margins)
    margins["delta-norm_product"] = delta - product
    return StabilityVerdict(None, None, margins, product, delta, method,
                            notes=f"no verdict: exponent branch {theorem.value} holds but "
                                  f"norm product {product:.6g} is not below delta {delta:.6g}")


def _power_or_zero(alpha, value) -> float:
    return 0.0 if is_exponential(alpha) or value is None else float(value)


def full_graph_norms(sys: BlockSystem):
    """The four graph norms of a full system at its declared exponents.

    Blocks tagged exponential use power 0 (plain operator norms).
    """
    if sys.kind != FULL:
        raise ValidationError("full_graph_norms needs a full system")
    ex = sys.exponents
    g1 = sys.gen1 if sys.gen1 is not None else sys.a1
    g2 = sys.gen2 if sys.gen2 is not None else sys.a2
    b1, c2 = sys.coupling_12.left, sys.coupling_12.right
    b2, c1 = sys.coupling_21.left, sys.coupling_21.right
    return (
        graph_norm(g1, _power_or_zero(ex.alpha1, ex.beta1), b1),
        adjoint_graph_norm(g1, _power_or_zero(ex.alpha1, ex.gamma1), c1),
        graph_norm(g2, _power_or_zero(ex.alpha2, ex.beta2), b2),
        adjoint_graph_norm(g2, _power_or_zero(ex.alpha2, ex.gamma2), c2),
    )


def rhp_grid(omegas, xis=(0.0,)) -> np.ndarray:
    """Points ``xi + i omega`` for every pair, imaginary axis first."""
    omegas = np.asarray(omegas, dtype=float).ravel()
    return np.concatenate([x + 1j * omegas for x in xis])


def dlambda_margin(sys: BlockSystem, lambdas) -> DeltaCertificate:
    """Sample the loop operator of a full system over a grid of points.

    Raises :class:`SpectralPointError` when a grid point hits the spectrum of
    a diagonal block.
    """
    if sys.kind != FULL:
        raise ValidationError("dlambda_margin needs a full system")
    lambdas = np.asarray(lambdas, dtype=complex).ravel()
    if lambdas.size == 0:
        raise ValidationError("empty lambda grid")
    b1, c2 = np.asarray(sys.coupling_12.left), np.asarray(sys.coupling_12.right)
    b2, c1 = np.asarray(sys.coupling_21.left), np.asarray(sys.coupling_21.right)
    p1, p2 = b1.shape[1], b2.shape[1]

    def sample(lam):
        r1 = resolvent_direct(sys.a1, lam)
        r2 = resolvent_direct(sys.a2, lam)
        if p1 == 0 or p2 == 0:
            return 0.0, 1.0
        k1 = c1 @ r1 @ b1
        k2 = c2 @ r2 @ b2
        loop = float(np.linalg.norm(k1 @ k2, 2))
        d = np.eye(p1) - k2 @ k1
        return loop, float(np.linalg.svd(d, compute_uv=False)[-1])

    results = np.asarray(pmap(sample, lambdas))
    i, j = int(np.argmax(results[:, 0])), int(np.argmin(results[:, 1]))
    return DeltaCertificate(float(results[i, 0]), complex(lambdas[i]),
                            float(results[j, 1]), complex(lambdas[j]), int(lambdas.size))


@dataclass(frozen=True, eq=False)
class SpectralReport:
    eigenvalues: np.ndarray
    abscissa: float
    axis_distance: float
    imaginary_axis_eigenvalue: bool

    @property
    def stable(self) -> bool:
        return self.abscissa < 0 and not self.imaginary_axis_eigenvalue

    def to_json_dict(self) -> dict:
        order = np.lexsort((self.eigenvalues.imag, self.eigenvalues.real))
        return {
            "abscissa": self.abscissa,
            "axis_distance": self.axis_distance,
            "imaginary_axis_eigenvalue": self.imaginary_axis_eigenvalue,
            "n_eigenvalues": int(self.eigenvalues.size),
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues[order]],
        }


def spectral_check(m) -> SpectralReport:
    """Eigenvalues, spectral abscissa and distance of the spectrum to the imaginary axis."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError("spectral_check needs a square matrix")
    lam = np.linalg.eigvals(m)
    dist = float(np.min(np.abs(lam.real)))
    return SpectralReport(lam, float(np.max(lam.real)), dist, dist < AXIS_TOL)


def verdict_for(sys: BlockSystem, delta=None) -> StabilityVerdict:
    """Dispatch to the right check using the system's declared exponents."""
    if sys.kind == LOWER_TRIANGULAR:
        sys = similarity_swap(sys)
    ex = sys.exponents
    if sys.kind == TRIANGULAR:
        return check_triangular(ex.alpha1, ex.alpha2, ex.beta, ex.gamma,
                                y_finite=sys.coupling_12.coupling_dim_finite)
    return check_full(ex, y1_finite=sys.coupling_12.coupling_dim_finite,
                      y2_finite=sys.coupling_21.coupling_dim_finite,
                      graph_norms=full_graph_norms(sys), delta_estimate=delta)
