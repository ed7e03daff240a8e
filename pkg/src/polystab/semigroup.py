"""Semigroups on truncations: matrix exponentials, decay curves, convolution block."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm

from ._parallel import pmap
from .blocks import TRIANGULAR, BlockSystem
from .errors import InsufficientSamplesError, QuadratureError, ValidationError
from .resolvent import MIN_SAMPLES, TIME, SweepSamples, _check_grid, _is_diagonal, _linear_fit
from .spectral import DiagonalGenerator, as_matrix

PURE_POWER = "pure_power"
LOG_CORRECTED = "log_corrected"
DECAY_MODELS = (PURE_POWER, LOG_CORRECTED)


def matexp(m, t: float) -> np.ndarray:
    """``exp(m t)``. Diagonal input is exponentiated entrywise, anything else
    goes through scipy's scaling-and-squaring Pade routine."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValidationError("matexp needs a square matrix")
    if t < 0:
        raise ValidationError("t must be nonnegative")
    with np.errstate(over="ignore", invalid="ignore"):
        if _is_diagonal(m):
            out = np.diag(np.exp(np.diag(m) * t))
        else:
            out = expm(m * t)
    if not np.all(np.isfinite(out)):
        raise OverflowError(f"matrix exponential overflows at t = {t}")
    return out


def truncation_horizon(gen: DiagonalGenerator) -> float:
    """Last time at which the slowest truncated mode still dominates.

    Beyond ``1 / min_k |Re lambda_k|`` every truncated mode has decayed
    exponentially and the curve no longer reflects the infinite family.
    """
    return float(1.0 / np.min(np.abs(gen.eigenvalues.real)))


def decay_curve(m, ts, beta: float = 1.0, generator: Optional[DiagonalGenerator] = None,
                window=None) -> SweepSamples:
    """Sample ``||exp(m t) (-m)^{-beta}||`` on a time grid.

    With ``generator`` the closed form ``max_k exp(Re(lambda_k) t) |lambda_k|^{-beta}``
    is used (``m`` may then be ``None``) and the default window is clipped
    at :func:`truncation_horizon`. For a dense ``m`` only ``beta`` in {0, 1}
    is supported, with ``(-m)^{-1}`` taken as the matrix's own inverse.
    """
    ts = _check_grid(ts)
    beta = float(beta)
    if beta < 0:
        raise ValidationError("beta must be nonnegative")
    if generator is not None:
        lam = generator.eigenvalues
        if m is not None and not np.array_equal(as_matrix(m), generator.matrix()):
            raise ValidationError("m does not match the supplied generator")
        weights = np.abs(lam) ** (-beta)
        values = [float(np.max(np.exp(lam.real * t) * weights)) for t in ts]
        if window is None:
            hi = min(ts[-1], truncation_horizon(generator))
            window = (ts[0], hi) if hi > ts[0] else None
    else:
        m = as_matrix(m)
        if beta == 0:
            p = np.eye(m.shape[0])
        elif beta == 1:
            p = -np.linalg.inv(m)
        else:
            raise ValidationError("dense decay curves support beta in {0, 1}; pass a generator")

        def sample(t):
            return float(np.linalg.norm(matexp(m, t) @ p, 2))
        values = pmap(sample, ts)
    return SweepSamples(TIME, ts, values, window)


@dataclass(frozen=True)
class DecayFit:
    """Fitted decay exponent together with both models' residuals."""

    model: str
    alpha: float
    slope: float
    intercept: float
    residual_rms: float
    residuals: dict

    def to_json_dict(self, window=None) -> dict:
        out = {"model": self.model, "alpha": self.alpha, "slope": self.slope,
               "intercept": self.intercept, "residual": self.residual_rms,
               "residuals": dict(self.residuals)}
        if window is not None:
            out["window"] = [float(window[0]), float(window[1])]
        return out


def _decay_regressors(t: np.ndarray, model: str) -> np.ndarray:
    if model == PURE_POWER:
        return np.log(t)
    return np.log(np.log(t) / t)


def fit_decay_model(samples: SweepSamples, model: str = PURE_POWER, beta: float = 1.0) -> DecayFit:
    """Fit ``value ~ t^{-beta/alpha}`` or ``value ~ ((ln t)/t)^{beta/alpha}``.

    Both models are fitted over the window; the returned record holds the
    requested one and the RMS residuals of both, so the caller can compare
    them. The log-corrected model only uses samples with ``t > 1``, where
    ``ln t`` is positive.
    """
    if model not in DECAY_MODELS:
        raise ValidationError(f"model must be one of {DECAY_MODELS}")
    mask = samples.in_window() & (samples.values > 0)
    t, v = samples.params[mask], samples.values[mask]
    fits = {}
    for name in DECAY_MODELS:
        keep = t > 1.0 if name == LOG_CORRECTED else np.ones_like(t, dtype=bool)
        if np.count_nonzero(keep) < MIN_SAMPLES:
            if name == model:
                raise InsufficientSamplesError(
                    f"insufficient samples: {np.count_nonzero(keep)} usable samples in window "
                    f"{samples.window}, need {MIN_SAMPLES}"
                )
            continue
        fits[name] = _linear_fit(_decay_regressors(t[keep], name), np.log(v[keep]))
    fit = fits[model]
    # pure power: slope = -beta/alpha; log corrected: slope = +beta/alpha
    s = -fit.slope if model == PURE_POWER else fit.slope
    alpha = float(beta / s) if s > 0 else float("inf")
    return DecayFit(model, alpha, fit.slope, fit.intercept, fit.residual_rms,
                    {name: f.residual_rms for name, f in fits.items()})


def _semigroup_at(m: np.ndarray, times: np.ndarray) -> np.ndarray:
    if _is_diagonal(m):
        d = np.diag(m)
        return np.exp(times[:, None] * d[None, :])[:, :, None] * np.eye(d.size)[None]
    return np.stack([expm(m * s) for s in times])


def convolution_block(sys: BlockSystem, t: float, quad_points: int = 16, rtol: float = 1e-6,
                      max_points: int = 4096) -> np.ndarray:
    """``S(t) = int_0^t T1(t - s) B C T2(s) ds`` by Gauss-Legendre quadrature.

    The node count doubles from ``quad_points`` until two successive
    estimates agree to ``rtol`` in the spectral norm. This is the top-right
    block of ``exp(A t)`` for the triangular block generator.
    """
    if sys.kind != TRIANGULAR:
        raise ValidationError("convolution_block needs an upper triangular system")
    if quad_points < 8:
        raise ValidationError("quad_points must be at least 8")
    if t <= 0:
        raise ValidationError("t must be positive")
    b = np.asarray(sys.coupling_12.left)
    c = np.asarray(sys.coupling_12.right)
    if b.shape[1] == 0:
        return np.zeros((sys.n1, sys.n2), dtype=complex)

    def estimate(n):
        x, w = np.polynomial.legendre.leggauss(n)
        s = 0.5 * t * (x + 1.0)
        w = 0.5 * t * w
        left = _semigroup_at(sys.a1, t - s) @ b          # n x N1 x p
        right = c @ _semigroup_at(sys.a2, s)             # n x p x N2
        return np.einsum("k,kij,kjl->il", w, left, right)

    n = int(quad_points)
    prev = estimate(n)
    while 2 * n <= max_points:
        n *= 2
        cur = estimate(n)
        scale = max(np.linalg.norm(cur, 2), np.finfo(float).tiny)
        if np.linalg.norm(cur - prev, 2) <= rtol * scale:
            return cur
        prev = cur
    raise QuadratureError(f"quadrature not converged at {n} Gauss-Legendre nodes (t = {t})")
