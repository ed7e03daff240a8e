"""Resolvents of block systems, resolvent-norm sweeps and growth-exponent fits.

Structured formulas are checked against :func:`resolvent_direct`, a plain
dense inversion, which acts as the oracle throughout the test-suite.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from ._parallel import pmap
from .blocks import FULL, LOWER_TRIANGULAR, TRIANGULAR, BlockSystem
from .errors import (
    InsufficientSamplesError,
    LoopOperatorError,
    NonConvergentTailError,
    SpectralPointError,
    ValidationError,
)
from .spectral import as_matrix

SPECTRAL_RTOL = 1e-12
LOOP_RCOND = 1e-10

FREQUENCY = "frequency"
TIME = "time"


@dataclass(frozen=True)
class PowerFit:
    """Least-squares line through ``(log param, log value)``."""

    slope: float
    intercept: float
    residual_rms: float
    n_points: int

    def to_json_dict(self, window=None) -> dict:
        out = {"slope": self.slope, "intercept": self.intercept,
               "residual": self.residual_rms, "n_points": self.n_points}
        if window is not None:
            out["window"] = [float(window[0]), float(window[1])]
        return out


@dataclass(frozen=True, eq=False)
class SweepSamples:
    """Samples ``(param, value)`` from a frequency or time sweep.

    Values at spectral points are stored as ``inf`` and flagged non-finite;
    they are never used in fits.
    """

    axis: str
    params: np.ndarray
    values: np.ndarray
    window: Tuple[float, float] = None
    fit: Optional[object] = None

    def __post_init__(self):
        if self.axis not in (FREQUENCY, TIME):
            raise ValidationError(f"axis must be {FREQUENCY!r} or {TIME!r}")
        p = np.asarray(self.params, dtype=float).ravel()
        v = np.asarray(self.values, dtype=float).ravel()
        if p.size != v.size:
            raise ValidationError("params and values differ in length")
        if p.size == 0:
            raise ValidationError("a sweep needs at least one sample")
        if np.any(p <= 0):
            raise ValidationError("sweep parameters must be positive")
        if np.any(np.diff(p) <= 0):
            raise ValidationError("sweep parameters must be strictly increasing")
        if np.any(v[np.isfinite(v)] < 0) or np.any(np.isnan(v)):
            raise ValidationError("sweep values must be nonnegative (inf marks spectral points)")
        window = self.window if self.window is not None else (p[0], p[-1])
        lo, hi = float(window[0]), float(window[1])
        if not (p[0] <= lo < hi <= p[-1]) and not (lo == hi == p[0] == p[-1]):
            raise ValidationError(f"window {window} must lie inside the sampled range [{p[0]}, {p[-1]}]")
        fit = self.fit
        if fit is not None and getattr(fit, "residual_rms", 0.0) < 0:
            raise ValidationError("residual_rms must be nonnegative")
        p.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "params", p)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "window", (lo, hi))

    @property
    def finite(self) -> np.ndarray:
        return np.isfinite(self.values)

    def in_window(self) -> np.ndarray:
        lo, hi = self.window
        return (self.params >= lo) & (self.params <= hi) & self.finite

    def with_fit(self, fit) -> "SweepSamples":
        return replace(self, fit=fit)

    def with_window(self, lo: float, hi: float) -> "SweepSamples":
        return replace(self, window=(lo, hi), fit=None)

    def to_csv(self, header: Optional[str] = None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([header or "param", "value", "finite"])
        for p, v in zip(self.params, self.values):
            ok = bool(np.isfinite(v))
            writer.writerow([repr(float(p)), repr(float(v)) if ok else "inf", int(ok)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, axis: Optional[str] = None) -> "SweepSamples":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ValidationError("empty CSV")
        head = [h.strip() for h in rows[0]]
        if len(head) != 3 or head[1:] != ["value", "finite"]:
            raise ValidationError(f"unexpected CSV header {rows[0]}")
        axis = axis or (TIME if head[0] == "t" else FREQUENCY)
        params = [float(r[0]) for r in rows[1:] if r]
        values = [float(r[1]) if r[2].strip() == "1" else np.inf for r in rows[1:] if r]
        return cls(axis, params, values)


def _is_diagonal(m: np.ndarray) -> bool:
    return np.count_nonzero(m - np.diag(np.diag(m))) == 0


def _smallest_singular(shifted: np.ndarray) -> float:
    if shifted.shape[0] == 0:
        return np.inf
    return float(np.linalg.svd(shifted, compute_uv=False)[-1])


def resolvent_direct(m, lam: complex) -> np.ndarray:
    """``(lam*I - m)^{-1}`` by a dense LU solve.

    Raises :class:`SpectralPointError` when the smallest singular value of
    ``lam*I - m`` is at most ``1e-12 * ||m||``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValidationError("resolvent needs a square matrix")
    n = m.shape[0]
    shifted = lam * np.eye(n) - m
    norm_m = np.linalg.norm(m, 2) if n else 0.0
    if _smallest_singular(shifted) <= SPECTRAL_RTOL * norm_m:
        raise SpectralPointError(lam)
    return np.linalg.solve(shifted, np.eye(n, dtype=complex))


def resolvent_triangular(sys: BlockSystem, lam: complex) -> np.ndarray:
    """Resolvent of a triangular system from the two diagonal resolvents.

    Upper: ``[[R1, R1 B C R2], [0, R2]]``; lower: ``[[R1, 0], [R2 B C R1, R2]]``.
    """
    if sys.kind not in (TRIANGULAR, LOWER_TRIANGULAR):
        raise ValidationError("resolvent_triangular needs a triangular system")
    r1 = resolvent_direct(sys.a1, lam)
    r2 = resolvent_direct(sys.a2, lam)
    n1 = sys.n1
    out = np.zeros((n1 + sys.n2,) * 2, dtype=complex)
    out[:n1, :n1] = r1
    out[n1:, n1:] = r2
    if sys.kind == TRIANGULAR:
        b, c = np.asarray(sys.coupling_12.left), np.asarray(sys.coupling_12.right)
        out[:n1, n1:] = (r1 @ b) @ (c @ r2)
    else:
        b, c = np.asarray(sys.coupling_21.left), np.asarray(sys.coupling_21.right)
        out[n1:, :n1] = (r2 @ b) @ (c @ r1)
    return out


def loop_operator(sys: BlockSystem, lam: complex, r1=None, r2=None) -> np.ndarray:
    """``D_lambda = I - C2 R(lam,A2) B2 C1 R(lam,A1) B1`` on the coupling space ``Y1``."""
    r1 = resolvent_direct(sys.a1, lam) if r1 is None else r1
    r2 = resolvent_direct(sys.a2, lam) if r2 is None else r2
    b1, c2 = np.asarray(sys.coupling_12.left), np.asarray(sys.coupling_12.right)
    b2, c1 = np.asarray(sys.coupling_21.left), np.asarray(sys.coupling_21.right)
    k2 = c2 @ r2 @ b2
    k1 = c1 @ r1 @ b1
    return np.eye(b1.shape[1], dtype=complex) - k2 @ k1


def _rcond(d: np.ndarray) -> float:
    if d.shape[0] == 0:
        return 1.0
    s = np.linalg.svd(d, compute_uv=False)
    return float(s[-1] / max(s[0], 1.0))


def resolvent_full_schur(sys: BlockSystem, lam: complex) -> np.ndarray:
    """Resolvent of a full system through the Schur complement of ``lam - A1``.

    With ``R1, R2`` the diagonal resolvents,

        S1^{-1} = R2 + R2 B2 C1 R1 B1 D^{-1} C2 R2,
        R = [[R1 + R1 B1 C2 S1^{-1} B2 C1 R1,  R1 B1 C2 S1^{-1}],
             [S1^{-1} B2 C1 R1,                 S1^{-1}        ]].

    Only the ``p1 x p1`` loop operator ``D`` is inverted. Raises
    :class:`LoopOperatorError` if ``D`` is numerically singular, which
    signals that ``lam`` may be an eigenvalue of the block matrix.
    """
    if sys.kind != FULL:
        raise ValidationError("resolvent_full_schur needs a full system")
    r1 = resolvent_direct(sys.a1, lam)
    r2 = resolvent_direct(sys.a2, lam)
    b1, c2 = np.asarray(sys.coupling_12.left), np.asarray(sys.coupling_12.right)
    b2, c1 = np.asarray(sys.coupling_21.left), np.asarray(sys.coupling_21.right)
    r1b1 = r1 @ b1
    c1r1 = c1 @ r1
    r2b2 = r2 @ b2
    c2r2 = c2 @ r2
    d = np.eye(b1.shape[1], dtype=complex) - (c2r2 @ b2) @ (c1 @ r1b1)
    rc = _rcond(d)
    if rc < LOOP_RCOND:
        raise LoopOperatorError(lam, rc)
    if d.shape[0]:
        s1inv = r2 + (r2b2 @ (c1 @ r1b1)) @ np.linalg.solve(d, c2r2)
    else:
        s1inv = r2
    top_right = r1b1 @ (c2 @ s1inv)
    n1 = sys.n1
    out = np.empty((n1 + sys.n2,) * 2, dtype=complex)
    out[:n1, :n1] = r1 + top_right @ (b2 @ c1r1)
    out[:n1, n1:] = top_right
    out[n1:, :n1] = (s1inv @ b2) @ c1r1
    out[n1:, n1:] = s1inv
    return out


def frequency_grid(lo: float, hi: float, n: int, spectrum=None) -> np.ndarray:
    """Log-spaced frequencies on ``[lo, hi]``, plus peak locations.

    Resolvent norms of weakly damped generators have peaks narrower than any
    practical grid spacing, located near ``Im(lambda)``. Passing the spectrum
    adds those imaginary parts, so the sampled upper envelope sees the peaks.
    """
    if not 0 < lo < hi:
        raise ValidationError("need 0 < lo < hi")
    grid = np.geomspace(lo, hi, int(n))
    if spectrum is not None:
        im = np.abs(np.imag(np.asarray(spectrum)))
        grid = np.concatenate([grid, im[(im >= lo) & (im <= hi)]])
    grid = np.unique(grid)
    keep = np.concatenate([[True], np.diff(grid) > 1e-12 * grid[1:]])
    return grid[keep]


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0 or np.any(g <= 0) or np.any(np.diff(g) <= 0):
        raise ValidationError("grid must be positive and strictly increasing")
    return g


def resolvent_norm_sweep(m, omegas, window=None) -> SweepSamples:
    """``||R(i omega, m)||`` on a frequency grid.

    Each value is ``1 / s_min(i omega I - m)``. Spectral points become ``inf``.
    """
    m = as_matrix(m)
    omegas = _check_grid(omegas)
    norm_m = np.linalg.norm(m, 2)
    threshold = SPECTRAL_RTOL * norm_m
    if _is_diagonal(m):
        d = np.diag(m)

        def sample(w):
            s = float(np.min(np.abs(1j * w - d)))
            return np.inf if s <= threshold else 1.0 / s
    else:
        eye = np.eye(m.shape[0])

        def sample(w):
            s = _smallest_singular(1j * w * eye - m)
            return np.inf if s <= threshold else 1.0 / s

    values = pmap(sample, omegas)
    return SweepSamples(FREQUENCY, omegas, values, window)


def upper_envelope(params, values, bins_per_decade: int = 10):
    """Maxima of ``values`` within logarithmic bins of ``params``."""
    params = np.asarray(params, dtype=float)
    values = np.asarray(values, dtype=float)
    edges = np.floor((np.log10(params) - np.log10(params[0])) * bins_per_decade + 1e-9)
    keep_p, keep_v = [], []
    for b in np.unique(edges):
        idx = np.flatnonzero(edges == b)
        j = idx[np.argmax(values[idx])]
        keep_p.append(params[j])
        keep_v.append(values[j])
    return np.asarray(keep_p), np.asarray(keep_v)


def _linear_fit(x, y) -> PowerFit:
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return PowerFit(float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid**2))), int(x.size))


MIN_SAMPLES = 8


def fit_growth_exponent(samples: SweepSamples, bins_per_decade: int = 10,
                        envelope: bool = True) -> PowerFit:
    """Slope of ``log(value)`` against ``log(param)`` over the sweep window.

    The fit goes through the upper envelope (maximum per logarithmic bin),
    because an ``O(|omega|^alpha)`` bound constrains the peaks of an
    oscillating norm, not its troughs.
    """
    mask = samples.in_window()
    if np.count_nonzero(mask) < MIN_SAMPLES:
        raise InsufficientSamplesError(
            f"insufficient samples: {np.count_nonzero(mask)} finite samples in window "
            f"{samples.window}, need {MIN_SAMPLES}"
        )
    p, v = samples.params[mask], samples.values[mask]
    positive = v > 0
    if np.count_nonzero(positive) < 2:
        raise InsufficientSamplesError("insufficient samples: fewer than two positive values")
    p, v = p[positive], v[positive]
    if envelope:
        p, v = upper_envelope(p, v, bins_per_decade)
    if p.size < 2:
        raise InsufficientSamplesError("insufficient samples: envelope has fewer than two points")
    return _linear_fit(np.log(p), np.log(v))


def coupling_growth_product(sys: BlockSystem, omegas, window=None) -> SweepSamples:
    """``||R(i w, A1) B|| * ||C R(i w, A2)||`` for a triangular system."""
    if sys.kind == LOWER_TRIANGULAR:
        from .blocks import similarity_swap
        sys = similarity_swap(sys)
    if sys.kind != TRIANGULAR:
        raise ValidationError("coupling_growth_product needs a triangular system")
    omegas = _check_grid(omegas)
    b = np.asarray(sys.coupling_12.left)
    c = np.asarray(sys.coupling_12.right)
    if b.shape[1] == 0:
        return SweepSamples(FREQUENCY, omegas, np.zeros_like(omegas), window)

    def sample(w):
        try:
            r1 = resolvent_direct(sys.a1, 1j * w)
            r2 = resolvent_direct(sys.a2, 1j * w)
        except SpectralPointError:
            return np.inf
        return float(np.linalg.norm(r1 @ b, 2) * np.linalg.norm(c @ r2, 2))

    return SweepSamples(FREQUENCY, omegas, pmap(sample, omegas), window)


@dataclass(frozen=True, eq=False)
class GomilkoEstimate:
    """Result of :func:`gomilko_integral`."""

    supremum: float
    argmax_xi: float
    xis: np.ndarray
    values: np.ndarray
    unbounded: bool
    adjoint: bool = False


def _line_integrand(m: np.ndarray, v: np.ndarray):
    """Vectorised ``eta -> ||R(xi + i eta, m) v||^2`` builder."""
    lam, vecs = np.linalg.eig(m)
    if np.linalg.cond(vecs) < 1e8:
        w = np.linalg.solve(vecs, v)

        def make(xi):
            def f(eta):
                z = xi + 1j * np.atleast_1d(eta)
                u = w[None, :] / (z[:, None] - lam[None, :])
                out = np.sum(np.abs(u @ vecs.T) ** 2, axis=1)
                return out if np.ndim(eta) else float(out[0])
            return f
        return make, lam

    eye = np.eye(m.shape[0])

    def make(xi):
        def f(eta):
            etas = np.atleast_1d(eta)
            mats = (xi + 1j * etas)[:, None, None] * eye[None] - m[None]
            sol = np.linalg.solve(mats, np.broadcast_to(v, (etas.size, v.size))[..., None])[..., 0]
            out = np.sum(np.abs(sol) ** 2, axis=1)
            return out if np.ndim(eta) else float(out[0])
        return f
    return make, lam


def _integrate_line(f, peaks, radius, rel_tail, max_doublings):
    def quad(a, b):
        pts = [p for p in peaks if a < p < b]
        val, _ = integrate.quad(f, a, b, points=pts or None,
                                limit=max(200, 50 * (len(pts) + 1)), epsabs=0.0, epsrel=1e-10)
        return val

    half = radius
    total = quad(-half, half)
    for _ in range(max_doublings):
        inc = quad(half, 2 * half) + quad(-2 * half, -half)
        total += inc
        half *= 2
        if inc <= rel_tail * total:
            # ||R v||^2 ~ c/eta^2 far out, so the remaining tail equals the last increment
            return total + inc
    raise NonConvergentTailError(
        f"non-convergent tail: increment still above {rel_tail:.0%} of the total at |eta| = {half:.3g}"
    )


def gomilko_integral(m, vector, xis, adjoint: bool = False, rel_tail: float = 0.01,
                     max_doublings: int = 40) -> GomilkoEstimate:
    """Estimate ``sup_xi xi * integral ||R(xi + i eta, m) x||^2 d eta``.

    This is the uniform-boundedness functional: the semigroup is bounded iff
    it (and its adjoint counterpart) is finite for every vector. The eta
    range is symmetric and doubled until the last increment is below
    ``rel_tail`` of the total; adaptive quadrature is split at the peaks
    ``Im(lambda_k)``. ``adjoint=True`` uses ``R(.)^* x``.

    ``unbounded`` is set when the supremum sits at an end of the xi-grid and
    the local log-log slope there exceeds 1/2 in magnitude (the values are
    still growing towards the grid edge like a power of xi).
    """
    m = as_matrix(m)
    if adjoint:
        m = m.conj().T
    v = np.asarray(vector, dtype=complex).ravel()
    if v.size != m.shape[0]:
        raise ValidationError("vector length does not match the matrix")
    xis = _check_grid(xis)
    make, lam = _line_integrand(m, v)
    spread = float(np.max(np.abs(lam.real))) if lam.size else 0.0
    top = float(np.max(np.abs(lam.imag))) if lam.size else 0.0
    peaks = sorted(set(float(x) for x in lam.imag))

    def one(xi):
        radius = top + 10.0 * (xi + spread + 1.0)
        return xi * _integrate_line(make(xi), peaks, radius, rel_tail, max_doublings)

    values = np.asarray(pmap(one, xis))
    j = int(np.argmax(values))
    unbounded = False
    if xis.size >= 2 and j in (0, xis.size - 1):
        nb = 1 if j == 0 else xis.size - 2
        slope = (np.log(values[j]) - np.log(values[nb])) / (np.log(xis[j]) - np.log(xis[nb]))
        unbounded = abs(slope) > 0.5
    return GomilkoEstimate(float(values[j]), float(xis[j]), xis, values, bool(unbounded), adjoint)


def gomilko_closed_form(m, vector, xi: float) -> float:
    """Residue evaluation of ``xi * integral ||R(xi + i eta, m) x||^2 d eta``.

    For diagonalisable ``m = V diag(lambda) V^{-1}`` and ``w = V^{-1} x``,
    the integral equals ``sum_jk G_jk conj(w_j) w_k 2 pi / (a_j + a_k + i(b_j - b_k))``
    with ``G = V^* V``, ``a = xi - Re(lambda)``, ``b = Im(lambda)``.
    Used as an independent check of the quadrature route.
    """
    m = as_matrix(m)
    lam, vecs = np.linalg.eig(m)
    w = np.linalg.solve(vecs, np.asarray(vector, dtype=complex).ravel())
    gram = vecs.conj().T @ vecs
    a = xi - lam.real
    b = lam.imag
    kern = 2 * np.pi / (a[:, None] + a[None, :] + 1j * (b[:, None] - b[None, :]))
    val = np.sum(gram * np.conj(w)[:, None] * w[None, :] * kern)
    return float(xi * val.real)
