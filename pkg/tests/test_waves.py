from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from polystab import (Theorem, ValidationError, WaveSpec, adjoint_graph_norm, assemble_wave1d_placed,
                      assemble_wave2d, assemble_wave_coupling, build_coupled_wave, damping_overlap,
                      graph_norm, spectral_check, verdict_for)
from polystab.waves import damping_matrix, mode_index, wave2d_fields


@pytest.mark.parametrize("key", ["1,1", "1,2", "2,2", "3,7", "12,5"])
def test_overlap_frozen_oracle(oracles, key):
    m, mp = (int(x) for x in key.split(","))
    assert damping_overlap(m, mp) == pytest.approx(oracles["damping_overlap"][key], rel=1e-12)


def test_overlap_general_strip(oracles):
    assert damping_overlap(3, 4, (0.5, 2.0)) == pytest.approx(
        oracles["damping_overlap"]["strip 0.5..2 (3,4)"], rel=1e-12)


def test_overlap_closed_forms():
    assert damping_overlap(1, 1) == pytest.approx(0.5 - np.sin(2) / 4, abs=1e-15)
    assert damping_overlap(1, 2) == pytest.approx(np.sin(1) / 2 - np.sin(3) / 6, abs=1e-15)


def test_overlap_enumeration_against_quadrature():
    ms = np.arange(1, 201)
    table = np.array([[damping_overlap(i, j) for j in ms] for i in ms])
    assert np.array_equal(table, table.T)
    # off-diagonal overlaps can be negative (e.g. (3, 7)); their size is still bounded by 1
    assert np.all(np.abs(table) <= 1)
    assert np.all((np.diag(table) >= 0) & (np.diag(table) <= 1))
    rng = np.random.default_rng(0)
    for i, j in rng.integers(1, 201, size=(40, 2)):
        ref, _ = quad(lambda z: np.sin(i * z) * np.sin(j * z), 0, 1, limit=400, epsabs=1e-13)
        assert table[i - 1, j - 1] == pytest.approx(ref, abs=1e-10)


def test_overlap_rejects_mode_zero():
    with pytest.raises(ValidationError):
        damping_overlap(0, 1)


def test_wave2d_single_mode_matrix():
    m = assemble_wave2d(WaveSpec(n_modes_2d=1))
    ref = [[0, np.sqrt(2)], [-np.sqrt(2), -(2 / np.pi) * (0.5 - np.sin(2) / 4)]]
    np.testing.assert_allclose(m, ref, rtol=1e-15)


@pytest.mark.parametrize("n", [4, 8, 16])
def test_wave2d_stable(n):
    assert np.max(np.linalg.eigvals(assemble_wave2d(WaveSpec(n_modes_2d=n))).real) < 0


def test_wave2d_undamped_is_skew():
    m = assemble_wave2d(WaveSpec(n_modes_2d=5, damping_coefficient=0.0))
    assert np.array_equal(m, -m.T)


def test_full_strip_damping_is_uniform():
    bounds = []
    for n in (4, 8, 12):
        spec = WaveSpec(n_modes_2d=n, damping_strip=(0.0, np.pi))
        np.testing.assert_allclose(damping_matrix(spec), np.eye(n * n), atol=1e-14)
        bounds.append(np.max(np.linalg.eigvals(assemble_wave2d(spec)).real))
    assert max(bounds) <= -0.49


def test_energy_coordinates_match_field_energy():
    spec = WaveSpec(n_modes_2d=6)
    rng = np.random.default_rng(1)
    state = rng.standard_normal(2 * 36)
    x, w = np.polynomial.legendre.leggauss(48)
    z, w = 0.5 * np.pi * (x + 1), 0.5 * np.pi * w
    dv1, dv2, vt = wave2d_fields(spec, state, z, z)
    energy = np.einsum("i,j,ij->", w, w, dv1**2 + dv2**2 + vt**2)
    assert energy == pytest.approx(state @ state, rel=1e-10)


def test_mode_index():
    assert mode_index(1, 1, 4) == 0
    assert mode_index(2, 3, 4) == 6


def test_wave1d_eigenvalues():
    gen = assemble_wave1d_placed(WaveSpec(n_modes_1d=8))
    lab = list(gen.mode_labels)
    assert gen.eigenvalues[lab.index(1)] == pytest.approx(-1 + 1j * np.pi, abs=1e-15)
    assert gen.eigenvalues[lab.index(2)] == pytest.approx(-2 ** (-5 / 3) + 2j * np.pi, abs=1e-15)
    for k in range(1, 9):
        assert gen.eigenvalues[lab.index(-k)] == np.conj(gen.eigenvalues[lab.index(k)])


def test_coupling_column_norms():
    spec = WaveSpec(n_modes_2d=8, n_modes_1d=64)
    b = np.asarray(assemble_wave_coupling(spec).left)
    k = np.arange(1, 9)
    np.testing.assert_allclose(np.linalg.norm(b, axis=0), (np.pi / 2) / k**2, rtol=1e-15)


def test_beta_one_certificate_bounded():
    vals = []
    for n in (8, 16, 32):
        spec = WaveSpec(n_modes_2d=n, n_modes_1d=64)
        vals.append(graph_norm(assemble_wave2d(spec), 1, assemble_wave_coupling(spec).left))
    assert max(vals) <= 1.05 * min(vals)


def test_gamma_one_certificate_bounded():
    vals = []
    for n in (16, 64, 256):
        spec = WaveSpec(n_modes_2d=8, n_modes_1d=n)
        gen = assemble_wave1d_placed(spec)
        vals.append(adjoint_graph_norm(gen, 1, assemble_wave_coupling(spec).right))
    assert max(vals) <= 1.05 * min(vals)
    # |mu_k| / (k pi) -> 1, two channels per row
    assert vals[-1] == pytest.approx(np.sqrt(2), rel=0.1)


def test_coupled_wave_verdict():
    sys = build_coupled_wave()
    v = verdict_for(sys)
    assert v.applicable == Theorem.TRIANGULAR_POLYNOMIAL
    assert v.predicted_alpha == 2
    assert v.condition_margins["beta/alpha1+gamma/alpha2-1"] == Fraction(1, 10)
    assert spectral_check(sys.matrix).abscissa < 0


def test_wavespec_json_roundtrip_and_snapping():
    spec = WaveSpec.from_json_dict({"n2d": 4, "n1d": 16, "placement_exponent": 1.6667,
                                    "coupling_decay": 2, "strip": [0, 1]})
    assert spec.placement_exponent == Fraction(5, 3)
    assert WaveSpec.from_json_dict(spec.to_json_dict()) == spec


@pytest.mark.parametrize("bad", [{"n2d": 0}, {"placement_exponent": -1}, {"strip": [0, 4]},
                                 {"strip": [1, 0.5]}, {"coupling_decay": 0}, {"colour": 1}])
def test_wavespec_validation(bad):
    with pytest.raises(ValidationError):
        WaveSpec.from_json_dict(bad)
