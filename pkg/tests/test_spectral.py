import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polystab import (DiagonalGenerator, OperatorMatrix, ValidationError, DimensionError,
                      adjoint_graph_norm, fractional_power, graph_norm, negative_fractional_power,
                      polynomial_damped, shifted_imaginary)
from polystab.spectral import coordinate_column


def test_fractional_power_of_minus_one_is_one():
    gen = DiagonalGenerator([-1.0])
    assert np.asarray(fractional_power(gen, 0.5))[0, 0] == pytest.approx(1.0)


def test_zeroth_power_is_identity():
    gen = polynomial_damped(7, 1.5)
    np.testing.assert_array_equal(np.asarray(fractional_power(gen, 0)), np.eye(7))


def test_principal_square_root_matches_oracle(oracles):
    ref = oracles["principal_power"]
    gen = DiagonalGenerator([complex(*ref["lambda"])])
    val = np.asarray(fractional_power(gen, ref["beta"]))[0, 0]
    assert val == pytest.approx(complex(*ref["value"]), rel=1e-14)
    assert val**2 == pytest.approx(1 - 1j, rel=1e-14)


def test_first_power_is_exact():
    gen = polynomial_damped(20, 5 / 3)
    np.testing.assert_array_equal(np.diag(np.asarray(fractional_power(gen, 1))), -gen.eigenvalues)


def test_negative_power_inverts():
    gen = shifted_imaginary(6, 0.3)
    prod = np.asarray(fractional_power(gen, 0.7)) @ np.asarray(negative_fractional_power(gen, 0.7))
    np.testing.assert_allclose(prod, np.eye(6), atol=1e-14)


def test_rejects_negative_beta():
    with pytest.raises(ValidationError):
        fractional_power(shifted_imaginary(3), -0.1)


@pytest.mark.parametrize("eigs", [[0.0 + 1j], [1.0], [-1.0, 0.5j]])
def test_generator_rejects_closed_right_half_plane(eigs):
    with pytest.raises(ValidationError):
        DiagonalGenerator(eigs)


def test_generator_invariants():
    with pytest.raises(ValidationError):
        DiagonalGenerator([-1.0, -1.0])
    with pytest.raises(ValidationError):
        DiagonalGenerator([])
    with pytest.raises(ValidationError):
        DiagonalGenerator([-1.0, -2.0], mode_labels=("a",))


def test_generator_json_roundtrip():
    gen = DiagonalGenerator([-1 + 2j, -0.5 - 1j], ("x", "y"), alpha_hint=1.5)
    data = json.loads(gen.to_json())
    assert data == {"eigenvalues": [[-1.0, 2.0], [-0.5, -1.0]], "labels": ["x", "y"], "alpha_hint": 1.5}
    back = DiagonalGenerator.from_json(gen.to_json())
    np.testing.assert_array_equal(back.eigenvalues, gen.eigenvalues)
    assert back.mode_labels == gen.mode_labels


def test_operator_matrix_rejects_nonfinite_and_empty_tag():
    with pytest.raises(ValidationError):
        OperatorMatrix([[np.nan]])
    with pytest.raises(ValidationError):
        OperatorMatrix([[1.0]], basis_tag="")


def test_graph_norm_first_mode():
    gen = DiagonalGenerator(-np.arange(1, 11, dtype=float))
    assert graph_norm(gen, 2, coordinate_column(10, 0)) == pytest.approx(1.0)


@pytest.mark.parametrize("n", [2, 5, 13])
@pytest.mark.parametrize("beta2", [0.0, 0.5, 1.0])
def test_graph_norm_rankone_example(n, beta2):
    # B2 = n^{-alpha2/2} phi_n against A2 = diag(-1/k^alpha2 + ik): exact value |mu_n|^beta2 n^{-alpha2/2}
    alpha2 = 5 / 3
    gen = polynomial_damped(40, alpha2)
    b2 = coordinate_column(40, n - 1, n ** (-alpha2 / 2))
    mu = gen.eigenvalues[n - 1]
    assert graph_norm(gen, beta2, b2) == pytest.approx(abs(mu) ** beta2 * n ** (-alpha2 / 2), rel=1e-12)
    # the simplified form n^{beta2 - alpha2/2} holds up to |mu_n| = n (1 + O(n^{-2 - 2 alpha2}))
    assert graph_norm(gen, beta2, b2) == pytest.approx(n ** (beta2 - alpha2 / 2), rel=2e-2)


def test_graph_norm_against_dense_svd():
    rng = np.random.default_rng(4)
    gen = DiagonalGenerator(-rng.uniform(0.1, 2, 8) + 1j * rng.uniform(-5, 5, 8))
    f = rng.standard_normal((8, 2)) + 1j * rng.standard_normal((8, 2))
    d = np.diag(np.exp(0.6 * np.log(-gen.eigenvalues)))
    ref = np.linalg.svd(d @ f, compute_uv=False)[0]
    assert graph_norm(gen, 0.6, f) == pytest.approx(ref, rel=1e-10)


def test_adjoint_graph_norm_uses_conjugate_transpose():
    rng = np.random.default_rng(5)
    gen = polynomial_damped(6, 2)
    c = rng.standard_normal((2, 6)) + 1j * rng.standard_normal((2, 6))
    d = np.diag(np.exp(1.3 * np.log(-gen.eigenvalues.conj())))
    ref = np.linalg.norm(d @ c.conj().T, 2)
    assert adjoint_graph_norm(gen, 1.3, c) == pytest.approx(ref, rel=1e-12)


def test_graph_norm_dimension_mismatch():
    with pytest.raises(DimensionError):
        graph_norm(shifted_imaginary(4), 1, np.ones((3, 1)))


def test_dense_graph_norm_integer_power_only():
    m = np.diag([-1.0, -2.0])
    assert graph_norm(m, 1, np.eye(2)) == pytest.approx(2.0)
    with pytest.raises(ValidationError):
        graph_norm(m, 0.5, np.eye(2))


eigs = st.lists(
    st.tuples(st.floats(-5, -1e-3), st.floats(-50, 50)), min_size=1, max_size=12, unique=True,
).map(lambda xs: DiagonalGenerator([complex(a, b) for a, b in xs]))
powers = st.floats(0, 3, allow_nan=False)


@given(eigs, powers, powers)
def test_power_addition_law(gen, b1, b2):
    left = np.diag(np.asarray(fractional_power(gen, b1 + b2)))
    right = np.diag(np.asarray(fractional_power(gen, b1))) * np.diag(np.asarray(fractional_power(gen, b2)))
    np.testing.assert_allclose(left, right, rtol=1e-12)


@given(eigs, powers, st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_graph_norm_unchanged_by_zero_rows_factor_columns(gen, beta, extra, seed):
    # appending zero modes (rows) that the factor does not touch leaves the norm unchanged
    rng = np.random.default_rng(seed)
    f = rng.standard_normal((gen.size, 2))
    bigger = DiagonalGenerator(np.concatenate([gen.eigenvalues, -1.0 - 1j * (1000 + np.arange(extra))]))
    padded = np.vstack([f, np.zeros((extra, 2))])
    assert graph_norm(bigger, beta, padded) == pytest.approx(graph_norm(gen, beta, f), rel=1e-12)
