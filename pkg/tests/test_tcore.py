import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import circulant

from conftest import brute_bcirc, brute_unfold, random_tensor, rel
from tensorfunc import tcore
from tensorfunc.errors import DecompositionError, DimensionError, RealCastError

dims = st.integers(1, 5)
seeds = st.integers(0, 2**32 - 1)


# ---- unfold / fold -------------------------------------------------------

def test_unfold_tube():
    a = np.array([1.0, 2.0]).reshape(1, 1, 2)
    np.testing.assert_array_equal(tcore.unfold(a), [[1], [2]])


def test_unfold_single_slice(rng):
    a = rng.standard_normal((3, 2, 1))
    np.testing.assert_array_equal(tcore.unfold(a), a[:, :, 0])


def test_fold_tube():
    np.testing.assert_array_equal(tcore.fold(np.array([[1.0], [2.0]]), 2).ravel(), [1, 2])


def test_unfold_matches_stacking(rng):
    a = random_tensor(rng, (3, 2, 4), complex_=True)
    np.testing.assert_array_equal(tcore.unfold(a), brute_unfold(a))


@given(dims, dims, dims, seeds)
def test_fold_unfold_roundtrip_is_bitwise(n1, n2, p, seed):
    a = random_tensor(np.random.default_rng(seed), (n1, n2, p), complex_=True)
    np.testing.assert_array_equal(tcore.fold(tcore.unfold(a), p), a)


def test_fold_rejects_indivisible_rows():
    with pytest.raises(DimensionError):
        tcore.fold(np.zeros((5, 2)), 2)


def test_fold_of_first_unit_block_is_identity():
    np.testing.assert_array_equal(tcore.fold(tcore.block_unit_vector(0, 3, 4), 4), tcore.identity_tensor(3, 4))


@given(dims, dims, dims, seeds, st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_linearity(n1, n2, p, seed, alpha, beta):
    rng = np.random.default_rng(seed)
    a, b = random_tensor(rng, (n1, n2, p), True), random_tensor(rng, (n1, n2, p), True)
    c = alpha * a + beta * b
    for op in (tcore.unfold, tcore.bcirc):
        np.testing.assert_allclose(op(c), alpha * op(a) + beta * op(b), rtol=0, atol=1e-12 * (1 + np.abs(c).max()))
    np.testing.assert_allclose(
        tcore.fold(tcore.unfold(c), p), alpha * tcore.fold(tcore.unfold(a), p) + beta * tcore.fold(tcore.unfold(b), p),
        atol=1e-12 * (1 + np.abs(c).max()),
    )


# ---- bcirc ---------------------------------------------------------------

def test_bcirc_tube():
    np.testing.assert_array_equal(tcore.bcirc(np.array([1.0, 2.0]).reshape(1, 1, 2)), [[1, 2], [2, 1]])


def test_bcirc_identity():
    np.testing.assert_array_equal(tcore.bcirc(tcore.identity_tensor(2, 3)), np.eye(6))


@given(dims, dims, dims, seeds)
def test_bcirc_matches_blockwise_construction(n1, n2, p, seed):
    a = random_tensor(np.random.default_rng(seed), (n1, n2, p), True)
    np.testing.assert_array_equal(tcore.bcirc(a), brute_bcirc(a))


@given(dims, dims, dims, seeds)
def test_bcirc_first_block_column_is_unfold(n1, n2, p, seed):
    a = random_tensor(np.random.default_rng(seed), (n1, n2, p))
    e1 = tcore.block_unit_vector(0, n2, p)
    np.testing.assert_array_equal(tcore.bcirc(a) @ e1, tcore.unfold(a))


def test_bcirc_times_unit_block_is_shifted_unfold(rng):
    a = rng.standard_normal((3, 3, 4))
    for k in range(4):
        shifted = np.concatenate([a[:, :, (j - k) % 4][:, :, None] for j in range(4)], axis=2)
        np.testing.assert_allclose(tcore.bcirc(a) @ tcore.block_unit_vector(k, 3, 4), brute_unfold(shifted))


# ---- block unit vectors / identity ---------------------------------------

def test_block_unit_vector_first():
    e = tcore.block_unit_vector(0, 2, 3)
    assert e.shape == (6, 2)
    np.testing.assert_array_equal(e[:2], np.eye(2))
    np.testing.assert_array_equal(e[2:], 0)


def test_block_unit_vector_last_scalar():
    np.testing.assert_array_equal(tcore.block_unit_vector(2, 1, 3).ravel(), [0, 0, 1])


def test_block_unit_vector_range():
    with pytest.raises(DimensionError):
        tcore.block_unit_vector(3, 2, 3)


def test_identity_unfolds_to_first_unit_block():
    np.testing.assert_array_equal(tcore.unfold(tcore.identity_tensor(3, 4)), tcore.block_unit_vector(0, 3, 4))


# ---- t-product -----------------------------------------------------------

def test_t_product_tubes():
    a = np.array([1.0, 2.0]).reshape(1, 1, 2)
    b = np.array([3.0, 4.0]).reshape(1, 1, 2)
    np.testing.assert_allclose(tcore.t_product(a, b).ravel(), [11, 10])


@pytest.mark.parametrize("p", [1, 2, 3, 4, 7])
def test_identity_laws(rng, p):
    a = random_tensor(rng, (3, 3, p), True)
    eye = tcore.identity_tensor(3, p)
    assert rel(tcore.t_product(a, eye), a) < 1e-15
    assert rel(tcore.t_product(eye, a), a) < 1e-15


@given(dims, dims, dims, dims, seeds)
def test_bcirc_is_multiplicative(m, n, s, p, seed):
    rng = np.random.default_rng(seed)
    a, b = random_tensor(rng, (m, n, p), True), random_tensor(rng, (n, s, p), True)
    lhs = tcore.bcirc(tcore.t_product(a, b))
    rhs = brute_bcirc(a) @ brute_bcirc(b)
    assert np.linalg.norm(lhs - rhs) <= 1e-13 * np.linalg.norm(brute_bcirc(a)) * np.linalg.norm(brute_bcirc(b))


@given(dims, dims, seeds)
def test_fft_and_convolution_paths_agree(n, p, seed):
    rng = np.random.default_rng(seed)
    a, b = random_tensor(rng, (n, n, p), True), random_tensor(rng, (n, 2, p), True)
    direct = tcore.fold(brute_bcirc(a) @ brute_unfold(b), p)
    assert rel(tcore.t_product(a, b), direct) < 1e-13


@given(st.integers(1, 4), st.integers(1, 5), st.integers(0, 3), seeds)
def test_powers_match_matrix_powers(n, p, j, seed):
    a = random_tensor(np.random.default_rng(seed), (n, n, p))
    lhs = np.linalg.matrix_power(brute_bcirc(a), j)
    assert rel(tcore.bcirc(tcore.t_power(a, j)), lhs) < 1e-12


def test_power_zero_is_identity(rng):
    np.testing.assert_array_equal(tcore.t_power(rng.standard_normal((2, 2, 3)), 0), tcore.identity_tensor(2, 3))


def test_t_product_shape_mismatch():
    with pytest.raises(DimensionError):
        tcore.t_product(np.zeros((2, 3, 4)), np.zeros((2, 3, 4)))


# ---- t-transpose ---------------------------------------------------------

def test_transpose_single_slice_is_conjugate_transpose(rng):
    a = random_tensor(rng, (3, 2, 1), True)
    np.testing.assert_array_equal(tcore.t_transpose(a)[:, :, 0], a[:, :, 0].conj().T)


@given(dims, dims, dims, seeds)
def test_bcirc_of_transpose_is_adjoint(n1, n2, p, seed):
    a = random_tensor(np.random.default_rng(seed), (n1, n2, p), True)
    np.testing.assert_allclose(tcore.bcirc(tcore.t_transpose(a)), brute_bcirc(a).conj().T)


@given(dims, dims, dims, dims, seeds)
def test_transpose_reverses_products(m, n, s, p, seed):
    rng = np.random.default_rng(seed)
    a, b = random_tensor(rng, (m, n, p), True), random_tensor(rng, (n, s, p), True)
    lhs = tcore.t_transpose(tcore.t_product(a, b))
    rhs = tcore.t_product(tcore.t_transpose(b), tcore.t_transpose(a))
    assert rel(lhs, rhs) < 1e-13


# ---- inverse, f-diagonal, spectra ----------------------------------------

def test_t_inverse(rng):
    a = rng.standard_normal((3, 3, 4)) + 3 * tcore.identity_tensor(3, 4).real
    inv = tcore.t_inverse(a)
    assert rel(tcore.t_product(a, inv), tcore.identity_tensor(3, 4)) < 1e-13
    assert rel(tcore.bcirc(inv), np.linalg.inv(brute_bcirc(a))) < 1e-12


def test_t_inverse_singular():
    with pytest.raises(DecompositionError):
        tcore.t_inverse(np.zeros((2, 2, 3)))


def test_fdiagonal_roundtrip(rng):
    d = rng.standard_normal((3, 4))
    t = tcore.fdiagonal(d)
    assert tcore.is_fdiagonal(t)
    np.testing.assert_array_equal(tcore.tubes(t), d)
    assert not tcore.is_fdiagonal(rng.standard_normal((3, 3, 2)))


@given(st.integers(1, 6), st.integers(1, 6), seeds)
def test_fdiagonal_spectrum_is_union_of_circulant_spectra(n, p, seed):
    d = np.random.default_rng(seed).standard_normal((n, p))
    got = np.linalg.eigvals(tcore.bcirc(tcore.fdiagonal(d)))
    want = np.concatenate([np.linalg.eigvals(circulant(d[i])) for i in range(n)])
    key = lambda z: np.lexsort((np.round(z.imag, 8), np.round(z.real, 8)))  # noqa: E731
    np.testing.assert_allclose(got[key(got)], want[key(want)], atol=1e-10)


# ---- eigendecomposition --------------------------------------------------

def test_eig_of_fdiagonal_is_trivial(rng):
    d = tcore.fdiagonal(rng.standard_normal((3, 4)))
    x, dd, xinv = tcore.t_eig_facewise(d)
    np.testing.assert_array_equal(x, tcore.identity_tensor(3, 4))
    np.testing.assert_array_equal(dd, d)
    np.testing.assert_array_equal(xinv, tcore.identity_tensor(3, 4))


def test_eig_reconstructs_symmetric_faces(rng):
    a = rng.standard_normal((3, 3, 3))
    a = a + a.transpose(1, 0, 2)
    x, d, xinv = tcore.t_eig_facewise(a)
    assert tcore.is_fdiagonal(np.round(d, 14))
    assert rel(tcore.t_product(tcore.t_product(x, d), xinv), a) < 1e-12


def test_eig_lateral_slices(rng):
    a = rng.standard_normal((4, 4, 3))
    x, d, _ = tcore.t_eig_facewise(a)
    tubes = tcore.tubes(d)
    for i in range(4):
        xi = x[:, [i], :]
        di = tubes[i].reshape(1, 1, -1)
        assert rel(tcore.t_product(a, xi), tcore.t_product(xi, di)) < 1e-11


def test_eig_rejects_defective_face():
    a = np.zeros((2, 2, 2))
    a[0, 1, 0] = 1.0  # nilpotent Jordan block in every Fourier face
    with pytest.raises(DecompositionError):
        tcore.t_eig_facewise(a)


# ---- real casting --------------------------------------------------------

def test_cast_real():
    x = np.array([1.0 + 1e-14j, 2.0])
    np.testing.assert_array_equal(tcore.cast_real(x), [1.0, 2.0])
    with pytest.raises(RealCastError):
        tcore.cast_real(np.array([1.0 + 1e-3j]))


def test_as_tensor_validation():
    with pytest.raises(DimensionError):
        tcore.as_tensor(np.zeros((2, 2)))
    with pytest.raises(DimensionError):
        tcore.as_tensor(np.zeros((2, 0, 2)))
