"""Third-order tensors under the t-product.

A tensor is a plain :class:`numpy.ndarray` of shape ``(n1, n2, p)``; entry
``a[i, j, k]`` lives in frontal slice ``k``.  Every function here returns
new complex128 arrays and never writes into its inputs.

Block vectors are 2-D arrays of shape ``(n * p, s)`` made of ``p`` stacked
``n x s`` blocks, which is exactly what :func:`unfold` produces.

All indices (slices, block numbers, nodes) are zero-based.
"""

import numpy as np

from .errors import DecompositionError, DimensionError, RealCastError

__all__ = [
    "as_tensor",
    "cast_real",
    "unfold",
    "fold",
    "bcirc",
    "block_unit_vector",
    "identity_tensor",
    "t_product",
    "t_transpose",
    "t_power",
    "t_inverse",
    "fdiagonal",
    "tubes",
    "is_fdiagonal",
    "t_eig_facewise",
    "REAL_CAST_TOL",
]

REAL_CAST_TOL = 1e-10

# below this depth the explicit block convolution beats the FFT
_FFT_MIN_DEPTH = 4


def as_tensor(a):
    """Return `a` as a complex128 array of shape ``(n1, n2, p)``."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 3:
        raise DimensionError(f"expected a third-order tensor, got ndim={a.ndim}")
    if 0 in a.shape:
        raise DimensionError(f"tensor dimensions must be positive, got {a.shape}")
    return a


def cast_real(x, tol=REAL_CAST_TOL):
    """Drop the imaginary part of `x` after checking that it is negligible.

    Raises :class:`RealCastError` if ``max|imag(x)| > tol * ||x||_F``.
    """
    x = np.asarray(x)
    if not np.iscomplexobj(x):
        return x.astype(np.float64, copy=True)
    scale = np.linalg.norm(x.ravel())
    worst = np.max(np.abs(x.imag)) if x.size else 0.0
    if worst > tol * scale:
        raise RealCastError(
            f"imaginary residue {worst:.3e} exceeds {tol:.1e} * ||x||_F = {tol * scale:.3e}"
        )
    return np.ascontiguousarray(x.real)


def unfold(a):
    """Stack the frontal slices of `a` into an ``(n1*p, n2)`` block column."""
    a = as_tensor(a)
    n1, n2, p = a.shape
    return a.transpose(2, 0, 1).reshape(p * n1, n2)


def fold(v, p):
    """Inverse of :func:`unfold`: split ``v`` into ``p`` frontal slices."""
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 2:
        raise DimensionError(f"block vector must be 2-D, got ndim={v.ndim}")
    if p < 1 or v.shape[0] % p:
        raise DimensionError(f"row count {v.shape[0]} is not divisible by p={p}")
    n1 = v.shape[0] // p
    return v.reshape(p, n1, v.shape[1]).transpose(1, 2, 0)


def _circulant_index(p):
    k = np.arange(p)
    return (k[:, None] - k[None, :]) % p


def bcirc(a):
    """Materialize the ``(n1*p, n2*p)`` block circulant matrix of `a`.

    Block ``(i, j)`` is the frontal slice ``(i - j) mod p``.
    """
    a = as_tensor(a)
    n1, n2, p = a.shape
    blocks = a.transpose(2, 0, 1)[_circulant_index(p)]  # (p, p, n1, n2)
    return blocks.transpose(0, 2, 1, 3).reshape(p * n1, p * n2)


def block_unit_vector(k, n, p):
    """The block vector ``E_k``: identity in block `k`, zeros elsewhere."""
    if not 0 <= k < p:
        raise DimensionError(f"block index {k} out of range for p={p}")
    if n < 1:
        raise DimensionError(f"block height must be positive, got {n}")
    e = np.zeros((n * p, n), dtype=np.complex128)
    e[k * n:(k + 1) * n] = np.eye(n)
    return e


def identity_tensor(n, p):
    """The t-product identity: first slice ``I_n``, all other slices zero."""
    if n < 1 or p < 1:
        raise DimensionError(f"identity needs n, p >= 1, got n={n}, p={p}")
    eye = np.zeros((n, n, p), dtype=np.complex128)
    eye[:, :, 0] = np.eye(n)
    return eye


def t_product(a, b):
    """The t-product ``a * b = fold(bcirc(a) @ unfold(b))``.

    For ``p >= 4`` the product is taken slice by slice in the Fourier domain;
    shallower tensors use the block convolution directly.
    """
    a = as_tensor(a)
    b = as_tensor(b)
    m, n, p = a.shape
    if b.shape[0] != n or b.shape[2] != p:
        raise DimensionError(f"cannot t-multiply {a.shape} by {b.shape}")
    if p >= _FFT_MIN_DEPTH:
        ah = np.fft.fft(a, axis=2).transpose(2, 0, 1)
        bh = np.fft.fft(b, axis=2).transpose(2, 0, 1)
        return np.fft.ifft((ah @ bh).transpose(1, 2, 0), axis=2)
    at = a.transpose(2, 0, 1)[_circulant_index(p)]
    ct = np.einsum("kjmn,jns->kms", at, b.transpose(2, 0, 1))
    return ct.transpose(1, 2, 0)


def t_transpose(a):
    """Conjugate-transpose every slice, then reverse slices ``2..p``."""
    a = as_tensor(a)
    at = np.conj(a.transpose(1, 0, 2))
    return np.roll(at[:, :, ::-1], 1, axis=2)


def t_power(a, j):
    """``a^j`` by repeated t-products, with ``a^0`` the identity."""
    a = as_tensor(a)
    n, n2, p = a.shape
    if n != n2:
        raise DimensionError(f"powers need square faces, got {a.shape}")
    if j < 0:
        raise ValueError("negative powers are not supported; use t_inverse")
    out = identity_tensor(n, p)
    for _ in range(j):
        out = t_product(out, a)
    return out


def _fourier_faces(a):
    return np.fft.fft(a, axis=2).transpose(2, 0, 1)


def _from_fourier_faces(faces):
    return np.fft.ifft(faces.transpose(1, 2, 0), axis=2)


def t_inverse(a):
    """The t-product inverse, computed face by face in the Fourier domain."""
    a = as_tensor(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"inverse needs square faces, got {a.shape}")
    try:
        inv = np.linalg.inv(_fourier_faces(a))
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"tensor is not t-invertible: {exc}") from None
    return _from_fourier_faces(inv)


def fdiagonal(tube_fibers):
    """Build an f-diagonal ``(n, n, p)`` tensor from an ``(n, p)`` array of tubes."""
    d = np.asarray(tube_fibers, dtype=np.complex128)
    if d.ndim != 2:
        raise DimensionError(f"tube fibers must be an (n, p) array, got ndim={d.ndim}")
    n, p = d.shape
    out = np.zeros((n, n, p), dtype=np.complex128)
    out[np.arange(n), np.arange(n), :] = d
    return out


def tubes(d):
    """The diagonal tube fibers of `d` as an ``(n, p)`` array."""
    d = as_tensor(d)
    n = min(d.shape[:2])
    return d[np.arange(n), np.arange(n), :].copy()


def is_fdiagonal(a):
    """True if every frontal slice of `a` is (exactly) diagonal."""
    a = np.asarray(a)
    if a.ndim != 3 or a.shape[0] != a.shape[1]:
        return False
    mask = ~np.eye(a.shape[0], dtype=bool)
    return not np.any(a[mask])


def t_eig_facewise(a, cond_limit=1e12):
    """Tensor eigendecomposition ``a = X * D * Xinv`` with `D` f-diagonal.

    Each Fourier-domain face is diagonalized separately and the factors are
    transformed back along the tubes, so the reconstruction holds under the
    t-product.  Raw slices are *not* diagonalized individually.

    Returns
    -------
    X, D, Xinv : ndarray
        Tensors of shape ``(n, n, p)``; ``D`` is f-diagonal and the lateral
        slices ``X[:, [i], :]`` satisfy ``a * X_i = X_i * d_i``.

    Raises
    ------
    DecompositionError
        If some face has an eigenvector matrix with condition number above
        `cond_limit` (numerically defective).
    """
    a = as_tensor(a)
    n, n2, p = a.shape
    if n != n2:
        raise DimensionError(f"eigendecomposition needs square faces, got {a.shape}")
    if is_fdiagonal(a):
        return identity_tensor(n, p), a.copy(), identity_tensor(n, p)

    faces = _fourier_faces(a)
    vecs = np.empty_like(faces)
    vals = np.empty((p, n), dtype=np.complex128)
    inv = np.empty_like(faces)
    for k in range(p):
        w, v = np.linalg.eig(faces[k])
        cond = np.linalg.cond(v)
        if not np.isfinite(cond) or cond > cond_limit:
            raise DecompositionError(
                f"Fourier face {k} is numerically defective (cond(X) = {cond:.2e})"
            )
        vals[k], vecs[k], inv[k] = w, v, np.linalg.inv(v)
    x = _from_fourier_faces(vecs)
    d = fdiagonal(np.fft.ifft(vals.T, axis=1))
    xinv = _from_fourier_faces(inv)
    return x, d, xinv
