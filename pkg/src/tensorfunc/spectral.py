"""Fourier-domain block diagonalization of ``bcirc(A)``.

With the unnormalized forward DFT along the tubes (``omega = exp(-2 pi i / p)``)
and the unitary ``F_p``, ``(F_p kron I_n) bcirc(A) (F_p^* kron I_n)`` is
``blockdiag(D_0, ..., D_{p-1})`` where ``D_k`` is slice ``k`` of ``fft(A, axis=2)``.
Faces are numbered in natural FFT-bin order.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import tcore
from .densefun import matrix_function
from .errors import DimensionError, MatrixFunctionError

__all__ = [
    "FaceDiagonalization",
    "face_diagonalize",
    "apply_bcirc",
    "apply_faces",
    "to_fourier",
    "from_fourier",
    "t_function_facewise",
    "spectrum_bcirc",
]


@dataclass(frozen=True)
class FaceDiagonalization:
    """The ``p`` Fourier-domain faces of a tensor with ``n x n`` slices."""

    faces: np.ndarray  # (p, n, n)

    @property
    def n(self):
        return self.faces.shape[1]

    @property
    def p(self):
        return self.faces.shape[0]

    def blockdiag(self):
        """The ``np x np`` block diagonal matrix ``D``."""
        n, p = self.n, self.p
        out = np.zeros((n * p, n * p), dtype=np.complex128)
        for k in range(p):
            out[k * n:(k + 1) * n, k * n:(k + 1) * n] = self.faces[k]
        return out

    def to_tensor(self):
        """Invert the transform: the frontal slices of the source tensor."""
        return np.fft.ifft(self.faces.transpose(1, 2, 0), axis=2)

    def apply(self, x):
        """``D @ x`` for an ``(n p, s)`` block vector."""
        return apply_faces(self.faces, x)


def face_diagonalize(a):
    """Transform every tube fiber of `a` and return the faces ``D_k``."""
    a = tcore.as_tensor(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"face diagonalization needs square faces, got {a.shape}")
    return FaceDiagonalization(np.fft.fft(a, axis=2).transpose(2, 0, 1).copy())


def _blocks(x, n, p):
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2 or x.shape[0] != n * p:
        raise DimensionError(f"block vector of shape {np.shape(x)} does not have {p} blocks of height {n}")
    return x.reshape(p, n, x.shape[1])


def to_fourier(x, p):
    """``(F_p kron I_n) x`` with the unitary DFT."""
    x = np.asarray(x, dtype=np.complex128)
    xb = _blocks(x, x.shape[0] // p, p)
    return (np.fft.fft(xb, axis=0) / np.sqrt(p)).reshape(x.shape)


def from_fourier(x, p):
    """``(F_p^* kron I_n) x``; the inverse of :func:`to_fourier`."""
    x = np.asarray(x, dtype=np.complex128)
    xb = _blocks(x, x.shape[0] // p, p)
    return (np.fft.ifft(xb, axis=0) * np.sqrt(p)).reshape(x.shape)


def apply_faces(faces, x):
    """Apply ``blockdiag(faces)`` to a block vector."""
    p, n, _ = faces.shape
    xb = _blocks(x, n, p)
    return (faces @ xb).reshape(n * p, xb.shape[2])


def apply_bcirc(a, x):
    """``bcirc(a) @ x`` without forming ``bcirc(a)``.

    Uses the Fourier path for ``p >= 4`` and the block convolution otherwise
    (see :func:`tensorfunc.tcore.t_product`).
    """
    a = tcore.as_tensor(a)
    n1, n2, p = a.shape
    _blocks(x, n2, p)
    return tcore.unfold(tcore.t_product(a, tcore.fold(x, p)))


def _face_worker(f, faces, rhs):
    def run(k):
        try:
            return matrix_function(f, faces[k]) @ rhs[k]
        except MatrixFunctionError as exc:
            raise MatrixFunctionError(str(exc), face=k) from None
        except np.linalg.LinAlgError as exc:
            raise MatrixFunctionError(str(exc), face=k) from None

    return run


def t_function_facewise(f, a, b, workers=None):
    """``f(a) * b`` evaluated face by face in the Fourier domain.

    The tubes of `b` are transformed, each face product ``f(D_k) @ B_k`` is
    formed independently and the result is transformed back.  Faces may be
    evaluated on a thread pool; each result goes to its own slot, so the
    output does not depend on scheduling.

    Parameters
    ----------
    f : ScalarFunction
    a : (n, n, p) array_like
    b : (n, s, p) array_like
    workers : int, optional
        Thread count.  Defaults to ``min(p, cpu_count)``; ``1`` runs serially.
    """
    a = tcore.as_tensor(a)
    b = tcore.as_tensor(b)
    n, n2, p = a.shape
    if n != n2:
        raise DimensionError(f"t-functions need square faces, got {a.shape}")
    if b.shape[0] != n or b.shape[2] != p:
        raise DimensionError(f"right-hand side {b.shape} does not conform to {a.shape}")
    faces = face_diagonalize(a).faces
    rhs = np.fft.fft(b, axis=2).transpose(2, 0, 1)
    out = np.empty_like(rhs)
    run = _face_worker(f, faces, rhs)
    if workers is None:
        workers = min(p, os.cpu_count() or 1)
    if workers <= 1 or p == 1:
        for k in range(p):
            out[k] = run(k)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for k, block in enumerate(pool.map(run, range(p))):
                out[k] = block
    return np.fft.ifft(out.transpose(1, 2, 0), axis=2)


def spectrum_bcirc(a):
    """Eigenvalues of ``bcirc(a)`` as the union of the face spectra, face by face."""
    faces = face_diagonalize(a).faces
    try:
        return np.concatenate([np.linalg.eigvals(face) for face in faces])
    except np.linalg.LinAlgError as exc:
        raise MatrixFunctionError(f"eigenvalue solver failed: {exc}") from None
