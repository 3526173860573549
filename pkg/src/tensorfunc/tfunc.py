"""Tensor t-functions ``f(A) * B`` and ``f(A)``.

``f(A) * B`` is defined as ``fold(f(bcirc(A)) @ unfold(B))``.  Three
backends compute it:

``dense``
    materialize ``bcirc(A)`` and evaluate the matrix function directly;
    the reference for small problems.
``facewise``
    evaluate ``f`` on each Fourier-domain face (``spectral``).
``krylov``
    restarted block FOM with the error-function update (``bfomfom``), on
    either ``bcirc(A)`` or the block-diagonal Fourier operator.  Only the
    exponential and the inverse are supported.
"""

import numpy as np

from . import tcore
from .bfomfom import restarted_bfomfom
from .densefun import EXP, matrix_function
from .errors import BackendError, DimensionError, MatrixFunctionError, TensorFuncError
from .spectral import apply_bcirc, face_diagonalize, from_fourier, spectrum_bcirc, t_function_facewise, to_fourier

__all__ = ["BACKENDS", "t_function", "t_function_of", "t_exp", "t_function_eig", "choose_backend", "max_cycle_length"]

BACKENDS = ("auto", "dense", "facewise", "krylov")

DENSE_LIMIT = 200  # largest n*p handled by the dense backend under "auto"
FACEWISE_LIMIT = 500  # largest face size handled facewise under "auto"

_KRYLOV_DEFAULTS = {
    "scheme": "classical",
    "m": 5,
    "tol": 1e-12,
    "max_cycles": 50,
    "case": "bcirc",
    "contour": "fixed",
}


def choose_backend(f, n, p):
    """Backend picked by ``backend="auto"`` for ``n x n x p`` tensors."""
    if n * p <= DENSE_LIMIT:
        return "dense"
    if n <= FACEWISE_LIMIT:
        return "facewise"
    if f.tag in ("exp", "inverse"):
        return "krylov"
    return "facewise"


def _check_operands(a, b):
    a = tcore.as_tensor(a)
    b = tcore.as_tensor(b)
    n, n2, p = a.shape
    if n != n2:
        raise DimensionError(f"t-functions need square frontal faces, got {a.shape}")
    if b.shape[0] != n or b.shape[2] != p:
        raise DimensionError(f"right-hand side {b.shape} does not conform to {a.shape}")
    return a, b


def _check_spectrum(f, a):
    """Reject spectra on which `f` is obviously undefined (small problems only)."""
    eigs = spectrum_bcirc(a)
    if f.tag == "inverse" and np.min(np.abs(eigs)) <= 1e-14 * max(np.max(np.abs(eigs)), 1.0):
        raise MatrixFunctionError("bcirc(a) is singular; the inverse is undefined")
    if f.tag == "sqrt":
        scale = max(np.max(np.abs(eigs)), 1.0)
        on_cut = (eigs.real <= 0) & (np.abs(eigs.imag) <= 1e-14 * scale)
        if np.any(on_cut):
            raise MatrixFunctionError("bcirc(a) has eigenvalues on the branch cut of sqrt")
    with np.errstate(all="ignore"):
        values = f(eigs)
    if not np.all(np.isfinite(values)):
        raise MatrixFunctionError("f is not finite on the spectrum of bcirc(a)")


def _dense(f, a, b):
    p = a.shape[2]
    return tcore.fold(matrix_function(f, tcore.bcirc(a)) @ tcore.unfold(b), p)


def max_cycle_length(rows, s):
    """Longest restart cycle that keeps every basis block full rank.

    Either the basis fills the space exactly (``m s = rows``, ending in a
    breakdown) or one more full block must still fit.  The right-hand side
    is never partitioned; the cycle is shortened instead.
    """
    q = rows // s
    return max(q if q * s == rows else q - 1, 1)


def _krylov(f, a, b, options):
    opts = dict(_KRYLOV_DEFAULTS)
    unknown = set(options) - set(opts)
    if unknown:
        raise TypeError(f"unknown krylov options: {sorted(unknown)}")
    opts.update(options)
    n, _, p = a.shape
    s = b.shape[1]
    m = max(1, min(int(opts["m"]), max_cycle_length(n * p, s)))
    rhs = tcore.unfold(b)
    if opts["case"] == "bcirc":
        op = lambda v: apply_bcirc(a, v)  # noqa: E731
    elif opts["case"] == "fourier":
        faces = face_diagonalize(a)
        op = faces.apply
        rhs = to_fourier(rhs, p)
    else:
        raise ValueError(f"case must be 'bcirc' or 'fourier', got {opts['case']!r}")
    x, _ = restarted_bfomfom(
        f, op, rhs, opts["scheme"], m, tol=opts["tol"], max_cycles=opts["max_cycles"], contour=opts["contour"]
    )
    if opts["case"] == "fourier":
        x = from_fourier(x, p)
    return tcore.fold(x, p)


def t_function(f, a, b, backend="auto", **options):
    """Compute ``f(a) * b``.

    Parameters
    ----------
    f : ScalarFunction
    a : (n, n, p) array_like
    b : (n, s, p) array_like
    backend : {"auto", "dense", "facewise", "krylov"}
        ``auto`` uses dense for ``n p <= 200``, facewise for ``n <= 500`` and
        krylov beyond that (exp and inverse only).
    **options
        Krylov backend only: ``scheme`` ("classical" or "global"), ``m``,
        ``tol``, ``max_cycles``, ``case`` ("bcirc" or "fourier") and
        ``contour`` ("fixed" or "adaptive").  ``m`` is capped by
        :func:`max_cycle_length`.

    Returns
    -------
    ndarray, shape (n, s, p), complex

    Raises
    ------
    DimensionError
        Non-square faces or a nonconforming `b`.
    BackendError
        The selected backend failed; ``.backend`` names it and ``.cause``
        holds the original exception.
    """
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
    a, b = _check_operands(a, b)
    n, _, p = a.shape
    if backend == "auto":
        backend = choose_backend(f, n, p)
    if options and backend != "krylov":
        raise TypeError(f"options {sorted(options)} only apply to the krylov backend")
    try:
        if n * p <= DENSE_LIMIT:
            _check_spectrum(f, a)
        if backend == "dense":
            return _dense(f, a, b)
        if backend == "facewise":
            return t_function_facewise(f, a, b)
        if f.tag not in ("exp", "inverse"):
            raise ValueError(f"the krylov backend supports exp and inverse only, got {f.name or f.tag!r}")
        return _krylov(f, a, b, options)
    except (TensorFuncError, ValueError, np.linalg.LinAlgError) as exc:
        if isinstance(exc, DimensionError):
            raise
        raise BackendError(backend, exc) from exc


def t_function_of(f, a, backend="auto", **options):
    """``f(a)`` as a tensor: ``f(a) * I``, i.e. ``fold(f(bcirc(a)) E_1)``."""
    a = tcore.as_tensor(a)
    n, _, p = a.shape
    return t_function(f, a, tcore.identity_tensor(n, p), backend=backend, **options)


def t_exp(a, t, b, backend="auto", **options):
    """The t-exponential ``exp(a t) * b``, the solution at time `t` of ``dB/dt = a * B``."""
    a = tcore.as_tensor(a)
    if t == 0:
        _check_operands(a, b)
        return tcore.as_tensor(b).copy()
    return t_function(EXP, a * t, b, backend=backend, **options)


def t_function_eig(f, a, cond_limit=1e12):
    """``f(a)`` assembled from a tensor eigendecomposition ``a = X * D * X^-1``.

    Each diagonal tube of ``D`` is a ``1 x 1 x p`` tensor whose t-function is
    evaluated on its own; the result is ``X * f(D) * X^-1``.

    Raises
    ------
    DecompositionError
        Some Fourier face is numerically defective.
    """
    x, d, xinv = tcore.t_eig_facewise(a, cond_limit=cond_limit)
    # a 1 x 1 x p tube is diagonalized by the DFT, so f acts on its transform
    ftubes = np.fft.ifft(f(np.fft.fft(tcore.tubes(d), axis=1)), axis=1)
    return tcore.t_product(tcore.t_product(x, tcore.fdiagonal(ftubes)), xinv)
