"""Block inner products, scaling quotients and the block Arnoldi process.

Two paradigms are supported:

``classical``
    ``<<X, Y>> = X^* Y`` (all ``s x s`` matrices) with ``N(X) = R`` from a
    thin QR factorization ``X = Q R``.
``global``
    ``<<X, Y>> = trace(X^* Y) / s * I_s`` with ``N(X) = ||X||_F / sqrt(s) * I_s``.

In the global paradigm every coefficient is a multiple of ``I_s`` and is
stored as that scalar; the "coefficient width" is 1 instead of ``s``.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BreakdownError, DimensionError

__all__ = [
    "InnerProductScheme",
    "CLASSICAL",
    "GLOBAL",
    "as_scheme",
    "ip",
    "normalize",
    "BlockArnoldiDecomposition",
    "block_arnoldi",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class InnerProductScheme:
    kind: str

    def __post_init__(self):
        if self.kind not in ("classical", "global"):
            raise ValueError(f"unknown inner product scheme {self.kind!r}")

    @property
    def is_global(self):
        return self.kind == "global"

    def width(self, s):
        """Size of one stored coefficient block for block width `s`."""
        return 1 if self.is_global else s

    def coefficient(self, x, y):
        """``<<x, y>>`` in compact form (scalar as a 1x1 array for global)."""
        if self.is_global:
            return np.array([[np.vdot(x, y) / x.shape[1]]])
        return x.conj().T @ y

    def quotient(self, x):
        """Return ``(q, N(x))`` in compact form, or raise on breakdown."""
        s = x.shape[1]
        fro = np.linalg.norm(x)
        if fro == 0.0:
            raise BreakdownError("block vector vanished")
        if self.is_global:
            beta = fro / np.sqrt(s)
            return x / beta, np.array([[beta]], dtype=np.complex128)
        q, r = np.linalg.qr(x)
        sv = np.linalg.svd(r, compute_uv=False)
        if sv[-1] <= s * _EPS * sv[0]:
            raise BreakdownError(
                f"block vector is rank deficient (sigma_min/sigma_max = {sv[-1] / sv[0]:.2e})"
            )
        d = np.diag(r)
        phase = np.where(d == 0, 1.0, d / np.abs(d))
        return q * phase, phase.conj()[:, None] * r

    def expand(self, c, s):
        """Full ``s x s`` matrix of a compact coefficient."""
        return c[0, 0] * np.eye(s) if self.is_global else c


CLASSICAL = InnerProductScheme("classical")
GLOBAL = InnerProductScheme("global")


def as_scheme(scheme):
    if isinstance(scheme, InnerProductScheme):
        return scheme
    return InnerProductScheme(str(scheme))


def _check_pair(x, y):
    if x.ndim != 2 or x.shape != y.shape:
        raise DimensionError(f"block vectors {x.shape} and {y.shape} are not conformal")


def ip(scheme, x, y):
    """The block inner product ``<<x, y>>`` as a full ``s x s`` matrix."""
    scheme = as_scheme(scheme)
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    _check_pair(x, y)
    return scheme.expand(scheme.coefficient(x, y), x.shape[1])


def normalize(scheme, x):
    """Split ``x = q @ N(x)`` with ``<<q, q>> = I``.

    For the classical scheme ``N(x)`` is upper triangular with a nonnegative
    real diagonal.  Raises :class:`BreakdownError` if `x` is zero or
    (classical) numerically rank deficient.
    """
    scheme = as_scheme(scheme)
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2:
        raise DimensionError(f"block vector must be 2-D, got ndim={x.ndim}")
    q, c = scheme.quotient(x)
    return q, scheme.expand(c, x.shape[1])


@dataclass(frozen=True)
class BlockArnoldiDecomposition:
    """Result of :func:`block_arnoldi`.

    Attributes
    ----------
    basis : ndarray, shape (steps + 1, n p, s)
        ``V_1 .. V_{steps+1}``; the last block is zero after a breakdown.
    hessenberg : ndarray, shape ((steps + 1) c, steps c)
        The block upper Hessenberg matrix including the trailing block
        ``H_{steps+1, steps}``, in compact form (``c = 1`` for global).
    normalization : ndarray, shape (c, c)
        ``B = N(b)`` in compact form.
    scheme : InnerProductScheme
    breakdown : bool
        True if the Krylov space became invariant at the last step.
    """

    basis: np.ndarray
    hessenberg: np.ndarray
    normalization: np.ndarray
    scheme: InnerProductScheme
    breakdown: bool = False

    @property
    def steps(self):
        return self.basis.shape[0] - 1

    @property
    def block_width(self):
        return self.basis.shape[2]

    @property
    def width(self):
        return self.scheme.width(self.block_width)

    @property
    def H(self):
        """Square part ``H_m`` (compact form)."""
        c = self.width
        return self.hessenberg[: self.steps * c]

    @property
    def tail(self):
        """``H_{m+1, m}`` (compact form)."""
        c = self.width
        return self.hessenberg[self.steps * c:, (self.steps - 1) * c:]

    def full_hessenberg(self):
        """``H_m`` with global coefficients expanded to ``H kron I_s``."""
        if self.scheme.is_global:
            return np.kron(self.H, np.eye(self.block_width))
        return self.H

    def basis_matrix(self, count=None):
        """``[V_1 | ... | V_count]`` as an ``(n p, count s)`` matrix."""
        count = self.steps if count is None else count
        v = self.basis[:count]
        return v.transpose(1, 0, 2).reshape(v.shape[1], count * v.shape[2])

    def combine(self, coeffs):
        """``sum_j V_j @ C_j`` for stacked compact coefficients ``C`` of shape (steps c, c')."""
        coeffs = np.asarray(coeffs)
        if self.scheme.is_global:
            return np.tensordot(coeffs[:, 0], self.basis[: self.steps], axes=1)
        return self.basis_matrix() @ coeffs

    def orthonormality_error(self):
        """``max_{i, j} ||<<V_i, V_j>> - delta_ij I||_F`` over nonzero blocks."""
        count = self.steps if self.breakdown else self.steps + 1
        s = self.block_width
        worst = 0.0
        for i in range(count):
            for j in range(i, count):
                g = ip(self.scheme, self.basis[i], self.basis[j])
                if i == j:
                    g = g - np.eye(s)
                worst = max(worst, np.linalg.norm(g))
        return worst

    def relation_residual(self, apply_A):
        """Frobenius norm of ``A V_m - V_m H_m - V_{m+1} H_{m+1,m} E_m^*``."""
        s, m = self.block_width, self.steps
        vm = self.basis_matrix()
        av = np.concatenate([apply_A(self.basis[j]) for j in range(m)], axis=1)
        res = av - vm @ self.full_hessenberg()
        res[:, (m - 1) * s:] -= self.basis[m] @ self.scheme.expand(self.tail, s)
        return np.linalg.norm(res)


def block_arnoldi(apply_A: Callable, b, scheme, m, reorthogonalize=True, breakdown_tol=None):
    """Run `m` steps of block Arnoldi on ``A`` starting from the block vector `b`.

    Orthogonalization is modified block Gram-Schmidt, repeated once when
    `reorthogonalize` is set.  If a new block vanishes relative to
    ``||A V_k||_F`` the space is invariant: the decomposition is returned
    truncated at that step with ``breakdown=True`` and a zero trailing block.

    Parameters
    ----------
    apply_A : callable
        Maps an ``(n p, s)`` block vector to ``A @ V``.
    b : (n p, s) array_like
    scheme : InnerProductScheme or {"classical", "global"}
    m : int
        Number of steps; ``m * s`` may not exceed ``n p``.
    breakdown_tol : float, optional
        Relative threshold for an invariant subspace; default ``100 s eps``.

    Raises
    ------
    BreakdownError
        `b` is unusable, or (classical) a new block is rank deficient
        without vanishing.
    """
    scheme = as_scheme(scheme)
    b = np.asarray(b, dtype=np.complex128)
    if b.ndim != 2:
        raise DimensionError(f"block vector must be 2-D, got ndim={b.ndim}")
    rows, s = b.shape
    if m < 1:
        raise ValueError("m must be at least 1")
    if m * s > rows:
        raise DimensionError(f"m * s = {m * s} exceeds the dimension {rows}")
    if breakdown_tol is None:
        breakdown_tol = 100 * s * _EPS
    c = scheme.width(s)

    try:
        v1, bnorm = scheme.quotient(b)
    except BreakdownError as exc:
        raise BreakdownError(exc.reason, step=0) from None

    basis = np.zeros((m + 1, rows, s), dtype=np.complex128)
    hess = np.zeros(((m + 1) * c, m * c), dtype=np.complex128)
    basis[0] = v1
    passes = 2 if reorthogonalize else 1
    for k in range(m):
        w = np.asarray(apply_A(basis[k]), dtype=np.complex128)
        if w.shape != (rows, s):
            raise DimensionError(f"operator returned shape {w.shape}, expected {(rows, s)}")
        scale = np.linalg.norm(w)
        for _ in range(passes):
            for j in range(k + 1):
                h = scheme.coefficient(basis[j], w)
                w = w - (basis[j] * h[0, 0] if scheme.is_global else basis[j] @ h)
                hess[j * c:(j + 1) * c, k * c:(k + 1) * c] += h
        if np.linalg.norm(w) <= breakdown_tol * scale:
            return BlockArnoldiDecomposition(
                basis[: k + 2].copy(), hess[: (k + 2) * c, : (k + 1) * c].copy(), bnorm, scheme, True
            )
        try:
            basis[k + 1], hess[(k + 1) * c:(k + 2) * c, k * c:(k + 1) * c] = scheme.quotient(w)
        except BreakdownError as exc:
            raise BreakdownError(exc.reason, step=k + 1) from None
    return BlockArnoldiDecomposition(basis, hess, bnorm, scheme, False)
