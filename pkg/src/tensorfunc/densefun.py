"""Dense matrix functions for small and medium matrices.

:func:`expm` is a scaling-and-squaring Padé exponential and :func:`funm` a
Schur-Parlett evaluator for general analytic scalar functions.  The two are
deliberately independent so that each can serve as an oracle for the other.
:func:`matrix_function` is the dispatcher the Krylov and tensor code calls.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .errors import DimensionError, MatrixFunctionError

__all__ = [
    "ScalarFunction",
    "EXP",
    "INVERSE",
    "SQRT",
    "IDENTITY",
    "polynomial",
    "generic",
    "expm",
    "funm",
    "matrix_function",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ScalarFunction:
    """A scalar function ``f`` together with what is known about it.

    Parameters
    ----------
    tag : {"exp", "inverse", "sqrt", "generic"}
        Identifies functions with dedicated algorithms.
    func : callable
        Vectorized ``complex -> complex`` evaluator.
    derivative : callable, optional
        ``derivative(z, k)`` returning the k-th derivative.  Only needed when
        eigenvalues cluster; if absent, Taylor coefficients are recovered by
        a trapezoidal Cauchy integral on a circle of radius `radius`.
    radius : float
        Radius of that circle; must stay inside the region of analyticity.
    """

    tag: str
    func: Callable
    derivative: Optional[Callable] = None
    radius: float = 1.0
    name: str = field(default="", compare=False)

    def __call__(self, z):
        return self.func(z)

    def taylor_coefficients(self, center, count):
        """``f^(k)(center) / k!`` for ``k = 0 .. count-1``."""
        if self.derivative is not None:
            return np.array(
                [self.derivative(center, k) / math.factorial(k) for k in range(count)],
                dtype=np.complex128,
            )
        nodes = max(64, 2 * count)
        theta = 2 * np.pi * np.arange(nodes) / nodes
        values = np.asarray(self.func(center + self.radius * np.exp(1j * theta)))
        coeffs = np.fft.fft(values)[:count] / nodes
        return coeffs / self.radius ** np.arange(count)


def _sqrt_derivative(z, k):
    c = 1.0
    for j in range(k):
        c *= 0.5 - j
    return c * np.sqrt(z) / z**k if k else np.sqrt(z)


EXP = ScalarFunction("exp", np.exp, lambda z, k: np.exp(z), name="exp")
INVERSE = ScalarFunction(
    "inverse",
    lambda z: 1.0 / np.asarray(z, dtype=np.complex128),
    lambda z, k: (-1) ** k * math.factorial(k) / z ** (k + 1),
    name="inverse",
)
SQRT = ScalarFunction(
    "sqrt", lambda z: np.sqrt(np.asarray(z, dtype=np.complex128)), _sqrt_derivative, name="sqrt"
)


def polynomial(coeffs):
    """A polynomial ``sum_j coeffs[j] z**j`` (ascending order) with exact derivatives."""
    poly = np.polynomial.Polynomial(np.asarray(coeffs, dtype=np.complex128))

    def derivative(z, k):
        return poly.deriv(k)(z) if k else poly(z)

    return ScalarFunction("generic", poly, derivative, name=f"poly{list(coeffs)}")


IDENTITY = polynomial([0.0, 1.0])


def generic(func, derivative=None, radius=1.0, name=""):
    """Wrap a user-supplied analytic function."""
    return ScalarFunction("generic", func, derivative, radius, name or getattr(func, "__name__", ""))


def _square(m):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


# ---------------------------------------------------------------------------
# exponential


def _pade_coefficients(degree):
    return [
        math.factorial(2 * degree - j)
        * math.factorial(degree)
        / (math.factorial(2 * degree) * math.factorial(j) * math.factorial(degree - j))
        for j in range(degree + 1)
    ]


# largest 1-norm for which each diagonal Padé degree is accurate to unit roundoff
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}
_PADE = {d: _pade_coefficients(d) for d in _THETA}


def _pade_low(a, degree):
    b = _PADE[degree]
    eye = np.eye(a.shape[0], dtype=a.dtype)
    a2 = a @ a
    powers = [eye, a2]
    for _ in range(2, degree // 2 + 1):
        powers.append(powers[-1] @ a2)
    u = a @ sum(b[2 * i + 1] * powers[i] for i in range(degree // 2 + 1))
    v = sum(b[2 * i] * powers[i] for i in range(degree // 2 + 1))
    return u, v


def _pade13(a):
    b = _PADE[13]
    eye = np.eye(a.shape[0], dtype=a.dtype)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * eye)
    v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * eye
    return u, v


def expm(m):
    """Matrix exponential by scaling and squaring with a diagonal Padé approximant.

    The Padé degree (3, 5, 7, 9 or 13) and the number of squarings are chosen
    from the 1-norm of `m` so that the truncation error stays at unit roundoff.
    """
    a = _square(m)
    a = a.astype(np.complex128 if np.iscomplexobj(a) else np.float64)
    if a.shape[0] == 0:
        return a.copy()
    norm1 = np.linalg.norm(a, 1)
    if not np.isfinite(norm1):
        raise MatrixFunctionError("matrix has non-finite entries")
    squarings = 0
    for degree in (3, 5, 7, 9):
        if norm1 <= _THETA[degree]:
            u, v = _pade_low(a, degree)
            break
    else:
        squarings = max(0, math.ceil(math.log2(norm1 / _THETA[13])))
        u, v = _pade13(a / 2.0**squarings)
    r = np.linalg.solve(v - u, v + u)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(squarings):
            r = r @ r
    if not np.all(np.isfinite(r)):
        raise MatrixFunctionError(f"exponential overflows (||M||_1 = {norm1:.3e})")
    return r


# ---------------------------------------------------------------------------
# Schur-Parlett


def _clusters(eigs, delta):
    """Label eigenvalues so that chains of neighbours within `delta` share a label."""
    n = len(eigs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    close = np.abs(eigs[:, None] - eigs[None, :]) <= delta
    for i, j in zip(*np.nonzero(np.triu(close, 1))):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri
    roots = [find(i) for i in range(n)]
    relabel = {}
    return np.array([relabel.setdefault(r, len(relabel)) for r in roots])


def _swap(t, q, k):
    """Exchange diagonal entries k and k+1 of the triangular `t` in place."""
    a, c, b = t[k, k], t[k + 1, k + 1], t[k, k + 1]
    x = np.array([b, c - a])
    nx = np.linalg.norm(x)
    if nx == 0:
        return
    x1, x2 = x / nx
    g = np.array([[x1, -np.conj(x2)], [x2, np.conj(x1)]])
    t[:, k:k + 2] = t[:, k:k + 2] @ g
    t[k:k + 2, :] = g.conj().T @ t[k:k + 2, :]
    q[:, k:k + 2] = q[:, k:k + 2] @ g
    t[k + 1, k] = 0.0


def _group_clusters(t, q, labels):
    """Reorder the Schur form so each cluster occupies a contiguous block."""
    n = len(labels)
    positions = {}
    for i, lab in enumerate(labels):
        positions.setdefault(lab, []).append(i)
    rank = {lab: np.mean(pos) for lab, pos in positions.items()}
    key = np.array([rank[lab] for lab in labels])
    labels = labels.copy()
    # bubble sort by mean position; only adjacent swaps are allowed
    for end in range(n - 1, 0, -1):
        swapped = False
        for k in range(end):
            if key[k] > key[k + 1]:
                _swap(t, q, k)
                key[k], key[k + 1] = key[k + 1], key[k]
                labels[k], labels[k + 1] = labels[k + 1], labels[k]
                swapped = True
        if not swapped:
            break
    bounds = [0] + [i for i in range(1, n) if labels[i] != labels[i - 1]] + [n]
    return [slice(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]


def _taylor_block(f, tb, max_terms):
    size = tb.shape[0]
    if size == 1:
        return np.atleast_2d(f(tb[0, 0]))
    sigma = np.mean(np.diag(tb))
    m = tb - sigma * np.eye(size)
    coeffs = f.taylor_coefficients(sigma, max_terms)
    result = coeffs[0] * np.eye(size, dtype=np.complex128)
    power = np.eye(size, dtype=np.complex128)
    small = 0
    for k in range(1, max_terms):
        power = power @ m
        term = coeffs[k] * power
        result = result + term
        if np.linalg.norm(term, 1) <= _EPS * np.linalg.norm(result, 1):
            small += 1
            if small == 2:
                break
        else:
            small = 0
    return result


def funm(f, m, delta=0.1, max_terms=25):
    """Evaluate ``f(M)`` with the blocked Schur-Parlett algorithm.

    Eigenvalues are grouped into clusters (chains of neighbours closer than
    `delta`), the complex Schur form is reordered so clusters are contiguous,
    diagonal blocks are evaluated by a Taylor series about the cluster mean
    and the off-diagonal blocks follow from the block Parlett recurrence.

    Parameters
    ----------
    f : ScalarFunction
    m : (n, n) array_like
    delta : float
        Absolute clustering tolerance.
    max_terms : int
        Cap on the Taylor series length inside a cluster.

    Returns
    -------
    ndarray
        ``f(M)``; real if `m` is real and the result is real to roundoff.
    """
    a = _square(m)
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    if not np.all(np.isfinite(a)):
        raise MatrixFunctionError("matrix has non-finite entries")
    t, q = scipy.linalg.schur(a.astype(np.complex128), output="complex")
    eigs = np.diag(t)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        fvals = np.asarray(f(eigs), dtype=np.complex128)
    if not np.all(np.isfinite(fvals)):
        bad = eigs[~np.isfinite(fvals)][0]
        raise MatrixFunctionError(f"function is not defined at eigenvalue {bad:.6g}")

    labels = _clusters(eigs, delta)
    blocks = _group_clusters(t, q, labels)

    fmat = np.zeros_like(t)
    for j, bj in enumerate(blocks):
        fmat[bj, bj] = _taylor_block(f, t[bj, bj], max_terms)
        for i in range(j - 1, -1, -1):
            bi = blocks[i]
            tij = t[bi, bj]
            rhs = fmat[bi, bi] @ tij - tij @ fmat[bj, bj]
            if j - i > 1:
                mid = slice(bi.stop, bj.start)
                rhs = rhs + fmat[bi, mid] @ t[mid, bj] - t[bi, mid] @ fmat[mid, bj]
            tii, tjj = t[bi, bi], t[bj, bj]
            if tii.shape == (1, 1) and tjj.shape == (1, 1):
                fmat[bi, bj] = rhs / (tii[0, 0] - tjj[0, 0])
            else:
                fmat[bi, bj] = scipy.linalg.solve_sylvester(tii, -tjj, rhs)
    result = q @ fmat @ q.conj().T
    if not np.all(np.isfinite(result)):
        raise MatrixFunctionError("Schur-Parlett produced non-finite entries")
    if not np.iscomplexobj(a) and np.max(np.abs(result.imag), initial=0.0) <= 1e-12 * max(
        np.linalg.norm(result, 1), 1e-300
    ):
        return result.real.copy()
    return result


def matrix_function(f, m):
    """``f(M)`` using the best available dense algorithm for `f`.

    The exponential goes through :func:`expm`, the inverse through an LU
    solve, everything else through :func:`funm`.
    """
    a = _square(m)
    if f.tag == "exp":
        return expm(a)
    if f.tag == "inverse":
        eye = np.eye(a.shape[0], dtype=np.result_type(a, np.float64))
        if a.shape[0] and np.linalg.cond(a) > 1 / _EPS:
            raise MatrixFunctionError("matrix is singular to working precision")
        return np.linalg.solve(a, eye)
    return funm(f, a)
