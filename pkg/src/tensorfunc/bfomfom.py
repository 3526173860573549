"""Block FOM for functions of matrices, with and without restarts.

The single-cycle approximation is ``F_m = V_m f(H_m) E_1 B``.  Restarts use
the Cauchy integral form ``f(A) = int g(t) (tI - A)^{-1} dt``: after cycle
``k`` the error of the shifted block FOM systems is ``V_{m+1} C_k(t)`` with

    C_k(t) = H^{(k)}_{m+1,m} E_m^* (tI - H^{(k)})^{-1} E_1 B^{(k)} C_{k-1}(t),
    C_0(t) = I,

where ``B^{(1)} = N(b)`` and later cycles start from the already normalized
``V_{m+1}``.  The next cycle's Arnoldi basis gives the update

    Delta_k = V^{(k+1)} int g(t) (tI - H^{(k+1)})^{-1} E_1 B^{(k+1)} C_k(t) dt.

For the inverse the integral collapses to the single pole ``t = 0``.  For
the exponential it is taken over a left-opening parabola, discretized by
the midpoint rule with an adaptively doubled node count.  The parabola is
either fixed after the first cycle or rebuilt whenever a later Hessenberg
eigenvalue comes too close to it (see :func:`restarted_bfomfom`).
"""

import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.linalg

from .blockkrylov import as_scheme, block_arnoldi
from .densefun import matrix_function
from .errors import NonConvergenceError, QuadratureSaturationError

__all__ = [
    "QuadratureRule",
    "ParabolicContour",
    "CycleRecord",
    "ConvergenceHistory",
    "bfomfom_single",
    "restarted_bfomfom",
]

# e^{-45} ~ 3e-20: contour truncation point relative to the vertex value
_TRUNCATION_EXPONENT = 45.0
_ADAPTIVE_OFFSETS = (0.5, 1.0, 1.5, 2.0, 3.0)


@dataclass(frozen=True)
class QuadratureRule:
    """Discrete measure with ``int g(t) h(t) dt ~= sum_j weights[j] h(nodes[j])``."""

    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.nodes)


_INVERSE_RULE = QuadratureRule(np.zeros(1, dtype=np.complex128), -np.ones(1, dtype=np.complex128))


def _strip_distance(vertex, width, eigenvalues):
    """Distance of each pole from the real ``theta`` axis (negative if not enclosed).

    ``t(theta) = z`` has two roots summing to ``i``; the enclosed points are
    those whose roots both lie in ``0 < Im(theta) < 1``.
    """
    u = (vertex - np.asarray(eigenvalues)) / width
    root = np.sqrt(4 * u - 1 + 0j)
    return 0.5 - 0.5 * np.abs(root.imag)


@dataclass(frozen=True)
class ParabolicContour:
    """``t(theta) = vertex + width (i theta - theta^2)``, opening to the left.

    The midpoint rule in ``theta`` converges like ``exp(-2 pi d / h)`` where
    ``d`` is the distance of the nearest pole from the real ``theta`` axis,
    so the vertex offset and the width are chosen to keep that distance
    large without letting ``exp(vertex)`` dwarf the result.
    """

    vertex: float
    width: float
    distance: float = 0.5

    @classmethod
    def enclosing(cls, eigenvalues, pad=0.1, offsets=(1.0,)):
        """Contour around `eigenvalues` with imaginary parts inflated by `pad`.

        The vertex sits ``offset`` to the right of the rightmost eigenvalue,
        with the offset taken from `offsets`; every extra unit costs a factor
        ``e`` in cancellation, which the node count estimate accounts for.
        The width is chosen to maximize the pole distance per node.
        """
        eigs = np.asarray(eigenvalues, dtype=np.complex128)
        padded = eigs.real + 1j * (1 + pad) * eigs.imag
        re_max = float(np.max(eigs.real))
        best = None
        for offset in offsets:
            vertex = re_max + offset
            for width in np.geomspace(0.05, 1e4, 80):
                d = float(np.min(_strip_distance(vertex, width, padded)))
                if d <= 0:
                    continue
                cost = np.sqrt(_TRUNCATION_EXPONENT / width) * (37.0 + offset) / d
                if best is None or cost < best[0]:
                    best = (cost, vertex, width, d)
        _, vertex, width, d = best
        return cls(vertex, float(width), d)

    def encloses(self, eigenvalues, fraction=0.5):
        """True if every eigenvalue keeps at least `fraction` of the design distance."""
        d = _strip_distance(self.vertex, self.width, eigenvalues)
        return bool(np.all(d >= fraction * self.distance))

    def rule(self, count):
        """Midpoint rule with `count` nodes for ``g(t) = exp(t) / (2 pi i)``."""
        half = np.sqrt(_TRUNCATION_EXPONENT / self.width)
        h = 2 * half / count
        theta = -half + (np.arange(count) + 0.5) * h
        nodes = self.vertex + self.width * (1j * theta - theta**2)
        dnodes = self.width * (1j - 2 * theta)
        weights = h * np.exp(nodes) * dnodes / (2j * np.pi)
        return QuadratureRule(nodes, weights)


@dataclass
class CycleRecord:
    cycle: int
    update_norm: float
    nodes: int
    wall_time: float
    true_error: Optional[float] = None


@dataclass
class ConvergenceHistory:
    """Per-cycle log of a restarted run.

    ``status`` is one of ``"running"``, ``"converged"``, ``"saturated"``
    and ``"nonconverged"``.
    """

    records: List[CycleRecord] = field(default_factory=list)
    status: str = "running"

    @property
    def cycles(self):
        return len(self.records)

    @property
    def converged(self):
        return self.status == "converged"

    @property
    def update_norms(self):
        return np.array([r.update_norm for r in self.records])

    @property
    def true_errors(self):
        return np.array([np.nan if r.true_error is None else r.true_error for r in self.records])


def _first_coefficients(f, dec):
    c = dec.width
    fh = matrix_function(f, dec.H)
    return fh[:, :c] @ dec.normalization


def bfomfom_single(f, apply_A, b, scheme, m):
    """One cycle of B(FOM)^2: ``V_m f(H_m) E_1 B``.

    If Arnoldi stops early because the Krylov space is invariant, the
    shorter decomposition is used and the result is exact.
    """
    dec = block_arnoldi(apply_A, b, as_scheme(scheme), m)
    return dec.combine(_first_coefficients(f, dec))


class _Cycle:
    """One cycle's Hessenberg matrix, factored for many shifted solves.

    A well-conditioned eigendecomposition turns every shifted solve into a
    diagonal scaling; otherwise the complex Schur form is used.  Either way
    ``q`` maps the solve coordinates back to the Krylov coordinates.
    """

    def __init__(self, dec, eig_cond_limit=1e6):
        self.dec = dec
        c = dec.width
        self.width = c
        h = dec.H.astype(np.complex128)
        rhs = np.zeros((h.shape[0], c), dtype=np.complex128)
        rhs[:c] = dec.normalization
        vals, vecs = np.linalg.eig(h)
        if np.linalg.cond(vecs) <= eig_cond_limit:
            self.t = None
            self.q = vecs
            self.rhs = np.linalg.solve(vecs, rhs)
            self.eigenvalues = vals
        else:
            self.t, self.q = scipy.linalg.schur(h, output="complex")
            self.rhs = self.q.conj().T @ rhs
            self.eigenvalues = np.diag(self.t).copy()
        self.q_last = self.q[-c:]
        self.tail = dec.tail

    def resolvent(self, nodes):
        """``(tI - H)^{-1} E_1 B`` for every node in solve coordinates, shape (N, K, c)."""
        shifts = nodes[:, None] - self.eigenvalues[None, :]
        if self.t is None:
            return self.rhs[None] / shifts[:, :, None]
        t, rhs = self.t, self.rhs
        size = t.shape[0]
        out = np.empty((len(nodes), size, rhs.shape[1]), dtype=np.complex128)
        for i in range(size - 1, -1, -1):
            acc = rhs[i] + t[i, i + 1:] @ out[:, i + 1:, :] if i < size - 1 else rhs[i]
            out[:, i, :] = acc / shifts[:, i, None]
        return out

    def residual_factor(self, z):
        """``H_{m+1,m} E_m^* (tI - H)^{-1} E_1 B`` from Schur-coordinate solves `z`."""
        return self.tail @ (self.q_last @ z)


class _ErrorIntegral:
    """Evaluates restart updates and carries ``C_k(t)`` on cached node sets."""

    def __init__(self, f, min_nodes, max_nodes, contour="fixed"):
        self.f = f
        self.adaptive = contour == "adaptive"
        self.min_nodes = min_nodes
        self.max_nodes = max_nodes
        self.cycles = []
        self.contour = None
        self.cache = {}  # node count -> (rule, depth, C values)

    def add_cycle(self, cycle):
        self.cycles.append(cycle)
        if self.f.tag != "exp":
            return
        if self.contour is None:
            offsets = _ADAPTIVE_OFFSETS if self.adaptive else (1.0,)
            self.contour = ParabolicContour.enclosing(cycle.eigenvalues, offsets=offsets)
        elif not self.contour.encloses(cycle.eigenvalues, fraction=0.5 if self.adaptive else 0.0):
            # a pole outside the parabola would silently drop out of the integral
            eigs = np.concatenate([c.eigenvalues for c in self.cycles])
            offsets = _ADAPTIVE_OFFSETS if self.adaptive else (1.0,)
            self.contour = ParabolicContour.enclosing(eigs, offsets=offsets)
            self.cache.clear()

    def _rule(self, count):
        if self.f.tag == "inverse":
            return _INVERSE_RULE
        return self.contour.rule(count)

    def _chain(self, count, depth):
        """``C_depth`` at the nodes of the `count`-point rule."""
        if count not in self.cache:
            rule = self._rule(count)
            # B enters through the first cycle's right-hand side, so C_0 = I
            c0 = np.eye(self.cycles[0].width, dtype=np.complex128)
            self.cache[count] = (rule, 0, np.broadcast_to(c0, (len(rule),) + c0.shape).copy())
        rule, have, values = self.cache[count]
        for j in range(have, depth):
            z = self.cycles[j].resolvent(rule.nodes)
            values = self.cycles[j].residual_factor(z) @ values
        self.cache[count] = (rule, depth, values)
        return rule, values

    def _estimate(self, count):
        """Compact update coefficients from the newest cycle, plus its resolvents."""
        cycle = self.cycles[-1]
        rule, chain = self._chain(count, len(self.cycles) - 1)
        z = cycle.resolvent(rule.nodes)
        count, size, c = z.shape
        weighted = (rule.weights[:, None, None] * z).transpose(1, 0, 2).reshape(size, count * c)
        coeffs = cycle.q @ (weighted @ chain.reshape(count * c, -1))
        return coeffs, z, chain

    def update(self, tol, scale):
        """Return ``(coefficients, node_count)`` of the next error update.

        Two node levels agree once their difference is below ``tol / 10``
        relative to the update or ``tol / 100`` relative to `scale`, the norm
        of the current iterate.

        Raises ``_Saturated`` when the node cap is reached without agreement.
        """
        if self.f.tag == "inverse":
            coeffs, z, chain = self._estimate(1)
            self._advance({1: (z, chain)})
            return coeffs, 1
        dec = self.cycles[-1].dec
        count = self.min_nodes
        coeffs, z, chain = self._estimate(count)
        evaluated = {count: (z, chain)}
        while 2 * count <= self.max_nodes:
            finer, z, chain = self._estimate(2 * count)
            evaluated[2 * count] = (z, chain)
            gap = np.linalg.norm(dec.combine(finer - coeffs))
            if gap <= tol / 10 * np.linalg.norm(dec.combine(finer)) or gap <= tol / 100 * scale:
                self._advance(evaluated)
                return finer, 2 * count
            coeffs = finer
            count *= 2
        raise _Saturated(count)

    def _advance(self, evaluated):
        cycle = self.cycles[-1]
        for count, (z, chain) in evaluated.items():
            rule, depth, _ = self.cache[count]
            self.cache[count] = (rule, depth + 1, cycle.residual_factor(z) @ chain)


class _Saturated(Exception):
    pass


def restarted_bfomfom(
    f,
    apply_A,
    b,
    scheme,
    m,
    tol=1e-12,
    max_cycles=50,
    reference=None,
    min_nodes=32,
    max_nodes=4096,
    contour="fixed",
):
    """Restarted B(FOM)^2 for ``f(A) @ b`` with ``f`` the exponential or the inverse.

    Each cycle runs `m` block Arnoldi steps from the previous cycle's last
    basis block and adds the error update obtained from the integral form.
    The run stops when ``||Delta_k||_F / ||F^{(k+1)}||_F <= tol``.

    Parameters
    ----------
    f : ScalarFunction
        Must have tag ``"exp"`` or ``"inverse"``.
    apply_A : callable
        ``(n p, s)`` block vector -> ``A @ V``.
    b : (n p, s) array_like
    scheme : {"classical", "global"} or InnerProductScheme
    m : int
        Restart length (Arnoldi steps per cycle).
    tol : float
    max_cycles : int
    reference : array_like, optional
        Exact ``f(A) b``; when given, the true relative error is logged per cycle.
    min_nodes, max_nodes : int
        Starting and maximal node counts of the adaptive quadrature.
    contour : {"fixed", "adaptive"}
        ``"fixed"`` (for ``exp``) builds one parabola from the first cycle's
        Hessenberg eigenvalues, vertex one unit right of the rightmost one,
        and rebuilds it only when a later eigenvalue falls outside.  Poles
        that end up close to the parabola are resolved slowly, which shows
        up as saturation or stagnation for short restarts.
        ``"adaptive"`` rebuilds the parabola around all Hessenberg
        eigenvalues seen so far whenever a new one comes too close.

    Returns
    -------
    approximation : ndarray
    history : ConvergenceHistory

    Raises
    ------
    QuadratureSaturationError
        The error update could not be resolved with `max_nodes` nodes.
    NonConvergenceError
        `max_cycles` cycles ran without meeting `tol`.

    Both exceptions carry ``approximation`` (best iterate) and ``history``.
    """
    if f.tag not in ("exp", "inverse"):
        raise ValueError(f"restarts are implemented for exp and inverse only, got {f.tag!r}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if contour not in ("fixed", "adaptive"):
        raise ValueError(f"contour must be 'fixed' or 'adaptive', got {contour!r}")
    scheme = as_scheme(scheme)
    ref_norm = None
    if reference is not None:
        reference = np.asarray(reference)
        ref_norm = np.linalg.norm(reference)

    history = ConvergenceHistory()

    def log(cycle, update_norm, nodes, started):
        err = None if reference is None else float(np.linalg.norm(approx - reference) / ref_norm)
        history.records.append(CycleRecord(cycle, float(update_norm), nodes, time.perf_counter() - started, err))

    started = time.perf_counter()
    dec = block_arnoldi(apply_A, b, scheme, m)
    approx = dec.combine(_first_coefficients(f, dec))
    log(1, 1.0, 0, started)
    if dec.breakdown:
        history.status = "converged"
        return approx, history

    integral = _ErrorIntegral(f, min_nodes, max_nodes, contour)
    integral.add_cycle(_Cycle(dec))
    for cycle in range(2, max_cycles + 1):
        started = time.perf_counter()
        dec = block_arnoldi(apply_A, dec.basis[-1], scheme, m)
        integral.add_cycle(_Cycle(dec))
        try:
            coeffs, nodes = integral.update(tol, np.linalg.norm(approx))
        except _Saturated as exc:
            history.status = "saturated"
            raise QuadratureSaturationError(
                f"cycle {cycle}: error update not resolved with {exc.args[0]} quadrature nodes "
                f"(cap {max_nodes})",
                cycle,
                approx,
                history,
            ) from None
        delta = dec.combine(coeffs)
        approx = approx + delta
        update_norm = np.linalg.norm(delta) / np.linalg.norm(approx)
        log(cycle, update_norm, nodes, started)
        if update_norm <= tol or dec.breakdown:
            history.status = "converged"
            return approx, history
    history.status = "nonconverged"
    raise NonConvergenceError(
        f"no convergence to {tol:g} within {max_cycles} cycles "
        f"(last update {history.records[-1].update_norm:.3e})",
        max_cycles,
        approx,
        history,
    )
