"""Communicability and centrality in third-order networks.

A third-order network is a stack of ``p`` undirected, unweighted graphs on
the same ``n`` nodes (layers of a multilayer network, or snapshots of a
temporal one).  Its adjacency tensor has the adjacency matrices as frontal
faces.  With ``E = exp(A)`` the t-exponential,

* the communicability of the triple ``(i, j, k)`` is ``E[i, j, k]``;
* the centrality of node ``i`` is ``E[i, i, 0]``.
"""

from dataclasses import dataclass

import numpy as np

from . import tcore
from .densefun import EXP
from .errors import AdjacencyError
from .tfunc import t_function_of

__all__ = [
    "LAYER_KINDS",
    "AdjacencyTensor",
    "random_network_tensor",
    "communicability",
    "communicability_tensor",
    "centrality",
    "centralities",
    "rank_nodes",
]

LAYER_KINDS = ("multilayer", "temporal")


@dataclass(frozen=True)
class AdjacencyTensor:
    """Validated ``(n, n, p)`` adjacency tensor.

    Every frontal face must be symmetric, binary and have a zero diagonal.
    Violations raise :class:`AdjacencyError` naming one offending
    ``(i, j, k)`` (zero-based).
    """

    tensor: np.ndarray
    layers: str = "multilayer"

    def __post_init__(self):
        raw = np.asarray(self.tensor)
        if raw.ndim != 3 or raw.shape[0] != raw.shape[1]:
            raise AdjacencyError(f"adjacency tensor must have shape (n, n, p), got {raw.shape}")
        if self.layers not in LAYER_KINDS:
            raise AdjacencyError(f"layer semantics must be one of {LAYER_KINDS}, got {self.layers!r}")
        if np.iscomplexobj(raw):
            bad = np.argwhere(raw.imag != 0)
            if len(bad):
                raise AdjacencyError("entries must be real", tuple(int(v) for v in bad[0]))
            raw = raw.real
        bad = np.argwhere((raw != 0) & (raw != 1))
        if len(bad):
            raise AdjacencyError("entries must be 0 or 1", tuple(int(v) for v in bad[0]))
        diag = np.argwhere(np.diagonal(raw, axis1=0, axis2=1) != 0)  # rows are (k, i)
        if len(diag):
            k, i = (int(v) for v in diag[0])
            raise AdjacencyError("self loops are not allowed", (i, i, k))
        bad = np.argwhere(raw != raw.transpose(1, 0, 2))
        if len(bad):
            raise AdjacencyError("faces must be symmetric", tuple(int(v) for v in bad[0]))
        object.__setattr__(self, "tensor", raw.astype(np.float64))

    @property
    def n(self):
        return self.tensor.shape[0]

    @property
    def p(self):
        return self.tensor.shape[2]

    def edges(self):
        """Edge count per face."""
        return (self.tensor.sum(axis=(0, 1)) // 2).astype(int)


def random_network_tensor(n, p, density, seed=None, layers="multilayer"):
    """Stack of ``p`` independent Erdos-Renyi graphs on ``n`` nodes.

    Each possible edge of each face is present with probability `density`.
    The same `seed` always gives the same tensor.
    """
    if n < 2:
        raise ValueError("a network needs at least two nodes")
    if p < 1:
        raise ValueError("p must be positive")
    if not 0 < density < 1:
        raise ValueError(f"density must lie in (0, 1), got {density}")
    rng = np.random.default_rng(seed)
    a = np.zeros((n, n, p))
    for k in range(p):
        upper = np.triu(rng.random((n, n)) < density, 1)
        a[:, :, k] = upper + upper.T
    return AdjacencyTensor(a, layers)


def _tensor(a):
    return a if isinstance(a, AdjacencyTensor) else AdjacencyTensor(a)


def communicability_tensor(a, backend="auto", **options):
    """The real tensor ``exp(A)``; every communicability is one entry of it."""
    a = _tensor(a)
    return tcore.cast_real(t_function_of(EXP, a.tensor, backend=backend, **options))


def _check_index(name, value, size):
    if not 0 <= value < size:
        raise IndexError(f"{name}={value} out of range [0, {size})")


def communicability(a, i, j, k, backend="auto", **options):
    """Communicability ``exp(A)[i, j, k]`` of nodes `i`, `j` in face `k`."""
    a = _tensor(a)
    _check_index("i", i, a.n)
    _check_index("j", j, a.n)
    _check_index("k", k, a.p)
    return float(communicability_tensor(a, backend, **options)[i, j, k])


def centrality(a, i, backend="auto", **options):
    """Centrality ``exp(A)[i, i, 0]`` of node `i`."""
    a = _tensor(a)
    _check_index("i", i, a.n)
    return float(communicability_tensor(a, backend, **options)[i, i, 0])


def centralities(a, backend="auto", **options):
    """Centralities of all nodes from a single t-exponential."""
    e = communicability_tensor(a, backend, **options)
    return np.diagonal(e[:, :, 0]).copy()


def rank_nodes(values):
    """Node indices by decreasing value, ties broken by ascending index."""
    values = np.asarray(values)
    return np.lexsort((np.arange(len(values)), -values))
