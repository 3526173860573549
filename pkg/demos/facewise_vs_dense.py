"""Computing f(A) * B face by face in the Fourier domain.

The DFT along the tubes block-diagonalizes bcirc(A), so f(bcirc(A)) only
needs f on p small faces.  This compares the facewise backend with the
dense reference that forms the full np x np matrix.
"""

import time

import numpy as np

from tensorfunc import tcore
from tensorfunc.densefun import EXP, INVERSE, SQRT, polynomial
from tensorfunc.tfunc import t_function, t_function_of

rng = np.random.default_rng(2)

# %% agreement on a small problem for several functions
a = rng.standard_normal((5, 5, 4)) + 5 * tcore.identity_tensor(5, 4).real
b = rng.standard_normal((5, 2, 4))
for name, f in [("exp", EXP), ("inverse", INVERSE), ("sqrt", SQRT), ("z^2 + 2z", polynomial([0, 2, 1]))]:
    dense = t_function(f, a, b, backend="dense")
    face = t_function(f, a, b, backend="facewise")
    print(f"{name:9s} relative difference {np.linalg.norm(face - dense) / np.linalg.norm(dense):.1e}")

# %% the inverse really is the t-product inverse
inv = t_function_of(INVERSE, a)
print("A^-1 * A == I:", np.allclose(tcore.t_product(inv, a), tcore.identity_tensor(5, 4)))

# %% cost: the dense route grows like (np)^3, the facewise one like p n^3
for n, p in [(10, 10), (20, 20), (30, 30)]:
    a = rng.standard_normal((n, n, p)) / n
    b = rng.standard_normal((n, 1, p))
    times = {}
    for backend in ("dense", "facewise"):
        start = time.perf_counter()
        t_function(EXP, a, b, backend=backend)
        times[backend] = time.perf_counter() - start
    print(f"n = p = {n}: dense {times['dense'] * 1e3:7.1f} ms, facewise {times['facewise'] * 1e3:6.1f} ms")
