"""The t-exponential solves a tensor-valued linear ODE.

For dB/dt = A * B with B(0) = B0 the solution is B(t) = exp(A t) * B0.
We check that numerically and use it to integrate a small system.
"""

import numpy as np

from tensorfunc import tcore
from tensorfunc.tfunc import t_exp

rng = np.random.default_rng(1)
a = rng.standard_normal((3, 3, 4)) / 2
b0 = rng.standard_normal((3, 2, 4))

# %% derivative check by central differences
h = 1e-5
for t in (0.1, 0.5, 1.0):
    deriv = (t_exp(a, t + h, b0) - t_exp(a, t - h, b0)) / (2 * h)
    exact = tcore.t_product(a, t_exp(a, t, b0))
    err = np.linalg.norm(deriv - exact) / np.linalg.norm(exact)
    print(f"t = {t:.1f}: |dB/dt - A*B| / |A*B| = {err:.1e}")

# %% semigroup: stepping twice by t/2 equals one step of t
whole = t_exp(a, 1.0, b0)
halves = t_exp(a, 0.5, t_exp(a, 0.5, b0))
print("exp(A) * B0 == exp(A/2) * exp(A/2) * B0:", np.allclose(whole, halves))

# %% trajectory of the norm, compared with a crude explicit Euler integration
steps = 2000
dt = 1.0 / steps
y = b0.astype(complex)
for _ in range(steps):
    y = y + dt * tcore.t_product(a, y)
print(f"|B(1)| exact {np.linalg.norm(whole):.6f}, Euler with {steps} steps {np.linalg.norm(y):.6f}")
