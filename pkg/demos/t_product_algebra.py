"""Third-order tensors as block circulant matrices.

A tensor of shape (n1, n2, p) is a stack of p frontal faces.  The t-product
multiplies two tensors by multiplying their block circulant matrices, and
the FFT along the tubes turns that into p independent face products.
"""

import numpy as np

from tensorfunc import tcore

rng = np.random.default_rng(0)

# %% unfold stacks the faces, bcirc cycles them
a = np.arange(12.0).reshape(2, 2, 3)
print("unfold(a):\n", tcore.unfold(a).real)
print("bcirc(a):\n", tcore.bcirc(a).real)

# %% the t-product is bcirc(a) @ unfold(b), folded back
b = rng.standard_normal((2, 4, 3))
ab = tcore.t_product(a, b)
print("t-product shape:", ab.shape)
print("same as fold(bcirc(a) unfold(b)):",
      np.allclose(ab, tcore.fold(tcore.bcirc(a) @ tcore.unfold(b), 3)))

# %% bcirc is multiplicative, so tensor algebra inherits matrix algebra
c = rng.standard_normal((4, 3, 3))
print("bcirc(a*b*c) == bcirc(a) bcirc(b) bcirc(c):",
      np.allclose(tcore.bcirc(tcore.t_product(ab, c)), tcore.bcirc(a) @ tcore.bcirc(b) @ tcore.bcirc(c)))

# identity and transpose
eye = tcore.identity_tensor(2, 3)
print("I * a == a:", np.allclose(tcore.t_product(eye, a), a))
at = tcore.t_transpose(a)
print("bcirc(a^T) == bcirc(a)^*:", np.allclose(tcore.bcirc(at), tcore.bcirc(a).conj().T))

# %% f-diagonal tensors: the spectrum of bcirc is the union of circulant spectra
d = rng.standard_normal((3, 4))
dd = tcore.fdiagonal(d)
# round before sorting so conjugate pairs do not swap places
eig_bcirc = np.sort_complex(np.round(np.linalg.eigvals(tcore.bcirc(dd)), 10))
eig_tubes = np.sort_complex(np.round(np.concatenate([np.fft.fft(d[i]) for i in range(3)]), 10))
print("spectrum of bcirc(D) == union of DFTs of the tubes:",
      np.allclose(eig_bcirc, eig_tubes))
