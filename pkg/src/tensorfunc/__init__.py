"""Functions of third-order tensors under the t-product.

Core entry points::

    from tensorfunc import t_function, t_exp, EXP
    y = t_function(EXP, a, b)          # exp(A) * B
    y = t_exp(a, 0.5, b)               # exp(0.5 A) * B

See the submodules for the algebra (:mod:`tcore`), dense matrix functions
(:mod:`densefun`), the Fourier-domain method (:mod:`spectral`), block Krylov
machinery (:mod:`blockkrylov`, :mod:`bfomfom`) and network measures
(:mod:`netcomm`).
"""

from . import bfomfom, blockkrylov, densefun, errors, netcomm, spectral, tcore, tfunc, tns
from .bfomfom import restarted_bfomfom, bfomfom_single
from .blockkrylov import CLASSICAL, GLOBAL, block_arnoldi
from .densefun import EXP, IDENTITY, INVERSE, SQRT, expm, funm, generic, matrix_function, polynomial
from .errors import *  # noqa: F401,F403
from .netcomm import AdjacencyTensor, centralities, centrality, communicability, random_network_tensor
from .tcore import bcirc, fold, identity_tensor, t_inverse, t_product, t_transpose, unfold
from .tfunc import t_exp, t_function, t_function_eig, t_function_of
from .tns import load_tensor, save_tensor

__version__ = "0.1.0"
