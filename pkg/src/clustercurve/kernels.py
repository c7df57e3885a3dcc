"""Hot loops, dispatched to the Cython extension when it is built.

Set ``CLUSTERCURVE_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("CLUSTERCURVE_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # extension not compiled
        _impl = _pykernels


def _carray(z):
    return np.ascontiguousarray(np.asarray(z, dtype=np.complex128).ravel())


def directed_hausdorff(a, b):
    """max_{x in a} min_{y in b} chordal(x, y); infinity encoded as inf."""
    return _impl.directed_hausdorff(_carray(a), _carray(b))


def hausdorff(a, b):
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def diameter(a):
    return _impl.diameter(_carray(a))


def chebval(c, x):
    """Evaluate sum c_k T_k(x) for complex coefficients at real x."""
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64).ravel())
    return _impl.chebval(_carray(c), x)


def chordal_embed(z):
    return _pykernels.embed(_carray(z))
