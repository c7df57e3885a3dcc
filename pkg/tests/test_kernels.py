import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clustercurve import _pykernels, kernels

try:
    from clustercurve import _ckernels
except ImportError:
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")

coord = st.floats(min_value=-1e8, max_value=1e8, allow_nan=False)
clouds = st.lists(st.builds(complex, coord, coord), min_size=1, max_size=40).map(np.array)


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


@needs_ext
@settings(max_examples=60)
@given(clouds, clouds)
def test_hausdorff_backends_agree(a, b):
    a = np.concatenate([a, [complex(np.inf, 0)]]) if len(a) % 3 == 0 else a
    assert _ckernels.directed_hausdorff(a, b) == pytest.approx(_pykernels.directed_hausdorff(a, b), abs=1e-14)
    assert _ckernels.diameter(a) == pytest.approx(_pykernels.diameter(a), abs=1e-14)


@needs_ext
@settings(max_examples=40)
@given(st.lists(st.builds(complex, coord, coord), min_size=1, max_size=60),
       st.lists(st.floats(-1, 1), min_size=1, max_size=30))
def test_chebval_backends_agree(c, x):
    c = np.array(c) / 1e8
    x = np.array(x)
    ref = np.polynomial.chebyshev.chebval(x, c)
    assert np.allclose(_ckernels.chebval(c, x), ref, atol=1e-12)
    assert np.allclose(_pykernels.chebval(c, x), ref, atol=1e-12)


def test_infinity_in_clouds():
    a = np.array([complex(np.inf, 0)])
    b = np.array([0j])
    assert kernels.hausdorff(a, b) == pytest.approx(2.0)
    assert kernels.hausdorff(a, a) == 0.0


def test_read_only_inputs():
    c = np.array([1 + 2j, 0.5 - 1j, 0.25j])
    x = np.linspace(-1, 1, 7)
    c.setflags(write=False)
    x.setflags(write=False)
    expected = np.polynomial.chebyshev.chebval(x, c)
    assert np.allclose(kernels.chebval(c, x), expected, rtol=0, atol=1e-15)
    assert kernels.diameter(c) >= 0


def test_pure_python_fallback_selected(tmp_path):
    import os
    import subprocess
    import sys

    env = dict(os.environ, CLUSTERCURVE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import clustercurve; print(clustercurve.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
