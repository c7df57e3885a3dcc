import pytest

from clustercurve import continuum as cn
from clustercurve.curve import build_polygonal
from clustercurve.sequence import build_double_sequence
from clustercurve.smoothing import smooth_curve

CRITERIA = {}


def record(number, passed, detail):
    """Remember one acceptance line; printed in the terminal summary."""
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    CRITERIA[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[k])


@pytest.fixture(scope="session")
def seg_circle_128():
    """The (segment(0,1), circle(0,1)) pipeline at N = 128 up to the smooth curve."""
    kminus, kplus = cn.Segment(0j, 1 + 0j), cn.Circle(0j, 1.0)
    seq = build_double_sequence(kminus, kplus, 128, 0)
    eta, markers = build_polygonal(seq)
    return kminus, kplus, seq, eta, markers, smooth_curve(eta)
