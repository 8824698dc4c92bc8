import pytest

from affcoh.cartan import build_simple_lie_algebra, bilinear_form
from affcoh.vertex import VertexLayer


@pytest.fixture(scope="session")
def sl2():
    return build_simple_lie_algebra("sl2")


@pytest.fixture(scope="session")
def sl2_vertex(sl2):
    """Critical-level state-field layer with the homotopy solved through
    total input energy 3.  Solving is the expensive part (about a minute
    and a half), so every test module shares this one instance."""
    layer = VertexLayer(sl2, bilinear_form(sl2, "critical"))
    layer._solve_z_through(3)
    return layer
