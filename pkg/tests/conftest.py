import math

import pytest

from conesurf import generators as G


@pytest.fixture(scope="session")
def big_tetra():
    return G.tetra(0.8 * math.pi)


@pytest.fixture(scope="session")
def octa():
    return G.octa_sphere()


@pytest.fixture(scope="session")
def waist():
    return G.waist()


@pytest.fixture(scope="session")
def bumped_tetra(big_tetra):
    # one edge lengthened by 0.05 on both of its half-edges
    lengths = [list(ls) for ls in big_tetra.lengths]
    h = big_tetra.edges()[0]
    for g in (h, big_tetra.twin[h]):
        lengths[g // 3][g % 3] += 0.05
    from conesurf.surface import build_surface

    return build_surface([tuple(ls) for ls in lengths], big_tetra.gluing())


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
