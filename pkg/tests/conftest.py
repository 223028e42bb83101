import pytest

from vitalcut import generators
from vitalcut.oracle import enumerate_cuts
from vitalcut.vital import all_vital_edges

ACCEPTANCE_LINES: list[str] = []


def fixture_networks():
    return {
        "p4": generators.gen_p4(),
        "path6": generators.gen_path([5, 3, 8, 2, 9]),
        "gsq2": generators.gen_gsq(2, [5, 6, 7, 8]),
        "gm22": generators.gen_gm([[1, 2], [3, 4]]),
        "appendixD": generators.gen_appendixD(),
        "appendixE": generators.gen_appendixE(3, 2),
        "appendixF3": generators.gen_appendixF(3),
        "appendixF4": generators.gen_appendixF(4),
        "db": generators.gen_db([[1, 0, 1], [0, 1, 0], [1, 1, 0]]),
    }


class Lazy:
    """Per-network oracle catalog and analysis, computed on first use."""

    def __init__(self, nets):
        self.nets = list(nets)
        self._cat = {}
        self._an = {}

    def catalog(self, i):
        if i not in self._cat:
            self._cat[i] = enumerate_cuts(self.nets[i])
        return self._cat[i]

    def analysis(self, i):
        if i not in self._an:
            self._an[i] = all_vital_edges(self.nets[i])
        return self._an[i]

    def __iter__(self):
        return iter(range(len(self.nets)))

    def __len__(self):
        return len(self.nets)


@pytest.fixture(scope="session")
def suite():
    return Lazy(generators.random_suite(200, seed=0))


@pytest.fixture(scope="session")
def fixtures():
    named = fixture_networks()
    lazy = Lazy(named.values())
    lazy.names = list(named)
    return lazy


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda x: int(x.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
