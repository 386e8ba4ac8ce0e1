import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corridormon import Line, build_topology
from corridormon.harness import default_network, default_topology


@pytest.fixture
def corridor2():
    """Two-line corridor: g1-l1 and g2-l2 across the boundary, one tie each side."""
    return build_topology(
        ["g1", "g2"],
        ["l1", "l2"],
        [Line("gl1", "g1", "l1"), Line("gl2", "g2", "l2")],
        [Line("gg", "g1", "g2"), Line("ll", "l1", "l2")],
    )


@pytest.fixture(scope="session")
def four_bus():
    """The packaged 4-bus study case as (network, topology)."""
    return default_network(), default_topology()
