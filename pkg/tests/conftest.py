import numpy as np
import pytest

from structpencil import EigenPairQuery, StructuredPencil

_ACCEPTANCE: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


def worked_pencil(m: int = 3) -> StructuredPencil:
    return StructuredPencil(
        J=[[0, -1], [1, 0]],
        R=np.diag([0.0, 1.0]),
        E=np.zeros((2, 2)),
        B=np.zeros((2, m)),
        S=np.eye(m),
    )


def worked_query(m: int = 3) -> EigenPairQuery:
    return EigenPairQuery(0.25j, [0, 0], [1, 1], np.zeros(m))


@pytest.fixture(params=[2, 3], ids=["m2", "m3"])
def worked(request):
    m = request.param
    return worked_pencil(m), worked_query(m)


@pytest.fixture
def scalar_pencil():
    return StructuredPencil(J=[[0]], R=[[1]], E=[[1]], B=[[1]], S=[[1]])
