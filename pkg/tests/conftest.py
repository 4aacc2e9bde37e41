import numpy as np
import pytest
from scipy.optimize import linprog

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record():
    """Collect one PASS/FAIL line per acceptance criterion."""
    def _record(criterion: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}")
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def riemann_dtm(dists, weights, m, steps=1_000_000):
    """Midpoint rule for (1/m) * integral_0^m of the pseudo-distance.

    The pseudo-distance at level l is found straight from its definition:
    the smallest candidate radius whose closed ball has mass > l.
    """
    dists = np.asarray(dists, dtype=float)
    weights = np.asarray(weights, dtype=float)
    radii = np.unique(dists)
    ball_mass = np.array([weights[dists <= r].sum() for r in radii])
    ball_mass[-1] = 1.0
    levels = (np.arange(steps) + 0.5) * (m / steps)
    first = np.searchsorted(ball_mass, levels, side="right")
    return radii[np.minimum(first, radii.size - 1)].mean()


def lp_wasserstein(x, wx, y, wy):
    """W1 between two weighted point clouds by solving the transport LP."""
    x = np.atleast_2d(x)
    y = np.atleast_2d(y)
    C = np.linalg.norm(x[:, None, :] - y[None, :, :], axis=-1)
    nx, ny = C.shape
    A = []
    for i in range(nx):
        row = np.zeros((nx, ny))
        row[i] = 1
        A.append(row.ravel())
    for j in range(ny):
        col = np.zeros((nx, ny))
        col[:, j] = 1
        A.append(col.ravel())
    res = linprog(C.ravel(), A_eq=np.array(A), b_eq=np.r_[wx, wy], bounds=(0, None), method="highs")
    assert res.success
    return res.fun
