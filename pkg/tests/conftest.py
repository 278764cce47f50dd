"""Independent reference computations shared by the test modules.

Nothing here calls into the package's solvers; each helper is a brute
force or closed-form route to the same quantity.
"""

from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"


def grid_conjugate(Z, gamma, n_grid=100_001):
    """Clamp-level objective minimized over a uniform grid on [0, max|Z|].

    Returns ``(alpha_grid, value, step)``.
    """
    absZ = np.abs(np.asarray(Z, dtype=float))
    zmax = absZ.max()
    alphas = np.linspace(0.0, zmax, n_grid)
    best = np.zeros(n_grid)
    for row in absZ:
        ex = np.maximum(row[None, :] - alphas[:, None], 0.0)
        best = np.maximum(best, 0.5 * np.sum(ex * ex, axis=1))
    vals = alphas ** 2 / (2.0 * gamma) + best
    i = int(np.argmin(vals))
    return alphas[i], vals[i], alphas[1] - alphas[0]


def exact_row_conjugates(Z, gamma):
    """Closed-form conjugate of each row taken on its own.

    For one row the clamp objective is smooth; its stationary point with
    ``k`` entries above the level is ``alpha = gamma * S_k / (1 + gamma * k)``
    where ``S_k`` is the sum of the ``k`` largest magnitudes.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    A = -np.sort(-np.abs(Z), axis=1)
    S = np.cumsum(A, axis=1)
    k = np.arange(1, A.shape[1] + 1)
    a = gamma * S / (1.0 + gamma * k)
    nxt = np.concatenate([A[:, 1:], np.zeros((A.shape[0], 1))], axis=1)
    ok = (a <= A) & (a >= nxt)
    pick = np.argmax(ok, axis=1)
    alpha = a[np.arange(A.shape[0]), pick]
    alpha = np.where(A[:, 0] == 0, 0.0, alpha)
    ex = np.maximum(np.abs(Z) - alpha[:, None], 0.0)
    return alpha ** 2 / (2.0 * gamma) + 0.5 * np.sum(ex * ex, axis=1)


def primal_conjugate(Z, gamma):
    """``sup_W <W, Z> - phi(W)`` solved directly as a convex program."""
    cp = pytest.importorskip("cvxpy")
    Z = np.asarray(Z, dtype=float)
    W = cp.Variable(Z.shape)
    l21 = cp.sum(cp.norm(W, 2, axis=1))
    l1 = cp.sum(cp.abs(W))
    prob = cp.Problem(cp.Maximize(cp.sum(cp.multiply(W, Z))
                                  - 0.5 * cp.square(l21) - 0.5 * gamma * cp.square(l1)))
    prob.solve(solver=cp.CLARABEL)
    return prob.value


def lasso_grid(B, x, lam, step=1e-3, lim=5.0):
    """Lasso objective minimized over a full grid on ``[-lim, lim]^k``, ``k <= 2``.

    The objective splits into per-coordinate terms plus one cross term, so
    blocks of the 2-D grid are outer sums.
    """
    B, x = np.asarray(B, dtype=float), np.asarray(x, dtype=float)
    g = np.arange(-lim, lim + step / 2, step)
    G = B.T @ B
    p = B.T @ x
    f = [0.5 * G[i, i] * g * g - p[i] * g + lam * np.abs(g) for i in range(B.shape[1])]
    const = 0.5 * x @ x
    if B.shape[1] == 1:
        return const + f[0].min()
    best = np.inf
    for rows in np.array_split(np.arange(g.size), 10):
        vals = f[0][rows, None] + f[1][None, :] + G[0, 1] * np.outer(g[rows], g)
        best = min(best, vals.min())
    return const + best


def unit_circle(n=3600):
    th = np.arange(n) * 2.0 * np.pi / n
    return np.stack([np.cos(th), np.sin(th)])


def synthetic_instance(seed=0, m=16, n=200, k=6, sigma=0.05, density=0.5):
    """``X = B* W* + noise`` with unit-norm true atoms and sparse Gaussian codes."""
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((m, k))
    B /= np.linalg.norm(B, axis=0)
    W = rng.standard_normal((k, n)) * (rng.random((k, n)) < density)
    X = B @ W + sigma * rng.standard_normal((m, n))
    return X, B, W


_verdicts = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record and assert one acceptance criterion; lines are echoed in the summary."""
    lines = request.config.stash.setdefault(_verdicts, [])

    def record(n, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {n:>2}: {detail}"
        lines.append((n, line))
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_verdicts, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def camera():
    from convex_coding.denoise import read_pgm
    return read_pgm(DATA / "camera_128.pgm")
