"""Dense matrix helpers and the dominant-eigenvector kernel."""

import numpy as np


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D float64 array.

    1-D input is treated as a single column. Raises ``ValueError`` for
    empty, higher-dimensional or non-finite input.
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_vector(a, name="vector"):
    arr = np.asarray(a, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _fix_sign(v):
    # largest-magnitude entry made nonnegative; argmax picks the lowest index
    k = int(np.argmax(np.abs(v)))
    if v[k] < 0:
        v = -v
    return v


def power_iteration(E, tol=1e-10, max_iter=1000):
    """Dominant eigenvector of ``E @ E.T`` without forming the product.

    Parameters
    ----------
    E : array_like, shape (m, n)
    tol : float
        Stop once successive unit iterates differ (up to sign) by less
        than ``tol`` in L2 norm.
    max_iter : int

    Returns
    -------
    v : ndarray, shape (m,)
        Unit vector whose largest-magnitude entry is nonnegative.
    rayleigh : float
        ``v @ E @ E.T @ v``.

    Notes
    -----
    The start vector is the column of ``E`` with the largest L2 norm
    (lowest index on ties), so the result is fully deterministic.
    """
    E = as_matrix(E, "E")
    if tol <= 0:
        raise ValueError("tol must be positive")
    scale = float(np.max(np.abs(E))) if E.size else 0.0
    if scale == 0.0:
        raise ValueError("zero matrix has no dominant direction")
    # the iterate is scale-free; working on E / max|E| avoids under/overflow
    E = E / scale
    col_norms = np.linalg.norm(E, axis=0)
    j = int(np.argmax(col_norms))

    v = E[:, j] / col_norms[j]
    for _ in range(int(max_iter)):
        w = E @ (E.T @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            # start vector in the null space of E.T; cannot happen for a
            # column of E, kept as a guard against underflow
            break
        w = w / nw
        done = (np.linalg.norm(w - v) < tol) or (np.linalg.norm(w + v) < tol)
        v = w
        if done:
            break

    v = _fix_sign(v / np.linalg.norm(v))
    Etv = E.T @ v
    return v, float(Etv @ Etv) * scale * scale
