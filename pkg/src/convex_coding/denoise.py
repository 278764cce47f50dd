"""Patch-based grayscale denoising with either coding algorithm.

Images are 2-D float arrays indexed ``[row, col]`` with nominal range
``[0, 1]``; nothing here clamps, only :func:`write_pgm` does.
"""

from dataclasses import asdict, dataclass, field, replace
import math
import time

import numpy as np

from .linalg import as_matrix
from .oracles import OracleConfig
from .regularizer import RegParams
from .solvers import SolverOptions, alternating_optimization, boosted_coding

PSNR_CAP = 99.0


class PGMError(ValueError):
    """Malformed PGM data; ``offset`` is the byte where parsing failed."""

    def __init__(self, msg, offset):
        super().__init__(f"{msg} (byte offset {offset})")
        self.offset = offset


def as_image(img):
    arr = as_matrix(img, "image")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError("image must have positive width and height")
    return arr


def parse_pgm(data):
    """Decode 8-bit binary PGM bytes into floats in ``[0, 1]``."""
    pos = 0
    n = len(data)

    def token():
        nonlocal pos
        while pos < n:
            c = data[pos:pos + 1]
            if c == b"#":
                while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            elif c.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise PGMError("unexpected end of header", start)
        return data[start:pos], start

    magic, at = token()
    if magic != b"P5":
        raise PGMError(f"expected magic 'P5', got {magic[:8]!r}", at)
    vals = []
    for what in ("width", "height", "maxval"):
        tok, at = token()
        if not tok.isdigit() or int(tok) <= 0:
            raise PGMError(f"invalid {what} {tok[:16]!r}", at)
        vals.append(int(tok))
    width, height, maxval = vals
    if maxval != 255:
        raise PGMError(f"only maxval 255 is supported, got {maxval}", at)
    if pos >= n or not data[pos:pos + 1].isspace():
        raise PGMError("missing whitespace after header", pos)
    pos += 1
    need = width * height
    if n - pos < need:
        raise PGMError(f"pixel data truncated: need {need} bytes, have {n - pos}", n)
    pix = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos)
    return pix.reshape(height, width).astype(np.float64) / 255.0


def read_pgm(path):
    with open(path, "rb") as fh:
        return parse_pgm(fh.read())


def encode_pgm(img):
    img = as_image(img)
    q = np.rint(255.0 * np.clip(img, 0.0, 1.0)).astype(np.uint8)
    h, w = q.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + q.tobytes()


def write_pgm(path, img):
    with open(path, "wb") as fh:
        fh.write(encode_pgm(img))


def add_noise(img, sigma, seed):
    """Add seeded i.i.d. Gaussian noise; the result is not clipped."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    img = as_image(img)
    rng = np.random.default_rng(seed)
    return img + sigma * rng.standard_normal(img.shape)


def psnr(reference, test):
    """Peak signal-to-noise ratio in dB for peak value 1.

    Identical images give :data:`PSNR_CAP`.
    """
    a, b = as_image(reference), as_image(test)
    if a.shape != b.shape:
        raise ValueError(f"image size mismatch: {a.shape} vs {b.shape}")
    rmse = math.sqrt(float(np.mean((a - b) ** 2)))
    if rmse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 20.0 * math.log10(1.0 / rmse))


@dataclass
class PatchGrid:
    patch_size: int
    stride: int
    origins: list
    means: np.ndarray
    image_dims: tuple  # (width, height)


def _axis_origins(length, patch_size, stride):
    origins = list(range(0, length - patch_size + 1, stride))
    if origins[-1] != length - patch_size:
        origins.append(length - patch_size)
    return origins


def extract_patches(img, patch_size=8, stride=4):
    """Mean-removed, row-major flattened patches as the columns of ``X``.

    Origins step by ``stride`` from 0, with one extra origin flush with
    the far edge when the regular grid falls short of it.
    """
    img = as_image(img)
    h, w = img.shape
    if patch_size < 1 or stride < 1:
        raise ValueError("patch_size and stride must be positive")
    if patch_size > min(h, w):
        raise ValueError(f"image {w}x{h} is smaller than patch size {patch_size}")
    rows = _axis_origins(h, patch_size, stride)
    cols = _axis_origins(w, patch_size, stride)
    origins = [(r, c) for r in rows for c in cols]
    X = np.empty((patch_size * patch_size, len(origins)))
    for j, (r, c) in enumerate(origins):
        X[:, j] = img[r:r + patch_size, c:c + patch_size].ravel()
    means = X.mean(axis=0)
    # flat patches: use the pixel value itself so the residual is exactly zero
    flat = X.min(axis=0) == X.max(axis=0)
    means[flat] = X[0, flat]
    X -= means
    return X, PatchGrid(patch_size, stride, origins, means, (w, h))


def reconstruct(B, W, grid):
    """Overlap-average the coded patches (plus their means) into an image."""
    w, h = grid.image_dims
    p = grid.patch_size
    n = len(grid.origins)
    if W is None or np.size(W) == 0:
        P = np.zeros((p * p, n))
    else:
        P = np.asarray(B) @ np.asarray(W)
    if P.shape != (p * p, n):
        raise ValueError(f"coded patches have shape {P.shape}, expected {(p * p, n)}")
    P = P + grid.means
    acc = np.zeros((h, w))
    cnt = np.zeros((h, w))
    for j, (r, c) in enumerate(grid.origins):
        acc[r:r + p, c:c + p] += P[:, j].reshape(p, p)
        cnt[r:r + p, c:c + p] += 1.0
    return acc / cnt


def refit_support(B, W, X, tau=1e-8):
    """Unregularized least-squares refit of each column on its support."""
    B, W, X = as_matrix(B, "B"), as_matrix(W, "W"), as_matrix(X, "X")
    if B.shape[1] != W.shape[0] or B.shape[0] != X.shape[0] or W.shape[1] != X.shape[1]:
        raise ValueError(f"dimension mismatch: B {B.shape}, W {W.shape}, X {X.shape}")
    out = np.zeros_like(W)
    supports = np.abs(W) > tau
    # group columns sharing a support so each distinct system is solved once
    keys = {}
    for j in range(W.shape[1]):
        keys.setdefault(supports[:, j].tobytes(), []).append(j)
    for cols in keys.values():
        S = np.flatnonzero(supports[:, cols[0]])
        if S.size == 0:
            continue
        BS = B[:, S]
        G = BS.T @ BS + 1e-10 * np.eye(S.size)
        out[np.ix_(S, cols)] = np.linalg.solve(G, BS.T @ X[:, cols])
    # the ridge term can in principle cost a hair of residual; keep the better column
    old = np.linalg.norm(B @ W - X, axis=0)
    new = np.linalg.norm(B @ out - X, axis=0)
    worse = new > old
    out[:, worse] = W[:, worse]
    return out


@dataclass
class DenoiseReport:
    psnr_noisy: float | None
    psnr_patch_avg: float | None
    psnr_denoised: float | None
    basis_size: int
    method: str
    oracle: str | None
    lam: float
    gamma: float | None
    d: int
    patch_size: int
    stride: int
    seed: int
    wall_time: float
    solver: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def code_patches(X, method, params, d, opts=None, oracle="heuristic", oracle_cfg=None):
    opts = opts or SolverOptions()
    if method == "boosted":
        return boosted_coding(X, params, oracle, replace(opts, max_basis=d), oracle_cfg)
    if method == "alternating":
        return alternating_optimization(X, d, params.lam, opts)
    raise ValueError(f"unknown method {method!r}")


def denoise_image(noisy, method="boosted", params=None, d=64, opts=None,
                  oracle="heuristic", clean=None, patch_size=8, stride=4,
                  tau=1e-8, oracle_cfg=None):
    """Denoise ``noisy``; returns ``(image, DenoiseReport, CodingResult)``.

    PSNR fields are ``None`` unless a ``clean`` reference is supplied.
    For ``method="alternating"`` only ``params.lam`` is used and ``d`` is
    the basis size; for ``"boosted"`` ``d`` caps the basis size.
    """
    params = params or RegParams(0.1, 1.0)
    opts = opts or SolverOptions()
    noisy = as_image(noisy)
    t0 = time.perf_counter()
    X, grid = extract_patches(noisy, patch_size, stride)
    result = code_patches(X, method, params, d, opts, oracle, oracle_cfg)
    if result.basis.shape[1]:
        W = refit_support(result.basis, result.weights, X, tau)
        out = reconstruct(result.basis, W, grid)
    else:
        out = reconstruct(None, None, grid)
    wall = time.perf_counter() - t0

    p_noisy = p_pa = p_out = None
    if clean is not None:
        clean = as_image(clean)
        p_noisy = psnr(clean, noisy)
        p_pa = psnr(clean, reconstruct(None, None, grid))
        p_out = psnr(clean, out)
    solver = {k: v for k, v in asdict(opts).items() if k not in ("max_basis",)}
    report = DenoiseReport(
        psnr_noisy=p_noisy, psnr_patch_avg=p_pa, psnr_denoised=p_out,
        basis_size=int(result.basis.shape[1]), method=method,
        oracle=oracle if method == "boosted" else None,
        lam=params.lam, gamma=params.gamma if method == "boosted" else None,
        d=d, patch_size=patch_size, stride=stride, seed=opts.seed,
        wall_time=wall, solver=solver)
    return out, report, result


def basis_tiles(B, patch_size, cols=None, pad=1):
    """Tile basis columns as patches, each min-max normalized, in selection order."""
    B = np.asarray(B, dtype=np.float64)
    k = B.shape[1]
    if k == 0:
        return np.zeros((patch_size, patch_size))
    cols = cols or int(math.ceil(math.sqrt(k)))
    rows = int(math.ceil(k / cols))
    step = patch_size + pad
    canvas = np.ones((rows * step - pad, cols * step - pad))
    for i in range(k):
        tile = B[:, i].reshape(patch_size, patch_size)
        lo, hi = tile.min(), tile.max()
        tile = (tile - lo) / (hi - lo) if hi > lo else np.full_like(tile, 0.5)
        r, c = divmod(i, cols)
        canvas[r * step:r * step + patch_size, c * step:c * step + patch_size] = tile
    return canvas
