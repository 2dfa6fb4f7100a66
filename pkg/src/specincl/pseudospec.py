"""Smallest-singular-value engine, grid pseudospectra, and region algebra.

A Region is a boolean mask over a rectangular grid of complex nodes,
optionally carrying the field of smallest singular values it was thresholded
from, so that one sweep serves every epsilon level.

All grid sweeps run through one batched-SVD kernel; evaluation is
data-parallel over nodes and a thread pool can be attached via ``jobs``
(LAPACK releases the GIL).  Results are written to disjoint node slots, so
the output is identical for any worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, EmptyRegionError, GridMismatch

__all__ = [
    "GridSpec",
    "Region",
    "smin",
    "spectral_norm",
    "smin_shifted",
    "smin_grid",
    "pseudospectrum",
    "rethreshold",
    "region_union",
    "region_intersect",
    "region_from_points",
    "region_points",
    "covers_points",
    "hausdorff",
    "contour_extract",
    "eig",
    "default_grid",
    "region_to_csv",
    "region_to_json",
    "region_from_json",
]

# batched shifts are processed in chunks of at most this many complex entries
_CHUNK_ENTRIES = 4_000_000


def smin(E) -> float:
    """Smallest singular value of a nonempty matrix (rows >= cols)."""
    E = np.asarray(E, dtype=np.complex128)
    if E.ndim != 2 or E.size == 0:
        raise DomainError(f"smin needs a nonempty 2-D matrix, got shape {E.shape}")
    if E.shape[0] < E.shape[1]:
        raise DomainError(f"smin needs rows >= cols, got shape {E.shape}")
    return float(np.linalg.svd(E, compute_uv=False)[-1])


def spectral_norm(E) -> float:
    """Largest singular value; 0 for an all-zero or degenerate block."""
    E = np.asarray(E, dtype=np.complex128)
    if E.size == 0:
        return 0.0
    if not np.any(E):
        return 0.0
    return float(np.linalg.svd(E, compute_uv=False)[0])


def smin_shifted(E, lam: complex, embed=None) -> float:
    """``smin(E - lam*I)``, or ``smin(E - lam*I_plus)`` for rectangular E."""
    E = np.asarray(E, dtype=np.complex128)
    if embed is None:
        if E.ndim != 2 or E.shape[0] != E.shape[1]:
            raise DomainError(
                f"square matrix required without an embedding, got {E.shape}"
            )
        shifted = E - lam * np.eye(E.shape[0])
    else:
        embed = np.asarray(embed, dtype=np.complex128)
        if embed.shape != E.shape:
            raise DomainError(
                f"embedding shape {embed.shape} does not match matrix {E.shape}"
            )
        shifted = E - lam * embed
    return smin(shifted)


def smin_grid(E, lambdas, embed=None, jobs: int | None = None) -> np.ndarray:
    """Vectorized ``smin(E - lam*I)`` over an array of shifts.

    Returns an array of the same shape as ``lambdas``.  The kernel batches
    the shifted copies and calls the LAPACK SVD once per chunk.
    """
    E = np.asarray(E, dtype=np.complex128)
    lam = np.asarray(lambdas, dtype=np.complex128)
    flat = lam.ravel()
    out = np.empty(flat.shape, dtype=np.float64)
    rows, cols = E.shape
    if embed is None and rows != cols:
        raise DomainError("rectangular matrices need an explicit embedding")
    chunk = max(1, _CHUNK_ENTRIES // (rows * cols))

    def run(start: int, stop: int) -> None:
        piece = flat[start:stop]
        batch = np.broadcast_to(E, (len(piece), rows, cols)).copy()
        if embed is None:
            idx = np.arange(rows)
            batch[:, idx, idx] -= piece[:, None]
        else:
            batch -= piece[:, None, None] * embed[None, :, :]
        out[start:stop] = np.linalg.svd(batch, compute_uv=False)[:, -1]

    spans = [(s, min(s + chunk, len(flat))) for s in range(0, len(flat), chunk)]
    if jobs and jobs > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(lambda se: run(*se), spans))
    else:
        for s, e in spans:
            run(s, e)
    return out.reshape(lam.shape)


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned sampling box in the complex plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    nx: int = 256
    ny: int = 256

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise DomainError("grid box must have positive extent")
        if self.nx < 2 or self.ny < 2:
            raise DomainError("grid needs at least 2 nodes per axis")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.ny)

    @property
    def dx(self) -> float:
        return (self.re_max - self.re_min) / (self.nx - 1)

    @property
    def dy(self) -> float:
        return (self.im_max - self.im_min) / (self.ny - 1)

    @property
    def cell_diag(self) -> float:
        return float(np.hypot(self.dx, self.dy))

    def nodes(self) -> np.ndarray:
        """Complex node array of shape (ny, nx)."""
        return self.xs[None, :] + 1j * self.ys[:, None]


@dataclass(frozen=True)
class Region:
    """Discretized subset of the complex plane on a fixed grid.

    ``mask[iy, ix]`` marks node ``xs[ix] + 1j*ys[iy]``.  ``values`` holds the
    smin field the mask was thresholded from (at ``level``), when available.
    """

    grid: GridSpec
    mask: np.ndarray
    values: np.ndarray | None = None
    level: float | None = None

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != (self.grid.ny, self.grid.nx):
            raise DomainError(
                f"mask shape {mask.shape} does not match grid "
                f"({self.grid.ny}, {self.grid.nx})"
            )
        object.__setattr__(self, "mask", mask)
        if self.values is not None:
            vals = np.asarray(self.values, dtype=np.float64)
            if vals.shape != mask.shape:
                raise DomainError("values shape must match the mask")
            if np.any(vals < 0):
                raise DomainError("smin field must be nonnegative")
            object.__setattr__(self, "values", vals)

    @property
    def is_empty(self) -> bool:
        return not bool(self.mask.any())

    def area(self) -> float:
        """Masked area, counting one grid cell per masked node."""
        return float(self.mask.sum()) * self.grid.dx * self.grid.dy


def pseudospectrum(E, eps: float, grid: GridSpec, embed=None,
                   jobs: int | None = None) -> Region:
    """Closed eps-pseudospectrum of E on a grid.

    Marks the nodes where ``smin(E - lam*I) <= eps`` (with the rectangular
    embedding when given) and keeps the full smin field for rethresholding.
    """
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    if not isinstance(grid, GridSpec):
        raise DomainError("grid must be a GridSpec")
    vals = smin_grid(E, grid.nodes(), embed=embed, jobs=jobs)
    return Region(grid, vals <= eps, vals, float(eps))


def rethreshold(region: Region, eps: float) -> Region:
    """New region at a different level, reusing the stored smin field."""
    if region.values is None:
        raise DomainError("region carries no smin field to rethreshold")
    return Region(region.grid, region.values <= eps, region.values, float(eps))


def _check_same_grid(a: Region, b: Region) -> None:
    if a.grid != b.grid:
        raise GridMismatch(f"grids differ: {a.grid} vs {b.grid}")


def region_union(regions) -> Region:
    """Pointwise OR; smin fields combine by pointwise min."""
    regions = list(regions)
    if not regions:
        raise DomainError("union of no regions")
    first = regions[0]
    mask = first.mask.copy()
    vals = None if first.values is None else first.values.copy()
    level = first.level
    for r in regions[1:]:
        _check_same_grid(first, r)
        mask |= r.mask
        if vals is not None and r.values is not None:
            np.minimum(vals, r.values, out=vals)
        else:
            vals = None
        if level != r.level:
            level = None
    return Region(first.grid, mask, vals, level)


def region_intersect(a: Region, b: Region) -> Region:
    """Pointwise AND; smin fields combine by pointwise max."""
    _check_same_grid(a, b)
    vals = None
    if a.values is not None and b.values is not None:
        vals = np.maximum(a.values, b.values)
    level = a.level if a.level == b.level else None
    return Region(a.grid, a.mask & b.mask, vals, level)


def region_from_points(grid: GridSpec, points) -> Region:
    """Rasterize a point set: mark the node nearest to each point."""
    pts = np.asarray(points, dtype=np.complex128).ravel()
    mask = np.zeros((grid.ny, grid.nx), dtype=bool)
    ix = np.clip(np.rint((pts.real - grid.re_min) / grid.dx), 0, grid.nx - 1)
    iy = np.clip(np.rint((pts.imag - grid.im_min) / grid.dy), 0, grid.ny - 1)
    mask[iy.astype(int), ix.astype(int)] = True
    return Region(grid, mask)


def region_points(region: Region) -> np.ndarray:
    """Complex coordinates of the masked nodes."""
    iy, ix = np.nonzero(region.mask)
    return region.grid.xs[ix] + 1j * region.grid.ys[iy]


def covers_points(region: Region, points, cells: float = 1.0) -> np.ndarray:
    """True per point when a masked node lies within ``cells`` cell diagonals."""
    pts = np.asarray(points, dtype=np.complex128).ravel()
    if region.is_empty:
        return np.zeros(pts.shape, dtype=bool)
    nodes = region_points(region)
    tree = cKDTree(np.column_stack([nodes.real, nodes.imag]))
    d, _ = tree.query(np.column_stack([pts.real, pts.imag]))
    return d <= cells * region.grid.cell_diag * (1 + 1e-12)


def hausdorff(a: Region, b: Region) -> float:
    """Hausdorff distance between the masked node sets.

    Node centers only; the discretization uncertainty is one cell diagonal
    (``a.grid.cell_diag``), which callers should report alongside.
    """
    _check_same_grid(a, b)
    if a.is_empty or b.is_empty:
        raise EmptyRegionError("hausdorff needs two nonempty regions")
    pa = region_points(a)
    pb = region_points(b)
    ta = cKDTree(np.column_stack([pa.real, pa.imag]))
    tb = cKDTree(np.column_stack([pb.real, pb.imag]))
    d_ab = ta.query(np.column_stack([pb.real, pb.imag]))[0].max()
    d_ba = tb.query(np.column_stack([pa.real, pa.imag]))[0].max()
    return float(max(d_ab, d_ba))


def eig(E) -> np.ndarray:
    """All eigenvalues of a square matrix (reference eigensolver)."""
    E = np.asarray(E, dtype=np.complex128)
    if E.ndim != 2 or E.shape[0] != E.shape[1] or E.size == 0:
        raise DomainError(f"eig needs a nonempty square matrix, got {E.shape}")
    return np.linalg.eigvals(E)


def default_grid(A, pad: float = 0.0, nx: int = 256, ny: int = 256) -> GridSpec:
    """Bounding box from the classical Gershgorin discs, inflated by ``pad``
    plus two grid cells, so the target sets stay interior to the grid."""
    A = np.asarray(A, dtype=np.complex128)
    d = np.diag(A)
    radii = np.abs(A).sum(axis=1) - np.abs(d)
    re_lo = float((d.real - radii).min()) - pad
    re_hi = float((d.real + radii).max()) + pad
    im_lo = float((d.imag - radii).min()) - pad
    im_hi = float((d.imag + radii).max()) + pad
    # keep degenerate boxes (e.g. diagonal real matrices) usable
    span = max(re_hi - re_lo, im_hi - im_lo, 1e-6)
    re_mid, im_mid = (re_lo + re_hi) / 2, (im_lo + im_hi) / 2
    re_lo, re_hi = re_mid - span / 2, re_mid + span / 2
    im_lo, im_hi = im_mid - span / 2, im_mid + span / 2
    cell = span / (min(nx, ny) - 1)
    return GridSpec(re_lo - 2 * cell, re_hi + 2 * cell,
                    im_lo - 2 * cell, im_hi + 2 * cell, nx, ny)


# ---------------------------------------------------------------------------
# contour extraction (marching squares)
# ---------------------------------------------------------------------------

def contour_extract(region: Region) -> list[np.ndarray]:
    """Closed boundary polylines of the mask.

    Runs marching squares on the smin field at the region's level when both
    are available (sub-cell accurate), otherwise on the 0/1 mask.  The field
    is padded with an exterior value so every contour closes.  Returns a list
    of (k, 2) float arrays of (re, im) vertices; first vertex == last.
    """
    if region.is_empty:
        raise EmptyRegionError("no contours in an empty region")
    if region.values is not None and region.level is not None:
        field = region.values
        level = float(region.level)
    else:
        field = np.where(region.mask, 0.0, 1.0)
        level = 0.5
    xs, ys = region.grid.xs, region.grid.ys
    # pad with an outside value so boundary-touching masks still close
    hi = float(np.max(field)) + abs(level) + 1.0
    f = np.pad(field, 1, constant_values=hi)
    xs = np.concatenate([[xs[0] - region.grid.dx], xs, [xs[-1] + region.grid.dx]])
    ys = np.concatenate([[ys[0] - region.grid.dy], ys, [ys[-1] + region.grid.dy]])
    # nudge near-level nodes inward so no contour vertex sits on a grid node
    # (on-node vertices are shared by four cells and break loop chaining)
    bump = (np.max(np.abs(f)) + abs(level) + 1.0) * 1e-7
    f = np.where(np.abs(f - level) < bump, level - bump, f)

    segments = _marching_squares(f, xs, ys, level)
    return _chain_segments(segments)


def _marching_squares(f, xs, ys, level):
    inside = f <= level
    segs = []
    ny, nx = f.shape
    for iy in range(ny - 1):
        for ix in range(nx - 1):
            a = inside[iy, ix]
            b = inside[iy, ix + 1]
            c = inside[iy + 1, ix + 1]
            d = inside[iy + 1, ix]
            case = a * 1 + b * 2 + c * 4 + d * 8
            if case in (0, 15):
                continue
            va, vb = f[iy, ix], f[iy, ix + 1]
            vc, vd = f[iy + 1, ix + 1], f[iy + 1, ix]
            x0, x1 = xs[ix], xs[ix + 1]
            y0, y1 = ys[iy], ys[iy + 1]

            def lerp(p, q, vp, vq):
                t = 0.5 if vq == vp else (level - vp) / (vq - vp)
                t = min(max(t, 0.0), 1.0)
                return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))

            pt = {
                "bottom": lerp((x0, y0), (x1, y0), va, vb),
                "right": lerp((x1, y0), (x1, y1), vb, vc),
                "top": lerp((x0, y1), (x1, y1), vd, vc),
                "left": lerp((x0, y0), (x0, y1), va, vd),
            }
            table = {
                1: [("left", "bottom")],
                2: [("bottom", "right")],
                3: [("left", "right")],
                4: [("right", "top")],
                6: [("bottom", "top")],
                7: [("left", "top")],
                8: [("top", "left")],
                9: [("bottom", "top")],
                11: [("right", "top")],
                12: [("right", "left")],
                13: [("bottom", "right")],
                14: [("left", "bottom")],
            }
            if case == 5:
                center = (va + vb + vc + vd) / 4.0
                pairs = ([("bottom", "right"), ("top", "left")]
                         if center <= level
                         else [("bottom", "left"), ("right", "top")])
            elif case == 10:
                center = (va + vb + vc + vd) / 4.0
                pairs = ([("bottom", "left"), ("right", "top")]
                         if center <= level
                         else [("bottom", "right"), ("top", "left")])
            else:
                pairs = table[case]
            for e1, e2 in pairs:
                segs.append((pt[e1], pt[e2]))
    return segs


def _chain_segments(segments) -> list[np.ndarray]:
    if not segments:
        return []
    scale = max(
        max(abs(p[0][0]), abs(p[0][1]), abs(p[1][0]), abs(p[1][1]))
        for p in segments
    ) + 1.0

    def key(p):
        return (round(p[0] / scale, 9), round(p[1] / scale, 9))

    segments = [(p, q) for p, q in segments if key(p) != key(q)]
    adj: dict[tuple, list[int]] = {}
    for i, (p, q) in enumerate(segments):
        adj.setdefault(key(p), []).append(i)
        adj.setdefault(key(q), []).append(i)

    used = [False] * len(segments)
    loops = []
    for start in range(len(segments)):
        if used[start]:
            continue
        used[start] = True
        p, q = segments[start]
        loop = [p, q]
        cur = q
        while True:
            nxt = None
            for i in adj.get(key(cur), ()):
                if not used[i]:
                    nxt = i
                    break
            if nxt is None:
                break
            used[nxt] = True
            a, b = segments[nxt]
            cur = b if key(a) == key(cur) else a
            loop.append(cur)
            if key(cur) == key(loop[0]):
                break
        if key(loop[-1]) != key(loop[0]):
            loop.append(loop[0])
        loops.append(np.array(loop, dtype=np.float64))
    return loops


# ---------------------------------------------------------------------------
# region export
# ---------------------------------------------------------------------------

def region_to_csv(region: Region, path) -> None:
    """Node table ``re,im,smin,mask`` (smin column empty without a field)."""
    xs, ys = region.grid.xs, region.grid.ys
    with open(path, "w", encoding="ascii") as fh:
        fh.write("re,im,smin,mask\n")
        for iy in range(region.grid.ny):
            for ix in range(region.grid.nx):
                v = ("" if region.values is None
                     else repr(float(region.values[iy, ix])))
                fh.write(f"{float(xs[ix])!r},{float(ys[iy])!r},{v},"
                         f"{int(region.mask[iy, ix])}\n")


def _mask_rle(mask: np.ndarray) -> list[int]:
    flat = mask.ravel()
    runs = []
    current = False
    count = 0
    for v in flat:
        if v == current:
            count += 1
        else:
            runs.append(count)
            current = bool(v)
            count = 1
    runs.append(count)
    return runs


def _mask_from_rle(runs, shape) -> np.ndarray:
    flat = np.zeros(int(np.prod(shape)), dtype=bool)
    pos = 0
    val = False
    for run in runs:
        if val:
            flat[pos:pos + run] = True
        pos += run
        val = not val
    return flat.reshape(shape)


def region_to_json(region: Region, params: dict | None = None) -> str:
    """Self-describing JSON: grid metadata, run parameters, RLE mask."""
    g = region.grid
    doc = {
        "grid": {
            "re_min": g.re_min, "re_max": g.re_max,
            "im_min": g.im_min, "im_max": g.im_max,
            "nx": g.nx, "ny": g.ny,
        },
        "level": region.level,
        "params": params or {},
        "mask_rle": _mask_rle(region.mask),
    }
    return json.dumps(doc, sort_keys=True)


def region_from_json(text: str) -> Region:
    doc = json.loads(text)
    g = doc["grid"]
    grid = GridSpec(g["re_min"], g["re_max"], g["im_min"], g["im_max"],
                    g["nx"], g["ny"])
    mask = _mask_from_rle(doc["mask_rle"], (grid.ny, grid.nx))
    return Region(grid, mask, None, doc.get("level"))
