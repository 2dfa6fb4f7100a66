"""Assembly of the three inclusion-set families and Gershgorin baselines.

Every method call evaluates all of its submatrix pseudospectra on one shared
grid, so unions and intersections are exact pointwise operations.  Duplicate
submatrices (ubiquitous for Toeplitz inputs) are detected by content and
computed once.  Alongside the grid regions, each family has a pointwise
membership test that mirrors the same penalties and submatrix families
exactly, for cheap containment verification at arbitrary points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import pseudospec as ps
from .errors import DomainError
from .matrixcore import (
    BlockMatrixView,
    embedding_selector,
    offdiag_norms,
    remaining_norm,
    split_tridiagonal,
    submatrix_pi,
    submatrix_tau,
    submatrix_tau1,
)
from .penalty import PenaltyParams, eps_pi, eps_tau, eps_tau1

__all__ = [
    "MethodReport",
    "penalty_params",
    "sigma_tau",
    "pi_method",
    "tau1_method",
    "gershgorin",
    "gershgorin_block",
    "sigma_tau_membership",
    "pi_membership",
    "tau1_membership",
    "tau1_outer_level",
    "method_grid",
    "run_method",
]

_OUTER_AUTO_MAX_ORDER = 512
_CNORM_AUTO_EXACT_MAX_ORDER = 1024


def _resolve_cnorm_mode(view: BlockMatrixView, mode: str) -> str:
    if mode == "auto":
        return "exact" if view.order <= _CNORM_AUTO_EXACT_MAX_ORDER else "mixed"
    if mode in ("exact", "frobenius", "mixed"):
        return mode
    raise DomainError(f"unknown cnorm mode {mode!r}")


def penalty_params(view: BlockMatrixView, n: int,
                   cnorm_mode: str = "auto") -> PenaltyParams:
    """Penalty inputs of a view at truncation size n."""
    mode = _resolve_cnorm_mode(view, cnorm_mode)
    _, C = split_tridiagonal(view)
    c = remaining_norm(C, mode)
    r_L, r_U, _ = offdiag_norms(view)
    return PenaltyParams.from_offdiag(r_L, r_U, c, n)


def _check_method_n(view: BlockMatrixView, n: int) -> None:
    N = view.block_count
    if not (1 <= n <= N - 1):
        raise IndexError(f"method needs 1 <= n <= N-1 = {N - 1}, got n={n}")


# ---------------------------------------------------------------------------
# contribution families
# ---------------------------------------------------------------------------
# a contribution is (descriptor, matrix, embedding-or-None); descriptors are
# (kind, n, k) triples kept for reports

def _tau_family(view: BlockMatrixView, n: int):
    N = view.block_count
    main = [(("tau", n, k), submatrix_tau(view, n, k), None)
            for k in range(N - n + 1)]
    edges = []
    for m in range(1, n):
        edges.append((("tau", m, 0), submatrix_tau(view, m, 0), None))
        edges.append((("tau", m, N - m), submatrix_tau(view, m, N - m), None))
    return main, edges


def _pi_family(view: BlockMatrixView, n: int, t: complex):
    N = view.block_count
    return [(("pi", n, k), submatrix_pi(view, n, k, t), None)
            for k in range(N - n + 1)]


def _tau1_family(view: BlockMatrixView, n: int):
    N = view.block_count
    return [(("tau1", n, k), submatrix_tau1(view, n, k),
             embedding_selector(n, k, view))
            for k in range(N - n + 1)]


def _dedup(entries):
    """Group contributions by matrix content; returns (groups, order).

    groups: list of (matrix, embed, [descriptors]) in first-seen order.
    """
    seen: dict[bytes, int] = {}
    groups = []
    for desc, mat, embed in entries:
        key = mat.tobytes() + (b"" if embed is None else b"|" + embed.tobytes())
        if key in seen:
            groups[seen[key]][2].append(desc)
        else:
            seen[key] = len(groups)
            groups.append((mat, embed, [desc]))
    return groups


def _fields(groups, grid: ps.GridSpec, jobs, cache: dict | None = None):
    """smin field per unique contribution on the grid."""
    nodes = grid.nodes()
    out = []
    for mat, embed, descs in groups:
        key = mat.tobytes() + (b"" if embed is None else b"|" + embed.tobytes())
        if cache is not None and key in cache:
            vals = cache[key]
        else:
            vals = ps.smin_grid(mat, nodes, embed=embed, jobs=jobs)
            if cache is not None:
                cache[key] = vals
        out.append((vals, descs))
    return out


def _union_at_level(fields, grid: ps.GridSpec, level: float) -> ps.Region:
    combined = None
    for vals, _ in fields:
        combined = vals if combined is None else np.minimum(combined, vals)
    return ps.Region(grid, combined <= level, combined, level)


def method_grid(view: BlockMatrixView, pad: float,
                nx: int = 256, ny: int = 256) -> ps.GridSpec:
    """Default shared grid: Gershgorin box inflated by the worst level."""
    return ps.default_grid(view.matrix, pad=pad, nx=nx, ny=ny)


# ---------------------------------------------------------------------------
# tau method
# ---------------------------------------------------------------------------

def sigma_tau(view: BlockMatrixView, n: int, eps: float,
              grid: ps.GridSpec | None = None, cnorm_mode: str = "auto",
              jobs: int | None = None):
    """Square-truncation inclusion set.

    Returns ``(sigma, sigma_hat, Sigma)``: the union over truncations at
    level ``eps + eps_n`` (with the short edge truncations), the companion
    union at level ``eps + eps_{n-2}`` for n > 2 (else None), and their
    intersection (== sigma for n <= 2).
    """
    _check_method_n(view, n)
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    p_n = penalty_params(view, n, cnorm_mode)
    level = eps + eps_tau(p_n)
    level_hat = None
    if n > 2:
        p_hat = PenaltyParams.from_offdiag(p_n.r_L, p_n.r_U, p_n.c_norm, n - 2)
        level_hat = eps + eps_tau(p_hat)
    if grid is None:
        grid = method_grid(view, pad=max(level, level_hat or 0.0))

    main, edges = _tau_family(view, n)
    cache: dict = {}
    main_fields = _fields(_dedup(main), grid, jobs, cache)
    all_fields = main_fields + _fields(_dedup(edges), grid, jobs, cache)
    sigma = _union_at_level(all_fields, grid, level)
    if n <= 2:
        return sigma, None, sigma
    sigma_hat = _union_at_level(main_fields, grid, level_hat)
    return sigma, sigma_hat, ps.region_intersect(sigma, sigma_hat)


def sigma_tau_membership(view: BlockMatrixView, n: int, eps: float, points,
                         cnorm_mode: str = "auto") -> np.ndarray:
    """Exact pointwise membership in the tau inclusion set."""
    _check_method_n(view, n)
    pts = np.asarray(points, dtype=np.complex128).ravel()
    p_n = penalty_params(view, n, cnorm_mode)
    level = eps + eps_tau(p_n)
    main, edges = _tau_family(view, n)

    def min_field(groups):
        best = np.full(pts.shape, np.inf)
        for mat, embed, _ in groups:
            np.minimum(best, ps.smin_grid(mat, pts, embed=embed), out=best)
        return best

    main_groups = _dedup(main)
    inside = min_field(main_groups + _dedup(edges)) <= level
    if n > 2:
        p_hat = PenaltyParams.from_offdiag(p_n.r_L, p_n.r_U, p_n.c_norm, n - 2)
        inside &= min_field(main_groups) <= eps + eps_tau(p_hat)
    return inside


# ---------------------------------------------------------------------------
# pi method
# ---------------------------------------------------------------------------

def pi_method(view: BlockMatrixView, n: int, t: complex, eps: float,
              grid: ps.GridSpec | None = None, cnorm_mode: str = "auto",
              jobs: int | None = None) -> ps.Region:
    """Periodised-truncation inclusion set (uniform partitions only)."""
    _check_method_n(view, n)
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    p = penalty_params(view, n, cnorm_mode)
    level = eps + eps_pi(p)
    family = _pi_family(view, n, t)
    if grid is None:
        grid = method_grid(view, pad=level)
    fields = _fields(_dedup(family), grid, jobs)
    return _union_at_level(fields, grid, level)


def pi_membership(view: BlockMatrixView, n: int, t: complex, eps: float,
                  points, cnorm_mode: str = "auto") -> np.ndarray:
    _check_method_n(view, n)
    pts = np.asarray(points, dtype=np.complex128).ravel()
    p = penalty_params(view, n, cnorm_mode)
    level = eps + eps_pi(p)
    best = np.full(pts.shape, np.inf)
    for mat, embed, _ in _dedup(_pi_family(view, n, t)):
        np.minimum(best, ps.smin_grid(mat, pts, embed=embed), out=best)
    return best <= level


# ---------------------------------------------------------------------------
# tau_1 method
# ---------------------------------------------------------------------------

def tau1_method(view: BlockMatrixView, n: int, eps: float,
                grid: ps.GridSpec | None = None, cnorm_mode: str = "auto",
                jobs: int | None = None, outer: bool | None = None):
    """Rectangular-truncation inclusion set and its sandwich companion.

    Returns ``(Gamma, outer_region)``.  The sandwich set
    ``Spec_{eps + eps''_n + 2||C||}(A)`` costs a full-matrix grid sweep, so it
    is computed only when ``outer`` is True, or by default for orders
    <= 512; pass ``outer=False`` to skip it.
    """
    _check_method_n(view, n)
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    p = penalty_params(view, n, cnorm_mode)
    level = eps + eps_tau1(p)
    outer_level = level + 2.0 * p.c_norm
    if outer is None:
        outer = view.order <= _OUTER_AUTO_MAX_ORDER
    if grid is None:
        grid = method_grid(view, pad=outer_level if outer else level)
    fields = _fields(_dedup(_tau1_family(view, n)), grid, jobs)
    gamma = _union_at_level(fields, grid, level)
    outer_region = None
    if outer:
        outer_region = ps.pseudospectrum(view.matrix, outer_level, grid,
                                         jobs=jobs)
    return gamma, outer_region


def tau1_membership(view: BlockMatrixView, n: int, eps: float, points,
                    cnorm_mode: str = "auto") -> np.ndarray:
    _check_method_n(view, n)
    pts = np.asarray(points, dtype=np.complex128).ravel()
    p = penalty_params(view, n, cnorm_mode)
    level = eps + eps_tau1(p)
    best = np.full(pts.shape, np.inf)
    for mat, embed, _ in _dedup(_tau1_family(view, n)):
        np.minimum(best, ps.smin_grid(mat, pts, embed=embed), out=best)
    return best <= level


def tau1_outer_level(view: BlockMatrixView, n: int, eps: float,
                     cnorm_mode: str = "auto") -> float:
    """Threshold of the right-hand sandwich set of the rectangular method."""
    p = penalty_params(view, n, cnorm_mode)
    return eps + eps_tau1(p) + 2.0 * p.c_norm


# ---------------------------------------------------------------------------
# Gershgorin baselines
# ---------------------------------------------------------------------------

def gershgorin(A, grid: ps.GridSpec | None = None, nx: int = 256,
               ny: int = 256):
    """Classical Gershgorin discs.

    Returns ``(region, discs)`` where discs is the list of (center, radius)
    pairs; the region marks nodes within some disc (computed analytically,
    no SVD involved).
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("gershgorin needs a square matrix")
    d = np.diag(A)
    radii = np.abs(A).sum(axis=1) - np.abs(d)
    discs = [(complex(c), float(r)) for c, r in zip(d, radii)]
    if grid is None:
        grid = ps.default_grid(A, pad=0.0, nx=nx, ny=ny)
    nodes = grid.nodes()
    mask = np.zeros(nodes.shape, dtype=bool)
    for c, r in discs:
        mask |= np.abs(nodes - c) <= r
    return ps.Region(grid, mask), discs


def gershgorin_block(view: BlockMatrixView, grid: ps.GridSpec | None = None,
                     jobs: int | None = None) -> ps.Region:
    """Block Gershgorin: union over k of the r_k-pseudospectra of the
    diagonal blocks, with r_k the sum of spectral norms of the off-diagonal
    blocks in block row k."""
    N = view.block_count
    radii = []
    for i in range(N):
        radii.append(sum(ps.spectral_norm(view.block(i, j))
                         for j in range(N) if j != i))
    if grid is None:
        grid = method_grid(view, pad=max(radii) if radii else 0.0)
    nodes = grid.nodes()
    mask = np.zeros(nodes.shape, dtype=bool)
    for i in range(N):
        vals = ps.smin_grid(view.block(i, i), nodes, jobs=jobs)
        mask |= vals <= radii[i]
    return ps.Region(grid, mask)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MethodReport:
    """Provenance record of one inclusion-set computation."""

    method: str
    n: int | None
    t: complex | None
    eps: float
    penalty: float
    c_norm: float
    cnorm_mode: str
    contributions: tuple
    region: ps.Region

    def to_json(self) -> str:
        g = self.region.grid
        doc = {
            "method": self.method,
            "n": self.n,
            "t": None if self.t is None else [self.t.real, self.t.imag],
            "eps": self.eps,
            "penalty": self.penalty,
            "c_norm": self.c_norm,
            "cnorm_mode": self.cnorm_mode,
            "contributions": [list(c) for c in self.contributions],
            "grid": {
                "re_min": g.re_min, "re_max": g.re_max,
                "im_min": g.im_min, "im_max": g.im_max,
                "nx": g.nx, "ny": g.ny,
            },
            "mask_rle": ps._mask_rle(self.region.mask),
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MethodReport":
        doc = json.loads(text)
        g = doc["grid"]
        grid = ps.GridSpec(g["re_min"], g["re_max"], g["im_min"], g["im_max"],
                           g["nx"], g["ny"])
        mask = ps._mask_from_rle(doc["mask_rle"], (grid.ny, grid.nx))
        t = doc["t"]
        return cls(
            method=doc["method"],
            n=doc["n"],
            t=None if t is None else complex(t[0], t[1]),
            eps=doc["eps"],
            penalty=doc["penalty"],
            c_norm=doc["c_norm"],
            cnorm_mode=doc["cnorm_mode"],
            contributions=tuple(tuple(c) for c in doc["contributions"]),
            region=ps.Region(grid, mask),
        )


def run_method(view: BlockMatrixView, method: str, n: int | None = None,
               t: complex | None = None, eps: float = 0.0,
               grid: ps.GridSpec | None = None, cnorm_mode: str = "auto",
               jobs: int | None = None,
               outer: bool | None = False) -> MethodReport:
    """Uniform front end over the five methods, producing a MethodReport."""
    mode = _resolve_cnorm_mode(view, cnorm_mode)
    if method in ("tau", "pi", "tau1"):
        if n is None:
            raise DomainError(f"method {method!r} needs n")
        params = penalty_params(view, n, mode)
    if method == "tau":
        main, edges = _tau_family(view, n)
        _, _, region = sigma_tau(view, n, eps, grid, mode, jobs)
        descs = tuple(d for d, _, _ in main + edges)
        return MethodReport("tau", n, None, eps, eps_tau(params),
                            params.c_norm, mode, descs, region)
    if method == "pi":
        if t is None:
            raise DomainError("pi method needs t")
        region = pi_method(view, n, t, eps, grid, mode, jobs)
        descs = tuple(d for d, _, _ in _pi_family(view, n, t))
        return MethodReport("pi", n, complex(t), eps, eps_pi(params),
                            params.c_norm, mode, descs, region)
    if method == "tau1":
        region, _ = tau1_method(view, n, eps, grid, mode, jobs, outer=outer)
        descs = tuple(d for d, _, _ in _tau1_family(view, n))
        return MethodReport("tau1", n, None, eps, eps_tau1(params),
                            params.c_norm, mode, descs, region)
    if method == "gersh":
        region, discs = gershgorin(view.matrix, grid)
        descs = tuple(("gersh", 1, k) for k in range(len(discs)))
        return MethodReport("gersh", None, None, eps, 0.0, 0.0, mode, descs,
                            region)
    if method == "block-gersh":
        region = gershgorin_block(view, grid, jobs)
        descs = tuple(("block-gersh", 1, k)
                      for k in range(view.block_count))
        return MethodReport("block-gersh", None, None, eps, 0.0, 0.0, mode,
                            descs, region)
    raise DomainError(f"unknown method {method!r}")
