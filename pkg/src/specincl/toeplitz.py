"""Toeplitz builders, closed-form oracles, and Hausdorff convergence studies.

The Jordan block (superdiagonal of ones) and discrete Laplacian (sub- and
superdiagonal of ones) admit closed forms for shifted smallest singular
values, pseudospectral radii, and penalty roots; they serve as independent
oracles for the grid engine and as the canonical study subjects.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import inclusion as inc
from . import pseudospec as ps
from .errors import DomainError
from .matrixcore import BlockPartition, make_view
from .penalty import eps_tau, eps_tau1

__all__ = [
    "ToeplitzSpec",
    "toeplitz_spec",
    "spec_to_json",
    "spec_from_json",
    "build_toeplitz",
    "banded_partition",
    "wiener_tail",
    "jordan",
    "laplacian",
    "jordan_symbol",
    "laplacian_symbol",
    "jordan_phi",
    "jordan_vn",
    "jordan_alpha",
    "jordan_annulus",
    "laplacian_spectrum",
    "laplacian_theta",
    "StudyRow",
    "StudyResult",
    "convergence_study",
]

_HERMITIAN_TOL = 1e-14


@dataclass(frozen=True)
class ToeplitzSpec:
    """Symbol coefficients on a finite window, with band-width metadata.

    ``coeffs`` maps the diagonal offset j to a_j (entry (i, k) of the matrix
    is a_{i-k}); ``bandwidth`` is the smallest w with a_j = 0 for |j| > w for
    banded symbols, or the declared truncation window for Wiener-class ones.
    """

    coeffs: tuple[tuple[int, complex], ...]
    bandwidth: int
    hermitian: bool

    def coeff(self, j: int) -> complex:
        for off, val in self.coeffs:
            if off == j:
                return val
        return 0.0 + 0.0j

    @property
    def window(self) -> int:
        return max((abs(j) for j, _ in self.coeffs), default=0)


def toeplitz_spec(coeffs, bandwidth: int | None = None,
                  hermitian: bool | None = None) -> ToeplitzSpec:
    """Canonicalize a coefficient table into a ToeplitzSpec.

    Zero coefficients are dropped; the Hermitian flag is verified (when
    given) or detected against a_{-j} == conj(a_j).
    """
    if isinstance(coeffs, dict):
        items = coeffs.items()
    else:
        items = coeffs
    table: dict[int, complex] = {}
    for j, val in items:
        v = complex(val)
        if v != 0:
            table[int(j)] = table.get(int(j), 0.0) + v
    pairs = tuple(sorted((j, v) for j, v in table.items() if v != 0))
    width = max((abs(j) for j, _ in pairs), default=0)
    if bandwidth is None:
        bandwidth = width
    if bandwidth < 0:
        raise DomainError("bandwidth must be nonnegative")
    is_herm = all(
        abs(table.get(-j, 0.0) - np.conj(v)) <= _HERMITIAN_TOL
        for j, v in table.items()
    )
    if hermitian is None:
        hermitian = is_herm
    elif hermitian and not is_herm:
        raise DomainError("coefficients are not Hermitian (a_{-j} != conj(a_j))")
    return ToeplitzSpec(pairs, int(bandwidth), bool(hermitian))


def spec_to_json(spec: ToeplitzSpec) -> str:
    doc = {
        "coeffs": [[j, v.real, v.imag] for j, v in spec.coeffs],
        "bandwidth": spec.bandwidth,
        "hermitian": spec.hermitian,
    }
    return json.dumps(doc, sort_keys=True)


def spec_from_json(text: str) -> ToeplitzSpec:
    doc = json.loads(text)
    coeffs = [(int(j), complex(re, im)) for j, re, im in doc["coeffs"]]
    return toeplitz_spec(coeffs, doc.get("bandwidth"), doc.get("hermitian"))


def build_toeplitz(spec: ToeplitzSpec, M: int) -> np.ndarray:
    """Order-M Toeplitz matrix with entry (i, k) = a_{i-k}."""
    if M < 2:
        raise DomainError("Toeplitz build needs M > 1")
    A = np.zeros((M, M), dtype=np.complex128)
    for j, v in spec.coeffs:
        if abs(j) < M:
            A += v * np.eye(M, k=-j, dtype=np.complex128)
    return A


def banded_partition(M: int, w: int) -> BlockPartition:
    """Block sizes that make a band-width-w Toeplitz matrix block-tridiagonal.

    N = floor(M/w) blocks; the remainder r = M - w*N is absorbed by widening
    the last r blocks to w + 1.
    """
    if w < 1:
        raise DomainError("band-width must be >= 1")
    if M < 2 * w:
        raise DomainError(f"need M >= 2w for a valid partition, got M={M}, w={w}")
    N = M // w
    r = M - w * N
    sizes = (w,) * (N - r) + (w + 1,) * r
    return BlockPartition(sizes)


def wiener_tail(spec: ToeplitzSpec, w: int) -> float:
    """Tail sum ``sum_{j>w} |a_j| + |a_{-j}|`` over the stored window.

    Upper-bounds the remaining-part norm of the width-w block split; for a
    truncated Wiener symbol it is a lower bound of the true tail.
    """
    if w < 1:
        raise DomainError("w must be >= 1")
    return float(sum(abs(v) for j, v in spec.coeffs if abs(j) > w))


def jordan_symbol() -> ToeplitzSpec:
    return toeplitz_spec({-1: 1.0})


def laplacian_symbol() -> ToeplitzSpec:
    return toeplitz_spec({-1: 1.0, 1: 1.0})


def jordan(M: int) -> np.ndarray:
    """Order-M Jordan block at 0 (ones on the superdiagonal)."""
    if M < 1:
        raise DomainError("M must be >= 1")
    return np.eye(M, k=1, dtype=np.complex128) if M > 1 else np.zeros((1, 1), dtype=np.complex128)


def laplacian(M: int) -> np.ndarray:
    """Order-M discrete Laplacian (ones on both first off-diagonals)."""
    if M < 1:
        raise DomainError("M must be >= 1")
    if M == 1:
        return np.zeros((1, 1), dtype=np.complex128)
    return (np.eye(M, k=1) + np.eye(M, k=-1)).astype(np.complex128)


# ---------------------------------------------------------------------------
# Jordan block closed forms
# ---------------------------------------------------------------------------

def _bisect(f, lo: float, hi: float, iters: int = 200) -> float:
    flo = f(lo)
    if flo == 0.0:
        return lo
    fhi = f(hi)
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise DomainError("no sign change on bracket")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0 or (hi - lo) < 1e-15:
            return mid
        if flo * fmid <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def jordan_phi(n: int, s: float) -> float:
    """Root of ``s sin((n+1)t) = sin(nt)`` in [pi/(2n+1), pi/(n+1))."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if s < 1:
        raise DomainError("closed form needs s >= 1")
    lo = math.pi / (2 * n + 1)
    if s == 1.0:
        return lo
    hi = math.pi / (n + 1)
    return _bisect(lambda t: s * math.sin((n + 1) * t) - math.sin(n * t), lo, hi)


def jordan_vn(n: int, s: float) -> float:
    """Shifted smallest singular value ``smin(V_n - s I)`` of the Jordan block.

    Closed form ``sqrt(1 + s^2 - 2 s cos(phi_n(s)))`` for s >= 1; the grid
    engine's SVD for 0 <= s < 1.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if s < 0:
        raise DomainError("s must be >= 0")
    if s >= 1.0:
        phi = jordan_phi(n, s)
        return math.sqrt(max(0.0, 1.0 + s * s - 2.0 * s * math.cos(phi)))
    return ps.smin(jordan(n) - s * np.eye(n))


def jordan_eps_n(n: int) -> float:
    """Square-truncation penalty of the Jordan block, ``2 sin(pi/(4n+2))``."""
    return 2.0 * math.sin(math.pi / (4 * n + 2))


def jordan_alpha(n: int, eps: float) -> float:
    """Pseudospectral radius: the unique s with ``v_n(s) = eps``.

    For eps >= eps_n the closed-form bracket ``1+e <= alpha <= 1+e+...``
    localizes the root; below eps_n the numerically evaluated v_n is
    bisected on [0, 1].
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if eps < 0:
        raise DomainError("eps must be >= 0")
    eps_n = jordan_eps_n(n)
    if eps < eps_n:
        return _bisect(lambda s: jordan_vn(n, s) - eps, 0.0, 1.0)
    e = eps - eps_n
    if e == 0.0:
        return 1.0
    lower = 1.0 + e
    upper = lower + 2.0 * eps_n * e / (e + math.sqrt(2.0 * eps_n * e + e * e))
    f = lambda s: jordan_vn(n, s) - eps
    # widen against floating-point droop at the analytic bracket ends
    lo, hi = lower, upper
    if f(lo) > 0:
        lo = max(1.0, lower - 1e-9)
    if f(hi) < 0:
        hi = upper + 1e-9
    return _bisect(f, lo, hi)


def jordan_annulus(n: int, eps: float):
    """Radii of the rectangular-truncation pseudospectrum annulus.

    Returns None when the level is below ``sin(pi/(n+1))`` (empty set), else
    the pair ``cos(pi/(n+1)) -/+ sqrt(eps^2 - sin^2(pi/(n+1)))``.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if eps < 0:
        raise DomainError("eps must be >= 0")
    s = math.sin(math.pi / (n + 1))
    if eps < s:
        return None
    c = math.cos(math.pi / (n + 1))
    root = math.sqrt(max(0.0, eps * eps - s * s))
    return (c - root, c + root)


# ---------------------------------------------------------------------------
# discrete Laplacian closed forms
# ---------------------------------------------------------------------------

def laplacian_spectrum(M: int) -> np.ndarray:
    """Eigenvalues ``2 cos(j pi / (M+1))``, sorted descending."""
    if M < 1:
        raise DomainError("M must be >= 1")
    j = np.arange(1, M + 1, dtype=np.float64)
    return 2.0 * np.cos(j * math.pi / (M + 1))


def laplacian_theta(n: int) -> float:
    """Penalty root via ``2 cos((n+1)t/2) = cos((n-1)t/2)``.

    Unique root in (pi/(n+3), pi/(n+2)]; agrees with the general root
    solver at r_L = r_U = 1.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if n == 1:
        return math.pi / 3.0
    lo = math.pi / (n + 3)
    hi = math.pi / (n + 2)
    return _bisect(
        lambda t: 2.0 * math.cos((n + 1) * t / 2.0) - math.cos((n - 1) * t / 2.0),
        lo, hi,
    )


# ---------------------------------------------------------------------------
# convergence studies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StudyRow:
    M: int
    n: int
    w: int
    eps: float
    method: str
    d_h: float
    cell: float


@dataclass(frozen=True)
class StudyResult:
    rows: tuple[StudyRow, ...]
    monotone_within_slack: bool
    slack_cells: float = 2.0

    def to_csv(self) -> str:
        lines = ["M,n,w,eps,method,d_H,cell_size"]
        for r in self.rows:
            lines.append(
                f"{r.M},{r.n},{r.w},{r.eps!r},{r.method},{r.d_h!r},{r.cell!r}"
            )
        return "\n".join(lines) + "\n"


def convergence_study(spec: ToeplitzSpec, eps: float, schedule,
                      grid_nodes: int = 256,
                      jobs: int | None = None) -> StudyResult:
    """Hausdorff distances between inclusion sets and reference pseudospectra.

    Each schedule row (M, n, w) builds the order-M Toeplitz matrix with the
    width-w block partition and compares the inclusion set against the
    reference set on a shared grid: the grid smin sweep of the full matrix
    for eps > 0, the rasterized eigenvalues for eps = 0 (Hermitian symbols
    only).  Banded symbols (within w) use the square-truncation method,
    symbols with a tail use the rectangular one.  The monotonicity report
    checks non-strict decrease (2-cell slack) between consecutive rows from
    n >= 4 on.
    """
    if eps < 0:
        raise DomainError("eps must be >= 0")
    if eps == 0 and not spec.hermitian:
        raise DomainError("eps = 0 studies need a Hermitian symbol")
    schedule = [(int(M), int(n), int(w)) for M, n, w in schedule]
    if not schedule:
        raise DomainError("empty schedule")

    # one shared grid large enough for every row
    views = {}
    penalties = []
    methods = []
    for M, n, w in schedule:
        A = build_toeplitz(spec, M)
        part = banded_partition(M, w)
        view = make_view(A, part)
        views[(M, w)] = view
        banded = wiener_tail(spec, w) == 0.0
        methods.append("tau" if banded else "tau1")
        p = inc.penalty_params(view, n)
        penalties.append(eps_tau(p) if banded else eps_tau1(p))
    M_big = max(M for M, _, _ in schedule)
    A_big = build_toeplitz(spec, M_big)
    grid = ps.default_grid(A_big, pad=eps + max(penalties),
                           nx=grid_nodes, ny=grid_nodes)

    references: dict[int, ps.Region] = {}

    def reference(M: int) -> ps.Region:
        if M not in references:
            A = build_toeplitz(spec, M)
            if eps > 0:
                references[M] = ps.pseudospectrum(A, eps, grid, jobs=jobs)
            else:
                references[M] = ps.region_from_points(grid, ps.eig(A))
        return references[M]

    rows = []
    for (M, n, w), method in zip(schedule, methods):
        view = views[(M, w)]
        if method == "tau":
            _, _, region = inc.sigma_tau(view, n, eps, grid=grid, jobs=jobs)
        else:
            region, _ = inc.tau1_method(view, n, eps, grid=grid, jobs=jobs,
                                        outer=False)
        d = ps.hausdorff(region, reference(M))
        rows.append(StudyRow(M, n, w, eps, method, d, grid.cell_diag))

    monotone = True
    slack = 2.0 * grid.cell_diag
    for prev, cur in zip(rows, rows[1:]):
        if prev.n >= 4 and cur.d_h > prev.d_h + slack:
            monotone = False
    return StudyResult(tuple(rows), monotone)
