"""Block-matrix data model.

A square complex matrix together with a block partition gives a block view
``A = [a_ij]``.  From the view we split off the block-tridiagonal part ``B``
(blocks with ``|i - j| <= 1``) and the remaining part ``C = A - B``, and
extract the three families of submatrices that the inclusion-set methods are
built from: square truncations, periodised truncations, and one-sided
(rectangular) truncations of ``B``.

Block indices are 0-based throughout; truncations are addressed by the block
count ``n`` (1 <= n <= N) and the offset ``k`` (0 <= k <= N - n), so the
truncation covers block rows/columns ``k .. k+n-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PartitionError, PiMethodUnsupported
from .pseudospec import spectral_norm

__all__ = [
    "as_matrix",
    "BlockPartition",
    "BlockMatrixView",
    "make_view",
    "split_tridiagonal",
    "submatrix_tau",
    "submatrix_pi",
    "submatrix_tau1",
    "embedding_selector",
    "offdiag_norms",
    "remaining_norm",
    "detect_bandwidth",
    "resolve_partition",
]

_UNIT_MODULUS_TOL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Validate and normalize a dense complex matrix.

    Returns a read-only C-contiguous complex128 copy.  Rejects empty or
    non-2-D input and non-finite entries.
    """
    m = np.array(a, dtype=np.complex128, order="C", copy=True)
    if m.ndim != 2 or m.size == 0:
        raise DomainError(f"expected a nonempty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise DomainError("matrix entries must be finite")
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class BlockPartition:
    """Row/column block sizes ``m_1 .. m_N`` of an order-M matrix."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if len(sizes) < 2:
            raise PartitionError("a partition needs at least two blocks (N > 1)")
        if any(s < 1 for s in sizes):
            raise PartitionError(f"block sizes must be positive, got {sizes}")

    @property
    def count(self) -> int:
        return len(self.sizes)

    @property
    def order(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        """Cumulative block boundaries ``0 = o_0 < o_1 < ... < o_N = M``."""
        out = [0]
        for s in self.sizes:
            out.append(out[-1] + s)
        return tuple(out)

    @property
    def uniform(self) -> bool:
        return len(set(self.sizes)) == 1


@dataclass(frozen=True)
class BlockMatrixView:
    """A matrix together with a partition, exposing the blocks ``a_ij``."""

    matrix: np.ndarray
    partition: BlockPartition
    offsets: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "offsets", self.partition.offsets)

    @property
    def block_count(self) -> int:
        return self.partition.count

    @property
    def order(self) -> int:
        return self.matrix.shape[0]

    def block(self, i: int, j: int) -> np.ndarray:
        """Block ``a_ij`` (0-based); zero matrix for indices outside 0..N-1.

        Out-of-range indices follow the convention that the bi-infinite
        extension of the matrix is padded with zeros, which is what the
        periodised and rectangular truncations rely on at the edges.
        """
        n = self.block_count
        o = self.offsets
        ri = self.partition.sizes[i] if 0 <= i < n else self._edge_height(i)
        rj = self.partition.sizes[j] if 0 <= j < n else self._edge_height(j)
        if 0 <= i < n and 0 <= j < n:
            return self.matrix[o[i]:o[i + 1], o[j]:o[j + 1]]
        return np.zeros((ri, rj), dtype=np.complex128)

    def _edge_height(self, i: int) -> int:
        # sizes of the virtual zero blocks just outside the partition; the
        # one-sided truncation uses 1-row borders there
        return 1

    def slice_range(self, k: int, n: int) -> slice:
        """Scalar index range covered by block rows/cols ``k .. k+n-1``."""
        o = self.offsets
        return slice(o[k], o[k + n])


def make_view(A, p: BlockPartition) -> BlockMatrixView:
    """Attach a block partition to a square matrix."""
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise PartitionError(f"matrix must be square, got shape {A.shape}")
    if p.order != A.shape[0]:
        raise PartitionError(
            f"partition sizes sum to {p.order}, matrix order is {A.shape[0]}"
        )
    return BlockMatrixView(A, p)


def split_tridiagonal(view: BlockMatrixView) -> tuple[np.ndarray, np.ndarray]:
    """Split ``A`` into its block-tridiagonal part ``B`` and remainder ``C``.

    B keeps the blocks with ``|i - j| <= 1`` and is zero elsewhere; C is
    the entrywise complement, so ``B + C == A`` exactly (entries are copied,
    never recomputed).
    """
    A = view.matrix
    B = np.zeros_like(A)
    o = view.offsets
    N = view.block_count
    for i in range(N):
        j0, j1 = max(0, i - 1), min(N, i + 2)
        B[o[i]:o[i + 1], o[j0]:o[j1]] = A[o[i]:o[i + 1], o[j0]:o[j1]]
    C = A - B
    # restore the exact-complement guarantee where B was copied verbatim
    for i in range(N):
        j0, j1 = max(0, i - 1), min(N, i + 2)
        C[o[i]:o[i + 1], o[j0]:o[j1]] = 0.0
    B.setflags(write=False)
    C.setflags(write=False)
    return B, C


def _check_nk(view: BlockMatrixView, n: int, k: int) -> None:
    N = view.block_count
    if not (1 <= n <= N):
        raise IndexError(f"n must be in 1..{N}, got {n}")
    if not (0 <= k <= N - n):
        raise IndexError(f"k must be in 0..{N - n} for n={n}, got {k}")


def submatrix_tau(view: BlockMatrixView, n: int, k: int) -> np.ndarray:
    """Square truncation of the tridiagonal part: blocks ``k .. k+n-1``.

    Only the tridiagonal blocks are kept, so the result is block-tridiagonal
    even when the parent matrix is dense.
    """
    _check_nk(view, n, k)
    s = view.slice_range(k, n)
    sub = np.array(view.matrix[s, s], copy=True)
    # zero everything outside the block band |i-j| <= 1 within the window
    o = [x - view.offsets[k] for x in view.offsets[k:k + n + 1]]
    for i in range(n):
        for j in range(n):
            if abs(i - j) > 1:
                sub[o[i]:o[i + 1], o[j]:o[j + 1]] = 0.0
    return sub


def submatrix_pi(view: BlockMatrixView, n: int, k: int, t: complex) -> np.ndarray:
    """Periodised truncation: the square truncation plus wrap-around corners.

    The block at corner (0, n-1) gains ``t * b[k+n, k+n-1]`` and the corner
    (n-1, 0) gains ``conj(t) * b[k-1, k]``; blocks with an index outside the
    partition are zero.  For n <= 2 the corner terms are added onto the
    existing entries.  Requires a uniform partition and ``|t| = 1``.
    """
    if not view.partition.uniform:
        raise PiMethodUnsupported(
            "periodised truncations need a uniform partition"
        )
    t = complex(t)
    if abs(abs(t) - 1.0) > _UNIT_MODULUS_TOL:
        raise DomainError(f"|t| must be 1 (within {_UNIT_MODULUS_TOL}), got |t|={abs(t)}")
    t = t / abs(t)
    _check_nk(view, n, k)
    sub = submatrix_tau(view, n, k)
    m = view.partition.sizes[0]
    lower = view.block(k + n, k + n - 1)   # first block below the window
    upper = view.block(k - 1, k)           # first block above the window
    if lower.shape != (m, m):
        lower = np.zeros((m, m), dtype=np.complex128)
    if upper.shape != (m, m):
        upper = np.zeros((m, m), dtype=np.complex128)
    sub[0:m, (n - 1) * m:n * m] += t * lower
    sub[(n - 1) * m:n * m, 0:m] += np.conj(t) * upper
    return sub


def submatrix_tau1(view: BlockMatrixView, n: int, k: int) -> np.ndarray:
    """One-sided (rectangular) truncation of the tridiagonal part.

    The square truncation bordered above by the block ``b[k-1, k]`` placed in
    the first block column, and below by ``b[k+n, k+n-1]`` in the last block
    column.  At k = 0 and k = N - n the missing border block is a single zero
    row, which leaves all singular values unchanged but keeps the shapes
    uniform.  The result contains every nonzero block of B whose column lies
    in the window.
    """
    _check_nk(view, n, k)
    mid = submatrix_tau(view, n, k)
    width = mid.shape[1]
    o = [x - view.offsets[k] for x in view.offsets[k:k + n + 1]]
    top_block = view.block(k - 1, k)
    bot_block = view.block(k + n, k + n - 1)
    top = np.zeros((top_block.shape[0], width), dtype=np.complex128)
    top[:, o[0]:o[1]] = top_block
    bot = np.zeros((bot_block.shape[0], width), dtype=np.complex128)
    bot[:, o[n - 1]:o[n]] = bot_block
    return np.vstack([top, mid, bot])


def embedding_selector(n: int, k: int, view: BlockMatrixView) -> np.ndarray:
    """Rectangular identity matching the one-sided truncation's shape.

    Identity in the middle band, zero border rows above and below; used to
    form shifted rectangular matrices ``B+ - lambda * I+``.
    """
    _check_nk(view, n, k)
    width = view.offsets[k + n] - view.offsets[k]
    top_h = view.block(k - 1, k).shape[0]
    bot_h = view.block(k + n, k + n - 1).shape[0]
    out = np.zeros((top_h + width + bot_h, width), dtype=np.complex128)
    out[top_h:top_h + width, :] = np.eye(width)
    return out


def offdiag_norms(view: BlockMatrixView) -> tuple[float, float, float]:
    """Max spectral norms on the first block sub/superdiagonal.

    Returns ``(r_L, r_U, r)`` with ``r = r_L + r_U``.
    """
    N = view.block_count
    r_L = 0.0
    r_U = 0.0
    for i in range(N - 1):
        r_L = max(r_L, spectral_norm(view.block(i + 1, i)))
        r_U = max(r_U, spectral_norm(view.block(i, i + 1)))
    return r_L, r_U, r_L + r_U


def remaining_norm(C, mode: str = "exact") -> float:
    """Spectral norm of the remaining part, or an upper bound for it.

    mode 'exact' returns ||C||_2; 'frobenius' the Frobenius norm; 'mixed' the
    bound sqrt(||C||_1 ||C||_inf).  Both alternatives dominate the exact
    spectral norm.
    """
    C = np.asarray(C, dtype=np.complex128)
    if C.size == 0 or not np.any(C):
        return 0.0
    if mode == "exact":
        return spectral_norm(C)
    if mode == "frobenius":
        return float(np.linalg.norm(C, "fro"))
    if mode == "mixed":
        absC = np.abs(C)
        one = float(absC.sum(axis=0).max())
        inf = float(absC.sum(axis=1).max())
        return float(np.sqrt(one * inf))
    raise DomainError(f"unknown norm mode {mode!r}")


def detect_bandwidth(A) -> int:
    """Smallest w such that A[i, j] = 0 whenever |i - j| > w."""
    A = np.asarray(A)
    nz = np.argwhere(A != 0)
    if nz.size == 0:
        return 0
    return int(np.max(np.abs(nz[:, 0] - nz[:, 1])))


def resolve_partition(directive, A) -> BlockPartition:
    """Build a partition from a directive.

    Accepts an explicit size list (sequence or comma-separated string), the
    string ``uniform:m``, or ``auto-band`` which detects the band-width and
    delegates to the banded-Toeplitz partition recipe.
    """
    A = as_matrix(A)
    M = A.shape[0]
    if isinstance(directive, str):
        d = directive.strip()
        if d.startswith("uniform:"):
            m = int(d.split(":", 1)[1])
            if m < 1 or M % m != 0 or M // m < 2:
                raise PartitionError(
                    f"uniform block size {m} does not split order {M} into N > 1 blocks"
                )
            return BlockPartition((m,) * (M // m))
        if d == "auto-band":
            from .toeplitz import banded_partition

            w = max(1, detect_bandwidth(A))
            return banded_partition(M, w)
        sizes = tuple(int(x) for x in d.replace(";", ",").split(",") if x.strip())
    else:
        sizes = tuple(int(x) for x in directive)
    p = BlockPartition(sizes)
    if p.order != M:
        raise PartitionError(f"sizes {sizes} sum to {p.order}, matrix order is {M}")
    return p
