"""Seeded matrix corpus and containment verification harness.

The verifier draws random dense, banded, and Toeplitz matrices, assigns each
a block partition, and checks that every eigenvalue lies in each method's
inclusion set (pointwise membership, which is sharper than any grid).  The
rectangular method's sandwich bound is checked at the eigenvalues and at
random probe points.  An adversarial mode rescales the penalties to confirm
that the harness actually detects violations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import inclusion as inc
from . import pseudospec as ps
from .matrixcore import BlockPartition, make_view
from .penalty import PenaltyParams, eps_pi, eps_tau, eps_tau1
from .toeplitz import build_toeplitz, toeplitz_spec

__all__ = ["CorpusItem", "build_corpus", "VerifyRecord", "verify_containment"]


@dataclass(frozen=True)
class CorpusItem:
    name: str
    kind: str
    matrix: np.ndarray
    partition: BlockPartition


def _partition_for(order: int, rng) -> BlockPartition:
    """Scalar partition for small orders, blocks of 3 (or a 3/4 mix when the
    order is not divisible) otherwise, keeping the block count moderate."""
    if order <= 12:
        return BlockPartition((1,) * order)
    for m in (3, 4, 5):
        if order % m == 0:
            return BlockPartition((m,) * (order // m))
    N = order // 3
    r = order - 3 * N
    return BlockPartition((3,) * (N - r) + (4,) * r)


def build_corpus(seed: int = 1, count: int = 60,
                 orders=(6, 40)) -> list[CorpusItem]:
    """Deterministic mix of dense, banded, and Toeplitz matrices."""
    rng = np.random.default_rng(seed)
    lo, hi = orders
    items = []
    kinds = ["dense", "banded", "toeplitz"]
    for i in range(count):
        kind = kinds[i % 3]
        order = int(rng.integers(lo, hi + 1))
        if kind == "dense":
            A = rng.standard_normal((order, order)) \
                + 1j * rng.standard_normal((order, order))
            A /= np.sqrt(order)
        elif kind == "banded":
            w = int(rng.integers(1, max(2, order // 4)))
            A = np.zeros((order, order), dtype=np.complex128)
            for k in range(-w, w + 1):
                diag = rng.standard_normal(order - abs(k)) \
                    + 1j * rng.standard_normal(order - abs(k))
                A += np.diag(diag, k)
        else:
            width = int(rng.integers(1, 4))
            coeffs = {}
            for j in range(-width, width + 1):
                coeffs[j] = complex(rng.standard_normal(), rng.standard_normal())
            A = build_toeplitz(toeplitz_spec(coeffs), order)
        items.append(CorpusItem(f"{kind}-{i:02d}-M{order}", kind,
                                np.asarray(A, dtype=np.complex128),
                                _partition_for(order, rng)))
    return items


@dataclass(frozen=True)
class VerifyRecord:
    matrix: str
    method: str
    n: int
    t: complex | None
    eps: float
    contained: bool
    margin: float


def verify_containment(items, eps_values=(0.0, 0.1), t_values=(1, -1, 1j),
                       penalty_scale: float = 1.0,
                       max_n: int | None = None,
                       rng_seed: int = 7) -> list[VerifyRecord]:
    """Containment records for every (matrix, method, n, eps) combination.

    ``penalty_scale`` < 1 shrinks the inclusion levels (negative control:
    Theorem-guaranteed containment should then start to fail).  The sandwich
    side of the rectangular method is checked at the eigenvalues plus a few
    random probe points inside the inclusion set.
    """
    rng = np.random.default_rng(rng_seed)
    records = []
    for item in items:
        view = make_view(item.matrix, item.partition)
        lams = ps.eig(item.matrix)
        N = view.block_count
        n_values = range(1, N if max_n is None else min(N, max_n + 1))
        for n in n_values:
            for eps in eps_values:
                records.extend(
                    _check_all(item, view, n, eps, lams, t_values,
                               penalty_scale, rng))
    return records


def _scaled_inside(best: np.ndarray, eps: float, penalty: float,
                   scale: float) -> tuple[np.ndarray, float]:
    level = eps + scale * penalty
    return best <= level + 1e-12, level


def _min_field(groups, pts) -> np.ndarray:
    best = np.full(pts.shape, np.inf)
    for mat, embed, _ in groups:
        np.minimum(best, ps.smin_grid(mat, pts, embed=embed), out=best)
    return best


def _check_all(item, view, n, eps, lams, t_values, scale, rng):
    out = []
    p = inc.penalty_params(view, n)

    # tau
    main, edges = inc._tau_family(view, n)
    best = _min_field(inc._dedup(main + edges), lams)
    inside, level = _scaled_inside(best, eps, eps_tau(p), scale)
    if n > 2:
        p_hat = PenaltyParams.from_offdiag(p.r_L, p.r_U, p.c_norm, n - 2)
        best_hat = _min_field(inc._dedup(main), lams)
        hat_inside, _ = _scaled_inside(best_hat, eps, eps_tau(p_hat), scale)
        inside &= hat_inside
    margin = float((eps + scale * eps_tau(p)) - best.max())
    out.append(VerifyRecord(item.name, "tau", n, None, eps,
                            bool(inside.all()), margin))

    # pi (uniform partitions only)
    if view.partition.uniform:
        for t in t_values:
            best = _min_field(inc._dedup(inc._pi_family(view, n, t)), lams)
            inside, level = _scaled_inside(best, eps, eps_pi(p), scale)
            out.append(VerifyRecord(item.name, "pi", n, complex(t), eps,
                                    bool(inside.all()),
                                    float(level - best.max())))

    # tau1 + sandwich
    best = _min_field(inc._dedup(inc._tau1_family(view, n)), lams)
    inside, level = _scaled_inside(best, eps, eps_tau1(p), scale)
    out.append(VerifyRecord(item.name, "tau1", n, None, eps,
                            bool(inside.all()), float(level - best.max())))

    probes = lams[best <= level + 1e-12]
    if probes.size:
        box = np.abs(item.matrix).sum(axis=1).max() + eps
        extra = (rng.uniform(-box, box, 8) + 1j * rng.uniform(-box, box, 8))
        inner = _min_field(inc._dedup(inc._tau1_family(view, n)), extra)
        probes = np.concatenate([probes, extra[inner <= level + 1e-12]])
        outer_level = eps + scale * (eps_tau1(p) + 2.0 * p.c_norm)
        outer_vals = ps.smin_grid(view.matrix, probes)
        ok = bool(np.all(outer_vals <= outer_level + 1e-12))
        out.append(VerifyRecord(item.name, "tau1-sandwich", n, None, eps, ok,
                                float(outer_level - outer_vals.max())))
    return out
