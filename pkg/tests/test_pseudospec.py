import math

import numpy as np
import pytest

from specincl.errors import DomainError, EmptyRegionError, GridMismatch
from specincl.matrixcore import BlockPartition, embedding_selector, make_view, submatrix_tau1
from specincl.pseudospec import (
    GridSpec,
    Region,
    contour_extract,
    covers_points,
    default_grid,
    eig,
    hausdorff,
    pseudospectrum,
    region_from_json,
    region_from_points,
    region_intersect,
    region_to_csv,
    region_to_json,
    region_union,
    rethreshold,
    smin,
    smin_grid,
    smin_shifted,
)
from specincl.toeplitz import jordan, jordan_alpha, laplacian


def rand_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def jordan_plus(n, N=None, k=2):
    """Rectangular truncation of a Jordan block with its embedded identity."""
    N = N or n + 4
    view = make_view(jordan(N), BlockPartition((1,) * N))
    return submatrix_tau1(view, n, k), embedding_selector(n, k, view)


# ---------------------------------------------------------------------------
# smallest singular value engine
# ---------------------------------------------------------------------------

def test_smin_identity():
    for n in (1, 3, 7):
        assert smin(np.eye(n)) == pytest.approx(1.0, abs=1e-14)


def test_smin_jordan_is_singular():
    for n in (2, 5, 9):
        assert smin(jordan(n)) == pytest.approx(0.0, abs=1e-14)


def test_smin_shifted_jordan_closed_form():
    for n in (2, 4, 8):
        got = smin(jordan(n) - np.eye(n))
        assert got == pytest.approx(2 * math.sin(math.pi / (4 * n + 2)),
                                    abs=1e-12)


def test_smin_rejects_bad_shapes():
    with pytest.raises(DomainError):
        smin(np.zeros((2, 3)))            # wide
    with pytest.raises(DomainError):
        smin(np.zeros((0, 0)))


def test_smin_gram_oracle():
    # cross-check against the Hermitian eigensolve of E^H E
    rng = np.random.default_rng(1)
    for order in range(2, 9):
        for _ in range(8):
            E = rand_complex(rng, (order, order))
            gram = np.linalg.eigvalsh(E.conj().T @ E)
            expected = math.sqrt(max(gram[0], 0.0))
            norm = np.linalg.norm(E, 2)
            assert abs(smin(E) - expected) <= 1e-8 * norm


def test_smin_shifted_square_at_zero():
    rng = np.random.default_rng(2)
    E = rand_complex(rng, (6, 6))
    assert smin_shifted(E, 0.0) == pytest.approx(smin(E), abs=1e-14)


def test_smin_shifted_rectangular_closed_form():
    # the rectangular Jordan truncation: smin at |lam| = s follows
    # sqrt(1 + s^2 - 2 s cos(pi/(n+1))) for every argument of lam
    rng = np.random.default_rng(3)
    for n in (2, 3, 6):
        bp, ip = jordan_plus(n)
        c_n = math.cos(math.pi / (n + 1))
        val = smin_shifted(bp, c_n, ip)
        assert val == pytest.approx(math.sin(math.pi / (n + 1)), abs=1e-9)
        for s in (0.4, 1.0, 1.7):
            lam = s * np.exp(1j * rng.uniform(0, 2 * math.pi))
            expected = math.sqrt(1 + s * s - 2 * s * c_n)
            assert smin_shifted(bp, lam, ip) == pytest.approx(expected, abs=1e-9)


def test_smin_shifted_shape_mismatch():
    bp, ip = jordan_plus(3)
    with pytest.raises(DomainError):
        smin_shifted(bp, 1.0, ip[:-1])
    with pytest.raises(DomainError):
        smin_shifted(bp, 1.0)        # rectangular without embedding


def test_shift_lipschitz():
    rng = np.random.default_rng(4)
    E = rand_complex(rng, (7, 7))
    lams = rand_complex(rng, (1000, 2)) * 2
    vals = smin_grid(E, lams)
    gaps = np.abs(lams[:, 0] - lams[:, 1])
    assert np.all(np.abs(vals[:, 0] - vals[:, 1]) <= gaps + 1e-9)


def test_smin_grid_matches_scalar_calls():
    rng = np.random.default_rng(5)
    E = rand_complex(rng, (5, 5))
    lams = rand_complex(rng, 11)
    vals = smin_grid(E, lams)
    for lam, v in zip(lams, vals):
        assert v == pytest.approx(smin_shifted(E, lam), abs=1e-12)


# ---------------------------------------------------------------------------
# grid pseudospectra
# ---------------------------------------------------------------------------

def test_grid_spec_validation():
    with pytest.raises(DomainError):
        GridSpec(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        GridSpec(0.0, 1.0, 0.0, 1.0, nx=1)
    g = GridSpec(-1.0, 1.0, -2.0, 2.0, 5, 9)
    assert g.dx == pytest.approx(0.5)
    assert g.dy == pytest.approx(0.5)
    assert g.nodes().shape == (9, 5)


def test_pseudospectrum_normal_matrix_is_union_of_discs():
    d = np.array([1.0 + 0.0j, -0.5 + 0.5j, 0.0 - 1.0j])
    grid = GridSpec(-2.0, 2.0, -2.0, 2.0, 41, 41)
    eps = 0.613
    region = pseudospectrum(np.diag(d), eps, grid)
    dist = np.min(np.abs(grid.nodes()[..., None] - d[None, None, :]), axis=-1)
    assert np.array_equal(region.mask, dist <= eps)
    assert np.allclose(region.values, dist, atol=1e-12)


def test_pseudospectrum_jordan_disc_radius():
    n, eps = 5, 0.35
    alpha = jordan_alpha(n, eps)
    grid = GridSpec(-1.8, 1.8, -1.8, 1.8, 101, 101)
    region = pseudospectrum(jordan(n), eps, grid)
    nodes = grid.nodes()
    assert np.all(np.abs(nodes[region.mask]) <= alpha + grid.cell_diag)
    inner = np.abs(nodes) <= alpha - grid.cell_diag
    assert np.all(region.mask[inner])


def test_pseudospectrum_rectangular_empty_below_threshold():
    n = 4
    bp, ip = jordan_plus(n)
    eps = 0.9 * math.sin(math.pi / (n + 1))
    grid = GridSpec(-2, 2, -2, 2, 61, 61)
    region = pseudospectrum(bp, eps, grid, embed=ip)
    assert region.is_empty


def test_pseudospectrum_monotone_in_eps():
    rng = np.random.default_rng(6)
    E = rand_complex(rng, (6, 6))
    grid = GridSpec(-3, 3, -3, 3, 41, 41)
    region = pseudospectrum(E, 0.1, grid)
    bigger = rethreshold(region, 0.4)
    assert not np.any(region.mask & ~bigger.mask)


def test_direct_sum_law():
    rng = np.random.default_rng(7)
    E1 = rand_complex(rng, (3, 3))
    E2 = rand_complex(rng, (4, 4))
    E = np.zeros((7, 7), dtype=complex)
    E[:3, :3], E[3:, 3:] = E1, E2
    grid = GridSpec(-3, 3, -3, 3, 33, 33)
    eps = 0.27
    whole = pseudospectrum(E, eps, grid)
    parts = region_union([pseudospectrum(E1, eps, grid),
                          pseudospectrum(E2, eps, grid)])
    assert np.array_equal(whole.mask, parts.mask)


def test_pseudospectrum_jobs_deterministic():
    rng = np.random.default_rng(8)
    E = rand_complex(rng, (5, 5))
    grid = GridSpec(-2, 2, -2, 2, 37, 29)
    serial = pseudospectrum(E, 0.3, grid, jobs=None)
    threaded = pseudospectrum(E, 0.3, grid, jobs=2)
    assert np.array_equal(serial.values, threaded.values)
    assert np.array_equal(serial.mask, threaded.mask)


# ---------------------------------------------------------------------------
# region algebra
# ---------------------------------------------------------------------------

def make_disc(grid, center, radius):
    dist = np.abs(grid.nodes() - center)
    return Region(grid, dist <= radius, dist, radius)


def test_union_intersect_identities():
    grid = GridSpec(-2, 2, -2, 2, 41, 41)
    disc = make_disc(grid, 0.0, 1.0)
    empty = Region(grid, np.zeros((41, 41), dtype=bool))
    u = region_union([disc, empty])
    assert np.array_equal(u.mask, disc.mask)
    i = region_intersect(disc, disc)
    assert np.array_equal(i.mask, disc.mask)


def test_union_min_intersect_max_values():
    grid = GridSpec(-2, 2, -2, 2, 21, 21)
    a = make_disc(grid, -0.5, 0.8)
    b = make_disc(grid, 0.5, 0.8)
    u = region_union([a, b])
    assert np.array_equal(u.values, np.minimum(a.values, b.values))
    i = region_intersect(a, b)
    assert np.array_equal(i.values, np.maximum(a.values, b.values))


def test_grid_mismatch():
    a = make_disc(GridSpec(-2, 2, -2, 2, 21, 21), 0, 1)
    b = make_disc(GridSpec(-2, 2, -2, 2, 31, 31), 0, 1)
    with pytest.raises(GridMismatch):
        region_union([a, b])
    with pytest.raises(GridMismatch):
        hausdorff(a, b)


# ---------------------------------------------------------------------------
# Hausdorff distance
# ---------------------------------------------------------------------------

def test_hausdorff_identical_zero():
    grid = GridSpec(-2, 2, -2, 2, 61, 61)
    disc = make_disc(grid, 0.1, 0.9)
    assert hausdorff(disc, disc) == 0.0


def test_hausdorff_concentric_discs():
    grid = GridSpec(-3, 3, -3, 3, 201, 201)
    small = make_disc(grid, 0.0, 1.0)
    big = make_disc(grid, 0.0, 2.0)
    assert hausdorff(small, big) == pytest.approx(1.0, abs=grid.cell_diag)
    mid = make_disc(grid, 0.0, 1.15)
    assert hausdorff(small, mid) == pytest.approx(0.15, abs=grid.cell_diag)


def test_hausdorff_empty_region():
    grid = GridSpec(-1, 1, -1, 1, 11, 11)
    disc = make_disc(grid, 0, 0.5)
    empty = Region(grid, np.zeros((11, 11), dtype=bool))
    with pytest.raises(EmptyRegionError):
        hausdorff(disc, empty)


def test_covers_points():
    grid = GridSpec(-2, 2, -2, 2, 81, 81)
    disc = make_disc(grid, 0, 1.0)
    assert covers_points(disc, [0.0, 0.5 + 0.5j, 0.99]).all()
    assert not covers_points(disc, [1.8 + 0.9j]).any()


# ---------------------------------------------------------------------------
# contours
# ---------------------------------------------------------------------------

def loop_is_closed(loop):
    return np.allclose(loop[0], loop[-1])


def test_contour_full_grid_rectangle():
    grid = GridSpec(0, 1, 0, 2, 11, 11)
    full = Region(grid, np.ones((11, 11), dtype=bool))
    loops = contour_extract(full)
    assert len(loops) == 1
    assert loop_is_closed(loops[0])
    xs, ys = loops[0][:, 0], loops[0][:, 1]
    assert xs.min() < 0 and xs.max() > 1       # hugs the padded boundary
    assert ys.min() < 0 and ys.max() > 2


def test_contour_disc_single_loop():
    grid = GridSpec(-2, 2, -2, 2, 101, 101)
    disc = make_disc(grid, 0.0, 1.0)
    loops = contour_extract(disc)
    assert len(loops) == 1
    assert loop_is_closed(loops[0])
    radii = np.hypot(loops[0][:, 0], loops[0][:, 1])
    assert np.allclose(radii, 1.0, atol=2 * grid.cell_diag)


def test_contour_annulus_two_loops():
    # rectangular Jordan pseudospectrum: an annulus with analytic radii
    n = 4
    bp, ip = jordan_plus(n)
    s = math.sin(math.pi / (n + 1))
    c = math.cos(math.pi / (n + 1))
    eps = 1.3 * s
    a_minus = c - math.sqrt(eps**2 - s**2)
    a_plus = c + math.sqrt(eps**2 - s**2)
    grid = GridSpec(-1.6, 1.6, -1.6, 1.6, 161, 161)
    region = pseudospectrum(bp, eps, grid, embed=ip)
    loops = contour_extract(region)
    assert len(loops) == 2
    radii = sorted(float(np.hypot(l[:, 0], l[:, 1]).mean()) for l in loops)
    assert radii[0] == pytest.approx(a_minus, abs=2 * grid.cell_diag)
    assert radii[1] == pytest.approx(a_plus, abs=2 * grid.cell_diag)


def test_contour_empty_region():
    grid = GridSpec(-1, 1, -1, 1, 11, 11)
    with pytest.raises(EmptyRegionError):
        contour_extract(Region(grid, np.zeros((11, 11), dtype=bool)))


# ---------------------------------------------------------------------------
# eigensolver and defaults
# ---------------------------------------------------------------------------

def test_eig_examples():
    got = sorted(eig(np.diag([1.0, 2.0j])), key=lambda z: z.real)
    assert got[0] == pytest.approx(2.0j, abs=1e-12)
    assert got[1] == pytest.approx(1.0, abs=1e-12)
    lap4 = sorted(eig(laplacian(4)).real)
    phi = (1 + math.sqrt(5)) / 2
    assert np.allclose(lap4, [-phi, -phi + 1, phi - 1, phi], atol=1e-12)
    assert np.allclose(eig(jordan(5)), 0.0, atol=1e-12)


def test_default_grid_contains_gershgorin_box():
    rng = np.random.default_rng(9)
    A = rand_complex(rng, (6, 6))
    grid = default_grid(A, pad=0.5, nx=64, ny=64)
    d = np.diag(A)
    radii = np.abs(A).sum(axis=1) - np.abs(d)
    assert grid.re_min < (d.real - radii).min() - 0.5
    assert grid.re_max > (d.real + radii).max() + 0.5


def test_region_from_points_rasterizes():
    grid = GridSpec(-1, 1, -1, 1, 21, 21)
    region = region_from_points(grid, [0.0, 0.5 + 0.5j])
    assert region.mask.sum() == 2
    assert covers_points(region, [0.0, 0.5 + 0.5j]).all()


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------

def test_region_json_roundtrip():
    grid = GridSpec(-2, 2, -2, 2, 31, 31)
    disc = make_disc(grid, 0.3, 0.7)
    text = region_to_json(disc, params={"eps": 0.7})
    back = region_from_json(text)
    assert back.grid == grid
    assert np.array_equal(back.mask, disc.mask)


def test_region_csv(tmp_path):
    grid = GridSpec(0, 1, 0, 1, 3, 3)
    disc = make_disc(grid, 0.0, 0.75)
    path = tmp_path / "region.csv"
    region_to_csv(disc, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "re,im,smin,mask"
    assert len(lines) == 1 + 9
    first = lines[1].split(",")
    assert float(first[0]) == 0.0 and int(first[3]) == 1
