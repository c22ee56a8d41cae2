import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermolyap import load_example
from thermolyap.convex import (GridFunction, asymptotic_slope, biconjugate,
                               biconjugate_check, conjugate,
                               directional_derivative, legendre_infimum,
                               subdifferential, subgradient_polygon)

EX61 = load_example("ex6_1")
EX62 = load_example("ex6_2")
EX63 = load_example("ex6_3")


def quad():
    grid = np.linspace(-3, 3, 601)
    return GridFunction(grid, grid ** 2 / 2)


def test_quadratic_is_nearly_self_conjugate():
    f = quad()
    s = np.linspace(-2.5, 2.5, 101)
    fstar = conjugate(f, s)
    h = 0.01
    assert np.abs(fstar.values - s ** 2 / 2).max() <= h ** 2 / 2 + 1e-12


def test_conjugate_of_affine():
    grid = np.linspace(-2, 2, 41)
    f = GridFunction(grid, 1.5 * grid + 0.25)
    fstar = conjugate(f, np.array([0.5, 1.5, 2.5]))
    assert fstar.values[1] == pytest.approx(-0.25, abs=1e-12)
    assert fstar.meta["edge_active"][0] and fstar.meta["edge_active"][2]
    assert not fstar.meta["edge_active"][1]


def test_conjugate_of_the_affine_example_pressure():
    gf = EX61.pressure.grid_function()
    fstar = conjugate(gf, np.array([0.5, 1.0, 1.5]))
    assert fstar.values[1] == pytest.approx(-1.0, abs=1e-9)


def test_legendre_descends_past_the_edge():
    gf = EX61.pressure.grid_function()
    res = legendre_infimum(gf, 2.0, domain="positive-q")
    assert not res.finite and np.isneginf(res.value)


def test_legendre_interior_minimum_of_abs():
    gf = EX62.pressure.grid_function()
    res = legendre_infimum(gf, 0.0, domain="all-q")
    assert res.finite
    assert res.value == pytest.approx(1.0, abs=1e-12)
    assert res.argmin == pytest.approx(0.0, abs=1e-12)


def test_legendre_refinement_polishes_the_argmin():
    grid = np.linspace(-2, 2, 21)
    gf = GridFunction(grid, (grid - 0.1234) ** 2)
    res = legendre_infimum(gf, 0.0, domain="all-q",
                           refine=lambda q: (q - 0.1234) ** 2)
    assert res.argmin == pytest.approx(0.1234, abs=1e-6)
    assert res.value == pytest.approx(0.0, abs=1e-10)


def test_subdifferential_of_abs_at_zero():
    gf = EX62.pressure.grid_function()
    iv = subdifferential(gf, 0.0)
    assert iv.left == pytest.approx(-1.0, abs=2e-3)
    assert iv.right == pytest.approx(1.0, abs=2e-3)


def test_subdifferential_of_affine_is_degenerate():
    gf = EX61.pressure.grid_function()
    iv = subdifferential(gf, 2.0)
    assert iv.left == pytest.approx(1.0, abs=1e-9)
    assert iv.right == pytest.approx(1.0, abs=1e-9)


def test_subdifferential_of_a_smooth_function():
    grid = np.arange(-2, 2.0001, 0.01)
    gf = GridFunction(grid, grid ** 2)
    iv = subdifferential(gf, 1.0)
    assert iv.left == pytest.approx(2.0 - 0.01, abs=1e-9)
    assert iv.right == pytest.approx(2.0 + 0.01, abs=1e-9)


def test_subdifferential_boundary_is_an_error():
    gf = EX61.pressure.grid_function()
    with pytest.raises(ValueError):
        subdifferential(gf, 4.0)


def test_subdifferential_monotone_along_the_grid():
    gf = EX62.pressure.grid_function()
    a = subdifferential(gf, -1.0)
    b = subdifferential(gf, 1.0)
    assert a.right <= b.left + 2 * gf.convexity_defect + 1e-12


def test_asymptotic_slopes_of_abs():
    gf = EX62.pressure.grid_function()
    right = asymptotic_slope(gf, +1)
    left = asymptotic_slope(gf, -1)
    assert right.slope == pytest.approx(1.0, abs=1e-9) and right.monotone
    assert left.slope == pytest.approx(-1.0, abs=1e-9) and left.monotone


def test_asymptotic_slope_of_a_line_is_exact():
    grid = np.linspace(0, 5, 11)
    gf = GridFunction(grid, 2.5 * grid - 1)
    assert asymptotic_slope(gf, +1).slope == pytest.approx(2.5, abs=1e-12)


def test_biconjugate_of_affine_is_exact():
    grid = np.linspace(-1, 3, 17)
    f = GridFunction(grid, 0.7 * grid - 2)
    rep = biconjugate_check(f)
    assert rep.max_deviation <= 1e-12


def test_biconjugate_recovers_convex_hull_of_a_bump():
    grid = np.linspace(0, 4, 41)
    vals = np.abs(grid - 2.0)
    vals[15:25] += 0.5  # concave bump
    f = GridFunction(grid, vals)
    rep = biconjugate_check(f)
    # independent hull oracle via scipy on the graph points
    from scipy.spatial import ConvexHull
    pts = np.column_stack([grid, vals])
    hull = ConvexHull(pts)
    hull_vals = np.full_like(vals, np.inf)
    for simplex in hull.simplices:
        i, j = simplex
        xi, xj = grid[i], grid[j]
        if xi == xj:
            continue
        lo, hi = (i, j) if xi < xj else (j, i)
        mask = (grid >= grid[lo]) & (grid <= grid[hi])
        t = (grid[mask] - grid[lo]) / (grid[hi] - grid[lo])
        cand = vals[lo] * (1 - t) + vals[hi] * t
        hull_vals[mask] = np.minimum(hull_vals[mask], cand)
    assert np.abs(rep.fstarstar.values - hull_vals).max() <= 1e-9
    assert rep.max_deviation <= rep.bound + 1e-12
    # the bump region really deviates
    assert np.abs(rep.fstarstar.values - vals).max() > 0.1


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=4, max_size=12, unique=True),
       st.floats(-3, 3))
def test_order_reversal_and_shift_covariance(xs, c):
    grid = np.sort(np.asarray(xs))
    rng = np.random.default_rng(1)
    vals = np.cumsum(rng.uniform(-1, 1, grid.size))
    f = GridFunction(grid, vals)
    g = GridFunction(grid, vals - 1.0)  # g <= f... f >= g pointwise
    s = np.linspace(-4, 4, 33)
    f_star = conjugate(f, s)
    g_star = conjugate(g, s)
    # f >= g pointwise implies f* <= g* pointwise
    assert np.all(f_star.values <= g_star.values + 1e-12)
    shifted = conjugate(GridFunction(grid, vals + c), s)
    assert np.abs(shifted.values - (f_star.values - c)).max() <= 1e-12


def test_biconjugate_never_exceeds_the_function():
    rng = np.random.default_rng(2)
    for _ in range(20):
        grid = np.sort(rng.uniform(-3, 3, 15))
        grid = grid[np.concatenate([[True], np.diff(grid) > 1e-9])]
        if grid.size < 3:
            continue
        f = GridFunction(grid, rng.normal(size=grid.size))
        fss = biconjugate(f)
        assert np.all(fss.values <= f.values + 1e-9)


def test_legendre_value_is_concave_in_alpha():
    gf = GridFunction(np.linspace(-4, 4, 81),
                      np.log(np.cosh(np.linspace(-4, 4, 81))))
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = np.sort(rng.uniform(-0.9, 0.9, 3))
        vals = [legendre_infimum(gf, x, domain="all-q").value for x in a]
        lam = (a[1] - a[0]) / (a[2] - a[0])
        chord = (1 - lam) * vals[0] + lam * vals[2]
        assert vals[1] >= chord - 2 * 0.1 ** 2  # grid-resolution allowance


def test_directional_derivatives_of_the_max_affine_pressure():
    P = EX63.pressure
    q = np.array([1.0, 1.0])
    assert directional_derivative(P, q, np.array([1.0, 0.0])).value \
        == pytest.approx(2.0, abs=1e-9)
    assert directional_derivative(P, q, np.array([-1.0, 0.0])).value \
        == pytest.approx(-1.0, abs=1e-9)


def test_directional_derivative_of_a_quadratic():
    def P(q):
        return float(q @ q)

    q = np.array([0.3, -0.7])
    v = np.array([0.6, 0.8])
    d = directional_derivative(P, q, v)
    assert d.value == pytest.approx(2 * q @ v, abs=1e-6)
    assert d.monotone


def test_two_sided_width_is_nonnegative():
    P = EX63.pressure
    rng = np.random.default_rng(5)
    for _ in range(10):
        q = rng.uniform(0.5, 2.0, 2)
        v = rng.normal(size=2)
        v /= np.linalg.norm(v)
        w = directional_derivative(P, q, v).value \
            + directional_derivative(P, q, -v).value
        assert w >= -1e-9


def test_polygon_of_the_kinked_pressure_is_a_segment():
    from thermolyap.verify import _hausdorff_to_segment
    poly = subgradient_polygon(EX63.pressure, np.array([1.0, 1.0]), 64)
    assert _hausdorff_to_segment(poly, (1.0, 0.0), (2.0, -1.0)) <= 1e-6


def test_polygon_of_a_smooth_pressure_collapses():
    def P(q):
        return float(q @ q / 2)

    poly = subgradient_polygon(P, np.array([0.4, -0.2]), 32)
    center = poly.mean(axis=0)
    assert np.linalg.norm(center - np.array([0.4, -0.2])) <= 1e-2
    diam = max(np.linalg.norm(a - b) for a in poly for b in poly)
    assert diam <= 0.2  # h-schedule resolution


def test_polygon_of_the_sup_norm_ball():
    def P(q):
        return float(np.abs(q).sum())

    poly = subgradient_polygon(P, np.zeros(2), 64)
    corners = {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    got = {tuple(np.round(p, 6)) for p in poly}
    assert got == {(float(a), float(b)) for a, b in corners}


def test_grid_function_csv_round_trip(tmp_path):
    gf = EX62.pressure.grid_function()
    path = gf.to_csv(tmp_path / "vee.csv", variable="q")
    lines = open(path).read().splitlines()
    assert lines[0] == "q,value"
    q0, v0 = map(float, lines[1].split(","))
    assert q0 == gf.grid[0] and v0 == gf.values[0]
    assert len(lines) == gf.grid.size + 1


def test_inconsistent_supports_raise():
    def P(q):
        return -float(np.linalg.norm(q - np.array([1.0, 1.0])))

    with pytest.raises(ValueError):
        subgradient_polygon(P, np.array([1.0, 1.0]), 16)
