import numpy as np
import pytest

from thermolyap import load_example
from thermolyap.errors import DomainError
from thermolyap.potentials import (WindowFunction, birkhoff_potential,
                                   constant_potential, scale, shift)
from thermolyap.spectrum import (BOUNDARY, INSIDE, OUTSIDE, joint_spectrum,
                                 lyapunov_domain, membership, ratio_spectrum,
                                 spectrum_curve, spectrum_value)
from thermolyap.symbolic import ShiftSpace, iter_word_blocks

BIN = ShiftSpace(2)
LOG2 = np.log(2.0)
EX11 = load_example("ex1_1")
ADD = load_example("additive_binary")


def binary_entropy(p):
    return -p * np.log(p) - (1 - p) * np.log(1 - p)


def test_domain_of_the_diagonal_family():
    dom = lyapunov_domain(EX11.space, EX11.primary_potential(), 6)
    # the pure fourth-symbol word maximizes every level exactly
    assert dom.upper_direct == pytest.approx(np.log(4), abs=1e-12)
    assert np.allclose(dom.max_sequence / np.arange(1, 7) * np.arange(1, 7),
                       dom.max_sequence)


def test_domain_of_the_additive_binary_potential():
    dom = lyapunov_domain(BIN, ADD.potentials["g"], 8)
    assert dom.upper == pytest.approx(LOG2, abs=1e-12)
    assert dom.lower == pytest.approx(0.0, abs=1e-12)


def test_domain_of_a_constant_potential():
    c = constant_potential(BIN, 0.9)
    dom = lyapunov_domain(BIN, c, 5)
    assert dom.interval == pytest.approx((0.9, 0.9), abs=1e-12)


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_spectrum_matches_binary_entropy(p):
    alpha = p * LOG2
    got = spectrum_value(BIN, ADD.potentials["g"], alpha, n=10,
                         q_grid=ADD.q_grid)
    assert got == pytest.approx(binary_entropy(p), abs=1e-3)


def test_alpha_past_the_top_exponent_is_outside():
    got = spectrum_value(BIN, ADD.potentials["g"], LOG2 + 0.1, n=8,
                         q_grid=ADD.q_grid)
    assert np.isneginf(got)


def test_spectrum_curve_shape_and_peak():
    alphas = np.linspace(0.05 * LOG2, 0.95 * LOG2, 41)
    curve = spectrum_curve(BIN, ADD.potentials["g"], alphas, n=10,
                           q_grid=ADD.q_grid)
    vals = curve.values
    assert np.all(np.isfinite(vals))
    # concave up to grid tolerance, peak log 2 near alpha = log2 / 2
    peak = vals.max()
    assert peak == pytest.approx(LOG2, abs=1e-3)
    assert abs(alphas[np.argmax(vals)] - LOG2 / 2) <= 0.05
    assert np.all(vals <= LOG2 + 1e-9)
    assert np.all(vals >= -1e-9)
    lam = (alphas[1:-1] - alphas[:-2]) / (alphas[2:] - alphas[:-2])
    chords = vals[:-2] * (1 - lam) + vals[2:] * lam
    assert np.all(vals[1:-1] >= chords - 1e-6)  # concave finite part
    assert curve.provenance == "all-q"
    assert "upper bound" in curve.label


def test_matrix_spectrum_is_the_legendre_envelope():
    # for the diagonal family the ideal envelope is log 4 - alpha on
    # [0, log 4]; finite depth inflates it by about log(3)/n near the
    # kink, so the tolerance here is the finite-size allowance
    n = 10
    phi = EX11.primary_potential()
    for alpha in (0.3, 0.8, np.log(3)):
        got = spectrum_value(EX11.space, phi, alpha, n=n,
                             q_grid=np.linspace(0.25, 3.0, 12))
        assert got == pytest.approx(np.log(4) - alpha, abs=0.15)


def test_matrix_curve_edge_slope_approaches_the_top_exponent():
    from thermolyap.convex import GridFunction, asymptotic_slope
    from thermolyap.pressure import pressure_curve
    curve = pressure_curve(EX11.space, EX11.primary_potential(),
                           np.linspace(0.25, 3.0, 12), 8, brackets=False)
    report = asymptotic_slope(GridFunction(curve.q_grid, curve.values), +1)
    assert report.slope == pytest.approx(np.log(4), abs=0.05)
    assert report.monotone


def test_spectrum_positive_domain_by_default_for_subadditive():
    from thermolyap.spectrum import resolve_domain
    assert resolve_domain(EX11.primary_potential()) == "positive-q"
    assert resolve_domain(ADD.potentials["g"]) == "all-q"


def test_shift_covariance():
    g = ADD.potentials["g"]
    alpha = 0.4 * LOG2
    base = spectrum_value(BIN, g, alpha, n=8, q_grid=ADD.q_grid)
    for c in (-1.0, 0.7):
        moved = shift(BIN, g, c)
        got = spectrum_value(BIN, moved, alpha + c, n=8, q_grid=ADD.q_grid)
        assert got == pytest.approx(base, abs=1e-9)


def test_scale_covariance():
    g = ADD.potentials["g"]
    alpha = 0.35 * LOG2
    base = spectrum_value(BIN, g, alpha, n=8, q_grid=ADD.q_grid)
    for lam in (0.5, 3.0):
        stretched = scale(g, lam)
        got = spectrum_value(BIN, stretched, lam * alpha, n=8,
                             q_grid=ADD.q_grid)
        assert got == pytest.approx(base, abs=1e-6)


def test_counting_consistency_with_the_analytic_spectrum():
    # words whose per-symbol average sits near alpha should multiply
    # like exp(n * spectrum(alpha)); polynomial corrections are covered
    # by the stated allowance
    g = ADD.potentials["g"]
    n, alpha, eps = 16, 0.5 * LOG2, 0.1 * LOG2
    count = 0
    for block in iter_word_blocks(BIN, n):
        avg = g.values(block) / n
        count += int(np.sum(np.abs(avg - alpha) < eps))
    rate = np.log(count) / n
    want = binary_entropy(0.5)
    assert abs(rate - want) <= 0.08


def test_joint_spectrum_reduces_to_one_dimension():
    g = ADD.potentials["g"]
    qs = np.linspace(-8, 8, 129)
    a = 0.5 * LOG2
    joint = joint_spectrum(BIN, [g], np.array([a]), [qs], n=8)
    single = spectrum_value(BIN, g, a, n=8, q_grid=qs)
    assert joint == pytest.approx(single, abs=1e-6)


def test_joint_spectrum_matches_a_brute_force_conjugate():
    rng = np.random.default_rng(21)
    t1, t2 = rng.normal(size=2), rng.normal(size=2)
    g1 = birkhoff_potential(BIN, WindowFunction(1, t1))
    g2 = birkhoff_potential(BIN, WindowFunction(1, t2))
    w = np.array([0.3, 0.7])  # a Bernoulli measure's exponent pair
    a = np.array([w @ t1, w @ t2])
    axes = [np.linspace(-6, 6, 49), np.linspace(-6, 6, 49)]
    got = joint_spectrum(BIN, [g1, g2], a, axes, n=6)
    # oracle: dense minimization of the closed-form pressure
    qq1, qq2 = np.meshgrid(np.linspace(-6, 6, 601), np.linspace(-6, 6, 601),
                           indexing="ij")
    P = np.log(np.exp(qq1 * t1[0] + qq2 * t2[0])
               + np.exp(qq1 * t1[1] + qq2 * t2[1]))
    obj = P - a[0] * qq1 - a[1] * qq2
    assert got == pytest.approx(float(obj.min()), abs=1e-3)


def test_joint_spectrum_outside_the_symbol_hull():
    g1 = birkhoff_potential(BIN, WindowFunction(1, [0.0, 1.0]))
    g2 = birkhoff_potential(BIN, WindowFunction(1, [1.0, 0.0]))
    # attainable pairs live on the segment (0,1)-(1,0)
    a = np.array([1.5, 1.5])
    axes = [np.linspace(-6, 6, 25), np.linspace(-6, 6, 25)]
    got = joint_spectrum(BIN, [g1, g2], a, axes, n=6)
    assert np.isneginf(got)


def test_membership_classifications():
    g, one = ADD.potentials["g"], ADD.potentials["unit_growth"]
    inside = membership(BIN, [g], [one], np.array([0.5 * LOG2]), n=8)
    assert inside.classification == INSIDE
    assert inside.value == pytest.approx(LOG2, abs=1e-3)
    outside = membership(BIN, [g], [one], np.array([2 * LOG2]), n=8)
    assert outside.classification == OUTSIDE
    boundary = membership(BIN, [g], [one], np.array([LOG2]), n=8)
    assert boundary.classification == BOUNDARY


def test_membership_in_two_dimensions():
    # two additive potentials normalized by unit growth: the attainable
    # pairs form the segment between the symbol vectors, a flat valley
    # of the normalized pressure
    t1, t2 = np.array([0.0, LOG2]), np.array([0.5, -0.3])
    g1 = birkhoff_potential(BIN, WindowFunction(1, t1))
    g2 = birkhoff_potential(BIN, WindowFunction(1, t2))
    one = constant_potential(BIN, 1.0)
    w = np.array([0.3, 0.7])
    inside_a = np.array([w @ t1, w @ t2])
    res = membership(BIN, [g1, g2], [one, one], inside_a, n=6)
    assert res.classification == INSIDE
    want = -(w[0] * np.log(w[0]) + w[1] * np.log(w[1]))
    assert res.value == pytest.approx(want, abs=1e-2)
    outside_a = np.array([2.0, 2.0])  # far from the segment
    res_out = membership(BIN, [g1, g2], [one, one], outside_a, n=6)
    assert res_out.classification == OUTSIDE


def test_membership_growth_floor_is_enforced():
    g = ADD.potentials["g"]
    lazy = constant_potential(BIN, 0.01)  # grows too slowly
    with pytest.raises(DomainError):
        membership(BIN, [g], [lazy], np.array([0.5]), n=8)


def test_ratio_spectrum_reduction_and_outside():
    g, one = ADD.potentials["g"], ADD.potentials["unit_growth"]
    value, res = ratio_spectrum(BIN, [g], [one], np.array([0.5 * LOG2]), n=8)
    assert res.classification == INSIDE
    assert value == pytest.approx(LOG2, abs=1e-3)
    value_out, res_out = ratio_spectrum(BIN, [g], [one],
                                        np.array([2 * LOG2]), n=8)
    assert np.isneginf(value_out) and res_out.classification == OUTSIDE
