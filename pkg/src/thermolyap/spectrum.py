"""Exponent-level-set entropy spectra via Legendre transforms of pressure.

Every value reported here is the Legendre expression
inf_q { P(q) - alpha * q } over the active q-domain.  That expression
is an upper bound for the topological entropy of the corresponding
exponent level set in full generality; it equals the level-set entropy
only under additional regularity (an upper semi-continuous entropy map,
additive structure, or verified bridging).  Outputs are labeled
accordingly and the equality claim is never made by the code.

Sub-additive potentials default to the positive-q domain; the full real
line is enabled only for additive-flagged potentials or when a bridging
certificate is supplied.
"""

from dataclasses import dataclass, field

import numpy as np

from . import symbolic
from .convex import GridFunction, asymptotic_slope, legendre_infimum
from .errors import DomainError
from .potentials import ADDITIVE, NEG_INF
from .pressure import (ALL_Q, POSITIVE_Q, finite_pressure, pressure_curve,
                       pressure_kd_grid, weighted_log_sums)

SPECTRUM_LABEL = ("legendre upper bound; equality requires entropy-map "
                  "regularity, additivity, or a bridging certificate")

#: Word-count threshold under which Legendre minima are polished by
#: golden-section passes on the exact finite-n pressure.
_REFINE_WORD_LIMIT = 1 << 14


def default_q_grid(domain, reach=8.0, points_per_unit=8):
    if domain == POSITIVE_Q:
        count = int(reach * points_per_unit)
        return np.linspace(reach / count, reach, count)
    count = 2 * int(reach * points_per_unit) + 1
    return np.linspace(-reach, reach, count)


def resolve_domain(potential, domain=None, certificate=None):
    """Pick the q-domain a spectrum formula is entitled to."""
    if domain is not None:
        if domain not in (POSITIVE_Q, ALL_Q):
            raise DomainError(f"unknown domain {domain!r}")
        return domain
    if potential.structure == ADDITIVE or certificate is not None:
        return ALL_Q
    return POSITIVE_Q


@dataclass(frozen=True)
class DomainEstimate:
    """Bracketed estimate of the interval of attainable exponents.

    ``upper_direct`` is the running minimum of the per-word maximum
    rates (1/k) max value(I), an upper bracket of the top exponent
    whenever the potential is submultiplicative (the word maximum is
    itself submultiplicative).  ``lower_direct`` mirrors it with the
    word minimum, which brackets the bottom exponent only in the
    additive case.  Slope estimates are attached when a pressure curve
    is available.
    """

    lower: float
    upper: float
    upper_direct: float
    lower_direct: float
    max_sequence: np.ndarray
    min_sequence: np.ndarray
    slope_upper: float | None = None
    slope_lower: float | None = None

    @property
    def interval(self):
        return (self.lower, self.upper)


def word_value_range(space, potential, n, budget=symbolic.DEFAULT_WORD_BUDGET):
    """Per-symbol min and max of the potential over length-n words."""
    lo, hi = np.inf, NEG_INF
    for block in symbolic.iter_word_blocks(space, n, budget=budget):
        v = potential.values(block)
        finite = v[~np.isneginf(v)]
        if finite.size:
            hi = max(hi, float(finite.max()))
        lo = min(lo, float(v.min()))
    return lo / n, hi / n


def lyapunov_domain(space, potential, n, curve=None,
                    budget=symbolic.DEFAULT_WORD_BUDGET):
    """Estimate the interval of attainable exponents, two ways.

    The direct route tracks per-length extremes of value/k over words;
    the slope route reads the edge quotients of a supplied pressure
    curve and cross-checks them against the direct brackets.
    """
    maxima = np.empty(n)
    minima = np.empty(n)
    for k in range(1, n + 1):
        lo, hi = word_value_range(space, potential, k, budget=budget)
        minima[k - 1], maxima[k - 1] = lo, hi
    upper_direct = float(maxima.min())
    lower_direct = float(minima.max())
    slope_hi = slope_lo = None
    if curve is not None:
        gf = GridFunction(curve.q_grid, curve.values)
        slope_hi = asymptotic_slope(gf, +1).slope
        slope_lo = asymptotic_slope(gf, -1).slope if curve.q_grid[0] < 0 \
            else None
    # The direct extremes are the certified brackets; the curve's edge
    # quotients approach the same limits from inside the interval, so
    # they cross-check rather than tighten.
    upper = upper_direct
    if potential.structure == ADDITIVE:
        lower = lower_direct
    else:
        lower = slope_lo if slope_lo is not None else float(minima[-1])
    return DomainEstimate(lower=lower, upper=upper,
                          upper_direct=upper_direct, lower_direct=lower_direct,
                          max_sequence=maxima, min_sequence=minima,
                          slope_upper=slope_hi, slope_lower=slope_lo)


def _refiner(space, potential, n, budget):
    if symbolic.word_count(space, n) <= _REFINE_WORD_LIMIT:
        return lambda q: finite_pressure(space, potential, q, n, budget=budget)
    return None


def spectrum_value(space, potential, alpha, n, domain=None, q_grid=None,
                   curve=None, certificate=None, refine="auto",
                   budget=symbolic.DEFAULT_WORD_BUDGET):
    """Legendre value inf_q { P_n(q) - alpha q } at a single exponent.

    Returns -inf when the edge-slope test certifies alpha outside the
    spectrum domain.  With ``refine="auto"`` the grid minimum is
    polished against the exact finite-n pressure whenever the word space
    is small enough for repeated evaluation.
    """
    domain = resolve_domain(potential, domain, certificate)
    if curve is None:
        if q_grid is None:
            q_grid = default_q_grid(domain)
        curve = pressure_curve(space, potential, q_grid, n, brackets=False,
                               domain=domain, budget=budget)
    gf = GridFunction(curve.q_grid, curve.values)
    refine_fn = _refiner(space, potential, n, budget) if refine == "auto" else None
    return legendre_infimum(gf, alpha, domain=domain, refine=refine_fn).value


@dataclass(frozen=True)
class SpectrumCurve:
    """Legendre spectrum on an exponent grid.

    ``values`` are extended reals (-inf marks exponents certified
    outside the domain).  ``provenance`` records which q-domain was
    used; ``label`` states the upper-bound semantics.
    """

    alpha_grid: np.ndarray
    values: np.ndarray
    domain: tuple
    provenance: str
    n_used: int
    label: str = SPECTRUM_LABEL
    meta: dict = field(default_factory=dict)

    def finite_mask(self):
        return ~np.isneginf(self.values)


def spectrum_curve(space, potential, alpha_grid, n, domain=None, q_grid=None,
                   certificate=None, budget=symbolic.DEFAULT_WORD_BUDGET):
    """Vectorized :func:`spectrum_value` over an exponent grid."""
    domain = resolve_domain(potential, domain, certificate)
    if q_grid is None:
        q_grid = default_q_grid(domain)
    curve = pressure_curve(space, potential, q_grid, n, brackets=False,
                           domain=domain, budget=budget)
    gf = GridFunction(curve.q_grid, curve.values)
    refine_fn = _refiner(space, potential, n, budget)
    alphas = np.asarray(alpha_grid, dtype=float)
    vals = np.array([
        legendre_infimum(gf, a, domain=domain, refine=refine_fn).value
        for a in alphas])
    dom = lyapunov_domain(space, potential, n, curve=curve, budget=budget)
    return SpectrumCurve(alpha_grid=alphas, values=vals, domain=dom.interval,
                         provenance=domain, n_used=n,
                         meta={"q_grid": np.asarray(q_grid, float),
                               "convexity_defect": curve.convexity_defect})


def _grid_points(q_grid):
    """Accept an (G, k) array or a per-axis list of 1-d grids."""
    if isinstance(q_grid, (list, tuple)) and q_grid and np.ndim(q_grid[0]) == 1:
        axes = [np.asarray(a, dtype=float) for a in q_grid]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.column_stack([m.ravel() for m in mesh]), axes
    pts = np.atleast_2d(np.asarray(q_grid, dtype=float))
    return pts, None


def joint_spectrum(space, potentials, a, q_grid, n, descent_steps=2,
                   budget=symbolic.DEFAULT_WORD_BUDGET):
    """Legendre value inf_q { P(q) - a . q } for a vector of exponents.

    Minimizes over the supplied grid of q-points and then runs a few
    rounds of per-coordinate golden refinement from the grid argmin
    (pressure values carry kinks, so nothing gradient-based).  Returns
    -inf when the objective keeps descending at the grid boundary in
    some coordinate direction beyond the noise margin.
    """
    a = np.asarray(a, dtype=float)
    pts, axes = _grid_points(q_grid)
    if pts.shape[1] != a.size or a.size != len(potentials):
        raise ValueError("a, q-grid and potentials must share one dimension k")
    if a.size > 3:
        raise ValueError("grid minimization is budgeted for k <= 3")
    vals = pressure_kd_grid(space, potentials, pts, n, budget=budget)
    obj = vals - pts @ a
    i = int(np.argmin(obj))
    if axes is not None:
        shape = tuple(ax.size for ax in axes)
        idx = np.unravel_index(i, shape)
        # Edge-descent test per axis at the argmin.
        for d, ax in enumerate(axes):
            if len(ax) < 3:
                continue
            line_idx = list(idx)
            take = []
            for j in range(ax.size):
                line_idx[d] = j
                take.append(np.ravel_multi_index(tuple(line_idx), shape))
            line = obj[np.array(take)]
            gf = GridFunction(ax, line)
            res = legendre_infimum(gf, 0.0, domain="all-q")
            if not res.finite:
                return NEG_INF
    best_q = pts[i].copy()
    best = float(obj[i])
    if descent_steps:
        spacing = _typical_spacing(pts)

        def objective(qv):
            return float(pressure_kd_grid(space, potentials, qv[None, :], n,
                                          budget=budget)[0]) - float(qv @ a)

        if symbolic.word_count(space, n) <= _REFINE_WORD_LIMIT:
            for _ in range(descent_steps):
                for d in range(a.size):
                    best, best_q = _line_golden(objective, best, best_q, d,
                                                spacing)
    return best


def _typical_spacing(pts):
    if pts.shape[0] < 2:
        return 1.0
    diffs = np.abs(np.diff(np.unique(pts[:, 0])))
    return float(diffs[diffs > 0].min()) if np.any(diffs > 0) else 1.0


def _line_golden(objective, best, best_q, axis, spacing, iters=30):
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    lo, hi = best_q[axis] - spacing, best_q[axis] + spacing

    def f(t):
        qv = best_q.copy()
        qv[axis] = t
        return objective(qv)

    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    for t, ft in ((c, fc), (d, fd)):
        if ft < best:
            best = ft
            best_q = best_q.copy()
            best_q[axis] = t
    return best, best_q


INSIDE = "inside"
OUTSIDE = "outside"
BOUNDARY = "boundary-uncertain"


@dataclass(frozen=True)
class MembershipResult:
    classification: str
    value: float           # grid infimum of the normalized pressure
    edge_slope: float      # extrapolated asymptotic slope of the objective
    band: float

    @property
    def inside(self):
        return self.classification == INSIDE


def _check_growth(space, psis, n, growth_c, growth_delta, budget):
    floor = np.log(growth_c) + n * np.log1p(growth_delta)
    for i, psi in enumerate(psis):
        lo, _ = word_value_range(space, psi, n, budget=budget)
        if lo * n < floor:
            raise DomainError(
                f"normalizer {i} violates the growth floor: min word value "
                f"{lo * n:.6g} < log C + n log(1+delta) = {floor:.6g}")


def _tail_slope(grid, values, side):
    """Geometric extrapolation of the limiting slope at a grid edge."""
    d = np.diff(values) / np.diff(grid)
    if side == "right":
        tail = d[-3:]
    else:
        tail = d[:3][::-1]
    if tail.size < 3:
        return float(tail[-1])
    d1, d2 = tail[1] - tail[0], tail[2] - tail[1]
    if abs(d1) < 1e-15 or abs(d2) >= abs(d1):
        return float(tail[-1])
    r = d2 / d1
    return float(tail[-1] + d2 * r / (1 - r))


def _membership_axes(q_grid, k):
    if q_grid is None:
        return [default_q_grid(ALL_Q)] * k
    if isinstance(q_grid, (list, tuple)) and q_grid and np.ndim(q_grid[0]) == 1:
        axes = [np.asarray(ax, dtype=float) for ax in q_grid]
        if len(axes) != k:
            raise ValueError("need one q axis per dimension")
        return axes
    axis = np.asarray(q_grid, dtype=float)
    if axis.ndim != 1:
        raise ValueError("q_grid must be a 1-d axis or a list of axes")
    return [axis] * k


def _axis_line(vgrid, idx, axis):
    take = list(idx)
    out = np.empty(vgrid.shape[axis])
    for j in range(out.size):
        take[axis] = j
        out[j] = vgrid[tuple(take)]
    return out


def membership(space, potentials, normalizers, a, q_grid=None, n=8,
               growth_c=1.0, growth_delta=0.05, band=None,
               budget=symbolic.DEFAULT_WORD_BUDGET):
    """Classify whether a ratio-exponent vector is attainable.

    Builds the normalized pressure
    ``P_a(q) = P( sum_i q_i (Phi_i - a_i Psi_i) )`` on a product grid
    and classifies by the sign of its infimum: the infimum is
    nonnegative exactly on the attainable set and -inf outside it, so
    finite negatives only arise from finite-size effects and fall into
    a conservative boundary band.  An argmin on a grid face triggers a
    descent test along that axis: certified descent (the extrapolated
    tail slope keeps falling) means outside, descent that flattens out
    is left boundary-uncertain, and a flat valley is no evidence at all
    (ratio level sets are typically lower-dimensional, so flat
    directions are expected inside).

    ``q_grid`` may be one shared 1-d axis or a list with one axis per
    dimension.  The normalizers must be additive with per-word growth
    at least ``log C + n log(1+delta)``; violating that floor is an
    error.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    k = a.size
    if len(potentials) != k or len(normalizers) != k:
        raise ValueError("need one normalizer per potential")
    for psi in normalizers:
        if psi.structure != ADDITIVE:
            raise DomainError("normalizers must be additive potentials")
    _check_growth(space, normalizers, n, growth_c, growth_delta, budget)
    axes = _membership_axes(q_grid, k)
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    # weight columns for parts (Phi_1..Phi_k, Psi_1..Psi_k): (q, -q * a)
    weights = np.concatenate([pts, -pts * a[None, :]], axis=1)
    parts = list(potentials) + list(normalizers)
    p_vals = weighted_log_sums(space, parts, weights, n, budget=budget) / n
    shape = tuple(ax.size for ax in axes)
    vgrid = p_vals.reshape(shape)
    flat = int(np.argmin(p_vals))
    idx = np.unravel_index(flat, shape)
    v = float(p_vals[flat])
    if band is None:
        defect = max((GridFunction(ax, _axis_line(vgrid, idx, d))
                      .convexity_defect for d, ax in enumerate(axes)),
                     default=0.0)
        band = max(1e-9, 3.0 * defect)
    if v < -band:
        return MembershipResult(OUTSIDE, v, np.nan, band)
    uncertain = False
    worst_slope = 0.0
    for d, ax in enumerate(axes):
        j = idx[d]
        if 0 < j < ax.size - 1:
            continue
        line = _axis_line(vgrid, idx, d)
        right = j == ax.size - 1
        quot = np.diff(line) / np.diff(ax)
        raw = quot[-1] if right else quot[0]
        noise = _edge_noise_1d(ax, line, right)
        margin = 3.0 * noise + 1e-12
        descending = raw < -margin if right else raw > margin
        if not descending:
            continue  # flat valley along this face: not evidence of escape
        limit = _tail_slope(ax, line, "right" if right else "left")
        worst_slope = limit if abs(limit) > abs(worst_slope) else worst_slope
        strong = limit < -margin if right else limit > margin
        if strong:
            return MembershipResult(OUTSIDE, v, limit, band)
        uncertain = True
    if uncertain or abs(v) <= band:
        return MembershipResult(BOUNDARY, v, worst_slope, band)
    return MembershipResult(INSIDE, v, worst_slope, band)


def _edge_noise_1d(grid, values, right):
    d = np.diff(values) / np.diff(grid)
    if d.size < 2:
        return np.inf
    return abs(d[-1] - d[-2]) if right else abs(d[1] - d[0])


def ratio_spectrum(space, potentials, normalizers, a, q_grid=None, n=8,
                   growth_c=1.0, growth_delta=0.05,
                   budget=symbolic.DEFAULT_WORD_BUDGET):
    """Entropy of the ratio-exponent level set, by the Legendre route.

    Returns ``(value, membership_result)``: the infimum of the
    normalized pressure when the exponent vector is attainable, -inf
    when it is certified outside, and the (flagged) grid value on the
    uncertain boundary band.
    """
    res = membership(space, potentials, normalizers, a, q_grid=q_grid, n=n,
                     growth_c=growth_c, growth_delta=growth_delta,
                     budget=budget)
    if res.classification == OUTSIDE:
        return NEG_INF, res
    return res.value, res
