"""Grid-based convex analysis.

Everything here consumes tabulated functions (or plain callables for
the k-dimensional operations); nothing assumes an analytic formula, so
the same code path serves numerically computed pressure curves and
synthetic piecewise-linear pressures.  Convexity is never taken on
faith: each grid function carries its measured midpoint-convexity
defect and downstream intervals are widened by it.
"""

from dataclasses import dataclass, field

import numpy as np

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real values on a strictly increasing grid of at least 3 points."""

    grid: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.size < 3:
            raise ValueError("grid needs at least 3 points")
        if np.any(np.diff(x) <= 0):
            raise ValueError("grid must be strictly increasing")
        if v.shape != x.shape or not np.isfinite(v).all():
            raise ValueError("values must be finite and match the grid")
        x.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "grid", x)
        object.__setattr__(self, "values", v)

    @property
    def convexity_defect(self):
        """Max interior excess over the chord; 0 for convex data."""
        lam = (self.grid[1:-1] - self.grid[:-2]) / (self.grid[2:] - self.grid[:-2])
        chord = self.values[:-2] * (1 - lam) + self.values[2:] * lam
        return float(max(0.0, (self.values[1:-1] - chord).max()))

    def quotients(self):
        """Difference quotients on consecutive cells."""
        return np.diff(self.values) / np.diff(self.grid)

    @classmethod
    def from_callable(cls, f, grid):
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.array([f(x) for x in grid], dtype=float))

    def to_csv(self, path, variable="q", value_name="value"):
        """Two-column CSV with a header naming the grid variable."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{variable},{value_name}\n")
            for x, v in zip(self.grid, self.values):
                fh.write(f"{x:.17g},{v:.17g}\n")
        return path


def conjugate(f, s_grid):
    """Discrete Legendre transform f*(s) = max over grid x of s*x - f(x).

    The output is convex by construction.  Slopes outside the range of
    f's difference quotients make the sup boundary-active (it would grow
    past the grid edge); those s are flagged in ``meta["edge_active"]``.
    """
    s = np.asarray(s_grid, dtype=float)
    table = s[:, None] * f.grid[None, :] - f.values[None, :]
    idx = table.argmax(axis=1)
    vals = table[np.arange(s.size), idx]
    edge = (idx == 0) | (idx == f.grid.size - 1)
    return GridFunction(s, vals, meta={"edge_active": edge})


@dataclass(frozen=True)
class LegendreResult:
    """Outcome of a grid infimum of P(q) - alpha * q.

    ``finite`` is False when the edge-slope test certifies descent past
    the grid boundary (value -inf).  ``boundary_active`` marks argmins
    at the grid edge whose slope test was inside the noise margin: the
    value is reported but the decision between finite and unbounded is
    deliberately left open.
    """

    value: float
    argmin: float | None
    finite: bool
    boundary_active: bool = False
    margin: float = 0.0


def _edge_noise(quotients, side):
    if quotients.size < 2:
        return np.inf
    if side == "right":
        return abs(quotients[-1] - quotients[-2])
    return abs(quotients[1] - quotients[0])


def legendre_infimum(P, alpha, domain="positive-q", refine=None,
                     margin_factor=3.0):
    """Minimize P(q) - alpha*q over the grid, with edge certification.

    The objective is declared unbounded (-inf) when its argmin sits on a
    grid edge and the edge slope shows descent beyond ``margin_factor``
    times the local slope noise.  On the positive-q domain the left edge
    (q -> 0+) is a legitimate finite boundary, so only the right edge
    can certify -inf.  Borderline slopes return a finite value flagged
    boundary-active instead of guessing.

    ``refine`` may supply a callable q -> P(q); the grid argmin is then
    polished by one golden-section pass between its neighbors.
    """
    obj = P.values - alpha * P.grid
    i = int(np.argmin(obj))  # ties resolve to the smallest q
    d = P.quotients()
    if i == P.grid.size - 1:
        noise = _edge_noise(d, "right")
        margin = margin_factor * noise + 1e-15
        slope = d[-1] - alpha
        if slope < -margin:
            return LegendreResult(float("-inf"), None, False, margin=margin)
        if slope <= margin:
            return LegendreResult(float(obj[i]), float(P.grid[i]), True,
                                  boundary_active=True, margin=margin)
    if i == 0:
        noise = _edge_noise(d, "left")
        margin = margin_factor * noise + 1e-15
        slope = d[0] - alpha
        if domain == "all-q":
            if slope > margin:
                return LegendreResult(float("-inf"), None, False, margin=margin)
            if slope >= -margin:
                return LegendreResult(float(obj[i]), float(P.grid[i]), True,
                                      boundary_active=True, margin=margin)
        else:
            return LegendreResult(float(obj[i]), float(P.grid[i]), True,
                                  boundary_active=True, margin=margin)
    value, argmin = float(obj[i]), float(P.grid[i])
    if refine is not None:
        lo = P.grid[max(i - 1, 0)]
        hi = P.grid[min(i + 1, P.grid.size - 1)]
        value, argmin = _golden_min(lambda q: refine(q) - alpha * q,
                                    lo, hi, value, argmin)
    return LegendreResult(value, argmin, True)


def _golden_min(f, lo, hi, best_val, best_arg, iterations=60, tol=1e-12):
    a, b = float(lo), float(hi)
    c = b - GOLDEN * (b - a)
    d_ = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d_)
    for _ in range(iterations):
        if b - a < tol * (1.0 + abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d_, fd = d_, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d_, fd
            d_ = a + GOLDEN * (b - a)
            fd = f(d_)
    for x, fx in ((c, fc), (d_, fd)):
        if fx < best_val:
            best_val, best_arg = float(fx), float(x)
    return best_val, best_arg


@dataclass(frozen=True)
class SubdiffInterval:
    """One-sided derivative estimates [P'(q-), P'(q+)] at a grid point."""

    left: float
    right: float
    q: float

    def __post_init__(self):
        if self.left > self.right + 1e-9:
            raise ValueError("left derivative exceeds right derivative")

    def as_tuple(self):
        return (self.left, self.right)


def subdifferential(P, q):
    """Difference-quotient bracket of the subdifferential at interior q.

    ``q`` is snapped to the nearest grid point, which must be interior.
    For convex data the backward/forward quotients bracket the one-sided
    derivatives up to grid resolution; the interval is widened by the
    recorded convexity defect (scaled to slope units by the local cell
    width) so non-convex noise cannot fake a tight interval.
    """
    x = P.grid
    i = int(np.argmin(np.abs(x - q)))
    if i == 0 or i == x.size - 1:
        raise ValueError(f"q={q} snaps to the grid boundary; the one-sided "
                         "quotients need an interior point")
    left = (P.values[i] - P.values[i - 1]) / (x[i] - x[i - 1])
    right = (P.values[i + 1] - P.values[i]) / (x[i + 1] - x[i])
    h = min(x[i] - x[i - 1], x[i + 1] - x[i])
    widen = P.convexity_defect / h
    return SubdiffInterval(float(left - widen), float(right + widen), float(x[i]))


@dataclass(frozen=True)
class SlopeReport:
    """Edge slope of a grid function with its approach sequence."""

    slope: float
    quotients: np.ndarray  # difference quotients walking toward the edge
    monotone: bool

    def bracket(self):
        return (float(self.quotients.min()), float(self.quotients.max()))


def asymptotic_slope(P, direction, tail=6):
    """Difference quotient at a grid edge plus the approach trend.

    ``direction`` is +1 for the right edge (slope at +inf) and -1 for
    the left edge.  For convex data the reported quotients increase
    toward +inf and decrease toward -inf, so the edge value brackets the
    asymptotic slope from the safe side.
    """
    d = P.quotients()
    if d.size < 2:
        raise ValueError("need at least 3 grid points for a trend")
    k = min(tail, d.size)
    if direction > 0:
        seq = d[-k:]
        monotone = bool(np.all(np.diff(seq) >= -1e-12))
        return SlopeReport(float(seq[-1]), seq, monotone)
    seq = d[:k][::-1]  # walking leftward
    monotone = bool(np.all(np.diff(seq) <= 1e-12))
    return SlopeReport(float(seq[-1]), seq, monotone)


def lower_convex_hull(x, y):
    """Indices of the lower convex hull of the graph points, left to right."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    hull = []
    for i in range(x.size):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a])
            if cross <= 0:  # b above or on the chord a-i
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(hull, dtype=int)


def biconjugate(f):
    """f** on the original grid, via two exact piecewise-linear passes.

    The intermediate slope grid contains every difference quotient of f
    plus the slopes of its lower convex hull: these are exactly the
    breakpoints of f*, so for piecewise-linear data (convex or not) the
    double transform recovers the convex hull to rounding.
    """
    hull = lower_convex_hull(f.grid, f.values)
    hull_slopes = np.diff(f.values[hull]) / np.diff(f.grid[hull])
    d = np.unique(np.concatenate([f.quotients(), hull_slopes]))
    if d.size < 3:
        d = np.unique(np.concatenate([d - 1e-9, d, d + 1e-9]))
    fstar = conjugate(f, d)
    table = f.grid[:, None] * fstar.grid[None, :] - fstar.values[None, :]
    return GridFunction(f.grid, table.max(axis=1))


@dataclass(frozen=True)
class BiconjugateReport:
    max_deviation: float  # on points where f touches its convex hull
    bound: float          # C*h with C the max |slope| and h the spacing
    hull_deviation: float  # max |f** - hull| everywhere
    fstarstar: GridFunction


def biconjugate_check(f):
    """Compare f** with f where f is already convex (touches its hull)."""
    fss = biconjugate(f)
    hull_idx = lower_convex_hull(f.grid, f.values)
    hull_vals = np.interp(f.grid, f.grid[hull_idx], f.values[hull_idx])
    on_hull = np.abs(f.values - hull_vals) <= 1e-12 * (1 + np.abs(f.values))
    dev = float(np.abs(fss.values - f.values)[on_hull].max())
    hull_dev = float(np.abs(fss.values - hull_vals).max())
    d = f.quotients()
    bound = float(np.abs(d).max() * np.diff(f.grid).max())
    return BiconjugateReport(dev, bound, hull_dev, fss)


@dataclass(frozen=True)
class DirectionalDerivative:
    value: float
    quotients: np.ndarray  # one per step of the h-schedule
    monotone: bool         # quotients decrease in h for convex inputs


def directional_derivative(P, q, v, h_schedule=(1e-1, 1e-2, 1e-3)):
    """One-sided derivative estimate of a callable at q along v.

    Evaluates (P(q + h v) - P(q)) / h down the schedule; a two-point
    Richardson step is applied to the smallest pair only when the
    quotient decrements shrink proportionally to the step sizes (the
    smooth O(h) signature).  Around a kink the quotients plateau once h
    is inside the active piece, and extrapolating across the plateau
    would overshoot, so the raw smallest-h quotient is returned there.
    The default schedule stops at 1e-3 because pressure values carry
    finite-n noise that smaller steps would amplify.
    """
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    base = P(q)
    hs = np.asarray(h_schedule, dtype=float)
    quot = np.array([(P(q + h * v) - base) / h for h in hs])
    value = quot[-1]
    if quot.size >= 3:
        d_prev, d_last = quot[-2] - quot[-3], quot[-1] - quot[-2]
        expected = (hs[-1] - hs[-2]) / (hs[-2] - hs[-3])
        scale = abs(d_prev) * abs(expected)
        smooth = scale > 0 and abs(d_last) <= 4 * scale \
            and abs(d_last) >= scale / 4
        if smooth:
            h1, h2 = hs[-2], hs[-1]
            value = (h1 * quot[-1] - h2 * quot[-2]) / (h1 - h2)
    monotone = bool(np.all(np.diff(quot) <= 1e-12)) if quot.size >= 2 else True
    return DirectionalDerivative(float(value), quot, monotone)


def subgradient_polygon(P, q, n_directions=64, h_schedule=(1e-1, 1e-2, 1e-3),
                        feasibility_tol=1e-9):
    """Reconstruct the subgradient set of a convex callable at q (k = 2).

    Samples the support function s(v) = P'(q; v) over ``n_directions``
    equally spaced unit vectors (starting at angle 0), intersects the
    halfplanes {a : a . v <= s(v)}, and returns the vertices of the
    resulting convex polygon in counterclockwise order.  Degenerate sets
    (segments, points) come out with the matching degenerate vertex
    list.  The polygon is a superset estimate of the subdifferential;
    it is tight for convex inputs and shrinks as directions are added.
    """
    q = np.asarray(q, dtype=float)
    if q.size != 2:
        raise ValueError("polygon reconstruction is specific to 2 dimensions")
    angles = 2 * np.pi * np.arange(n_directions) / n_directions
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    support = np.array([
        directional_derivative(P, q, v, h_schedule).value for v in dirs])

    scale = 1.0 + np.abs(support).max()
    candidates = []
    for j in range(n_directions):
        k = (j + 1) % n_directions
        A = np.vstack([dirs[j], dirs[k]])
        det = np.linalg.det(A)
        if abs(det) < 1e-12:
            continue
        p = np.linalg.solve(A, support[[j, k]])
        if np.all(dirs @ p <= support + feasibility_tol * scale):
            candidates.append(p)
    if not candidates:
        raise ValueError(
            "halfplane intersection is empty: derivative estimates are "
            f"inconsistent (support function range {support.min():.3g} "
            f"to {support.max():.3g})")
    pts = np.array(candidates)
    _, keep = np.unique(np.round(pts / scale, 9), axis=0, return_index=True)
    pts = pts[np.sort(keep)]
    if pts.shape[0] <= 2:
        return pts
    return _hull_ccw(pts)


def _hull_ccw(points):
    """Convex hull of 2-d points in counterclockwise order (monotone chain)."""
    pts = points[np.lexsort((points[:, 1], points[:, 0]))]

    def turn(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def build(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and turn(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = build(pts)
    upper = build(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])
