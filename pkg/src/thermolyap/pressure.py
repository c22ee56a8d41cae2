"""Finite-n cylinder pressure, bracketing, and pressure curves.

The n-th cylinder sum of a potential at exponent q is
``a_n(q) = log sum over admissible length-n words of exp(q * value(I))``
with -inf values excluded from the sum; ``P_n(q) = a_n(q) / n`` is the
finite-n pressure estimate.  For a submultiplicative potential and
q > 0 the sequence a_n is subadditive, so every P_n(q) is an upper
bound of the limit and the running minimum brackets it from above
(Fekete).  Lower bounds require a bridging certificate.

Everything funnels through one streaming engine that evaluates each
word block once and accumulates log-sum-exp values for a whole grid of
weight vectors simultaneously.  Blocks are merged in a fixed order, so
results are independent of the thread count.
"""

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import symbolic
from .cocycle import check_submultiplicativity
from .errors import (BudgetExceededError, DomainError, EmptySumError,
                     IllPosedCombinationError)
from .potentials import ADDITIVE, NEG_INF, linear_combination

POSITIVE_Q = "positive-q"
ALL_Q = "all-q"

#: Absolute slack granted to the exhaustive submultiplicativity check
#: when it gates Fekete brackets (covers last-ulp rounding of exact ties).
H_CHECK_SLACK = 1e-9

_DEFAULT_CHECK_DEPTH = 5


def weighted_log_sums(space, parts, weights, n, *, threads=1,
                      block_size=symbolic.DEFAULT_BLOCK_SIZE,
                      budget=symbolic.DEFAULT_WORD_BUDGET):
    """log sum over length-n words of exp(sum_p W[g, p] * value_p(I)).

    Parameters
    ----------
    parts : sequence of WordPotential
    weights : ndarray (G, P)
        One row per requested combination.
    Returns
    -------
    ndarray (G,) of log sums.  A row where every word carries zero
    weight raises :class:`EmptySumError`.
    """
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    if weights.shape[1] != len(parts):
        raise ValueError("one weight column per potential is required")
    blocks = symbolic.iter_word_blocks(space, n, block_size=block_size,
                                       budget=budget)
    totals = np.full(weights.shape[0], NEG_INF)
    for part in _ordered_map(lambda b: _block_log_sums(b, parts, weights),
                             blocks, threads):
        totals = np.logaddexp(totals, part)
    if np.isneginf(totals).any():
        bad = np.flatnonzero(np.isneginf(totals))
        raise EmptySumError(
            f"every length-{n} word has zero weight for weight rows {bad.tolist()} "
            "(the potential's maximal exponent is -inf there)")
    return totals


def _ordered_map(task, items, threads):
    """Map possibly in parallel, yielding results in submission order.

    A bounded window of pending futures caps how many word blocks are
    alive at once; the ordered merge keeps every consumer's output
    independent of the thread count.
    """
    if threads <= 1:
        yield from map(task, items)
        return
    window = 4 * threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending = deque()
        for item in items:
            pending.append(pool.submit(task, item))
            if len(pending) >= window:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def _block_log_sums(block, parts, weights):
    vals = np.column_stack([p.values(block) for p in parts])
    neg = np.isneginf(vals)
    if neg.any():
        if ((neg.astype(float) @ (weights.T < 0)) > 0).any():
            raise IllPosedCombinationError(
                "negative weight applied to a -inf potential value")
        combo = np.where(neg, 0.0, vals) @ weights.T
        kill = (neg.astype(float) @ (weights.T > 0)) > 0
        combo[kill] = NEG_INF
    else:
        combo = vals @ weights.T
    mx = combo.max(axis=0)
    out = np.full(weights.shape[0], NEG_INF)
    ok = mx > NEG_INF
    if ok.any():
        with np.errstate(divide="ignore"):
            out[ok] = mx[ok] + np.log(np.exp(combo[:, ok] - mx[ok]).sum(axis=0))
    return out


def finite_pressure(space, potential, q, n, **kw):
    """(1/n) log of the n-th cylinder sum at exponent q."""
    return float(weighted_log_sums(space, [potential], [[q]], n, **kw)[0]) / n


def finite_pressure_grid(space, potential, q_grid, n, **kw):
    """Vector of finite-n pressures over a grid of exponents."""
    qs = np.asarray(q_grid, dtype=float)
    return weighted_log_sums(space, [potential], qs[:, None], n, **kw) / n


def cylinder_log_sums(space, potential, q_grid, n_levels, **kw):
    """Raw a_n(q) for every n in ``n_levels`` and q in ``q_grid``.

    Returns an array (len(n_levels), len(q_grid)).
    """
    qs = np.asarray(q_grid, dtype=float)
    out = np.empty((len(n_levels), qs.size))
    for i, n in enumerate(n_levels):
        out[i] = weighted_log_sums(space, [potential], qs[:, None], n, **kw)
    return out


@dataclass(frozen=True)
class LevelSummary:
    """Per-length sums and extremes gathered in a single sweep."""

    n_levels: np.ndarray
    log_sums: np.ndarray   # (L, Q) raw a_n(q)
    word_min: np.ndarray   # (L,) min of value(I), -inf when phi vanishes
    word_max: np.ndarray   # (L,) max finite value(I)


def level_summaries(space, potential, q_grid, n_levels, threads=1,
                    block_size=symbolic.DEFAULT_BLOCK_SIZE,
                    budget=symbolic.DEFAULT_WORD_BUDGET):
    """Cylinder sums plus per-word extremes, one block sweep per level.

    Evaluating the potential dominates the cost at large n, so callers
    needing both the pressure levels and the per-word max sequence
    (domain brackets, Fekete diagnostics) should take them from here
    rather than sweeping twice.  Blocks may be evaluated concurrently;
    partial results merge in block order, so the output is independent
    of ``threads``.
    """
    qs = np.asarray(q_grid, dtype=float)
    levels = list(n_levels)
    sums = np.full((len(levels), qs.size), NEG_INF)
    wmin = np.full(len(levels), np.inf)
    wmax = np.full(len(levels), NEG_INF)

    def task(block):
        v = potential.values(block)
        lo = float(v.min())
        finite = v[~np.isneginf(v)]
        if finite.size == 0:
            return None, lo, NEG_INF
        hi = float(finite.max())
        if not qs.size:
            return None, lo, hi
        combo = finite[:, None] * qs[None, :]
        mx = combo.max(axis=0)
        part = mx + np.log(np.exp(combo - mx[None, :]).sum(axis=0))
        return part, lo, hi

    for i, n in enumerate(levels):
        blocks = symbolic.iter_word_blocks(space, n, block_size=block_size,
                                           budget=budget)
        for part, lo, hi in _ordered_map(task, blocks, threads):
            wmin[i] = min(wmin[i], lo)
            wmax[i] = max(wmax[i], hi)
            if part is not None:
                sums[i] = np.logaddexp(sums[i], part)
        if qs.size and np.isneginf(sums[i]).any():
            raise EmptySumError(
                f"every length-{n} word has zero weight "
                "(the potential's maximal exponent is -inf)")
    return LevelSummary(np.asarray(levels), sums, wmin, wmax)


@dataclass(frozen=True)
class PressureEstimate:
    """Finite-n value with whatever brackets the structure supports."""

    q: float
    value: float
    n_used: int
    upper: float | None = None
    lower: float | None = None
    levels: np.ndarray | None = None  # a_n(q)/n for n = 1..n_used
    submultiplicative: bool | None = None

    def bracket(self):
        return (self.lower, self.upper)


def _brackets_valid(space, potential, q, n_max, budget):
    """Fekete brackets need verified submultiplicativity, not the flag."""
    depth = min(_DEFAULT_CHECK_DEPTH, n_max)
    try:
        report = check_submultiplicativity(space, potential, depth, budget=budget)
    except BudgetExceededError:
        return False, None
    ok = report.holds(H_CHECK_SLACK)
    if potential.structure == ADDITIVE:
        return ok, report
    return ok and q > 0, report


def pressure_estimate(space, potential, q, n_max, certificate=None,
                      budget=symbolic.DEFAULT_WORD_BUDGET, **kw):
    """Finite-n pressure at ``n_max`` plus Fekete/bridging brackets.

    The upper bracket min_n a_n(q)/n is attached only when the
    exhaustive submultiplicativity check passes (and q > 0, unless the
    potential is additive).  A lower bound appears only when a
    :class:`BridgingCertificate` is supplied; it uses
    (a_n(q) + q log c) / (n + t) maximized over n, the superadditive
    correction the certificate provides.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    levels_a = cylinder_log_sums(space, potential, [q],
                                 range(1, n_max + 1), budget=budget, **kw)[:, 0]
    ns = np.arange(1, n_max + 1)
    per_n = levels_a / ns
    value = float(per_n[-1])
    valid, report = _brackets_valid(space, potential, q, n_max, budget)
    upper = float(per_n.min()) if valid else None
    lower = None
    if certificate is not None and q > 0:
        usable = ns >= certificate.n
        if usable.any():
            cand = (levels_a[usable] + q * np.log(certificate.c)) \
                / (ns[usable] + certificate.t)
            lower = float(cand.max())
    return PressureEstimate(q=q, value=value, n_used=n_max, upper=upper,
                            lower=lower, levels=per_n,
                            submultiplicative=None if report is None
                            else report.holds(H_CHECK_SLACK))


@dataclass(frozen=True)
class PressureCurve:
    """Finite-n pressure on a grid of exponents, with metadata."""

    q_grid: np.ndarray
    values: np.ndarray
    n_used: int
    domain_constraint: str
    convexity_defect: float
    upper: np.ndarray | None = None
    lower: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def as_grid_function(self, use_upper=False):
        from .convex import GridFunction
        vals = self.upper if (use_upper and self.upper is not None) else self.values
        return GridFunction(self.q_grid, vals)


def midpoint_convexity_defect(grid, values):
    """Largest amount by which an interior point exceeds its chord."""
    x = np.asarray(grid, float)
    v = np.asarray(values, float)
    if x.size < 3:
        return 0.0
    lam = (x[1:-1] - x[:-2]) / (x[2:] - x[:-2])
    chord = v[:-2] * (1 - lam) + v[2:] * lam
    return float(max(0.0, (v[1:-1] - chord).max()))


def pressure_curve(space, potential, q_grid, n, brackets=True,
                   certificate=None, domain=None,
                   budget=symbolic.DEFAULT_WORD_BUDGET, **kw):
    """Finite-n pressure over a q-grid, with brackets where supported.

    ``domain`` defaults to all reals for additive-flagged potentials and
    to positive q otherwise; a grid outside the resolved domain is a
    :class:`DomainError` (pass ``domain="all-q"`` explicitly to surface
    finite-n values without convergence semantics).
    """
    qs = np.asarray(q_grid, dtype=float)
    if qs.ndim != 1 or qs.size == 0:
        raise DomainError("q_grid must be a non-empty 1-d array")
    if np.any(np.diff(qs) <= 0):
        raise DomainError("q_grid must be strictly increasing")
    if domain is None:
        domain = ALL_Q if potential.structure == ADDITIVE else POSITIVE_Q
    if domain not in (POSITIVE_Q, ALL_Q):
        raise DomainError(f"unknown domain constraint {domain!r}")
    if domain == POSITIVE_Q and qs[0] <= 0:
        raise DomainError("grid enters q <= 0 but the potential only "
                          "supports the positive-q domain")
    meta = {}
    upper = lower = None
    if brackets:
        levels = cylinder_log_sums(space, potential, qs, range(1, n + 1),
                                   budget=budget, **kw)
        ns = np.arange(1, n + 1)
        per_n = levels / ns[:, None]
        values = per_n[-1]
        depth = min(_DEFAULT_CHECK_DEPTH, n)
        report = check_submultiplicativity(space, potential, depth, budget=budget)
        checked = report.holds(H_CHECK_SLACK)
        meta["submultiplicative_checked"] = checked
        valid = checked & ((qs > 0) | (potential.structure == ADDITIVE))
        if valid.any():
            upper = np.where(valid, per_n.min(axis=0), np.nan)
        if certificate is not None and (ns >= certificate.n).any():
            usable = ns >= certificate.n
            cand = (levels[usable] + qs[None, :] * np.log(certificate.c)) \
                / (ns[usable, None] + certificate.t)
            lower = np.where(qs > 0, cand.max(axis=0), np.nan)
    else:
        values = finite_pressure_grid(space, potential, qs, n,
                                      budget=budget, **kw)
    defect = midpoint_convexity_defect(qs, values)
    meta.setdefault("n", n)
    return PressureCurve(q_grid=qs, values=np.asarray(values, float), n_used=n,
                         domain_constraint=domain, convexity_defect=defect,
                         upper=upper, lower=lower, meta=meta)


def pressure_kd(space, potentials, q_vec, n, **kw):
    """Finite-n pressure of the combination sum_i q_i * Phi_i."""
    combined = linear_combination(q_vec, potentials)
    return finite_pressure(space, combined, 1.0, n, **kw)


def pressure_kd_grid(space, potentials, q_points, n, **kw):
    """Vectorized :func:`pressure_kd` over rows of ``q_points``."""
    pts = np.atleast_2d(np.asarray(q_points, dtype=float))
    return weighted_log_sums(space, potentials, pts, n, **kw) / n


def variational_gap(space, potential, q, measure, n, **kw):
    """finite_pressure minus the measure's entropy + q * exponent bound.

    Nonnegative up to rounding at every fixed n: the weighted exponential
    sum of a probability vector never exceeds the free log-sum-exp
    (Gibbs' inequality).
    """
    from .measures import entropy, lyapunov_exponent
    est = lyapunov_exponent(space, measure, potential, method="cylinder", n=n)
    p_val = finite_pressure(space, potential, q, n, **kw)
    return p_val - (entropy(measure) + q * est.value)
