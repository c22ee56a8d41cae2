"""Markov and Bernoulli measures: entropy, exponents, sampling, search.

Only order-1 stationary chains are first class; higher-order chains are
reached by recoding the shift to a block alphabet (see
:func:`thermolyap.symbolic.block_recode`).
"""

from dataclasses import dataclass

import numpy as np

from . import symbolic
from .errors import SupportError
from .potentials import NEG_INF, SUBADDITIVE, BirkhoffPotential

_ROW_SUM_TOL = 1e-12
_STATIONARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MarkovMeasure:
    """A stationary order-1 Markov chain on a shift space.

    ``transition`` is row-stochastic; ``stationary`` is a left fixed
    vector with unit sum.  Bernoulli measures are the special case of
    equal rows.
    """

    transition: np.ndarray
    stationary: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.transition, dtype=float)
        pi = np.asarray(self.stationary, dtype=float)
        m = P.shape[0]
        if P.shape != (m, m) or pi.shape != (m,):
            raise ValueError("transition must be square and stationary must match")
        if np.any(P < 0) or np.any(pi < -1e-15):
            raise ValueError("probabilities must be nonnegative")
        if np.abs(P.sum(axis=1) - 1.0).max() > _ROW_SUM_TOL:
            raise ValueError("transition rows must sum to 1")
        if np.abs(pi @ P - pi).max() > _STATIONARY_TOL:
            raise ValueError("stationary vector is not invariant under the chain")
        if abs(pi.sum() - 1.0) > 1e-10:
            raise ValueError("stationary vector must sum to 1")
        P.setflags(write=False)
        pi.setflags(write=False)
        object.__setattr__(self, "transition", P)
        object.__setattr__(self, "stationary", pi)

    @property
    def alphabet_size(self):
        return self.transition.shape[0]

    def log_cylinder_masses(self, block):
        """log mu([I]) for every row of a word block; -inf on null cylinders."""
        w = block.astype(np.int64)
        with np.errstate(divide="ignore"):
            log_pi = np.log(self.stationary)
            log_P = np.log(self.transition)
        out = log_pi[w[:, 0]].copy()
        for t in range(w.shape[1] - 1):
            out += log_P[w[:, t], w[:, t + 1]]
        return out


def markov_measure(transition, space=None, stationary=None):
    """Build a :class:`MarkovMeasure`, computing the stationary vector.

    When ``space`` carries a transition structure, the chain's support
    must stay inside it.
    """
    P = np.asarray(transition, dtype=float)
    m = P.shape[0]
    if space is not None:
        if m != space.alphabet_size:
            raise ValueError("chain size does not match the alphabet")
        if space.transitions is not None and np.any((P > 0) & ~space.transitions):
            raise SupportError("chain uses transitions forbidden by the space")
    if stationary is None:
        stationary = _stationary_vector(P)
    return MarkovMeasure(P, np.asarray(stationary, dtype=float))


def bernoulli_measure(weights):
    """Product measure with the given symbol weights."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be a probability vector")
    return MarkovMeasure(np.tile(w, (w.size, 1)), w)


def _stationary_vector(P):
    m = P.shape[0]
    # Solve pi (P - I) = 0 with the normalization sum(pi) = 1.
    A = np.vstack([(P - np.eye(m)).T, np.ones(m)])
    b = np.zeros(m + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    s = pi.sum()
    if s <= 0:
        raise ValueError("failed to compute a stationary distribution")
    return pi / s


def entropy(measure):
    """Entropy rate -sum_i pi_i sum_j P_ij log P_ij, with 0 log 0 = 0."""
    P = measure.transition
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(P > 0, P * np.log(P), 0.0)
    return float(-(measure.stationary @ plogp.sum(axis=1)))


@dataclass(frozen=True)
class ExponentEstimate:
    """A Lyapunov-exponent estimate with its provenance.

    ``width`` is a reported confidence width: 0 for exact values, one
    standard error for Monte Carlo.  ``upper_bound`` marks cylinder
    estimates of subadditive potentials, which bound the limit from
    above at every n (and decrease along n = 2^k).
    """

    value: float
    method: str
    n: int = 0
    width: float = 0.0
    upper_bound: bool = False

    def __float__(self):
        return self.value


def lyapunov_exponent(space, measure, potential, method="cylinder",
                      n=8, samples=200, seed=0,
                      budget=symbolic.DEFAULT_WORD_BUDGET):
    """Estimate the measure average of the per-symbol growth of log phi.

    Methods
    -------
    "exact"
        Window-table expectation; requires an additive window potential.
    "cylinder"
        (1/n) sum over length-n words of mu([I]) * value(I).  For a
        subadditive potential this is an upper bound of the limit and is
        non-increasing along the dyadic lengths n = 2^k.
    "kingman"
        Monte Carlo average of value(w)/n over sampled trajectories,
        with a reported standard error.

    A -inf potential value met with positive mass makes the estimate
    -inf (an admissible value for the limit).
    """
    if method == "exact":
        if not isinstance(potential, BirkhoffPotential):
            raise ValueError("exact method needs an additive window potential")
        g = potential.window_function
        k = g.window
        total = 0.0
        for block in symbolic.iter_word_blocks(space, k, budget=budget):
            masses = np.exp(measure.log_cylinder_masses(block))
            vals = potential.values(block) if k == 1 else _window_values(g, block)
            total += float(masses @ vals)
        return ExponentEstimate(total, "exact", n=k)
    if method == "cylinder":
        total = 0.0
        hit_neg_inf = False
        for block in symbolic.iter_word_blocks(space, n, budget=budget):
            masses = np.exp(measure.log_cylinder_masses(block))
            vals = potential.values(block)
            neg = np.isneginf(vals)
            if np.any(neg & (masses > 0)):
                hit_neg_inf = True
                break
            total += float(masses @ np.where(neg, 0.0, vals))
        value = NEG_INF if hit_neg_inf else total / n
        return ExponentEstimate(value, "cylinder", n=n,
                                upper_bound=potential.structure == SUBADDITIVE)
    if method == "kingman":
        vals = np.empty(samples)
        for i in range(samples):
            w = sample_trajectory(measure, n, seed=seed + i)
            vals[i] = potential.values(w[None, :])[0] / n
        if np.isneginf(vals).any():
            return ExponentEstimate(NEG_INF, "kingman", n=n, width=np.inf)
        return ExponentEstimate(float(vals.mean()), "kingman", n=n,
                                width=float(vals.std(ddof=1) / np.sqrt(samples)))
    raise ValueError(f"unknown method {method!r}")


def _window_values(g, block):
    powers = g.alphabet_size ** np.arange(g.window - 1, -1, -1, dtype=np.int64)
    return g.table[block.astype(np.int64) @ powers]


def affinity_defect(space, measure_a, measure_b, p, potential, n,
                    budget=symbolic.DEFAULT_WORD_BUDGET):
    """Linearity defect of the cylinder exponent under measure mixtures.

    The mixture is represented by mixing cylinder masses directly (it is
    generally not a Markov chain).  The expectation is linear in the
    measure, so the defect is zero up to rounding at every fixed n.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    mixed = 0.0
    part_a = 0.0
    part_b = 0.0
    any_neg = False
    for block in symbolic.iter_word_blocks(space, n, budget=budget):
        ma = np.exp(measure_a.log_cylinder_masses(block))
        mb = np.exp(measure_b.log_cylinder_masses(block))
        vals = potential.values(block)
        neg = np.isneginf(vals)
        if np.any(neg & ((p * ma + (1 - p) * mb) > 0)):
            any_neg = True
            break
        v = np.where(neg, 0.0, vals)
        mixed += float((p * ma + (1 - p) * mb) @ v)
        part_a += float(ma @ v)
        part_b += float(mb @ v)
    if any_neg:
        return 0.0  # all three estimates are -inf; they agree by convention
    return abs(mixed - p * part_a - (1 - p) * part_b) / n


def sample_trajectory(measure, length, seed=0):
    """Sample a word of the given length from the stationary chain.

    Deterministic under a fixed seed (PCG64 behind numpy's default_rng).
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    rng = np.random.default_rng(seed)
    cum_pi = np.cumsum(measure.stationary)
    cum_P = np.cumsum(measure.transition, axis=1)
    u = rng.random(length)
    word = np.empty(length, dtype=np.int64)
    word[0] = np.searchsorted(cum_pi, u[0] * cum_pi[-1])
    for t in range(1, length):
        row = cum_P[word[t - 1]]
        word[t] = np.searchsorted(row, u[t] * row[-1])
    np.clip(word, 0, measure.alphabet_size - 1, out=word)
    return word


def equilibrium_search(space, potential, q, restarts=6, iterations=400,
                       n=8, seed=0, budget=symbolic.DEFAULT_WORD_BUDGET):
    """Search Markov measures maximizing entropy + q * cylinder exponent.

    Rows are parameterized by softmax coordinates (the iterate never
    leaves the simplex); steps use the numerical gradient with an
    adaptive length and are rejected whenever the objective would
    decrease.  Returns ``(measure, objective, info)``.

    The objective is a variational lower bound for the finite-n pressure
    at the same n.  For a subadditive potential the cylinder exponent
    over-estimates the limit exponent, so the objective is reported with
    that caveat in ``info``.
    """
    if q <= 0 and potential.structure == SUBADDITIVE:
        raise ValueError("q must be positive for a subadditive potential")
    m = space.alphabet_size
    allowed = space.transitions if space.transitions is not None \
        else np.ones((m, m), dtype=bool)

    # Cache the word blocks once; n is desk-scale here.
    blocks = [b.astype(np.int64) for b in
              symbolic.iter_word_blocks(space, n, budget=budget)]
    values = [potential.values(b) for b in blocks]

    def objective(theta):
        P = _softmax_rows(theta, allowed)
        try:
            mu = markov_measure(P)
        except ValueError:
            return -np.inf, None
        total = 0.0
        for b, v in zip(blocks, values):
            masses = np.exp(mu.log_cylinder_masses(b))
            neg = np.isneginf(v)
            if np.any(neg & (masses > 0)):
                return -np.inf, mu
            total += float(masses @ np.where(neg, 0.0, v))
        return entropy(mu) + q * total / n, mu

    rng = np.random.default_rng(seed)
    best = (-np.inf, None, -1)
    for r in range(restarts):
        theta = np.zeros((m, m)) if r == 0 else rng.normal(scale=2.0, size=(m, m))
        val, _ = objective(theta)
        step = 0.5
        for _ in range(iterations):
            grad = _numerical_gradient(lambda t: objective(t)[0], theta)
            gnorm = np.abs(grad).max()
            if gnorm < 1e-11 or step < 1e-13:
                break
            trial = theta + step * grad
            tval, _ = objective(trial)
            if tval > val:
                theta, val = trial, tval
                step *= 1.6
            else:
                step *= 0.5
        val, mu = objective(theta)
        if val > best[0] and mu is not None:
            best = (val, mu, r)
    value, mu, r = best
    if mu is None:
        raise RuntimeError("equilibrium search failed to produce a measure")
    info = {"n": n, "restart": r, "restarts": restarts,
            "exponent_is_upper_bound": potential.structure == SUBADDITIVE}
    return mu, value, info


def _softmax_rows(theta, allowed):
    z = np.where(allowed, theta, -np.inf)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _numerical_gradient(f, theta, h=1e-5):
    grad = np.zeros_like(theta)
    it = np.nditer(theta, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        tp = theta.copy()
        tp[idx] += h
        tm = theta.copy()
        tm[idx] -= h
        grad[idx] = (f(tp) - f(tm)) / (2 * h)
        it.iternext()
    return grad
