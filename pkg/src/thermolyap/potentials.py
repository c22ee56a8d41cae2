"""Word potentials: the value of log phi on finite admissible words.

A potential assigns an extended real (``-inf`` allowed, meaning phi = 0)
to every admissible word.  ``-inf`` is a first-class value with fixed
arithmetic: under a linear combination a positive coefficient propagates
it, a zero coefficient contributes 0, and a negative coefficient is an
error (the combination is ill-posed).

Structure flags are advisory labels ("additive", "subadditive",
"unknown"); correctness-critical consumers re-derive validity from
explicit checks instead of trusting the flag.
"""

import numpy as np

from . import symbolic
from .errors import IllPosedCombinationError, SupportError

NEG_INF = float("-inf")

ADDITIVE = "additive"
SUBADDITIVE = "subadditive"
UNKNOWN = "unknown"

_FLAGS = (ADDITIVE, SUBADDITIVE, UNKNOWN)


class WordPotential:
    """Base class: deterministic, total evaluation on admissible words.

    Subclasses override :meth:`values` with a vectorized path; the scalar
    :meth:`value` delegates to it.
    """

    structure = UNKNOWN
    description = ""

    def __init__(self, evaluator=None, structure=UNKNOWN, description=""):
        if structure not in _FLAGS:
            raise ValueError(f"unknown structure flag {structure!r}")
        self._evaluator = evaluator
        self.structure = structure
        self.description = description

    def value(self, word):
        """log phi of a single word."""
        block = np.asarray(word, dtype=np.int64)[None, :]
        return float(self.values(block)[0])

    def values(self, block):
        """log phi of every row of a (B, n) word block."""
        if self._evaluator is None:
            raise NotImplementedError
        return np.array([self._evaluator(tuple(int(x) for x in row))
                         for row in block], dtype=float)

    def __repr__(self):
        name = type(self).__name__
        return f"<{name} {self.structure} {self.description!r}>"


class WindowFunction:
    """A locally constant function given by its table on length-k windows.

    ``table`` holds one value per window word in lexicographic order
    (length m**k); entries at inadmissible windows of a subshift are
    never read.
    """

    def __init__(self, window, table, alphabet_size=None):
        table = np.asarray(table, dtype=float)
        if window < 1:
            raise ValueError("window must be >= 1")
        if alphabet_size is None:
            m = round(table.size ** (1.0 / window))
            if m ** window != table.size:
                raise ValueError(f"table size {table.size} is not a perfect "
                                 f"{window}-th power of an alphabet size")
        else:
            m = alphabet_size
            if table.size != m ** window:
                raise ValueError(f"table needs {m ** window} entries, got {table.size}")
        if not np.all(np.isfinite(table) | np.isnan(table)):
            raise ValueError("window table entries must be finite")
        self.window = window
        self.alphabet_size = m
        self.table = table

    def __call__(self, word):
        w = np.asarray(word, dtype=np.int64)
        if w.size != self.window:
            raise ValueError(f"expected a window of length {self.window}")
        powers = self.alphabet_size ** np.arange(self.window - 1, -1, -1, dtype=np.int64)
        return float(self.table[int(w @ powers)])


class BirkhoffPotential(WordPotential):
    """Sliding-window sums of a :class:`WindowFunction`.

    value(I) = sum_j g(I[j : j+k]) over the |I| - k + 1 windows of I;
    words shorter than the window evaluate to 0 (the O(k) boundary term
    is irrelevant to every per-symbol limit).  For k >= 2 the additivity
    flag is asymptotic: concatenation introduces junction windows, so
    value(IJ) differs from value(I) + value(J) by at most (k-1) window
    values.
    """

    def __init__(self, space, window_function, description=""):
        super().__init__(structure=ADDITIVE,
                         description=description or "window potential")
        if window_function.alphabet_size != space.alphabet_size:
            raise ValueError("window table alphabet does not match the space")
        self.space = space
        self.window_function = window_function

    def values(self, block):
        g = self.window_function
        k, m = g.window, g.alphabet_size
        b, n = block.shape
        if n < k:
            return np.zeros(b)
        w = block.astype(np.int64)
        powers = m ** np.arange(k - 1, -1, -1, dtype=np.int64)
        out = np.zeros(b)
        for j in range(n - k + 1):
            idx = w[:, j:j + k] @ powers
            out += g.table[idx]
        return out


def birkhoff_potential(space, window_function, description=""):
    """Additive potential built from sliding-window sums of ``g``."""
    return BirkhoffPotential(space, window_function, description)


def constant_potential(space, c):
    """Additive potential contributing ``c`` per symbol."""
    table = np.full(space.alphabet_size, float(c))
    return birkhoff_potential(space, WindowFunction(1, table),
                              description=f"constant {c} per symbol")


class CombinedPotential(WordPotential):
    """Linear combination sum_i q_i * Phi_i with fixed -inf arithmetic."""

    def __init__(self, coefficients, parts, structure, description=""):
        super().__init__(structure=structure,
                         description=description or "linear combination")
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.parts = list(parts)

    def values(self, block):
        out = np.zeros(block.shape[0])
        for q, part in zip(self.coefficients, self.parts):
            if q == 0.0:
                continue
            v = part.values(block)
            neg = np.isneginf(v)
            if neg.any():
                if q < 0:
                    raise IllPosedCombinationError(
                        "negative coefficient applied to a -inf potential value")
                out = np.where(neg, NEG_INF, out + np.where(neg, 0.0, v) * q)
            else:
                out = out + q * v
        return out


def linear_combination(coefficients, potentials, description=""):
    """Combine potentials as sum_i q_i * Phi_i.

    The result is flagged additive when every part is additive;
    subadditive when the remaining parts are subadditive and carry
    nonnegative coefficients; unknown otherwise.
    """
    coefficients = np.asarray(coefficients, dtype=float)
    potentials = list(potentials)
    if coefficients.ndim != 1 or len(potentials) != coefficients.size:
        raise ValueError("need exactly one coefficient per potential")
    if all(p.structure == ADDITIVE for p in potentials):
        structure = ADDITIVE
    elif all(p.structure == ADDITIVE
             or (p.structure == SUBADDITIVE and q >= 0)
             for q, p in zip(coefficients, potentials)):
        structure = SUBADDITIVE
    else:
        structure = UNKNOWN
    return CombinedPotential(coefficients, potentials, structure, description)


def scale(potential, factor):
    """Convenience wrapper for the one-term linear combination."""
    return linear_combination([factor], [potential],
                              description=f"{factor} * ({potential.description})")


def shift(space, potential, c):
    """Potential plus a constant ``c`` per symbol."""
    return linear_combination(
        [1.0, 1.0], [potential, constant_potential(space, c)],
        description=f"({potential.description}) + {c} per symbol")


class MeasurePotential(WordPotential):
    """log of the cylinder mass of a fully supported Markov measure."""

    def __init__(self, space, measure, description=""):
        pi, P = measure.stationary, measure.transition
        if np.any(pi <= 0):
            raise SupportError("measure must give positive mass to every symbol")
        allowed = space.transitions if space.transitions is not None \
            else np.ones((space.alphabet_size, space.alphabet_size), bool)
        if np.any((P <= 0) & allowed):
            raise SupportError("measure must give positive mass to every "
                               "admissible cylinder (full support required)")
        super().__init__(structure=SUBADDITIVE,
                         description=description or "cylinder-mass potential")
        self.space = space
        self.measure = measure
        # mu(IJ) <= C mu(I) mu(J) with C = max P_ij / pi_j over the support.
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(allowed & (P > 0), P / pi[None, :], 0.0)
        self.quasi_multiplicativity = float(ratios.max())

    def values(self, block):
        return self.measure.log_cylinder_masses(block)


def measure_potential(space, measure, description=""):
    """Potential I -> log mu([I]) for a fully supported Markov measure."""
    return MeasurePotential(space, measure, description)


def additive_approximation(space, potential, window, n_test,
                           budget=symbolic.DEFAULT_WORD_BUDGET):
    """Best window approximation of a potential, with its empirical defect.

    Returns ``(g, defect)`` where ``g`` has table value(w)/window on every
    admissible window ``w`` and ``defect`` is the largest per-symbol gap
    between value(I) and the cyclic window sum of ``g`` over I, over the
    admissible words of length ``n_test``.  The cyclic sum (n windows,
    wrapping) stands in for the n-term orbit sums of the infinite
    sequence, so an additive input has zero defect at every window; the
    plain sliding sum would carry a spurious O(k/n) boundary term.
    Inadmissible wrap-around windows of a subshift are skipped.

    The defect over-estimates the asymptotic distance to the additive
    class; it is not a decision procedure.

    Raises
    ------
    ValueError
        If any admissible window evaluates to -inf (no window
        approximation exists there) or ``n_test < 2 * window``.
    """
    if n_test < 2 * window:
        raise ValueError("n_test must be at least twice the window")
    m = space.alphabet_size
    table = np.full(m ** window, np.nan)
    for block in symbolic.iter_word_blocks(space, window, budget=budget):
        vals = potential.values(block)
        if np.isneginf(vals).any():
            raise ValueError("potential vanishes on an admissible window; "
                             "no additive window approximation exists")
        powers = m ** np.arange(window - 1, -1, -1, dtype=np.int64)
        table[block.astype(np.int64) @ powers] = vals / window
    g = WindowFunction(window, table, alphabet_size=m)
    powers = m ** np.arange(window - 1, -1, -1, dtype=np.int64)
    defect = 0.0
    for block in symbolic.iter_word_blocks(space, n_test, budget=budget):
        w = block.astype(np.int64)
        wrapped = np.concatenate([w, w[:, :window - 1]], axis=1) \
            if window > 1 else w
        approx = np.zeros(w.shape[0])
        for j in range(n_test):
            idx = wrapped[:, j:j + window] @ powers
            vals = g.table[idx]
            approx += np.where(np.isnan(vals), 0.0, vals)
        gap = np.abs(potential.values(block) - approx)
        defect = max(defect, float(gap.max()) / n_test)
    return g, defect
