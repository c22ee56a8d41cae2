"""Matrix-product potentials and their structural verification.

The potentials here evaluate log of the operator norm (or of a product
of leading singular values) of the matrix product read off a word.
Zero products are first class: log phi = -inf.  Products are formed
left to right with per-row rescaling by powers of two once entries
leave a safe magnitude window, the exponent being tracked separately in
log space, so values stay exact for long words.
"""

from dataclasses import dataclass

import numpy as np

from . import symbolic
from .errors import BudgetExceededError
from .potentials import SUBADDITIVE, WordPotential

_RANK_TOL = 1e-10
_RESCALE_EXP = 400  # rescale once |entries| leave [2**-400, 2**400]
_LN2 = float(np.log(2.0))


@dataclass(frozen=True, eq=False)
class MatrixCocycle:
    """One real d x d matrix per symbol."""

    matrices: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrices, dtype=float)
        if M.ndim != 3 or M.shape[1] != M.shape[2]:
            raise ValueError("matrices must have shape (m, d, d)")
        if not np.isfinite(M).all():
            raise ValueError("matrix entries must be finite")
        if not np.any(M != 0.0):
            raise ValueError("at least one matrix must be nonzero")
        M.setflags(write=False)
        object.__setattr__(self, "matrices", M)

    @property
    def alphabet_size(self):
        return self.matrices.shape[0]

    @property
    def dimension(self):
        return self.matrices.shape[1]


def _products_with_offsets(matrices, block):
    """Left-to-right products over each row, with log rescaling offsets."""
    w = block.astype(np.int64)
    prod = matrices[w[:, 0]].copy()
    offset = np.zeros(w.shape[0])
    hi, lo = 2.0 ** _RESCALE_EXP, 2.0 ** (-_RESCALE_EXP)
    for t in range(1, w.shape[1]):
        prod = prod @ matrices[w[:, t]]
        mx = np.abs(prod).max(axis=(1, 2))
        wild = (mx > hi) | ((mx > 0) & (mx < lo))
        if wild.any():
            e = np.floor(np.log2(mx[wild]))
            prod[wild] *= np.exp2(-e)[:, None, None]
            offset[wild] += e * _LN2
    return prod, offset


class CocyclePotential(WordPotential):
    """log of the product of the top-j singular values of the word product.

    ``rank=1`` is the operator norm.  Submultiplicativity of these
    functionals makes the potential subadditive exactly.
    """

    def __init__(self, cocycle, rank=1, description=""):
        d = cocycle.dimension
        if not 1 <= rank <= d:
            raise ValueError(f"rank must lie in 1..{d}")
        super().__init__(structure=SUBADDITIVE, description=description)
        self.cocycle = cocycle
        self.rank = rank

    def values(self, block):
        prod, offset = _products_with_offsets(self.cocycle.matrices, block)
        if self.rank == 1:
            # sigma_1^2 is the top eigenvalue of P^T P; cheaper than a
            # full SVD and accurate for the leading singular value.
            gram = prod.transpose(0, 2, 1) @ prod
            top = np.maximum(np.linalg.eigvalsh(gram)[:, -1], 0.0)
            with np.errstate(divide="ignore"):
                return 0.5 * np.log(top) + offset
        sv = np.linalg.svd(prod, compute_uv=False)
        with np.errstate(divide="ignore"):
            logs = np.log(sv[:, :self.rank])
        return logs.sum(axis=1) + self.rank * offset


def norm_potential(cocycle):
    """Potential I -> log of the operator norm of the word product."""
    return CocyclePotential(cocycle, rank=1, description="matrix-norm potential")


def singular_value_potential(cocycle, rank):
    """Potential I -> log of the product of the top ``rank`` singular values."""
    return CocyclePotential(cocycle, rank=rank,
                            description=f"top-{rank} singular-value potential")


@dataclass(frozen=True)
class IrreducibilityReport:
    irreducible: bool
    witness: np.ndarray | None  # orthonormal rows spanning an invariant subspace

    @property
    def verdict(self):
        return "irreducible" if self.irreducible else "reducible"


def check_irreducibility(cocycle, tol=_RANK_TOL):
    """Look for a proper nonzero subspace invariant under every matrix.

    For each standard basis vector the smallest invariant subspace
    containing it is generated by span growth under all matrices until
    the dimension stabilizes.  The verdict is exact for this
    orbit-closure family: reducible comes with an orthonormal witness
    basis, irreducible means no generated candidate is proper.
    """
    M = cocycle.matrices
    if not np.any(M != 0.0):
        raise ValueError("degenerate cocycle: all matrices are zero")
    d = cocycle.dimension
    for start in range(d):
        basis = np.zeros((1, d))
        basis[0, start] = 1.0
        while basis.shape[0] < d:
            images = np.concatenate([basis] + [basis @ A.T for A in M])
            new_basis = _orthonormal_rows(images, tol)
            if new_basis.shape[0] == basis.shape[0]:
                return IrreducibilityReport(False, new_basis)
            basis = new_basis
    return IrreducibilityReport(True, None)


def _orthonormal_rows(rows, tol):
    u, s, vt = np.linalg.svd(rows, full_matrices=False)
    rank = int(np.sum(s > s[0] * tol)) if s.size and s[0] > 0 else 0
    return vt[:rank]


@dataclass(frozen=True)
class SubmultiplicativityReport:
    """Outcome of the exhaustive pairwise product check."""

    max_violation: float
    witness: tuple | None  # (I, J) with value(IJ) > value(I) + value(J)
    n_max: int
    pairs_checked: int

    def holds(self, slack=0.0):
        return self.max_violation <= slack


def _value_tables(space, potential, max_len, budget):
    """Per-length value arrays indexed by word code; NaN = inadmissible."""
    m = space.alphabet_size
    total = sum(m ** s for s in range(1, max_len + 1))
    if total > budget:
        raise BudgetExceededError(
            f"value tables for lengths up to {max_len} need {total} slots "
            f"(> budget {budget})")
    tables = {}
    for s in range(1, max_len + 1):
        tab = np.full(m ** s, np.nan)
        powers = m ** np.arange(s - 1, -1, -1, dtype=np.int64)
        for block in symbolic.iter_word_blocks(space, s, budget=budget):
            tab[block.astype(np.int64) @ powers] = potential.values(block)
        tables[s] = tab
    return tables


def check_submultiplicativity(space, potential, n_max,
                              budget=symbolic.DEFAULT_WORD_BUDGET):
    """Exhaustively test value(IJ) <= value(I) + value(J).

    Covers every admissible pair with |I| + |J| <= n_max whose
    concatenation is admissible.  A -inf left-hand side always passes;
    a -inf right-hand side with finite left-hand side is an infinite
    violation.  Returns the maximal positive defect and one witness.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    m = space.alphabet_size
    tables = _value_tables(space, potential, n_max, budget)
    worst = 0.0
    witness = None
    pairs = 0
    for la in range(1, n_max):
        va = tables[la]
        codes_a = np.flatnonzero(~np.isnan(va))
        for lb in range(1, n_max - la + 1):
            vb = tables[lb]
            codes_b = np.flatnonzero(~np.isnan(vb))
            cat = tables[la + lb][codes_a[:, None] * (m ** lb) + codes_b[None, :]]
            valid = ~np.isnan(cat)
            pairs += int(valid.sum())
            rhs = va[codes_a][:, None] + vb[codes_b][None, :]
            with np.errstate(invalid="ignore"):
                defect = np.where(valid & ~np.isneginf(cat), cat - rhs, -np.inf)
            i, j = np.unravel_index(np.argmax(defect), defect.shape)
            if defect[i, j] > worst:
                worst = float(defect[i, j])
                witness = (_decode(int(codes_a[i]), la, m),
                           _decode(int(codes_b[j]), lb, m))
    return SubmultiplicativityReport(worst, witness, n_max, pairs)


def _decode(code, length, m):
    word = []
    for _ in range(length):
        word.append(code % m)
        code //= m
    return tuple(reversed(word))


@dataclass(frozen=True)
class BridgingCertificate:
    """Evidence that pairs of base words can be bridged multiplicatively.

    For every admissible pair (I, J) of length ``n`` with positive phi
    some bridge K with |K| <= ``t`` satisfies
    phi(IKJ) >= c * phi(I) * phi(J), and ``c`` is the largest constant
    that works uniformly over the verified pairs.  The certificate
    records exactly the finite scope that was checked; nothing
    asymptotic is claimed.
    """

    n: int
    t: int
    c: float
    witnesses: tuple  # sampled (I, K, J) triples achieving their pair's best ratio

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("bridging constant must be positive")


def search_bridging_constant(space, potential, n, t_max,
                             budget=symbolic.DEFAULT_WORD_BUDGET,
                             max_witnesses=8):
    """Exhaustive bridging search over pairs of length-``n`` words.

    Returns a :class:`BridgingCertificate` when every pair of positive-phi
    words admits a bridge of length <= ``t_max`` keeping the ratio
    phi(IKJ) / (phi(I) phi(J)) positive, else ``None``.  Exponential in
    ``n`` and ``t_max``; a verification aid for small sizes only.
    """
    if n < 1 or t_max < 0:
        raise ValueError("need n >= 1 and t_max >= 0")
    m = space.alphabet_size
    tables = _value_tables(space, potential, 2 * n + t_max, budget)
    vn = tables[n]
    codes = np.flatnonzero(~np.isnan(vn) & ~np.isneginf(vn))
    if codes.size == 0:
        return None
    if codes.size ** 2 * (t_max + 1) > budget:
        raise BudgetExceededError(
            f"{codes.size ** 2} word pairs x {t_max + 1} bridge lengths "
            f"exceed the budget {budget}; the search is exponential and "
            "meant for small base lengths")
    worst = np.inf
    used_t = 0
    witnesses = []
    for ca in codes:
        for cb in codes:
            base = vn[ca] + vn[cb]
            best = -np.inf
            best_bridge = None
            for t in range(t_max + 1):
                tab = tables[2 * n + t]
                if t == 0:
                    cat = tab[ca * m ** n + cb]
                    ratios = np.array([cat - base])
                    bridge_codes = np.array([0])
                else:
                    bridge_codes = np.arange(m ** t, dtype=np.int64)
                    cat = tab[(ca * m ** t + bridge_codes) * m ** n + cb]
                    with np.errstate(invalid="ignore"):
                        ratios = cat - base
                k = int(np.nanargmax(ratios)) if not np.isnan(ratios).all() else -1
                if k >= 0 and not np.isnan(ratios[k]) and ratios[k] > best:
                    best = float(ratios[k])
                    best_bridge = (t, _decode(int(bridge_codes[k]), t, m))
            if not np.isfinite(best):
                return None
            if best < worst:
                worst = best
            used_t = max(used_t, best_bridge[0])
            if len(witnesses) < max_witnesses:
                witnesses.append((_decode(int(ca), n, m), best_bridge[1],
                                  _decode(int(cb), n, m)))
    return BridgingCertificate(n=n, t=used_t, c=float(np.exp(worst)),
                               witnesses=tuple(witnesses))
