"""Full shifts and subshifts of finite type over a finite alphabet.

Finite words are represented as plain tuples of 0-based symbols (scalar
API) or as 2-d integer arrays with one word per row (batch API).  All
enumeration is depth-first in lexicographic order, and the blocked
iterator partitions the word space by fixed prefixes so that disjoint
chunks can be mapped over in parallel and merged deterministically.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError

#: Hard cap on the number of words any enumeration is allowed to touch.
DEFAULT_WORD_BUDGET = 1 << 25

#: Default number of words per block yielded by :func:`iter_word_blocks`.
DEFAULT_BLOCK_SIZE = 1 << 16


@dataclass(frozen=True, eq=False)
class ShiftSpace:
    """A one-sided full shift or subshift of finite type.

    Parameters
    ----------
    alphabet_size : int
        Number of symbols m >= 2.  Symbols are 0-based internally.
    transitions : ndarray of bool, optional
        m x m adjacency matrix; entry (i, j) allows symbol j to follow
        symbol i.  ``None`` means the full shift.  Every row and every
        column must contain at least one allowed transition.
    """

    alphabet_size: int
    transitions: np.ndarray | None = None

    def __post_init__(self):
        m = self.alphabet_size
        if not isinstance(m, (int, np.integer)) or m < 2:
            raise ValueError(f"alphabet_size must be an integer >= 2, got {m!r}")
        object.__setattr__(self, "alphabet_size", int(m))
        if self.transitions is not None:
            t = np.asarray(self.transitions, dtype=bool)
            if t.shape != (m, m):
                raise ValueError(f"transitions must be {m}x{m}, got {t.shape}")
            if not t.any(axis=1).all() or not t.any(axis=0).all():
                raise ValueError("transitions must have no dead symbols "
                                 "(every row and column needs a True entry)")
            t.setflags(write=False)
            object.__setattr__(self, "transitions", t)

    @property
    def is_full(self):
        return self.transitions is None

    def is_admissible(self, word):
        """True when every consecutive symbol pair is allowed."""
        w = np.asarray(word, dtype=np.int64)
        if w.ndim != 1 or w.size == 0:
            return False
        if w.min() < 0 or w.max() >= self.alphabet_size:
            return False
        if self.transitions is None or w.size == 1:
            return True
        return bool(self.transitions[w[:-1], w[1:]].all())


def word_count(space, n):
    """Number of admissible words of length ``n``, as an exact integer.

    Computed through the power of the transition matrix applied to the
    all-ones vector, never by enumeration.
    """
    if n < 1:
        raise ValueError("word length must be >= 1")
    m = space.alphabet_size
    if space.is_full:
        return m ** n
    rows = [[int(x) for x in row] for row in space.transitions]
    v = [1] * m
    for _ in range(n - 1):
        v = [sum(rows[i][j] * v[j] for j in range(m)) for i in range(m)]
    return sum(v)


def check_budget(space, n, budget=DEFAULT_WORD_BUDGET):
    """Raise :class:`BudgetExceededError` when length ``n`` is too rich."""
    count = word_count(space, n)
    if count > budget:
        raise BudgetExceededError(
            f"{count} admissible words of length {n} exceed the budget {budget}")
    return count


def _symbol_dtype(m):
    return np.uint8 if m <= 256 else np.int32


def _extend_block(space, block):
    """Append one symbol column in every admissible way, preserving order."""
    m = space.alphabet_size
    b = block.shape[0]
    out = np.empty((b * m, block.shape[1] + 1), dtype=block.dtype)
    out[:, :-1] = np.repeat(block, m, axis=0)
    out[:, -1] = np.tile(np.arange(m, dtype=block.dtype), b)
    if space.transitions is not None and block.shape[1] > 0:
        keep = space.transitions[out[:, -2].astype(np.int64),
                                 out[:, -1].astype(np.int64)]
        out = out[keep]
    return out


def iter_word_blocks(space, n, block_size=DEFAULT_BLOCK_SIZE,
                     prefix=(), budget=DEFAULT_WORD_BUDGET):
    """Yield the admissible words of length ``n`` in lexicographic blocks.

    Each yielded array has shape (B, n) with one word per row.  The
    concatenation of all blocks is exactly the depth-first lexicographic
    enumeration.  Restricting to a fixed ``prefix`` yields only the words
    starting with it, which partitions the word space for parallel use.
    """
    if n < 1:
        raise ValueError("word length must be >= 1")
    check_budget(space, n, budget)
    m = space.alphabet_size
    dtype = _symbol_dtype(m)
    prefix = np.asarray(prefix, dtype=dtype)
    if prefix.size:
        if not space.is_admissible(prefix):
            return
        if prefix.size >= n:
            yield prefix[None, :n].copy()
            return

    free = n - prefix.size
    # Depth of the dense suffix expansion: the largest s with m**s within
    # the block size; remaining symbols are fixed by iterating prefixes.
    s = min(free, max(1, int(np.log(max(block_size, m)) / np.log(m))))
    head_len = free - s

    for head in _prefixes_under(space, prefix, head_len):
        block = head[None, :] if head.size else np.empty((1, 0), dtype=dtype)
        for _ in range(s):
            block = _extend_block(space, block)
            if block.size == 0:
                break
        if block.shape[0]:
            yield block


def _prefixes_under(space, prefix, extra):
    """Admissible extensions of ``prefix`` by ``extra`` symbols, in order."""
    dtype = prefix.dtype
    if extra == 0:
        yield prefix
        return
    block = prefix[None, :] if prefix.size else None
    if block is None:
        block = np.arange(space.alphabet_size, dtype=dtype)[:, None]
        extra -= 1
    for _ in range(extra):
        block = _extend_block(space, block)
    yield from block


def enumerate_words(space, n, budget=DEFAULT_WORD_BUDGET):
    """Generate every admissible word of length ``n`` as a tuple.

    Deterministic: two runs yield identical sequences (lexicographic
    depth-first order).
    """
    for block in iter_word_blocks(space, n, budget=budget):
        for row in block:
            yield tuple(int(x) for x in row)


def block_recode(space, block_len):
    """Recode to the alphabet of admissible ``block_len``-words.

    Returns ``(recoded_space, blocks)`` where ``blocks[i]`` is the word of
    the original space carried by new symbol ``i``, and two new symbols
    may follow each other exactly when their blocks overlap in all but
    one position.  Realizes higher-order chains as order-1 chains on the
    block alphabet.
    """
    if block_len < 1:
        raise ValueError("block length must be >= 1")
    if block_len == 1:
        return space, [(s,) for s in range(space.alphabet_size)]
    blocks = list(enumerate_words(space, block_len))
    k = len(blocks)
    trans = np.zeros((k, k), dtype=bool)
    index = {b: i for i, b in enumerate(blocks)}
    for i, b in enumerate(blocks):
        for s in range(space.alphabet_size):
            nxt = b[1:] + (s,)
            j = index.get(nxt)
            if j is not None and space.is_admissible(b + (s,)):
                trans[i, j] = True
    return ShiftSpace(k, trans), blocks
