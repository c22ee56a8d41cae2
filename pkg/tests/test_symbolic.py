import itertools

import numpy as np
import pytest

from thermolyap.errors import BudgetExceededError
from thermolyap.symbolic import (ShiftSpace, block_recode, enumerate_words,
                                 iter_word_blocks, word_count)

GOLDEN = ShiftSpace(2, np.array([[True, True], [True, False]]))  # no "11"


def test_full_shift_enumeration_m2_n3():
    words = list(enumerate_words(ShiftSpace(2), 3))
    assert words == [tuple(w) for w in itertools.product(range(2), repeat=3)]
    assert len(words) == 8


def test_full_shift_enumeration_m4_n1():
    assert list(enumerate_words(ShiftSpace(4), 1)) == [(0,), (1,), (2,), (3,)]


def test_sft_enumeration_matches_brute_force_filter():
    words = list(enumerate_words(GOLDEN, 3))
    oracle = [w for w in itertools.product(range(2), repeat=3)
              if all(not (a == 1 and b == 1) for a, b in zip(w, w[1:]))]
    assert words == oracle
    assert len(words) == 5


@pytest.mark.parametrize("n,count", [(1, 2), (2, 3), (3, 5), (10, 144)])
def test_golden_mean_counts_follow_fibonacci(n, count):
    assert word_count(GOLDEN, n) == count


def test_full_shift_counts():
    assert word_count(ShiftSpace(4), 12) == 4 ** 12
    assert word_count(ShiftSpace(2), 1) == 2


def test_count_matches_enumeration_for_sfts():
    rng = np.random.default_rng(3)
    for _ in range(5):
        m = int(rng.integers(2, 5))
        trans = rng.random((m, m)) < 0.7
        trans[np.arange(m), rng.integers(0, m, m)] = True  # no dead rows
        trans[rng.integers(0, m, m), np.arange(m)] = True  # no dead columns
        space = ShiftSpace(m, trans)
        for n in (1, 2, 4):
            assert word_count(space, n) == len(list(enumerate_words(space, n)))


def test_enumeration_is_deterministic():
    a = list(enumerate_words(GOLDEN, 6))
    b = list(enumerate_words(GOLDEN, 6))
    assert a == b


def test_blocks_concatenate_to_the_full_enumeration():
    space = ShiftSpace(3)
    rows = np.concatenate(list(iter_word_blocks(space, 4, block_size=10)))
    assert rows.shape == (81, 4)
    assert [tuple(r) for r in rows] == list(enumerate_words(space, 4))


def test_prefix_partition_is_disjoint_and_exhaustive():
    space = ShiftSpace(2)
    parts = []
    for s in range(2):
        for blk in iter_word_blocks(space, 5, prefix=(s,)):
            parts.extend(tuple(r) for r in blk)
    assert sorted(parts) == list(enumerate_words(space, 5))
    assert len(set(parts)) == len(parts)


def test_budget_guard():
    with pytest.raises(BudgetExceededError):
        list(iter_word_blocks(ShiftSpace(4), 20, budget=1 << 20))


def test_concatenation_closure_on_full_shift():
    space = ShiftSpace(3)
    for u in enumerate_words(space, 2):
        for v in enumerate_words(space, 2):
            assert space.is_admissible(u + v)


def test_dead_symbol_rejected():
    with pytest.raises(ValueError):
        ShiftSpace(2, np.array([[True, False], [True, False]]))  # dead column


def test_block_recode_preserves_word_counts():
    recoded, blocks = block_recode(GOLDEN, 2)
    assert recoded.alphabet_size == 3
    assert blocks == [(0, 0), (0, 1), (1, 0)]
    # A length-n word of the recoded shift <-> a length n+1 word originally.
    for n in (1, 2, 5):
        assert word_count(recoded, n) == word_count(GOLDEN, n + 1)
