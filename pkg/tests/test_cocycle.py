import itertools

import numpy as np
import pytest

from thermolyap import load_example
from thermolyap.cocycle import (MatrixCocycle, check_irreducibility,
                                check_submultiplicativity, norm_potential,
                                search_bridging_constant,
                                singular_value_potential)
from thermolyap.potentials import WordPotential
from thermolyap.symbolic import ShiftSpace

EX11 = load_example("ex1_1")
PAIR = load_example("positive_pair")


def test_diagonal_norms():
    phi = EX11.primary_potential()
    assert phi.value([2]) == pytest.approx(np.log(3), abs=1e-14)
    for n in (2, 5, 9):
        assert phi.value([2] * n) == pytest.approx(n * np.log(3), rel=1e-13)


def test_identity_cocycle_vanishes_in_log():
    co = MatrixCocycle(np.stack([np.eye(3)] * 2))
    phi = norm_potential(co)
    for word in itertools.product(range(2), repeat=4):
        assert phi.value(word) == 0.0


def test_rank_one_matches_norm_everywhere():
    for cfg in (EX11, PAIR):
        phi = cfg.primary_potential()
        sv1 = singular_value_potential(phi.cocycle, 1)
        for n in (1, 2, 3, 4):
            for word in itertools.product(range(cfg.space.alphabet_size),
                                          repeat=n):
                a, b = phi.value(word), sv1.value(word)
                if np.isneginf(a):
                    assert np.isneginf(b)
                else:
                    assert a == pytest.approx(b, abs=1e-12)


def test_full_rank_gives_the_determinant():
    # the smallest singular value of an explicit product carries a
    # relative error of about eps * cond(product), so the identity is
    # checked while the conditioning keeps that below the tolerance:
    # short words for the frozen pair, longer ones for scaled rotations
    co = PAIR.primary_potential().cocycle
    svd_full = singular_value_potential(co, 2)
    logdets = np.log(np.abs(np.linalg.det(co.matrices)))
    for n in (1, 2, 3):
        for word in itertools.product(range(2), repeat=n):
            want = sum(logdets[s] for s in word)
            assert svd_full.value(word) == pytest.approx(want, abs=1e-9)
    theta = 0.7
    rot = np.array([[np.cos(theta), -np.sin(theta)],
                    [np.sin(theta), np.cos(theta)]])
    nice = MatrixCocycle(np.stack([1.5 * rot, 0.25 * rot.T]))
    svd_nice = singular_value_potential(nice, 2)
    logdets = np.log(np.abs(np.linalg.det(nice.matrices)))
    for word in itertools.product(range(2), repeat=6):
        want = sum(logdets[s] for s in word)
        assert svd_nice.value(word) == pytest.approx(want, abs=1e-9)


def test_top_two_singular_values_on_diagonal_product():
    sv2 = singular_value_potential(EX11.primary_potential().cocycle, 2)
    # product of the two doubling matrices is diag(1, 4, 0, 0)
    assert sv2.value([0, 1]) == pytest.approx(np.log(4), abs=1e-12)


def test_rescaling_guard_keeps_long_products_finite():
    big = 2.0 ** 30 * np.eye(2)
    co = MatrixCocycle(np.stack([big, big]))
    phi = norm_potential(co)
    n = 40  # raw entries would reach 2^1200, far past float range
    val = phi.value([0] * n)
    assert val == pytest.approx(n * 30 * np.log(2), rel=1e-12)


def test_irreducibility_verdicts():
    rep = check_irreducibility(EX11.primary_potential().cocycle)
    assert not rep.irreducible
    # the first coordinate axis is fixed by every matrix
    w = rep.witness
    assert w.shape == (1, 4)
    assert abs(abs(w[0, 0]) - 1.0) < 1e-12
    assert check_irreducibility(PAIR.primary_potential().cocycle).irreducible


def test_positive_pair_has_no_common_eigenvector():
    # independent oracle for the irreducible verdict
    A, B = PAIR.primary_potential().cocycle.matrices
    _, vecs = np.linalg.eig(A)
    for i in range(2):
        v = vecs[:, i]
        w = B @ v
        assert abs(w[0] * v[1] - w[1] * v[0]) > 1e-3


def test_single_identity_matrix_is_reducible():
    co = MatrixCocycle(np.eye(2)[None, :, :])
    rep = check_irreducibility(co)
    assert not rep.irreducible


def test_verdict_invariant_under_conjugation():
    rng = np.random.default_rng(11)
    T = rng.normal(size=(2, 2)) + 2 * np.eye(2)
    Tinv = np.linalg.inv(T)
    for cfg, want in ((PAIR, True),):
        mats = cfg.primary_potential().cocycle.matrices
        conj = MatrixCocycle(np.stack([T @ M @ Tinv for M in mats]))
        assert check_irreducibility(conj).irreducible == want


def test_degenerate_cocycle_rejected():
    with pytest.raises(ValueError):
        MatrixCocycle(np.zeros((2, 3, 3)))


def test_norms_are_submultiplicative():
    rep = check_submultiplicativity(EX11.space, EX11.primary_potential(), 6)
    assert rep.max_violation <= 1e-12
    rep2 = check_submultiplicativity(PAIR.space, PAIR.primary_potential(), 6)
    assert rep2.max_violation <= 1e-12


def test_additive_window_passes_exactly():
    cfg = load_example("additive_binary")
    rep = check_submultiplicativity(cfg.space, cfg.potentials["g"], 6)
    assert rep.max_violation <= 1e-12


def test_constructed_violation_is_reported_with_witness():
    space = ShiftSpace(2)
    bad = (0, 1)

    def value(word):
        return len(word) + (0.1 if word == bad else 0.0)

    pot = WordPotential(value, structure="unknown")
    rep = check_submultiplicativity(space, pot, 4)
    assert rep.max_violation == pytest.approx(0.1, abs=1e-12)
    assert rep.witness is not None
    u, v = rep.witness
    assert u + v == bad


def test_bridging_constant_of_the_diagonal_family():
    # the (third, fourth)-symbol pair kills every diagonal except the
    # unit entry, so the uniform constant is 1 / (3 * 4)
    cert = search_bridging_constant(EX11.space, EX11.primary_potential(), 1, 2)
    assert cert is not None
    assert cert.c == pytest.approx(1.0 / 12.0, rel=1e-12)
    for I, K, J in cert.witnesses:
        phi = EX11.primary_potential()
        lhs = phi.value(I + K + J)
        rhs = np.log(cert.c) + phi.value(I) + phi.value(J)
        assert lhs >= rhs - 1e-12


def test_bridging_positive_pair_matches_brute_force():
    phi = PAIR.primary_potential()
    cert = search_bridging_constant(PAIR.space, phi, 2, 0)
    assert cert is not None and cert.c > 0 and cert.t == 0
    # independent oracle: direct products over all 16 pairs
    mats = PAIR.primary_potential().cocycle.matrices
    words = list(itertools.product(range(2), repeat=2))

    def nrm(word):
        P = np.eye(2)
        for s in word:
            P = P @ mats[s]
        return np.linalg.norm(P, 2)

    worst = min(nrm(I + J) / (nrm(I) * nrm(J)) for I in words for J in words)
    assert cert.c == pytest.approx(worst, rel=1e-9)


def test_bridging_additive_gives_unit_constant():
    cfg = load_example("additive_binary")
    zero = WordPotential(lambda w: 0.0, structure="additive")
    cert = search_bridging_constant(cfg.space, zero, 2, 1)
    assert cert.c == pytest.approx(1.0, abs=1e-12)
    cert_g = search_bridging_constant(cfg.space, cfg.potentials["g"], 1, 0)
    assert cert_g.c == pytest.approx(1.0, abs=1e-12) and cert_g.t == 0
