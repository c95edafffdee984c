import itertools

import numpy as np
import pytest

from gorenstein_kit import linalg
from gorenstein_kit.complexes import (
    NonpositiveRank, QuadraticComplex, QuotientNotFree, _theta_raw, add_identity_block, eagon_northcott,
    en_annihilation_check, en_h0_ideal, evaluation_ideal, extend_by_free, fitting_shift_check,
    in_bidual_of_kernel, pad, rank_reduce_free, restrict_coordinates, theta, theta_with_quotient,
)
from gorenstein_kit.fitting import fitting_ideal
from gorenstein_kit.modules import expand, rspan
from gorenstein_kit.ring import Ideal, make_ring
from gorenstein_kit.rng import SplitMix64

Z4 = make_ring(2, 2)
Z4C2 = make_ring(2, 2, [2])
F3 = make_ring(3, 1)
F3C3 = make_ring(3, 1, [3])


def qc(R, rows):
    a = np.array(rows, dtype=np.int64)
    d, e = a.shape[0], a.shape[1]
    return QuadraticComplex(R, d, e, a.reshape(d, e, R.n))


def random_complex(R, rng, d, e):
    return QuadraticComplex(R, d, e, np.array([[R.random_element(rng) for _ in range(e)] for _ in range(d)]))


def test_theta_examples():
    C = QuadraticComplex(Z4, 1, 0)
    assert theta(C).tolist() == [[1]]
    C = qc(Z4, [[2], [0]])
    t = theta(C)
    assert t.tolist() == [[0], [2]]        # -2 e_2
    # -2 e_2 is in ker(phi) and so is every multiple
    assert not ((t[:, 0] @ np.array([2, 0])) % 4)
    assert in_bidual_of_kernel(C, t, 1)
    with pytest.raises(NonpositiveRank):
        theta(qc(Z4, [[1]]))


def test_theta_split_case_generates_kernel():
    rng = SplitMix64(2)
    for _ in range(5):
        x = Z4C2.random_element(rng)
        C = QuadraticComplex(Z4C2, 2, 1, np.array([[Z4C2.one()], [x]]))
        t = theta(C)
        K = linalg.kernel(expand(Z4C2, C.phi), 4)
        assert linalg.same_span(rspan(Z4C2, t.reshape(1, 2, Z4C2.n)), K, 4)


def test_theta_theta_with_quotient():
    C = qc(Z4, [[2, 0], [0, 0], [0, 0]])
    # H^1 = R/2 + R; the second summand is a free quotient
    pi = np.array([[[0]], [[1]]])
    t = theta_with_quotient(C, pi)
    assert t.shape[0] == 3            # Lambda^1 F0
    swapped = theta_with_quotient(C, pi, basis=[[[3]]])
    assert np.array_equal(swapped, (-t) % 4)
    assert np.array_equal(theta_with_quotient(C, np.zeros((2, 0, 1), dtype=np.int64)) % 4, theta(C) % 4)
    with pytest.raises(QuotientNotFree):
        theta_with_quotient(C, np.array([[[1]], [[0]]]))


def test_theta_with_quotient_swap_negates():
    C = qc(Z4, [[0, 0], [0, 0], [0, 0]])
    pi = np.array([[[1], [0]], [[0], [1]]])
    a = theta_with_quotient(C, pi)
    b = theta_with_quotient(C, pi, basis=[[[0], [1]], [[1], [0]]])
    assert np.array_equal(b % 4, (-a) % 4)
    C1 = qc(Z4, [[2], [0]])
    assert np.array_equal(theta_with_quotient(C1, np.zeros((1, 0, 1), dtype=np.int64)) % 4, theta(C1) % 4)


def test_evaluation_ideal_examples():
    assert evaluation_ideal(qc(Z4, [[1], [0]])).is_whole()
    C = qc(Z4, [[2], [0]])
    assert evaluation_ideal(C) == Ideal(Z4, [[2]]) == fitting_ideal(C.H1, 0)
    assert evaluation_ideal(QuadraticComplex(Z4, 2, 0)).is_whole()


@pytest.mark.parametrize("R", [Z4C2, F3C3])
def test_evaluation_ideal_is_fitt0(R):
    rng = SplitMix64(41)
    for _ in range(8):
        e = rng.between(0, 2)
        C = random_complex(R, rng, e + rng.between(1, 2), e)
        assert evaluation_ideal(C) == fitting_ideal(C.H1, 0)


def test_fitting_shift_examples():
    C = qc(Z4, [[0], [0]])
    assert fitting_shift_check(C, np.array([[[1]]]), 0)
    C = qc(Z4, [[2], [0]])
    assert fitting_shift_check(C, np.zeros((1, 0, 1), dtype=np.int64), 0)
    rng = SplitMix64(1)
    A = np.array([[Z4C2.random_element(rng) for _ in range(3)] for _ in range(2)])
    T = A.transpose(1, 0, 2)
    from gorenstein_kit.fitting import ideal_of_minors
    for k in (1, 2):
        assert ideal_of_minors(Z4C2, A, k) == ideal_of_minors(Z4C2, T, k)


def test_extension_examples():
    C = qc(Z4, [[2], [0]])
    D, ok = extend_by_free(C, np.zeros((0, 1, 1), dtype=np.int64))
    assert ok and D.d == C.d
    D, ok = extend_by_free(C, np.zeros((2, 1, 1), dtype=np.int64))
    assert ok and D.H0.cardinality == C.H0.cardinality * 16
    D, ok = extend_by_free(qc(Z4, [[2]]), [[[1]]])
    assert ok and D.H1.is_zero()


def test_extension_sign_needs_graded_factor():
    """Over F_3 with e = n = 1 the bare (-1)^{rn} rule is off by -1."""
    C = qc(F3, [[1], [2]])
    D, ok = extend_by_free(C, [[[1]]])
    assert ok
    red = rank_reduce_free(F3, _theta_raw(D), D.d, D.r, [2])
    lhs = restrict_coordinates(red, D.d, range(2), C.r)
    tC = _theta_raw(C)
    assert tC.any()
    sign_rn = (-1) ** (C.r * 1)
    assert np.array_equal((sign_rn * lhs) % 3, (-tC) % 3)


@pytest.mark.parametrize("R", [Z4, Z4C2, F3C3])
def test_extension_random(R):
    rng = SplitMix64(77)
    for _ in range(6):
        e = rng.between(0, 2)
        C = random_complex(R, rng, e + rng.between(0, 2), e)
        n = rng.between(1, 2)
        cols = np.array([[R.random_element(rng) for _ in range(e)] for _ in range(n)]).reshape(n, e, R.n)
        assert extend_by_free(C, cols)[1]


def test_identity_block_and_padding():
    rng = SplitMix64(3)
    C = random_complex(Z4C2, rng, 3, 1)
    B = add_identity_block(C)
    tB = theta(B)
    assert np.array_equal(restrict_coordinates(tB, B.d, range(C.d), C.r), theta(C))
    P = pad(C, 1)
    assert P.r == C.r + 1 and P.H1.cardinality == C.H1.cardinality


def test_eagon_northcott_examples():
    EN = eagon_northcott(qc(Z4, [[1, 0], [0, 2]]))
    assert EN.ranks() == [1, 1]
    rng = SplitMix64(8)
    for _ in range(5):
        a, b = Z4C2.random_element(rng), Z4C2.random_element(rng)
        C = QuadraticComplex(Z4C2, 2, 1, np.array([[a], [b]]))
        EN = eagon_northcott(C)
        assert EN.ranks() == [1, 2, 1]
        first = EN.differentials[0][0]
        assert np.array_equal(first[0], (-b) % 4) and np.array_equal(first[1], a)
        assert en_h0_ideal(EN) == fitting_ideal(C.H1, 0)


def _brute_cohomology(EN, k, N):
    """Sizes of ker d_k and im d_{k-1} for Z/N coefficient rings of rank one."""
    ranks = EN.ranks()
    vecs = list(itertools.product(range(N), repeat=ranks[k]))
    dk = EN.differentials[k][:, :, 0] if k < len(EN.differentials) else np.zeros((ranks[k], 0), dtype=np.int64)
    ker = {v for v in vecs if not (np.array(v) @ dk % N).any()}
    if k:
        prev = EN.differentials[k - 1][:, :, 0]
        im = {tuple(np.array(u) @ prev % N) for u in itertools.product(range(N), repeat=ranks[k - 1])}
    else:
        im = {tuple([0] * ranks[k])}
    return len(ker), len(im)


def test_eagon_northcott_cohomology_by_enumeration():
    C = qc(Z4, [[2], [2]])
    EN = eagon_northcott(C)
    assert en_annihilation_check(EN)
    for k in range(len(EN.terms)):
        S, K = EN.cohomology(k)
        nk, ni = _brute_cohomology(EN, k, 4)
        assert linalg.span_size(S, 4) == nk
        assert linalg.span_size(K, 4) == ni
    S, K = EN.cohomology(0)
    assert linalg.span_size(S, 4) // linalg.span_size(K, 4) == 2


def test_eagon_northcott_random_f3c3():
    rng = SplitMix64(14)
    for _ in range(3):
        C = random_complex(F3C3, rng, 3, 2)
        assert en_annihilation_check(eagon_northcott(C))


def test_complex_json_roundtrip():
    C = random_complex(F3C3, SplitMix64(4), 3, 2)
    C2 = QuadraticComplex.from_json(C.to_json())
    assert np.array_equal(C2.phi, C.phi) and C2.ring == C.ring
