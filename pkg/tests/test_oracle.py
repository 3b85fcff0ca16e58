import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dnaouter.channel import ReceivedMatrix, apply_channel1, transmit
from dnaouter.checks import prop1_instances, suite_lemma1, threshold_oracle_rate
from dnaouter.errors import DimensionMismatch, TooLarge
from dnaouter.fixtures import EXAMPLE_HARD, EXAMPLE_TIED_CODEWORDS, NOTATION_X, NOTATION_Y
from dnaouter.ldpc import build_encoder
from dnaouter.gf2 import SparseBinMatrix
from dnaouter.oracle import (
    FAILURE,
    IRREDUCIBLE_POLYS,
    Codebook,
    Gf2wField,
    Tie,
    all_codewords,
    binary_codebook,
    bits_to_int,
    clmul,
    int_to_bits,
    log_likelihoods,
    ml_exact_decode,
    ml_intersection_decode,
    nearest_codeword_decode,
    poly_mod,
    rlc_codebook,
    row_set_intersection_size,
    threshold_decode,
)
from dnaouter.params import ChannelParams


def is_irreducible(poly):
    deg = poly.bit_length() - 1
    return all(poly_mod(poly, d) for d in range(2, 1 << (deg // 2 + 1)) if d.bit_length() - 1 >= 1)


class TestField:
    def test_table_polys_irreducible(self):
        for w, poly in IRREDUCIBLE_POLYS.items():
            assert poly.bit_length() - 1 == w
            assert is_irreducible(poly), w

    def test_known_products(self):
        f = Gf2wField(8)
        assert f.mul(0x57, 0x83) == 0xC1  # the classic AES example
        assert f.mul(0x53, f.inv(0x53)) == 1
        assert f.inv(0x53) == 0xCA

    @pytest.mark.parametrize("w", [1, 2, 3, 4])
    def test_axioms_exhaustive(self, w):
        f = Gf2wField(w)
        e = np.arange(f.order)
        x, y, z = np.meshgrid(e, e, e, indexing="ij")
        assert np.array_equal(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)))
        assert np.array_equal(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)))
        assert np.array_equal(f.mul(x, y), f.mul(y, x))
        assert np.array_equal(f.mul(e, 1), e)
        nz = e[1:]
        assert np.all(f.mul(nz, f.inv(nz)) == 1)
        slow = np.vectorize(lambda a, b: poly_mod(clmul(int(a), int(b)), f.poly))
        assert np.array_equal(f.mul(x[:, :, 0], y[:, :, 0]), slow(x[:, :, 0], y[:, :, 0]))

    @pytest.mark.parametrize("w", range(5, 17))
    def test_axioms_sampled(self, w):
        f = Gf2wField(w)
        rng = np.random.default_rng(w)
        x, y, z = (f.random(rng, 100_000) for _ in range(3))
        assert np.array_equal(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)))
        assert np.array_equal(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)))
        nz = x[x != 0]
        assert np.all(f.mul(nz, f.inv(nz)) == 1)
        for a, b in zip(x[:50].tolist(), y[:50].tolist()):
            assert f.mul(a, b) == poly_mod(clmul(a, b), f.poly)

    def test_bad_degree_and_zero_inverse(self):
        with pytest.raises(TooLarge):
            Gf2wField(17)
        with pytest.raises(ZeroDivisionError):
            Gf2wField(4).inv(0)

    def test_reducible_polynomial_rejected(self):
        with pytest.raises(ValueError):
            Gf2wField(4, poly=0b10101)  # (x^2 + x + 1)^2

    def test_dot(self):
        f = Gf2wField(4)
        a, b = np.array([3, 5, 7]), np.array([2, 9, 1])
        want = f.mul(3, 2) ^ f.mul(5, 9) ^ f.mul(7, 1)
        assert f.dot(a, b) == want


@given(st.integers(1, 20), st.data())
def test_bits_roundtrip(width, data):
    v = data.draw(st.lists(st.integers(0, 2**width - 1), min_size=1, max_size=10))
    assert bits_to_int(int_to_bits(v, width)).tolist() == v


class TestIntersection:
    def test_notation_example(self):
        assert row_set_intersection_size(NOTATION_X, NOTATION_Y) == 2

    def test_identical_and_disjoint(self):
        A = np.array([[0, 1], [1, 0], [0, 1]])
        assert row_set_intersection_size(A, A) == 2
        assert row_set_intersection_size(A, np.array([[1, 1], [0, 0]])) == 0

    def test_erased_slots_ignored(self):
        Z = ReceivedMatrix(np.zeros((2, 2)), np.array([True, False]))
        assert row_set_intersection_size(Z, np.zeros((1, 2))) == 1
        Z = ReceivedMatrix.all_erased(3, 2)
        assert row_set_intersection_size(Z, np.zeros((1, 2))) == 0

    def test_width_mismatch(self):
        with pytest.raises(DimensionMismatch):
            row_set_intersection_size(np.zeros((2, 3)), np.zeros((2, 2)))


@pytest.fixture(scope="module")
def small_cb():
    return rlc_codebook(4, 1, 3, seed=1, a=2)


class TestML:
    def test_permuted_codeword(self, small_cb):
        sent = 3
        Z = ReceivedMatrix(small_cb.X[sent][[2, 0, 3, 1]], np.zeros(4, dtype=bool))
        distinct = len({tuple(x.ravel()) for x in small_cb.X}) == len(small_cb)
        assert distinct
        assert ml_intersection_decode(Z, small_cb) == sent
        assert ml_exact_decode(Z, small_cb, ChannelParams(1.0, 0.0, 0.0, 5)) == sent

    def test_all_erased_tie(self, small_cb):
        Z = ReceivedMatrix.all_erased(4, 5)
        out = ml_intersection_decode(Z, small_cb)
        assert isinstance(out, Tie) and out.indices == tuple(range(len(small_cb)))
        assert isinstance(ml_exact_decode(Z, small_cb, ChannelParams(0.8, 0.1, 0.1, 5)), Tie)

    def test_single_row_likelihood(self):
        cb = Codebook(np.array([[[0, 1, 1]], [[1, 1, 1]]], dtype=np.uint8), np.zeros((2, 1, 1)))
        p = ChannelParams(0.7, 0.2, 0.1, 3)
        Z = ReceivedMatrix(np.array([[0, 1, 1]]), np.array([False]))
        ll = log_likelihoods(Z, cb, p)
        assert ll[0] == pytest.approx(math.log(0.7))
        assert ll[1] == pytest.approx(math.log(0.1 / 7))
        ll = log_likelihoods(ReceivedMatrix.all_erased(1, 3), cb, p)
        assert ll == pytest.approx([math.log(0.2)] * 2)

    def test_permutation_sum_brute(self, small_cb):
        """The log-sum-exp over matchings equals a direct product-sum."""
        p = ChannelParams(0.6, 0.2, 0.2, 5)
        Z = transmit(small_cb.X[5], p, 3)
        ll = log_likelihoods(Z, small_cb, p)
        for i in (0, 5, 7):
            total = 0.0
            for perm in itertools.permutations(range(4)):
                prob = 1.0
                for r, c in enumerate(perm):
                    if Z.erased[r]:
                        prob *= p.p_e
                    elif np.array_equal(Z.bits[r], small_cb.X[i][c]):
                        prob *= p.p_c
                    else:
                        prob *= p.p_sub_each
                total += prob
            assert ll[i] == pytest.approx(math.log(total / 24), rel=1e-10)

    def test_too_large(self):
        cb = Codebook(np.zeros((1, 9, 5), dtype=np.uint8), np.zeros((1, 1, 1)))
        with pytest.raises(TooLarge):
            log_likelihoods(ReceivedMatrix.all_erased(9, 5), cb, ChannelParams(0.8, 0.1, 0.1, 5))

    def test_intersection_ml_agrees_with_exact(self):
        count = 0
        for Z, cb, params, sent, exact in prop1_instances(60, seed=99):
            assert ml_intersection_decode(Z, cb) == exact
            count += 1
        assert count == 60


class TestCodebooks:
    def test_rlc_zero_and_linearity(self):
        cb = rlc_codebook(5, 2, 4, seed=7)
        assert not cb.X[0, :, :4].any()  # U = 0 encodes to V = 0
        rng = np.random.default_rng(0)
        for _ in range(50):
            i, j = rng.integers(len(cb), size=2)
            assert np.array_equal(cb.X[i ^ j, :, :4], cb.X[i, :, :4] ^ cb.X[j, :, :4])

    def test_rlc_matches_generator(self):
        cb = rlc_codebook(4, 2, 3, seed=2)
        f, G = cb.field, cb.generator
        for i in (1, 17, 63):
            u = bits_to_int(cb.U[i])
            v = f.add(f.mul(u[0], G[0]), f.mul(u[1], G[1]))
            assert np.array_equal(bits_to_int(cb.X[i, :, :3]), v)

    def test_rlc_too_large(self):
        with pytest.raises(TooLarge):
            rlc_codebook(8, 3, 8, seed=0)

    def test_binary_codebook(self, toy):
        cb = binary_codebook(toy.encoder, w=2, a=3)
        assert len(cb) == 16 and cb.X.shape == (16, 6, 5)
        for X, U in zip(cb.X, cb.U):
            assert np.array_equal(toy.encoder.extract(X[:, :2]), U)


class TestThreshold:
    def test_clean_channel(self):
        cb = rlc_codebook(8, 2, 8, seed=3, a=3)
        Z = transmit(cb.X[1234], ChannelParams(1.0, 0.0, 0.0, 11), 0)
        assert threshold_decode(Z, cb, 1.0, 0.1) == 1234

    def test_all_erased(self):
        cb = rlc_codebook(4, 1, 4, seed=3)
        assert threshold_decode(ReceivedMatrix.all_erased(4, cb.l), cb, 0.8, 0.15) is FAILURE

    def test_bad_eps(self):
        cb = rlc_codebook(4, 1, 4, seed=3)
        with pytest.raises(ValueError):
            threshold_decode(ReceivedMatrix.all_erased(4, cb.l), cb, 0.8, 0.9)

    def test_success_implies_ml_agrees(self):
        cb = rlc_codebook(6, 1, 6, seed=4)
        p = ChannelParams(0.8, 0.1, 0.1, cb.l)
        for s in range(100):
            Z = transmit(cb.X[s % len(cb)], p, s)
            got = threshold_decode(Z, cb, 0.8, 0.15)
            if got is not FAILURE:
                ml = ml_intersection_decode(Z, cb)
                assert ml == got or (isinstance(ml, Tie) and got in ml.indices)

    def test_oracle_rates(self):
        assert threshold_oracle_rate(8) == pytest.approx(0.797, abs=1e-3)
        assert threshold_oracle_rate(16) == pytest.approx(0.918, abs=1e-3)
        assert threshold_oracle_rate(32) == pytest.approx(0.983, abs=1e-3)

    @pytest.mark.slow
    def test_lemma1_regression(self):
        results = suite_lemma1()
        assert all(r.passed for r in results), [r.line() for r in results]


@pytest.fixture(scope="module")
def cws(toy):
    return all_codewords(toy.encoder)


class TestNearestCodeword:
    def test_tied_column(self, cws):
        assert nearest_codeword_decode(EXAMPLE_HARD[:, 1], cws) is FAILURE
        assert len(EXAMPLE_TIED_CODEWORDS) == 2

    def test_first_column(self, cws):
        assert nearest_codeword_decode(EXAMPLE_HARD[:, 0], cws).tolist() == [0] * 6

    def test_exact_codeword(self, cws):
        for cw in cws:
            assert np.array_equal(nearest_codeword_decode(cw, cws), cw)

    def test_all_unknown_ties(self, cws):
        assert nearest_codeword_decode(np.full(6, -1), cws) is FAILURE

    def test_too_large(self):
        enc = build_encoder(SparseBinMatrix(1, 23, [[0, 1]]))
        with pytest.raises(TooLarge):
            all_codewords(enc)
