import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dnaouter.channel import (
    RNG_ID,
    ReceivedMatrix,
    apply_channel1,
    channel1,
    channel2,
    make_rng,
    transmit,
    trial_rng,
)
from dnaouter.fixtures import EXAMPLE_X, EXAMPLE_Y, example_received
from dnaouter.params import ChannelParams


def within(count, total, p, sigmas=4.0):
    sd = math.sqrt(total * p * (1 - p))
    return abs(count - total * p) <= sigmas * sd + 1e-9


class TestChannel1:
    def test_perfect_channel_is_identity(self, rng):
        X = rng.integers(0, 2, (50, 9), dtype=np.uint8)
        Y = channel1(X, ChannelParams(1.0, 0.0, 0.0, 9), 1)
        assert not Y.erased.any() and np.array_equal(Y.bits, X)

    def test_erasure_only(self, rng):
        X = rng.integers(0, 2, (200, 5), dtype=np.uint8)
        Y = channel1(X, ChannelParams(0.05, 0.95, 0.0, 5), 2)
        assert Y.erased.sum() > 150 and not Y.bits[Y.erased].any()
        assert np.array_equal(Y.bits[~Y.erased], X[~Y.erased])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            channel1(np.zeros((3, 4)), ChannelParams(1.0, 0.0, 0.0, 5), 0)

    def test_branch_frequencies(self):
        n, l = 100_000, 4
        X = np.zeros((n, l), dtype=np.uint8)
        X[::2] = 1
        p = ChannelParams(0.7, 0.2, 0.1, l)
        Y = channel1(X, p, 3)
        same = (~Y.erased) & np.all(Y.bits == X, axis=1)
        subst = (~Y.erased) & ~same
        assert within(int(same.sum()), n, 0.7)
        assert within(int(Y.erased.sum()), n, 0.2)
        assert within(int(subst.sum()), n, 0.1)

    def test_substitutions_uniform_over_other_rows(self):
        # l = 3: the sent row keeps exactly p_c (a substitution never reproduces
        # it) and each of the 7 others gets p_s / 7
        n = 100_000
        X = np.zeros((n, 3), dtype=np.uint8)
        Y = channel1(X, ChannelParams(0.3, 0.0, 0.7, 3), 4)
        vals = Y.bits @ np.array([4, 2, 1])
        assert within(int((vals == 0).sum()), n, 0.3)
        for v in range(1, 8):
            assert within(int((vals == v).sum()), n, 0.1)

    @given(st.integers(0, 2**32 - 1))
    def test_seeded_and_erasures_blank(self, seed):
        X = make_rng(seed).integers(0, 2, (40, 6), dtype=np.uint8)
        p = ChannelParams(0.5, 0.25, 0.25, 6)
        Y = channel1(X, p, seed)
        assert Y == channel1(X, p, seed)
        assert not Y.bits[Y.erased].any()
        # same seed, substitutions turned into erasures: erasures only grow
        E = channel1(X, ChannelParams(0.5, 0.5, 0.0, 6), seed)
        assert np.all(E.erased >= Y.erased)
        kept = ~E.erased
        assert np.array_equal(Y.bits[kept], X[kept])


class TestChannel2:
    def test_single_row(self):
        Y = ReceivedMatrix(np.array([[1, 0, 1]]), np.array([False]))
        assert channel2(Y, 0) == Y

    @given(st.integers(1, 30), st.integers(0, 2**32 - 1))
    def test_multiset_preserved(self, n, seed):
        r = make_rng(seed)
        Y = ReceivedMatrix(r.integers(0, 2, (n, 6), dtype=np.uint8), r.random(n) < 0.3)
        out, perm = channel2(Y, seed, return_perm=True)
        assert sorted(perm.tolist()) == list(range(n))
        assert out == Y.take(perm)
        key = lambda M: sorted((bool(e), tuple(b)) for b, e in zip(M.bits, M.erased))
        assert key(out) == key(Y)

    def test_uniform_permutations(self):
        Y = ReceivedMatrix(np.arange(4)[:, None].astype(np.uint8), np.zeros(4, dtype=bool))
        rng = make_rng(5)
        counts = dict.fromkeys(itertools.permutations(range(4)), 0)
        trials = 100_000
        for _ in range(trials):
            counts[tuple(channel2(Y, rng).bits[:, 0].tolist())] += 1
        assert len(counts) == 24
        assert all(within(c, trials, 1 / 24) for c in counts.values())


class TestRng:
    def test_id(self):
        assert RNG_ID == "numpy-philox4x64-10"
        assert isinstance(make_rng(0).bit_generator, np.random.Philox)

    def test_transmit_deterministic(self, rng):
        X = rng.integers(0, 2, (30, 8), dtype=np.uint8)
        p = ChannelParams(0.6, 0.2, 0.2, 8)
        assert transmit(X, p, 17) == transmit(X, p, 17)
        assert transmit(X, p, 17) != transmit(X, p, 18)

    def test_trial_streams(self):
        a = trial_rng(9, 0).random(4)
        assert np.array_equal(a, trial_rng(9, 0).random(4))
        assert not np.array_equal(a, trial_rng(9, 1).random(4))
        assert not np.array_equal(a, trial_rng(10, 0).random(4))

    def test_generator_passthrough(self):
        g = make_rng(1)
        assert make_rng(g) is g


class TestApplyChannel1:
    def test_example(self):
        Z = example_received()
        assert np.array_equal(Z.bits, EXAMPLE_Y) and not Z.erased.any()

    def test_erase(self):
        Z = apply_channel1(EXAMPLE_X, erased=[1, 4])
        assert Z[1] is None and Z[4] is None
        assert np.array_equal(Z[0], EXAMPLE_X[0])

    def test_rejects_identity_substitution(self):
        with pytest.raises(ValueError):
            apply_channel1(EXAMPLE_X, substitutions={2: EXAMPLE_X[2]})
        with pytest.raises(ValueError):
            apply_channel1(EXAMPLE_X, erased=[0], substitutions={0: EXAMPLE_Y[0]})


class TestReceivedMatrix:
    def test_erased_bits_zeroed(self):
        Y = ReceivedMatrix(np.ones((2, 3)), np.array([True, False]))
        assert not Y.bits[0].any() and Y.bits[1].all()
        assert (Y.n, Y.l) == (2, 3)

    def test_from_rows_and_iteration(self):
        rows = [np.array([1, 0]), None, np.array([0, 1])]
        Y = ReceivedMatrix.from_rows(rows, 2)
        got = list(Y.rows())
        assert got[1] is None and np.array_equal(got[2], rows[2])
        assert Y.erased.tolist() == [False, True, False]

    def test_all_erased(self):
        Y = ReceivedMatrix.all_erased(5, 3)
        assert Y.erased.all() and Y.bits.shape == (5, 3)

    def test_shape_checks(self):
        with pytest.raises(ValueError):
            ReceivedMatrix(np.zeros(3), np.zeros(3, dtype=bool))
        with pytest.raises(ValueError):
            ReceivedMatrix(np.zeros((3, 2)), np.zeros(2, dtype=bool))
