"""Brute-force reference decoders and small finite-field machinery.

Everything here enumerates: codebooks of ``2**(k w)`` entries, all ``n!`` row
permutations, all ``2**k`` codewords of a column code.  Sizes are capped and
exceeding a cap raises :class:`~dnaouter.errors.TooLarge`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import logsumexp

from .channel import ReceivedMatrix, make_rng
from .errors import DimensionMismatch, TooLarge
from .ldpc import Encoder
from .params import ChannelParams

# Low-weight irreducible polynomials, bit i = coefficient of x^i.
IRREDUCIBLE_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0x11B,  # x^8 + x^4 + x^3 + x + 1
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}


@dataclass(frozen=True)
class Tie:
    """More than one candidate attains the best score."""

    indices: tuple[int, ...]


class Failure:
    """Sentinel returned when a decoder declines to decide."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Failure"


FAILURE = Failure()


def clmul(x: int, y: int) -> int:
    out = 0
    while y:
        if y & 1:
            out ^= x
        x <<= 1
        y >>= 1
    return out


def poly_mod(x: int, poly: int) -> int:
    deg = poly.bit_length() - 1
    while x.bit_length() - 1 >= deg:
        x ^= poly << (x.bit_length() - 1 - deg)
    return x


class Gf2wField:
    """GF(2^w) with elements stored as ints; multiplication via log/antilog tables."""

    def __init__(self, w: int, poly: int | None = None):
        if not 1 <= w <= 16:
            raise TooLarge(f"extension degree {w} outside 1..16")
        self.w = w
        self.poly = IRREDUCIBLE_POLYS[w] if poly is None else poly
        self.order = 1 << w
        self._build_tables()

    def _slow_mul(self, x: int, y: int) -> int:
        return poly_mod(clmul(x, y), self.poly)

    def _build_tables(self):
        q1 = self.order - 1
        # the polynomial need not be primitive; search for a generator
        for g in range(2, self.order + 1) if self.order > 2 else [1]:
            exp = np.zeros(2 * q1, dtype=np.int64)
            log = np.full(self.order, -1, dtype=np.int64)
            x = 1
            good = True
            for i in range(q1):
                if log[x] != -1:
                    good = False
                    break
                exp[i] = x
                log[x] = i
                x = self._slow_mul(x, g)
            if good:
                exp[q1:] = exp[:q1]
                self.generator = g
                self._exp = exp
                self._log = log
                return
        raise ValueError(f"polynomial {self.poly:#x} is not irreducible")

    def add(self, x, y):
        return np.bitwise_xor(x, y)

    def mul(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        zero = (x == 0) | (y == 0)
        lx = self._log[np.where(x == 0, 1, x)]
        ly = self._log[np.where(y == 0, 1, y)]
        out = np.where(zero, 0, self._exp[lx + ly])
        return out if out.ndim else int(out)

    def inv(self, x):
        x = np.asarray(x, dtype=np.int64)
        if np.any(x == 0):
            raise ZeroDivisionError("0 has no inverse")
        out = self._exp[(self.order - 1 - self._log[x]) % (self.order - 1)]
        return out if out.ndim else int(out)

    def dot(self, a, b):
        """Sum over the last axis of ``a * b``."""
        prod = self.mul(a, b)
        return np.bitwise_xor.reduce(np.asarray(prod), axis=-1)

    def random(self, rng, size):
        return make_rng(rng).integers(0, self.order, size=size, dtype=np.int64)


def int_to_bits(values, width: int) -> np.ndarray:
    """Big-endian bit expansion along a new last axis."""
    values = np.asarray(values, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1)
    return ((values[..., None] >> shifts) & 1).astype(np.uint8)


def bits_to_int(bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    width = bits.shape[-1]
    return bits @ (1 << np.arange(width - 1, -1, -1)).astype(np.int64)


@dataclass
class Codebook:
    """All encoded matrices ``X[i]`` (``N x n x l``) paired with their sources ``U[i]``."""

    X: np.ndarray
    U: np.ndarray

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]

    @property
    def l(self) -> int:
        return self.X.shape[2]

    @cached_property
    def row_values(self) -> np.ndarray:
        """``(N, n)`` integer value of every codebook row."""
        return bits_to_int(self.X)


def _address_block(n: int, a: int) -> np.ndarray:
    from .outer import address_encode

    return np.array([address_encode(i, a) for i in range(1, n + 1)], dtype=np.uint8).reshape(n, a)


def binary_codebook(encoder: Encoder, w: int, a: int, max_bits: int = 20) -> Codebook:
    """Every ``k x w`` source matrix pushed through the column-wise binary encoder."""
    k, n = encoder.k, encoder.n
    if k * w > max_bits:
        raise TooLarge(f"k*w = {k * w} exceeds {max_bits}")
    N = 1 << (k * w)
    U = int_to_bits(np.arange(N), k * w).reshape(N, k, w)
    V = np.stack([encoder.encode(u) for u in U])
    A = np.broadcast_to(_address_block(n, a), (N, n, a))
    return Codebook(np.concatenate([V, A], axis=2), U)


def rlc_codebook(n: int, k: int, w: int, seed, a: int | None = None, max_bits: int = 20) -> Codebook:
    """Random ``(n, k)`` linear code over GF(2^w): ``V = G^T U`` for every ``U``."""
    if k * w > max_bits:
        raise TooLarge(f"k*w = {k * w} exceeds {max_bits}")
    field = Gf2wField(w)
    if a is None:
        a = max(1, (n - 1).bit_length())
    G = field.random(seed, (k, n))
    N = 1 << (k * w)
    symbols = np.arange(N, dtype=np.int64)
    # row r of U (as a field element) is the r-th w-bit chunk, most significant first
    U_sym = np.stack([(symbols >> (w * (k - 1 - r))) & (field.order - 1) for r in range(k)], axis=1)
    V_sym = np.zeros((N, n), dtype=np.int64)
    for r in range(k):
        V_sym ^= field.mul(U_sym[:, r : r + 1], G[r][None, :])
    V = int_to_bits(V_sym, w)
    U = int_to_bits(U_sym, w)
    A = np.broadcast_to(_address_block(n, a), (N, n, a))
    cb = Codebook(np.concatenate([V, A], axis=2), U)
    cb.generator = G
    cb.field = field
    return cb


def _received_values(Z) -> np.ndarray:
    """Integer values of the non-erased rows of ``Z`` (matrix or ReceivedMatrix)."""
    if isinstance(Z, ReceivedMatrix):
        return bits_to_int(Z.bits[~Z.erased])
    Z = np.asarray(Z)
    return bits_to_int(Z)


def row_set_intersection_size(A, B) -> int:
    """``|R(A) & R(B)|`` counting distinct rows; erased slots never count."""
    wa = A.l if isinstance(A, ReceivedMatrix) else np.asarray(A).shape[1]
    wb = B.l if isinstance(B, ReceivedMatrix) else np.asarray(B).shape[1]
    if wa != wb:
        raise DimensionMismatch(f"row widths differ: {wa} vs {wb}")
    return len(set(_received_values(A).tolist()) & set(_received_values(B).tolist()))


def intersection_sizes(Z, codebook: Codebook) -> np.ndarray:
    """``|X_i & Z|`` for every codebook entry (rows of each ``X_i`` are distinct)."""
    if (Z.l if isinstance(Z, ReceivedMatrix) else np.asarray(Z).shape[1]) != codebook.l:
        raise DimensionMismatch("row width differs from the codebook")
    zvals = np.unique(_received_values(Z))
    return np.isin(codebook.row_values, zvals).sum(axis=1)


def _argmax_or_tie(scores: np.ndarray, rtol: float = 0.0):
    best = scores.max()
    if rtol and np.isfinite(best):
        hits = np.flatnonzero(scores >= best - rtol * max(1.0, abs(best)))
    else:
        hits = np.flatnonzero(scores == best)
    return int(hits[0]) if hits.size == 1 else Tie(tuple(int(h) for h in hits))


def ml_intersection_decode(Z, codebook: Codebook):
    return _argmax_or_tie(intersection_sizes(Z, codebook))


def log_likelihoods(Z: ReceivedMatrix, codebook: Codebook, params: ChannelParams, max_n: int = 8) -> np.ndarray:
    """``log P(Z | X_i)`` for every entry, summing the row-wise law over all ``n!`` matchings."""
    n = codebook.n
    if n > max_n:
        raise TooLarge(f"n = {n} exceeds the permutation cap {max_n}")
    if Z.n != n or Z.l != codebook.l:
        raise DimensionMismatch("Z does not match the codebook geometry")
    with np.errstate(divide="ignore"):
        lc, le, ls = np.log(params.p_c), np.log(params.p_e), np.log(params.p_sub_each)
    zvals = bits_to_int(Z.bits)
    # L[i, r, c]: log P(z_r | x_c) for entry i
    same = zvals[None, :, None] == codebook.row_values[:, None, :]
    L = np.where(same, lc, ls)
    L[:, Z.erased, :] = le
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    rows = np.arange(n)
    out = np.empty(len(codebook))
    for i in range(len(codebook)):
        out[i] = logsumexp(L[i][rows, perms].sum(axis=1)) - math.log(len(perms))
    return out


def ml_exact_decode(Z: ReceivedMatrix, codebook: Codebook, params: ChannelParams):
    return _argmax_or_tie(log_likelihoods(Z, codebook, params), rtol=1e-12)


def threshold_decode(Z, codebook: Codebook, p_c: float, eps: float, n: int | None = None):
    """The unique entry sharing at least ``n (p_c - eps)`` rows with ``Z``, else :data:`FAILURE`."""
    if not 0 < eps < p_c:
        raise ValueError("need 0 < eps < p_c")
    n = codebook.n if n is None else n
    hits = np.flatnonzero(intersection_sizes(Z, codebook) >= n * (p_c - eps))
    return int(hits[0]) if hits.size == 1 else FAILURE


def all_codewords(encoder: Encoder, max_k: int = 20) -> np.ndarray:
    """``(2**k, n)`` array of every codeword of the column code."""
    if encoder.k > max_k:
        raise TooLarge(f"k = {encoder.k} exceeds {max_k}")
    info = int_to_bits(np.arange(1 << encoder.k), encoder.k) if encoder.k else np.zeros((1, 0), np.uint8)
    return encoder.encode(info.T).T.copy()


def nearest_codeword_decode(column, codewords: np.ndarray):
    """Closest codeword in Hamming distance over the known (``>= 0``) positions.

    Returns the codeword, or :data:`FAILURE` when two or more are equally close.
    """
    column = np.asarray(column)
    known = column >= 0
    dist = np.sum((codewords != column[None, :]) & known[None, :], axis=1)
    hits = np.flatnonzero(dist == dist.min())
    return codewords[hits[0]].copy() if hits.size == 1 else FAILURE


class NearestCodewordDecoder:
    """Column decoder that reads the LLR sign as a trit and picks the nearest codeword."""

    def __init__(self, encoder: Encoder):
        self.codewords = all_codewords(encoder)

    def __call__(self, llr) -> tuple[np.ndarray, np.ndarray]:
        llr = np.asarray(llr, dtype=np.float64)
        trits = np.where(llr > 0, 0, np.where(llr < 0, 1, -1))
        n, m = trits.shape
        out = np.zeros((n, m), dtype=np.uint8)
        ok = np.zeros(m, dtype=bool)
        for j in range(m):
            cw = nearest_codeword_decode(trits[:, j], self.codewords)
            if cw is not FAILURE:
                out[:, j] = cw
                ok[j] = True
        return out, ok
