"""Channel and code parameters, rate/capacity formulas and mixture probabilities.

Anything that scales like ``2**l`` is evaluated in a ``2**-l`` scaled form so
that row lengths of 100+ bits never overflow a double.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING

from .errors import BadArgs, BadLength, ConstraintViolated, SumNotOne

if TYPE_CHECKING:
    from .gf2 import SparseBinMatrix
    from .ldpc import Encoder

SUM_TOL = 1e-12


def _pow2neg(e: int) -> float:
    return math.ldexp(1.0, -e)


@dataclass(frozen=True)
class ChannelParams:
    """Row-level transition law of the erasure/substitution channel."""

    p_c: float
    p_e: float
    p_s: float
    l: int

    def __post_init__(self):
        probs = (self.p_c, self.p_e, self.p_s)
        if isinstance(self.l, bool) or int(self.l) != self.l or self.l < 1:
            raise BadLength(f"row length l must be a positive integer, got {self.l!r}")
        if not all(math.isfinite(p) for p in probs):
            raise SumNotOne(f"probabilities must be finite, got {probs}")
        if any(p < 0.0 or p > 1.0 for p in probs):
            raise SumNotOne(f"probabilities must lie in [0, 1], got {probs}")
        if abs(sum(probs) - 1.0) > SUM_TOL:
            raise SumNotOne(f"p_c + p_e + p_s = {sum(probs)!r} != 1")
        # p_c > p_s / (2^l - 1), multiplied through by 2^-l
        scale = _pow2neg(self.l)
        if not self.p_c * (1.0 - scale) > self.p_s * scale:
            raise ConstraintViolated(
                f"need p_c > p_s/(2^l - 1); got p_c={self.p_c}, p_s={self.p_s}, l={self.l}"
            )

    @property
    def p_sub_each(self) -> float:
        """Probability of one particular wrong row, ``p_s / (2^l - 1)``."""
        return self.p_s * _pow2neg(self.l) / (1.0 - _pow2neg(self.l))


def validate(p_c: float, p_e: float, p_s: float, l: int) -> ChannelParams:
    return ChannelParams(float(p_c), float(p_e), float(p_s), l)


def min_address_bits(n: int) -> int:
    if n < 1:
        raise BadArgs("n must be positive")
    return (n - 1).bit_length()


@dataclass(frozen=True)
class CodeConfig:
    """Outer-code geometry: ``n`` rows, ``k`` info rows, ``w`` data + ``a`` address bits.

    ``H`` is the binary parity-check matrix applied to every data column.
    """

    n: int
    k: int
    w: int
    a: int
    H: SparseBinMatrix = field(repr=False, compare=False)

    def __post_init__(self):
        if min(self.n, self.w) < 1 or self.k < 0 or self.k > self.n:
            raise BadArgs(f"bad geometry n={self.n} k={self.k} w={self.w}")
        if self.a < min_address_bits(self.n):
            raise BadArgs(f"a={self.a} cannot address n={self.n} rows")
        if self.H.cols != self.n:
            raise BadArgs(f"H has {self.H.cols} columns, expected n={self.n}")

    @property
    def l(self) -> int:
        return self.w + self.a

    @classmethod
    def from_parity_check(cls, H, w: int, a: int | None = None) -> CodeConfig:
        """Derive ``n`` and ``k`` from ``H`` (sparse or dense 0/1 array)."""
        from .gf2 import SparseBinMatrix, rank

        if not isinstance(H, SparseBinMatrix):
            H = SparseBinMatrix.from_dense(H)
        n = H.cols
        if a is None:
            a = min_address_bits(n)
        return cls(n=n, k=n - rank(H), w=w, a=a, H=H)

    @cached_property
    def encoder(self) -> Encoder:
        from .ldpc import build_encoder

        enc = build_encoder(self.H)
        if len(enc.info_positions) != self.k:
            raise BadArgs(f"H has {len(enc.info_positions)} info positions, config says k={self.k}")
        return enc


@dataclass(frozen=True)
class MixtureProbs:
    """Probability ``q`` that another row lands on a given address, and ``p1..p5``."""

    q: float
    p1: float
    p2: float
    p3: float
    p4: float
    p5: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.q, self.p1, self.p2, self.p3, self.p4, self.p5)


def beta(n: int, l: int) -> float:
    if n < 2 or l < 1:
        raise BadArgs(f"beta needs n >= 2 and l >= 1, got n={n}, l={l}")
    return l / math.log2(n)


def code_rate(n: int, k: int, w: int, l: int) -> float:
    if min(n, k, w, l) < 1 or k > n or w > l:
        raise BadArgs(f"bad rate arguments n={n} k={k} w={w} l={l}")
    return (k * w) / (n * l)


def outer_capacity(p_c: float, beta: float) -> float:
    """Capacity of the shuffled erasure/substitution channel per coded bit."""
    if beta <= 1.0:
        return 0.0
    return p_c * (1.0 - 1.0 / beta)


def noise_free_capacity(p_erasure: float, beta: float) -> float:
    if beta <= 1.0:
        return 0.0
    return (1.0 - p_erasure) * (1.0 - 1.0 / beta)


def duplicate_row_bound(n: int, l: int, p_c: float, p_s: float) -> float:
    """Union bound on the chance that two non-empty received rows coincide.

    Evaluates ``n**2 / 2**l * (2 p_c p_s + p_s**2)`` through logarithms.
    """
    if n < 2:
        raise BadArgs("n must be at least 2")
    inner = 2.0 * p_c * p_s + p_s * p_s
    if inner == 0.0:
        return 0.0
    log2_bound = 2.0 * math.log2(n) - l + math.log2(inner)
    return 2.0**log2_bound


def mixture_probs(params: ChannelParams, a: int) -> MixtureProbs:
    l = params.l
    if a < 0 or a >= l:
        raise BadArgs(f"need 0 <= a < l, got a={a}, l={l}")
    p_s = params.p_s
    denom = 1.0 - _pow2neg(l)
    two_a = _pow2neg(a)
    q = p_s * two_a / denom
    p3 = p_s * (1.0 - two_a) / denom
    p4 = p_s * (_pow2neg(a + 1) - _pow2neg(l)) / denom
    p5 = p_s * _pow2neg(a + 1) / denom
    return MixtureProbs(q=q, p1=params.p_c, p2=params.p_e, p3=p3, p4=p4, p5=p5)
