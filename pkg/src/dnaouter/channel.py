"""Row-level erasure/substitution channel followed by a uniform row shuffle.

Randomness comes from NumPy's Philox4x64-10 counter-based generator.  Given
the same seed the output is bit-identical on every platform, and per-trial
streams are derived from ``(master seed, trial index)`` alone.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from .params import ChannelParams

RNG_ID = "numpy-philox4x64-10"


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([master_seed, trial])))


@dataclass
class ReceivedMatrix:
    """``n`` received slots; ``erased[i]`` marks an empty slot (its bits are zero)."""

    bits: np.ndarray
    erased: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8)
        self.erased = np.asarray(self.erased, dtype=bool)
        if self.bits.ndim != 2 or self.erased.shape != (self.bits.shape[0],):
            raise ValueError("bits must be (n, l) and erased (n,)")
        self.bits[self.erased] = 0

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    @property
    def l(self) -> int:
        return self.bits.shape[1]

    def rows(self) -> Iterator[np.ndarray | None]:
        for b, e in zip(self.bits, self.erased):
            yield None if e else b

    def __getitem__(self, i: int) -> np.ndarray | None:
        return None if self.erased[i] else self.bits[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReceivedMatrix):
            return NotImplemented
        return np.array_equal(self.bits, other.bits) and np.array_equal(self.erased, other.erased)

    def take(self, order) -> ReceivedMatrix:
        order = np.asarray(order)
        return ReceivedMatrix(self.bits[order], self.erased[order])

    @classmethod
    def all_erased(cls, n: int, l: int) -> ReceivedMatrix:
        return cls(np.zeros((n, l), dtype=np.uint8), np.ones(n, dtype=bool))

    @classmethod
    def from_rows(cls, rows, l: int) -> ReceivedMatrix:
        rows = list(rows)
        bits = np.zeros((len(rows), l), dtype=np.uint8)
        erased = np.zeros(len(rows), dtype=bool)
        for i, r in enumerate(rows):
            if r is None:
                erased[i] = True
            else:
                bits[i] = r
        return cls(bits, erased)


def channel1(X, params: ChannelParams, rng) -> ReceivedMatrix:
    """Independently keep, erase, or replace each row by a uniformly random different row."""
    rng = make_rng(rng)
    X = np.asarray(X, dtype=np.uint8)
    n, l = X.shape
    if l != params.l:
        raise ValueError(f"X has {l} columns but params.l = {params.l}")
    u = rng.random(n)
    erased = (u >= params.p_c) & (u < params.p_c + params.p_e)
    subst = np.flatnonzero(u >= params.p_c + params.p_e)
    Y = X.copy()
    pending = subst
    while pending.size:
        draw = rng.integers(0, 2, size=(pending.size, l), dtype=np.uint8)
        Y[pending] = draw
        pending = pending[np.all(draw == X[pending], axis=1)]
    return ReceivedMatrix(Y, erased)


def apply_channel1(X, erased=(), substitutions=None) -> ReceivedMatrix:
    """Deterministic channel-1 output: erase the listed rows and overwrite others.

    ``substitutions`` maps a row index to its replacement, which must differ
    from the original row.
    """
    X = np.asarray(X, dtype=np.uint8)
    Y = X.copy()
    gone = np.zeros(X.shape[0], dtype=bool)
    gone[list(erased)] = True
    for i, row in (substitutions or {}).items():
        row = np.asarray(row, dtype=np.uint8)
        if gone[i] or np.array_equal(row, X[i]):
            raise ValueError(f"row {i}: a substitution must replace a kept row with a different one")
        Y[i] = row
    return ReceivedMatrix(Y, gone)


def channel2(Y: ReceivedMatrix, rng, return_perm: bool = False):
    """Uniform random permutation of all slots, erased ones included."""
    perm = make_rng(rng).permutation(Y.n)
    out = Y.take(perm)
    return (out, perm) if return_perm else out


def transmit(X, params: ChannelParams, seed) -> ReceivedMatrix:
    rng = make_rng(seed)
    return channel2(channel1(X, params, rng), rng)
