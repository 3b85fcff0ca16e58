"""Outer encoder and the independent / joint decoders.

Rows of ``X`` are ``[data (w bits) | address (a bits)]``.  Each data column is a
codeword of the binary code with parity-check matrix ``H``; the address of row
``i`` (1-based) is ``i`` written big-endian in ``a`` bits.  Because addresses run
from 1 to ``n``, an ``a``-bit field with ``n == 2**a`` stores address ``n`` as
all zeros.

Trit matrices use ``-1`` for an unknown bit.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .channel import ReceivedMatrix
from .errors import DimensionMismatch, OutOfRange
from .gf2 import PinnedSystem, Status
from .ldpc import LLR_CLAMP, Encoder
from .params import ChannelParams, CodeConfig, mixture_probs

log = logging.getLogger(__name__)

UNKNOWN = -1
STRICT = "strict"
SKIP_CONFLICTS = "skip-conflicts"

ColumnDecoder = Callable[[np.ndarray], "tuple[np.ndarray, np.ndarray]"]


@dataclass(frozen=True)
class DecodeOutcome:
    """``U`` is the recovered data matrix, or ``None`` on failure."""

    U: np.ndarray | None
    n_used: int | None = None
    reason: str = ""

    @property
    def recovered(self) -> bool:
        return self.U is not None

    @classmethod
    def failure(cls, reason: str) -> DecodeOutcome:
        return cls(None, None, reason)


@dataclass(frozen=True)
class Tally:
    t: np.ndarray  # (n,) rows claiming each address
    t0: np.ndarray  # (n, w) of those, rows with a 0 in data column j


def address_encode(i: int, a: int) -> np.ndarray:
    if a < 0 or i < 1 or i > (1 << a):
        raise OutOfRange(f"address {i} does not fit in {a} bits")
    value = i & ((1 << a) - 1)
    return np.array([(value >> (a - 1 - b)) & 1 for b in range(a)], dtype=np.uint8)


def _address_values(addr_bits: np.ndarray) -> np.ndarray:
    a = addr_bits.shape[-1]
    weights = (1 << np.arange(a - 1, -1, -1)).astype(np.int64)
    return addr_bits.astype(np.int64) @ weights


def _value_to_index(values: np.ndarray, n: int, a: int) -> np.ndarray:
    """Map raw address values to 0-based row indices, ``-1`` for invalid."""
    values = np.asarray(values, dtype=np.int64)
    idx = values - 1
    if n == (1 << a):
        idx = np.where(values == 0, n - 1, idx)
    return np.where((idx >= 0) & (idx < n), idx, -1)


def address_decode(bits, n: int) -> int | None:
    """1-based address carried by ``bits``, or ``None`` if it is not in ``1..n``."""
    bits = np.asarray(bits, dtype=np.uint8)
    idx = int(_value_to_index(_address_values(bits[None, :]), n, bits.size)[0])
    return None if idx < 0 else idx + 1


def slot_addresses(Z: ReceivedMatrix, n: int, w: int, a: int) -> np.ndarray:
    """0-based address of every slot; ``-1`` for erased or invalid slots."""
    if Z.l != w + a:
        raise DimensionMismatch(f"received rows have {Z.l} bits, expected w + a = {w + a}")
    idx = _value_to_index(_address_values(Z.bits[:, w:]), n, a)
    idx[Z.erased] = -1
    return idx


def outer_encode(U, encoder: Encoder, n: int, a: int) -> np.ndarray:
    U = np.asarray(U, dtype=np.uint8)
    if encoder.n != n:
        raise DimensionMismatch(f"encoder length {encoder.n} != n = {n}")
    if U.ndim != 2 or U.shape[0] != encoder.k:
        raise DimensionMismatch(f"U must have {encoder.k} rows, got shape {U.shape}")
    if n > (1 << a):
        raise DimensionMismatch(f"{a} address bits cannot label {n} rows")
    V = encoder.encode(U)
    A = np.array([address_encode(i, a) for i in range(1, n + 1)], dtype=np.uint8).reshape(n, a)
    return np.hstack([V, A])


def tally(Z: ReceivedMatrix, n: int, w: int, a: int) -> Tally:
    addr = slot_addresses(Z, n, w, a)
    ok = addr >= 0
    t = np.bincount(addr[ok], minlength=n)
    t0 = np.zeros((n, w), dtype=np.int64)
    np.add.at(t0, addr[ok], 1 - Z.bits[ok, :w].astype(np.int64))
    return Tally(t=t, t0=t0)


def llr_from_counts(t, t0, n: int, params: ChannelParams, a: int) -> np.ndarray:
    """Clamped natural-log likelihood ratio of a data bit given ``(t, t0)``."""
    mix = mixture_probs(params, a)
    t = np.asarray(t, dtype=np.float64)
    t0 = np.asarray(t0, dtype=np.float64)
    if t.ndim < t0.ndim:
        t = t[..., None]
    q = mix.q
    keep = (1.0 - q) * (mix.p1 + mix.p4)
    flip = (1.0 - q) * mix.p5
    other = (n - t) * q * (mix.p2 + mix.p3)
    t1 = t - t0
    num = 2.0 * t0 * keep + other + 2.0 * t1 * flip
    den = 2.0 * t1 * keep + other + 2.0 * t0 * flip
    with np.errstate(divide="ignore", invalid="ignore"):
        llr = np.log(num) - np.log(den)
    llr = np.where((num == 0) & (den == 0), 0.0, llr)
    return np.clip(llr, -LLR_CLAMP, LLR_CLAMP)


def soft_info(Z: ReceivedMatrix, params: ChannelParams, n: int, w: int, a: int) -> np.ndarray:
    tl = tally(Z, n, w, a)
    return llr_from_counts(tl.t, tl.t0, n, params, a)


def hard_info(Z: ReceivedMatrix, n: int, w: int, a: int) -> np.ndarray:
    """Majority vote per data bit: 0, 1, or ``-1`` on a tie (including no rows)."""
    tl = tally(Z, n, w, a)
    diff = 2 * tl.t0 - tl.t[:, None]
    out = np.full((n, w), UNKNOWN, dtype=np.int8)
    out[diff > 0] = 0
    out[diff < 0] = 1
    return out


def _check_config(Z: ReceivedMatrix, config: CodeConfig):
    if Z.n != config.n or Z.l != config.l:
        raise DimensionMismatch(f"Z is {Z.n}x{Z.l}, config expects {config.n}x{config.l}")


def independent_decode(
    Z: ReceivedMatrix, params: ChannelParams, config: CodeConfig, column_decoder: ColumnDecoder
) -> tuple[np.ndarray, DecodeOutcome]:
    """Decode every data column on its own from the soft information.

    Returns the trit matrix of decoded columns (failed columns all ``-1``) and
    the outcome, which is a recovery only if every column decoded.
    """
    _check_config(Z, config)
    llr = soft_info(Z, params, config.n, config.w, config.a)
    cw, ok = column_decoder(llr)
    cw = np.asarray(cw, dtype=np.uint8)
    ok = np.asarray(ok, dtype=bool)
    vtilde = np.where(ok[None, :], cw.astype(np.int8), np.int8(UNKNOWN))
    if ok.all():
        return vtilde, DecodeOutcome(config.encoder.extract(cw))
    return vtilde, DecodeOutcome.failure(f"{int((~ok).sum())} of {config.w} columns failed")


def reliability_distances(Z: ReceivedMatrix, vtilde, n: int, w: int, a: int) -> np.ndarray:
    """Mismatches between each slot's data and the estimate at its address.

    Erased and invalid-address slots score ``w``; an unknown estimate bit
    always counts as a mismatch.
    """
    vtilde = np.asarray(vtilde)
    addr = slot_addresses(Z, n, w, a)
    d = np.full(Z.n, w, dtype=np.int64)
    ok = addr >= 0
    d[ok] = np.sum(Z.bits[ok, :w].astype(np.int8) != vtilde[addr[ok]], axis=1)
    return d


def reliability_order(d, usable) -> np.ndarray:
    """Ascending ``d``; at equal ``d`` usable slots first, then original slot order."""
    d = np.asarray(d)
    usable = np.asarray(usable, dtype=bool)
    return np.lexsort((np.arange(d.size), ~usable, d))


def joint_decode(
    Z: ReceivedMatrix,
    params: ChannelParams,
    config: CodeConfig,
    column_decoder: ColumnDecoder,
    conflict_policy: str = STRICT,
    independent: tuple[np.ndarray, DecodeOutcome] | None = None,
) -> DecodeOutcome:
    """Pin the most reliable slots until the data matrix is uniquely determined.

    ``independent`` may carry a precomputed :func:`independent_decode` result
    for the same ``Z``.  With ``conflict_policy="strict"`` a slot whose data
    contradicts what earlier slots already force ends the search with a
    failure; ``"skip-conflicts"`` drops such slots and keeps going.
    """
    if conflict_policy not in (STRICT, SKIP_CONFLICTS):
        raise ValueError(f"unknown conflict policy {conflict_policy!r}")
    _check_config(Z, config)
    n, w, a = config.n, config.w, config.a
    if independent is None:
        independent = independent_decode(Z, params, config, column_decoder)
    vtilde, _ = independent
    addr = slot_addresses(Z, n, w, a)
    d = reliability_distances(Z, vtilde, n, w, a)
    order = reliability_order(d, addr >= 0)

    system = PinnedSystem(config.H, w, kernel=config.encoder.kernel)
    skipped = 0
    for used, slot in enumerate(order, start=1):
        pos = addr[slot]
        if pos >= 0:
            vals = Z.bits[slot, :w]
            if system.would_conflict(pos, vals):
                if conflict_policy == STRICT:
                    return DecodeOutcome.failure(f"slot {slot} contradicts earlier slots at n'={used}")
                skipped += 1
                continue
            system.pin(pos, vals)
        if system.status is Status.UNIQUE:
            V = system.solve()
            if skipped:
                log.debug("joint decode skipped %d conflicting slots", skipped)
            return DecodeOutcome(config.encoder.extract(V), n_used=used)
    return DecodeOutcome.failure(f"{system.free_dimension} degrees of freedom remain after all slots")
