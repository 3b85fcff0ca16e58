"""Self-check suites run by ``dnaouter oracle-check``.

Each suite returns a list of :class:`CheckResult`; the suite passes iff all do.
The statistical suites use fixed seeds, so their verdicts are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .channel import make_rng, transmit, trial_rng
from .fixtures import (
    EXAMPLE_A,
    EXAMPLE_DISTANCES,
    EXAMPLE_H,
    EXAMPLE_HARD,
    EXAMPLE_N_USED,
    EXAMPLE_ORDER,
    EXAMPLE_TIED_CODEWORDS,
    EXAMPLE_U,
    EXAMPLE_V,
    EXAMPLE_VTILDE,
    EXAMPLE_W,
    EXAMPLE_X,
    NOTATION_X,
    NOTATION_Y,
    example_received,
)
from .oracle import (
    FAILURE,
    Gf2wField,
    NearestCodewordDecoder,
    Tie,
    all_codewords,
    bits_to_int,
    ml_exact_decode,
    ml_intersection_decode,
    nearest_codeword_decode,
    rlc_codebook,
    row_set_intersection_size,
    threshold_decode,
)
from .outer import (
    hard_info,
    independent_decode,
    joint_decode,
    llr_from_counts,
    outer_encode,
    reliability_distances,
    reliability_order,
    slot_addresses,
)
from .params import ChannelParams, CodeConfig


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


def example_config() -> CodeConfig:
    return CodeConfig.from_parity_check(EXAMPLE_H, w=EXAMPLE_W, a=EXAMPLE_A)


def suite_examples() -> list[CheckResult]:
    out = []
    cfg = example_config()
    enc = cfg.encoder
    V = enc.encode(EXAMPLE_U)
    X = outer_encode(EXAMPLE_U, enc, cfg.n, cfg.a)
    out.append(CheckResult("example 1: V", np.array_equal(V, EXAMPLE_V)))
    out.append(CheckResult("example 1: X", np.array_equal(X, EXAMPLE_X)))

    Z = example_received()
    params = ChannelParams(0.8, 0.1, 0.1, cfg.l)
    hard = hard_info(Z, cfg.n, cfg.w, cfg.a)
    out.append(CheckResult("example 2: hard information", np.array_equal(hard, EXAMPLE_HARD)))
    dec = NearestCodewordDecoder(enc)
    vt, ind = independent_decode(Z, params, cfg, dec)
    out.append(CheckResult("example 2: independent estimate", np.array_equal(vt, EXAMPLE_VTILDE)))
    out.append(CheckResult("example 2: independent fails", not ind.recovered, ind.reason))
    cws = all_codewords(enc)
    col = hard[:, 1]
    dist = np.sum((cws != col) & (col >= 0), axis=1)
    tied = {tuple(c) for c in cws[dist == dist.min()]}
    expect = {tuple(c) for c in EXAMPLE_TIED_CODEWORDS}
    out.append(CheckResult("example 2: tied nearest codewords", tied == expect))
    out.append(CheckResult("example 2: tie reported", nearest_codeword_decode(col, cws) is FAILURE))
    first = nearest_codeword_decode(np.array([-1, 0, 0, 0, 0, 0]), cws)
    out.append(CheckResult("example 2: column 1", first is not FAILURE and not np.any(first)))

    d = reliability_distances(Z, vt, cfg.n, cfg.w, cfg.a)
    order = reliability_order(d, slot_addresses(Z, cfg.n, cfg.w, cfg.a) >= 0)
    out.append(CheckResult("example 3: distances", np.array_equal(d, EXAMPLE_DISTANCES), str(d.tolist())))
    out.append(CheckResult("example 3: order", np.array_equal(order, EXAMPLE_ORDER), str(order.tolist())))
    res = joint_decode(Z, params, cfg, dec, independent=(vt, ind))
    ok = res.recovered and np.array_equal(res.U, EXAMPLE_U) and res.n_used == EXAMPLE_N_USED
    out.append(CheckResult("example 3: joint recovers U with n'=2", ok, f"n_used={res.n_used}"))

    r = row_set_intersection_size(NOTATION_X, NOTATION_Y)
    out.append(CheckResult("row-set intersection example", r == 2, f"|X & Y| = {r}"))
    return out


def prop1_instances(count: int = 200, seed: int = 2024, max_draws: int = 20_000):
    """Yield ``(Z, codebook, params, sent)`` meeting the distinct-rows hypothesis with a unique exact argmax.

    Geometry: ``n=4, k=2, w=3`` over GF(8), ``a=2`` so ``l=5`` and ``kw=6``.
    """
    rng = make_rng(seed)
    found = 0
    for draw in range(max_draws):
        if found == count:
            return
        cb = rlc_codebook(4, 2, 3, seed=rng, a=2)
        pc = rng.uniform(0.4, 0.9)
        pe = rng.uniform(0.0, 1.0 - pc)
        params = ChannelParams(pc, pe, max(0.0, 1.0 - pc - pe), 5)
        sent = int(rng.integers(len(cb)))
        Z = transmit(cb.X[sent], params, rng)
        vals = bits_to_int(Z.bits[~Z.erased])
        if len(set(vals.tolist())) != len(vals):
            continue
        exact = ml_exact_decode(Z, cb, params)
        if isinstance(exact, Tie):
            continue
        found += 1
        yield Z, cb, params, sent, exact


def suite_prop1(count: int = 200, seed: int = 2024) -> list[CheckResult]:
    agree = total = 0
    for Z, cb, _, _, exact in prop1_instances(count, seed):
        total += 1
        agree += ml_intersection_decode(Z, cb) == exact
    ok = total == count and agree == total
    return [CheckResult("intersection ML equals permutation-sum ML", ok, f"{agree}/{total} instances")]


def empirical_llr_counts(params: ChannelParams, n: int, w: int, a: int, transmissions: int, seed: int, chunk: int = 200_000):
    """Count ``(t, t0, v)`` triples over simulated channel-1 outputs with uniform data.

    Returns an ``(n+1, n+1, 2)`` array; ``[t, t0, v]`` counts data bits equal to
    ``v`` whose address received ``t`` rows, ``t0`` of them with a 0 there.
    Written independently of :mod:`dnaouter.outer`, operating on row integers.
    """
    l = w + a
    if params.l != l:
        raise ValueError("params.l must equal w + a")
    rng = make_rng(seed)
    addr_vals = np.arange(1, n + 1) % (1 << a)
    shifts = np.arange(w - 1, -1, -1)
    counts = np.zeros((n + 1) * (n + 1) * 2, dtype=np.int64)
    for start in range(0, transmissions, chunk):
        B = min(chunk, transmissions - start)
        data = rng.integers(0, 1 << w, size=(B, n))
        x = (data << a) | addr_vals
        u = rng.random((B, n))
        r = rng.integers(0, (1 << l) - 1, size=(B, n))
        y = np.where(u < params.p_c, x, np.where(r < x, r, r + 1))
        present = (u < params.p_c) | (u >= params.p_c + params.p_e)
        raw = y & ((1 << a) - 1)
        idx = (np.where(raw == 0, n, raw) if n == (1 << a) else raw) - 1
        valid = present & (idx >= 0) & (idx < n)
        onehot = valid[:, :, None] & (idx[:, :, None] == np.arange(n))  # (B, row, address)
        zero = (((y >> a)[:, :, None] >> shifts) & 1) == 0  # (B, row, j)
        t = onehot.sum(axis=1)  # (B, address)
        t0 = np.einsum("bri,brj->bij", onehot.astype(np.int32), zero.astype(np.int32))
        v = (data[:, :, None] >> shifts) & 1
        key = ((t[:, :, None] * (n + 1) + t0) * 2 + v).ravel()
        counts += np.bincount(key, minlength=counts.size)
    return counts.reshape(n + 1, n + 1, 2)


def prop2_cells(params: ChannelParams, n: int, w: int, a: int, transmissions: int, seed: int, min_samples: int = 1000):
    """``[(t, t0, samples, empirical_llr, model_llr)]`` for cells with enough samples."""
    counts = empirical_llr_counts(params, n, w, a, transmissions, seed)
    rows = []
    for t in range(n + 1):
        for t0 in range(t + 1):
            n0, n1 = counts[t, t0]
            if n0 + n1 < min_samples:
                continue
            emp = math.log(n0 / n1) if n0 and n1 else math.copysign(math.inf, n0 - n1)
            rows.append((t, t0, int(n0 + n1), emp, float(llr_from_counts(t, t0, n, params, a))))
    return rows


PROP2_PARAMS = ChannelParams(0.1, 0.0, 0.9, 5)


def suite_prop2(transmissions: int = 10_000_000, seed: int = 11, tol: float = 0.05) -> list[CheckResult]:
    out = []
    for t, t0, N, emp, model in prop2_cells(PROP2_PARAMS, 4, 3, 2, transmissions, seed):
        out.append(
            CheckResult(f"LLR cell t={t} t0={t0}", abs(emp - model) <= tol, f"empirical {emp:+.4f}, model {model:+.4f}, {N} samples")
        )
    return out


def threshold_success_rate(n: int, trials: int, seed: int, params_pc=0.8, p_e=0.1, p_s=0.1, eps=0.15, k=2, w=8):
    """Fraction of trials where threshold decoding returns the sent entry of a random GF(2^w) code."""
    a = max(1, (n - 1).bit_length())
    cb = rlc_codebook(n, k, w, seed=seed, a=a)
    params = ChannelParams(params_pc, p_e, p_s, w + a)
    ok = 0
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        sent = int(rng.integers(len(cb)))
        Z = transmit(cb.X[sent], params, rng)
        ok += threshold_decode(Z, cb, params_pc, eps, n) == sent
    return ok / trials


def threshold_oracle_rate(n: int, p_c: float = 0.8, eps: float = 0.15) -> float:
    """Chance that at least ``n (p_c - eps)`` rows arrive intact."""
    need = math.ceil(n * (p_c - eps) - 1e-12)
    return float(binom.sf(need - 1, n, p_c))


def suite_lemma1(trials: int = 300, seed: int = 5, sizes=(8, 16, 32)) -> list[CheckResult]:
    out = []
    rates = []
    for n in sizes:
        rate = threshold_success_rate(n, trials, seed + n)
        target = threshold_oracle_rate(n)
        sigma = math.sqrt(target * (1 - target) / trials)
        rates.append(rate)
        out.append(
            CheckResult(
                f"threshold decoding n={n}", abs(rate - target) <= 4 * sigma + 1e-12, f"rate {rate:.3f}, binomial {target:.3f}"
            )
        )
    out.append(CheckResult("success rate grows with n", all(b >= a for a, b in zip(rates, rates[1:])), str(rates)))
    return out


def row_coincidence_rate(w: int, samples: int, seed: int, k: int = 2) -> float:
    """How often one fixed row of two codewords of a random GF(2^w) code coincides.

    Each sample draws a fresh generator column ``g`` and two distinct messages;
    the rows agree iff ``<g, U1 - U2> = 0``.  Computed on the symbol values only.
    """
    field = Gf2wField(w)
    rng = make_rng(seed)
    g = field.random(rng, (samples, k))
    u1 = field.random(rng, (samples, k))
    u2 = field.random(rng, (samples, k))
    same = np.all(u1 == u2, axis=1)
    while same.any():  # redraw until the pair is distinct
        u2[same] = field.random(rng, (int(same.sum()), k))
        same = np.all(u1 == u2, axis=1)
    return float(np.mean(field.dot(g, u1) == field.dot(g, u2)))


def suite_claim1(samples: int = 100_000, seed: int = 13, widths=(4, 8)) -> list[CheckResult]:
    out = []
    for w in widths:
        rate = row_coincidence_rate(w, samples, seed + w)
        p = 2.0**-w
        sigma = math.sqrt(p * (1 - p) / samples)
        out.append(
            CheckResult(f"row coincidence w={w}", abs(rate - p) <= 4 * sigma, f"rate {rate:.5f}, 2^-w = {p:.5f}")
        )
    return out


SUITES = {
    "examples": suite_examples,
    "prop1": suite_prop1,
    "prop2": suite_prop2,
    "lemma1": suite_lemma1,
    "claim1": suite_claim1,
}
