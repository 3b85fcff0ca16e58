"""Acceptance criteria 1-12.

Each test appends one ``ACCEPTANCE n: PASS|FAIL ...`` line (printed in the
terminal summary) before asserting, so a failing criterion is still reported.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from dnaouter.channel import transmit, trial_rng
from dnaouter.checks import PROP2_PARAMS, prop2_cells, row_coincidence_rate, suite_prop1
from dnaouter.fixtures import (
    EXAMPLE_DISTANCES,
    EXAMPLE_HARD,
    EXAMPLE_N_USED,
    EXAMPLE_ORDER,
    EXAMPLE_U,
    EXAMPLE_V,
    EXAMPLE_VTILDE,
    EXAMPLE_X,
    example_received,
)
from dnaouter.gf2 import PinnedSystem, Status
from dnaouter.ldpc import load_code
from dnaouter.oracle import NearestCodewordDecoder, all_codewords
from dnaouter.outer import (
    hard_info,
    independent_decode,
    joint_decode,
    llr_from_counts,
    outer_encode,
    reliability_distances,
    reliability_order,
    slot_addresses,
)
from dnaouter.params import (
    ChannelParams,
    CodeConfig,
    mixture_probs,
    noise_free_capacity,
    outer_capacity,
)
from dnaouter.sim import FerConfig, run_fer


@pytest.fixture
def record(acceptance_log):
    def _record(num, ok, detail, elapsed, budget):
        within = elapsed < budget
        verdict = "PASS" if ok and within else "FAIL"
        acceptance_log.append(f"ACCEPTANCE {num}: {verdict}  {detail}  [{elapsed:.2f}s / {budget:g}s]")
        assert ok, detail
        assert within, f"took {elapsed:.1f}s, budget {budget}s"

    return _record


def random_params(rng, l):
    while True:
        p_c = rng.uniform(0.01, 1.0)
        p_e = rng.uniform(0.0, 1.0 - p_c)
        p_s = max(0.0, 1.0 - p_c - p_e)
        if p_c * (2**l - 1) > p_s:
            return ChannelParams(p_c, p_e, p_s, l)


def test_1_example_encoding(toy, record):
    t = time.perf_counter()
    X = outer_encode(EXAMPLE_U, toy.encoder, toy.n, toy.a)
    cws = all_codewords(toy.encoder)
    dmin = int(cws[cws.any(axis=1)].sum(axis=1).min())
    ok = np.array_equal(X[:, : toy.w], EXAMPLE_V) and np.array_equal(X, EXAMPLE_X) and dmin == 4
    record(1, ok, f"V and X bit-exact, d_min = {dmin}", time.perf_counter() - t, 1)


def test_2_example_hard_and_independent(toy, toy_params, record):
    t = time.perf_counter()
    Z = example_received()
    M = hard_info(Z, toy.n, toy.w, toy.a)
    vt, out = independent_decode(Z, toy_params, toy, NearestCodewordDecoder(toy.encoder))
    ok = np.array_equal(M, EXAMPLE_HARD) and np.array_equal(vt, EXAMPLE_VTILDE)
    ok = ok and (vt[:, 1] == -1).all() and not out.recovered
    record(2, ok, "hard info and estimate bit-exact, column 2 failed", time.perf_counter() - t, 1)


def test_3_example_joint(toy, toy_params, record):
    t = time.perf_counter()
    Z = example_received()
    dec = NearestCodewordDecoder(toy.encoder)
    ind = independent_decode(Z, toy_params, toy, dec)
    d = reliability_distances(Z, ind[0], toy.n, toy.w, toy.a)
    addr = slot_addresses(Z, toy.n, toy.w, toy.a)
    order = reliability_order(d, addr >= 0)
    system = PinnedSystem(toy.H, toy.w)
    statuses = []
    for slot in order[:EXAMPLE_N_USED]:
        statuses.append(system.pin(addr[slot], Z.bits[slot, : toy.w]))
    out = joint_decode(Z, toy_params, toy, dec, independent=ind)
    ok = (
        np.array_equal(d, EXAMPLE_DISTANCES)
        and np.array_equal(order, EXAMPLE_ORDER)
        and statuses == [Status.UNDERDETERMINED, Status.UNIQUE]
        and out.recovered
        and out.n_used == EXAMPLE_N_USED
        and np.array_equal(out.U, EXAMPLE_U)
    )
    detail = f"d = {d.tolist()}, order = {(order + 1).tolist()}, n' = {out.n_used}"
    record(3, ok, detail, time.perf_counter() - t, 1)


def test_4_mixture_identities(record):
    t = time.perf_counter()
    rng = np.random.default_rng(4)
    worst_sum = worst_ps = worst_rel = 0.0
    exact_checked = 0
    for draw in range(10_000):
        l = 100 if draw % 10 == 0 else int(rng.integers(2, 101))
        p = random_params(rng, l)
        a = int(rng.integers(0, l))
        m = mixture_probs(p, a)
        worst_sum = max(worst_sum, abs(m.p1 + m.p2 + m.p3 + m.p4 + m.p5 - 1.0))
        worst_ps = max(worst_ps, abs(m.p3 + m.p4 + m.p5 - p.p_s))
        if l <= 60:
            ps, big = Fraction(p.p_s), 2**l - 1
            want = (
                ps * 2 ** (l - a) / big,
                ps * (2**l - 2 ** (l - a)) / big,
                ps * (2 ** (l - a - 1) - 1) / big,
                ps * 2 ** (l - a - 1) / big,
            )
            for got, exact in zip((m.q, m.p3, m.p4, m.p5), want):
                if exact:
                    worst_rel = max(worst_rel, abs(Fraction(got) - exact) / exact)
                elif got != 0:
                    worst_rel = math.inf
            exact_checked += 1
    ok = worst_sum <= 1e-12 and worst_ps <= 1e-12 and worst_rel <= 1e-12
    detail = f"max |sum-1| {worst_sum:.1e}, max |p3+p4+p5-p_s| {worst_ps:.1e}, max rel err {float(worst_rel):.1e} ({exact_checked} exact)"
    record(4, ok, detail, time.perf_counter() - t, 10)


def test_5_sign_matches_majority(record):
    t = time.perf_counter()
    rng = np.random.default_rng(5)
    T, T0 = np.meshgrid(np.arange(21), np.arange(21), indexing="ij")
    keep = T0 <= T
    T, T0 = T[keep], T0[keep]
    mismatches = 0
    for _ in range(100):
        l = int(rng.integers(2, 101))
        p = random_params(rng, l)
        a = int(rng.integers(0, l))
        n = int(rng.integers(20, 2000))
        llr = llr_from_counts(T, T0, n, p, a)
        mismatches += int(np.sum(np.sign(llr) != np.sign(2 * T0 - T)))
    record(5, mismatches == 0, f"{mismatches} sign mismatches over 100 x {T.size} cells", time.perf_counter() - t, 10)


def test_6_soft_info_monte_carlo(record):
    t = time.perf_counter()
    cells = prop2_cells(PROP2_PARAMS, 4, 3, 2, 10_000_000, seed=11)
    worst = max(abs(emp - model) for *_, emp, model in cells)
    ok = len(cells) > 0 and worst <= 0.05
    record(6, ok, f"{len(cells)} cells with >=1e3 samples, max |emp - model| = {worst:.4f}", time.perf_counter() - t, 120)


def test_7_intersection_ml(record):
    t = time.perf_counter()
    (res,) = suite_prop1(200, seed=2024)
    record(7, res.passed, res.detail, time.perf_counter() - t, 60)


def test_8_dominance(toy, toy_params, record):
    t = time.perf_counter()
    parts, ok = [], True
    for decoder in ("nearest", "bp"):
        cfg = FerConfig(toy, toy_params, min_frame_errors=10_000, max_trials=10_000, seed=7, decoder=decoder)
        res = run_fer(cfg)
        ind, joint = set(res["independent"].error_trials), set(res["joint-strict"].error_trials)
        exceptions = len(joint - ind)
        ok = ok and res.trials == 10_000 and exceptions == 0
        parts.append(f"{decoder}: {exceptions} exceptions (ind {len(ind)}, joint {len(joint)} errors)")
    record(8, ok, "; ".join(parts), time.perf_counter() - t, 60)


def erasure_oracle_fails(received, codewords):
    """Some nonzero codeword vanishes on every received position."""
    nz = codewords[codewords.any(axis=1)]
    return bool(np.any(~nz[:, received].any(axis=1))) if len(nz) else False


def test_9_noise_free_and_erasure_only(toy, record):
    t = time.perf_counter()
    clean = FerConfig(toy, ChannelParams(1.0, 0.0, 0.0, toy.l), min_frame_errors=1000, max_trials=1000, seed=9)
    res = run_fer(clean)
    clean_ok = res.trials == 1000 and res["independent"].frame_errors == 0 and res["joint-strict"].frame_errors == 0

    params = ChannelParams(0.7, 0.3, 0.0, toy.l)
    dec = NearestCodewordDecoder(toy.encoder)
    cws = all_codewords(toy.encoder)
    trials, joint_err, oracle_err, disagree = 5000, 0, 0, 0
    for trial in range(trials):
        rng = trial_rng(9, trial)
        U = rng.integers(0, 2, (toy.k, toy.w), dtype=np.uint8)
        Z = transmit(outer_encode(U, toy.encoder, toy.n, toy.a), params, rng)
        out = joint_decode(Z, params, toy, dec)
        failed = not (out.recovered and np.array_equal(out.U, U))
        received = np.unique(slot_addresses(Z, toy.n, toy.w, toy.a)[~Z.erased])
        predicted = erasure_oracle_fails(received, cws)
        joint_err += failed
        oracle_err += predicted
        disagree += failed != predicted
    ok = clean_ok and disagree == 0
    detail = (
        f"p_c=1: FER 0/0 over {res.trials}; p_e=0.3: joint {joint_err}/{trials}, "
        f"oracle {oracle_err}/{trials}, {disagree} per-trial disagreements"
    )
    record(9, ok, detail, time.perf_counter() - t, 60)


@pytest.mark.slow
def test_10_large_code_reproduction(record):
    t = time.perf_counter()
    code = CodeConfig.from_parity_check(load_code("wifi-1296"), w=89)
    base = dict(schemes=("independent", "joint-strict"), seed=10, decoder="bp", max_iter=50, stop_when="any")

    def point(p_e, p_s, max_trials):
        params = ChannelParams(0.94, p_e, p_s, code.l)
        return run_fer(FerConfig(code, params, min_frame_errors=100, max_trials=max_trials, **base))

    a = point(0.0, 0.06, 4000)
    ind, joint = a["independent"], a["joint-strict"]
    ind_lo, _ = ind.ci95
    _, joint_hi = joint.ci95
    range_ok = 1e-2 <= ind.fer <= 1e-1 and ind.frame_errors >= 100
    gap_ok = joint.fer * 10 <= ind.fer and joint_hi < ind_lo
    b = point(0.03, 0.03, 1000)
    c = point(0.06, 0.0, 1000)
    chain = {s: [r[s].fer for r in (a, b, c)] for s in base["schemes"]}
    mono_ok = all(f[0] >= f[1] >= f[2] for f in chain.values())
    ok = code.l == 100 and range_ok and gap_ok and mono_ok
    detail = (
        f"independent {ind.frame_errors}/{ind.trials} = {ind.fer:.4f} CI [{ind_lo:.4f}, {ind.ci95[1]:.4f}], "
        f"joint {joint.frame_errors}/{joint.trials} = {joint.fer:.4f} CI [{joint.ci95[0]:.4f}, {joint_hi:.4f}]; "
        + ", ".join(f"{s} p_s 0.06/0.03/0 -> " + "/".join(f"{x:.4f}" for x in f) for s, f in chain.items())
    )
    record(10, ok, detail, time.perf_counter() - t, 1800)


def test_11_capacity(record):
    t = time.perf_counter()
    rng = np.random.default_rng(11)
    bad = 0
    for _ in range(10_000):
        p = random_params(rng, int(rng.integers(2, 101)))
        b = float(rng.uniform(0.01, 50.0))
        want = p.p_c * (1 - 1 / b) if b > 1 else 0.0
        got = outer_capacity(p.p_c, b)
        if abs(got - want) > 1e-12 or abs(got - noise_free_capacity(p.p_e + p.p_s, b)) > 1e-12:
            bad += 1
        if b <= 1 and got != 0.0:
            bad += 1
    zero_ok = outer_capacity(0.9, 1.0) == 0.0 and outer_capacity(0.9, 0.5) == 0.0
    record(11, bad == 0 and zero_ok, f"{bad} mismatches over 10^4 draws", time.perf_counter() - t, 1)


def test_12_row_coincidence(record):
    t = time.perf_counter()
    parts, ok = [], True
    for w in (4, 8):
        samples = 100_000
        rate = row_coincidence_rate(w, samples, seed=13 + w)
        p = 2.0**-w
        z = (rate - p) / math.sqrt(p * (1 - p) / samples)
        ok = ok and abs(z) <= 4
        parts.append(f"w={w}: {rate:.5f} vs {p:.5f} ({z:+.2f} sigma)")
    record(12, ok, "; ".join(parts), time.perf_counter() - t, 60)
