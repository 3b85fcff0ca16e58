"""Seeded Monte-Carlo frame-error-rate harness.

Every trial draws its randomness from ``trial_rng(seed, trial)``, so results do
not depend on how trials are spread over worker processes.  Trials are handed
out in ordered batches and the stop rule is applied by scanning trial indices
in order, which makes the counts identical for any worker count.
"""

from __future__ import annotations

import configparser
import csv
import io
import logging
import time
from collections.abc import Iterable, Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import islice

import numpy as np
from scipy.stats import binomtest

from .channel import RNG_ID, transmit, trial_rng
from .errors import ConfigError, OuterChannelError
from .ldpc import BPDecoder, load_code
from .outer import SKIP_CONFLICTS, STRICT, independent_decode, joint_decode, outer_encode
from .params import ChannelParams, CodeConfig

log = logging.getLogger(__name__)

SCHEMES = ("independent", "joint-strict", "joint-skip")
CSV_COLUMNS = (
    "scheme", "n", "k", "w", "a", "l", "p_c", "p_e", "p_s", "trials", "frame_errors",
    "fer", "ci95_halfwidth", "seed", "rng_id", "wall_ms", "status",
)  # fmt: skip


@dataclass(frozen=True)
class FerConfig:
    """One simulation point.

    ``stop_when="all"`` keeps going until every scheme has ``min_frame_errors``
    errors; ``"any"`` stops as soon as one of them has.  ``max_trials`` caps both.
    """

    code: CodeConfig
    params: ChannelParams
    schemes: tuple[str, ...] = ("independent", "joint-strict")
    min_frame_errors: int = 100
    max_trials: int = 10_000
    seed: int = 0
    workers: int = 1
    stop_when: str = "all"
    decoder: str = "bp"
    max_iter: int = 50
    batch_size: int = 32
    code_name: str = ""

    def __post_init__(self):
        if self.min_frame_errors < 1:
            raise ConfigError("min_frame_errors must be >= 1")
        if self.max_trials < self.min_frame_errors:
            raise ConfigError("max_trials must be >= min_frame_errors")
        if not self.schemes or any(s not in SCHEMES for s in self.schemes):
            raise ConfigError(f"schemes must be drawn from {SCHEMES}, got {self.schemes}")
        if len(set(self.schemes)) != len(self.schemes):
            raise ConfigError("duplicate scheme")
        if self.workers < 1 or self.batch_size < 1 or self.max_iter < 1:
            raise ConfigError("workers, batch_size and max_iter must be positive")
        if self.stop_when not in ("all", "any"):
            raise ConfigError("stop_when must be 'all' or 'any'")
        if self.decoder not in ("bp", "nearest"):
            raise ConfigError("decoder must be 'bp' or 'nearest'")
        if self.params.l != self.code.l:
            raise ConfigError(f"params.l = {self.params.l} but w + a = {self.code.l}")


def wilson_interval(errors: int, trials: int) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(errors, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class SchemeResult:
    scheme: str
    trials: int
    frame_errors: int
    error_trials: tuple[int, ...] = field(repr=False, default=())

    @property
    def fer(self) -> float:
        return self.frame_errors / self.trials if self.trials else 0.0

    @property
    def ci95(self) -> tuple[float, float]:
        return wilson_interval(self.frame_errors, self.trials)

    @property
    def ci95_halfwidth(self) -> float:
        lo, hi = self.ci95
        return (hi - lo) / 2


@dataclass(frozen=True)
class FerResult:
    """Outcome of :func:`run_fer`; the top-level counts refer to the first scheme."""

    config: FerConfig = field(repr=False)
    trials: int
    schemes: dict[str, SchemeResult]
    wall_ms: float
    vtilde_accuracy: float
    rng_id: str = RNG_ID

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def primary(self) -> SchemeResult:
        return self.schemes[self.config.schemes[0]]

    @property
    def frame_errors(self) -> int:
        return self.primary.frame_errors

    @property
    def fer(self) -> float:
        return self.primary.fer

    def __getitem__(self, scheme: str) -> SchemeResult:
        return self.schemes[scheme]


def make_column_decoder(code: CodeConfig, kind: str = "bp", max_iter: int = 50):
    if kind == "bp":
        return BPDecoder(code.H, max_iter=max_iter)
    from .oracle import NearestCodewordDecoder

    return NearestCodewordDecoder(code.encoder)


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    errors: tuple[bool, ...]  # aligned with FerConfig.schemes
    vtilde_correct: int  # entries of the estimate equal to the true V


def run_trial(config: FerConfig, trial: int, column_decoder) -> TrialOutcome:
    code, params = config.code, config.params
    enc = code.encoder
    rng = trial_rng(config.seed, trial)
    U = rng.integers(0, 2, size=(code.k, code.w), dtype=np.uint8)
    X = outer_encode(U, enc, code.n, code.a)
    Z = transmit(X, params, rng)
    ind = independent_decode(Z, params, code, column_decoder)
    errors = []
    for scheme in config.schemes:
        if scheme == "independent":
            out = ind[1]
        else:
            policy = STRICT if scheme == "joint-strict" else SKIP_CONFLICTS
            out = joint_decode(Z, params, code, column_decoder, policy, independent=ind)
        errors.append(not (out.recovered and np.array_equal(out.U, U)))
    vtilde_correct = int(np.sum(ind[0] == X[:, : code.w]))
    return TrialOutcome(trial, tuple(errors), vtilde_correct)


_worker_state: dict = {}


def _worker_init(config: FerConfig):
    _worker_state["config"] = config
    _worker_state["decoder"] = make_column_decoder(config.code, config.decoder, config.max_iter)


def _worker_batch(trials: list[int]) -> list[TrialOutcome]:
    config, dec = _worker_state["config"], _worker_state["decoder"]
    return [run_trial(config, t, dec) for t in trials]


def _stop_reached(counts: list[int], config: FerConfig) -> bool:
    hit = [c >= config.min_frame_errors for c in counts]
    return all(hit) if config.stop_when == "all" else any(hit)


def run_fer(config: FerConfig) -> FerResult:
    """Run trials ``0, 1, 2, ...`` until the stop rule fires."""
    start = time.perf_counter()
    config.code.encoder.kernel  # build once before forking
    m = len(config.schemes)
    counts = [0] * m
    error_trials: list[list[int]] = [[] for _ in range(m)]
    vt_correct = 0
    done = 0

    def consume(outcomes: Iterable[TrialOutcome]) -> bool:
        nonlocal done, vt_correct
        for oc in outcomes:
            done += 1
            vt_correct += oc.vtilde_correct
            for s, err in enumerate(oc.errors):
                if err:
                    counts[s] += 1
                    error_trials[s].append(oc.trial)
            if _stop_reached(counts, config) or done >= config.max_trials:
                return True
        return False

    def batches(width: int):
        nxt = 0
        while nxt < config.max_trials:
            stop = min(nxt + width, config.max_trials)
            yield list(range(nxt, stop))
            nxt = stop

    if config.workers == 1:
        dec = make_column_decoder(config.code, config.decoder, config.max_iter)
        for b in batches(config.batch_size):
            if consume(run_trial(config, t, dec) for t in b):
                break
    else:
        with ProcessPoolExecutor(config.workers, initializer=_worker_init, initargs=(config,)) as pool:
            # keep a bounded window of batches in flight, consumed strictly in order
            gen = batches(config.batch_size)
            window = [pool.submit(_worker_batch, b) for b in islice(gen, 2 * config.workers)]
            while window:
                fut = window.pop(0)
                if consume(fut.result()):
                    for f in window:
                        f.cancel()
                    break
                nxt = next(gen, None)
                if nxt is not None:
                    window.append(pool.submit(_worker_batch, nxt))

    schemes = {
        s: SchemeResult(s, done, counts[i], tuple(error_trials[i])) for i, s in enumerate(config.schemes)
    }
    cells = done * config.code.n * config.code.w
    acc = vt_correct / cells if cells else float("nan")
    if done and acc <= 0.5:
        log.warning("estimate accuracy %.3f is not above 1/2 at %s", acc, config.params)
    else:
        log.info("estimate accuracy %.4f over %d trials", acc, done)
    wall_ms = (time.perf_counter() - start) * 1e3
    return FerResult(config, done, schemes, wall_ms, acc)


def _fmt(x: float) -> str:
    return repr(float(x))


def result_rows(result: FerResult) -> list[dict]:
    cfg = result.config
    p, c = cfg.params, cfg.code
    rows = []
    for s, r in result.schemes.items():
        rows.append(
            dict(
                scheme=s, n=c.n, k=c.k, w=c.w, a=c.a, l=c.l,
                p_c=_fmt(p.p_c), p_e=_fmt(p.p_e), p_s=_fmt(p.p_s),
                trials=r.trials, frame_errors=r.frame_errors, fer=_fmt(r.fer),
                ci95_halfwidth=_fmt(r.ci95_halfwidth), seed=cfg.seed, rng_id=result.rng_id,
                wall_ms=f"{result.wall_ms:.1f}", status="ok",
            )  # fmt: skip
        )
    return rows


def _error_rows(cfg: FerConfig, exc: Exception) -> list[dict]:
    p, c = cfg.params, cfg.code
    status = f"error: {type(exc).__name__}: {exc}".replace("\n", " ")
    return [
        dict(
            scheme=s, n=c.n, k=c.k, w=c.w, a=c.a, l=c.l,
            p_c=_fmt(p.p_c), p_e=_fmt(p.p_e), p_s=_fmt(p.p_s),
            trials=0, frame_errors=0, fer="", ci95_halfwidth="", seed=cfg.seed, rng_id=RNG_ID,
            wall_ms="", status=status,
        )  # fmt: skip
        for s in cfg.schemes
    ]


def _warn_if_increasing(prev: FerResult, cur: FerResult):
    a, b = prev.config, cur.config
    same_code = a.code.n == b.code.n and a.code.w == b.code.w
    if not (same_code and a.params.p_c == b.params.p_c and b.params.p_s < a.params.p_s):
        return
    for s in set(a.schemes) & set(b.schemes):
        if cur[s].fer > prev[s].fer:
            log.warning(
                "%s FER rose from %.3g to %.3g when p_s dropped from %g to %g",
                s, prev[s].fer, cur[s].fer, a.params.p_s, b.params.p_s,
            )  # fmt: skip


def sweep(configs: Iterable[FerConfig]) -> str:
    """Run every point and return CSV text (one row per point and scheme)."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    prev = None
    for cfg in configs:
        try:
            res = run_fer(cfg)
        except (OuterChannelError, ValueError) as exc:
            log.error("point %s failed: %s", cfg.params, exc)
            writer.writerows(_error_rows(cfg, exc))
            prev = None
            continue
        writer.writerows(result_rows(res))
        if prev is not None:
            _warn_if_increasing(prev, res)
        prev = res
    return buf.getvalue()


# ---------------------------------------------------------------- config files

CONFIG_DEFAULTS = {
    "code": "wifi-1296",
    "lift": "",
    "w": "89",
    "a": "",
    "p_c": "0.94",
    "p_e": "0.0",
    "p_s": "0.06",
    "schemes": "independent, joint-strict",
    "min_frame_errors": "100",
    "max_trials": "10000",
    "seed": "0",
    "workers": "1",
    "stop_when": "all",
    "decoder": "bp",
    "max_iter": "50",
    "batch_size": "32",
}


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` and ``;`` start comments."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        cp.read_string("[sim]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    out = dict(cp["sim"])
    unknown = set(out) - set(CONFIG_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return out


def resolve_config(file_values: Mapping[str, str], overrides: Mapping[str, str | None]) -> dict[str, str]:
    """Defaults, then file values, then non-``None`` overrides."""
    out = dict(CONFIG_DEFAULTS)
    out.update(file_values)
    out.update({k: str(v) for k, v in overrides.items() if v is not None})
    return out


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.replace(",", " ").split()]


def configs_from_mapping(values: Mapping[str, str]) -> list[FerConfig]:
    """Build the sweep points; ``p_c``, ``p_e``, ``p_s`` may be lists, zipped with broadcasting."""
    try:
        H = load_code(values["code"], int(values["lift"]) if values["lift"] else None)
        w = int(values["w"])
        code = CodeConfig.from_parity_check(H, w=w, a=int(values["a"]) if values["a"] else None)
        pcs, pes, pss = _floats(values["p_c"]), _floats(values["p_e"]), _floats(values["p_s"])
        npts = max(len(pcs), len(pes), len(pss))
        if any(len(v) not in (1, npts) for v in (pcs, pes, pss)):
            raise ConfigError("p_c, p_e, p_s lists must have equal length (or length 1)")
        grid = [v * npts if len(v) == 1 else v for v in (pcs, pes, pss)]
        schemes = tuple(s.strip() for s in values["schemes"].replace(",", " ").split())
        base = dict(
            schemes=schemes,
            min_frame_errors=int(values["min_frame_errors"]),
            max_trials=int(values["max_trials"]),
            seed=int(values["seed"]),
            workers=int(values["workers"]),
            stop_when=values["stop_when"],
            decoder=values["decoder"],
            max_iter=int(values["max_iter"]),
            batch_size=int(values["batch_size"]),
            code_name=values["code"],
        )
        return [
            FerConfig(code=code, params=ChannelParams(pc, pe, ps, code.l), **base)
            for pc, pe, ps in zip(*grid)
        ]
    except ConfigError:
        raise
    except (OuterChannelError, ValueError, OSError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def with_workers(config: FerConfig, workers: int) -> FerConfig:
    return replace(config, workers=workers)
