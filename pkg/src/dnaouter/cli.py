"""Command-line front end.

Exit codes: 0 success, 2 decoding failure, 1 usage or configuration error.
Each command echoes its resolved configuration to stderr as ``# key = value``
lines before doing any work.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import checks, formats
from .channel import RNG_ID, transmit
from .errors import OuterChannelError
from .ldpc import load_code
from .outer import SKIP_CONFLICTS, STRICT, independent_decode, joint_decode, outer_encode
from .params import ChannelParams, CodeConfig, beta, code_rate, min_address_bits, noise_free_capacity, outer_capacity
from .sim import configs_from_mapping, make_column_decoder, parse_config_text, resolve_config, sweep

EXIT_OK, EXIT_ERROR, EXIT_DECODE_FAILURE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _echo(**values):
    for key, val in values.items():
        print(f"# {key} = {val}", file=sys.stderr)


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _code_config(args, n_hint=None, l=None) -> CodeConfig:
    H = load_code(args.code, args.lift)
    n = H.cols
    if n_hint is not None and n_hint != n:
        raise OuterChannelError(f"--n {n_hint} does not match the code length {n}")
    a = args.a if args.a is not None else min_address_bits(n)
    w = args.w if getattr(args, "w", None) is not None else (l - a if l is not None else None)
    if w is None or w < 1:
        raise OuterChannelError("cannot infer w; pass --w")
    return CodeConfig.from_parity_check(H, w=w, a=a)


def cmd_capacity(args) -> int:
    _echo(pc=args.pc, pe=args.pe, ps=args.ps, n=args.n, l=args.l, k=args.k, w=args.w)
    params = ChannelParams(args.pc, args.pe, args.ps, args.l)
    b = beta(args.n, args.l)
    C = outer_capacity(params.p_c, b)
    print(f"beta = {b:.6f}")
    print(f"capacity = {C:.6f}")
    print(f"capacity_noise_free = {noise_free_capacity(params.p_e + params.p_s, b):.6f}")
    if args.k is not None and args.w is not None:
        R = code_rate(args.n, args.k, args.w, args.l)
        print(f"code_rate = {R:.6f}")
        print(f"headroom = {C - R:.6f}")
    return EXIT_OK


def cmd_encode(args) -> int:
    U = formats.read_bits(args.inp)
    if args.w is None:
        args.w = U.shape[1]
    cfg = _code_config(args, n_hint=args.n)
    _echo(inp=args.inp, code=args.code, lift=args.lift, n=cfg.n, k=cfg.k, w=cfg.w, a=cfg.a, out=args.out)
    X = outer_encode(U, cfg.encoder, cfg.n, cfg.a)
    _write(args.out, formats.format_bits(X))
    return EXIT_OK


def cmd_channel(args) -> int:
    X = formats.read_bits(args.inp)
    _echo(inp=args.inp, pc=args.pc, pe=args.pe, ps=args.ps, seed=args.seed, rng=RNG_ID, out=args.out)
    params = ChannelParams(args.pc, args.pe, args.ps, X.shape[1])
    Z = transmit(X, params, args.seed)
    _write(args.out, formats.format_rx(Z))
    return EXIT_OK


def cmd_decode(args) -> int:
    text = sys.stdin.read() if args.inp == "-" else Path(args.inp).read_text()
    H = load_code(args.code, args.lift)
    a = args.a if args.a is not None else min_address_bits(H.cols)
    width = args.w + a if args.w is not None else None
    Z = formats.parse_rx(text, width)
    cfg = _code_config(args, l=Z.l)
    params = ChannelParams(args.pc, args.pe, args.ps, cfg.l)
    _echo(
        inp=args.inp, code=args.code, lift=args.lift, n=cfg.n, k=cfg.k, w=cfg.w, a=cfg.a,
        pc=args.pc, pe=args.pe, ps=args.ps, scheme=args.scheme, decoder=args.decoder,
        max_iter=args.max_iter, out=args.out,
    )  # fmt: skip
    dec = make_column_decoder(cfg, args.decoder, args.max_iter)
    ind = independent_decode(Z, params, cfg, dec)
    if args.scheme == "independent":
        out = ind[1]
    else:
        policy = STRICT if args.scheme == "joint-strict" else SKIP_CONFLICTS
        out = joint_decode(Z, params, cfg, dec, policy, independent=ind)
    if not out.recovered:
        print(f"decoding failed: {out.reason}", file=sys.stderr)
        return EXIT_DECODE_FAILURE
    if out.n_used is not None:
        print(f"# n_used = {out.n_used}", file=sys.stderr)
    _write(args.out, formats.format_bits(out.U))
    return EXIT_OK


def cmd_simulate(args) -> int:
    file_values = parse_config_text(Path(args.config).read_text()) if args.config else {}
    overrides = {
        "code": args.code, "lift": args.lift, "w": args.w, "a": args.a,
        "p_c": args.pc, "p_e": args.pe, "p_s": args.ps, "schemes": args.schemes,
        "min_frame_errors": args.min_frame_errors, "max_trials": args.max_trials,
        "seed": args.seed, "workers": args.workers, "stop_when": args.stop_when,
        "decoder": args.decoder, "max_iter": args.max_iter,
    }  # fmt: skip
    resolved = resolve_config(file_values, overrides)
    _echo(**resolved, rng_id=RNG_ID, out=args.out)
    configs = configs_from_mapping(resolved)
    _write(args.out, sweep(configs))
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    _echo(suite=args.suite)
    results = checks.SUITES[args.suite]()
    for r in results:
        print(r.line())
    ok = bool(results) and all(r.passed for r in results)
    print(f"{args.suite}: {'all passed' if ok else 'FAILED'} ({sum(r.passed for r in results)}/{len(results)})")
    return EXIT_OK if ok else EXIT_ERROR


def _add_code_args(p, w=True):
    p.add_argument("--code", default="toy", help="wifi-1296, wifi-2592, toy, or a .qc / alist file")
    p.add_argument("--lift", type=int, help="override the lifting size of a QC code")
    p.add_argument("--a", type=int, help="address bits (default: ceil(log2 n))")
    if w:
        p.add_argument("--w", type=int, help="data bits per row")


def _add_channel_args(p, required=True):
    p.add_argument("--pc", type=float, required=required)
    p.add_argument("--pe", type=float, required=required)
    p.add_argument("--ps", type=float, required=required)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dnaouter", description="Outer-channel coding toolkit for DNA storage.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="capacity and rate figures")
    _add_channel_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--k", type=int, help="with --w, also report the code rate and headroom")
    p.add_argument("--w", type=int)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("encode", help="encode a k x w .bits matrix")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--n", type=int)
    _add_code_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("channel", help="pass a .bits matrix through the outer channel")
    p.add_argument("--in", dest="inp", required=True)
    _add_channel_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("decode", help="decode a .rx matrix")
    p.add_argument("--in", dest="inp", required=True)
    _add_code_args(p)
    _add_channel_args(p)
    p.add_argument("--scheme", choices=("independent", "joint-strict", "joint-skip"), default="joint-strict")
    p.add_argument("--decoder", choices=("bp", "nearest"), default="bp")
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="frame-error-rate sweep to CSV")
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--code")
    p.add_argument("--lift")
    p.add_argument("--w")
    p.add_argument("--a")
    p.add_argument("--pc", help="one value or a comma list")
    p.add_argument("--pe")
    p.add_argument("--ps")
    p.add_argument("--schemes")
    p.add_argument("--min-frame-errors")
    p.add_argument("--max-trials")
    p.add_argument("--seed")
    p.add_argument("--workers")
    p.add_argument("--stop-when", choices=("all", "any"))
    p.add_argument("--decoder", choices=("bp", "nearest"))
    p.add_argument("--max-iter")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle-check", help="run a brute-force self-check suite")
    p.add_argument("--suite", choices=sorted(checks.SUITES), required=True)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage error or --help
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return args.func(args)
    except (OuterChannelError, ValueError, OSError) as exc:
        print(f"dnaouter: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
