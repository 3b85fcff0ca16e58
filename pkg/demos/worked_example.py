"""Walk the (6, 2) toy code through encoding, one noisy read-out and both decoders.

Run:  python3 demos/worked_example.py
"""

import numpy as np

from dnaouter import CodeConfig, ChannelParams
from dnaouter.fixtures import EXAMPLE_H, EXAMPLE_U, example_received
from dnaouter.formats import format_bits, format_rx
from dnaouter.oracle import NearestCodewordDecoder
from dnaouter.outer import (
    hard_info,
    independent_decode,
    joint_decode,
    outer_encode,
    reliability_distances,
    reliability_order,
    slot_addresses,
)


def show(title, text):
    print(f"--- {title}")
    print(text.rstrip())


def trits(M):
    return "".join("".join("?" if v < 0 else str(v) for v in row) + "\n" for row in M)


def main():
    cfg = CodeConfig.from_parity_check(EXAMPLE_H, w=4, a=3)
    params = ChannelParams(0.8, 0.1, 0.1, cfg.l)
    print(f"code: n={cfg.n} k={cfg.k}, rows carry w={cfg.w} data bits and a={cfg.a} address bits")

    X = outer_encode(EXAMPLE_U, cfg.encoder, cfg.n, cfg.a)
    show("source U", format_bits(EXAMPLE_U))
    show("encoded X (data | address)", format_bits(X))

    # row 1 lands on address 2 and row 3 has its data hit; no shuffle, for readability
    Z = example_received()
    show("received Z", format_rx(Z))
    show("majority vote per address (? = tie or nothing received)", trits(hard_info(Z, cfg.n, cfg.w, cfg.a)))

    dec = NearestCodewordDecoder(cfg.encoder)
    vt, ind = independent_decode(Z, params, cfg, dec)
    show("column-by-column estimate", trits(vt))
    print(f"independent decoding: {'recovered' if ind.recovered else 'failed'} ({ind.reason or 'ok'})")

    d = reliability_distances(Z, vt, cfg.n, cfg.w, cfg.a)
    order = reliability_order(d, slot_addresses(Z, cfg.n, cfg.w, cfg.a) >= 0)
    print(f"distance of each received row to the estimate: {d.tolist()}")
    print(f"rows in order of trust (1-based): {(order + 1).tolist()}")

    out = joint_decode(Z, params, cfg, dec, independent=(vt, ind))
    print(f"joint decoding: recovered={out.recovered} after trusting {out.n_used} rows")
    assert np.array_equal(out.U, EXAMPLE_U)
    show("recovered U", format_bits(out.U))


if __name__ == "__main__":
    main()
