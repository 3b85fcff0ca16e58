"""Capacity of the shuffled row channel against the rate of the 1296-row QC-LDPC scheme.

Run:  python3 demos/capacity_table.py
"""

from dnaouter.params import beta, code_rate, duplicate_row_bound, outer_capacity

N, K, W, L = 1296, 1080, 89, 100


def main():
    b = beta(N, L)
    rate = code_rate(N, K, W, L)
    print(f"n={N}, l={L}: beta = {b:.4f}; scheme rate = {rate:.4f}")
    print(f"{'p_c':>6} {'capacity':>9} {'headroom':>9} {'P(dup rows) <=':>15}")
    for p_c in (0.80, 0.85, 0.90, 0.94, 0.97, 1.00):
        C = outer_capacity(p_c, b)
        dup = duplicate_row_bound(N, L, p_c, 1.0 - p_c)
        print(f"{p_c:6.2f} {C:9.4f} {C - rate:+9.4f} {dup:15.2e}")


if __name__ == "__main__":
    main()
