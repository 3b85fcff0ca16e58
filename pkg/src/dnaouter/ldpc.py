"""Parity-check matrix I/O, systematic encoding and sum-product decoding.

The column decoders in this module all share one calling convention so the
outer decoder can swap them freely: they take an ``(n, m)`` array of LLRs
(positive favours bit 0) and return ``(codewords, ok)`` where ``codewords`` is
``(n, m)`` uint8 and ``ok`` is a boolean mask over the ``m`` columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from . import gf2
from .errors import DegreeMismatch, DimensionMismatch, ParseError
from .gf2 import SparseBinMatrix

LLR_CLAMP = 40.0
_PHI_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class QcBase:
    """Quasi-cyclic base matrix: ``-1`` is a zero block, ``s >= 0`` a shifted identity."""

    entries: np.ndarray
    lift: int

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=np.int64)
        if ent.ndim != 2:
            raise ValueError("base matrix must be 2-D")
        if self.lift < 1:
            raise ValueError("lift must be positive")
        if np.any(ent < -1) or np.any(ent >= self.lift):
            raise ValueError(f"shift entries must lie in [-1, {self.lift})")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)

    @property
    def base_rows(self) -> int:
        return self.entries.shape[0]

    @property
    def base_cols(self) -> int:
        return self.entries.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, QcBase):
            return NotImplemented
        return self.lift == other.lift and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.lift, self.entries.tobytes(), self.entries.shape))

    def relift(self, lift: int) -> QcBase:
        return QcBase(self.entries, lift)


def parse_qc(text: str) -> QcBase:
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, toks) for no, toks in lines if toks and not toks[0].startswith("#")]
    if not lines:
        raise ParseError("empty QC base file", 1)
    no, head = lines[0]
    try:
        rows, cols, lift = (int(t) for t in head)
    except ValueError:
        raise ParseError("header must be 'rows cols lift'", no) from None
    body = lines[1:]
    if len(body) != rows:
        raise ParseError(f"expected {rows} matrix rows, found {len(body)}", no)
    ent = np.zeros((rows, cols), dtype=np.int64)
    for r, (no, toks) in enumerate(body):
        if len(toks) != cols:
            raise ParseError(f"expected {cols} entries, found {len(toks)}", no)
        try:
            ent[r] = [int(t) for t in toks]
        except ValueError:
            raise ParseError("non-integer entry", no) from None
        if np.any(ent[r] < -1) or np.any(ent[r] >= lift):
            raise ParseError(f"shift outside [-1, {lift})", no)
    return QcBase(ent, lift)


def format_qc(base: QcBase) -> str:
    out = [f"{base.base_rows} {base.base_cols} {base.lift}"]
    out += [" ".join(str(int(v)) for v in row) for row in base.entries]
    return "\n".join(out) + "\n"


def expand_qc(base: QcBase) -> SparseBinMatrix:
    """Replace each entry by its ``lift x lift`` circulant (ones at ``(r, (r+s) % lift)``)."""
    Z = base.lift
    rows = []
    for br in range(base.base_rows):
        for r in range(Z):
            cols = [bc * Z + (r + int(s)) % Z for bc, s in enumerate(base.entries[br]) if s >= 0]
            rows.append(cols)
    return SparseBinMatrix(base.base_rows * Z, base.base_cols * Z, rows)


def load_alist(text: str) -> SparseBinMatrix:
    """Parse MacKay's alist format (1-based indices, zero padding allowed)."""
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, toks) for no, toks in lines if toks]
    it = iter(lines)

    def ints(expected: int | None = None):
        try:
            no, toks = next(it)
        except StopIteration:
            raise ParseError("unexpected end of alist data", len(text.splitlines()) + 1) from None
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise ParseError("non-integer token", no) from None
        if expected is not None and len(vals) < expected:
            raise ParseError(f"expected {expected} integers, found {len(vals)}", no)
        return no, vals

    no, (n, m, *_) = ints(2)
    if n < 1 or m < 0:
        raise ParseError("bad dimensions", no)
    ints(2)
    no_cd, col_deg = ints(n)
    no_rd, row_deg = ints(m) if m else (no_cd, [])
    col_deg, row_deg = col_deg[:n], row_deg[:m]
    col_lists = []
    for c in range(n):
        no, vals = ints(col_deg[c])
        lst = vals[: col_deg[c]]
        if any(v < 1 or v > m for v in lst):
            raise ParseError(f"column {c + 1} has a row index outside 1..{m}", no)
        if any(v != 0 for v in vals[col_deg[c]:]):
            raise DegreeMismatch(f"column {c + 1} lists more entries than its degree", no)
        col_lists.append([v - 1 for v in lst])
    row_lists = []
    for r in range(m):
        no, vals = ints(row_deg[r])
        lst = vals[: row_deg[r]]
        if any(v < 1 or v > n for v in lst):
            raise ParseError(f"row {r + 1} has a column index outside 1..{n}", no)
        if any(v != 0 for v in vals[row_deg[r]:]):
            raise DegreeMismatch(f"row {r + 1} lists more entries than its degree", no)
        if len(set(lst)) != len(lst):
            raise ParseError(f"row {r + 1} repeats a column index", no)
        row_lists.append([v - 1 for v in lst])
    from_cols = {(r, c) for c, lst in enumerate(col_lists) for r in lst}
    from_rows = {(r, c) for r, lst in enumerate(row_lists) for c in lst}
    if from_cols != from_rows:
        raise DegreeMismatch("column lists and row lists describe different matrices")
    return SparseBinMatrix(m, n, row_lists)


def dump_alist(H: SparseBinMatrix) -> str:
    cols = H.col_indices
    col_deg = [len(c) for c in cols]
    row_deg = [len(r) for r in H.row_indices]
    max_c = max(col_deg, default=0)
    max_r = max(row_deg, default=0)
    out = [f"{H.cols} {H.rows}", f"{max_c} {max_r}", " ".join(map(str, col_deg)), " ".join(map(str, row_deg))]
    # pad every list to at least one entry so empty lists survive as a lone 0
    max_c, max_r = max(max_c, 1), max(max_r, 1)
    for c in cols:
        vals = [int(r) + 1 for r in c] + [0] * (max_c - len(c))
        out.append(" ".join(map(str, vals)))
    for r in H.row_indices:
        vals = [int(c) + 1 for c in r] + [0] * (max_r - len(r))
        out.append(" ".join(map(str, vals)))
    return "\n".join(out) + "\n"


def builtin_base(name: str = "ieee80211n_r56") -> QcBase:
    text = resources.files("dnaouter").joinpath(f"data/{name}.qc").read_text()
    return parse_qc(text)


BUILTIN_CODES = {
    "wifi-1296": ("ieee80211n_r56", 54),
    "wifi-2592": ("ieee80211n_r56", 108),
}


def load_code(spec: str, lift: int | None = None) -> SparseBinMatrix:
    """Resolve a code name (``wifi-1296``, ``wifi-2592``, ``toy``) or a file path.

    Files ending in ``.qc`` are QC base matrices (``lift`` overrides the file's
    lifting size); anything else is read as alist.
    """
    if spec == "toy":
        from .fixtures import EXAMPLE_H

        return SparseBinMatrix.from_dense(EXAMPLE_H)
    if spec in BUILTIN_CODES:
        name, z = BUILTIN_CODES[spec]
        base = builtin_base(name)
        return expand_qc(base.relift(lift or z))
    path = Path(spec)
    text = path.read_text()
    if path.suffix == ".qc":
        base = parse_qc(text)
        return expand_qc(base.relift(lift) if lift else base)
    return load_alist(text)


@dataclass(frozen=True)
class Encoder:
    """Systematic encoder: info bits sit at ``info_positions``, parity bits elsewhere."""

    H: SparseBinMatrix
    info_positions: tuple[int, ...]
    parity_positions: tuple[int, ...]
    parity_map: np.ndarray

    @property
    def n(self) -> int:
        return self.H.cols

    @property
    def k(self) -> int:
        return len(self.info_positions)

    def encode(self, info) -> np.ndarray:
        """Encode ``(k,)`` or ``(k, m)`` info bits into ``(n,)`` / ``(n, m)`` codewords."""
        u = np.asarray(info, dtype=np.uint8)
        if u.shape[0] != self.k:
            raise DimensionMismatch(f"expected {self.k} info bits per column, got {u.shape[0]}")
        out = np.zeros((self.n,) + u.shape[1:], dtype=np.uint8)
        out[list(self.info_positions)] = u
        if self.parity_positions:
            par = (self.parity_map.astype(np.int64) @ u.astype(np.int64)) & 1
            out[list(self.parity_positions)] = par
        return out

    def extract(self, codeword) -> np.ndarray:
        return np.asarray(codeword, dtype=np.uint8)[list(self.info_positions)]

    @cached_property
    def kernel(self) -> np.ndarray:
        """Generator rows (one per info position), i.e. a basis of the code."""
        basis = np.zeros((self.k, self.n), dtype=np.uint8)
        basis[np.arange(self.k), list(self.info_positions)] = 1
        if self.parity_positions:
            basis[:, list(self.parity_positions)] = self.parity_map.T
        return basis


def build_encoder(H: SparseBinMatrix) -> Encoder:
    form = gf2.systematic_form(H)
    return Encoder(H=H, info_positions=form.free_cols, parity_positions=form.pivot_cols, parity_map=form.parity_map)


def syndrome_check(H: SparseBinMatrix, bits) -> bool:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape[0] != H.cols:
        raise DimensionMismatch(f"got {bits.shape[0]} bits for {H.cols} columns")
    return not H.syndrome(bits).any()


def _phi(x: np.ndarray) -> np.ndarray:
    # -log(tanh(x/2)), its own inverse on (0, inf)
    x = np.clip(x, _PHI_FLOOR, LLR_CLAMP)
    return np.log1p(2.0 / np.expm1(x))


class BPDecoder:
    """Flooding sum-product decoder over a fixed parity-check matrix.

    Messages start at zero; every input LLR is clamped to ``+-40``.  Columns of a
    batch stop independently as soon as every posterior is nonzero and the hard
    decision has zero syndrome.
    """

    def __init__(self, H: SparseBinMatrix, max_iter: int = 100):
        self.H = H
        self.max_iter = max_iter
        chk, var = H.edges
        E = len(var)
        self._chk = chk
        self._var = var
        data = np.ones(E)
        self._chk_sum = sp.csr_matrix((data, (chk, np.arange(E))), shape=(H.rows, E))
        self._var_sum = sp.csr_matrix((data, (var, np.arange(E))), shape=(H.cols, E))

    def _syndrome_ok(self, hard: np.ndarray) -> np.ndarray:
        if self.H.rows == 0:
            return np.ones(hard.shape[1], dtype=bool)
        s = self._chk_sum @ hard[self._var].astype(np.float64)
        return ~np.any(np.rint(s).astype(np.int64) & 1, axis=0)

    def decode(self, llr) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Decode ``(n,)`` or ``(n, m)`` LLRs.

        Returns ``(bits, ok, iterations)``; ``bits`` of failed columns hold the
        last hard decision and must not be trusted.
        """
        llr = np.asarray(llr, dtype=np.float64)
        single = llr.ndim == 1
        if single:
            llr = llr[:, None]
        if llr.shape[0] != self.H.cols:
            raise DimensionMismatch(f"got {llr.shape[0]} LLRs for {self.H.cols} bits")
        llr = np.clip(llr, -LLR_CLAMP, LLR_CLAMP)
        m = llr.shape[1]
        bits = (llr < 0).astype(np.uint8)
        ok = np.zeros(m, dtype=bool)
        iters = np.full(m, self.max_iter, dtype=np.int64)

        active = np.arange(m)
        L = llr
        msg = np.zeros((len(self._var), m))
        post = L.copy()
        for it in range(1, self.max_iter + 1):
            v2c = post[self._var] - msg
            mag = _phi(np.abs(v2c))
            neg = v2c < 0
            tot_mag = self._chk_sum @ mag
            tot_neg = np.rint(self._chk_sum @ neg.astype(np.float64)).astype(np.int64)
            out_mag = _phi(np.maximum(tot_mag[self._chk] - mag, 0.0))
            out_neg = (tot_neg[self._chk] - neg) & 1
            # an exactly-zero input carries no information: silence the other edges
            zero = v2c == 0
            if zero.any():
                tot_zero = np.rint(self._chk_sum @ zero.astype(np.float64)).astype(np.int64)
                out_mag[(tot_zero[self._chk] - zero) > 0] = 0.0
            msg = np.where(out_neg == 1, -out_mag, out_mag)
            post = L + self._var_sum @ msg
            hard = (post < 0).astype(np.uint8)
            # a zero posterior is an undecided bit, not a 0
            done = self._syndrome_ok(hard) & np.all(post != 0, axis=0)
            if done.any():
                idx = active[done]
                bits[:, idx] = hard[:, done]
                ok[idx] = True
                iters[idx] = it
            if done.all():
                break
            keep = ~done
            if it == self.max_iter:
                bits[:, active[keep]] = hard[:, keep]
                break
            active = active[keep]
            L, msg, post = L[:, keep], msg[:, keep], post[:, keep]
        if single:
            return bits[:, 0], ok[:1], iters[:1]
        return bits, ok, iters

    def __call__(self, llr) -> tuple[np.ndarray, np.ndarray]:
        bits, ok, _ = self.decode(llr)
        return bits, ok


def bp_decode(H: SparseBinMatrix, llr, max_iter: int = 100) -> tuple[np.ndarray | None, int]:
    """Decode one column; returns ``(bits, iterations)`` or ``(None, max_iter)`` on failure."""
    bits, ok, iters = BPDecoder(H, max_iter).decode(np.asarray(llr, dtype=np.float64).reshape(-1))
    return (bits if ok[0] else None), int(iters[0])


def erasure_decode(H: SparseBinMatrix, column) -> np.ndarray | None:
    """Fill the ``-1`` (erased) entries of a column by inactivation decoding."""
    col = np.asarray(column)
    known = col >= 0
    status, sol = gf2.inactivation_solve(H, known, np.where(known, col, 0).astype(np.uint8))
    return sol[:, 0] if status is gf2.Status.UNIQUE else None
