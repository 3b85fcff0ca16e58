"""Binary linear algebra: packed matrices, rank, and an incremental erasure solver.

Two solvers live here and are deliberately independent:

* :class:`PinnedSystem` tracks the solution space of ``H v = 0`` as positions
  get pinned one by one.  It keeps a basis of the still-free part of the code
  (a shrinking kernel basis) plus one particular solution, so each pin costs a
  single elimination step and the status is always current.
* :func:`inactivation_solve` is a one-shot structured Gaussian elimination
  (peel degree-one checks, inactivate when stuck, dense solve on the core).
  ``PinnedSystem.solve`` uses it to produce the final answer.
"""

from __future__ import annotations

import enum
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConflictingPin, DimensionMismatch, Inconsistent, NotUnique


class Status(enum.Enum):
    UNDERDETERMINED = "underdetermined"
    UNIQUE = "unique-consistent"
    INCONSISTENT = "inconsistent"


class BitMatrix:
    """Immutable dense binary matrix stored eight bits per byte, row-major."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray):
        data = np.ascontiguousarray(data, dtype=np.uint8)
        if data.shape != (rows, (cols + 7) // 8):
            raise DimensionMismatch(f"packed data shape {data.shape} does not fit {rows}x{cols}")
        data.setflags(write=False)
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def from_dense(cls, dense) -> BitMatrix:
        arr = np.asarray(dense, dtype=np.uint8)
        if arr.ndim != 2:
            raise DimensionMismatch("expected a 2-D array")
        if arr.size and arr.max() > 1:
            raise ValueError("entries must be 0 or 1")
        return cls(arr.shape[0], arr.shape[1], np.packbits(arr, axis=1, bitorder="little"))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols, np.zeros((rows, (cols + 7) // 8), dtype=np.uint8))

    @classmethod
    def identity(cls, size: int) -> BitMatrix:
        return cls.from_dense(np.eye(size, dtype=np.uint8))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        return np.unpackbits(self.data, axis=1, count=self.cols, bitorder="little")

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(idx)
        return int(self.data[i, j >> 3] >> (j & 7)) & 1

    def row_ints(self) -> list[int]:
        """Rows as Python integers, bit ``j`` holding column ``j``."""
        return [int.from_bytes(r.tobytes(), "little") for r in self.data]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.rows, self.cols, self.data.tobytes()))

    def __repr__(self):
        return f"BitMatrix({self.rows}x{self.cols})"


class SparseBinMatrix:
    """Binary matrix as per-row sorted column index arrays."""

    def __init__(self, rows: int, cols: int, row_indices: Iterable[Sequence[int]]):
        idx = tuple(np.asarray(sorted(r), dtype=np.int64) for r in row_indices)
        if len(idx) != rows:
            raise DimensionMismatch(f"got {len(idx)} index lists for {rows} rows")
        for r, ix in enumerate(idx):
            if ix.size and (ix[0] < 0 or ix[-1] >= cols):
                raise IndexError(f"row {r} has a column index outside [0, {cols})")
            if ix.size > 1 and np.any(np.diff(ix) == 0):
                raise ValueError(f"row {r} repeats a column index")
            ix.setflags(write=False)
        self.rows = rows
        self.cols = cols
        self.row_indices = idx

    @classmethod
    def from_dense(cls, dense) -> SparseBinMatrix:
        arr = np.asarray(dense)
        if isinstance(dense, BitMatrix):
            arr = dense.to_dense()
        if arr.ndim != 2:
            raise DimensionMismatch("expected a 2-D array")
        return cls(arr.shape[0], arr.shape[1], [np.flatnonzero(row) for row in arr])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @cached_property
    def col_indices(self) -> tuple[np.ndarray, ...]:
        cols: list[list[int]] = [[] for _ in range(self.cols)]
        for r, ix in enumerate(self.row_indices):
            for c in ix:
                cols[c].append(r)
        return tuple(np.asarray(c, dtype=np.int64) for c in cols)

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """``(check, variable)`` index arrays, one entry per nonzero, row-major."""
        if not self.row_indices:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        chk = np.repeat(np.arange(self.rows), [len(r) for r in self.row_indices])
        var = np.concatenate(self.row_indices) if self.rows else np.zeros(0, np.int64)
        return chk, var.astype(np.int64)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.row_indices)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for r, ix in enumerate(self.row_indices):
            out[r, ix] = 1
        return out

    def to_bitmatrix(self) -> BitMatrix:
        return BitMatrix.from_dense(self.to_dense())

    def row_ints(self) -> list[int]:
        out = []
        for ix in self.row_indices:
            v = 0
            for c in ix:
                v |= 1 << int(c)
            out.append(v)
        return out

    def syndrome(self, v) -> np.ndarray:
        """``H v mod 2`` for a vector ``(n,)`` or a stack of columns ``(n, m)``."""
        v = np.asarray(v, dtype=np.uint8)
        if v.shape[0] != self.cols:
            raise DimensionMismatch(f"vector has length {v.shape[0]}, H has {self.cols} columns")
        chk, var = self.edges
        out = np.zeros((self.rows,) + v.shape[1:], dtype=np.uint8)
        np.bitwise_xor.at(out, chk, v[var])
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseBinMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            np.array_equal(a, b) for a, b in zip(self.row_indices, other.row_indices)
        )

    def __repr__(self):
        return f"SparseBinMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


def _as_row_ints(M) -> tuple[list[int], int]:
    if isinstance(M, (BitMatrix, SparseBinMatrix)):
        return M.row_ints(), M.cols
    arr = np.asarray(M, dtype=np.uint8)
    if arr.ndim != 2:
        raise DimensionMismatch("expected a 2-D matrix")
    return BitMatrix.from_dense(arr).row_ints(), arr.shape[1]


def rank(M) -> int:
    """GF(2) rank of a :class:`BitMatrix`, :class:`SparseBinMatrix` or 0/1 array."""
    rows, _ = _as_row_ints(M)
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in basis:
                r ^= basis[top]
            else:
                basis[top] = r
                break
    return len(basis)


@dataclass(frozen=True)
class SystematicForm:
    """Row-reduced view of ``H`` with pivots chosen from the right.

    ``pivot_cols[i]`` equals the XOR of ``v`` over ``parity_map[i]`` (a set of
    free columns) for every ``v`` with ``H v = 0``.
    """

    n: int
    pivot_cols: tuple[int, ...]
    free_cols: tuple[int, ...]
    parity_map: np.ndarray  # (len(pivot_cols), len(free_cols)) uint8


def systematic_form(H) -> SystematicForm:
    rows, n = _as_row_ints(H)
    rows = [r for r in rows if r]
    pivots: list[int] = []
    done = 0
    for col in range(n - 1, -1, -1):
        bit = 1 << col
        hit = next((i for i in range(done, len(rows)) if rows[i] & bit), None)
        if hit is None:
            continue
        rows[done], rows[hit] = rows[hit], rows[done]
        piv = rows[done]
        for i in range(len(rows)):
            if i != done and rows[i] & bit:
                rows[i] ^= piv
        pivots.append(col)
        done += 1
        if done == len(rows):
            break
    pivot_set = set(pivots)
    free = tuple(c for c in range(n) if c not in pivot_set)
    free_pos = {c: i for i, c in enumerate(free)}
    pmap = np.zeros((len(pivots), len(free)), dtype=np.uint8)
    for i, r in enumerate(rows[:done]):
        r ^= 1 << pivots[i]
        while r:
            low = r & -r
            pmap[i, free_pos[low.bit_length() - 1]] = 1
            r ^= low
    return SystematicForm(n=n, pivot_cols=tuple(pivots), free_cols=free, parity_map=pmap)


def kernel_basis(H) -> np.ndarray:
    """Dense ``(n - rank, n)`` basis of ``{v : H v = 0}``, one row per free column."""
    form = systematic_form(H)
    basis = np.zeros((len(form.free_cols), form.n), dtype=np.uint8)
    basis[np.arange(len(form.free_cols)), list(form.free_cols)] = 1
    if form.pivot_cols:
        basis[:, list(form.pivot_cols)] = form.parity_map.T
    return basis


def _pack64(dense: np.ndarray) -> np.ndarray:
    dense = np.atleast_2d(np.asarray(dense, dtype=np.uint8))
    n = dense.shape[1]
    words = max(1, (n + 63) // 64)
    padded = np.zeros((dense.shape[0], words * 64), dtype=np.uint8)
    padded[:, :n] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view("<u8").astype(np.uint64)


def _unpack64(packed: np.ndarray, n: int) -> np.ndarray:
    raw = np.ascontiguousarray(packed.astype("<u8")).view(np.uint8)
    return np.unpackbits(raw, axis=1, count=n, bitorder="little")


class PinnedSystem:
    """Incremental solver for ``H v = 0`` with some entries of ``v`` pinned.

    Every pin fixes one position in all ``rhs_count`` right-hand-side columns at
    once, so the free/pinned pattern (and therefore uniqueness) is shared by all
    columns.

    Parameters
    ----------
    H : SparseBinMatrix
        Parity-check matrix with ``n`` columns.
    rhs_count : int
        Number of independent columns solved side by side.
    kernel : ndarray, optional
        Precomputed :func:`kernel_basis` of ``H``; pass it when building many
        systems over the same code.
    """

    def __init__(self, H: SparseBinMatrix, rhs_count: int, kernel: np.ndarray | None = None):
        self.H = H
        self.n = H.cols
        self.rhs_count = rhs_count
        if kernel is None:
            kernel = kernel_basis(H)
        self._basis = _pack64(kernel) if len(kernel) else np.zeros((0, max(1, (self.n + 63) // 64)), np.uint64)
        self._dim = len(kernel)
        self._x = np.zeros((rhs_count, self._basis.shape[1]), dtype=np.uint64)
        self._inconsistent = False
        self.pinned: dict[int, np.ndarray] = {}

    @property
    def free_dimension(self) -> int:
        """Dimension of the remaining solution space (per column)."""
        return self._dim

    @property
    def status(self) -> Status:
        if self._inconsistent:
            return Status.INCONSISTENT
        return Status.UNIQUE if self._dim == 0 else Status.UNDERDETERMINED

    @property
    def unknown_set(self) -> set[int]:
        return set(range(self.n)) - set(self.pinned)

    def _coerce(self, values) -> np.ndarray:
        vals = np.asarray(values, dtype=np.uint8).reshape(-1)
        if vals.size != self.rhs_count:
            raise DimensionMismatch(f"expected {self.rhs_count} values, got {vals.size}")
        return vals & 1

    def _bits_at(self, rows: np.ndarray, position: int) -> np.ndarray:
        word, shift = divmod(position, 64)
        return ((rows[:, word] >> np.uint64(shift)) & np.uint64(1)).astype(np.uint8)

    def implied(self, position: int) -> np.ndarray | None:
        """Values forced at ``position`` by the current pins, or ``None`` if still free."""
        if position in self.pinned:
            return self.pinned[position].copy()
        if self._dim and self._bits_at(self._basis[: self._dim], position).any():
            return None
        return self._bits_at(self._x, position)

    def would_conflict(self, position: int, values) -> bool:
        forced = self.implied(position)
        return forced is not None and not np.array_equal(forced, self._coerce(values))

    def pin(self, position: int, values) -> Status:
        if not 0 <= position < self.n:
            raise IndexError(position)
        vals = self._coerce(values)
        if position in self.pinned:
            if not np.array_equal(self.pinned[position], vals):
                raise ConflictingPin(position)
            return self.status
        self.pinned[position] = vals
        d = self._dim
        hits = np.flatnonzero(self._bits_at(self._basis[:d], position)) if d else np.zeros(0, int)
        current = self._bits_at(self._x, position)
        if hits.size:
            piv = hits[0]
            g = self._basis[piv].copy()
            if hits.size > 1:
                self._basis[hits[1:]] ^= g
            flip = np.flatnonzero(current != vals)
            if flip.size:
                self._x[flip] ^= g
            self._basis[piv] = self._basis[d - 1]
            self._dim = d - 1
        elif np.any(current != vals):
            self._inconsistent = True
        return self.status

    def particular_solution(self) -> np.ndarray:
        """One solution ``(n, rhs_count)`` consistent with every pin so far."""
        if self._inconsistent:
            raise Inconsistent("pins contradict the parity checks")
        return _unpack64(self._x, self.n).T.copy()

    def solve(self) -> np.ndarray:
        """The unique ``(n, rhs_count)`` solution, computed by inactivation decoding."""
        if self._inconsistent:
            raise Inconsistent("pins contradict the parity checks")
        if self._dim:
            raise NotUnique(f"{self._dim} degrees of freedom remain")
        known = np.zeros(self.n, dtype=bool)
        values = np.zeros((self.n, self.rhs_count), dtype=np.uint8)
        for p, v in self.pinned.items():
            known[p] = True
            values[p] = v
        status, sol = inactivation_solve(self.H, known, values)
        if status is not Status.UNIQUE:
            raise AssertionError(f"inactivation solver disagrees with pin tracking: {status}")
        if self.H.rows and self.H.syndrome(sol).any():
            raise AssertionError("solution violates a parity check")
        return sol


def inactivation_solve(H: SparseBinMatrix, known: np.ndarray, values: np.ndarray) -> tuple[Status, np.ndarray | None]:
    """Solve ``H v = 0`` given the entries of ``v`` flagged in ``known``.

    ``values`` is ``(n, m)``: ``m`` columns sharing the same known pattern.
    Returns the status and, when unique, the full ``(n, m)`` solution.
    """
    n = H.cols
    known = np.asarray(known, dtype=bool)
    values = np.asarray(values, dtype=np.uint8)
    if values.ndim == 1:
        values = values[:, None]
    if known.shape != (n,) or values.shape[0] != n:
        raise DimensionMismatch("known/values do not match H")
    m = values.shape[1]
    # a column vector of m bits is carried as one Python int
    weights = 1 << np.arange(m, dtype=object) if m else np.zeros(0, dtype=object)
    const_of = [int(np.dot(values[c].astype(object), weights)) if m else 0 for c in range(n)]

    row_const = [0] * H.rows
    row_sym = [0] * H.rows
    row_unknown: list[set[int]] = []
    for r, ix in enumerate(H.row_indices):
        unk = set()
        c_acc = 0
        for c in ix:
            c = int(c)
            if known[c]:
                c_acc ^= const_of[c]
            else:
                unk.add(c)
        row_const[r] = c_acc
        row_unknown.append(unk)
    var_rows: dict[int, set[int]] = {c: set() for c in range(n) if not known[c]}
    for r, unk in enumerate(row_unknown):
        for c in unk:
            var_rows[c].add(r)

    # resolved variable -> (constant, symbol mask) ; value = const ^ <mask, symbols>
    expr: dict[int, tuple[int, int]] = {}
    n_sym = 0
    used_rows: set[int] = set()
    degree_one = sorted(r for r, unk in enumerate(row_unknown) if len(unk) == 1)

    def settle(var: int, const: int, sym: int):
        expr[var] = (const, sym)
        for r in var_rows.pop(var):
            row_unknown[r].discard(var)
            row_const[r] ^= const
            row_sym[r] ^= sym
            if len(row_unknown[r]) == 1 and r not in used_rows:
                pending.append(r)

    pending = deque(degree_one)
    while var_rows:
        while pending:
            r = pending.popleft()
            if r in used_rows or len(row_unknown[r]) != 1:
                continue
            (var,) = row_unknown[r]
            used_rows.add(r)
            settle(var, row_const[r], row_sym[r])
        if var_rows:
            # stuck: inactivate the unknown touching the most open checks
            var = max(sorted(var_rows), key=lambda c: len(var_rows[c]))
            settle(var, 0, 1 << n_sym)
            n_sym += 1

    # remaining checks constrain the inactivated symbols
    basis: dict[int, tuple[int, int]] = {}
    consistent = True
    for r in range(H.rows):
        if r in used_rows:
            continue
        sym, const = row_sym[r], row_const[r]
        while sym:
            top = sym.bit_length() - 1
            if top in basis:
                bs, bc = basis[top]
                sym ^= bs
                const ^= bc
            else:
                basis[top] = (sym, const)
                break
        if not sym and const:
            consistent = False
    if not consistent:
        return Status.INCONSISTENT, None
    if len(basis) < n_sym:
        return Status.UNDERDETERMINED, None

    sym_val = [0] * n_sym
    for top in sorted(basis):
        sym, const = basis[top]
        rest = sym ^ (1 << top)
        acc = const
        while rest:
            low = rest & -rest
            acc ^= sym_val[low.bit_length() - 1]
            rest ^= low
        sym_val[top] = acc

    out = values.copy()
    out[~known] = 0
    for var, (const, sym) in expr.items():
        acc = const
        while sym:
            low = sym & -sym
            acc ^= sym_val[low.bit_length() - 1]
            sym ^= low
        out[var] = [(acc >> j) & 1 for j in range(m)]
    return Status.UNIQUE, out


def pinned_system_new(H: SparseBinMatrix, rhs_count: int) -> PinnedSystem:
    return PinnedSystem(H, rhs_count)
