"""Plain-text matrix files.

``.bits``: one row of ``0``/``1`` characters per line.
``.rx``: the same, except that a line holding only ``?`` is an erased slot.
Blank lines and lines starting with ``#`` are ignored in both.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .channel import ReceivedMatrix
from .errors import ParseError


def _lines(text: str):
    for num, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield num, line


def _parse_row(line: str, num: int) -> list[int]:
    if set(line) - {"0", "1"}:
        raise ParseError(f"expected only 0/1 characters, got {line!r}", num)
    return [int(c) for c in line]


def parse_bits(text: str) -> np.ndarray:
    rows = [_parse_row(line, num) for num, line in _lines(text)]
    if not rows:
        raise ParseError("no rows")
    width = len(rows[0])
    for (num, _), r in zip(_lines(text), rows):
        if len(r) != width:
            raise ParseError(f"row has {len(r)} bits, expected {width}", num)
    return np.array(rows, dtype=np.uint8)


def format_bits(M) -> str:
    M = np.asarray(M)
    return "".join("".join(map(str, row.tolist())) + "\n" for row in M)


def parse_rx(text: str, width: int | None = None) -> ReceivedMatrix:
    """Read a ``.rx`` file; ``width`` is needed only when every slot is erased."""
    rows: list[list[int] | None] = []
    for num, line in _lines(text):
        if line == "?":
            rows.append(None)
            continue
        r = _parse_row(line, num)
        if width is None:
            width = len(r)
        elif len(r) != width:
            raise ParseError(f"row has {len(r)} bits, expected {width}", num)
        rows.append(r)
    if not rows:
        raise ParseError("no slots")
    if width is None:
        raise ParseError("all slots erased and the row width is unknown")
    return ReceivedMatrix.from_rows(rows, width)


def format_rx(Z: ReceivedMatrix) -> str:
    return "".join("?\n" if r is None else "".join(map(str, r.tolist())) + "\n" for r in Z.rows())


def read_bits(path) -> np.ndarray:
    return parse_bits(Path(path).read_text())


def write_bits(path, M) -> None:
    Path(path).write_text(format_bits(M))


def read_rx(path, width: int | None = None) -> ReceivedMatrix:
    return parse_rx(Path(path).read_text(), width)


def write_rx(path, Z: ReceivedMatrix) -> None:
    Path(path).write_text(format_rx(Z))
