"""The worked (6, 2) example used throughout the tests, docs and ``oracle-check``.

Unknown bits (``?``) are stored as ``-1``.
"""

import numpy as np

from .channel import ReceivedMatrix, apply_channel1

_ = -1

EXAMPLE_U = np.array(
    [
        [0, 0, 1, 1],
        [0, 1, 0, 1],
    ],
    dtype=np.uint8,
)

EXAMPLE_H = np.array(
    [
        [1, 0, 1, 0, 0, 0],
        [1, 1, 0, 1, 0, 0],
        [1, 1, 0, 0, 1, 0],
        [0, 1, 0, 0, 0, 1],
    ],
    dtype=np.uint8,
)

EXAMPLE_V = np.array(
    [
        [0, 0, 1, 1],
        [0, 1, 0, 1],
        [0, 0, 1, 1],
        [0, 1, 1, 0],
        [0, 1, 1, 0],
        [0, 1, 0, 1],
    ],
    dtype=np.uint8,
)

EXAMPLE_X = np.array(
    [
        [0, 0, 1, 1, 0, 0, 1],
        [0, 1, 0, 1, 0, 1, 0],
        [0, 0, 1, 1, 0, 1, 1],
        [0, 1, 1, 0, 1, 0, 0],
        [0, 1, 1, 0, 1, 0, 1],
        [0, 1, 0, 1, 1, 1, 0],
    ],
    dtype=np.uint8,
)

# channel-1 output: row 1 hit with its address moved to 2, row 3 hit in its data
EXAMPLE_Y = np.array(
    [
        [0, 0, 0, 0, 0, 1, 0],
        [0, 1, 0, 1, 0, 1, 0],
        [1, 1, 1, 1, 0, 1, 1],
        [0, 1, 1, 0, 1, 0, 0],
        [0, 1, 1, 0, 1, 0, 1],
        [0, 1, 0, 1, 1, 1, 0],
    ],
    dtype=np.uint8,
)

EXAMPLE_HARD = np.array(
    [
        [_, _, _, _],
        [0, _, 0, _],
        [1, 1, 1, 1],
        [0, 1, 1, 0],
        [0, 1, 1, 0],
        [0, 1, 0, 1],
    ],
    dtype=np.int8,
)

EXAMPLE_VTILDE = np.array(
    [
        [0, _, 1, 1],
        [0, _, 0, 1],
        [0, _, 1, 1],
        [0, _, 1, 0],
        [0, _, 1, 0],
        [0, _, 0, 1],
    ],
    dtype=np.int8,
)

# the two nearest codewords of the second hard-information column
EXAMPLE_TIED_CODEWORDS = (
    np.array([0, 1, 0, 1, 1, 1], dtype=np.uint8),
    np.array([1, 0, 1, 1, 1, 0], dtype=np.uint8),
)

EXAMPLE_DISTANCES = np.array([2, 1, 2, 1, 1, 1])
EXAMPLE_ORDER = np.array([1, 3, 4, 5, 0, 2])  # y2, y4, y5, y6, y1, y3 (0-based)
EXAMPLE_N_USED = 2

EXAMPLE_N, EXAMPLE_K, EXAMPLE_W, EXAMPLE_A = 6, 2, 4, 3


def example_received() -> ReceivedMatrix:
    """The example's channel output taken as ``Z`` (no shuffling)."""
    return apply_channel1(EXAMPLE_X, substitutions={0: EXAMPLE_Y[0], 2: EXAMPLE_Y[2]})

# two 4x2 matrices whose row sets share exactly {(0,0), (1,1)}
NOTATION_X = np.array([[0, 0], [0, 0], [1, 1], [0, 1]], dtype=np.uint8)
NOTATION_Y = np.array([[0, 0], [0, 0], [1, 1], [1, 1]], dtype=np.uint8)
