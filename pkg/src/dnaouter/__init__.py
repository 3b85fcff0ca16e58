"""Coding for the outer channel of DNA storage: rows are erased or replaced, then shuffled.

Submodules: ``params`` (parameters, capacity), ``gf2`` (binary linear algebra),
``ldpc`` (codes, encoder, belief propagation), ``channel``, ``outer`` (encoder
and the independent/joint decoders), ``oracle`` (brute-force references),
``sim`` (frame-error-rate harness) and ``cli``.
"""

from .channel import ReceivedMatrix, transmit
from .errors import OuterChannelError
from .ldpc import BPDecoder, load_code
from .outer import DecodeOutcome, hard_info, independent_decode, joint_decode, outer_encode, soft_info
from .params import ChannelParams, CodeConfig

__version__ = "0.1.0"

__all__ = [
    "BPDecoder",
    "ChannelParams",
    "CodeConfig",
    "DecodeOutcome",
    "OuterChannelError",
    "ReceivedMatrix",
    "hard_info",
    "independent_decode",
    "joint_decode",
    "load_code",
    "outer_encode",
    "soft_info",
    "transmit",
]
