"""Polar codec library with pc-frozen-aware fast SC decoding and IR-HARQ
matrix extension, plus an AWGN/QPSK FER simulator and traversal profiler."""

from .channel import awgn, llr_demod, noise_variance, qpsk_modulate
from .core import (
    BitKind,
    BitType,
    CapacityError,
    CodeSpec,
    ConfigError,
    InvalidLengthError,
    PolarError,
    ProtocolError,
    SpecOrderingError,
    build_code_spec,
    construct_reliability,
    hard_decision,
    polar_encode,
)
from .crc import DEFAULT_CRC_LEN, DEFAULT_CRC_POLY, crc_attach, crc_check, crc_remainder
from .fastsc import (
    MINSUM_EXACT_CLASSES,
    SPECIAL_NODE_CLASSES,
    FastScDecoder,
    fast_sc_decode,
    profile_traversals,
)
from .harq import (
    ExtendedSpec,
    HarqSession,
    SessionResult,
    SessionStatus,
    assemble_llrs,
    base_leaf_vector,
    encode_tx1,
    encode_tx2,
    extend_bit_types,
    extended_leaf_vector,
    extract_info_bits,
)
from .nodes import NodeClass, classify
from .sc import PROFILE_COLUMNS, DecodeResult, TraversalProfile, f_minsum, g_update, sc_decode
from .simulator import (
    FerRecord,
    FrameSimulator,
    SimConfig,
    binomial_ci,
    run_fer,
    write_records_csv,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BitKind",
    "BitType",
    "CodeSpec",
    "build_code_spec",
    "construct_reliability",
    "polar_encode",
    "hard_decision",
    "PolarError",
    "InvalidLengthError",
    "CapacityError",
    "SpecOrderingError",
    "ProtocolError",
    "ConfigError",
    "DEFAULT_CRC_LEN",
    "DEFAULT_CRC_POLY",
    "crc_attach",
    "crc_check",
    "crc_remainder",
    "PROFILE_COLUMNS",
    "DecodeResult",
    "TraversalProfile",
    "sc_decode",
    "f_minsum",
    "g_update",
    "NodeClass",
    "classify",
    "SPECIAL_NODE_CLASSES",
    "MINSUM_EXACT_CLASSES",
    "FastScDecoder",
    "fast_sc_decode",
    "profile_traversals",
    "ExtendedSpec",
    "extend_bit_types",
    "base_leaf_vector",
    "extended_leaf_vector",
    "encode_tx1",
    "encode_tx2",
    "assemble_llrs",
    "extract_info_bits",
    "HarqSession",
    "SessionStatus",
    "SessionResult",
    "noise_variance",
    "qpsk_modulate",
    "awgn",
    "llr_demod",
    "SimConfig",
    "FerRecord",
    "FrameSimulator",
    "run_fer",
    "binomial_ci",
    "write_records_csv",
]
