"""Incremental-redundancy HARQ by doubling the polar encoding tree.

A failed length-N transmission is followed by N extra code bits from the
length-2N extension of the same code.  Data bits whose right-half channels
rank below unused left-half channels move to those new positions; the
displaced leaves become pc-frozen and repeat their partner's value during
encoding, so the right half of the extended leaf vector stays exactly the
first transmission.  Only x_left = enc(u_left ^ u_right) is sent in round
two, and the receiver decodes [tx2_llrs, tx1_llrs] over the extended tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    BitKind,
    CapacityError,
    CodeSpec,
    ConfigError,
    InvalidLengthError,
    ProtocolError,
    polar_encode,
)
from .crc import crc_attach, crc_check
from .fastsc import FastScDecoder
from .nodes import NodeClass

__all__ = [
    "ExtendedSpec",
    "extend_bit_types",
    "base_leaf_vector",
    "extended_leaf_vector",
    "encode_tx1",
    "encode_tx2",
    "assemble_llrs",
    "extract_info_bits",
    "SessionStatus",
    "SessionResult",
    "HarqSession",
]


@dataclass(frozen=True, eq=False)
class ExtendedSpec:
    """A base code and its doubled extension, plus the info-bit swap map.

    ``swap_map`` pairs (new left info position, displaced right position);
    the displaced leaf is pc-frozen in ``extended`` with the new position as
    its partner.
    """

    base: CodeSpec
    extended: CodeSpec
    swap_map: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        n = self.base.n
        if self.extended.n != 2 * n:
            raise InvalidLengthError("extended length must be twice the base length")
        if self.extended.k != self.base.k:
            raise ConfigError("extension must preserve the information-bit count")
        for new_pos, displaced in self.swap_map:
            if not (0 <= new_pos < n <= displaced < 2 * n):
                raise ConfigError(f"swap ({new_pos}, {displaced}) crosses the wrong half")
            if self.extended.kinds[new_pos] != BitKind.INFO:
                raise ConfigError(f"swap target {new_pos} is not Info in the extension")
            if self.extended.kinds[displaced] != BitKind.PC_FROZEN:
                raise ConfigError(f"displaced leaf {displaced} is not pc-frozen")
            if int(self.extended.partners[displaced]) != new_pos:
                raise ConfigError(f"displaced leaf {displaced} does not point to {new_pos}")

    def to_json_dict(self) -> dict:
        return {
            "base": self.base.to_json_dict(),
            "extended": self.extended.to_json_dict(),
            "swap_map": [list(pair) for pair in self.swap_map],
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "ExtendedSpec":
        try:
            base = CodeSpec.from_json_dict(doc["base"])
            extended = CodeSpec.from_json_dict(doc["extended"])
            swap_map = tuple((int(a), int(b)) for a, b in doc["swap_map"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed extended spec document: {exc}") from exc
        return ExtendedSpec(base=base, extended=extended, swap_map=swap_map)


def extend_bit_types(base: CodeSpec, reliability_2n: np.ndarray) -> ExtendedSpec:
    """Double a code, moving data bits onto better new channels greedily.

    While the most reliable unused left-half channel beats the least
    reliable still-active right-half Info channel (strictly, under
    ``reliability_2n``), the new channel becomes Info and the displaced leaf
    becomes pc-frozen with the new position as partner.
    """
    if np.any(base.kinds == BitKind.PC_FROZEN):
        raise ConfigError("cannot extend a spec that already contains pc-frozen leaves")
    n = base.n
    reliability_2n = np.asarray(reliability_2n, dtype=np.int64)
    if reliability_2n.shape != (2 * n,) or not np.array_equal(
        np.sort(reliability_2n), np.arange(2 * n)
    ):
        raise ConfigError("reliability_2n must be a permutation of range(2n)")
    score = np.empty(2 * n, dtype=np.int64)
    score[reliability_2n] = np.arange(2 * n)

    kinds = np.full(2 * n, BitKind.FROZEN, dtype=np.int8)
    kinds[n:] = base.kinds
    partners = np.full(2 * n, -1, dtype=np.int64)

    lefts = np.arange(n)[np.argsort(score[:n], kind="stable")][::-1]
    actives = (n + base.info_positions)[np.argsort(score[n + base.info_positions], kind="stable")]
    swaps: list[tuple[int, int]] = []
    for new_pos, displaced in zip(lefts, actives):
        if score[new_pos] <= score[displaced]:
            break
        kinds[new_pos] = BitKind.INFO
        kinds[displaced] = BitKind.PC_FROZEN
        partners[displaced] = new_pos
        swaps.append((int(new_pos), int(displaced)))

    extended = CodeSpec(
        n=2 * n,
        k=base.k,
        crc_len=base.crc_len,
        kinds=kinds,
        partners=partners,
        reliability=reliability_2n,
        design_snr_db=base.design_snr_db,
    )
    return ExtendedSpec(base=base, extended=extended, swap_map=tuple(swaps))


def base_leaf_vector(data, base: CodeSpec) -> np.ndarray:
    """Leaf vector of the base code: CRC-attached data on the Info leaves
    in ascending index order, zeros elsewhere."""
    data = np.asarray(data, dtype=np.uint8)
    if data.size != base.data_len:
        raise CapacityError(f"expected {base.data_len} data bits for this spec, got {data.size}")
    frame = crc_attach(data, base.crc_len) if base.crc_len else data
    u = np.zeros(base.n, dtype=np.uint8)
    u[base.info_positions] = frame
    return u


def extended_leaf_vector(data, ext: ExtendedSpec) -> np.ndarray:
    """Length-2N leaf vector: right half is the first transmission's leaves,
    left half carries the swapped copies on the new Info positions."""
    u_right = base_leaf_vector(data, ext.base)
    u_left = np.zeros(ext.base.n, dtype=np.uint8)
    for new_pos, displaced in ext.swap_map:
        u_left[new_pos] = u_right[displaced - ext.base.n]
    return np.concatenate([u_left, u_right])


def encode_tx1(data, base: CodeSpec) -> np.ndarray:
    """First transmission: the base codeword."""
    return polar_encode(base_leaf_vector(data, base))


def encode_tx2(data, ext: ExtendedSpec) -> np.ndarray:
    """Second transmission: the new half enc(u_left ^ u_right) only.

    The full extended codeword is [encode_tx2(...), encode_tx1(...)].
    """
    u = extended_leaf_vector(data, ext)
    n = ext.base.n
    return polar_encode(u[:n] ^ u[n:])


def assemble_llrs(tx1_llrs, tx2_llrs) -> np.ndarray:
    """Stack received LLRs for the extended decode: [tx2, tx1]."""
    tx1_llrs = np.asarray(tx1_llrs, dtype=np.float64)
    tx2_llrs = np.asarray(tx2_llrs, dtype=np.float64)
    if tx1_llrs.shape != tx2_llrs.shape or tx1_llrs.ndim != 1:
        raise InvalidLengthError("tx1/tx2 LLR blocks must be one-dimensional and equal length")
    return np.concatenate([tx2_llrs, tx1_llrs])


def extract_info_bits(u_hat: np.ndarray, base: CodeSpec, offset: int = 0) -> np.ndarray:
    """Read the CRC-attached frame off the base Info leaves at ``offset``."""
    return u_hat[offset + base.info_positions]


class SessionStatus(Enum):
    DECODED = "decoded"
    RETRANSMIT = "request_retransmission"
    FAILED = "failed"


@dataclass
class SessionResult:
    status: SessionStatus
    data: np.ndarray | None = None


class HarqSession:
    """Receiver side of one frame: decode tx1, optionally combine with tx2.

    States: awaiting_tx1 -> awaiting_tx2 -> done.  Events out of order raise
    ProtocolError.
    """

    def __init__(
        self,
        ext: ExtendedSpec,
        mode: str = "modified",
        classes: frozenset[NodeClass] | None = None,
    ) -> None:
        self._ext = ext
        self._round1 = FastScDecoder(ext.base, mode, classes)
        self._round2 = FastScDecoder(ext.extended, mode, classes)
        self._state = "awaiting_tx1"
        self._tx1_llrs: np.ndarray | None = None

    @classmethod
    def with_decoders(
        cls, ext: ExtendedSpec, round1: FastScDecoder, round2: FastScDecoder
    ) -> "HarqSession":
        """Build a session around existing decoders.

        Plan construction dominates session setup, so frame loops build the
        two decoders once and hand them to every session.
        """
        session = cls.__new__(cls)
        session._ext = ext
        session._round1 = round1
        session._round2 = round2
        session._state = "awaiting_tx1"
        session._tx1_llrs = None
        return session

    @property
    def state(self) -> str:
        return self._state

    def step(self, event: str, llrs) -> SessionResult:
        if event == "rx_tx1":
            return self.receive_tx1(llrs)
        if event == "rx_tx2":
            return self.receive_tx2(llrs)
        raise ProtocolError(f"unknown session event {event!r}")

    def receive_tx1(self, llrs) -> SessionResult:
        if self._state != "awaiting_tx1":
            raise ProtocolError(f"rx_tx1 in state {self._state}")
        base = self._ext.base
        llrs = np.asarray(llrs, dtype=np.float64)
        result = self._round1.decode(llrs)
        frame = extract_info_bits(result.u_hat, base)
        if base.crc_len and not crc_check(frame, base.crc_len):
            self._tx1_llrs = llrs
            self._state = "awaiting_tx2"
            return SessionResult(SessionStatus.RETRANSMIT)
        self._state = "done"
        return SessionResult(SessionStatus.DECODED, frame[: base.data_len])

    def receive_tx2(self, llrs) -> SessionResult:
        if self._state != "awaiting_tx2":
            raise ProtocolError(f"rx_tx2 in state {self._state}")
        base = self._ext.base
        combined = assemble_llrs(self._tx1_llrs, llrs)
        result = self._round2.decode(combined)
        frame = extract_info_bits(result.u_hat, base, offset=base.n)
        self._state = "done"
        if base.crc_len and not crc_check(frame, base.crc_len):
            return SessionResult(SessionStatus.FAILED)
        return SessionResult(SessionStatus.DECODED, frame[: base.data_len])
