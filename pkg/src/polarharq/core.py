"""Core polar-code types, the polar transform, and reliability construction.

Bit ordering is natural (no bit reversal): encoding a leaf vector u of
length n = 2^m gives x = [enc(u_left ^ u_right), enc(u_right)], which equals
u @ F^{(x)m} over GF(2) with F = [[1, 0], [1, 1]].  The transform is an
involution, so the same routine also maps codewords back to leaf vectors.

LLR sign convention throughout the package: llr >= 0 decides bit 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property

import numpy as np

__all__ = [
    "DEFAULT_DESIGN_SNR_DB",
    "PolarError",
    "InvalidLengthError",
    "CapacityError",
    "SpecOrderingError",
    "ProtocolError",
    "ConfigError",
    "BitKind",
    "BitType",
    "CodeSpec",
    "hard_decision",
    "polar_encode",
    "construct_reliability",
    "build_code_spec",
]

DEFAULT_DESIGN_SNR_DB = 2.0


class PolarError(Exception):
    """Base class for errors raised by this package."""


class InvalidLengthError(PolarError):
    """Block length is not a power of two (or otherwise unusable)."""


class CapacityError(PolarError):
    """Requested payload does not fit the block."""


class SpecOrderingError(PolarError):
    """A pc-frozen bit refers to a partner that is not decoded yet."""


class ProtocolError(PolarError):
    """A HARQ session event arrived in an invalid state."""


class ConfigError(PolarError):
    """Malformed configuration or spec file."""


class BitKind(IntEnum):
    FROZEN = 0
    INFO = 1
    PC_FROZEN = 2


_KIND_NAMES = {BitKind.FROZEN: "frozen", BitKind.INFO: "info", BitKind.PC_FROZEN: "pc_frozen"}
_KIND_FROM_NAME = {name: kind for kind, name in _KIND_NAMES.items()}


@dataclass(frozen=True)
class BitType:
    """Leaf classification; ``partner`` is set only for pc-frozen leaves."""

    kind: BitKind
    partner: int | None = None


def _require_power_of_two(n: int) -> None:
    if n < 1 or n & (n - 1):
        raise InvalidLengthError(f"length must be a power of two, got {n}")


def hard_decision(llrs: np.ndarray) -> np.ndarray:
    """Map LLRs to bits: llr >= 0 (including exact zero) decides 0."""
    return (np.asarray(llrs) < 0).astype(np.uint8)


def polar_encode(bits) -> np.ndarray:
    """Apply the polar transform x = u @ F^{(x)m} in natural bit order.

    Self-inverse over GF(2): polar_encode(polar_encode(u)) == u.
    """
    x = np.array(bits, dtype=np.uint8)
    if x.ndim != 1:
        raise InvalidLengthError("expected a one-dimensional bit vector")
    _require_power_of_two(x.size)
    half = 1
    while half < x.size:
        blocks = x.reshape(-1, 2 * half)
        blocks[:, :half] ^= blocks[:, half:]
        half *= 2
    return x


# Gaussian-approximation density evolution.  phi() is the standard two-piece
# approximation of E[tanh(L/2)] for L ~ N(m, 2m); the check-node (upper/f)
# branch update is phi_inv(1 - (1 - phi(m))^2), the variable-node (lower/g)
# branch doubles the mean.

_PHI_A = 0.4527
_PHI_B = 0.86
_PHI_C = 0.0218
_PHI_SPLIT = 10.0
_PHI_AT_SPLIT = math.exp(-_PHI_A * _PHI_SPLIT**_PHI_B + _PHI_C)


def _phi(x: float) -> float:
    if x <= 0.0:
        return 1.0
    if x <= _PHI_SPLIT:
        return math.exp(-_PHI_A * x**_PHI_B + _PHI_C)
    arg = -0.25 * x + 0.5 * math.log(math.pi / x)
    if arg < -700.0:
        return 0.0
    return math.exp(arg) * (1.0 - 10.0 / (7.0 * x))


def _phi_inv(y: float) -> float:
    if y >= 1.0:
        return 0.0
    if y >= _PHI_AT_SPLIT:
        return ((_PHI_C - math.log(y)) / _PHI_A) ** (1.0 / _PHI_B)
    lo, hi = _PHI_SPLIT, _PHI_SPLIT
    while _phi(hi) > y:
        hi *= 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _phi(mid) > y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


_LOG4 = 4.0 * math.log(2.0)


def _check_update(m: float) -> float:
    t = _phi(m)
    if t < 1e-305:
        # phi underflows; solve the x > 10 branch in the log domain where
        # 1 - (1 - t)^2 ~ 2t, giving y = m - 4 ln 2 + 2 ln(m / y).
        y = m - _LOG4
        for _ in range(3):
            y = m - _LOG4 + 2.0 * math.log(m / y)
        return y
    return _phi_inv(1.0 - (1.0 - t) ** 2)


_reliability_cache: dict[tuple[int, float], np.ndarray] = {}


def construct_reliability(n: int, design_snr_db: float = DEFAULT_DESIGN_SNR_DB) -> np.ndarray:
    """Rank the n bit channels by density-evolution Gaussian approximation.

    The design channel is binary-input AWGN at the given SNR per code bit,
    so the channel LLR mean is 4 * 10^(snr/10).  Returns a permutation of
    range(n) ordered least reliable first; ties (if any) break by index, so
    the result is deterministic.
    """
    _require_power_of_two(n)
    if n < 2:
        raise InvalidLengthError(f"length must be a power of two >= 2, got {n}")
    key = (n, float(design_snr_db))
    cached = _reliability_cache.get(key)
    if cached is None:
        means = np.array([4.0 * 10.0 ** (design_snr_db / 10.0)])
        while means.size < n:
            nxt = np.empty(2 * means.size)
            nxt[0::2] = [_check_update(m) for m in means]
            nxt[1::2] = 2.0 * means
            means = nxt
        cached = np.argsort(means, kind="stable")
        _reliability_cache[key] = cached
    return cached.copy()


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """A polar code: block length, leaf classification, reliability order.

    ``k`` counts the Info leaves (payload plus CRC bits).  ``kinds`` holds a
    BitKind per leaf and ``partners`` the partner index for pc-frozen leaves
    (-1 elsewhere).  Instances are immutable; treat the arrays as read-only.
    """

    n: int
    k: int
    crc_len: int
    kinds: np.ndarray
    partners: np.ndarray
    reliability: np.ndarray
    design_snr_db: float = DEFAULT_DESIGN_SNR_DB

    def __post_init__(self) -> None:
        _require_power_of_two(self.n)
        if self.n < 2:
            raise InvalidLengthError(f"block length must be at least 2, got {self.n}")
        kinds = np.asarray(self.kinds, dtype=np.int8)
        partners = np.asarray(self.partners, dtype=np.int64)
        object.__setattr__(self, "kinds", kinds)
        object.__setattr__(self, "partners", partners)
        object.__setattr__(self, "reliability", np.asarray(self.reliability, dtype=np.int64))
        if kinds.shape != (self.n,) or partners.shape != (self.n,):
            raise ConfigError("bit-type arrays must have length n")
        if self.reliability.shape != (self.n,) or not np.array_equal(
            np.sort(self.reliability), np.arange(self.n)
        ):
            raise ConfigError("reliability must be a permutation of range(n)")
        if int(np.count_nonzero(kinds == BitKind.INFO)) != self.k:
            raise ConfigError("k must equal the number of Info leaves")
        if not 0 <= self.crc_len <= self.k:
            raise ConfigError("crc_len must lie in [0, k]")
        for idx in np.flatnonzero(kinds == BitKind.PC_FROZEN):
            p = int(partners[idx])
            if not 0 <= p < idx:
                raise SpecOrderingError(
                    f"pc-frozen leaf {idx} needs a partner decoded earlier, got {p}"
                )
            if kinds[p] != BitKind.INFO:
                raise ConfigError(f"partner {p} of pc-frozen leaf {idx} is not Info")
        if np.any(partners[kinds != BitKind.PC_FROZEN] != -1):
            raise ConfigError("only pc-frozen leaves may carry a partner")

    @cached_property
    def info_positions(self) -> np.ndarray:
        return np.flatnonzero(self.kinds == BitKind.INFO)

    @cached_property
    def frozen_like(self) -> np.ndarray:
        """True where the leaf is Frozen or PcFrozen (not Info)."""
        return self.kinds != BitKind.INFO

    @property
    def data_len(self) -> int:
        return self.k - self.crc_len

    def bit_types(self) -> list[BitType]:
        return [
            BitType(BitKind(int(kind)), int(p) if kind == BitKind.PC_FROZEN else None)
            for kind, p in zip(self.kinds, self.partners)
        ]

    def to_json_dict(self) -> dict:
        bit_types = []
        for bt in self.bit_types():
            entry: dict = {"kind": _KIND_NAMES[bt.kind]}
            if bt.partner is not None:
                entry["partner"] = bt.partner
            bit_types.append(entry)
        return {
            "n": self.n,
            "k": self.k,
            "crc_len": self.crc_len,
            "design_snr_db": self.design_snr_db,
            "bit_types": bit_types,
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "CodeSpec":
        try:
            n = int(doc["n"])
            k = int(doc["k"])
            crc_len = int(doc["crc_len"])
            design_snr_db = float(doc["design_snr_db"])
            entries = doc["bit_types"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed code spec document: {exc}") from exc
        if len(entries) != n:
            raise ConfigError("bit_types length does not match n")
        kinds = np.empty(n, dtype=np.int8)
        partners = np.full(n, -1, dtype=np.int64)
        for i, entry in enumerate(entries):
            kind = _KIND_FROM_NAME.get(entry.get("kind"))
            if kind is None:
                raise ConfigError(f"unknown bit kind at index {i}: {entry.get('kind')!r}")
            kinds[i] = kind
            if kind == BitKind.PC_FROZEN:
                if "partner" not in entry:
                    raise ConfigError(f"pc-frozen leaf {i} is missing its partner")
                partners[i] = int(entry["partner"])
        reliability = construct_reliability(n, design_snr_db)
        return CodeSpec(
            n=n,
            k=k,
            crc_len=crc_len,
            kinds=kinds,
            partners=partners,
            reliability=reliability,
            design_snr_db=design_snr_db,
        )


def build_code_spec(
    n: int,
    k: int,
    crc_len: int,
    reliability: np.ndarray,
    design_snr_db: float = DEFAULT_DESIGN_SNR_DB,
) -> CodeSpec:
    """Assign the k + crc_len most reliable leaves as Info, the rest Frozen.

    ``k`` is the payload size excluding CRC; the returned spec's ``k`` field
    counts all Info leaves (payload + CRC).
    """
    _require_power_of_two(n)
    reliability = np.asarray(reliability, dtype=np.int64)
    if reliability.shape != (n,):
        raise ConfigError("reliability length does not match n")
    total_info = k + crc_len
    if k < 0 or crc_len < 0 or total_info < 1:
        raise CapacityError(f"need at least one information bit, got k={k} crc={crc_len}")
    if total_info > n:
        raise CapacityError(f"k + crc_len = {total_info} exceeds block length {n}")
    kinds = np.full(n, BitKind.FROZEN, dtype=np.int8)
    kinds[reliability[n - total_info :]] = BitKind.INFO
    return CodeSpec(
        n=n,
        k=total_info,
        crc_len=crc_len,
        kinds=kinds,
        partners=np.full(n, -1, dtype=np.int64),
        reliability=reliability,
        design_snr_db=design_snr_db,
    )
