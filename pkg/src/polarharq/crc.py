"""Systematic CRC over bit vectors, byte-table driven, zero initial register.

The default generator is the 24-bit polynomial 0x864CFB.  crc_attach appends
the remainder of data(x) * x^len divided by the generator, so a frame passes
crc_check iff the polynomial it represents is divisible by the generator.
"""

from __future__ import annotations

import numpy as np

__all__ = ["DEFAULT_CRC_POLY", "DEFAULT_CRC_LEN", "crc_remainder", "crc_attach", "crc_check"]

DEFAULT_CRC_POLY = 0x864CFB
DEFAULT_CRC_LEN = 24

_table_cache: dict[tuple[int, int], list[int]] = {}


def _crc_table(poly: int, width: int) -> list[int]:
    key = (poly, width)
    table = _table_cache.get(key)
    if table is None:
        mask = (1 << width) - 1
        top = 1 << (width - 1)
        table = []
        for byte in range(256):
            reg = byte << (width - 8)
            for _ in range(8):
                reg = ((reg << 1) ^ poly) & mask if reg & top else (reg << 1) & mask
            table.append(reg)
        _table_cache[key] = table
    return table


def crc_remainder(bits, width: int = DEFAULT_CRC_LEN, poly: int = DEFAULT_CRC_POLY) -> int:
    """Remainder of bits(x) * x^width mod the generator, as an integer."""
    if width <= 0:
        return 0
    data = np.asarray(bits, dtype=np.uint8)
    mask = (1 << width) - 1
    reg = 0
    if width >= 8:
        table = _crc_table(poly, width)
        nbytes = data.size // 8
        for byte in np.packbits(data[: nbytes * 8]).tolist():
            reg = ((reg << 8) & mask) ^ table[((reg >> (width - 8)) ^ byte) & 0xFF]
        tail = data[nbytes * 8 :]
    else:
        tail = data
    for bit in tail.tolist():
        fed = ((reg >> (width - 1)) ^ bit) & 1
        reg = ((reg << 1) & mask) ^ (poly if fed else 0)
        reg &= mask
    return reg


def crc_attach(data, width: int = DEFAULT_CRC_LEN, poly: int = DEFAULT_CRC_POLY) -> np.ndarray:
    """Return data with its CRC appended (identity when width is 0)."""
    data = np.asarray(data, dtype=np.uint8)
    if width <= 0:
        return data.copy()
    rem = crc_remainder(data, width, poly)
    crc_bits = np.array([(rem >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)
    return np.concatenate([data, crc_bits])


def crc_check(frame, width: int = DEFAULT_CRC_LEN, poly: int = DEFAULT_CRC_POLY) -> bool:
    """True iff the trailing CRC matches (vacuously true when width is 0)."""
    if width <= 0:
        return True
    frame = np.asarray(frame, dtype=np.uint8)
    if frame.size < width:
        return False
    return crc_remainder(frame, width, poly) == 0
