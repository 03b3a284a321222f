"""Special-node classification and decoders for fast SC decoding.

Eight subtree shapes are recognized from the frozen/info pattern of their
leaves (pc-frozen leaves count as frozen).  Each decoder exists in two
variants: a baseline one that assumes all frozen leaves are zero, and a
pc-aware one that takes the node's encoded frozen contribution ("pc vector",
the polar transform of the leaf vector with info positions zeroed) and
decodes the corresponding coset.  For every class and every valid pc,

    decode_X(llrs, pc) == decode_X_baseline(llrs * (1 - 2 pc)) ^ pc

which the test suite checks exhaustively; the pc-aware forms below avoid the
sign-flip detour so nothing is recomputed per node.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .core import InvalidLengthError, hard_decision, polar_encode

__all__ = [
    "NodeClass",
    "classify",
    "compute_node_pc",
    "decode_rate0",
    "decode_rate1",
    "decode_rep",
    "decode_rep2",
    "decode_spc",
    "decode_spc2",
    "decode_rpc",
    "decode_pcr",
    "decode_rate0_baseline",
    "decode_rate1_baseline",
    "decode_rep_baseline",
    "decode_rep2_baseline",
    "decode_spc_baseline",
    "decode_spc2_baseline",
    "decode_rpc_baseline",
    "decode_pcr_baseline",
]


class NodeClass(Enum):
    RATE0 = "R0"
    RATE1 = "R1"
    REP = "REP"
    REP2 = "REP2"
    SPC = "SPC"
    SPC2 = "SPC2"
    RPC = "RPC"
    PCR = "PCR"
    GENERIC = "GEN"


def classify(frozen: np.ndarray) -> NodeClass:
    """Classify a subtree from its leaf pattern (True = frozen or pc-frozen).

    Minimum sizes: REP/SPC need 4 leaves, REP2/SPC2/RPC/PCR need 8.  Nodes
    that match no pattern are GENERIC and must be descended into.
    """
    size = frozen.size
    if size < 2:
        return NodeClass.GENERIC
    n_frozen = int(np.count_nonzero(frozen))
    if n_frozen == size:
        return NodeClass.RATE0
    if n_frozen == 0:
        return NodeClass.RATE1
    if size >= 4:
        if n_frozen == size - 1 and not frozen[-1]:
            return NodeClass.REP
        if n_frozen == 1 and frozen[0]:
            return NodeClass.SPC
    if size >= 8:
        if n_frozen == size - 2 and not frozen[-1] and not frozen[-2]:
            return NodeClass.REP2
        if n_frozen == 2 and frozen[0] and frozen[1]:
            return NodeClass.SPC2
        if n_frozen == 3 and frozen[0] and frozen[1] and frozen[2]:
            return NodeClass.RPC
        if n_frozen == size - 3 and not frozen[-1] and not frozen[-2] and not frozen[-3]:
            return NodeClass.PCR
    return NodeClass.GENERIC


def compute_node_pc(leaf_values) -> np.ndarray:
    """Encoded frozen contribution of a node: transform of its leaf vector
    with all info positions set to zero."""
    return polar_encode(leaf_values)


# ---------------------------------------------------------------- rate 0 / 1


def decode_rate0(pc: np.ndarray) -> np.ndarray:
    """All leaves frozen: the codeword is the pc vector itself."""
    return pc.copy()


def decode_rate0_baseline(size: int) -> np.ndarray:
    return np.zeros(size, dtype=np.uint8)


def decode_rate1(llrs: np.ndarray) -> np.ndarray:
    """All leaves info: elementwise hard decision."""
    return hard_decision(llrs)


decode_rate1_baseline = decode_rate1


# ------------------------------------------------------------- repetition


def decode_rep(llrs: np.ndarray, pc: np.ndarray) -> tuple[np.ndarray, int]:
    """Repetition node with frozen offsets: i = sign(sum l_j (1 - 2 pc_j)).

    Returns the codeword i ^ pc and the single info bit i (also the info
    leaf's value, since the rightmost leaf maps straight through).
    """
    score = float(np.sum(llrs * (1.0 - 2.0 * pc)))
    bit = 1 if score < 0 else 0
    return pc ^ np.uint8(bit), bit


def decode_rep_baseline(llrs: np.ndarray) -> tuple[np.ndarray, int]:
    bit = 1 if float(np.sum(llrs)) < 0 else 0
    return np.full(llrs.size, bit, dtype=np.uint8), bit


def decode_rep2(llrs: np.ndarray, pc: np.ndarray) -> tuple[np.ndarray, tuple[int, int]]:
    """Two interleaved repetition decisions for the two-info-leaf node.

    The even codeword positions repeat i_a = u[-2] ^ u[-1], the odd ones
    repeat i_b = u[-1].  Returns the codeword and the rightmost two leaf
    bits in leaf order (u[-2], u[-1]) = (i_a ^ i_b, i_b).
    """
    adjusted = llrs * (1.0 - 2.0 * pc)
    i_a = 1 if float(np.sum(adjusted[0::2])) < 0 else 0
    i_b = 1 if float(np.sum(adjusted[1::2])) < 0 else 0
    codeword = pc.copy()
    codeword[0::2] ^= np.uint8(i_a)
    codeword[1::2] ^= np.uint8(i_b)
    return codeword, (i_a ^ i_b, i_b)


def decode_rep2_baseline(llrs: np.ndarray) -> tuple[np.ndarray, tuple[int, int]]:
    i_a = 1 if float(np.sum(llrs[0::2])) < 0 else 0
    i_b = 1 if float(np.sum(llrs[1::2])) < 0 else 0
    codeword = np.empty(llrs.size, dtype=np.uint8)
    codeword[0::2] = i_a
    codeword[1::2] = i_b
    return codeword, (i_a ^ i_b, i_b)


# ----------------------------------------------------- single parity check


def decode_spc(llrs: np.ndarray, parity: int) -> np.ndarray:
    """Wagner decoding toward a parity target (0 in the baseline case).

    Hard-decide, and if the decisions' parity misses the target flip the
    least reliable position (lowest index on ties).
    """
    codeword = hard_decision(llrs)
    if int(np.bitwise_xor.reduce(codeword)) ^ parity:
        codeword[int(np.argmin(np.abs(llrs)))] ^= 1
    return codeword


def decode_spc_baseline(llrs: np.ndarray) -> np.ndarray:
    return decode_spc(llrs, 0)


def decode_spc2(llrs: np.ndarray, pc: np.ndarray) -> np.ndarray:
    """Independent Wagner passes on the even and odd interleaves.

    The two frozen leaves constrain the interleave parities; the targets are
    the even/odd parities of the pc vector.  No final XOR: the flips already
    happen in the codeword domain.
    """
    codeword = hard_decision(llrs)
    for start in (0, 1):
        part = codeword[start::2]
        target = int(np.bitwise_xor.reduce(pc[start::2]))
        if int(np.bitwise_xor.reduce(part)) ^ target:
            part[int(np.argmin(np.abs(llrs[start::2])))] ^= 1
    return codeword


def decode_spc2_baseline(llrs: np.ndarray) -> np.ndarray:
    return decode_spc2(llrs, np.zeros(llrs.size, dtype=np.uint8))


# ------------------------------------------- row parity check (3 frozen)


def decode_rpc(llrs: np.ndarray, pc: np.ndarray) -> np.ndarray:
    """Row-parity-check node: hard decisions corrected toward equal parities
    over the four mod-4 groups.

    The valid codewords have all four group parities equal (all 0 or all 1)
    after removing the frozen contribution, so the group-parity state is
    seeded with the pc vector's group parities instead of zeros; the rest is
    the unmodified correction: pick the cheaper target by comparing the
    summed minima of the violating groups, then flip each wrong group's
    least reliable position.
    """
    if llrs.size % 4:
        raise InvalidLengthError(f"RPC node size must be divisible by 4, got {llrs.size}")
    codeword = hard_decision(llrs)
    magnitudes = np.abs(llrs)
    parities = []
    minima = []
    min_pos = []
    for z in range(4):
        group = slice(z, None, 4)
        parities.append(
            int(np.bitwise_xor.reduce(pc[group])) ^ int(np.bitwise_xor.reduce(codeword[group]))
        )
        local = int(np.argmin(magnitudes[group]))
        min_pos.append(z + 4 * local)
        minima.append(float(magnitudes[group][local]))
    delta0 = 0.0
    delta1 = 0.0
    for z in range(4):
        if parities[z]:
            delta0 += minima[z]
        else:
            delta1 += minima[z]
    for z in range(4):
        if (delta0 > delta1 and not parities[z]) or (delta0 < delta1 and parities[z]):
            codeword[min_pos[z]] ^= 1
    return codeword


def decode_rpc_baseline(llrs: np.ndarray) -> np.ndarray:
    return decode_rpc(llrs, np.zeros(llrs.size, dtype=np.uint8))


# ----------------------------------------- parity check repetition (3 info)


def decode_pcr(llrs: np.ndarray, pc: np.ndarray) -> np.ndarray:
    """Parity-check-repetition node: each mod-4 group repeats one value and
    the four values form an even-parity quadruple.

    Group scores are accumulated with the pc signs folded in, the quadruple
    is Wagner-decoded, and the frozen contribution is restored by a final
    XOR with pc.
    """
    if llrs.size % 4:
        raise InvalidLengthError(f"PCR node size must be divisible by 4, got {llrs.size}")
    adjusted = llrs * (1.0 - 2.0 * pc)
    scores = np.array([float(np.sum(adjusted[z::4])) for z in range(4)])
    group_bits = decode_spc(scores, 0)
    codeword = np.empty(llrs.size, dtype=np.uint8)
    for z in range(4):
        codeword[z::4] = group_bits[z]
    return codeword ^ pc


def decode_pcr_baseline(llrs: np.ndarray) -> np.ndarray:
    if llrs.size % 4:
        raise InvalidLengthError(f"PCR node size must be divisible by 4, got {llrs.size}")
    scores = np.array([float(np.sum(llrs[z::4])) for z in range(4)])
    group_bits = decode_spc(scores, 0)
    codeword = np.empty(llrs.size, dtype=np.uint8)
    for z in range(4):
        codeword[z::4] = group_bits[z]
    return codeword
