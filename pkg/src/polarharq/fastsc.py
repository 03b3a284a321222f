"""Fast SC decoding over a precomputed subtree-classification plan.

The tree is segmented once per spec: every maximal subtree matching a
special-node pattern becomes a single plan entry, everything else descends.
In "modified" mode special nodes absorb pc-frozen leaves (their frozen
contribution is re-encoded per block from the already decoded partner bits);
in "baseline" mode any subtree containing a pc-frozen leaf is ineligible and
is traversed onward, down to individual leaves if necessary.

The traversal profile counts one entry per special-node invocation plus one
per stage-0 leaf visit; it is a property of the plan, not of the data.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np

from .core import (
    BitKind,
    CodeSpec,
    ConfigError,
    InvalidLengthError,
    SpecOrderingError,
    polar_encode,
)
from .nodes import (
    NodeClass,
    classify,
    decode_pcr,
    decode_pcr_baseline,
    decode_rate0,
    decode_rate0_baseline,
    decode_rate1,
    decode_rate1_baseline,
    decode_rep,
    decode_rep2,
    decode_rep2_baseline,
    decode_rep_baseline,
    decode_rpc,
    decode_rpc_baseline,
    decode_spc,
    decode_spc2,
    decode_spc2_baseline,
    decode_spc_baseline,
)
from .sc import DecodeResult, TraversalProfile, f_minsum, g_update

__all__ = [
    "SPECIAL_NODE_CLASSES",
    "MINSUM_EXACT_CLASSES",
    "FastScDecoder",
    "fast_sc_decode",
    "profile_traversals",
]

SPECIAL_NODE_CLASSES = frozenset(
    {
        NodeClass.RATE0,
        NodeClass.RATE1,
        NodeClass.REP,
        NodeClass.REP2,
        NodeClass.SPC,
        NodeClass.SPC2,
        NodeClass.RPC,
        NodeClass.PCR,
    }
)

# Classes whose node decoders reproduce leaf-level min-sum SC decisions
# exactly; RPC and PCR trade that equivalence for block-local corrections.
MINSUM_EXACT_CLASSES = frozenset(
    {
        NodeClass.RATE0,
        NodeClass.RATE1,
        NodeClass.REP,
        NodeClass.REP2,
        NodeClass.SPC,
        NodeClass.SPC2,
    }
)

_ROLE_INTERNAL, _ROLE_LEAF, _ROLE_SPECIAL = 0, 1, 2

_PROFILE_FIELD = {
    NodeClass.RATE0: "r0",
    NodeClass.RATE1: "r1",
    NodeClass.REP: "rep",
    NodeClass.REP2: "rep2",
    NodeClass.SPC: "spc",
    NodeClass.SPC2: "spc2",
    NodeClass.RPC: "rpc",
    NodeClass.PCR: "pcr",
}


@dataclass
class _PlanNode:
    offset: int
    size: int
    role: int
    node_class: NodeClass = NodeClass.GENERIC
    left: "_PlanNode | None" = None
    right: "_PlanNode | None" = None
    pc_rel: np.ndarray | None = None  # node-local indices of pc-frozen leaves
    partners: np.ndarray | None = None  # absolute partner index per pc-frozen leaf
    zero_pc: np.ndarray | None = None  # shared all-zero pc for pc-free nodes


class FastScDecoder:
    """Plan-compiled fast SC decoder for one spec/mode/class selection."""

    def __init__(
        self,
        spec: CodeSpec,
        mode: str = "modified",
        classes: frozenset[NodeClass] | None = None,
    ) -> None:
        if mode not in ("modified", "baseline"):
            raise ConfigError(f"unknown decoder mode {mode!r}")
        self.spec = spec
        self.mode = mode
        self.classes = SPECIAL_NODE_CLASSES if classes is None else frozenset(classes)
        self._profile = TraversalProfile()
        self._plan = self._build(0, spec.n)

    def _build(self, offset: int, size: int) -> _PlanNode:
        kinds = self.spec.kinds[offset : offset + size]
        pc_rel = np.flatnonzero(kinds == BitKind.PC_FROZEN)
        cls = classify(self.spec.frozen_like[offset : offset + size])
        eligible = (
            cls in self.classes
            and cls is not NodeClass.GENERIC
            and (self.mode == "modified" or pc_rel.size == 0)
        )
        if eligible:
            node = _PlanNode(offset, size, _ROLE_SPECIAL, cls)
            if pc_rel.size:
                partners = self.spec.partners[offset + pc_rel]
                if np.any(partners >= offset):
                    raise SpecOrderingError(
                        f"special node at [{offset}, {offset + size}) depends on a "
                        "partner bit inside or after it"
                    )
                node.pc_rel = pc_rel
                node.partners = partners
            else:
                node.zero_pc = np.zeros(size, dtype=np.uint8)
            field = _PROFILE_FIELD[cls]
            setattr(self._profile, field, getattr(self._profile, field) + 1)
            return node
        if size == 1:
            self._profile.leaf += 1
            return _PlanNode(offset, size, _ROLE_LEAF)
        half = size // 2
        node = _PlanNode(offset, size, _ROLE_INTERNAL)
        node.left = self._build(offset, half)
        node.right = self._build(offset + half, half)
        return node

    def profile(self) -> TraversalProfile:
        """Static traversal counts for this plan (identical for every block)."""
        return copy.copy(self._profile)

    def decode(self, llrs) -> DecodeResult:
        alpha = np.asarray(llrs, dtype=np.float64)
        if alpha.shape != (self.spec.n,):
            raise InvalidLengthError(f"expected {self.spec.n} LLRs, got {alpha.shape}")
        u_hat = np.zeros(self.spec.n, dtype=np.uint8)
        beta = np.zeros(self.spec.n, dtype=np.uint8)
        self._run(self._plan, alpha, u_hat, beta)
        return DecodeResult(u_hat=u_hat, x_hat=beta, traversal=self.profile())

    def _node_pc(self, node: _PlanNode, u_hat: np.ndarray) -> np.ndarray:
        if node.pc_rel is None:
            return node.zero_pc
        leaf_values = np.zeros(node.size, dtype=np.uint8)
        leaf_values[node.pc_rel] = u_hat[node.partners]
        return polar_encode(leaf_values)

    def _decode_special(self, node: _PlanNode, alpha: np.ndarray, u_hat: np.ndarray) -> np.ndarray:
        cls = node.node_class
        if self.mode == "baseline":
            if cls is NodeClass.RATE0:
                return decode_rate0_baseline(node.size)
            if cls is NodeClass.RATE1:
                return decode_rate1_baseline(alpha)
            if cls is NodeClass.REP:
                return decode_rep_baseline(alpha)[0]
            if cls is NodeClass.REP2:
                return decode_rep2_baseline(alpha)[0]
            if cls is NodeClass.SPC:
                return decode_spc_baseline(alpha)
            if cls is NodeClass.SPC2:
                return decode_spc2_baseline(alpha)
            if cls is NodeClass.RPC:
                return decode_rpc_baseline(alpha)
            return decode_pcr_baseline(alpha)
        pc = self._node_pc(node, u_hat)
        if cls is NodeClass.RATE0:
            return decode_rate0(pc)
        if cls is NodeClass.RATE1:
            return decode_rate1(alpha)
        if cls is NodeClass.REP:
            return decode_rep(alpha, pc)[0]
        if cls is NodeClass.REP2:
            return decode_rep2(alpha, pc)[0]
        if cls is NodeClass.SPC:
            return decode_spc(alpha, int(np.bitwise_xor.reduce(pc)))
        if cls is NodeClass.SPC2:
            return decode_spc2(alpha, pc)
        if cls is NodeClass.RPC:
            return decode_rpc(alpha, pc)
        return decode_pcr(alpha, pc)

    def _run(self, node: _PlanNode, alpha: np.ndarray, u_hat: np.ndarray, beta: np.ndarray) -> None:
        offset, size = node.offset, node.size
        if node.role == _ROLE_SPECIAL:
            codeword = self._decode_special(node, alpha, u_hat)
            beta[offset : offset + size] = codeword
            u_hat[offset : offset + size] = polar_encode(codeword)
            return
        if node.role == _ROLE_LEAF:
            kind = self.spec.kinds[offset]
            if kind == BitKind.INFO:
                bit = 1 if alpha[0] < 0 else 0
            elif kind == BitKind.FROZEN:
                bit = 0
            else:
                bit = int(u_hat[int(self.spec.partners[offset])])
            u_hat[offset] = bit
            beta[offset] = bit
            return
        half = size // 2
        a, b = alpha[:half], alpha[half:]
        self._run(node.left, f_minsum(a, b), u_hat, beta)
        left_beta = beta[offset : offset + half]
        self._run(node.right, g_update(a, b, left_beta), u_hat, beta)
        left_beta ^= beta[offset + half : offset + size]


def fast_sc_decode(
    llrs,
    spec: CodeSpec,
    mode: str = "modified",
    classes: frozenset[NodeClass] | None = None,
) -> DecodeResult:
    """One-shot fast decode; build a FastScDecoder directly for bulk use."""
    return FastScDecoder(spec, mode, classes).decode(llrs)


def profile_traversals(spec: CodeSpec, mode: str = "modified") -> TraversalProfile:
    """Traversal counts of the fast decoder for this spec and mode."""
    return FastScDecoder(spec, mode).profile()
