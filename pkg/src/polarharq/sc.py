"""Leaf-level successive-cancellation decoding with min-sum updates.

This is the reference decoder: it walks the full binary tree, decides every
leaf individually, and handles pc-frozen leaves by copying the already
decoded partner bit.  The fast decoder in fastsc.py must agree with it for
the node classes that are exact under min-sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import BitKind, CodeSpec, InvalidLengthError, SpecOrderingError

__all__ = ["TraversalProfile", "DecodeResult", "f_minsum", "g_update", "sc_decode"]

PROFILE_COLUMNS = ("R0", "R1", "REP", "REP2", "SPC", "SPC2", "PCR", "RPC", "LEAF")


@dataclass
class TraversalProfile:
    """Node-visit counts for one decoding pass.

    Special-node invocations count once under their class and stage-0 visits
    count as ``leaf``.  ``generic`` is used only by the leaf-level decoder
    (internal tree nodes) and stays 0 for fast decoding; ``total`` is the sum
    of every count either way.
    """

    r0: int = 0
    r1: int = 0
    rep: int = 0
    rep2: int = 0
    spc: int = 0
    spc2: int = 0
    pcr: int = 0
    rpc: int = 0
    leaf: int = 0
    generic: int = 0

    @property
    def total(self) -> int:
        return (
            self.r0 + self.r1 + self.rep + self.rep2 + self.spc + self.spc2
            + self.pcr + self.rpc + self.leaf + self.generic
        )

    def as_row(self) -> dict[str, int]:
        """Counts keyed by the tabular column names R0 .. LEAF plus Total."""
        values = (
            self.r0, self.r1, self.rep, self.rep2, self.spc, self.spc2,
            self.pcr, self.rpc, self.leaf,
        )
        row = dict(zip(PROFILE_COLUMNS, values))
        row["Total"] = self.total
        return row


@dataclass
class DecodeResult:
    u_hat: np.ndarray
    x_hat: np.ndarray
    traversal: TraversalProfile = field(default_factory=TraversalProfile)


def f_minsum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Min-sum check update: sign(a) sign(b) min(|a|, |b|)."""
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def g_update(a: np.ndarray, b: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Variable update b + (1 - 2 beta) a for decided left bits beta."""
    return np.where(beta.astype(bool), b - a, b + a)


def sc_decode(llrs, spec: CodeSpec) -> DecodeResult:
    """Decode one block leaf by leaf; returns leaf decisions and codeword.

    Frozen leaves decide 0, Info leaves take the LLR sign (llr >= 0 -> 0),
    pc-frozen leaves copy the decoded partner bit.  The traversal profile
    counts every visited node (n leaves, n - 1 generic internal nodes).
    """
    alpha = np.asarray(llrs, dtype=np.float64)
    if alpha.shape != (spec.n,):
        raise InvalidLengthError(f"expected {spec.n} LLRs, got {alpha.shape}")
    u_hat = np.zeros(spec.n, dtype=np.uint8)
    profile = TraversalProfile()
    kinds = spec.kinds
    partners = spec.partners

    def descend(node_llrs: np.ndarray, offset: int) -> np.ndarray:
        size = node_llrs.size
        if size == 1:
            profile.leaf += 1
            kind = kinds[offset]
            if kind == BitKind.INFO:
                bit = 1 if node_llrs[0] < 0 else 0
            elif kind == BitKind.FROZEN:
                bit = 0
            else:
                partner = int(partners[offset])
                if partner >= offset:
                    raise SpecOrderingError(
                        f"partner {partner} of leaf {offset} is not decoded yet"
                    )
                bit = int(u_hat[partner])
            u_hat[offset] = bit
            return np.array([bit], dtype=np.uint8)
        profile.generic += 1
        half = size // 2
        a, b = node_llrs[:half], node_llrs[half:]
        beta_left = descend(f_minsum(a, b), offset)
        beta_right = descend(g_update(a, b, beta_left), offset + half)
        return np.concatenate([beta_left ^ beta_right, beta_right])

    x_hat = descend(alpha, 0)
    return DecodeResult(u_hat=u_hat, x_hat=x_hat, traversal=profile)
