"""Extension construction, retransmission encoding, and session tests.

Two references anchor this file: an independently written greedy pairing
(explicit sorted lists rather than argsort bookkeeping, cross-checked by a
top-k set argument) and the transform-matrix oracle for the extended
codeword layout [tx2 || tx1].
"""

import numpy as np
import pytest

from polarharq.core import (
    BitKind,
    CapacityError,
    ConfigError,
    InvalidLengthError,
    ProtocolError,
    build_code_spec,
    construct_reliability,
    polar_encode,
)
from polarharq.crc import crc_attach, crc_check
from polarharq.fastsc import FastScDecoder
from polarharq.harq import (
    ExtendedSpec,
    HarqSession,
    SessionStatus,
    assemble_llrs,
    base_leaf_vector,
    encode_tx1,
    encode_tx2,
    extend_bit_types,
    extended_leaf_vector,
    extract_info_bits,
)

# --------------------------------------------------------------- references


def _pairing_reference(base, reliability_2n):
    """Greedy swap list built from explicit sorted candidate lists.

    rank[pos] = position's index in the reliability order (higher = more
    reliable).  Pair the best unused left-half channel with the worst
    still-active right-half info channel while strictly better.
    """
    n = base.n
    rank = {int(pos): r for r, pos in enumerate(reliability_2n)}
    new_channels = sorted(range(n), key=rank.__getitem__, reverse=True)
    active = sorted((int(n + p) for p in base.info_positions), key=rank.__getitem__)
    swaps = []
    for new_pos, displaced in zip(new_channels, active):
        if rank[new_pos] <= rank[displaced]:
            break
        swaps.append((new_pos, displaced))
    return swaps


def _top_k_info_set(base, reliability_2n):
    """The extension's info set must be the most reliable k channels among
    the left half plus the original right-half info channels, with ties
    never arising because ranks are distinct."""
    n = base.n
    rank = {int(pos): r for r, pos in enumerate(reliability_2n)}
    candidates = list(range(n)) + [int(n + p) for p in base.info_positions]
    candidates.sort(key=rank.__getitem__, reverse=True)
    return sorted(candidates[: base.info_positions.size])


def _transform_matrix(n):
    mat = np.array([[1]], dtype=np.uint8)
    while mat.shape[0] < n:
        mat = np.kron(np.array([[1, 0], [1, 1]], dtype=np.uint8), mat)
    return mat


def _base16():
    return build_code_spec(16, 8, 0, construct_reliability(16))


def _session_spec(n_base=64, payload=16, crc_len=8):
    base = build_code_spec(n_base, payload, crc_len, construct_reliability(n_base))
    return extend_bit_types(base, construct_reliability(2 * n_base))


def _bpsk(bits, amp=4.0):
    return amp * (1.0 - 2.0 * np.asarray(bits, dtype=np.float64))


# ------------------------------------------------------------- construction


def test_extend_matches_pairing_reference():
    base = _base16()
    ext = extend_bit_types(base, construct_reliability(32))
    expected = _pairing_reference(base, construct_reliability(32))
    assert list(ext.swap_map) == expected
    assert len(ext.swap_map) > 0


@pytest.mark.parametrize("n,payload,crc", [(16, 8, 0), (32, 10, 4), (64, 20, 8), (128, 50, 8)])
def test_extension_info_set_is_top_k(n, payload, crc):
    base = build_code_spec(n, payload, crc, construct_reliability(n))
    ext = extend_bit_types(base, construct_reliability(2 * n))
    info = np.flatnonzero(ext.extended.kinds == BitKind.INFO).tolist()
    assert info == _top_k_info_set(base, construct_reliability(2 * n))
    # structural invariants
    pc_positions = np.flatnonzero(ext.extended.kinds == BitKind.PC_FROZEN)
    assert len(ext.swap_map) == pc_positions.size
    displaced = sorted(d for _, d in ext.swap_map)
    assert displaced == pc_positions.tolist()
    for new_pos, disp in ext.swap_map:
        assert new_pos < n <= disp
        assert int(ext.extended.partners[disp]) == new_pos
    right_info = np.flatnonzero(ext.extended.kinds[n:] == BitKind.INFO) + n
    assert sorted(right_info.tolist() + displaced) == (n + base.info_positions).tolist()


def test_zero_swap_extension():
    base = _base16()
    # every left-half channel listed before (less reliable than) the right half
    reliability = np.concatenate([np.arange(16), 16 + construct_reliability(16)])
    ext = extend_bit_types(base, reliability)
    assert ext.swap_map == ()
    assert not (ext.extended.kinds[:16] != BitKind.FROZEN).any()
    assert np.array_equal(ext.extended.kinds[16:], base.kinds)
    assert (ext.extended.partners == -1).all()


def test_single_swap_extension():
    base = _base16()
    # left channel 3 outranks everything; all other left channels stay worst
    others = [i for i in range(16) if i != 3]
    reliability = np.array(others + (16 + construct_reliability(16)).tolist() + [3])
    ext = extend_bit_types(base, reliability)
    expected = _pairing_reference(base, reliability)
    assert len(expected) == 1 and list(ext.swap_map) == expected
    new_pos, displaced = ext.swap_map[0]
    assert new_pos == 3
    # the displaced channel is the least reliable original info channel
    worst = min(
        (16 + p for p in base.info_positions),
        key=lambda pos: int(np.flatnonzero(reliability == pos)[0]),
    )
    assert displaced == worst


def test_extend_rejects_nested_and_bad_permutation():
    base = _base16()
    ext = extend_bit_types(base, construct_reliability(32))
    with pytest.raises(ConfigError):
        extend_bit_types(ext.extended, construct_reliability(64))
    with pytest.raises(ConfigError):
        extend_bit_types(base, np.zeros(32, dtype=np.int64))
    with pytest.raises(ConfigError):
        extend_bit_types(base, construct_reliability(16))


def test_extended_spec_json_round_trip_and_validation():
    ext = extend_bit_types(_base16(), construct_reliability(32))
    doc = ext.to_json_dict()
    back = ExtendedSpec.from_json_dict(doc)
    assert back.swap_map == ext.swap_map
    assert np.array_equal(back.extended.kinds, ext.extended.kinds)
    assert np.array_equal(back.extended.partners, ext.extended.partners)
    assert np.array_equal(back.base.reliability, ext.base.reliability)

    tampered = ext.to_json_dict()
    new_pos, displaced = tampered["swap_map"][0]
    tampered["swap_map"][0] = [displaced, new_pos]  # crosses the wrong half
    with pytest.raises(ConfigError):
        ExtendedSpec.from_json_dict(tampered)
    with pytest.raises(ConfigError):
        ExtendedSpec.from_json_dict({"base": ext.to_json_dict()["base"]})


# ----------------------------------------------------------------- encoding


def test_encode_tx1_matrix_example():
    base = build_code_spec(8, 4, 0, construct_reliability(8))
    data = np.array([1, 0, 1, 1], dtype=np.uint8)
    u = np.zeros(8, dtype=np.uint8)
    u[base.info_positions] = data
    expected = (u @ _transform_matrix(8)) % 2
    assert np.array_equal(encode_tx1(data, base), expected)
    assert not encode_tx1(np.zeros(4, dtype=np.uint8), base).any()
    with pytest.raises(CapacityError):
        encode_tx1(np.zeros(5, dtype=np.uint8), base)


def test_zero_swap_tx2_equals_tx1():
    base = _base16()
    reliability = np.concatenate([np.arange(16), 16 + construct_reliability(16)])
    ext = extend_bit_types(base, reliability)
    rng = np.random.default_rng(51)
    for _ in range(10):
        data = rng.integers(0, 2, 8, dtype=np.uint8)
        assert np.array_equal(encode_tx2(data, ext), encode_tx1(data, base))


def test_tx2_all_zero_data_is_zero():
    ext = extend_bit_types(_base16(), construct_reliability(32))
    assert not encode_tx2(np.zeros(8, dtype=np.uint8), ext).any()


def test_extended_codeword_matrix_oracle():
    ext = extend_bit_types(_base16(), construct_reliability(32))
    mat = _transform_matrix(32)
    rng = np.random.default_rng(52)
    for _ in range(50):
        data = rng.integers(0, 2, 8, dtype=np.uint8)
        u = extended_leaf_vector(data, ext)
        expected = (u @ mat) % 2
        full = np.concatenate([encode_tx2(data, ext), encode_tx1(data, ext.base)])
        assert np.array_equal(full, expected)
        assert np.array_equal(polar_encode(u), full)


def test_extended_leaf_vector_pc_values_follow_partners():
    ext = _session_spec()
    rng = np.random.default_rng(53)
    data = rng.integers(0, 2, 16, dtype=np.uint8)
    u = extended_leaf_vector(data, ext)
    for new_pos, displaced in ext.swap_map:
        assert u[new_pos] == u[displaced]
    frame = crc_attach(data, ext.base.crc_len)
    assert np.array_equal(u[ext.base.n + ext.base.info_positions], frame)


def test_assemble_layout_and_errors():
    combined = assemble_llrs([1.0, 2.0], [3.0, 4.0])
    assert combined.tolist() == [3.0, 4.0, 1.0, 2.0]
    with pytest.raises(InvalidLengthError):
        assemble_llrs([1.0, 2.0], [3.0])
    with pytest.raises(InvalidLengthError):
        assemble_llrs(np.zeros((2, 2)), np.zeros((2, 2)))


def test_two_round_decode_noiseless_recovers_data():
    ext = _session_spec()
    decoder = FastScDecoder(ext.extended, "modified")
    rng = np.random.default_rng(54)
    for _ in range(100):
        data = rng.integers(0, 2, 16, dtype=np.uint8)
        llrs = assemble_llrs(_bpsk(encode_tx1(data, ext.base)), _bpsk(encode_tx2(data, ext)))
        result = decoder.decode(llrs)
        frame = extract_info_bits(result.u_hat, ext.base, offset=ext.base.n)
        assert np.array_equal(frame[: ext.base.data_len], data)


def test_swapped_assembly_breaks_decoding():
    """Reversed halves decode to a different codeword of the extended tree;
    the swap copies land on the frame tail, so the CRC catches it."""
    ext = _session_spec()
    decoder = FastScDecoder(ext.extended, "modified")
    rng = np.random.default_rng(55)
    checked = 0
    for _ in range(30):
        data = rng.integers(0, 2, 16, dtype=np.uint8)
        if not extended_leaf_vector(data, ext)[: ext.base.n].any():
            continue  # all swap copies zero: the two halves genuinely coincide
        tx1, tx2 = _bpsk(encode_tx1(data, ext.base)), _bpsk(encode_tx2(data, ext))
        wrong = assemble_llrs(tx2, tx1)  # halves reversed
        frame = extract_info_bits(decoder.decode(wrong).u_hat, ext.base, offset=ext.base.n)
        assert not crc_check(frame, ext.base.crc_len) or not np.array_equal(
            frame[: ext.base.data_len], data
        )
        checked += 1
    assert checked >= 15


# ----------------------------------------------------------------- sessions


def test_session_noiseless_round1():
    ext = _session_spec()
    rng = np.random.default_rng(56)
    data = rng.integers(0, 2, 16, dtype=np.uint8)
    session = HarqSession(ext)
    result = session.receive_tx1(_bpsk(encode_tx1(data, ext.base)))
    assert result.status is SessionStatus.DECODED
    assert np.array_equal(result.data, data)
    assert session.state == "done"
    with pytest.raises(ProtocolError):
        session.receive_tx1(_bpsk(encode_tx1(data, ext.base)))


def test_session_rejects_out_of_order_events():
    ext = _session_spec()
    session = HarqSession(ext)
    with pytest.raises(ProtocolError):
        session.receive_tx2(np.zeros(ext.base.n))
    with pytest.raises(ProtocolError):
        session.step("rx_tx3", np.zeros(ext.base.n))


def test_session_retransmit_then_failure_on_inverted_tx1():
    """Negating every tx1 LLR decodes to a different valid codeword (the
    all-ones leaf pattern is on an info channel), so the CRC fails and the
    session asks for more; the stored garbage then sinks round 2 as well."""
    ext = _session_spec()
    rng = np.random.default_rng(57)
    data = rng.integers(0, 2, 16, dtype=np.uint8)
    session = HarqSession(ext)
    first = session.receive_tx1(-_bpsk(encode_tx1(data, ext.base)))
    assert first.status is SessionStatus.RETRANSMIT
    assert session.state == "awaiting_tx2"
    second = session.receive_tx2(-_bpsk(encode_tx2(data, ext)))
    assert second.status is SessionStatus.FAILED
    assert session.state == "done"


def test_session_low_snr_round1_recovered_by_round2():
    ext = _session_spec()
    rng = np.random.default_rng(58)
    round2_successes = 0
    retransmissions = 0
    for _ in range(60):
        data = rng.integers(0, 2, 16, dtype=np.uint8)
        weak = 0.4 * (1.0 - 2.0 * encode_tx1(data, ext.base)) + rng.normal(0.0, 1.4, ext.base.n)
        session = HarqSession(ext)
        first = session.receive_tx1(weak)
        if first.status is SessionStatus.DECODED:
            continue
        retransmissions += 1
        second = session.receive_tx2(_bpsk(encode_tx2(data, ext), amp=20.0))
        if second.status is SessionStatus.DECODED:
            round2_successes += 1
            assert np.array_equal(second.data, data)
    assert retransmissions > 0
    assert round2_successes > 0


def test_session_erased_rounds_decode_to_zero_word():
    """A fully erased round carries no information; the zero codeword is
    CRC-consistent, so the session reports it decoded after round 1."""
    ext = _session_spec()
    session = HarqSession(ext)
    result = session.receive_tx1(np.zeros(ext.base.n))
    assert result.status is SessionStatus.DECODED
    assert not result.data.any()


def test_session_deterministic_and_shared_decoders_agree():
    ext = _session_spec()
    round1 = FastScDecoder(ext.base, "modified")
    round2 = FastScDecoder(ext.extended, "modified")
    rng = np.random.default_rng(59)
    for _ in range(20):
        data = rng.integers(0, 2, 16, dtype=np.uint8)
        llr1 = 0.5 * (1.0 - 2.0 * encode_tx1(data, ext.base)) + rng.normal(0.0, 1.0, ext.base.n)
        llr2 = 0.5 * (1.0 - 2.0 * encode_tx2(data, ext)) + rng.normal(0.0, 1.0, ext.base.n)
        outcomes = []
        for make in (
            lambda: HarqSession(ext),
            lambda: HarqSession.with_decoders(ext, round1, round2),
        ):
            session = make()
            result = session.step("rx_tx1", llr1)
            if result.status is SessionStatus.RETRANSMIT:
                result = session.step("rx_tx2", llr2)
            outcomes.append(result)
        assert outcomes[0].status is outcomes[1].status
        if outcomes[0].data is not None:
            assert np.array_equal(outcomes[0].data, outcomes[1].data)


def test_zero_swap_extension_profiles_match_across_modes():
    base = _base16()
    reliability = np.concatenate([np.arange(16), 16 + construct_reliability(16)])
    ext = extend_bit_types(base, reliability)
    modified = FastScDecoder(ext.extended, "modified").profile()
    baseline = FastScDecoder(ext.extended, "baseline").profile()
    assert modified.as_row() == baseline.as_row()
