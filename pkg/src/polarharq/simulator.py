"""Frame-error-rate simulation of the three decoder configurations.

A: two-round HARQ decoded with pc-aware special nodes.
B: two-round HARQ where subtrees containing pc-frozen leaves get no special
   treatment (baseline nodes only, descending to leaves where needed).
C: a single transmission of the full-length code, baseline nodes.

Every frame draws its randomness from a stream seeded by (seed, frame
index), and stopping is decided by scanning outcomes in frame order, so
results are byte-identical for any worker count.  A frame counts as an
error iff the CRC still fails after the final allowed round.
"""

from __future__ import annotations

import csv
import multiprocessing
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.stats

from .channel import awgn, llr_demod, noise_variance, qpsk_modulate
from .core import ConfigError, build_code_spec, construct_reliability, polar_encode
from .crc import crc_check
from .fastsc import FastScDecoder
from .harq import (
    HarqSession,
    SessionStatus,
    base_leaf_vector,
    encode_tx1,
    encode_tx2,
    extend_bit_types,
    extract_info_bits,
)

__all__ = [
    "SimConfig",
    "FerRecord",
    "FrameSimulator",
    "run_fer",
    "records_to_csv_rows",
    "write_records_csv",
    "records_to_json_dict",
    "binomial_ci",
]

CSV_COLUMNS = ("config", "eb_n0_db", "frames", "errors", "fer", "round1_success_rate", "seed")


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: a configuration, an SNR sweep, and stopping rules.

    ``n`` is the full-length code (the extension target for A/B); ``k``
    counts information leaves including the CRC.
    """

    configuration: str
    n: int = 2048
    k: int = 1024
    crc_len: int = 24
    design_snr_db: float = 2.0
    snr_db_list: tuple[float, ...] = tuple(round(0.25 * i, 2) for i in range(13))
    target_errors: int = 100
    max_frames: int = 100_000
    seed: int = 1
    workers: int = 1

    def __post_init__(self) -> None:
        if self.configuration not in ("A", "B", "C"):
            raise ConfigError(f"configuration must be A, B, or C, got {self.configuration!r}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.k <= self.crc_len:
            raise ConfigError("k must exceed crc_len")
        if self.target_errors < 1 or self.max_frames < 1:
            raise ConfigError("stopping rule must allow at least one frame/error")


@dataclass(frozen=True)
class FerRecord:
    config: str
    eb_n0_db: float
    frames: int
    frame_errors: int
    round1_successes: int
    seed: int

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames

    @property
    def round1_success_rate(self) -> float:
        return self.round1_successes / self.frames


class FrameSimulator:
    """Per-configuration frame pipeline, reusable across SNR points."""

    def __init__(self, config: SimConfig) -> None:
        self.config = config
        data_len = config.k - config.crc_len
        if config.configuration == "C":
            reliability = construct_reliability(config.n, config.design_snr_db)
            self.spec = build_code_spec(
                config.n, data_len, config.crc_len, reliability, config.design_snr_db
            )
            self.decoder = FastScDecoder(self.spec, "baseline")
            self.rate = data_len / config.n
        else:
            base_n = config.n // 2
            base = build_code_spec(
                base_n,
                data_len,
                config.crc_len,
                construct_reliability(base_n, config.design_snr_db),
                config.design_snr_db,
            )
            self.ext = extend_bit_types(
                base, construct_reliability(config.n, config.design_snr_db)
            )
            mode = "modified" if config.configuration == "A" else "baseline"
            self.round1 = FastScDecoder(base, mode)
            self.round2 = FastScDecoder(self.ext.extended, mode)
            # One channel noise level per Eb/N0 point, normalized by the
            # configuration's full transmission budget, so A/B/C FER curves
            # share an axis; per-round normalization would hand HARQ rounds
            # unequal channels and break cross-configuration comparability.
            self.rate = data_len / config.n

    def profile(self):
        """Traversal profile of this configuration's full-length decoder."""
        if self.config.configuration == "C":
            return self.decoder.profile()
        return self.round2.profile()

    def _send(self, bits: np.ndarray, snr_db: float, rate: float, rng) -> np.ndarray:
        sigma2 = noise_variance(snr_db, rate)
        noisy = awgn(qpsk_modulate(bits), snr_db, rate, rng)
        return llr_demod(noisy, sigma2)

    def run_frame(self, snr_db: float, frame_idx: int) -> tuple[bool, bool]:
        """Simulate one frame; returns (frame_error, round1_success)."""
        cfg = self.config
        rng = np.random.default_rng([cfg.seed, frame_idx])
        data = rng.integers(0, 2, cfg.k - cfg.crc_len, dtype=np.uint8)
        if cfg.configuration == "C":
            codeword = polar_encode(base_leaf_vector(data, self.spec))
            llrs = self._send(codeword, snr_db, self.rate, rng)
            frame = extract_info_bits(self.decoder.decode(llrs).u_hat, self.spec)
            ok = crc_check(frame, cfg.crc_len)
            return (not ok, ok)
        session = HarqSession.with_decoders(self.ext, self.round1, self.round2)
        tx1 = encode_tx1(data, self.ext.base)
        outcome = session.receive_tx1(self._send(tx1, snr_db, self.rate, rng))
        if outcome.status == SessionStatus.DECODED:
            return (False, True)
        tx2 = encode_tx2(data, self.ext)
        outcome = session.receive_tx2(self._send(tx2, snr_db, self.rate, rng))
        return (outcome.status != SessionStatus.DECODED, False)

    def run_range(self, snr_db: float, start: int, stop: int) -> list[tuple[bool, bool]]:
        return [self.run_frame(snr_db, i) for i in range(start, stop)]


_worker_engine: FrameSimulator | None = None


def _init_worker(config: SimConfig) -> None:
    global _worker_engine
    _worker_engine = FrameSimulator(config)


def _worker_range(args: tuple[float, int, int]) -> list[tuple[bool, bool]]:
    snr_db, start, stop = args
    return _worker_engine.run_range(snr_db, start, stop)


def _run_point(
    engine: FrameSimulator | None,
    pool,
    config: SimConfig,
    snr_db: float,
    chunk: int = 128,
) -> FerRecord:
    frames = errors = round1 = 0
    next_frame = 0
    lanes = max(1, config.workers)
    while next_frame < config.max_frames and errors < config.target_errors:
        stop = min(next_frame + chunk * lanes, config.max_frames)
        bounds = list(range(next_frame, stop, chunk)) + [stop]
        tasks = [(snr_db, lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
        if pool is not None:
            results = pool.map(_worker_range, tasks)
        else:
            results = [engine.run_range(*task) for task in tasks]
        for err, r1 in (outcome for batch in results for outcome in batch):
            frames += 1
            errors += int(err)
            round1 += int(r1)
            if errors >= config.target_errors:
                break
        next_frame = stop
    return FerRecord(
        config=config.configuration,
        eb_n0_db=snr_db,
        frames=frames,
        frame_errors=errors,
        round1_successes=round1,
        seed=config.seed,
    )


def run_fer(config: SimConfig, progress=None) -> list[FerRecord]:
    """Simulate every SNR point of one configuration; deterministic in
    (config, seed) regardless of worker count."""
    records = []
    if config.workers > 1:
        with multiprocessing.Pool(
            config.workers, initializer=_init_worker, initargs=(config,)
        ) as pool:
            for snr_db in config.snr_db_list:
                records.append(_run_point(None, pool, config, snr_db))
                if progress is not None:
                    progress(records[-1])
    else:
        engine = FrameSimulator(config)
        for snr_db in config.snr_db_list:
            records.append(_run_point(engine, None, config, snr_db))
            if progress is not None:
                progress(records[-1])
    return records


def records_to_csv_rows(records: Iterable[FerRecord]) -> list[list[str]]:
    rows = [list(CSV_COLUMNS)]
    for rec in records:
        rows.append(
            [
                rec.config,
                f"{rec.eb_n0_db:g}",
                str(rec.frames),
                str(rec.frame_errors),
                repr(rec.fer),
                repr(rec.round1_success_rate),
                str(rec.seed),
            ]
        )
    return rows


def write_records_csv(records: Iterable[FerRecord], path) -> None:
    with open(path, "w", newline="") as handle:
        csv.writer(handle).writerows(records_to_csv_rows(records))


def records_to_json_dict(records: Iterable[FerRecord]) -> list[dict]:
    return [
        {
            "config": rec.config,
            "eb_n0_db": rec.eb_n0_db,
            "frames": rec.frames,
            "errors": rec.frame_errors,
            "fer": rec.fer,
            "round1_success_rate": rec.round1_success_rate,
            "seed": rec.seed,
        }
        for rec in records
    ]


def binomial_ci(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Clopper-Pearson interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("need at least one trial")
    alpha = 1.0 - confidence
    lo = 0.0
    hi = 1.0
    if successes > 0:
        lo = float(scipy.stats.beta.ppf(alpha / 2, successes, trials - successes + 1))
    if successes < trials:
        hi = float(scipy.stats.beta.ppf(1 - alpha / 2, successes + 1, trials - successes))
    return lo, hi
