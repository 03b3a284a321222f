"""Command-line front end.

Subcommands: construct, encode, decode, simulate, profile.  Frame I/O is
hexadecimal lines by default ('--bin' switches to 0/1 character lines);
'decode --llr' reads whitespace-separated decimal LLRs instead.  Every
file-writing command drops a run manifest next to its primary output, and
the report paths (simulate, profile) render figures alongside the
delimited data unless '--no-figures' is given.

Exit codes: 0 success, 1 CRC failure while decoding frames, 2 usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .core import (
    CodeSpec,
    ConfigError,
    PolarError,
    build_code_spec,
    construct_reliability,
    polar_encode,
)
from .crc import crc_check
from .fastsc import FastScDecoder, profile_traversals
from .harq import ExtendedSpec, base_leaf_vector, extend_bit_types, extended_leaf_vector, extract_info_bits
from .plots import render_fer_figure, render_profile_figure
from .sc import PROFILE_COLUMNS
from .simulator import (
    FerRecord,
    FrameSimulator,
    SimConfig,
    records_to_json_dict,
    run_fer,
    write_records_csv,
)

__all__ = ["main", "build_parser", "SEED_ENV_VAR"]

SEED_ENV_VAR = "POLAR_HARQ_SEED"

EXIT_OK = 0
EXIT_DECODE_FAILURE = 1
EXIT_USAGE = 2


def _utc_timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _write_manifest(
    command: str,
    outputs: Sequence[Path],
    args_doc: dict,
    config_path: str | None = None,
    seed: int | None = None,
) -> Path | None:
    """Record how a run was produced, next to its primary output."""
    if not outputs:
        return None
    manifest = {
        "command": command,
        "config_path": config_path,
        "seed": seed,
        "args": args_doc,
        "outputs": [str(p) for p in outputs],
        "tool_version": __version__,
        "timestamp": _utc_timestamp(),
    }
    path = Path(str(outputs[0]) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def _read_frame_lines(path: str | None) -> list[str]:
    if path in (None, "-"):
        text = sys.stdin.read()
    else:
        text = Path(path).read_text()
    return [line.strip() for line in text.splitlines() if line.strip()]


def _parse_bits(line: str, n_bits: int, binary: bool) -> np.ndarray:
    if binary:
        if len(line) != n_bits or set(line) - {"0", "1"}:
            raise ConfigError(
                f"frame length mismatch: expected {n_bits} binary digits, got {line!r}"
            )
        return (np.frombuffer(line.encode(), dtype=np.uint8) - ord("0")).astype(np.uint8)
    expected_bytes = (n_bits + 7) // 8
    try:
        raw = bytes.fromhex(line)
    except ValueError as exc:
        raise ConfigError(f"invalid hex frame: {exc}") from exc
    if len(raw) != expected_bytes:
        raise ConfigError(
            f"frame length mismatch: expected {n_bits} bits "
            f"({expected_bytes} hex bytes), got {len(raw)} bytes"
        )
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[:n_bits].astype(np.uint8)


def _parse_llrs(line: str, n: int) -> np.ndarray:
    values = np.array([float(tok) for tok in line.split()], dtype=np.float64)
    if values.size != n:
        raise ConfigError(f"frame length mismatch: expected {n} LLRs, got {values.size}")
    return values


def _format_bits(bits: np.ndarray, binary: bool) -> str:
    if binary:
        return "".join("1" if b else "0" for b in bits)
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes().hex()


def _emit_lines(lines: list[str], path: str | None) -> Path | None:
    text = "\n".join(lines) + ("\n" if lines else "")
    if path in (None, "-"):
        sys.stdout.write(text)
        return None
    out = Path(path)
    out.write_text(text)
    return out


def load_spec_file(path: str) -> CodeSpec | ExtendedSpec:
    """Load either a plain code spec or an extended (HARQ) spec JSON."""
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, dict) and "swap_map" in doc:
        return ExtendedSpec.from_json_dict(doc)
    return CodeSpec.from_json_dict(doc)


def _split_spec(spec: CodeSpec | ExtendedSpec) -> tuple[CodeSpec, CodeSpec, int]:
    """Return (codec spec, info-carrying base spec, info offset)."""
    if isinstance(spec, ExtendedSpec):
        return spec.extended, spec.base, spec.base.n
    return spec, spec, 0


def cmd_construct(args: argparse.Namespace) -> int:
    if args.k <= args.crc:
        raise ConfigError(f"k ({args.k}) must exceed the CRC length ({args.crc})")
    payload = args.k - args.crc
    reliability = construct_reliability(args.n, args.design_snr)
    base = build_code_spec(args.n, payload, args.crc, reliability, args.design_snr)
    if args.extend:
        ext = extend_bit_types(base, construct_reliability(2 * args.n, args.design_snr))
        doc = ext.to_json_dict()
    else:
        doc = base.to_json_dict()
    text = json.dumps(doc, indent=2) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        out = Path(args.out)
        out.write_text(text)
        _write_manifest(
            "construct",
            [out],
            {
                "n": args.n,
                "k": args.k,
                "crc": args.crc,
                "design_snr": args.design_snr,
                "extend": args.extend,
            },
        )
    return EXIT_OK


def cmd_encode(args: argparse.Namespace) -> int:
    spec = load_spec_file(args.spec)
    base = spec.base if isinstance(spec, ExtendedSpec) else spec
    out_lines = []
    for line in _read_frame_lines(args.infile):
        data = _parse_bits(line, base.data_len, args.bin)
        if isinstance(spec, ExtendedSpec):
            codeword = polar_encode(extended_leaf_vector(data, spec))
        else:
            codeword = polar_encode(base_leaf_vector(data, spec))
        out_lines.append(_format_bits(codeword, args.bin))
    out = _emit_lines(out_lines, args.out)
    if out is not None:
        _write_manifest(
            "encode", [out], {"spec": args.spec, "infile": args.infile, "bin": args.bin},
            config_path=args.spec,
        )
    return EXIT_OK


def cmd_decode(args: argparse.Namespace) -> int:
    spec = load_spec_file(args.spec)
    codec_spec, base, offset = _split_spec(spec)
    decoder = FastScDecoder(codec_spec, args.mode)
    out_lines: list[str] = []
    report: list[str] = []
    failures = 0
    for idx, line in enumerate(_read_frame_lines(args.infile)):
        if args.llr:
            llrs = _parse_llrs(line, codec_spec.n)
        else:
            bits = _parse_bits(line, codec_spec.n, args.bin)
            llrs = 1.0 - 2.0 * bits.astype(np.float64)
        result = decoder.decode(llrs)
        frame = extract_info_bits(result.u_hat, base, offset)
        ok = crc_check(frame, base.crc_len) if base.crc_len else True
        failures += not ok
        out_lines.append(_format_bits(frame[: base.data_len], args.bin))
        report.append(f"frame {idx}: crc {'pass' if ok else 'fail'}")
    if args.profile:
        report.append(json.dumps(decoder.profile().as_row()))
    out = _emit_lines(out_lines, args.out)
    report_stream = sys.stdout if out is not None else sys.stderr
    for line in report:
        print(line, file=report_stream)
    if out is not None:
        _write_manifest(
            "decode",
            [out],
            {
                "spec": args.spec,
                "infile": args.infile,
                "bin": args.bin,
                "llr": args.llr,
                "mode": args.mode,
                "profile": args.profile,
            },
            config_path=args.spec,
        )
    return EXIT_DECODE_FAILURE if failures else EXIT_OK


def _sim_config_from_doc(doc: dict, configuration: str, seed: int, workers: int) -> SimConfig:
    kwargs = {}
    for field in ("n", "k", "crc_len", "target_errors", "max_frames"):
        if field in doc:
            kwargs[field] = int(doc[field])
    if "design_snr_db" in doc:
        kwargs["design_snr_db"] = float(doc["design_snr_db"])
    if "snr_db_list" in doc:
        kwargs["snr_db_list"] = tuple(float(v) for v in doc["snr_db_list"])
    return SimConfig(
        configuration=configuration, seed=seed, workers=workers, **kwargs
    )


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        doc = json.loads(Path(args.config).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse config file {args.config}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("simulation config must be a JSON object")
    configurations = doc.get("configurations")
    if configurations is None:
        configurations = [doc.get("configuration", "A")]
    if not configurations:
        raise ConfigError("no configurations requested")
    seed = int(doc.get("seed", 1))
    if SEED_ENV_VAR in os.environ:
        seed = int(os.environ[SEED_ENV_VAR])
    workers = args.workers if args.workers is not None else int(doc.get("workers", 1))
    out_csv = Path(args.out if args.out is not None else doc.get("out", "fer_results.csv"))
    stem = out_csv.with_suffix("")

    outputs: list[Path] = []
    all_records: list[FerRecord] = []
    profiles = {}
    for name in configurations:
        config = _sim_config_from_doc(doc, str(name), seed, workers)
        profiles[f"config {config.configuration}"] = FrameSimulator(config).profile()

        def _progress(rec: FerRecord) -> None:
            print(
                f"config {rec.config} @ {rec.eb_n0_db:g} dB: "
                f"fer={rec.fer:.3e} ({rec.frame_errors}/{rec.frames})",
                file=sys.stderr,
            )

        records = run_fer(config, progress=_progress)
        all_records.extend(records)
        csv_path = (
            out_csv
            if len(configurations) == 1
            else Path(f"{stem}_{config.configuration}{out_csv.suffix or '.csv'}")
        )
        write_records_csv(records, csv_path)
        outputs.append(csv_path)

    json_path = Path(f"{stem}.json")
    json_path.write_text(json.dumps(records_to_json_dict(all_records), indent=2) + "\n")
    outputs.append(json_path)
    profile_path = Path(f"{stem}_profiles.json")
    profile_path.write_text(
        json.dumps({name: prof.as_row() for name, prof in profiles.items()}, indent=2)
        + "\n"
    )
    outputs.append(profile_path)
    if not args.no_figures:
        fer_fig = Path(f"{stem}.png")
        render_fer_figure(all_records, fer_fig)
        outputs.append(fer_fig)
        prof_fig = Path(f"{stem}_profiles.png")
        render_profile_figure(profiles, prof_fig)
        outputs.append(prof_fig)
    _write_manifest(
        "simulate",
        outputs,
        {"config": args.config, "workers": workers, "no_figures": args.no_figures},
        config_path=args.config,
        seed=seed,
    )
    return EXIT_OK


def cmd_profile(args: argparse.Namespace) -> int:
    spec = load_spec_file(args.spec)
    codec_spec, _, _ = _split_spec(spec)
    modes = ("modified", "baseline") if args.mode == "both" else (args.mode,)
    rows = []
    for mode in modes:
        row = {"mode": mode}
        row.update(profile_traversals(codec_spec, mode).as_row())
        rows.append(row)
    result: dict = {"columns": ["mode", *PROFILE_COLUMNS, "Total"], "rows": rows}
    report = []
    if len(rows) == 2:
        reduction = 1.0 - rows[0]["Total"] / rows[1]["Total"]
        result["reduction"] = reduction
        report.append(f"traversal reduction (modified vs baseline): {100 * reduction:.1f}%")
    text = json.dumps(result, indent=2) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
        for line in report:
            print(line, file=sys.stderr)
        return EXIT_OK
    out = Path(args.out)
    out.write_text(text)
    outputs = [out]
    if not args.no_figures:
        fig = out.with_suffix(".png")
        render_profile_figure(
            {row["mode"]: profile_traversals(codec_spec, row["mode"]) for row in rows}, fig
        )
        outputs.append(fig)
    for line in report:
        print(line)
    _write_manifest(
        "profile",
        outputs,
        {"spec": args.spec, "mode": args.mode, "no_figures": args.no_figures},
        config_path=args.spec,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polar-harq",
        description="Polar codec with pc-frozen-aware fast SC decoding, "
        "HARQ matrix extension, FER simulation, and traversal profiling.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a code spec (optionally extended) as JSON")
    p.add_argument("--n", type=int, default=1024, help="code length (base length with --extend)")
    p.add_argument("--k", type=int, default=1024, help="information leaves, CRC included")
    p.add_argument("--crc", type=int, default=24, help="CRC length in bits")
    p.add_argument("--design-snr", type=float, default=2.0, help="construction design SNR (dB)")
    p.add_argument("--extend", action="store_true", help="emit the doubled-length HARQ spec")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("encode", help="encode data frames to codewords")
    p.add_argument("--spec", required=True, help="code spec JSON path")
    p.add_argument("--in", dest="infile", help="input frames (default stdin)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--bin", action="store_true", help="0/1 character lines instead of hex")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode codewords or LLR lines to data frames")
    p.add_argument("--spec", required=True, help="code spec JSON path")
    p.add_argument("--in", dest="infile", help="input frames (default stdin)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--bin", action="store_true", help="0/1 character lines instead of hex")
    p.add_argument("--llr", action="store_true", help="input lines are decimal LLRs")
    p.add_argument(
        "--mode", choices=("modified", "baseline"), default="modified",
        help="special-node handling of pc-frozen subtrees",
    )
    p.add_argument("--profile", action="store_true", help="append traversal profile to report")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="run an FER sweep from a JSON config")
    p.add_argument("--config", required=True, help="simulation config JSON path")
    p.add_argument("--out", help="CSV output path (default from config or fer_results.csv)")
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("profile", help="emit traversal-profile table for a spec")
    p.add_argument("--spec", required=True, help="code spec JSON path")
    p.add_argument(
        "--mode", choices=("modified", "baseline", "both"), default="both",
        help="which decoder configurations to tabulate",
    )
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_profile)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PolarError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
