"""Command-line interface.

Subcommands: ``filter`` (denoise one image and write snapshots + monitor
log), ``metrics`` (score a test image against a reference),
``experiment`` (noise a clean image, filter it with several presets, and
log metric curves), ``gen-test-image`` (synthetic inputs), and
``properties`` (the scale-space check suite).

Defaults follow the reference setup: h = 1, dt = 0.05, kappa = 10,
strategy raw, flux-form scheme, reflecting boundaries. Command-line
flags override a JSON config file (--config), which overrides these
defaults. All commands are deterministic given their arguments: the
noise seed is part of the manifest and reruns produce byte-identical
CSV files.

Exit codes: 0 success (and, where requested, all property checks pass);
1 property-check failure; 2 I/O or usage error; 3 solver blow-up
(NonFiniteState); 4 degenerate metrics reference.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .diffusion import DiffusionMatrix, EdgeStoppingSpec, preset
from .errors import CrossDiffError, DegenerateReference, UnknownPreset, UnsupportedCombination
from .field import BoundaryMode, ChannelPair, ImageGrid, ScalarField
from .images import (
    load_image,
    quantize_u8,
    synthetic_image,
    write_pgm,
    write_rescale_sidecar,
)
from .metrics import NoiseSpec, add_gaussian_noise, npb, psnr, snr
from .regularize import Cutoff, parse_strategy
from .scalespace import InvarianceKind, check_invariance, format_report_table, report_rows
from .solver import Scheme, SolverConfig, monitor_rows, run
from .solver import _step_arrays  # step loop with per-step metrics


@dataclass
class RunManifest:
    """Fully-resolved run parameters for the filter/experiment commands."""

    input: str | None = None
    preset: str | None = None
    matrix: str | None = None
    kappa: float = 10.0
    strategy: str = "raw"
    dt: float = 0.05
    h: float = 1.0
    steps: int = 200
    snapshots: str = ""
    seed: int = 0
    noise_sigma: float = 30.0
    boundary: str = "reflect"
    scheme: str = "fluxform"
    clip_input: bool = False
    rescale: str = "none"
    out_prefix: str = "crossdiff"


def _merge_manifest(args: argparse.Namespace) -> RunManifest:
    manifest = RunManifest()
    if getattr(args, "config", None):
        file_values = json.loads(Path(args.config).read_text())
        for key, value in file_values.items():
            if not hasattr(manifest, key):
                raise ValueError(f"unknown config key {key!r}")
            setattr(manifest, key, value)
    for f in fields(RunManifest):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(manifest, f.name, value)
    return manifest


def _matrix_from_manifest(manifest: RunManifest) -> DiffusionMatrix:
    if manifest.matrix:
        parts = [float(p) for p in manifest.matrix.split(",")]
        if len(parts) != 4:
            raise ValueError("--matrix needs four values: d11,d12,d21,d22")
        return DiffusionMatrix(*parts)
    if manifest.preset:
        return preset(manifest.preset).matrix
    raise ValueError("choose a diffusion matrix with --preset or --matrix")


def _config_from_manifest(manifest: RunManifest) -> SolverConfig:
    return SolverConfig(
        matrix=_matrix_from_manifest(manifest),
        edge_stopping=EdgeStoppingSpec(float(manifest.kappa)),
        strategy=parse_strategy(manifest.strategy),
        boundary=BoundaryMode(manifest.boundary),
        dt=float(manifest.dt),
        scheme=Scheme(manifest.scheme),
    )


def _parse_snapshots(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()] if text else []


def _write_csv(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def _load_field(path: str, h: float) -> ScalarField:
    values = load_image(path)
    height, width = values.shape
    return ScalarField(ImageGrid(width=width, height=height, h=h), values)


def _write_snapshot(prefix: str, label: str, t: float, values, rescale: str) -> None:
    # With rescale "none", integer-valued states in [0, 255] round-trip exactly.
    u8, (lo, hi) = quantize_u8(values, rescale)
    out = Path(f"{prefix}_{label}_t{t:g}.pgm")
    write_pgm(out, u8)
    write_rescale_sidecar(f"{out}.rescale.txt", rescale, lo, hi)


def cmd_filter(manifest: RunManifest) -> int:
    try:
        u0 = _load_field(manifest.input, float(manifest.h))
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if manifest.clip_input:
        u0 = ScalarField(u0.grid, np.clip(u0.values, 0.0, 255.0))
    config = _config_from_manifest(manifest)
    v0 = ScalarField.constant(u0.grid, 0.0)
    pair = ChannelPair(u0, v0)
    n_steps = int(manifest.steps)
    snapshot_times = _parse_snapshots(manifest.snapshots) or [n_steps * config.dt]

    traj = run(pair, config, n_steps, snapshot_times=snapshot_times)
    _write_csv(Path(f"{manifest.out_prefix}_monitor.csv"), monitor_rows(traj.monitors))
    for t, state in traj.states:
        _write_snapshot(manifest.out_prefix, "u", t, state.u.values, manifest.rescale)
        _write_snapshot(manifest.out_prefix, "v", t, state.v.values, "symmetric")
    if traj.failed:
        print(
            f"error: state blew up after {len(traj.monitors) - 1} steps; "
            "monitor log written up to the failure",
            file=sys.stderr,
        )
        return 3
    return 0


def cmd_metrics(reference_path: str, test_path: str, out_prefix: str, h: float) -> int:
    try:
        reference = _load_field(reference_path, h)
        test = _load_field(test_path, h)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if reference.grid != test.grid:
        print("error: images have different dimensions", file=sys.stderr)
        return 2
    try:
        snr_db = snr(reference, test)
    except DegenerateReference as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    psnr_db, rmse = psnr(reference, test)
    blur = npb(test)
    print(f"snr_db   {snr_db!r}")
    print(f"psnr_db  {psnr_db!r}")
    print(f"rmse     {rmse!r}")
    print(f"npb      {blur!r}")
    _write_csv(
        Path(f"{out_prefix}_metrics.csv"),
        [["snr_db", "psnr_db", "rmse", "npb"], [repr(x) for x in (snr_db, psnr_db, rmse, blur)]],
    )
    return 0


def _property_suite(
    pair: ChannelPair, config: SolverConfig, n_steps: int, threshold: float
):
    """All supported scale-space checks for this configuration."""
    reports = []
    skipped = []
    reports.append(
        check_invariance(
            InvarianceKind.GREY_SHIFT, pair, config, n_steps, shift=(50.0, 0.0), threshold=threshold
        )
    )
    if isinstance(config.strategy, Cutoff):
        skipped.append("reverse-contrast (cutoff strategy clips -v and v differently)")
    else:
        reports.append(
            check_invariance(InvarianceKind.REVERSE_CONTRAST, pair, config, n_steps, threshold=threshold)
        )
    reports.append(
        check_invariance(InvarianceKind.AVERAGE_GREY, pair, config, n_steps, threshold=threshold)
    )
    periodic = SolverConfig(
        matrix=config.matrix,
        edge_stopping=config.edge_stopping,
        strategy=config.strategy,
        boundary=BoundaryMode.PERIODIC,
        dt=config.dt,
        scheme=config.scheme,
    )
    reports.append(
        check_invariance(
            InvarianceKind.TRANSLATION, pair, periodic, n_steps, shift=(3, 2), threshold=threshold
        )
    )
    return reports, skipped


def cmd_experiment(manifest: RunManifest, presets_arg: str, check_properties: bool) -> int:
    try:
        clean = _load_field(manifest.input, float(manifest.h))
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    preset_names = [p.strip().lower() for p in presets_arg.split(",") if p.strip()]
    if not preset_names:
        print("error: --presets needs at least one preset", file=sys.stderr)
        return 2
    try:
        chosen = [preset(name) for name in preset_names]
    except UnknownPreset as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    noisy = add_gaussian_noise(clean, NoiseSpec(float(manifest.noise_sigma), int(manifest.seed)))
    if manifest.clip_input:
        noisy = ScalarField(noisy.grid, np.clip(noisy.values, 0.0, 255.0))
    grid = clean.grid
    n_steps = int(manifest.steps)
    summary = [["preset", "peak_snr_db", "peak_time", "peak_psnr_db", "final_snr_db"]]
    all_checks_pass = True
    for pr in chosen:
        config = SolverConfig(
            matrix=pr.matrix,
            edge_stopping=EdgeStoppingSpec(float(manifest.kappa)),
            strategy=parse_strategy(manifest.strategy),
            boundary=BoundaryMode(manifest.boundary),
            dt=float(manifest.dt),
            scheme=Scheme(manifest.scheme),
        )
        u = noisy.values.copy()
        v = np.zeros_like(u)
        rows = [["t", "snr_db", "psnr_db", "rmse", "npb"]]
        curve = []
        t = 0.0
        for m in range(n_steps + 1):
            if m > 0:
                try:
                    u, v = _step_arrays(u, v, grid, config)
                except CrossDiffError as exc:
                    print(f"error: preset {pr.name}: {exc}", file=sys.stderr)
                    _write_csv(Path(f"{manifest.out_prefix}_{pr.name}_metrics.csv"), rows)
                    return 3
                t = m * config.dt
            state = ScalarField(grid, u)
            snr_db = snr(clean, state)
            psnr_db, rmse = psnr(clean, state)
            blur = npb(state)
            rows.append([repr(x) for x in (t, snr_db, psnr_db, rmse, blur)])
            curve.append((t, snr_db, psnr_db))
        _write_csv(Path(f"{manifest.out_prefix}_{pr.name}_metrics.csv"), rows)
        peak_t, peak_snr, peak_psnr = max(curve, key=lambda r: r[1])
        summary.append(
            [pr.name] + [repr(x) for x in (peak_snr, peak_t, peak_psnr, curve[-1][1])]
        )
        print(f"{pr.name}: peak SNR {peak_snr:.3f} dB at t = {peak_t:g}")

        if check_properties:
            pair = ChannelPair(noisy, ScalarField.constant(grid, 0.0))
            reports, skipped = _property_suite(pair, config, min(n_steps, 100), 1e-10)
            print(format_report_table(reports))
            for note in skipped:
                print(f"skipped: {note}")
            _write_csv(
                Path(f"{manifest.out_prefix}_{pr.name}_properties.csv"), report_rows(reports)
            )
            all_checks_pass = all_checks_pass and all(r.passed for r in reports)

    _write_csv(Path(f"{manifest.out_prefix}_summary.csv"), summary)
    return 0 if all_checks_pass else 1


def cmd_gen_test_image(kind: str, size: int, out: str) -> int:
    try:
        values = synthetic_image(kind, size)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    u8, _ = quantize_u8(values, "none")
    write_pgm(out, u8)
    print(f"wrote {out}")
    return 0


def cmd_properties(manifest: RunManifest, threshold: float) -> int:
    if manifest.input:
        try:
            u0 = _load_field(manifest.input, float(manifest.h))
        except (OSError, ValueError, RuntimeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    else:
        values = synthetic_image("shapes", 64)
        u0 = ScalarField(ImageGrid(64, 64, float(manifest.h)), values)
        u0 = add_gaussian_noise(u0, NoiseSpec(20.0, int(manifest.seed)))
    config = _config_from_manifest(manifest)
    pair = ChannelPair(u0, ScalarField.constant(u0.grid, 0.0))
    try:
        reports, skipped = _property_suite(pair, config, int(manifest.steps), threshold)
    except UnsupportedCombination as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(format_report_table(reports))
    for note in skipped:
        print(f"skipped: {note}")
    _write_csv(Path(f"{manifest.out_prefix}_properties.csv"), report_rows(reports))
    return 0 if all(r.passed for r in reports) else 1


def _add_manifest_flags(p: argparse.ArgumentParser, with_noise: bool = False) -> None:
    p.add_argument("--config", help="JSON file with manifest defaults")
    p.add_argument("--input", help="input image (.pgm or .png)")
    p.add_argument("--preset", help="diffusion preset (ncdf1..ncdf6, rotation:<theta>)")
    p.add_argument("--matrix", help="explicit matrix d11,d12,d21,d22")
    p.add_argument("--kappa", type=float, help="edge-stopping threshold (default 10)")
    p.add_argument("--strategy", help="raw | cutoff:<M> | smoothed:<sigma>")
    p.add_argument("--dt", type=float, help="time step (default 0.05)")
    p.add_argument("--h", type=float, help="mesh spacing (default 1)")
    p.add_argument("--steps", type=int, help="number of time steps (default 200)")
    p.add_argument("--snapshots", help="comma-separated snapshot times")
    p.add_argument("--boundary", choices=["reflect", "periodic"])
    p.add_argument("--scheme", choices=["fluxform", "central"])
    p.add_argument("--clip-input", dest="clip_input", action="store_const", const=True)
    p.add_argument("--rescale", choices=["none", "minmax"], help="u-channel output rescale")
    p.add_argument("--out-prefix", dest="out_prefix", help="output file prefix")
    if with_noise:
        p.add_argument("--noise-sigma", dest="noise_sigma", type=float, help="noise std dev")
        p.add_argument("--seed", type=int, help="noise seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossdiff",
        description="Nonlinear cross-diffusion image filtering and verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="filter one image and write snapshots")
    _add_manifest_flags(p)

    p = sub.add_parser("metrics", help="score a test image against a reference")
    p.add_argument("reference")
    p.add_argument("test")
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--out-prefix", dest="out_prefix", default="crossdiff")

    p = sub.add_parser("experiment", help="noise + multi-preset filtering experiment")
    _add_manifest_flags(p, with_noise=True)
    p.add_argument("--presets", help="comma-separated preset list", default=None)
    p.add_argument(
        "--check-properties",
        action="store_true",
        help="also run the scale-space property suite per preset",
    )

    p = sub.add_parser("gen-test-image", help="write a synthetic test image")
    p.add_argument("--kind", default="shapes", help="shapes|disk|step|checkerboard|ramp")
    p.add_argument("--size", type=int, default=128)
    p.add_argument("--out", default="test_image.pgm")

    p = sub.add_parser("properties", help="run the scale-space check suite")
    _add_manifest_flags(p)
    p.add_argument("--threshold", type=float, default=1e-10)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "filter":
            manifest = _merge_manifest(args)
            if not manifest.input:
                print("error: filter needs --input", file=sys.stderr)
                return 2
            return cmd_filter(manifest)
        if args.command == "metrics":
            return cmd_metrics(args.reference, args.test, args.out_prefix, args.h)
        if args.command == "experiment":
            manifest = _merge_manifest(args)
            if not manifest.input:
                print("error: experiment needs --input", file=sys.stderr)
                return 2
            presets_arg = args.presets or manifest.preset or ""
            return cmd_experiment(manifest, presets_arg, args.check_properties)
        if args.command == "gen-test-image":
            return cmd_gen_test_image(args.kind, args.size, args.out)
        if args.command == "properties":
            manifest = _merge_manifest(args)
            return cmd_properties(manifest, args.threshold)
    except (CrossDiffError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
