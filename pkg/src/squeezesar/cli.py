"""Command-line entry point.

Exit codes: 0 success, 1 validation error (bad flags, bad config, bad
parameters), 2 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, storage
from .forward import MeasurementPolicy, simulate
from .harness.config import W0_REFERENCE, ConfigError, ExperimentConfig, load_config
from .harness.sweep import run_resolution_curve, run_sweep
from .metrics import NoCrossing, psnr
from .optics import (
    ArrayGeometry,
    PsfSpec,
    aliasing_spacing,
    fresnel_compressed_psf,
    gaussian_psf,
    resolution_limit,
    strip_map_waist,
    synthetic_aperture,
    view_angle,
)
from .restore import default_nsr, wiener_deconvolve
from .scene import generate_bar_chart, rescale_extent, save_raster

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _config(args) -> ExperimentConfig:
    return load_config(args.config) if args.config else ExperimentConfig()


def _out(args, cfg: ExperimentConfig | None = None) -> Path:
    out = Path(args.out) if args.out else Path(cfg.output_dir if cfg else ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_chart(args) -> int:
    cfg = _config(args)
    obj = generate_bar_chart(
        args.rows or cfg.chart_rows, args.cols or cfg.chart_cols,
        cfg.chart_groups if args.groups is None else args.groups,
        cfg.chart_bars, cfg.chart_dark_kappa, cfg.chart_bright_kappa,
    )
    path = _out(args) / "chart.pgm"
    path.write_bytes(save_raster(obj))
    print(f"wrote {path} ({obj.shape[0]}x{obj.shape[1]}, mean kappa {obj.mean_kappa():.6f})")
    return EXIT_OK


def _pick(value, axis):
    return axis[0] if value is None else value


def cmd_simulate(args) -> int:
    cfg = _config(args)
    d = _pick(args.d_over_w0, cfg.d_over_w0)
    gain = _pick(args.gain_db, cfg.gain_db)
    loss = _pick(args.loss_db, cfg.loss_db)
    seed = _pick(args.seed, cfg.seeds)
    obj = rescale_extent(cfg.build_object(), d * W0_REFERENCE)
    spec = PsfSpec.covering(W0_REFERENCE, obj.pitch)
    params = cfg.channel(gain, loss)
    img = simulate(obj, spec, params, MeasurementPolicy.amplitude(), seed,
                   cfg.photon_budget, cfg.boundary)
    out = _out(args, cfg)
    storage.write_quadrature(out / "quadrature.bin", img, w0=W0_REFERENCE,
                             mean_kappa=obj.mean_kappa(), d_over_w0=d)
    (out / "quadrature.pgm").write_bytes(storage.preview_pgm(img.x_readout))
    print(f"wrote {out / 'quadrature.bin'} and quadrature.pgm"
          f" (d/w0={d:g}, gain_db={gain:g}, loss_db={loss:g}, seed={seed},"
          f" n_P'={params.n_p_prime:.6g}, N_B'={params.n_b_prime:.6g})")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    img, meta = storage.read_quadrature(args.input)
    kernel = gaussian_psf(PsfSpec.covering(meta["w0"], img.pitch))
    nsr = args.nsr
    if nsr is None:
        nsr = default_nsr(img.params_used, img.amplitude, meta["mean_kappa"])
    recon = wiener_deconvolve(img, kernel, nsr, clip=not args.no_clip)
    out = _out(args)
    storage.write_reconstruction(out / "reconstruction.bin", recon, img,
                                 w0=meta["w0"], mean_kappa=meta["mean_kappa"])
    (out / "reconstruction.pgm").write_bytes(storage.reconstruction_pgm(recon))
    line = f"wrote {out / 'reconstruction.bin'} and reconstruction.pgm (nsr={nsr:.6g})"
    if args.config:
        cfg = load_config(args.config)
        truth = rescale_extent(cfg.build_object(), meta.get("d_over_w0", 1.0) * W0_REFERENCE)
        line += f", PSNR {psnr(recon, truth):.3f} dB"
    print(line)
    return EXIT_OK


def _sweep_config(args) -> ExperimentConfig:
    cfg = _config(args)
    if args.seed:
        cfg = replace(cfg, seeds=tuple(args.seed))
    return cfg


def cmd_sweep(args) -> int:
    cfg = _sweep_config(args)
    out = _out(args, cfg)
    records = run_sweep(cfg, out, args.workers)
    print(f"wrote {len(records)} records to {out / 'records.csv'}")
    return EXIT_OK


def cmd_resolution(args) -> int:
    cfg = _sweep_config(args)
    out = _out(args, cfg)
    rows = run_resolution_curve(cfg, out, args.workers)
    print("loss_db,gain_db,d_min_over_w0")
    for loss, gain, d_min in rows:
        print(f"{loss:g},{gain:g},{d_min:.6g}")
    return EXIT_OK


def cmd_array_analyze(args) -> int:
    geom = ArrayGeometry(args.rho, args.L, args.D, args.wavelength, args.z)
    print(f"view_angle_rad = {view_angle(geom):.10g}")
    print(f"resolution_limit_m = {resolution_limit(geom):.10g}")
    print(f"aliasing_spacing_m = {aliasing_spacing(geom):.10g}")
    print(f"synthetic_aperture_m = {synthetic_aperture(geom):.10g}")
    print(f"psf_waist_m = {strip_map_waist(geom.aperture):.10g}")
    if args.profile_out:
        window = args.window or 3.5 * aliasing_spacing(geom)
        profile = fresnel_compressed_psf(geom, args.n_samples, window)
        storage.write_profile(args.profile_out, profile.position, profile.amplitude)
        print(f"wrote {args.profile_out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="squeezesar", description="Squeezed-light SAR imaging simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seeds_many=False):
        p.add_argument("--config", help="config file or preset_<name> (fig3c, fig3d, fig4)")
        p.add_argument("--out", help="output directory")
        if seeds_many:
            p.add_argument("--seed", type=int, action="append",
                           help="override the seed list (repeatable)")
        else:
            p.add_argument("--seed", type=int)

    p = sub.add_parser("chart", help="write the bar chart as PGM")
    common(p)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--groups", type=int)
    p.set_defaults(func=cmd_chart)

    p = sub.add_parser("simulate", help="simulate one noisy homodyne image")
    common(p)
    p.add_argument("--d-over-w0", type=float)
    p.add_argument("--gain-db", type=float)
    p.add_argument("--loss-db", type=float)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="Wiener-deconvolve a quadrature image")
    common(p)
    p.add_argument("--input", required=True, help="quadrature .bin written by simulate")
    p.add_argument("--nsr", type=float, help="override the default noise-to-signal ratio")
    p.add_argument("--no-clip", action="store_true")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("sweep", help="run a parameter sweep and write records.csv")
    common(p, seeds_many=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("resolution", help="d_min at the resolvability threshold vs loss")
    common(p, seeds_many=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_resolution)

    p = sub.add_parser("array-analyze", help="discrete-array view angle, resolution, aliasing")
    p.add_argument("--rho", type=float, required=True, help="antennas per metre")
    p.add_argument("--L", type=float, required=True, help="array length (m)")
    p.add_argument("--D", type=float, required=True, help="antenna aperture (m)")
    p.add_argument("--lambda", dest="wavelength", type=float, required=True, help="wavelength (m)")
    p.add_argument("--z", type=float, required=True, help="range (m)")
    p.add_argument("--profile-out", help="write the compressed 1-D PSF as CSV")
    p.add_argument("--n-samples", type=int, default=4001)
    p.add_argument("--window", type=float, help="object-plane window (m)")
    p.set_defaults(func=cmd_array_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except NoCrossing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
