"""Sweep orchestration: simulate -> deconvolve -> PSNR for every grid cell."""

from __future__ import annotations

import csv
import json
import logging
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .. import __version__
from ..forward import MeasurementPolicy, simulate
from ..metrics import (
    RECORD_FIELDS,
    NoCrossing,
    SweepRecord,
    min_resolvable_size,
    psnr,
    psnr_contours,
    seed_average,
)
from ..optics import PsfSpec, gaussian_psf
from ..restore import default_nsr, wiener_deconvolve
from ..scene import ObjectField, rescale_extent
from .. import storage
from .config import W0_REFERENCE, ExperimentConfig

log = logging.getLogger(__name__)

RESOLUTION_FIELDS = ("loss_db", "gain_db", "d_min_over_w0")


class SweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class Cell:
    index: int
    d_over_w0: float
    gain_db: float
    loss_db: float
    seed: int


def cells(cfg: ExperimentConfig) -> list[Cell]:
    """Grid cells in a fixed order: loss, gain, d, seed (seed fastest)."""
    out = []
    for loss in cfg.loss_db:
        for gain in cfg.gain_db:
            for d in cfg.d_over_w0:
                for seed in cfg.seeds:
                    out.append(Cell(len(out), d, gain, loss, seed))
    return out


def evaluate_cell(cfg: ExperimentConfig, base: ObjectField, cell: Cell):
    """Run one cell; returns ``(record, quadrature image, reconstruction)``.

    The noise realisation depends only on the cell's seed, so cells sharing a
    seed see common random numbers across the other axes.
    """
    obj = rescale_extent(base, cell.d_over_w0 * W0_REFERENCE)
    spec = PsfSpec.covering(W0_REFERENCE, obj.pitch)
    params = cfg.channel(cell.gain_db, cell.loss_db)
    img = simulate(obj, spec, params, MeasurementPolicy.amplitude(), cell.seed,
                   cfg.photon_budget, cfg.boundary)
    nsr = default_nsr(params, img.amplitude, obj.mean_kappa())
    recon = wiener_deconvolve(img, gaussian_psf(spec), nsr, clip=cfg.clip)
    record = SweepRecord(cell.d_over_w0, cell.gain_db, cfg.detected_n_b_prime,
                         cell.loss_db, cell.seed, psnr(recon, obj))
    return record, img, recon


def _cell_name(cell: Cell) -> str:
    return f"d{cell.d_over_w0:g}_g{cell.gain_db:g}_l{cell.loss_db:g}_s{cell.seed}"


def run_sweep(cfg: ExperimentConfig, out_dir=None, workers: int = 1) -> list[SweepRecord]:
    """Evaluate every cell and write ``records.csv``, ``manifest.json`` and,
    for a single-loss sweep, ``contours.csv``.

    Rows are written in cell order as they complete, so a failure leaves all
    earlier rows on disk; the raised :class:`SweepError` names the failing
    cell. Results do not depend on ``workers``.
    """
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.previews:
        (out / "previews").mkdir(exist_ok=True)
    base = cfg.build_object()
    grid = cells(cfg)
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()

    def work(cell: Cell):
        try:
            return cell, evaluate_cell(cfg, base, cell)
        except Exception as exc:
            raise SweepError(
                f"cell {cell.index} (d/w0={cell.d_over_w0:g}, gain_db={cell.gain_db:g},"
                f" loss_db={cell.loss_db:g}, seed={cell.seed}) failed: {exc}"
            ) from exc

    records = []
    with open(out / "records.csv", "w", newline="") as fh, \
            ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_FIELDS)
        for cell, (record, img, recon) in pool.map(work, grid):
            writer.writerow(record.row())
            fh.flush()
            records.append(record)
            if cfg.previews:
                stem = _cell_name(cell)
                previews = out / "previews"
                (previews / f"{stem}.readout.pgm").write_bytes(storage.preview_pgm(img.x_readout))
                (previews / f"{stem}.recon.pgm").write_bytes(storage.reconstruction_pgm(recon))
    log.info("sweep: %d cells in %.2fs", len(records), time.perf_counter() - t0)

    if len(cfg.loss_db) == 1 and len(cfg.d_over_w0) > 1 and len(cfg.gain_db) > 1:
        grid_db = psnr_grid(cfg, records)
        if np.all(np.isfinite(grid_db)):
            lines = psnr_contours(grid_db, cfg.d_over_w0, cfg.gain_db, cfg.contour_levels)
            storage.write_contours(out / "contours.csv", lines)
        else:
            warnings.warn("saturated cells in PSNR grid; contours skipped", stacklevel=2)

    write_manifest(out / "manifest.json", cfg, len(records), started,
                   time.perf_counter() - t0)
    return records


def psnr_grid(cfg: ExperimentConfig, records, loss_db: float | None = None) -> np.ndarray:
    """Seed-averaged PSNR as ``grid[gain index, d index]`` for one loss value."""
    loss = cfg.loss_db[0] if loss_db is None else loss_db
    chosen = [r for r in records if r.loss_db == loss]
    avg = seed_average(chosen, key=lambda r: (r.gain_db, r.d_over_w0))
    grid = np.full((len(cfg.gain_db), len(cfg.d_over_w0)), np.inf)
    for i, g in enumerate(cfg.gain_db):
        for j, d in enumerate(cfg.d_over_w0):
            if (g, d) in avg:
                grid[i, j] = avg[(g, d)]
    return grid


def write_manifest(path, cfg: ExperimentConfig, n_records: int, started, wall: float) -> None:
    manifest = {
        "config_digest": cfg.digest(),
        "code_version": __version__,
        "records": n_records,
        "started_utc": started.isoformat(timespec="seconds"),
        "wall_time_s": round(wall, 3),
        "config": cfg.as_dict(),
    }
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def resolution_table(cfg: ExperimentConfig, records) -> list[tuple[float, float, float]]:
    """``(loss_db, gain_db, d_min / w0)`` for every loss/gain pair.

    Raises the :class:`~squeezesar.metrics.NoCrossing` subclass of the first
    pair without a threshold crossing, with the pair named in the message.
    """
    rows = []
    for loss in cfg.loss_db:
        for gain in cfg.gain_db:
            subset = [r for r in records if r.loss_db == loss and r.gain_db == gain]
            try:
                d_min = min_resolvable_size(subset, cfg.resolvable_db)
            except NoCrossing as exc:
                raise type(exc)(f"loss_db={loss:g}, gain_db={gain:g}: {exc}") from exc
            rows.append((loss, gain, d_min))
    return rows


def run_resolution_curve(cfg: ExperimentConfig, out_dir=None, workers: int = 1):
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    records = run_sweep(cfg, out, workers)
    rows = resolution_table(cfg, records)
    with open(out / "resolution.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESOLUTION_FIELDS)
        for loss, gain, d_min in rows:
            w.writerow([repr(float(loss)), repr(float(gain)), repr(float(d_min))])
    return rows
