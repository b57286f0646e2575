"""On-disk formats: float64 image binaries, PGM previews, CSV tables.

Image binary layout (all integers little-endian)::

    offset  size  field
    0       4     magic b"SQZI"
    4       2     format version (1)
    6       2     kind: 0 quadrature readout, 1 reconstruction
    8       4     rows
    12      4     cols
    16      8     seed (uint64)
    24      32    SHA-256 digest of the channel parameters
    56      4     metadata length n
    60      n     UTF-8 JSON metadata (channel params, amplitude, pitch, ...)
    60+n    8*rows*cols  float64 samples, row-major, top-left origin
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import ChannelParams
from .forward import QuadratureImage, params_digest
from .metrics import CONTOUR_FIELDS, RECORD_FIELDS, Polyline, SweepRecord
from .restore import Reconstruction
from .scene import to_pgm

MAGIC = b"SQZI"
VERSION = 1
KIND_QUADRATURE = 0
KIND_RECONSTRUCTION = 1
_HEADER = struct.Struct("<4sHHIIQ32sI")


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class ImageFile:
    kind: int
    data: np.ndarray
    seed: int
    digest: bytes
    meta: dict


def encode_image(kind: int, data: np.ndarray, seed: int, digest: bytes, meta: dict) -> bytes:
    data = np.ascontiguousarray(data, dtype="<f8")
    blob = json.dumps(meta, sort_keys=True).encode("utf-8")
    head = _HEADER.pack(MAGIC, VERSION, kind, data.shape[0], data.shape[1], seed, digest, len(blob))
    return head + blob + data.tobytes()


def decode_image(payload: bytes) -> ImageFile:
    if len(payload) < _HEADER.size:
        raise FormatError(f"truncated header: {len(payload)} bytes")
    magic, version, kind, rows, cols, seed, digest, n_meta = _HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    start = _HEADER.size + n_meta
    if len(payload) < start:
        raise FormatError(f"truncated metadata: need {n_meta} bytes")
    try:
        meta = json.loads(payload[_HEADER.size:start].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"unreadable metadata: {exc}") from None
    need = 8 * rows * cols
    if len(payload) - start != need:
        raise FormatError(f"expected {need} data bytes, found {len(payload) - start}")
    data = np.frombuffer(payload, dtype="<f8", offset=start).reshape(rows, cols).astype(np.float64)
    return ImageFile(kind, data, seed, digest, meta)


def quadrature_meta(img: QuadratureImage, **extra) -> dict:
    meta = {
        "params": img.params_used.as_dict(),
        "amplitude": img.amplitude,
        "pitch": img.pitch,
        "boundary": img.boundary,
    }
    meta.update(extra)
    return meta


def write_quadrature(path, img: QuadratureImage, **extra) -> None:
    payload = encode_image(KIND_QUADRATURE, img.x_readout, img.seed, img.digest,
                           quadrature_meta(img, **extra))
    Path(path).write_bytes(payload)


def read_quadrature(path) -> tuple[QuadratureImage, dict]:
    f = decode_image(Path(path).read_bytes())
    if f.kind != KIND_QUADRATURE:
        raise FormatError("file holds a reconstruction, not a quadrature image")
    params = ChannelParams(**f.meta["params"])
    if params_digest(params) != f.digest:
        raise FormatError("parameter digest does not match the stored parameters")
    img = QuadratureImage(f.data, params, f.seed, f.meta["amplitude"], f.meta["pitch"],
                          f.meta["boundary"])
    return img, f.meta


def write_reconstruction(path, recon: Reconstruction, source: QuadratureImage, **extra) -> None:
    meta = quadrature_meta(source, nsr=recon.nsr_used, clip=recon.clip_applied, **extra)
    Path(path).write_bytes(
        encode_image(KIND_RECONSTRUCTION, recon.f_tilde, source.seed, source.digest, meta)
    )


def read_reconstruction(path) -> Reconstruction:
    f = decode_image(Path(path).read_bytes())
    if f.kind != KIND_RECONSTRUCTION:
        raise FormatError("file holds a quadrature image, not a reconstruction")
    return Reconstruction(f.data, f.meta["nsr"], f.meta["clip"])


def preview_pgm(values: np.ndarray) -> bytes:
    """Affine rescale min..max to 0..255."""
    lo, hi = float(np.min(values)), float(np.max(values))
    span = hi - lo if hi > lo else 1.0
    return to_pgm(255.0 * (values - lo) / span)


def reconstruction_pgm(recon: Reconstruction) -> bytes:
    """``kappa~`` 0 -> 0 and 1 -> 255, brightness linear in amplitude (as load_raster reads it)."""
    return to_pgm(255.0 * np.clip(recon.f_tilde, 0.0, 1.0))


def write_records(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for rec in records:
            w.writerow(rec.row())


def read_records(path) -> list[SweepRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RECORD_FIELDS:
            raise FormatError(f"unexpected header {reader.fieldnames}")
        return [SweepRecord.from_row(row) for row in reader]


def write_contours(path, polylines: list[Polyline]) -> None:
    """One row per vertex; ``vertex_index`` restarts at 0 for each polyline."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CONTOUR_FIELDS)
        for line in polylines:
            for i, (d, g) in enumerate(zip(line.d_over_w0, line.gain_db)):
                w.writerow([repr(line.level_db), i, repr(float(d)), repr(float(g))])


def write_profile(path, position: np.ndarray, amplitude: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("position", "amplitude"))
        for x, a in zip(position, amplitude):
            w.writerow([repr(float(x)), repr(float(a))])


def kernel_pgm(values: np.ndarray) -> bytes:
    """Kernel normalised to a maximum of 255."""
    return to_pgm(255.0 * values / np.max(values))
