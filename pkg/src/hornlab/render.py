"""Raster output: parabolic basins with Fatou-coordinate checkerboards, horn-map
domain bands, and deterministic PPM/JSON/CSV export.

Rendering is row-parallel with no shared mutable state across rows, so results
are byte-identical for any thread count and across runs.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fatou import (
    DEFAULT_CONFIG,
    STATUS_CONVERGED,
    STATUS_ESCAPED,
    STATUS_UNKNOWN,
    FatouConfig,
    _chart_inverse_shifted,
    _forward_steps,
    attract_orbit_grid,
    series_pair,
)
from .maps import MapSpec, NewtonError, germ_data

CHECKER_DARK = (30, 60, 120)
CHECKER_LIGHT = (220, 230, 240)
SENTINEL = (255, 0, 255)


def canonical_hash(descriptor: dict) -> str:
    """Stable digest of a canonicalized run descriptor."""
    blob = json.dumps(descriptor, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class Viewport:
    """Axis-aligned window in the dynamical plane mapped onto a pixel grid."""

    center: complex
    width: float
    height: float
    pixels_x: int
    pixels_y: int

    def __post_init__(self):
        extent = self.width / self.height
        pix = self.pixels_x / self.pixels_y
        if abs(extent - pix) > 1e-3 * max(extent, pix):
            raise ValueError("viewport extent aspect must match pixel aspect within 1e-3")

    def grid(self) -> np.ndarray:
        """Pixel-center sample points; row 0 carries the largest imaginary part."""
        xs = self.center.real + self.width * ((np.arange(self.pixels_x) + 0.5) / self.pixels_x - 0.5)
        ys = self.center.imag + self.height * (0.5 - (np.arange(self.pixels_y) + 0.5) / self.pixels_y)
        return xs[np.newaxis, :] + 1j * ys[:, np.newaxis]

    def describe(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "width": self.width,
            "height": self.height,
            "pixels": [self.pixels_x, self.pixels_y],
        }


@dataclass(frozen=True)
class RasterImage:
    pixels_x: int
    pixels_y: int
    payload: np.ndarray = field(repr=False)  # (pixels_y, pixels_x, 3) uint8
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.payload.shape != (self.pixels_y, self.pixels_x, 3):
            raise ValueError("payload must be pixels_y x pixels_x x 3")

    def to_ppm_bytes(self) -> bytes:
        header = [f"P6"]
        for key in sorted(self.metadata):
            header.append(f"# {key} {self.metadata[key]}")
        header.append(f"{self.pixels_x} {self.pixels_y}")
        header.append("255")
        return ("\n".join(header) + "\n").encode() + self.payload.astype(np.uint8).tobytes()


def _row_chunks(rows: int, threads: int):
    threads = max(1, int(threads))
    per = max(1, math.ceil(rows / threads))
    return [(i, min(i + per, rows)) for i in range(0, rows, per)]


def basin_layers(
    map_spec: MapSpec,
    viewport: Viewport,
    cfg: FatouConfig = DEFAULT_CONFIG,
    series=None,
    pre_iterations: int = 0,
    threads: int = 1,
):
    """Per-pixel verdict, step count, and attracting Fatou value.

    pre_iterations applies f that many times to every sample first (used by
    the checkerboard-translation property); samples escaping during the
    pre-pass are marked escaped at step 0.
    """
    if series is None:
        series = series_pair(map_spec, cfg.series_order_K)
    att = series[0]
    z0 = viewport.grid()
    rows, cols = z0.shape
    status = np.empty((rows, cols), dtype=np.uint8)
    steps = np.empty((rows, cols), dtype=np.int64)
    phi = np.full((rows, cols), np.nan + 1j * np.nan)

    def work(chunk):
        lo, hi = chunk
        z = z0[lo:hi].copy()
        pre_fail = np.zeros(z.shape, dtype=bool)
        if pre_iterations:
            z, pre_fail = _forward_steps(
                map_spec, z.ravel(), np.full(z.size, pre_iterations)
            )
            pre_fail = pre_fail.reshape(hi - lo, cols)
            z = z.reshape(hi - lo, cols)
        zt, n, st = attract_orbit_grid(map_spec, z, att.a, cfg)
        st = np.where(pre_fail, STATUS_ESCAPED, st)
        ok = (st == STATUS_CONVERGED) & (zt != 0)
        vals = np.full(z.shape, np.nan + 1j * np.nan)
        vals[ok] = att(zt[ok]) - n[ok]
        status[lo:hi] = st
        steps[lo:hi] = np.where(pre_fail, 0, n)
        phi[lo:hi] = vals

    chunks = _row_chunks(rows, threads)
    if threads <= 1:
        for c in chunks:
            work(c)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, chunks))
    return status, steps, phi


def checkerboard_parity(phi: np.ndarray) -> np.ndarray:
    """Parity of floor(Re Phi) + floor(Im Phi); -1 where Phi is undefined."""
    out = np.full(phi.shape, -1, dtype=np.int8)
    ok = np.isfinite(phi.real) & np.isfinite(phi.imag)
    par = (np.floor(phi.real[ok]) + np.floor(phi.imag[ok])) % 2
    out[ok] = par.astype(np.int8)
    return out


def _escape_shade(steps: np.ndarray, cap: int) -> np.ndarray:
    scale = np.log1p(np.maximum(steps, 0)) / math.log1p(max(cap, 2))
    return np.clip(40 + 215 * scale, 0, 255).astype(np.uint8)


def render_basin(
    map_spec: MapSpec,
    viewport: Viewport,
    cfg: FatouConfig = DEFAULT_CONFIG,
    threads: int = 1,
    pre_iterations: int = 0,
    map_id: str = "",
    series=None,
) -> RasterImage:
    """Checkerboard of unit Fatou squares on the basin, escape shading outside."""
    status, steps, phi = basin_layers(
        map_spec, viewport, cfg, series=series, pre_iterations=pre_iterations, threads=threads
    )
    img = np.zeros((viewport.pixels_y, viewport.pixels_x, 3), dtype=np.uint8)
    par = checkerboard_parity(phi)
    conv = status == STATUS_CONVERGED
    img[conv & (par == 0)] = CHECKER_DARK
    img[conv & (par == 1)] = CHECKER_LIGHT
    img[conv & (par == -1)] = CHECKER_DARK  # fixed point / undefined coordinate
    esc = status == STATUS_ESCAPED
    shade = _escape_shade(steps, cfg.max_iterations)
    for ch in range(3):
        img[..., ch] = np.where(esc, shade, img[..., ch])
    img[status == STATUS_UNKNOWN] = SENTINEL
    descriptor = {
        "command": "render-basin",
        "map": map_id,
        "viewport": viewport.describe(),
        "config": cfg.to_json(),
        "pre_iterations": pre_iterations,
        "palette": "checkerboard-v1",
    }
    meta = {"map": map_id or "inline", "palette": "checkerboard-v1", "config_hash": canonical_hash(descriptor)}
    return RasterImage(viewport.pixels_x, viewport.pixels_y, img, meta)


def _hue_to_rgb(h: np.ndarray) -> np.ndarray:
    """Vectorized hue (in [0,1)) to RGB with full saturation/value."""
    h6 = (h % 1.0) * 6.0
    k = np.floor(h6)
    f = h6 - k
    q = 1.0 - f
    r = np.select([k == 0, k == 1, k == 2, k == 3, k == 4], [1.0, q, 0.0, 0.0, f], 1.0)
    g = np.select([k == 0, k == 1, k == 2, k == 3, k == 4], [f, 1.0, 1.0, q, 0.0], 0.0)
    b = np.select([k == 0, k == 1, k == 2, k == 3, k == 4], [0.0, 0.0, f, 1.0, 1.0], q)
    return np.stack([r, g, b], axis=-1)


def render_horn_domain(
    map_spec: MapSpec,
    im_range=(-4.0, 4.0),
    resolution=(128, 128),
    cfg: FatouConfig = DEFAULT_CONFIG,
    threads: int = 1,
    map_id: str = "",
) -> RasterImage:
    """Horn-map domain band: verdict colors with an h-value hue overlay."""
    att, rep = series_pair(map_spec, cfg.series_order_K)
    res_re, res_im = int(resolution[0]), int(resolution[1])
    im_min, im_max = float(im_range[0]), float(im_range[1])
    res = np.arange(res_re) / res_re
    ims = im_max - (np.arange(res_im) + 0.5) * (im_max - im_min) / res_im
    img = np.zeros((res_im, res_re, 3), dtype=np.uint8)

    def work(chunk):
        lo, hi = chunk
        for i in range(lo, hi):
            w = res + 1j * ims[i]
            row = np.zeros((res_re, 3), dtype=np.uint8)
            try:
                z, n = _chart_inverse_shifted(map_spec, rep, w, 2.0 * cfg.series_order_K, cfg)
                z, fail = _forward_steps(map_spec, z, n)
            except NewtonError:
                row[:] = SENTINEL
                img[i] = row
                continue
            st = np.full(res_re, STATUS_ESCAPED, dtype=np.uint8)
            ok = ~fail
            zt = np.zeros(res_re, dtype=complex)
            nn = np.zeros(res_re, dtype=np.int64)
            if ok.any():
                zz, kk, ss = attract_orbit_grid(map_spec, z[ok], att.a, cfg)
                st[ok] = ss
                zt[ok] = zz
                nn[ok] = kk
            conv = (st == STATUS_CONVERGED) & (zt != 0)
            if conv.any():
                h = att(zt[conv]) - nn[conv]
                rgb = (_hue_to_rgb(h.real) * 255).astype(np.uint8)
                row[conv] = rgb
            row[st == STATUS_ESCAPED] = (40, 40, 40)
            row[st == STATUS_UNKNOWN] = SENTINEL
            img[i] = row

    chunks = _row_chunks(res_im, threads)
    if threads <= 1:
        for c in chunks:
            work(c)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, chunks))
    descriptor = {
        "command": "render-horn-domain",
        "map": map_id,
        "im_range": [im_min, im_max],
        "resolution": [res_re, res_im],
        "config": cfg.to_json(),
        "palette": "horn-hue-v1",
    }
    meta = {"map": map_id or "inline", "palette": "horn-hue-v1", "config_hash": canonical_hash(descriptor)}
    return RasterImage(res_re, res_im, img, meta)


def export(obj, path, fmt: str | None = None, config_hash: str | None = None) -> None:
    """Write an image (ppm), report/grid (json), or sample table (csv)."""
    path = str(path)
    if fmt is None:
        fmt = path.rsplit(".", 1)[-1].lower()
    try:
        if fmt == "ppm":
            if not isinstance(obj, RasterImage):
                raise TypeError("ppm export needs a RasterImage")
            with open(path, "wb") as fh:
                fh.write(obj.to_ppm_bytes())
        elif fmt == "json":
            if hasattr(obj, "to_json"):
                doc = obj.to_json(config_hash)
            elif isinstance(obj, dict):
                doc = dict(obj)
                if config_hash is not None:
                    doc["config_hash"] = config_hash
            else:
                raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")
            with open(path, "w") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
                fh.write("\n")
        elif fmt == "csv":
            header, rows = obj
            with open(path, "w") as fh:
                if config_hash is not None:
                    fh.write(f"# config_hash {config_hash}\n")
                fh.write(",".join(header) + "\n")
                for row in rows:
                    fh.write(",".join(str(v) for v in row) + "\n")
        else:
            raise ValueError(f"unknown export format {fmt!r}")
    except OSError as exc:
        raise OSError(f"export to {path!r} failed: {exc}") from exc
