"""Horn map evaluation, basin verdicts, and cylinder-end expansion checks.

The horn map is h = Phi_A^ext o Psi_R^ext reduced mod Z; it is defined on the
cells of the repelling cylinder whose Psi_R^ext image lands in the parabolic
basin.  Near the two cylinder ends it behaves like w -> w -+ i*pi*gamma up to
an exponentially small error, which expansion_check measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fatou import (
    DEFAULT_CONFIG,
    STATUS_CONVERGED,
    STATUS_ESCAPED,
    STATUS_UNKNOWN,
    AbelSeries,
    FatouConfig,
    OrbitError,
    attract_orbit_grid,
    attracting_fatou,
    repelling_parametrization,
    series_pair,
)
from .maps import MapSpec, NewtonError, germ_data

END_HINT_THRESHOLD = 2.0


@dataclass(frozen=True)
class CylinderPoint:
    """A point of the cylinder C/Z with canonical representative Re in [0,1)."""

    representative: complex
    end_hint: str = "interior"  # "plus_end" | "minus_end" | "interior"

    @classmethod
    def from_lift(cls, w: complex) -> "CylinderPoint":
        w = complex(w)
        rep = w - math.floor(w.real)
        if rep.real >= 1.0:  # guard against floor rounding at the seam
            rep -= 1.0
        if rep.imag >= END_HINT_THRESHOLD:
            hint = "plus_end"
        elif rep.imag <= -END_HINT_THRESHOLD:
            hint = "minus_end"
        else:
            hint = "interior"
        return cls(representative=rep, end_hint=hint)

    def __eq__(self, other):
        if not isinstance(other, CylinderPoint):
            return NotImplemented
        return self.representative == other.representative

    def __hash__(self):
        return hash(self.representative)


def cylinder_distance(u, v) -> float:
    """Distance on C/Z between lifted values u and v (residuals << 1/2)."""
    d = complex(u) - complex(v)
    d -= math.floor(d.real)
    return min(abs(d), abs(d - 1.0), abs(d + 1.0))


@dataclass(frozen=True)
class BasinVerdict:
    """Tri-state outcome of forward iteration toward the parabolic point."""

    status: str  # "converged" | "escaped" | "unknown"
    trap_entry_index: int | None = None
    escape_step: int | None = None
    orbit_length: int = 0
    boundary_stationary: bool = False

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def basin_membership(map_spec: MapSpec, z, cfg: FatouConfig = DEFAULT_CONFIG) -> BasinVerdict:
    """Forward-iterate until attracting trap entry, escape, or the budget."""
    a = germ_data(map_spec).a
    if z == 0:
        # The parabolic point itself: stationary orbit, converged by convention
        # but it sits on the basin boundary, not inside it.
        return BasinVerdict(
            status="converged", trap_entry_index=0, orbit_length=0, boundary_stationary=True
        )
    _, n, status = attract_orbit_grid(map_spec, z, a, cfg)
    if status == STATUS_CONVERGED:
        return BasinVerdict(status="converged", trap_entry_index=n, orbit_length=n)
    if status == STATUS_ESCAPED:
        return BasinVerdict(status="escaped", escape_step=n, orbit_length=n)
    return BasinVerdict(status="unknown", orbit_length=cfg.max_iterations)


def lifted_horn_map(
    map_spec: MapSpec,
    series: tuple,
    w: complex,
    cfg: FatouConfig = DEFAULT_CONFIG,
) -> complex:
    """Un-reduced horn map value Phi_A^ext(Psi_R^ext(w)) for lift-tracking callers."""
    att, rep = series
    z = repelling_parametrization(map_spec, rep, w, cfg)
    return attracting_fatou(map_spec, att, z, cfg)


def horn_map(
    map_spec: MapSpec,
    series: tuple,
    w: complex,
    cfg: FatouConfig = DEFAULT_CONFIG,
) -> CylinderPoint:
    """Horn map value as a cylinder point; raises with the verdict attached
    when w is outside the domain."""
    try:
        return CylinderPoint.from_lift(lifted_horn_map(map_spec, series, w, cfg))
    except OrbitError as exc:
        raise OrbitError(f"w = {w} outside the horn-map domain: {exc}") from exc


@dataclass(frozen=True)
class DecayReport:
    """Measured decay of the horn map toward its end translation."""

    end: str
    im_levels: tuple
    errors: tuple
    rate: float
    lift_offset: int
    passed: bool


def expansion_check(
    map_spec: MapSpec,
    end: str = "plus",
    im_levels=(1.5, 2.0, 2.5),
    cfg: FatouConfig = DEFAULT_CONFIG,
    series: tuple | None = None,
    re_samples: int = 16,
) -> DecayReport:
    """Measure E(t) = sup_Re |h(w) - (w -+ i*pi*gamma)| on horizontal levels.

    The lift is pinned by continuity from the end: the integer offset is read
    off at the outermost anchor level (at least |Im| = 6) where the expansion
    leaves no ambiguity, and must be 0 for the normalized charts.
    """
    if end not in ("plus", "minus"):
        raise ValueError("end must be 'plus' or 'minus'")
    levels = tuple(sorted(float(t) for t in im_levels))
    if any(t < 1.0 for t in levels):
        raise ValueError("every level needs |Im| >= 1")
    if series is None:
        series = series_pair(map_spec, cfg.series_order_K)
    gamma = series[0].gamma
    sgn = 1.0 if end == "plus" else -1.0
    shift = -1j * math.pi * gamma * sgn
    anchor_t = max(6.0, levels[-1])
    anchor = 0.5 + sgn * 1j * anchor_t
    resid = lifted_horn_map(map_spec, series, anchor, cfg) - anchor - shift
    offset = round(resid.real)
    errors = []
    for t in levels:
        best = 0.0
        for j in range(re_samples):
            w = j / re_samples + sgn * 1j * t
            h = lifted_horn_map(map_spec, series, w, cfg) - offset
            best = max(best, abs(h - w - shift))
        errors.append(best)
    logs = np.log(np.maximum(errors, 1e-300))
    rate = float(-np.polyfit(levels, logs, 1)[0]) if len(levels) > 1 else float("nan")
    monotone = all(errors[i + 1] < errors[i] for i in range(len(errors) - 1))
    passed = offset == 0 and monotone and rate >= 0.8 * 2.0 * math.pi
    return DecayReport(
        end=end,
        im_levels=levels,
        errors=tuple(errors),
        rate=rate,
        lift_offset=offset,
        passed=passed,
    )


@dataclass(frozen=True)
class HornDomainGrid:
    """Per-cell basin verdicts of Psi_R^ext over a cylinder viewport."""

    im_min: float
    im_max: float
    resolution_re: int
    resolution_im: int
    status: np.ndarray = field(repr=False)  # uint8 rows x cols, fatou STATUS_* codes
    steps: np.ndarray = field(repr=False)
    converged_above_im: float | None = None
    unknown_count: int = 0

    def to_json(self, config_hash: str | None = None) -> dict:
        doc = {
            "viewport": {
                "re": [0.0, 1.0],
                "im": [self.im_min, self.im_max],
            },
            "resolution": [self.resolution_re, self.resolution_im],
            "status_codes": {"converged": 0, "escaped": 1, "unknown": 2},
            "converged_above_im": self.converged_above_im,
            "unknown_count": self.unknown_count,
            "status": self.status.tolist(),
            "steps": self.steps.tolist(),
        }
        if config_hash is not None:
            doc["config_hash"] = config_hash
        return doc


def domain_probe(
    map_spec: MapSpec,
    im_range=(-4.0, 4.0),
    resolution=(64, 64),
    cfg: FatouConfig = DEFAULT_CONFIG,
    series: tuple | None = None,
) -> HornDomainGrid:
    """Probe the horn-map domain: Psi_R^ext then basin membership per cell.

    "unknown" cells are treated as non-domain but counted, so precision
    problems stay visible.
    """
    res_re, res_im = int(resolution[0]), int(resolution[1])
    if res_re * res_im > 8192 * 8192:
        raise ValueError("resolution above 8192^2 is not supported")
    if series is None:
        series = series_pair(map_spec, cfg.series_order_K)
    att, rep = series
    im_min, im_max = float(im_range[0]), float(im_range[1])
    res = np.arange(res_re) / res_re
    ims = im_min + (np.arange(res_im) + 0.5) * (im_max - im_min) / res_im
    status = np.full((res_im, res_re), STATUS_ESCAPED, dtype=np.uint8)
    steps = np.zeros((res_im, res_re), dtype=np.int64)
    from .fatou import _chart_inverse_shifted, _forward_steps

    for i, t in enumerate(ims):
        w = res + 1j * t
        try:
            z, n = _chart_inverse_shifted(map_spec, rep, w, 2.0 * cfg.series_order_K, cfg)
        except NewtonError:
            status[i, :] = STATUS_UNKNOWN
            continue
        z, fail = _forward_steps(map_spec, z, n)
        ok = ~fail
        if ok.any():
            _, nn, st = attract_orbit_grid(map_spec, z[ok], att.a, cfg)
            status[i, ok] = st
            steps[i, ok] = nn
    unknown = int(np.sum(status == STATUS_UNKNOWN))
    converged_above = None
    row_ok = np.all(status == STATUS_CONVERGED, axis=1)
    for i in range(res_im - 1, -1, -1):
        if not row_ok[i]:
            break
        converged_above = float(ims[i])
    return HornDomainGrid(
        im_min=im_min,
        im_max=im_max,
        resolution_re=res_re,
        resolution_im=res_im,
        status=status,
        steps=steps,
        converged_above_im=converged_above,
        unknown_count=unknown,
    )
