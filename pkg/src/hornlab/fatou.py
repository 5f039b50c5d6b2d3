"""Normalized Fatou coordinates via a truncated Abel series plus orbit iteration.

The attracting (resp. repelling) coordinate solves Phi(f(z)) = Phi(z) + 1 and
has the asymptotic form

    Phi(z) = -1/(az) - gamma * Log(-+ 1/(az)) + b_1 z + ... + b_K z^K + ...

with the principal log, sign - for the attracting chart and + for the
repelling one, and constant term fixed to 0 (the normalization).  Orbits are
iterated into a small trap around the origin where the truncated series is
accurate, then the iteration count is subtracted (attracting) or added
(repelling) back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import maps as _maps
from .maps import DomainError, GermData, MapSpec, NewtonError, germ_data, taylor_coefficients


class OrbitError(RuntimeError):
    """An orbit left the evaluation disk before reaching the trap."""


class ConvergenceError(RuntimeError):
    """The iteration budget ran out before the orbit reached the trap."""


@dataclass(frozen=True)
class FatouConfig:
    """Numerical knobs shared by the Fatou/horn/conjugacy pipelines."""

    series_order_K: int = 10
    trap_radius: float = 1e-2
    trap_angle: float = 0.75 * math.pi
    max_iterations: int = 100_000
    target_tol: float = 1e-10

    def __post_init__(self):
        if self.series_order_K < 2:
            raise ValueError("series order K must be at least 2")
        if not 0 < self.trap_radius:
            raise ValueError("trap radius must be positive")

    @classmethod
    def from_json(cls, doc: dict) -> "FatouConfig":
        known = {k: doc[k] for k in cls.__dataclass_fields__ if k in doc}
        return cls(**known)

    def to_json(self) -> dict:
        return {
            "series_order_K": self.series_order_K,
            "trap_radius": self.trap_radius,
            "trap_angle": self.trap_angle,
            "max_iterations": self.max_iterations,
            "target_tol": self.target_tol,
        }


DEFAULT_CONFIG = FatouConfig()


# --- truncated series algebra (coefficient index = power of z) ---------------


def _ser_mul(p, q):
    n = len(p)
    return np.convolve(p, q)[:n]


def _ser_recip(p):
    n = len(p)
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0 / p[0]
    for k in range(1, n):
        out[k] = -np.dot(p[1 : k + 1], out[k - 1 :: -1]) / p[0]
    return out


def _ser_log1p(p):
    """log(1 + p) for a series p with p[0] = 0."""
    n = len(p)
    one_plus = p.copy()
    one_plus[0] = 1.0
    q = _ser_recip(one_plus)
    out = np.zeros(n, dtype=complex)
    for k in range(1, n):
        out[k] = np.dot(np.arange(1, k + 1) * p[1 : k + 1], q[k - 1 :: -1]) / k
    return out


@dataclass(frozen=True)
class AbelSeries:
    """Truncated normalized Fatou chart near 0 (one direction)."""

    direction: str  # "attracting" | "repelling"
    a: complex
    gamma: complex
    coefficients: tuple  # b_1..b_K
    order_K: int

    def __post_init__(self):
        if self.direction not in ("attracting", "repelling"):
            raise ValueError("direction must be 'attracting' or 'repelling'")

    @property
    def _sign(self) -> float:
        return -1.0 if self.direction == "attracting" else 1.0

    def with_direction(self, direction: str) -> "AbelSeries":
        return replace(self, direction=direction)

    def __call__(self, z):
        inv = 1.0 / (self.a * z)
        acc = 0.0 * z
        for b in reversed(self.coefficients):
            acc = (acc + b) * z
        return -inv - self.gamma * np.log(self._sign * inv) + acc

    def deriv(self, z):
        acc = 0.0 * z
        for k in range(len(self.coefficients), 0, -1):
            acc = acc * z + k * self.coefficients[k - 1]
        return 1.0 / (self.a * z * z) + self.gamma / z + acc

    def abel_defect_coefficients(self, map_spec: MapSpec):
        """Coefficients of Phi(f(z)) - Phi(z) - 1 through order K+1 (should vanish)."""
        base, fdiff = _abel_building_blocks(map_spec, self.a, self.gamma, self.order_K)
        res = base.copy()
        res[0] -= 1.0
        for k, b in enumerate(self.coefficients, start=1):
            res += b * fdiff[k]
        return res


def _abel_building_blocks(map_spec: MapSpec, a, gamma, K):
    """Series data entering the order-by-order Abel match.

    Returns (base, fdiff) where base = [1/(az) - 1/(af(z))] + gamma*log(f(z)/z)
    and fdiff[k] = f(z)^k - z^k, all truncated at order K+1.
    """
    n = K + 2  # powers 0..K+1
    c = taylor_coefficients(map_spec, K + 3)
    c = np.asarray(c, dtype=complex)
    f_over_z = np.zeros(n, dtype=complex)
    f_over_z[: min(n, len(c))] = c[:n]
    num = np.zeros(n, dtype=complex)
    take = c[1 : n + 1]
    num[: len(take)] = take  # (f - z)/z^2, power j holds c_{j+2}
    base = _ser_mul(num, _ser_recip(f_over_z)) / a
    lg = f_over_z.copy()
    lg[0] = 0.0
    base = base + gamma * _ser_log1p(lg)
    fser = np.zeros(n, dtype=complex)
    fser[1 : min(n, len(c) + 1)] = c[: n - 1]
    fdiff = {}
    fpow = np.zeros(n, dtype=complex)
    fpow[0] = 1.0
    for k in range(1, K + 1):
        fpow = _ser_mul(fpow, fser)
        d = fpow.copy()
        if k < n:
            d[k] -= 1.0
        fdiff[k] = d
    return base, fdiff


def solve_abel_series(
    map_spec: MapSpec,
    K: int,
    direction: str = "attracting",
    germ: GermData | None = None,
) -> AbelSeries:
    """Determine b_1..b_K by matching Phi(f(z)) = Phi(z) + 1 order by order.

    The polynomial part is direction independent; only the log branch differs
    between the attracting and repelling charts.
    """
    if K > 16:
        raise ValueError("series order K must be at most 16")
    if germ is None:
        germ = germ_data(map_spec)
    if germ.degeneracy_p != 1:
        raise ValueError("Abel series requires a simple parabolic germ")
    a, gamma = germ.a, germ.gamma
    base, fdiff = _abel_building_blocks(map_spec, a, gamma, K)
    b = np.zeros(K, dtype=complex)
    for k in range(1, K + 1):
        m = k + 1
        val = base[m]
        for j in range(1, k):
            val += b[j - 1] * fdiff[j][m]
        pivot = fdiff[k][m]
        if abs(pivot) < 1e-14 * abs(a):
            raise ArithmeticError("singular order-matching pivot (should not occur for p=1)")
        b[k - 1] = -val / pivot
    return AbelSeries(
        direction=direction, a=a, gamma=gamma, coefficients=tuple(b), order_K=K
    )


def series_pair(map_spec: MapSpec, K: int = DEFAULT_CONFIG.series_order_K):
    """(attracting, repelling) AbelSeries sharing one order-matching solve."""
    att = solve_abel_series(map_spec, K, "attracting")
    return att, att.with_direction("repelling")


# --- petals ------------------------------------------------------------------


@dataclass(frozen=True)
class PetalSpec:
    """Sector-shaped petal described in the chart w = -1/(az) (attracting)
    or w = 1/(az) (repelling), where the relevant axis maps to the positive
    real direction."""

    direction: str  # "attracting" | "repelling"
    kind: str = "alpha"  # "alpha" | "very_large"
    alpha: float = 0.5 * math.pi
    chart_radius: float = 20.0


def _petal_chart(germ_a, direction, z):
    sign = -1.0 if direction == "attracting" else 1.0
    return sign / (germ_a * z)


def petal_membership(germ: GermData, petal: PetalSpec, z) -> bool:
    if z == 0:
        raise ValueError("petal membership is undefined at the parabolic point itself")
    w = _petal_chart(germ.a, petal.direction, z)
    if petal.kind == "alpha":
        return bool(abs(w) > petal.chart_radius and abs(np.angle(w)) < petal.alpha)
    return bool(w.real > petal.chart_radius or abs(w.imag) > petal.chart_radius)


def sample_petal(germ: GermData, petal: PetalSpec, count: int, rng, margin: float = 0.95):
    """Random points of an alpha-petal, drawn in its sector chart."""
    radius = petal.chart_radius * (1.0 + 3.0 * rng.random(count))
    theta = petal.alpha * margin * (2.0 * rng.random(count) - 1.0)
    w = radius * np.exp(1j * theta)
    sign = -1.0 if petal.direction == "attracting" else 1.0
    return sign / (germ.a * w)


# --- orbit machinery ---------------------------------------------------------

STATUS_CONVERGED = 0
STATUS_ESCAPED = 1
STATUS_UNKNOWN = 2


def attract_orbit_grid(map_spec: MapSpec, z, a, cfg: FatouConfig = DEFAULT_CONFIG):
    """Iterate forward until the attracting trap, escape, or the budget.

    Returns (z_final, steps, status) as arrays; steps is the trap entry index
    for converged cells and the escape step for escaped ones.
    """
    z = np.array(z, dtype=complex)
    scalar = z.ndim == 0
    shape = z.shape
    z = np.atleast_1d(z).ravel()
    status = np.full(z.shape, STATUS_UNKNOWN, dtype=np.uint8)
    steps = np.zeros(z.shape, dtype=np.int64)
    pending = np.full(z.shape, True)
    radius = map_spec.evaluation_radius
    for it in range(cfg.max_iterations + 1):
        idx = np.flatnonzero(pending)
        if idx.size == 0:
            break
        za = z[idx]
        trapped = (np.abs(za) < cfg.trap_radius) & (
            np.abs(np.angle(-a * za)) < cfg.trap_angle
        )
        escaped = ~trapped & (np.abs(za) > radius)
        done = trapped | escaped
        hit = idx[done]
        status[idx[trapped]] = STATUS_CONVERGED
        status[idx[escaped]] = STATUS_ESCAPED
        steps[hit] = it
        pending[hit] = False
        if it == cfg.max_iterations:
            break
        live = idx[~done]
        if live.size:
            z[live] = map_spec(z[live])
    steps[pending] = cfg.max_iterations
    if scalar:
        return z[0], int(steps[0]), int(status[0])
    return z.reshape(shape), steps.reshape(shape), status.reshape(shape)


def attracting_fatou(map_spec: MapSpec, series: AbelSeries, z, cfg: FatouConfig = DEFAULT_CONFIG):
    """Extended attracting Fatou coordinate: series(f^n(z)) - n at trap entry."""
    if series.direction != "attracting":
        raise ValueError("attracting_fatou needs an attracting-chart series")
    zt, n, status = attract_orbit_grid(map_spec, z, series.a, cfg)
    if np.isscalar(status) or getattr(status, "ndim", 1) == 0:
        if status == STATUS_ESCAPED:
            raise OrbitError("orbit escaped the evaluation disk: z outside the basin")
        if status == STATUS_UNKNOWN:
            raise ConvergenceError("iteration budget exhausted before trapping")
        if zt == 0:
            raise ValueError("Fatou coordinate is undefined at the fixed point itself")
        return complex(series(zt) - n)
    out = np.full(zt.shape, np.nan + 1j * np.nan)
    ok = status == STATUS_CONVERGED
    # series is singular at 0; the exact fixed point has no finite coordinate
    at_origin = ok & (zt == 0)
    good = ok & ~at_origin
    out[good] = series(zt[good]) - n[good]
    return out, status


def repelling_fatou(map_spec: MapSpec, series: AbelSeries, z, cfg: FatouConfig = DEFAULT_CONFIG):
    """Repelling Fatou coordinate via backward Newton orbits into the trap."""
    if series.direction != "repelling":
        raise ValueError("repelling_fatou needs a repelling-chart series")
    a = series.a
    z = np.array(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    value = np.empty(z.shape, dtype=complex)
    done = np.zeros(z.shape, dtype=bool)
    for it in range(cfg.max_iterations + 1):
        idx = np.flatnonzero(~done)
        if idx.size == 0:
            break
        za = z[idx]
        trapped = (np.abs(za) < cfg.trap_radius) & (np.abs(np.angle(a * za)) < cfg.trap_angle)
        hit = idx[trapped]
        if hit.size:
            value[hit] = series(z[hit]) + it
            done[hit] = True
        live = idx[~trapped]
        if it == cfg.max_iterations:
            break
        if live.size:
            z[live] = _maps._newton_solve(map_spec, z[live], z[live])
    if not done.all():
        raise ConvergenceError("backward orbit failed to reach the repelling trap")
    if scalar:
        return complex(value[0])
    return value


def repelling_parametrization(
    map_spec: MapSpec, series: AbelSeries, w, cfg: FatouConfig = DEFAULT_CONFIG
):
    """Extended repelling Fatou parametrisation Psi_R^ext(w) = f^n(Phi_R^-1(w - n)).

    n is the smallest shift making Re(w - n) <= -R_rep with R_rep = 2K
    (doubled on Newton failure, up to 3 retries); the result is independent of
    the admissible n within target_tol.
    """
    if series.direction != "repelling":
        raise ValueError("repelling parametrization needs a repelling-chart series")
    w = np.array(w, dtype=complex)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    last_err = None
    for attempt in range(4):
        r_rep = 2.0 * cfg.series_order_K * 2.0**attempt
        try:
            z, steps_left = _chart_inverse_shifted(map_spec, series, w, r_rep, cfg)
        except NewtonError as exc:
            last_err = exc
            continue
        out, fail = _forward_steps(map_spec, z, steps_left)
        if fail.any():
            bad = np.flatnonzero(fail)[0]
            raise OrbitError(
                f"forward orbit left the evaluation disk after {int(fail.sum())} failures "
                f"(first at w = {w[bad]}): w outside the domain of Psi_R^ext"
            )
        return complex(out[0]) if scalar else out
    raise NewtonError(f"repelling chart inversion failed after retries: {last_err}")


def _chart_inverse_shifted(map_spec, series, w, r_rep, cfg):
    n = np.ceil(np.maximum(0.0, w.real + r_rep)).astype(np.int64)
    target = w - n
    z = -1.0 / (series.a * target)
    z = _newton_on_series(series, target, z, cfg)
    return z, n


def _newton_on_series(series, target, z0, cfg):
    z = np.array(z0, dtype=complex)
    for _ in range(_maps.NEWTON_MAX_STEPS):
        err = series(z) - target
        if np.max(np.abs(err)) < 1e-13:
            return z - err / series.deriv(z)  # polishing step
        z = z - err / series.deriv(z)
    if np.max(np.abs(series(z) - target)) < cfg.target_tol:
        return z
    raise NewtonError("Newton inversion of the repelling chart did not converge")


def _forward_steps(map_spec, z, counts):
    z = np.array(z, dtype=complex)
    counts = np.asarray(counts)
    fail = np.zeros(z.shape, dtype=bool)
    radius = map_spec.evaluation_radius
    top = int(counts.max()) if counts.size else 0
    for it in range(top):
        live = (counts > it) & ~fail
        if not live.any():
            break
        zn = map_spec(z[live])
        out = np.abs(zn) > radius
        idx = np.flatnonzero(live)
        fail[idx[out]] = True
        z[idx[~out]] = zn[~out]
    return z, fail
