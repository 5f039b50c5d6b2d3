"""Both directions of the horn-map equivalence: sigma/psi extraction from an
explicit semi-conjugacy, residual verification, and reconstruction of the
semi-conjugacy from (sigma, psi).

Sign conventions.  lifted_phase_shift returns sigma_tilde with
Phi_A^2(phi(z)) = Phi_A^1(z) + sigma_tilde, so the verified relation is
T_sigma_tilde o h1 = h2 o psi.  build_phi follows the reconstruction formula
phi(z) = (Phi_A^2)^-1(Phi_A^1(z) - sigma), whose sigma is the *negative* of
the extracted sigma_tilde; round-trip callers must negate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fatou import (
    DEFAULT_CONFIG,
    STATUS_CONVERGED,
    AbelSeries,
    FatouConfig,
    PetalSpec,
    _chart_inverse_shifted,
    _newton_on_series,
    attract_orbit_grid,
    attracting_fatou,
    repelling_fatou,
    repelling_parametrization,
    sample_petal,
    series_pair,
    solve_abel_series,
)
from .horn import CylinderPoint, cylinder_distance, lifted_horn_map
from .maps import MapSpec, germ_data, local_inverse, taylor_coefficients


class VerificationError(RuntimeError):
    """A numerical certificate failed (residual above its threshold)."""


@dataclass(frozen=True)
class SemiConjugacySpec:
    """phi o f1 = f2 o phi on the relevant sectors of f1's immediate basin."""

    source: MapSpec
    target: MapSpec
    phi: MapSpec

    def residual(self, samples: int = 200, rng=None, petal: PetalSpec | None = None) -> float:
        """Max |phi(f1(z)) - f2(phi(z))| over attracting-petal samples."""
        rng = np.random.default_rng(0) if rng is None else rng
        g1 = germ_data(self.source)
        petal = petal or PetalSpec("attracting", alpha=0.5 * math.pi, chart_radius=30.0)
        z = sample_petal(g1, petal, samples, rng)
        return float(np.max(np.abs(self.phi(self.source(z)) - self.target(self.phi(z)))))


@dataclass(frozen=True)
class PairContext:
    """Precomputed germ data and Abel series for a semi-conjugacy pair."""

    spec: SemiConjugacySpec
    cfg: FatouConfig
    g1: object
    g2: object
    att1: AbelSeries
    rep1: AbelSeries
    att2: AbelSeries
    rep2: AbelSeries

    @classmethod
    def prepare(cls, spec: SemiConjugacySpec, cfg: FatouConfig = DEFAULT_CONFIG):
        att1, rep1 = series_pair(spec.source, cfg.series_order_K)
        att2, rep2 = series_pair(spec.target, cfg.series_order_K)
        return cls(
            spec=spec,
            cfg=cfg,
            g1=germ_data(spec.source),
            g2=germ_data(spec.target),
            att1=att1,
            rep1=rep1,
            att2=att2,
            rep2=rep2,
        )


def _context(spec_or_ctx, cfg) -> PairContext:
    if isinstance(spec_or_ctx, PairContext):
        return spec_or_ctx
    return PairContext.prepare(spec_or_ctx, cfg)


def lifted_phase_shift(
    spec_or_ctx,
    cfg: FatouConfig = DEFAULT_CONFIG,
    samples: int = 50,
    rng=None,
    deviation_tol: float = 1e-8,
) -> tuple:
    """Mean of Phi_A^2(phi(z)) - Phi_A^1(z) over attracting-petal samples.

    Returns (sigma_tilde, max_deviation); raises VerificationError when the
    deviation exceeds deviation_tol (phi is not a semi-conjugacy to working
    precision) or when phi fails to land in the target basin.
    """
    ctx = _context(spec_or_ctx, cfg)
    cfg = ctx.cfg
    rng = np.random.default_rng(7) if rng is None else rng
    petal = PetalSpec("attracting", alpha=0.5 * math.pi, chart_radius=30.0)
    z = sample_petal(ctx.g1, petal, samples, rng)
    pz = ctx.spec.phi(z)
    _, _, st = attract_orbit_grid(ctx.spec.target, pz, ctx.g2.a, cfg)
    if not np.all(st == STATUS_CONVERGED):
        raise VerificationError("phi does not map the sampled petal into the target basin")
    v1, s1 = attracting_fatou(ctx.spec.source, ctx.att1, z, cfg)
    v2, s2 = attracting_fatou(ctx.spec.target, ctx.att2, pz, cfg)
    if not (np.all(s1 == STATUS_CONVERGED) and np.all(s2 == STATUS_CONVERGED)):
        raise VerificationError("Fatou coordinate failed on a phase-shift sample")
    diffs = v2 - v1
    sigma = complex(np.mean(diffs))
    deviation = float(np.max(np.abs(diffs - sigma)))
    if deviation > deviation_tol:
        raise VerificationError(
            f"phase shift is not constant to working precision (deviation {deviation:.3g})"
        )
    return sigma, deviation


def _psi_probe(ctx: PairContext, w: complex, n: int):
    """Chart point zeta = Phi_R^1-inverse of (w - n) and its phi image."""
    cfg = ctx.cfg
    target = np.atleast_1d(np.asarray(w - n, dtype=complex))
    z0 = -1.0 / (ctx.g1.a * target)
    zeta = _newton_on_series(ctx.rep1, target, z0, cfg)[0]
    p = ctx.spec.phi(zeta)
    admissible = bool(
        abs(p) < cfg.trap_radius and abs(np.angle(ctx.g2.a * p)) < cfg.trap_angle
    )
    return admissible, complex(zeta), complex(p)


def extract_psi(
    spec_or_ctx,
    w: complex,
    end: str = "plus",
    cfg: FatouConfig = DEFAULT_CONFIG,
) -> complex:
    """psi(w) = Phi_R^2(phi(Psi_R^1(w - n))) + n for the smallest admissible n.

    Admissibility: phi of the backward chart point lies in the repelling trap
    of the target map.  The value must stabilize: recomputation with n+1 and
    n+2 agrees within target_tol (3-point stabilization check).  Returns the
    lifted value; callers reduce mod Z as needed.
    """
    ctx = _context(spec_or_ctx, cfg)
    cfg = ctx.cfg
    n0 = max(0, math.ceil(w.real + 2.0 * cfg.series_order_K))
    phi_slope = abs(taylor_coefficients(ctx.spec.phi, 1)[0])
    if phi_slope == 0:
        raise VerificationError("phi has vanishing derivative at 0")
    n_est = max(n0, math.ceil(phi_slope / (abs(ctx.g1.a) * cfg.trap_radius * 0.8)))
    n = n_est
    ok, _, _ = _psi_probe(ctx, w, n)
    if ok:
        while n > n0:
            ok_down, _, _ = _psi_probe(ctx, w, n - 1)
            if not ok_down:
                break
            n -= 1
    else:
        while not ok:
            n += max(1, n // 8)
            if n > cfg.max_iterations:
                raise VerificationError(
                    "no admissible backward index: phi never enters the target repelling trap"
                )
            ok, _, _ = _psi_probe(ctx, w, n)
    for _ in range(5):
        vals = []
        for k in (0, 1, 2):
            ok, _, p = _psi_probe(ctx, w, n + k)
            if not ok:
                vals = None
                break
            vals.append(repelling_fatou(ctx.spec.target, ctx.rep2, p, cfg) + n + k)
        if vals is not None and max(
            abs(vals[i] - vals[j]) for i in range(3) for j in range(i + 1, 3)
        ) <= cfg.target_tol:
            return vals[0]
        n += 3
    raise VerificationError("psi value did not stabilize across n, n+1, n+2")


@dataclass(frozen=True)
class EquivalenceReport:
    """sigma, rho+-, and sup-residuals certifying horn-map equivalence."""

    sigma_lifted: complex
    sigma: CylinderPoint
    sigma_deviation: float
    rho_plus: complex | None
    rho_minus: complex | None
    residual_sup: float
    psi_translation_defect: float
    sample_grid: dict = field(default_factory=dict)
    failures: tuple = ()

    def to_json(self, config_hash: str | None = None) -> dict:
        def c(v):
            return None if v is None else [v.real, v.imag]

        doc = {
            "sigma_lifted": c(self.sigma_lifted),
            "sigma_representative": c(self.sigma.representative),
            "sigma_deviation": self.sigma_deviation,
            "rho_plus": c(self.rho_plus),
            "rho_minus": c(self.rho_minus),
            "residual_sup": self.residual_sup,
            "psi_translation_defect": self.psi_translation_defect,
            "sample_grid": self.sample_grid,
            "failures": [str(f) for f in self.failures],
        }
        if config_hash is not None:
            doc["config_hash"] = config_hash
        return doc


def band_grid(im_band=(1.0, 3.0), re_count: int = 20, im_count: int = 10, ends=("plus", "minus")):
    """Sample grid covering |Im w| in the band, both cylinder ends by default."""
    lo, hi = float(im_band[0]), float(im_band[1])
    res = (np.arange(re_count) + 0.5) / re_count
    ims = np.linspace(lo, hi, im_count)
    ws = []
    for t in ims:
        for x in res:
            if "plus" in ends:
                ws.append(complex(x, t))
            if "minus" in ends:
                ws.append(complex(x, -t))
    return ws


def verify_equivalence(
    spec_or_ctx,
    grid=None,
    cfg: FatouConfig = DEFAULT_CONFIG,
) -> EquivalenceReport:
    """Measure sup residual of T_sigma o h1 = h2 o psi over a cylinder grid.

    rho+- are estimated from the three highest-|Im| rows per end, and
    psi_translation_defect is the sup of |psi(w) - w - rho| over the grid.
    """
    ctx = _context(spec_or_ctx, cfg)
    cfg = ctx.cfg
    if grid is None:
        grid = band_grid()
    sigma, deviation = lifted_phase_shift(ctx)
    rows = []  # (w, psi, residual)
    failures = []
    for w in grid:
        end = "plus" if w.imag >= 0 else "minus"
        try:
            psi_w = extract_psi(ctx, w, end)
            h1 = lifted_horn_map(ctx.spec.source, (ctx.att1, ctx.rep1), w, cfg)
            h2 = lifted_horn_map(ctx.spec.target, (ctx.att2, ctx.rep2), psi_w, cfg)
        except Exception as exc:  # partial grids are reported, not fatal
            failures.append(f"w={w}: {exc}")
            continue
        rows.append((w, psi_w, cylinder_distance(h1 + sigma, h2)))
    if not rows:
        raise VerificationError("every grid point failed; no residual to report")
    residual_sup = max(r for _, _, r in rows)
    rho = {}
    defect = 0.0
    for end, sgn in (("plus", 1.0), ("minus", -1.0)):
        end_rows = [(w, p) for w, p, _ in rows if (w.imag >= 0) == (sgn > 0)]
        if not end_rows:
            rho[end] = None
            continue
        levels = sorted({round(abs(w.imag), 12) for w, _ in end_rows}, reverse=True)[:3]
        picked = [p - w for w, p in end_rows if round(abs(w.imag), 12) in levels]
        rho[end] = complex(np.mean(picked))
        defect = max(defect, max(abs((p - w) - rho[end]) for w, p in end_rows))
    return EquivalenceReport(
        sigma_lifted=sigma,
        sigma=CylinderPoint.from_lift(sigma),
        sigma_deviation=deviation,
        rho_plus=rho.get("plus"),
        rho_minus=rho.get("minus"),
        residual_sup=residual_sup,
        psi_translation_defect=defect,
        sample_grid={
            "count": len(rows),
            "im_min": min(w.imag for w, _, _ in rows),
            "im_max": max(w.imag for w, _, _ in rows),
        },
        failures=tuple(failures),
    )


class BuiltPhi:
    """Piecewise evaluator reconstructing the semi-conjugacy from (sigma, psi).

    Attracting branch: phi(z) = (Phi_A^2)^-1(Phi_A^1(z) - sigma); repelling
    branch: phi(z) = Psi_R^{2,ext}(psi(Phi_R^1(z))).  validity(z) reports
    which branch (or both) is chartable at z.
    """

    def __init__(self, f1, f2, sigma, psi_pair, cfg=DEFAULT_CONFIG, chart_radius=10.0):
        self.f1, self.f2 = f1, f2
        self.sigma = complex(sigma)
        if callable(psi_pair):
            psi_pair = (psi_pair, psi_pair)
        self.psi_plus, self.psi_minus = psi_pair
        self.cfg = cfg
        self.g1 = germ_data(f1)
        self.g2 = germ_data(f2)
        self.att1, self.rep1 = series_pair(f1, cfg.series_order_K)
        self.att2, self.rep2 = series_pair(f2, cfg.series_order_K)
        self.att_petal = PetalSpec("attracting", alpha=cfg.trap_angle, chart_radius=chart_radius)
        self.rep_petal = PetalSpec("repelling", alpha=cfg.trap_angle, chart_radius=chart_radius)

    def validity(self, z) -> str:
        from .fatou import petal_membership

        if z == 0:
            return "outside"
        in_att = petal_membership(self.g1, self.att_petal, z)
        in_rep = petal_membership(self.g1, self.rep_petal, z)
        if in_att and in_rep:
            return "overlap"
        if in_att:
            return "attracting"
        if in_rep:
            return "repelling"
        return "outside"

    def attracting_branch(self, z) -> complex:
        t = attracting_fatou(self.f1, self.att1, z, self.cfg) - self.sigma
        return self._invert_attracting(t)

    def _invert_attracting(self, t: complex) -> complex:
        r_inv = 2.0 * self.cfg.series_order_K
        m = max(0, math.ceil(r_inv - t.real))
        target = np.atleast_1d(np.asarray(t + m, dtype=complex))
        z0 = -1.0 / (self.g2.a * target)
        zeta = complex(_newton_on_series(self.att2, target, z0, self.cfg)[0])
        for _ in range(m):
            zeta = local_inverse(self.f2, zeta, zeta)
        return zeta

    def repelling_branch(self, z) -> complex:
        w = repelling_fatou(self.f1, self.rep1, z, self.cfg)
        psi = self.psi_plus if w.imag >= 0 else self.psi_minus
        return repelling_parametrization(self.f2, self.rep2, psi(w), self.cfg)

    def __call__(self, z) -> complex:
        kind = self.validity(z)
        if kind in ("attracting", "overlap"):
            return self.attracting_branch(z)
        if kind == "repelling":
            return self.repelling_branch(z)
        raise ValueError(f"z = {z} is outside both reconstruction charts")

    def check_overlap(self, samples) -> float:
        """Max branch disagreement over overlap samples (the gluing residual)."""
        worst = 0.0
        for z in samples:
            worst = max(worst, abs(self.attracting_branch(z) - self.repelling_branch(z)))
        return worst

    def check_t1_commutation(self, ws, tol=1e-8) -> float:
        worst = 0.0
        for w in ws:
            psi = self.psi_plus if w.imag >= 0 else self.psi_minus
            worst = max(worst, abs(psi(w + 1.0) - psi(w) - 1.0))
        if worst > tol:
            raise VerificationError(f"psi does not commute with T_1 (defect {worst:.3g})")
        return worst


def build_phi(f1, f2, sigma, psi_pair, cfg: FatouConfig = DEFAULT_CONFIG, test_points=None) -> BuiltPhi:
    """Reconstruct the semi-conjugacy evaluator from (sigma, psi).

    sigma here follows the reconstruction formula (Phi_A^2)^-1 o T_{-sigma} o
    Phi_A^1, i.e. it is minus the lifted phase shift reported by
    lifted_phase_shift / verify_equivalence.
    """
    built = BuiltPhi(f1, f2, sigma, psi_pair, cfg)
    if test_points is not None:
        built.check_t1_commutation(test_points)
    return built
