"""Catalog of holomorphic germs fixing 0, Taylor data extraction, Newton inversion.

Every map is represented in coordinates where the marked parabolic point sits
at the origin.  Evaluation is trusted on a disk of radius ``evaluation_radius``
around 0; outside that disk the orbit is considered escaped by the callers
that iterate.  All map objects are immutable and safe to share across threads.
"""

from __future__ import annotations

import cmath
import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

NEWTON_TOL = 1e-13
NEWTON_MAX_STEPS = 64

DEFAULT_CATALOG_ENV = "HORNLAB_CATALOG"


class DomainError(ValueError):
    """A point left the disk where a map's evaluation is trusted."""


class NewtonError(RuntimeError):
    """Newton iteration for a local inverse branch failed to converge."""


@dataclass(frozen=True)
class MapSpec:
    """Base class for composable germ descriptions.  Subclasses are the variants."""

    evaluation_radius: float = 6.0

    def __call__(self, z):
        raise NotImplementedError

    def deriv(self, z):
        raise NotImplementedError


@dataclass(frozen=True)
class Polynomial(MapSpec):
    """f(z) = c1 z + c2 z^2 + ... with zero constant term."""

    coefficients: tuple = (1.0 + 0.0j,)

    def __call__(self, z):
        acc = 0.0 * z
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc * z

    def deriv(self, z):
        acc = 0.0 * z
        for k in range(len(self.coefficients), 0, -1):
            acc = acc * z + k * self.coefficients[k - 1]
        return acc


@dataclass(frozen=True)
class BlaschkeFinite(MapSpec):
    """Degree-d parabolic Blaschke product, shifted so the boundary fixed point is 0.

    The disk model is ((z + a)/(1 + a z))^d with a = (d-1)/(d+1), which fixes
    z = 1 with derivative 1; this object evaluates w -> B(w + 1) - 1.
    """

    d: int = 2

    @property
    def a(self) -> float:
        return (self.d - 1) / (self.d + 1)

    def __call__(self, z):
        u = z + 1.0
        return ((u + self.a) / (1.0 + self.a * u)) ** self.d - 1.0

    def deriv(self, z):
        u = z + 1.0
        base = (u + self.a) / (1.0 + self.a * u)
        return self.d * base ** (self.d - 1) * (1.0 - self.a * self.a) / (1.0 + self.a * u) ** 2


@dataclass(frozen=True)
class BlaschkeInfinite(MapSpec):
    """exp(2(z-1)/(z+1)) shifted so the parabolic boundary point 1 sits at 0."""

    def __call__(self, z):
        return np.exp(2.0 * z / (z + 2.0)) - 1.0

    def deriv(self, z):
        return np.exp(2.0 * z / (z + 2.0)) * 4.0 / (z + 2.0) ** 2


@dataclass(frozen=True)
class Moebius(MapSpec):
    """(az + b)/(cz + d) with ad - bc != 0."""

    a: complex = 1.0 + 0.0j
    b: complex = 0.0j
    c: complex = 0.0j
    d: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate Moebius map (ad - bc = 0)")

    def __call__(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)

    def deriv(self, z):
        det = self.a * self.d - self.b * self.c
        return det / (self.c * z + self.d) ** 2

    def inverse(self, w):
        return (self.d * w - self.b) / (-self.c * w + self.a)


@dataclass(frozen=True)
class Conjugated(MapSpec):
    """change o inner o change^-1, with change invertible on the evaluation disk."""

    inner: MapSpec = field(default_factory=Polynomial)
    change: MapSpec = field(default_factory=Polynomial)

    def __call__(self, z):
        return self.change(self.inner(invert_change(self.change, z)))

    def deriv(self, z):
        u = invert_change(self.change, z)
        fu = self.inner(u)
        return self.change.deriv(fu) * self.inner.deriv(u) / self.change.deriv(u)


@dataclass(frozen=True)
class Composed(MapSpec):
    """parts[-1] o ... o parts[0]: parts applied in declared order."""

    parts: tuple = ()

    def __call__(self, z):
        for p in self.parts:
            z = p(z)
        return z

    def deriv(self, z):
        acc = 1.0 + 0.0 * z
        for p in self.parts:
            acc = acc * p.deriv(z)
            z = p(z)
        return acc


@dataclass(frozen=True)
class Iterated(MapSpec):
    """m-fold iterate of inner."""

    inner: MapSpec = field(default_factory=Polynomial)
    m: int = 1

    def __call__(self, z):
        for _ in range(self.m):
            z = self.inner(z)
        return z

    def deriv(self, z):
        acc = 1.0 + 0.0 * z
        for _ in range(self.m):
            acc = acc * self.inner.deriv(z)
            z = self.inner(z)
        return acc


def invert_change(change: MapSpec, w):
    """Invert a change-of-variable map at w (closed form when available)."""
    if isinstance(change, Polynomial) and len(change.coefficients) == 1:
        return w / change.coefficients[0]
    if isinstance(change, Moebius):
        return change.inverse(w)
    c1 = change.deriv(0.0 + 0.0j)
    if c1 == 0:
        raise DomainError("change of variable not invertible at the required point")
    return _newton_solve(change, w, w / c1)


@dataclass(frozen=True)
class GermData:
    """Local data of a parabolic germ at 0: f(z) = z + a z^2 + b z^3 + ..."""

    a: complex
    b: complex
    gamma: complex | None
    degeneracy_p: int


def evaluate(map_spec: MapSpec, z: complex) -> complex:
    """Evaluate the germ at z; z must lie in the trusted evaluation disk."""
    if np.isscalar(z) or getattr(z, "shape", None) == ():
        if abs(z) > map_spec.evaluation_radius:
            raise DomainError(
                f"|z| = {abs(z):.3g} exceeds evaluation radius {map_spec.evaluation_radius}"
            )
    return map_spec(z)


def derivative(map_spec: MapSpec, z: complex) -> complex:
    return map_spec.deriv(z)


def taylor_coefficients(map_spec: MapSpec, order: int) -> list:
    """Coefficients c_1..c_order of f at 0.

    Exact for polynomials; otherwise discrete Cauchy integrals on a circle of
    radius evaluation_radius/4 with at least 4*order nodes (the FFT of the
    sampled boundary values).
    """
    if order < 1:
        raise ValueError("order must be positive")
    if isinstance(map_spec, Polynomial):
        # exact path: no sampling, so no order cap needed
        coeffs = list(map_spec.coefficients[:order])
        coeffs += [0.0j] * (order - len(coeffs))
        return [complex(c) for c in coeffs]
    if order > 16:
        raise ValueError("sampled Taylor extraction supports order <= 16")
    n = max(4 * order, 64)
    r = map_spec.evaluation_radius / 4.0
    nodes = r * np.exp(2j * np.pi * np.arange(n) / n)
    values = map_spec(nodes)
    if not np.all(np.isfinite(values)):
        raise DomainError("non-analytic point inside the Taylor sampling circle")
    hat = np.fft.fft(values) / n
    ks = np.arange(1, order + 1)
    return [complex(c) for c in hat[1 : order + 1] / r**ks]


def germ_data(map_spec: MapSpec, order: int = 8, tol: float = 1e-12) -> GermData:
    """Extract a = c2, b = c3, gamma = 1 - b/a^2, and the degeneracy order.

    gamma is only defined for simple parabolic germs (degeneracy_p = 1) and is
    None otherwise.
    """
    coeffs = taylor_coefficients(map_spec, order)
    if abs(coeffs[0] - 1.0) > tol:
        raise ValueError(f"derivative at 0 is {coeffs[0]}, not 1: not tangent to identity")
    p = None
    for k in range(2, order + 1):
        if abs(coeffs[k - 1]) > 1e-9:
            p = k - 1
            break
    if p is None:
        raise ValueError(f"all Taylor coefficients past z vanish to order {order}")
    a = coeffs[1]
    b = coeffs[2] if order >= 3 else 0.0j
    gamma = 1.0 - b / (a * a) if p == 1 else None
    return GermData(a=a, b=b, gamma=gamma, degeneracy_p=p)


def iterative_residue_contour(map_spec: MapSpec, radius: float, samples: int = 256) -> complex:
    """Residue at 0 of dz/(f(z) - z) + dz/z by trapezoid quadrature on |z| = radius."""
    if samples < 64:
        raise ValueError("need at least 64 quadrature samples")
    nodes = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    diff = map_spec(nodes) - nodes
    if np.min(np.abs(diff)) < 1e-14:
        raise ZeroDivisionError("f(z) - z vanishes at a quadrature node")
    integrand = nodes * (1.0 / diff + 1.0 / nodes)
    return complex(np.mean(integrand))


def _newton_solve(map_spec: MapSpec, w, guess):
    """Solve f(z) = w by Newton from guess.  Scalar or ndarray inputs."""
    z = guess + 0.0j
    if isinstance(z, np.ndarray):
        return _newton_solve_array(map_spec, w, z)
    prev_step = math.inf
    grew = 0
    for _ in range(NEWTON_MAX_STEPS):
        err = map_spec(z) - w
        if abs(err) < NEWTON_TOL:
            # one polishing step: backward orbits take hundreds of inversions,
            # so the per-step error must sit at the roundoff floor, not at tol
            dz = map_spec.deriv(z)
            return z - err / dz if dz != 0 else z
        dz = map_spec.deriv(z)
        if dz == 0:
            raise NewtonError("derivative vanished during Newton inversion")
        step = err / dz
        mag = abs(step)
        grew = grew + 1 if mag > prev_step else 0
        if grew >= 2:
            raise NewtonError("Newton step grew twice consecutively: divergence")
        prev_step = mag
        z = z - step
    if abs(map_spec(z) - w) < NEWTON_TOL:
        return z
    raise NewtonError("Newton step count exceeded")


def _newton_solve_array(map_spec: MapSpec, w, z):
    z = np.array(z, dtype=complex)
    w = np.broadcast_to(np.asarray(w, dtype=complex), z.shape)
    active = np.ones(z.shape, dtype=bool)
    for _ in range(NEWTON_MAX_STEPS):
        err = map_spec(z[active]) - w[active]
        done = np.abs(err) < NEWTON_TOL
        idx = np.flatnonzero(active)
        hit = idx[done]
        if hit.size:  # polishing step at the roundoff floor
            dz = map_spec.deriv(z[hit])
            z[hit] -= np.where(dz != 0, err[done] / np.where(dz != 0, dz, 1.0), 0.0)
        active[hit] = False
        if not active.any():
            return z
        za = z[active]
        dz = map_spec.deriv(za)
        if np.any(dz == 0):
            raise NewtonError("derivative vanished during Newton inversion")
        z[active] = za - (map_spec(za) - w[active]) / dz
    if np.max(np.abs(map_spec(z) - w)) < NEWTON_TOL:
        return z
    raise NewtonError("Newton step count exceeded on an array solve")


def local_inverse(map_spec: MapSpec, w: complex, guess: complex) -> complex:
    """The branch of f^-1 at w continuously connected to guess (Newton)."""
    return _newton_solve(map_spec, w, guess)


def normalize_germ(map_spec: MapSpec) -> tuple:
    """Rescale a simple parabolic germ so its quadratic coefficient is real positive.

    Returns (Conjugated(map, change), lam) where change(z) = (a/|a|) z, so that
    the conjugate is change o f o change^-1 with new quadratic coefficient |a|.
    The reported lam = conj(a)/|a| is the inverse scale factor: change^-1(z) = lam z.
    """
    data = germ_data(map_spec)
    if data.degeneracy_p != 1:
        raise ValueError("normalization requires a simple parabolic germ")
    a = data.a
    if a == 0:
        raise ValueError("quadratic coefficient vanishes")
    mu = a / abs(a)
    lam = mu.conjugate()
    if mu == 1.0:
        return map_spec, 1.0 + 0.0j
    change = Polynomial(coefficients=(mu,), evaluation_radius=map_spec.evaluation_radius)
    out = Conjugated(
        inner=map_spec, change=change, evaluation_radius=map_spec.evaluation_radius
    )
    return out, lam


# --- catalog -----------------------------------------------------------------


def _complex_from_json(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def map_from_json(doc: dict) -> MapSpec:
    """Build a MapSpec from its JSON description."""
    radius = float(doc.get("evaluation_radius", 6.0))
    variant = doc["variant"]
    if variant == "polynomial":
        coeffs = tuple(_complex_from_json(c) for c in doc["coefficients"])
        return Polynomial(coefficients=coeffs, evaluation_radius=radius)
    if variant == "blaschke_finite":
        return BlaschkeFinite(d=int(doc["d"]), evaluation_radius=radius)
    if variant == "blaschke_infinite":
        return BlaschkeInfinite(evaluation_radius=radius)
    if variant == "moebius":
        a, b, c, d = (_complex_from_json(doc[k]) for k in ("a", "b", "c", "d"))
        return Moebius(a=a, b=b, c=c, d=d, evaluation_radius=radius)
    if variant == "conjugated":
        return Conjugated(
            inner=map_from_json(doc["inner"]),
            change=map_from_json(doc["change"]),
            evaluation_radius=radius,
        )
    if variant == "composed":
        return Composed(
            parts=tuple(map_from_json(p) for p in doc["parts"]), evaluation_radius=radius
        )
    if variant == "iterated":
        return Iterated(inner=map_from_json(doc["inner"]), m=int(doc["m"]), evaluation_radius=radius)
    raise ValueError(f"unknown map variant {variant!r}")


@dataclass(frozen=True)
class CatalogEntry:
    map: MapSpec
    exploratory: bool = False


@dataclass(frozen=True)
class Catalog:
    maps: dict
    pairs: dict

    def map(self, name: str) -> MapSpec:
        try:
            return self.maps[name].map
        except KeyError:
            raise KeyError(f"unknown catalog map {name!r}") from None

    def pair(self, name: str) -> dict:
        try:
            return self.pairs[name]
        except KeyError:
            raise KeyError(f"unknown catalog pair {name!r}") from None

    def simple_parabolic_ids(self) -> list:
        return [k for k, v in self.maps.items() if not v.exploratory]


def load_catalog(path: str | None = None) -> Catalog:
    """Load a catalog JSON file; defaults to the built-in document.

    The HORNLAB_CATALOG environment variable, when set, overrides the built-in
    (the explicit path argument still wins over both).
    """
    if path is None:
        path = os.environ.get(DEFAULT_CATALOG_ENV)
    if path is None:
        text = resources.files("hornlab").joinpath("catalog.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    doc = json.loads(text)
    maps = {
        name: CatalogEntry(map=map_from_json(entry), exploratory=bool(entry.get("exploratory")))
        for name, entry in doc["maps"].items()
    }
    pairs = {}
    for name, entry in doc.get("pairs", {}).items():
        pairs[name] = {
            "source": maps[entry["source"]].map,
            "target": maps[entry["target"]].map,
            "phi": map_from_json(entry["phi"]),
            "source_id": entry["source"],
            "target_id": entry["target"],
        }
    return Catalog(maps=maps, pairs=pairs)
