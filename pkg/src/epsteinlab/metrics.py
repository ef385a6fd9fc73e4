"""Conformal metrics e^{2u}|dz|^2 on plane domains, carried as 2-jets of the
log length-density u.

Scenes are round disks, half-planes, unions of disks and images of the unit
disk under a univalent expression.  Besides the hyperbolic metric of each
scene, disk unions (and, by boundary sampling, image domains) carry the
projective metric: the pointwise infimum of the hyperbolic metrics of round
disks contained in the domain.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from .hyperbolic import MoebiusMap
from .schwarzian import (
    HoloExpr,
    HoloJet3,
    Moebius,
    Power,
    Compose,
    parse_expr,
)


class MetricDomainError(ValueError):
    """Point outside the domain of a metric or scene."""


class UnsupportedSceneError(ValueError):
    pass


class OptimizerFailure(RuntimeError):
    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


@dataclass(frozen=True)
class DensityJet:
    """2-jet of u at z for the metric e^{2u}|dz|^2.

    ``u_zz`` and ``u_zzbar`` are None when only first-order data exist
    (projective metrics across the bending locus).
    """

    z: complex
    u: float
    u_z: complex
    u_zz: Optional[complex] = None
    u_zzbar: Optional[float] = None

    @property
    def density(self) -> float:
        return math.exp(self.u)

    @property
    def u_zbar(self) -> complex:
        return self.u_z.conjugate()

    def curvature(self) -> float:
        if self.u_zzbar is None:
            raise ValueError("curvature needs second-order data")
        return -4.0 * math.exp(-2.0 * self.u) * self.u_zzbar


# --- model densities -----------------------------------------------------------

def hyperbolic_density_disk(center, radius: float, z) -> DensityJet:
    """Poincare metric 2r / (r^2 - |z - c|^2) of the disk |z - c| < r."""
    z, c = complex(z), complex(center)
    d = z - c
    q = radius * radius - abs(d) ** 2
    if not q > 0:
        raise MetricDomainError(f"z = {z!r} is not inside disk(c={c!r}, r={radius!r})")
    dbar = d.conjugate()
    return DensityJet(
        z,
        math.log(2.0 * radius / q),
        dbar / q,
        dbar * dbar / (q * q),
        radius * radius / (q * q),
    )


def hyperbolic_density_halfplane(normal, offset: float, z) -> DensityJet:
    """Metric 1/dist(z, boundary) of {z : Re(z conj(n)) < offset}, |n| = 1."""
    z, n = complex(z), complex(normal)
    n = n / abs(n)
    d = offset - (z * n.conjugate()).real
    if not d > 0:
        raise MetricDomainError(f"z = {z!r} is not in the half-plane")
    nb = n.conjugate()
    return DensityJet(z, -math.log(d), nb / (2 * d), nb * nb / (4 * d * d), 1.0 / (4 * d * d))


def constant_density(c: float, z) -> DensityJet:
    return DensityJet(complex(z), math.log(c), 0j, 0j, 0.0)


def scale_density(d: DensityJet, t: float) -> DensityJet:
    """e^{2t} times the metric: shifts u by t."""
    if t == 0:
        return d
    return replace(d, u=d.u + t)


def density_pullback(d: DensityJet, fj: HoloJet3, z) -> DensityJet:
    """Pull back the metric at w = F(z) by a conformal F with jet ``fj`` at z:
    u(z) = U(F(z)) + log|F'(z)|."""
    _, f1, f2, f3 = fj
    if f1 == 0:
        raise MetricDomainError(f"critical point of the conformal map at {z!r}")
    r = f2 / f1
    u = d.u + math.log(abs(f1))
    u_z = d.u_z * f1 + 0.5 * r
    u_zz = None
    u_zzbar = None
    if d.u_zz is not None:
        u_zz = d.u_zz * f1 * f1 + d.u_z * f2 + 0.5 * (f3 / f1 - r * r)
    if d.u_zzbar is not None:
        u_zzbar = d.u_zzbar * abs(f1) ** 2
    return DensityJet(complex(z), u, u_z, u_zz, u_zzbar)


def density_pushforward(d: DensityJet, f: HoloExpr | HoloJet3, w=None) -> DensityJet:
    """Push the metric at z = d.z forward by a conformal f; returns the jet at w = f(z)."""
    fj = f if isinstance(f, HoloJet3) else f.jet(complex(d.z))
    if fj.f1 == 0:
        raise MetricDomainError(f"critical point of the conformal map at {d.z!r}")
    w = fj.f if w is None else complex(w)
    return density_pullback(d, fj.inverse(), w)


# --- scenes ----------------------------------------------------------------------

@dataclass(frozen=True)
class SupportingDisk:
    center: complex
    radius: float

    def contains(self, z, tol: float = 0.0) -> bool:
        return abs(complex(z) - self.center) < self.radius + tol


@dataclass(frozen=True)
class SupportingHalfPlane:
    """{z : Re(z conj(normal)) < offset}; a round disk through infinity."""

    normal: complex
    offset: float


class Scene:
    kind = "scene"

    def contains(self, z) -> bool:
        raise NotImplementedError

    def hyperbolic(self, z) -> DensityJet:
        raise UnsupportedSceneError(f"no hyperbolic metric available for {self.kind} scenes")

    def clearance(self, c) -> float:
        """Euclidean distance from c to the complement (<= 0 outside)."""
        raise NotImplementedError

    def halfplane_offset(self, normal) -> float:
        """Largest offset with {Re(z conj n) < offset} inside the scene (-inf if none)."""
        return -math.inf

    def boundary_distance(self, p) -> float:
        return abs(self.clearance(p))

    def transformed(self, m: MoebiusMap) -> "Scene":
        raise UnsupportedSceneError(f"{self.kind} scenes do not support Moebius transport")


@dataclass(frozen=True)
class RoundDiskScene(Scene):
    center: complex
    radius: float
    kind = "round-disk"

    def contains(self, z):
        return abs(complex(z) - self.center) < self.radius

    def hyperbolic(self, z):
        return hyperbolic_density_disk(self.center, self.radius, z)

    def clearance(self, c):
        return self.radius - abs(complex(c) - self.center)

    @property
    def disks(self):
        return (SupportingDisk(complex(self.center), float(self.radius)),)

    def transformed(self, m):
        return DiskUnionScene(self.disks).transformed(m)


@dataclass(frozen=True)
class HalfPlaneScene(Scene):
    normal: complex
    offset: float
    kind = "half-plane"

    def __post_init__(self):
        n = complex(self.normal)
        object.__setattr__(self, "normal", n / abs(n))

    def contains(self, z):
        return (complex(z) * self.normal.conjugate()).real < self.offset

    def hyperbolic(self, z):
        return hyperbolic_density_halfplane(self.normal, self.offset, z)

    def clearance(self, c):
        return self.offset - (complex(c) * self.normal.conjugate()).real

    def halfplane_offset(self, normal):
        n = complex(normal) / abs(normal)
        return self.offset if abs(n - self.normal) < 1e-15 else -math.inf


@dataclass(frozen=True)
class DiskUnionScene(Scene):
    disks: tuple
    kind = "disk-union"

    def __post_init__(self):
        disks = tuple(d if isinstance(d, SupportingDisk) else SupportingDisk(complex(d[0]), float(d[1]))
                      for d in self.disks)
        if not disks:
            raise ValueError("disk-union scene needs at least one disk")
        for d in disks:
            if not d.radius > 0:
                raise ValueError("disk radii must be positive")
        object.__setattr__(self, "disks", disks)

    def contains(self, z):
        z = complex(z)
        return any(abs(z - d.center) < d.radius for d in self.disks)

    def _covered(self, p, skip=None, tol=1e-12):
        return any(abs(p - d.center) < d.radius - tol for k, d in enumerate(self.disks) if k != skip)

    def _exposed_corners(self):
        pts = []
        ds = self.disks
        for i in range(len(ds)):
            for j in range(i + 1, len(ds)):
                for p in circle_intersections(ds[i], ds[j]):
                    if not self._covered(p):
                        pts.append(p)
        return pts

    def clearance(self, c):
        """Exact distance from c to the complement of the union."""
        c = complex(c)
        if not self.contains(c):
            return -min(abs(abs(c - d.center) - d.radius) for d in self.disks)
        best = math.inf
        for i, d in enumerate(self.disks):
            v = c - d.center
            foot = d.center + d.radius * (v / abs(v) if abs(v) > 0 else 1.0)
            if not self._covered(foot, skip=i):
                best = min(best, d.radius - abs(v))
        for p in self._exposed_corners():
            best = min(best, abs(c - p))
        if best is math.inf:
            # every foot point covered and no corners: c sits at a common center
            best = max(d.radius - abs(c - d.center) for d in self.disks)
        return best

    def boundary_distance(self, p):
        p = complex(p)
        dist = math.inf
        for i, d in enumerate(self.disks):
            v = p - d.center
            foot = d.center + d.radius * (v / abs(v) if abs(v) > 0 else 1.0)
            if not self._covered(foot, skip=i):
                dist = min(dist, abs(abs(v) - d.radius))
        for q in self._exposed_corners():
            dist = min(dist, abs(p - q))
        return dist

    def hyperbolic(self, z):
        if len(self.disks) == 1:
            d = self.disks[0]
            return hyperbolic_density_disk(d.center, d.radius, z)
        if len(self.disks) == 2:
            return two_disk_hyperbolic(self, z)
        raise UnsupportedSceneError("hyperbolic metric of a union of more than two disks is not available")

    def transformed(self, m):
        out = []
        for d in self.disks:
            pole = m.pole()
            if isinstance(pole, complex) and abs(pole - d.center) <= d.radius:
                raise UnsupportedSceneError("Moebius map must keep every disk bounded")
            out.append(image_disk(m, d))
        return DiskUnionScene(tuple(out))


def image_disk(m: MoebiusMap, d: SupportingDisk) -> SupportingDisk:
    """Image of a disk under a Moebius map whose pole lies outside the closed disk."""
    pole = m.pole()
    if not isinstance(pole, complex):
        c = complex(m(d.center))
        return SupportingDisk(c, abs(complex(m(d.center + d.radius)) - c))
    # the inverse point of the pole maps to the center of the image disk
    q = d.center + d.radius ** 2 / (pole - d.center).conjugate()
    c = complex(m(q))
    r = abs(complex(m(d.center + d.radius)) - c)
    return SupportingDisk(c, r)


def circle_intersections(d1: SupportingDisk, d2: SupportingDisk):
    v = d2.center - d1.center
    dist = abs(v)
    if dist == 0 or dist > d1.radius + d2.radius or dist < abs(d1.radius - d2.radius):
        return []
    a = (d1.radius ** 2 - d2.radius ** 2 + dist ** 2) / (2 * dist)
    h2 = d1.radius ** 2 - a * a
    h = math.sqrt(max(h2, 0.0))
    e = v / dist
    base = d1.center + a * e
    if h == 0:
        return [base]
    return [base + 1j * h * e, base - 1j * h * e]


def two_disk_uniformizer(scene: DiskUnionScene) -> HoloExpr:
    """Conformal map of a union of two overlapping disks onto the upper half-plane."""
    d1, d2 = scene.disks
    pts = circle_intersections(d1, d2)
    if len(pts) != 2:
        raise UnsupportedSceneError("two-disk union must have two boundary corners")
    p, q = pts
    # zeta = (z - p)/(z - q) sends the union to a sector with vertex 0
    m = MoebiusMap(1, -p, 1, -q)
    # opening: arguments of the images of the two outer arcs
    far1 = d1.center + d1.radius * (d1.center - d2.center) / abs(d1.center - d2.center)
    far2 = d2.center + d2.radius * (d2.center - d1.center) / abs(d2.center - d1.center)
    mid = complex(m((d1.center + d2.center) / 2))
    a1, a2 = cmath.phase(complex(m(far1))), cmath.phase(complex(m(far2)))
    amid = cmath.phase(mid)
    # order the rays so that the sector (lo, hi) contains amid
    lo, hi = a1, a2
    if not _angle_between(amid, lo, hi):
        lo, hi = a2, a1
    opening = (hi - lo) % (2 * math.pi)
    # rotate the sector to (-opening/2, opening/2), away from the branch cut of the power
    rotate = Moebius(MoebiusMap(cmath.exp(-1j * (lo + opening / 2)), 0, 0, 1))
    k = math.pi / opening
    # z^k opens it to the right half-plane; multiplying by i gives the upper half-plane
    return Compose(Moebius(MoebiusMap(1j, 0, 0, 1)), Compose(Power(k), Compose(rotate, Moebius(m))))


def _angle_between(a, lo, hi):
    span = (hi - lo) % (2 * math.pi)
    return 0 < (a - lo) % (2 * math.pi) < span


def two_disk_hyperbolic(scene: DiskUnionScene, z) -> DensityJet:
    z = complex(z)
    if not scene.contains(z):
        raise MetricDomainError(f"z = {z!r} is not in the scene")
    F = two_disk_uniformizer(scene)
    fj = F.jet(z)
    w = fj.f
    base = hyperbolic_density_halfplane(-1j, 0.0, w)
    return density_pullback(base, fj, z)


@dataclass(frozen=True)
class ImageDomainScene(Scene):
    """f(unit disk) for a univalent expression f.

    The complement is represented by samples of f on the unit circle, joined
    as a polyline; clearances are distances to that polyline.
    """

    expr: HoloExpr
    n_boundary: int = 4096
    kind = "image-domain"

    def __post_init__(self):
        object.__setattr__(self, "_boundary", _boundary_samples(self.expr, self.n_boundary))
        object.__setattr__(self, "_polyline", _Polyline(self._boundary))
        object.__setattr__(self, "_field", ImageDomainField(self.expr))

    def hyperbolic(self, z):
        return self._field(z)

    def contains(self, z):
        try:
            self._field.preimage(z)
        except MetricDomainError:
            return False
        return True

    def boundary_samples(self) -> np.ndarray:
        return self._boundary

    def clearance(self, c):
        c = complex(c)
        dist = self._polyline.distance(c)
        return dist if self.contains(c) else -dist

    def halfplane_offset(self, normal):
        n = complex(normal) / abs(normal)
        return float(np.min((self._boundary * np.conj(n)).real))


def _boundary_samples(expr, n):
    theta = 2 * np.pi * (np.arange(n) + 0.5) / n
    out = []
    for th in theta:
        try:
            v = expr(cmath.exp(1j * th))
        except ValueError:
            continue
        if cmath.isfinite(v) and abs(v) < 1e8:
            out.append(v)
    return np.asarray(out, dtype=complex)


class _Polyline:
    """Closed polyline with precomputed segment data for fast distance queries."""

    def __init__(self, pts):
        self.a = np.asarray(pts, dtype=complex)
        self.ab = np.roll(self.a, -1) - self.a
        L = np.abs(self.ab)
        # segments across a gap (e.g. near a pole) only count by their endpoints
        self.gap = L > 10 * np.median(L) if L.size else L.astype(bool)
        L2 = L ** 2
        self.ok = (L2 > 0) & ~self.gap
        self.inv_L2 = np.where(self.ok, 1.0 / np.where(L2 > 0, L2, 1.0), 0.0)

    def distance(self, c) -> float:
        if self.a.size == 0:
            return math.inf
        d = c - self.a
        s = np.clip((d * np.conj(self.ab)).real * self.inv_L2, 0.0, 1.0)
        return float(np.abs(d - s * self.ab).min())


def _polyline_distance(c, pts):
    return _Polyline(pts).distance(complex(c))


# --- density fields ------------------------------------------------------------

class DensityField:
    """Callable z -> DensityJet."""

    def __call__(self, z) -> DensityJet:
        raise NotImplementedError


@dataclass(frozen=True)
class DiskField(DensityField):
    center: complex = 0j
    radius: float = 1.0

    def __call__(self, z):
        return hyperbolic_density_disk(self.center, self.radius, z)


@dataclass(frozen=True)
class HalfPlaneField(DensityField):
    normal: complex = -1j
    offset: float = 0.0

    def __call__(self, z):
        return hyperbolic_density_halfplane(self.normal, self.offset, z)


@dataclass(frozen=True)
class ConstantField(DensityField):
    c: float = 1.0

    def __call__(self, z):
        return constant_density(self.c, z)


@dataclass(frozen=True)
class SceneField(DensityField):
    """Hyperbolic metric of a scene."""

    scene: Scene

    def __call__(self, z):
        return self.scene.hyperbolic(z)


@dataclass(frozen=True)
class ImageDomainField(DensityField):
    """Push-forward of ``base`` (default: Poincare metric of the unit disk)
    under a univalent expression.  Preimages are found by Newton's method,
    continued along the segment from ``seed`` (default f(0)'s preimage 0)."""

    expr: HoloExpr
    base: DensityField = field(default_factory=DiskField)
    seed: complex = 0j
    inverse: Optional[HoloExpr] = None

    def near(self, z0) -> "ImageDomainField":
        return replace(self, seed=complex(z0))

    def preimage(self, w, tol: float = 1e-14) -> complex:
        w = complex(w)
        if self.inverse is not None:
            return complex(self.inverse(w))
        z = self.expr.invert(w)
        if z is not None:
            z = complex(z)
            if abs(z) < 1 and abs(self.expr(z) - w) <= 1e-10 * max(1.0, abs(w)):
                return z
            raise MetricDomainError(f"{w!r} has no preimage in the unit disk")
        z0 = self.seed
        w0 = self.expr(z0)
        try:
            return self._newton(z0, w, tol)
        except MetricDomainError:
            pass
        # continuation along the segment from f(seed) to w
        z = z0
        steps = 32
        for k in range(1, steps + 1):
            z = self._newton(z, w0 + (w - w0) * k / steps, tol)
        return z

    def _newton(self, z, target, tol):
        f = self.expr
        for _ in range(60):
            j = f.jet(z)
            if j.f1 == 0:
                raise MetricDomainError(f"critical point while inverting at {z!r}")
            step = (j.f - target) / j.f1
            # damp steps that would leave the unit disk
            while abs(z - step) >= 1.0 and abs(step) > 1e-300:
                step *= 0.5
            z = z - step
            if abs(step) <= tol * max(1.0, abs(z)):
                if abs(f(z) - target) > 1e-10 * max(1.0, abs(target)):
                    raise MetricDomainError(f"Newton stalled inverting {target!r}")
                return z
        if abs(f(z) - target) < 1e-11 * max(1.0, abs(target)) and abs(z) < 1:
            return z
        raise MetricDomainError(f"Newton inversion failed for w = {target!r}")

    def __call__(self, w):
        z = self.preimage(w)
        fj = self.expr.jet(z)
        return density_pushforward(self.base(z), fj, complex(w))


@dataclass(frozen=True)
class MoebiusImageField(DensityField):
    """Push-forward of any field by a Moebius map (natural transport of metrics)."""

    base: DensityField
    m: MoebiusMap

    def __call__(self, w):
        minv = self.m.inverse()
        z = complex(minv(complex(w)))
        return density_pushforward(self.base(z), Moebius(self.m).jet(z), complex(w))


# --- projective metric ---------------------------------------------------------

@dataclass(frozen=True)
class ProjectiveSearch:
    grid: int = 41
    halfplane_directions: int = 256
    xatol: float = 1e-12
    fatol: float = 1e-15
    restarts: int = 2
    maxiter: int = 4000


@dataclass(frozen=True)
class ProjectiveResult:
    jet: DensityJet
    support: object  # SupportingDisk or SupportingHalfPlane
    converged: bool


def _disk_logdensity(center, radius, z):
    q = radius * radius - abs(z - center) ** 2
    if q <= 0:
        return math.inf
    return math.log(2.0 * radius / q)


def projective_density(scene: Scene, z, search: ProjectiveSearch = ProjectiveSearch()) -> ProjectiveResult:
    """Infimum over round disks D in the scene containing z of the hyperbolic density of D.

    For each candidate center c the largest admissible disk has radius
    clearance(c), so the search is over centers only.  Coarse grid, then
    Nelder-Mead refinement with restarts; half-planes are scanned by normal
    direction when the scene admits them.
    """
    z = complex(z)
    if not scene.contains(z):
        raise MetricDomainError(f"z = {z!r} is not in the scene")
    if isinstance(scene, RoundDiskScene):
        d = scene.disks[0]
        return ProjectiveResult(hyperbolic_density_disk(d.center, d.radius, z), d, True)
    if isinstance(scene, HalfPlaneScene):
        jet = hyperbolic_density_halfplane(scene.normal, scene.offset, z)
        return ProjectiveResult(jet, SupportingHalfPlane(scene.normal, scene.offset), True)
    if isinstance(scene, DiskUnionScene) and len(scene.disks) == 1:
        d = scene.disks[0]
        return ProjectiveResult(hyperbolic_density_disk(d.center, d.radius, z), d, True)

    def objective(x):
        c = complex(x[0], x[1])
        r = scene.clearance(c)
        if r <= 0:
            return math.inf
        return _disk_logdensity(c, r, z)

    # coarse grid of centers within the clearance-scale box around z
    r0 = scene.clearance(z)
    span = _search_span(scene, z, r0)
    xs = np.linspace(z.real - span, z.real + span, search.grid)
    ys = np.linspace(z.imag - span, z.imag + span, search.grid)
    best, best_x = math.inf, np.array([z.real, z.imag])
    for x in xs:
        for y in ys:
            v = objective((x, y))
            if v < best:
                best, best_x = v, np.array([x, y])
    converged = False
    step = 2 * span / (search.grid - 1)
    x0 = best_x
    for _ in range(search.restarts + 1):
        previous = best
        simplex = np.array([x0, x0 + [step, 0], x0 + [0, step]])
        res = optimize.minimize(
            objective, x0, method="Nelder-Mead",
            options={"xatol": search.xatol, "fatol": search.fatol, "maxiter": search.maxiter,
                     "initial_simplex": simplex},
        )
        if res.fun <= best:
            best, x0 = float(res.fun), res.x
        # converged once a restart no longer improves the value
        converged = bool(res.success) or abs(previous - best) <= 1e-13 * max(1.0, abs(best))
        step = max(step * 0.01, 1e-9)
    c = complex(x0[0], x0[1])
    support = SupportingDisk(c, scene.clearance(c))
    jet = hyperbolic_density_disk(c, support.radius, z)

    hp = _best_halfplane(scene, z, search.halfplane_directions)
    if hp is not None and hp[0] < jet.u - 1e-15:
        n, off = hp[1], hp[2]
        jet = hyperbolic_density_halfplane(n, off, z)
        support = SupportingHalfPlane(n, off)
    if hp is not None and hp[0] <= best + 1e-6 * max(1.0, abs(best)):
        # disks escaping to infinity approach the supporting half-plane; the
        # window covers the discretization of image-domain boundaries
        converged = True
    if not math.isfinite(jet.u):
        raise OptimizerFailure("projective search found no admissible disk", best=support)
    # only first-order data are meaningful for the infimum
    jet = DensityJet(z, jet.u, jet.u_z)
    if not converged:
        raise OptimizerFailure("projective density search did not converge", best=(jet, support))
    return ProjectiveResult(jet, support, converged)


def _search_span(scene, z, r0):
    if isinstance(scene, DiskUnionScene):
        lo = min((d.center.real - d.radius) for d in scene.disks)
        hi = max((d.center.real + d.radius) for d in scene.disks)
        lo_i = min((d.center.imag - d.radius) for d in scene.disks)
        hi_i = max((d.center.imag + d.radius) for d in scene.disks)
        return max(abs(z.real - lo), abs(z.real - hi), abs(z.imag - lo_i), abs(z.imag - hi_i))
    return max(4.0 * r0, 1e-3)


def _best_halfplane(scene, z, n_dirs):
    best = None
    for k in range(n_dirs):
        n = cmath.exp(2j * math.pi * k / n_dirs)
        off = scene.halfplane_offset(n)
        dist = off - (z * n.conjugate()).real
        if math.isfinite(off) and dist > 0:
            u = -math.log(dist)
            if best is None or u < best[0]:
                best = (u, n, off)
    if best is None:
        return None

    # refine the direction
    def obj(phi):
        n = cmath.exp(1j * phi)
        off = scene.halfplane_offset(n)
        dist = off - (z * n.conjugate()).real
        return -math.log(dist) if dist > 0 and math.isfinite(off) else 1e300

    phi0 = cmath.phase(best[1])
    h = 2 * math.pi / n_dirs
    res = optimize.minimize_scalar(obj, bounds=(phi0 - h, phi0 + h), method="bounded",
                                   options={"xatol": 1e-12})
    if res.fun < best[0]:
        n = cmath.exp(1j * res.x)
        best = (float(res.fun), n, scene.halfplane_offset(n))
    return best


def disk_in_scene(scene: Scene, disk: SupportingDisk, n: int = 512, tol: float = 1e-9) -> bool:
    """Boundary-sample containment test: the circle shrunk by ``tol`` lies in the scene."""
    theta = 2 * np.pi * np.arange(n) / n
    pts = disk.center + (disk.radius - tol) * np.exp(1j * theta)
    return all(scene.contains(p) for p in pts) and scene.contains(disk.center)


def contact_points(scene: Scene, disk: SupportingDisk, n: int = 2048, tol: float = 1e-4) -> list:
    """Points where the disk's boundary circle touches the scene boundary.

    The boundary-distance profile is sampled at ``n`` angles; each local
    minimum is refined by a bounded one-dimensional search and kept when the
    refined distance is below ``tol`` (relative to the radius when it exceeds 1).
    """
    theta = 2 * np.pi * np.arange(n) / n
    step = 2 * np.pi / n

    def dist(th):
        return scene.boundary_distance(disk.center + disk.radius * cmath.exp(1j * th))

    prof = np.array([dist(th) for th in theta])
    limit = tol * max(1.0, disk.radius)
    if np.all(prof < limit):
        return [disk.center + disk.radius * cmath.exp(1j * th) for th in theta[:: max(1, n // 8)]]
    minima = [k for k in range(n) if prof[k] <= prof[k - 1] and prof[k] <= prof[(k + 1) % n]]
    out = []
    for k in minima:
        res = optimize.minimize_scalar(dist, bounds=(theta[k] - step, theta[k] + step), method="bounded",
                                       options={"xatol": 1e-12})
        th = float(res.x) if res.fun < prof[k] else theta[k]
        if min(res.fun, prof[k]) < limit:
            p = disk.center + disk.radius * cmath.exp(1j * th)
            if all(abs(p - q) > 10 * step * disk.radius for q in out):
                out.append(p)
    return out


@dataclass(frozen=True)
class MetricComparison:
    z: complex
    u_hyperbolic: float
    u_projective: float
    ordered: bool
    gap: float


def metric_compare(scene: Scene, z, tol: float = 1e-9, search: ProjectiveSearch = ProjectiveSearch()) -> MetricComparison:
    """Check u_h(z) <= u_proj(z) + tol (Schwarz lemma: hyperbolic <= projective)."""
    z = complex(z)
    uh = scene.hyperbolic(z).u
    up = projective_density(scene, z, search).jet.u
    return MetricComparison(z, uh, up, uh <= up + tol, up - uh)


@dataclass(frozen=True)
class ProjectiveField(DensityField):
    """First-order projective metric of a scene, as a field."""

    scene: Scene
    search: ProjectiveSearch = ProjectiveSearch()

    def __call__(self, z):
        return projective_density(self.scene, z, self.search).jet


# --- scene parsing -----------------------------------------------------------------

class SceneParseError(ValueError):
    pass


def _pt(v, where):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        try:
            return complex(float(v[0]), float(v[1]))
        except (TypeError, ValueError):
            pass
    if isinstance(v, (int, float)):
        return complex(v)
    raise SceneParseError(f"{where}: expected [x, y], got {v!r}")


def _num(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SceneParseError(f"{where}: expected a number, got {v!r}")
    return float(v)


def _radius(v, where):
    r = _num(v, where)
    if not (r > 0 and math.isfinite(r)):
        raise SceneParseError(f"{where}: radius must be positive, got {r!r}")
    return r


def parse_scene(obj) -> Scene:
    """Build a scene from its JSON form (with or without the ``domain`` wrapper)."""
    where = "$"
    if isinstance(obj, dict) and "domain" in obj:
        obj, where = obj["domain"], "$.domain"
    if not isinstance(obj, dict) or "type" not in obj:
        raise SceneParseError(f"{where}: expected an object with a 'type' field")
    kind = obj["type"]
    try:
        if kind == "round-disk":
            return RoundDiskScene(_pt(obj.get("c"), f"{where}.c"), _radius(obj.get("r"), f"{where}.r"))
        if kind == "half-plane":
            return HalfPlaneScene(_pt(obj.get("normal"), f"{where}.normal"),
                                  _num(obj.get("offset", 0.0), f"{where}.offset"))
        if kind == "disk-union":
            disks = obj.get("disks")
            if not isinstance(disks, list) or not disks:
                raise SceneParseError(f"{where}.disks: expected a nonempty list")
            out = []
            for k, d in enumerate(disks):
                if not isinstance(d, dict):
                    raise SceneParseError(f"{where}.disks[{k}]: expected an object")
                r = _radius(d.get("r"), f"{where}.disks[{k}].r")
                out.append(SupportingDisk(_pt(d.get("c"), f"{where}.disks[{k}].c"), r))
            return DiskUnionScene(tuple(out))
        if kind == "image-domain":
            text = obj.get("expr")
            if not isinstance(text, str):
                raise SceneParseError(f"{where}.expr: expected an expression string")
            try:
                return ImageDomainScene(parse_expr(text))
            except ValueError as exc:
                raise SceneParseError(f"{where}.expr: {exc}") from None
    except SceneParseError:
        raise
    except (TypeError, ValueError) as exc:
        raise SceneParseError(f"{where}: {exc}") from None
    raise SceneParseError(f"{where}.type: unknown scene type {kind!r}")


def scene_field(scene: Scene) -> DensityField:
    if isinstance(scene, ImageDomainScene):
        return ImageDomainField(scene.expr)
    return SceneField(scene)
