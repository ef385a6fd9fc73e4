"""Epstein surfaces of conformal metrics and their shape operators.

The Epstein point of e^{2u}|dz|^2 at z is the point x = (w, t) of H^3 on the
horosphere {v_x(z) = e^u} where the horosphere family is tangent to the
surface.  Solving v_x(z) = e^u and d/dz log v_x(z) = u_z gives

    t = 2 e^u / (e^{2u} + 4|u_z|^2),    w = z + 4 conj(u_z) / (e^{2u} + 4|u_z|^2).

Rescaling the metric by e^{2s} moves the point a hyperbolic distance s along
the surface normal.  Shape data come from central differences of this closed
form in the z-chart; the second fundamental form is taken as half the
normal-flow derivative of the induced metric, II = (1/2) d/ds g_s, which fixes
the orientation so that the Poincare metric of the disk flows to
B_s = tanh(s) Id.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize

from .hyperbolic import H3Point, hyp_distance, visual_density
from .metrics import (
    DensityField,
    DensityJet,
    DiskUnionScene,
    ImageDomainField,
    RoundDiskScene,
    Scene,
    SupportingDisk,
    SupportingHalfPlane,
    circle_intersections,
    hyperbolic_density_disk,
    projective_density,
    scale_density,
)
from .schwarzian import HoloExpr, schwarzian_norm

DET_MIN = 1e-12
MINUS_ONE_GAP = 1e-6


class DegenerateImmersionError(ValueError):
    def __init__(self, z, t, eigenvalues):
        super().__init__(f"Epstein map degenerate at z = {z!r}, t = {t!r} "
                         f"(metric eigenvalues {eigenvalues})")
        self.z, self.t, self.eigenvalues = z, t, eigenvalues


class InvariantViolation(AssertionError):
    """A property that must always hold (e.g. -1 is never an eigenvalue of B) failed."""


class ExcludedRegionError(ValueError):
    pass


@dataclass(frozen=True)
class EpsteinSample:
    z: complex
    x: H3Point
    normal: np.ndarray  # Euclidean unit vector (Re w, Im w, height) along the flow
    t: float
    residual: float  # max envelope residual


def _ep_closed_form(u: float, u_z: complex, z: complex):
    a = math.exp(u)
    q = 4.0 * abs(u_z) ** 2
    den = a * a + q
    height = 2.0 * a / den
    w = z + 4.0 * u_z.conjugate() / den
    # derivative along the flow u -> u + s
    dh = 2.0 * a * (q - a * a) / den ** 2
    dw = -8.0 * a * a * u_z.conjugate() / den ** 2
    return w, height, dw, dh


def envelope_residuals(d: DensityJet, x: H3Point):
    """(log v_x(z) - u, |d/dz log v_x(z) - u_z|): both vanish at the Epstein point."""
    v = visual_density(x, d.z)
    r1 = math.log(v) - d.u
    dz = d.z - x.w
    dlog = -dz.conjugate() / (abs(dz) ** 2 + x.t ** 2)
    return r1, abs(dlog - d.u_z)


def epstein_point(d: DensityJet, t: float = 0.0) -> EpsteinSample:
    """Epstein point of the (optionally rescaled) metric jet."""
    d = scale_density(d, t)
    w, h, dw, dh = _ep_closed_form(d.u, d.u_z, complex(d.z))
    x = H3Point(w, h)
    n = np.array([dw.real, dw.imag, dh])
    n /= np.linalg.norm(n)
    r1, r2 = envelope_residuals(d, x)
    return EpsteinSample(complex(d.z), x, n, t, max(abs(r1), r2))


def epstein_flow(field: DensityField, z, t: float) -> EpsteinSample:
    return epstein_point(field(complex(z)), t)


def geodesic_deviation(x: H3Point, y: H3Point, p: H3Point) -> float:
    """d(x, p) + d(p, y) - d(x, y): zero iff p is on the geodesic segment."""
    return hyp_distance(x, p) + hyp_distance(p, y) - hyp_distance(x, y)


# --- shape operators ---------------------------------------------------------------

@dataclass(frozen=True)
class ShapeFrame:
    z: complex
    t: float
    u: float  # log density of the unscaled metric at z
    point: H3Point
    g: np.ndarray
    II: np.ndarray
    B: np.ndarray
    Bhat: np.ndarray
    tangents: np.ndarray = field(repr=False)  # rows: d/dx, d/dy of the immersion (Euclidean)
    normal: np.ndarray = field(repr=False)

    @property
    def ghat(self) -> np.ndarray:
        return math.exp(2.0 * (self.u + self.t)) * np.eye(2)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.sort(np.linalg.eigvals(self.B).real)

    @property
    def bhat_eigenvalues(self) -> np.ndarray:
        return np.sort(np.linalg.eigvals(self.Bhat).real)

    @property
    def area_density(self) -> float:
        return math.sqrt(max(np.linalg.det(self.g), 0.0))

    @property
    def mean_curvature(self) -> float:
        return 0.5 * float(np.trace(self.B))


def _step(d: DensityJet, h: float) -> float:
    # relative to the local hyperbolic length scale
    return h * 2.0 * math.exp(-d.u)


def _flow_data(jets, t):
    out = []
    for d in jets:
        w, hgt, dw, dh = _ep_closed_form(d.u + t, d.u_z, complex(d.z))
        out.append((np.array([w.real, w.imag, hgt]), np.array([dw.real, dw.imag, dh])))
    return out


def _stencil_jets(field, z, h):
    d0 = field(z)
    s = _step(d0, h)
    jets = [field(z + s), field(z - s), field(z + 1j * s), field(z - 1j * s)]
    return d0, s, jets


def _frame_from(d0, s, jets, t, z):
    (xp, yp), (xm, ym), (xq, yq), (xr, yr) = _flow_data(jets, t)
    (c, dc), = _flow_data([d0], t)
    X = np.array([(xp - xm) / (2 * s), (xq - xr) / (2 * s)])
    Y = np.array([(yp - ym) / (2 * s), (yq - yr) / (2 * s)])
    height, dheight = c[2], dc[2]
    G = X @ X.T / height ** 2
    dG = (Y @ X.T + X @ Y.T) / height ** 2 - 2.0 * G * dheight / height
    II = 0.5 * dG
    II = 0.5 * (II + II.T)
    G = 0.5 * (G + G.T)
    evals = np.linalg.eigvalsh(G)
    if np.linalg.det(G) < DET_MIN:
        raise DegenerateImmersionError(z, t, tuple(evals))
    B = np.linalg.solve(G, II)
    eig = np.linalg.eigvals(B)
    gap = float(np.min(np.abs(eig + 1.0)))
    if gap < MINUS_ONE_GAP:
        raise InvariantViolation(f"-1 is an eigenvalue of B at z = {z!r}, t = {t!r} (gap {gap:.2e})")
    I2 = np.eye(2)
    Bhat = np.linalg.solve(I2 + B, I2 - B)
    normal = dc / np.linalg.norm(dc)
    return ShapeFrame(complex(z), float(t), d0.u, H3Point(complex(c[0], c[1]), c[2]),
                      G, II, B, Bhat, X, normal)


def fundamental_forms(field: DensityField, z, t: float = 0.0, h: float = 1e-4) -> ShapeFrame:
    """Induced metric, second fundamental form and shape operators of the time-t
    Epstein surface at z, by central differences with relative step h."""
    z = complex(z)
    d0, s, jets = _stencil_jets(field, z, h)
    return _frame_from(d0, s, jets, t, z)


def fundamental_forms_multi(field: DensityField, z, times, h: float = 1e-4) -> list:
    """Frames at several flow times sharing one set of field evaluations."""
    z = complex(z)
    d0, s, jets = _stencil_jets(field, z, h)
    return [_frame_from(d0, s, jets, t, z) for t in times]


def induced_metric(field: DensityField, z, t: float, h: float = 1e-4) -> np.ndarray:
    """Induced metric in the z-chart by central differences of the Epstein map."""
    z = complex(z)
    d0, s, jets = _stencil_jets(field, z, h)
    (xp, _), (xm, _), (xq, _), (xr, _) = _flow_data(jets, t)
    (c, _), = _flow_data([d0], t)
    X = np.array([(xp - xm) / (2 * s), (xq - xr) / (2 * s)])
    return X @ X.T / c[2] ** 2


def epstein_tangents(d: DensityJet, t: float = 0.0) -> np.ndarray:
    """Exact d/dx, d/dy of the time-t Epstein map, from the 2-jet of u (rows, Euclidean)."""
    if d.u_zz is None or d.u_zzbar is None:
        raise ValueError("exact tangents need second-order data")
    a = math.exp(d.u + t)
    p, pb = d.u_z, d.u_z.conjugate()
    m, uzz = d.u_zzbar, d.u_zz
    den = a * a + 4.0 * (p * pb).real
    dq = 4.0 * (uzz * pb + p * m)
    dbq = 4.0 * (m * pb + p * uzz.conjugate())
    dden = 2 * a * a * p + dq
    dbden = 2 * a * a * pb + dbq
    dH = 2 * a * p / den - 2 * a * dden / den ** 2
    dw = 1 + 4 * m / den - 4 * pb * dden / den ** 2
    dbw = 4 * uzz.conjugate() / den - 4 * pb * dbden / den ** 2
    wx, wy = dw + dbw, 1j * (dw - dbw)
    Hx, Hy = 2 * dH.real, -2 * dH.imag
    return np.array([[wx.real, wx.imag, Hx], [wy.real, wy.imag, Hy]])


def induced_metric_exact(d: DensityJet, t: float = 0.0) -> np.ndarray:
    X = epstein_tangents(d, t)
    a = math.exp(d.u + t)
    height = 2 * a / (a * a + 4 * abs(d.u_z) ** 2)
    return X @ X.T / height ** 2


_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def intrinsic_curvature(field: DensityField, z, t: float, h: float = 1e-4, H: float = 1e-3) -> float:
    """Gauss curvature of the induced metric: Brioschi formula with 4th-order
    differences of the metric on a 5x5 stencil.  The metric itself is exact
    when the field supplies second-order jets, otherwise differenced with step h."""
    z = complex(z)
    d0 = field(z)
    S = _step(d0, H)
    exact = d0.u_zz is not None and d0.u_zzbar is not None
    Gs = np.empty((5, 5, 2, 2))
    for i in range(5):
        for j in range(5):
            p = z + (i - 2) * S + 1j * (j - 2) * S
            Gs[i, j] = induced_metric_exact(field(p), t) if exact else induced_metric(field, p, t, h)
    E, F, G = Gs[..., 0, 0], Gs[..., 0, 1], Gs[..., 1, 1]

    def dx(A):
        return _D1 @ A[:, 2] / S

    def dy(A):
        return _D1 @ A[2, :] / S

    def dxx(A):
        return _D2 @ A[:, 2] / S ** 2

    def dyy(A):
        return _D2 @ A[2, :] / S ** 2

    def dxy(A):
        return _D1 @ A @ _D1 / S ** 2

    e, f, g = E[2, 2], F[2, 2], G[2, 2]
    Eu, Ev, Fu, Fv, Gu, Gv = dx(E), dy(E), dx(F), dy(F), dx(G), dy(G)
    M1 = np.array([
        [-0.5 * dyy(E) + dxy(F) - 0.5 * dxx(G), 0.5 * Eu, Fu - 0.5 * Ev],
        [Fv - 0.5 * Gu, e, f],
        [0.5 * Gv, f, g],
    ])
    M2 = np.array([
        [0.0, 0.5 * Ev, 0.5 * Gu],
        [0.5 * Ev, e, f],
        [0.5 * Gu, f, g],
    ])
    return float((np.linalg.det(M1) - np.linalg.det(M2)) / (e * g - f * f) ** 2)


# --- identity suite ------------------------------------------------------------------

def _rel(a, b):
    return float(np.linalg.norm(a - b) / max(1.0, np.linalg.norm(b)))


@dataclass(frozen=True)
class IdentityReport:
    z: complex
    s: float
    t: float
    residual_3: float  # ghat_t = (Id + B_t)^* g_t
    residual_4: float  # B_t from B_s by the cosh/sinh law
    residual_6: float  # g_t = 1/4 (Id + Bhat_t)^* ghat_t
    residual_7: float  # Bhat_t = e^{-2(t-s)} Bhat_s
    area_ratio_residual: float  # dA_t = 1/4 |det(Id + Bhat_t)| dAhat_t
    gauss_residual: Optional[float]  # K(g_t) = -1 + det B_t
    flow_distance_residual: float  # d(Ep_s, Ep_t) = |t - s|
    frame_s: ShapeFrame = field(repr=False)
    frame_t: ShapeFrame = field(repr=False)

    def worst(self) -> float:
        vals = [self.residual_3, self.residual_4, self.residual_6, self.residual_7,
                self.area_ratio_residual, self.flow_distance_residual]
        if self.gauss_residual is not None:
            vals.append(self.gauss_residual)
        return max(vals)

    @property
    def eigenvalues(self):
        return self.frame_t.eigenvalues

    def row(self) -> dict:
        e = self.eigenvalues
        return {
            "z_re": self.z.real, "z_im": self.z.imag, "t": self.t,
            "eig1": e[0], "eig2": e[1],
            "residual_3": self.residual_3, "residual_4": self.residual_4,
            "residual_6": self.residual_6, "residual_7": self.residual_7,
            "area_ratio_residual": self.area_ratio_residual,
            "gauss_residual": self.gauss_residual if self.gauss_residual is not None else float("nan"),
        }


def identity_checks(fs: ShapeFrame, ft: ShapeFrame):
    """Residuals of the Epstein flow identities between the frames at s and t."""
    I2 = np.eye(2)
    dt = ft.t - fs.t
    ghat_t = ft.ghat
    A = I2 + ft.B
    r3 = _rel(A.T @ ft.g @ A, ghat_t)
    ch, sh = math.cosh(dt), math.sinh(dt)
    B4 = np.linalg.solve(ch * I2 + sh * fs.B, sh * I2 + ch * fs.B)
    r4 = _rel(ft.B, B4)
    C = I2 + ft.Bhat
    r6 = _rel(ft.g, 0.25 * C.T @ ghat_t @ C)
    r7 = _rel(ft.Bhat, math.exp(-2.0 * dt) * fs.Bhat)
    ahat = math.exp(2.0 * (ft.u + ft.t))
    area = abs(ft.area_density - 0.25 * abs(np.linalg.det(C)) * ahat) / ahat
    return r3, r4, r6, r7, area


def identity_suite(field: DensityField, z, s: float, t: float, h: float = 1e-4,
                   gauss: bool = True) -> IdentityReport:
    z = complex(z)
    fs, ft = fundamental_forms_multi(field, z, (s, t), h)
    r3, r4, r6, r7, area = identity_checks(fs, ft)
    g_res = None
    if gauss:
        K = intrinsic_curvature(field, z, t, h)
        g_res = abs(K - (-1.0 + float(np.linalg.det(ft.B)))) / max(1.0, abs(K))
    flow = abs(hyp_distance(fs.point, ft.point) - abs(t - s))
    return IdentityReport(z, s, t, r3, r4, r6, r7, area, g_res, flow, fs, ft)


def density_schwarzian_norm(d: DensityJet) -> float:
    """||Phi|| of a hyperbolic metric read from its 2-jet.

    If e^{2u}|dz|^2 is the pullback of the Poincare metric by F then
    u_zz - u_z^2 = S(F)/2, and the norm is conformally invariant.
    """
    if d.u_zz is None:
        raise ValueError("the density jet carries no second derivatives")
    return 2.0 * abs(d.u_zz - d.u_z ** 2) * math.exp(-2.0 * d.u)


def degeneracy_margin(n: float, times) -> float:
    """Distance from the singular set of the Epstein flow for a hyperbolic metric.

    B_t has the eigenvalue pair (1 - l)/(1 + l) with l = e^{-2t}(1 -+ 2n);
    the surface is singular where l = -1.  Returns min over ``times`` of |1 + l|.
    """
    return min(abs(1.0 + math.exp(-2.0 * t) * (1.0 - 2.0 * n)) for t in times)


def admissible_points(field: DensityField, candidates, times, count: int, margin: float = 0.2) -> list:
    """First ``count`` candidates whose Epstein surfaces stay regular at ``times``."""
    out = []
    for z in candidates:
        n = density_schwarzian_norm(field(z))
        if degeneracy_margin(n, times) >= margin:
            out.append(complex(z))
            if len(out) == count:
                break
    return out


# --- Schwarzian shape law -------------------------------------------------------------

@dataclass(frozen=True)
class ShapeLawReport:
    z: complex
    w: complex
    t: float
    phi_norm: float
    bhat_numeric: np.ndarray
    bhat_predicted: np.ndarray
    b0_numeric: Optional[np.ndarray]
    b0_predicted: Optional[np.ndarray]
    threshold_numeric: float
    threshold_predicted: float

    @property
    def bhat_residual(self) -> float:
        return float(np.max(np.abs(self.bhat_numeric - self.bhat_predicted)))

    @property
    def b0_residual(self) -> float:
        if self.b0_numeric is None or self.b0_predicted is None:
            return float("nan")
        return float(np.max(np.abs(self.b0_numeric - self.b0_predicted)))

    @property
    def threshold_residual(self) -> float:
        return abs(self.threshold_numeric - self.threshold_predicted)


def predicted_b0_eigenvalues(n: float):
    """Eigenvalues -n/(n + 1), -n/(n - 1) of B for the hyperbolic metric (None when n = 1)."""
    if abs(n - 1.0) < 1e-12:
        return None
    return np.sort(np.array([-n / (n + 1.0), -n / (n - 1.0)]))


def predicted_bhat_eigenvalues(n: float, t: float):
    return np.sort(math.exp(-2.0 * t) * np.array([1.0 + 2.0 * n, 1.0 - 2.0 * n]))


def convexity_threshold(field: DensityField, z, h: float = 1e-4, t_max: float = 4.0, dt: float = 0.05) -> float:
    """Smallest t with both eigenvalues of B_t nonnegative, found numerically:
    scan for the last sign change of min eig(B_t), then bracket with Brent."""
    z = complex(z)
    d0, s, jets = _stencil_jets(field, z, h)

    def min_eig(t):
        return float(_frame_from(d0, s, jets, t, z).eigenvalues[0])

    ts = np.arange(0.0, t_max + dt / 2, dt)
    vals = []
    for t in ts:
        try:
            vals.append(min_eig(t))
        except DegenerateImmersionError:
            vals.append(float("nan"))
    vals = np.array(vals)
    if vals[-1] < 0:
        raise ValueError("B_t is not convex within the scanned range")
    neg = np.where(~(vals >= 0))[0]
    if neg.size == 0:
        return 0.0
    k = int(neg[-1])
    lo, hi = ts[k], ts[k + 1]
    if np.isnan(vals[k]):
        lo = lo + dt * 1e-3
    return float(optimize.brentq(min_eig, lo, hi, xtol=1e-12))


def schwarzian_shape_check(expr: HoloExpr, z, t: float = 0.0, h: float = 1e-4) -> ShapeLawReport:
    """Compare numerical shape operators of the hyperbolic metric of f(disk)
    at w = f(z) with the eigenvalue laws in terms of ||Phi(z)||."""
    z = complex(z)
    n = schwarzian_norm(expr, z)
    field = ImageDomainField(expr).near(z)
    w = expr(z)
    ft = fundamental_forms(field, w, t, h)
    b0_num = None
    b0_pred = predicted_b0_eigenvalues(n)
    if b0_pred is not None:
        try:
            b0_num = fundamental_forms(field, w, 0.0, h).eigenvalues
        except DegenerateImmersionError:
            b0_num = None
    thr = convexity_threshold(field, w, h)
    return ShapeLawReport(z, w, t, n, ft.bhat_eigenvalues, predicted_bhat_eigenvalues(n, t),
                          b0_num, b0_pred, thr, 0.5 * math.log(1.0 + 2.0 * n))


# --- two-disk domes ------------------------------------------------------------------

def circle_angle(d1: SupportingDisk, d2: SupportingDisk) -> float:
    """Angle between the radii of two circles at an intersection point."""
    dist = abs(d1.center - d2.center)
    cos_a = (d1.radius ** 2 + d2.radius ** 2 - dist ** 2) / (2 * d1.radius * d2.radius)
    return math.acos(max(-1.0, min(1.0, cos_a)))


def bending_angle_numeric(d1: SupportingDisk, d2: SupportingDisk) -> float:
    """Exterior dihedral angle of the two hemispheres along their common geodesic,
    from the Euclidean normals at the top of that geodesic (the metric is conformal)."""
    p, q = circle_intersections(d1, d2)
    mid = 0.5 * (p + q)
    top = np.array([mid.real, mid.imag, 0.5 * abs(p - q)])
    n1 = top - np.array([d1.center.real, d1.center.imag, 0.0])
    n2 = top - np.array([d2.center.real, d2.center.imag, 0.0])
    c = float(n1 @ n2 / (np.linalg.norm(n1) * np.linalg.norm(n2)))
    return math.acos(max(-1.0, min(1.0, c)))


def _ball_excess(x: H3Point, disk: SupportingDisk) -> float:
    """(|x - c|^2 - r^2) / r^2 for the Euclidean ball bounded by the hemisphere over ``disk``."""
    return (abs(x.w - disk.center) ** 2 + x.t ** 2 - disk.radius ** 2) / disk.radius ** 2


def dome_region(scene: DiskUnionScene, z):
    """Which face of the two-disk dome the Epstein point of z lands on, and a margin.

    The dome is the upper envelope of the two hemispheres.  The face over
    disk k is the part of its hemisphere outside the other ball, so z belongs
    to face k when z lies in disk k and the Epstein point of disk k's own
    hyperbolic metric stays outside the other ball.  Otherwise the point lands
    on the bending geodesic.  The margin is the smallest relative ball excess
    involved in the decision; it vanishes on the preimage of the bending line.
    """
    z = complex(z)
    d = scene.disks
    margins = []
    for k in (0, 1):
        if abs(z - d[k].center) >= d[k].radius:
            continue
        x = epstein_point(hyperbolic_density_disk(d[k].center, d[k].radius, z)).x
        e = _ball_excess(x, d[1 - k])
        margins.append(abs(e))
        if e > 0:
            return f"disk-{k}", abs(e)
    return "bending", min(margins)


def hemisphere_residual(x: H3Point, disk: SupportingDisk) -> float:
    return abs(math.hypot(abs(x.w - disk.center), x.t) - disk.radius) / disk.radius


@dataclass(frozen=True)
class DomeReport:
    z: complex
    point: H3Point
    support: object
    hemisphere_residual: float
    region: str  # "disk-0", "disk-1", "bending" or "single"
    support_residual: float  # deviation of the support from the expected disk / geodesic
    bending_angle: Optional[float]
    bending_angle_expected: Optional[float]

    @property
    def angle_residual(self) -> float:
        if self.bending_angle is None:
            return 0.0
        return abs(self.bending_angle - self.bending_angle_expected)


def dome_check(scene: Scene, z, side_tol: float = 1e-3, search=None) -> DomeReport:
    """Epstein point of the projective metric of a one- or two-disk scene against the dome."""
    z = complex(z)
    kwargs = {} if search is None else {"search": search}
    if isinstance(scene, RoundDiskScene) or (isinstance(scene, DiskUnionScene) and len(scene.disks) == 1):
        disk = scene.disks[0]
        res = projective_density(scene, z, **kwargs)
        ep = epstein_point(res.jet)
        r = hemisphere_residual(ep.x, disk)
        return DomeReport(z, ep.x, disk, r, "single", 0.0, None, None)
    if not isinstance(scene, DiskUnionScene) or len(scene.disks) != 2:
        raise ValueError("dome_check needs a one- or two-disk scene")
    d1, d2 = scene.disks
    if len(circle_intersections(d1, d2)) != 2:
        raise ValueError("the two disks must overlap properly")
    region, margin = dome_region(scene, z)
    if margin < side_tol:
        raise ExcludedRegionError(f"z = {z!r} retracts within {side_tol} of the bending locus")
    res = projective_density(scene, z, **kwargs)
    support = res.support
    if isinstance(support, SupportingHalfPlane):
        raise ValueError("unexpected half-plane support for a bounded scene")
    ep = epstein_point(res.jet)
    hres = hemisphere_residual(ep.x, support)
    if region == "bending":
        p, q = circle_intersections(d1, d2)
        geo = SupportingDisk(0.5 * (p + q), 0.5 * abs(p - q))
        # on the vertical plane over the line pq and on the hemisphere over segment pq
        e = (q - p) / abs(q - p)
        off_plane = abs(((ep.x.w - p) * e.conjugate()).imag)
        sres = max(hemisphere_residual(ep.x, geo), off_plane / geo.radius)
    else:
        target = d1 if region == "disk-0" else d2
        sres = max(abs(support.center - target.center), abs(support.radius - target.radius))
    expected = math.pi - math.acos((abs(d1.center - d2.center) ** 2 - d1.radius ** 2 - d2.radius ** 2)
                                   / (2 * d1.radius * d2.radius))
    return DomeReport(z, ep.x, support, hres, region, sres, bending_angle_numeric(d1, d2), expected)
