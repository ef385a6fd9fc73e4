"""Area formulas, the B-functional, relative W-volume and the inequality chain
bounding the L^2 norm of the Schwarzian by the bending length.

A projective structure enters only through its descriptor
(chi, L(lambda), ||Phi||_inf, ||Phi||_2).  Maximality of the hyperbolic
metric for W-volume at fixed area is taken as given; everything here is the
arithmetic that follows from it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

NEHARI = 1.5


class GaugeError(ValueError):
    """Scaling time outside the range where a closed-form area is valid."""


class DescriptorError(ValueError):
    pass


@dataclass(frozen=True)
class ProjectiveDescriptor:
    chi: int
    lam_length: float
    phi_inf: float
    phi_two: float

    def __post_init__(self):
        if isinstance(self.chi, bool) or int(self.chi) != self.chi:
            raise DescriptorError(f"chi must be an integer, got {self.chi!r}")
        object.__setattr__(self, "chi", int(self.chi))
        if self.chi > -2 or self.chi % 2:
            raise DescriptorError(f"chi must be even and <= -2 (closed surface of genus >= 2), got {self.chi}")
        for name in ("lam_length", "phi_inf", "phi_two"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v >= 0):
                raise DescriptorError(f"{name} must be finite and nonnegative, got {v!r}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_json(cls, obj: dict) -> "ProjectiveDescriptor":
        try:
            return cls(obj["chi"], obj["L"], obj["phi_inf"], obj["phi_two"])
        except KeyError as exc:
            raise DescriptorError(f"missing descriptor field {exc.args[0]!r}") from None

    def to_json(self) -> dict:
        return {"chi": self.chi, "L": self.lam_length, "phi_inf": self.phi_inf, "phi_two": self.phi_two}


@dataclass(frozen=True)
class LaminationAtom:
    """A closed geodesic of hyperbolic length ``length`` with bending weight ``weight`` (radians)."""

    length: float
    weight: float

    def __post_init__(self):
        if not (self.length > 0 and self.weight > 0):
            raise ValueError("lamination atoms need positive length and weight")

    @property
    def contribution(self) -> float:
        return self.weight * self.length


def lamination_length(atoms: Iterable[LaminationAtom]) -> float:
    return math.fsum(a.contribution for a in atoms)


# --- areas ---------------------------------------------------------------------------

def b_functional(area_inf: float, area_g: float, chi: int) -> float:
    """1/2 area(metric at infinity) - area(Epstein metric) - pi chi."""
    if area_inf < 0 or area_g < 0:
        raise ValueError("areas must be nonnegative")
    return 0.5 * area_inf - area_g - math.pi * chi


def area_hyperbolic_at_infinity(t: float, chi: int) -> float:
    """Area of e^{2t} times the hyperbolic metric: e^{2t} 2 pi |chi|."""
    return math.exp(2.0 * t) * 2.0 * math.pi * abs(chi)


def convexity_gauge(phi_inf: float) -> float:
    """T with e^{2T} = 1 + 2||Phi||_inf."""
    return 0.5 * math.log1p(2.0 * phi_inf)


def area_epstein_hyperbolic(t: float, chi: int, phi_two: float, phi_inf: float | None = None) -> float:
    """-2 pi chi cosh^2 t - e^{-2t} ||Phi||_2^2, valid for t > T(phi_inf)."""
    if phi_inf is not None and not t > convexity_gauge(phi_inf):
        raise GaugeError(f"t = {t} is not above the convexity gauge {convexity_gauge(phi_inf)}")
    return -2.0 * math.pi * chi * math.cosh(t) ** 2 - math.exp(-2.0 * t) * phi_two ** 2


def area_projective(t: float, chi: int, lam: float):
    """(area of the projective metric, area of its time-t Epstein surface)."""
    if t < 0:
        raise GaugeError("the projective Epstein area formula needs t >= 0")
    return (-2.0 * math.pi * chi + lam,
            -2.0 * math.pi * chi * math.cosh(t) ** 2 + lam * math.sinh(t) * math.cosh(t))


@dataclass(frozen=True)
class GraftingCylinder:
    circumference: float
    width: float
    area: float


def grafting_cylinder(atom: LaminationAtom, t: float) -> GraftingCylinder:
    """Flat cylinder of the time-t Epstein surface over a bent geodesic."""
    if t < 0:
        raise GaugeError("t must be nonnegative")
    c = atom.length * math.cosh(t)
    w = atom.weight * math.sinh(t)
    return GraftingCylinder(c, w, c * w)


def gauss_bonnet_check(chi: int, t: float) -> float:
    """|K * area - 2 pi chi| for the curved part: K = tanh^2 t - 1, area = -2 pi chi cosh^2 t."""
    if t < 0:
        raise GaugeError("t must be nonnegative")
    # tanh^2 t - 1 evaluated as -(1 - tanh t)(1 + tanh t) without cancellation
    e = math.exp(-2.0 * t)
    K = -(2.0 * e / (1.0 + e)) * (1.0 + math.tanh(t))
    return abs(K * (-2.0 * math.pi * chi * math.cosh(t) ** 2) - 2.0 * math.pi * chi)


def fuchsian_mean_curvature_integral(chi: int, t: float):
    """Integral of H dA on the time-t equidistant surface, two ways:
    through the B-functional and as tanh(t) times the area."""
    area_g = 2.0 * math.pi * abs(chi) * math.cosh(t) ** 2
    via_b = b_functional(area_hyperbolic_at_infinity(t, chi), area_g, chi)
    direct = math.tanh(t) * area_g
    return via_b, direct


# --- W-volume --------------------------------------------------------------------------

@dataclass(frozen=True)
class WValue:
    """W-volume value, tracked as a base value plus an exact accumulated gauge shift.

    ``value = base + float(shift) * pi * |chi|``; keeping the shift as a
    Fraction makes rescaling associative bit-for-bit.
    """

    base: float
    chi: int | None = None
    gauge0: float = 0.0
    shift: Fraction = field(default=Fraction(0))

    @property
    def value(self) -> float:
        if self.shift == 0:
            return self.base
        return self.base + float(self.shift) * math.pi * abs(self.chi)

    @property
    def t_gauge(self) -> float:
        return self.gauge0 + float(self.shift)


def w_scale(w: WValue, dt, chi: int) -> WValue:
    """W at the metric e^{2 dt} g: value + dt pi |chi|."""
    if w.chi is not None and w.chi != chi:
        raise ValueError(f"WValue carries chi = {w.chi}, got {chi}")
    return WValue(w.base, chi, w.gauge0, w.shift + Fraction(dt))


def relative_w(w0: WValue, w1: WValue) -> float:
    """W(g0, g1) = W(g1) - W(g0)."""
    return w1.value - w0.value


def w_upper(chi: int, L: float):
    """(sharp, coarse) upper bounds for W(g_h, g_Sigma)."""
    if L < 0:
        raise ValueError("L must be nonnegative")
    n = abs(chi)
    sharp = 0.5 * math.pi * n * math.log1p(L / (2.0 * math.pi * n))
    return sharp, 0.25 * L


def w_lower(phi_two: float, phi_inf: float, L: float) -> float:
    """e^{-2T} ||Phi||_2^2 / 2 - L cosh(2T) / 4 with e^{2T} = 1 + 2||Phi||_inf."""
    T = convexity_gauge(phi_inf)
    return 0.5 * math.exp(-2.0 * T) * phi_two ** 2 - 0.25 * L * math.cosh(2.0 * T)


def max_phi_two(phi_inf: float, L: float) -> float:
    """Largest ||Phi||_2 with w_lower <= L/4, solved from the lower bound."""
    T = convexity_gauge(phi_inf)
    return math.sqrt(2.0 * math.exp(2.0 * T) * (0.25 * L + 0.25 * L * math.cosh(2.0 * T)))


def main_bound(phi_inf: float, L: float) -> float:
    """(1 + ||Phi||_inf) sqrt(L)."""
    if phi_inf < 0 or L < 0:
        raise ValueError("inputs must be nonnegative")
    return (1.0 + phi_inf) * math.sqrt(L)


def nehari_bound(L: float) -> float:
    """Bound for quotients of a round disk, where ||Phi||_inf <= 3/2."""
    return main_bound(NEHARI, L)


def anderson_bound(chi: int, phi_inf: float) -> float:
    """4 pi |chi| ||Phi||_inf, an upper bound for L(lambda)."""
    return 4.0 * math.pi * abs(chi) * phi_inf


@dataclass(frozen=True)
class ChainReport:
    descriptor: ProjectiveDescriptor
    w_lower: float
    w_upper_sharp: float
    w_upper_coarse: float
    lower_le_upper: bool
    max_phi_two: float
    main_bound: float
    closure_residual: float
    closure_ok: bool
    within_main_bound: bool
    anderson_bound: float
    anderson_ok: bool
    nehari_ok: bool

    @property
    def violations(self) -> list:
        out = []
        if not self.lower_le_upper:
            out.append("lower bound exceeds upper bound")
        if not self.within_main_bound:
            out.append("phi_two exceeds (1 + phi_inf) sqrt(L)")
        if not self.closure_ok:
            out.append("algebraic closure failed")
        if not self.anderson_ok:
            out.append("L exceeds 4 pi |chi| phi_inf")
        return out

    def row(self) -> dict:
        d = self.descriptor
        return {
            "chi": d.chi, "L": d.lam_length, "phi_inf": d.phi_inf, "phi_two": d.phi_two,
            "w_lower": self.w_lower, "w_upper_sharp": self.w_upper_sharp,
            "w_upper_coarse": self.w_upper_coarse, "max_phi_two": self.max_phi_two,
            "main_bound": self.main_bound, "nehari_bound": nehari_bound(d.lam_length),
            "anderson_bound": self.anderson_bound, "closure_residual": self.closure_residual,
            "lower_le_upper": int(self.lower_le_upper), "within_main_bound": int(self.within_main_bound),
            "anderson_ok": int(self.anderson_ok), "nehari_ok": int(self.nehari_ok),
        }


def chain_verify(d: ProjectiveDescriptor, tol: float = 1e-12) -> ChainReport:
    """Necessary conditions for a descriptor to come from a projective structure.

    Violations are recorded in the report; nothing raises.
    """
    lo = w_lower(d.phi_two, d.phi_inf, d.lam_length)
    sharp, coarse = w_upper(d.chi, d.lam_length)
    mx = max_phi_two(d.phi_inf, d.lam_length)
    mb = main_bound(d.phi_inf, d.lam_length)
    closure = abs(mx - mb)
    ab = anderson_bound(d.chi, d.phi_inf)
    scale = max(1.0, abs(coarse))
    return ChainReport(
        descriptor=d,
        w_lower=lo,
        w_upper_sharp=sharp,
        w_upper_coarse=coarse,
        lower_le_upper=lo <= coarse + tol * scale,
        max_phi_two=mx,
        main_bound=mb,
        closure_residual=closure,
        closure_ok=closure <= tol * max(1.0, mb),
        within_main_bound=d.phi_two <= mb + tol * max(1.0, mb),
        anderson_bound=ab,
        anderson_ok=d.lam_length <= ab + tol * max(1.0, ab),
        nehari_ok=d.phi_inf <= NEHARI,
    )


def load_descriptors(obj) -> list:
    if isinstance(obj, dict):
        obj = obj.get("descriptors", [obj])
    if not isinstance(obj, list):
        raise DescriptorError("expected a list of descriptors")
    out = []
    for k, item in enumerate(obj):
        if not isinstance(item, dict):
            raise DescriptorError(f"descriptor [{k}]: expected an object")
        try:
            out.append(ProjectiveDescriptor.from_json(item))
        except (DescriptorError, TypeError, ValueError) as exc:
            raise DescriptorError(f"descriptor [{k}]: {exc}") from None
    return out


def bound_sweep(L_values: Sequence[float], phi_values: Sequence[float], chi: int = -2) -> list:
    """Rows of bound surfaces over a (L, phi_inf) grid."""
    rows = []
    for phi in phi_values:
        for L in L_values:
            mb = main_bound(phi, L)
            mx = max_phi_two(phi, L)
            rows.append({
                "L": L, "phi_inf": phi, "main_bound": mb, "nehari_bound": nehari_bound(L),
                "anderson_bound": anderson_bound(chi, phi), "max_phi_two": mx,
                "closure_residual": abs(mx - mb),
                "anderson_admissible": int(L <= anderson_bound(chi, phi)),
                "nehari_ok": int(phi <= NEHARI),
            })
    return rows
