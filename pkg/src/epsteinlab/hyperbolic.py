"""Upper half-space model of H^3: Moebius maps, their Poincare extension,
distances, visual metrics and horospheres.

Points of H^3 are ``H3Point(w, t)`` with ``w`` the horizontal (complex)
coordinate and ``t > 0`` the height.  The visual metric seen from ``x`` is
normalized so that from ``(0, 1)`` it is the round metric of curvature +1,
``2|dxi| / (1 + |xi|^2)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_infinite(z) -> bool:
    return z is INF


@dataclass(frozen=True)
class MoebiusMap:
    """z -> (a z + b) / (c z + d), stored with ad - bc = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(v) for v in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if det == 0:
            raise ValueError("singular Moebius coefficients (ad - bc = 0)")
        s = cmath.sqrt(det)
        object.__setattr__(self, "a", a / s)
        object.__setattr__(self, "b", b / s)
        object.__setattr__(self, "c", c / s)
        object.__setattr__(self, "d", d / s)

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def translation(cls, c) -> "MoebiusMap":
        return cls(1, c, 0, 1)

    @classmethod
    def dilation(cls, k) -> "MoebiusMap":
        return cls(k, 0, 0, 1)

    @classmethod
    def disk_automorphism(cls, a, theta: float = 0.0) -> "MoebiusMap":
        """z -> e^{i theta} (z - a) / (1 - conj(a) z), |a| < 1."""
        a = complex(a)
        if abs(a) >= 1:
            raise ValueError("disk automorphism needs |a| < 1")
        rot = cmath.exp(1j * theta)
        return cls(rot, -rot * a, -a.conjugate(), 1)

    def matrix(self):
        return ((self.a, self.b), (self.c, self.d))

    def __call__(self, z):
        return mobius_apply(self, z)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        # (self @ other)(z) == self(other(z))
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def derivative(self, z: complex) -> complex:
        den = self.c * z + self.d
        if den == 0:
            raise ZeroDivisionError(f"pole of Moebius map at {z!r}")
        return 1.0 / (den * den)

    def pole(self):
        return INF if self.c == 0 else -self.d / self.c


@dataclass(frozen=True)
class H3Point:
    w: complex
    t: float

    def __post_init__(self):
        object.__setattr__(self, "w", complex(self.w))
        t = float(self.t)
        if not t > 0:
            raise ValueError(f"height must be positive, got {t!r}")
        object.__setattr__(self, "t", t)

    def as_vector(self):
        return (self.w.real, self.w.imag, self.t)


@dataclass(frozen=True)
class Horosphere:
    """Level set {x : v_x(base) = size}.

    For a finite base this is the Euclidean sphere of diameter ``2/size``
    tangent to the boundary at ``base``.  For ``base is INF`` the density is
    read in the chart ``1/z`` and the horosphere is the plane ``t = size/2``.
    """

    base: object
    size: float

    def __post_init__(self):
        if not self.size > 0:
            raise ValueError("horosphere size must be positive")

    def contains(self, x: H3Point, tol: float = 1e-12) -> bool:
        return abs(self.level(x) - self.size) <= tol * self.size

    def level(self, x: H3Point) -> float:
        if self.base is INF:
            return 2.0 * x.t
        return visual_density(x, self.base)

    def euclidean_sphere(self):
        """(center_w, center_t, radius); None for the horizontal plane at INF."""
        if self.base is INF:
            return None
        r = 1.0 / self.size
        return complex(self.base), r, r

    def point_above(self, w: complex) -> H3Point:
        """The point of the horosphere over horizontal coordinate ``w`` (upper sheet)."""
        if self.base is INF:
            return H3Point(w, self.size / 2.0)
        r = 1.0 / self.size
        rho2 = abs(w - self.base) ** 2
        if rho2 > r * r:
            raise ValueError("w is not under this horosphere")
        return H3Point(w, r + math.sqrt(r * r - rho2))


def mobius_apply(m: MoebiusMap, z):
    if z is INF:
        return INF if m.c == 0 else m.a / m.c
    z = complex(z)
    den = m.c * z + m.d
    if den == 0:
        return INF
    return (m.a * z + m.b) / den


def cross_ratio(z1, z2, z3, z4) -> complex:
    return (z1 - z3) * (z2 - z4) / ((z1 - z4) * (z2 - z3))


def poincare_extend(m: MoebiusMap, x: H3Point) -> H3Point:
    # quaternion action q -> (a q + b)(c q + d)^{-1} with q = w + t j
    cw_d = m.c * x.w + m.d
    den = abs(cw_d) ** 2 + abs(m.c) ** 2 * x.t ** 2
    w = ((m.a * x.w + m.b) * cw_d.conjugate() + m.a * m.c.conjugate() * x.t ** 2) / den
    return H3Point(w, x.t / den)


def hyp_distance(x: H3Point, y: H3Point) -> float:
    chord2 = abs(x.w - y.w) ** 2 + (x.t - y.t) ** 2
    return 2.0 * math.asinh(math.sqrt(chord2 / (4.0 * x.t * y.t)))


def visual_density(x: H3Point, xi) -> float:
    """Length density at ``xi`` of the visual metric from ``x``."""
    if xi is INF:
        return 0.0
    return 2.0 * x.t / (abs(complex(xi) - x.w) ** 2 + x.t ** 2)


def horosphere_of_metric(z, u: float) -> Horosphere:
    """Horosphere of points whose visual density at ``z`` equals ``e^u``."""
    return Horosphere(z, math.exp(u))
