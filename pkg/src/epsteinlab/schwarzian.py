"""Holomorphic expressions with exact 3-jets, Schwarzian derivatives and
holomorphic quadratic differentials.

Expressions are small immutable trees.  ``holo_jet(e, z)`` returns
``(f, f', f'', f''')`` at ``z`` computed by jet arithmetic (Leibniz and
Faa di Bruno to third order), never by numerical differentiation.

Text form used in scene files (prefix notation)::

    id | exp | log | koebe
    const(c) | affine(a, b) | mobius(a, b, c, d) | power(n)
    sum(e1, e2, ...) | product(e1, e2, ...) | compose(outer, inner, ...)

Numbers are Python literals accepted by ``complex()``, e.g. ``0.5``,
``-1``, ``0.3+0.2j``.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .hyperbolic import MoebiusMap

NEHARI_BOUND = 1.5


class HoloDomainError(ValueError):
    """Expression evaluated outside the domain where it is holomorphic."""


class CriticalPointError(ValueError):
    """f'(z) = 0 where a nonvanishing derivative is required."""

    def __init__(self, z, msg="vanishing derivative"):
        super().__init__(f"{msg} at z = {z!r}")
        self.z = z


class HoloJet3(NamedTuple):
    f: complex
    f1: complex
    f2: complex
    f3: complex

    def __add__(self, other):
        return HoloJet3(*(a + b for a, b in zip(self, other)))

    def __mul__(self, other):
        f, f1, f2, f3 = self
        g, g1, g2, g3 = other
        return HoloJet3(
            f * g,
            f1 * g + f * g1,
            f2 * g + 2 * f1 * g1 + f * g2,
            f3 * g + 3 * f2 * g1 + 3 * f1 * g2 + f * g3,
        )

    def inverse(self) -> "HoloJet3":
        """Jet of the local inverse at the image point (value slot = preimage unknown, set to nan)."""
        _, f1, f2, f3 = self
        if f1 == 0:
            raise CriticalPointError(self.f)
        g1 = 1.0 / f1
        g2 = -f2 / f1 ** 3
        g3 = (3 * f2 * f2 - f1 * f3) / f1 ** 5
        return HoloJet3(complex("nan"), g1, g2, g3)


def compose_jets(outer: HoloJet3, inner: HoloJet3) -> HoloJet3:
    """Jet of outer o inner; ``outer`` must be taken at inner.f."""
    F, F1, F2, F3 = outer
    _, g1, g2, g3 = inner
    return HoloJet3(
        F,
        F1 * g1,
        F2 * g1 * g1 + F1 * g2,
        F3 * g1 ** 3 + 3 * F2 * g1 * g2 + F1 * g3,
    )


class HoloExpr:
    """Base node.  Subclasses implement ``jet(z)``."""

    def jet(self, z: complex) -> HoloJet3:
        raise NotImplementedError

    def invert(self, w: complex):
        """Closed-form preimage of w, or None when no closed form is known."""
        return None

    def __call__(self, z):
        return self.jet(complex(z)).f

    def __matmul__(self, other: "HoloExpr") -> "HoloExpr":
        return Compose(self, other)

    def __add__(self, other):
        return Sum((self, other))

    def __mul__(self, other):
        return Product((self, other))


@dataclass(frozen=True, eq=True)
class Identity(HoloExpr):
    def jet(self, z):
        return HoloJet3(complex(z), 1 + 0j, 0j, 0j)

    def invert(self, w):
        return complex(w)

    def __str__(self):
        return "id"


@dataclass(frozen=True, eq=True)
class Constant(HoloExpr):
    c: complex

    def jet(self, z):
        return HoloJet3(complex(self.c), 0j, 0j, 0j)

    def __str__(self):
        return f"const({_fmt(self.c)})"


@dataclass(frozen=True, eq=True)
class Affine(HoloExpr):
    a: complex
    b: complex = 0j

    def jet(self, z):
        return HoloJet3(self.a * z + self.b, complex(self.a), 0j, 0j)

    def invert(self, w):
        return (w - self.b) / self.a if self.a != 0 else None

    def __str__(self):
        return f"affine({_fmt(self.a)},{_fmt(self.b)})"


@dataclass(frozen=True, eq=True)
class Moebius(HoloExpr):
    m: MoebiusMap

    @classmethod
    def from_coefficients(cls, a, b, c, d) -> "Moebius":
        return cls(MoebiusMap(a, b, c, d))

    def jet(self, z):
        m = self.m
        den = m.c * z + m.d
        if den == 0:
            raise HoloDomainError(f"pole of mobius at z = {z!r}")
        inv = 1.0 / den
        return HoloJet3(
            (m.a * z + m.b) * inv,
            inv ** 2,
            -2 * m.c * inv ** 3,
            6 * m.c * m.c * inv ** 4,
        )

    def invert(self, w):
        v = self.m.inverse()(w)
        return v if isinstance(v, complex) else None

    def __str__(self):
        m = self.m
        return "mobius(" + ",".join(_fmt(v) for v in (m.a, m.b, m.c, m.d)) + ")"


@dataclass(frozen=True, eq=True)
class Power(HoloExpr):
    """z^n; non-integer n uses the principal branch (cut along (-inf, 0])."""

    n: float

    def jet(self, z):
        n = self.n
        integral = float(n).is_integer()
        if integral and n >= 0:
            k = int(n)

            def p(j):
                return z ** (k - j) if k - j >= 0 else 0j
        else:
            if z == 0 or (not integral and z.imag == 0 and z.real < 0):
                raise HoloDomainError(f"power({n}) not holomorphic at z = {z!r}")

            def p(j):
                return cmath.exp((n - j) * cmath.log(z))
        return HoloJet3(
            p(0),
            n * p(1),
            n * (n - 1) * p(2),
            n * (n - 1) * (n - 2) * p(3),
        )

    def __str__(self):
        return f"power({_fmt(self.n)})"


@dataclass(frozen=True, eq=True)
class Exp(HoloExpr):
    def jet(self, z):
        e = cmath.exp(z)
        return HoloJet3(e, e, e, e)

    def invert(self, w):
        # principal branch only
        return cmath.log(w) if w != 0 else None

    def __str__(self):
        return "exp"


@dataclass(frozen=True, eq=True)
class Log(HoloExpr):
    """Principal branch."""

    def jet(self, z):
        if z == 0 or (z.imag == 0 and z.real < 0):
            raise HoloDomainError(f"log not holomorphic at z = {z!r}")
        return HoloJet3(cmath.log(z), 1 / z, -1 / z ** 2, 2 / z ** 3)

    def __str__(self):
        return "log"


@dataclass(frozen=True, eq=True)
class Koebe(HoloExpr):
    """z / (1 - z)^2, univalent on the unit disk onto C minus (-inf, -1/4]."""

    def jet(self, z):
        if z == 1:
            raise HoloDomainError("koebe has a pole at z = 1")
        q = 1 / (1 - z)
        return HoloJet3(
            z * q ** 2,
            (1 + z) * q ** 3,
            2 * (z + 2) * q ** 4,
            6 * (z + 3) * q ** 5,
        )

    def invert(self, w):
        if w == 0:
            return 0j
        # root of w z^2 - (2w + 1) z + w = 0 inside the unit disk
        r = cmath.sqrt(4 * w + 1)
        for z in ((2 * w + 1 - r) / (2 * w), (2 * w + 1 + r) / (2 * w)):
            if abs(z) < 1:
                return z
        return None

    def __str__(self):
        return "koebe"


@dataclass(frozen=True, eq=True)
class Sum(HoloExpr):
    terms: tuple

    def jet(self, z):
        out = HoloJet3(0j, 0j, 0j, 0j)
        for e in self.terms:
            out = out + e.jet(z)
        return out

    def __str__(self):
        return "sum(" + ",".join(str(e) for e in self.terms) + ")"


@dataclass(frozen=True, eq=True)
class Product(HoloExpr):
    factors: tuple

    def jet(self, z):
        out = HoloJet3(1 + 0j, 0j, 0j, 0j)
        for e in self.factors:
            out = out * e.jet(z)
        return out

    def __str__(self):
        return "product(" + ",".join(str(e) for e in self.factors) + ")"


@dataclass(frozen=True, eq=True)
class Compose(HoloExpr):
    """outer o inner."""

    outer: HoloExpr
    inner: HoloExpr

    def jet(self, z):
        gj = self.inner.jet(z)
        return compose_jets(self.outer.jet(gj.f), gj)

    def invert(self, w):
        v = self.outer.invert(w)
        return None if v is None else self.inner.invert(v)

    def __str__(self):
        return f"compose({self.outer},{self.inner})"


def _fmt(c) -> str:
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    return repr(c).strip("()")


def holo_jet(e: HoloExpr, z) -> HoloJet3:
    return e.jet(complex(z))


def schwarzian_of_jet(j: HoloJet3, z=None) -> complex:
    _, f1, f2, f3 = j
    if f1 == 0:
        raise CriticalPointError(z if z is not None else j.f)
    r = f2 / f1
    return f3 / f1 - 1.5 * r * r


def schwarzian(e: HoloExpr, z) -> complex:
    """S(f) = f'''/f' - 3/2 (f''/f')^2."""
    z = complex(z)
    return schwarzian_of_jet(e.jet(z), z)


def schwarzian_compose_check(f: HoloExpr, g: HoloExpr, z) -> float:
    """|S(f o g) - (S(f) o g) g'^2 - S(g)| at z."""
    z = complex(z)
    lhs = schwarzian(Compose(f, g), z)
    gj = g.jet(z)
    rhs = schwarzian(f, gj.f) * gj.f1 ** 2 + schwarzian_of_jet(gj, z)
    return abs(lhs - rhs)


# --- quadratic differentials -------------------------------------------------

@dataclass(frozen=True)
class QuadDifferentialSample:
    """phi(z) dz^2 at z, with the hyperbolic metric-tensor density rho_h."""

    z: complex
    phi: complex
    rho_h: float

    def __post_init__(self):
        if not self.rho_h > 0:
            raise ValueError("rho_h must be positive")

    @property
    def norm(self) -> float:
        return pointwise_norm(self)


def pointwise_norm(sample: QuadDifferentialSample) -> float:
    return abs(sample.phi) / sample.rho_h


def quad_pullback(sample: QuadDifferentialSample, g: HoloExpr, z, tol: float = 1e-9) -> QuadDifferentialSample:
    """Transport to z: phi(g(z)) g'(z)^2 and rho(g(z)) |g'(z)|^2."""
    z = complex(z)
    gj = g.jet(z)
    if abs(gj.f - sample.z) > tol * max(1.0, abs(sample.z)):
        raise ValueError(f"g(z) = {gj.f!r} does not match sample point {sample.z!r}")
    if gj.f1 == 0:
        raise CriticalPointError(z)
    return QuadDifferentialSample(z, sample.phi * gj.f1 ** 2, sample.rho_h * abs(gj.f1) ** 2)


def disk_rho(z) -> float:
    """Metric-tensor density of the Poincare metric of the unit disk."""
    return (2.0 / (1.0 - abs(z) ** 2)) ** 2


def schwarzian_sample(e: HoloExpr, z) -> QuadDifferentialSample:
    """S(e) at z in the unit disk, with the disk's hyperbolic density."""
    z = complex(z)
    if abs(z) >= 1:
        raise HoloDomainError(f"z = {z!r} is not in the unit disk")
    return QuadDifferentialSample(z, schwarzian(e, z), disk_rho(z))


def schwarzian_norm(e: HoloExpr, z) -> float:
    """||Phi(z)|| for a univalent map of the unit disk."""
    return pointwise_norm(schwarzian_sample(e, z))


def disk_grid(n: int, r_max: float = 0.999, include_origin: bool = True) -> np.ndarray:
    """About ``n`` points of the unit disk: polar rings of equal spacing in r^2."""
    n = int(n)
    if n < 1:
        raise ValueError("grid must be nonempty")
    rings = max(1, int(round(math.sqrt(n / math.pi))))
    pts = [0j] if include_origin else []
    remaining = n - len(pts)
    weights = np.arange(1, rings + 1, dtype=float)
    counts = np.maximum(1, np.round(remaining * weights / weights.sum())).astype(int)
    counts[-1] += remaining - counts.sum()
    for k, cnt in enumerate(counts, start=1):
        if cnt <= 0:
            continue
        r = r_max * math.sqrt(k / rings)
        theta = 2 * math.pi * (np.arange(cnt) + 0.5 * (k % 2)) / cnt
        pts.extend(r * np.exp(1j * theta))
    return np.asarray(pts, dtype=complex)


@dataclass(frozen=True)
class NehariScan:
    sup: float
    argmax: complex
    certified: bool
    n_points: int


def nehari_scan(e: HoloExpr, grid: Sequence[complex] | int, tol: float = 1e-6) -> NehariScan:
    """Sup of ||S(e)|| over a grid of the unit disk; certified iff <= 3/2 + tol."""
    pts = disk_grid(grid) if isinstance(grid, int) else np.asarray(grid, dtype=complex)
    best, arg = -1.0, 0j
    for z in pts:
        try:
            v = schwarzian_norm(e, z)
        except ValueError as exc:
            raise type(exc)(f"at grid point {complex(z)!r}: {exc}") from exc
        if v > best:
            best, arg = v, complex(z)
    return NehariScan(best, arg, best <= NEHARI_BOUND + tol, len(pts))


# --- text form -----------------------------------------------------------------

class ExprParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<punct>[(),])|(?P<word>[^(),\s]+))")

_NULLARY = {"id": Identity, "identity": Identity, "exp": Exp, "log": Log, "koebe": Koebe}
_WITH_ARGS = {"const", "constant", "affine", "mobius", "moebius", "power", "sum", "product", "compose"}


def parse_expr(text: str) -> HoloExpr:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprParseError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        tokens.append((m.group("punct") or m.group("word"), m.start()))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    expr, k = _parse(tokens, 0, text)
    if k != len(tokens):
        raise ExprParseError(f"trailing input at offset {tokens[k][1]}")
    return expr


def _parse(tokens, k, text):
    if k >= len(tokens):
        raise ExprParseError("unexpected end of expression")
    name, off = tokens[k]
    if name in "(),":
        raise ExprParseError(f"expected a name at offset {off}, got {name!r}")
    k += 1
    if name in _NULLARY:
        if k < len(tokens) and tokens[k][0] == "(":
            if k + 1 < len(tokens) and tokens[k + 1][0] == ")":
                k += 2
            else:
                raise ExprParseError(f"{name} takes no arguments (offset {off})")
        return _NULLARY[name](), k
    if name not in _WITH_ARGS:
        raise ExprParseError(f"unknown expression {name!r} at offset {off}")
    if k >= len(tokens) or tokens[k][0] != "(":
        raise ExprParseError(f"expected '(' after {name!r} at offset {off}")
    k += 1
    args = []
    while True:
        if k >= len(tokens):
            raise ExprParseError(f"unclosed argument list for {name!r} (offset {off})")
        if tokens[k][0] == ")" and not args:
            k += 1
            break
        if name in ("sum", "product", "compose"):
            sub, k = _parse(tokens, k, text)
            args.append(sub)
        else:
            tok, toff = tokens[k]
            try:
                args.append(complex(tok.replace("i", "j") if tok.endswith("i") else tok))
            except ValueError:
                raise ExprParseError(f"bad number {tok!r} at offset {toff}") from None
            k += 1
        if k >= len(tokens):
            raise ExprParseError(f"unclosed argument list for {name!r} (offset {off})")
        if tokens[k][0] == ",":
            k += 1
            continue
        if tokens[k][0] == ")":
            k += 1
            break
        raise ExprParseError(f"expected ',' or ')' at offset {tokens[k][1]}")
    return _build(name, args, off), k


def _build(name, args, off):
    def need(n):
        if len(args) != n:
            raise ExprParseError(f"{name} expects {n} arguments, got {len(args)} (offset {off})")

    if name in ("const", "constant"):
        need(1)
        return Constant(args[0])
    if name == "affine":
        if len(args) == 1:
            return Affine(args[0], 0j)
        need(2)
        return Affine(args[0], args[1])
    if name in ("mobius", "moebius"):
        need(4)
        try:
            return Moebius.from_coefficients(*args)
        except ValueError as exc:
            raise ExprParseError(f"{exc} (offset {off})") from None
    if name == "power":
        need(1)
        if args[0].imag != 0:
            raise ExprParseError(f"power exponent must be real (offset {off})")
        return Power(args[0].real)
    if name == "sum":
        if not args:
            raise ExprParseError(f"sum needs terms (offset {off})")
        return Sum(tuple(args))
    if name == "product":
        if not args:
            raise ExprParseError(f"product needs factors (offset {off})")
        return Product(tuple(args))
    if name == "compose":
        if len(args) < 2:
            raise ExprParseError(f"compose needs at least 2 maps (offset {off})")
        out = args[-1]
        for outer in reversed(args[:-1]):
            out = Compose(outer, out)
        return out
    raise ExprParseError(f"unknown expression {name!r} at offset {off}")
