import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from epsteinlab.wvol import (
    DescriptorError,
    GaugeError,
    LaminationAtom,
    ProjectiveDescriptor,
    WValue,
    anderson_bound,
    area_epstein_hyperbolic,
    area_hyperbolic_at_infinity,
    area_projective,
    b_functional,
    bound_sweep,
    chain_verify,
    convexity_gauge,
    nehari_bound,
    fuchsian_mean_curvature_integral,
    gauss_bonnet_check,
    grafting_cylinder,
    lamination_length,
    load_descriptors,
    main_bound,
    max_phi_two,
    relative_w,
    w_lower,
    w_scale,
    w_upper,
)

chis = st.integers(1, 20).map(lambda g: -2 * g)
nonneg = st.floats(0, 10)


# --- areas -----------------------------------------------------------------------------

def test_b_functional_examples():
    assert b_functional(4 * math.pi, 2 * math.pi, -2) == pytest.approx(2 * math.pi, abs=1e-15)
    assert b_functional(0, 0, -2) == 2 * math.pi
    with pytest.raises(ValueError):
        b_functional(-1, 0, -2)


def test_b_functional_vanishes_on_totally_geodesic_surface():
    # at t = 0 the Fuchsian surface is totally geodesic, H = 0
    chi = -6
    assert abs(b_functional(area_hyperbolic_at_infinity(0, chi), 2 * math.pi * abs(chi), chi)) < 1e-12


def test_area_epstein_hyperbolic_examples():
    assert area_epstein_hyperbolic(0, -2, 0) == pytest.approx(4 * math.pi, abs=1e-15)
    # 4 pi cosh^2 1 - e^{-2}, the value of the formula itself
    assert abs(area_epstein_hyperbolic(1, -2, 1) - 29.786422712893994) < 1e-12
    assert abs(area_epstein_hyperbolic(1, -2, 1) - (4 * math.pi * math.cosh(1) ** 2 - math.exp(-2))) < 1e-12
    assert area_hyperbolic_at_infinity(0.7, -4) == pytest.approx(math.exp(1.4) * 8 * math.pi, rel=1e-15)


def test_area_epstein_gauge():
    T = convexity_gauge(1.5)
    assert abs(T - math.log(2)) < 1e-15
    with pytest.raises(GaugeError):
        area_epstein_hyperbolic(T, -2, 1.0, phi_inf=1.5)
    assert area_epstein_hyperbolic(T + 1e-9, -2, 1.0, phi_inf=1.5) > 0


def test_area_projective_examples():
    for t in (0.0, 0.5, 2.0):
        a_inf, a_ep = area_projective(t, -4, 0.0)
        assert a_inf == pytest.approx(8 * math.pi) and a_ep == pytest.approx(8 * math.pi * math.cosh(t) ** 2)
    assert area_projective(0.0, -2, 3.0)[1] == pytest.approx(4 * math.pi, abs=1e-15)
    # 4 pi cosh^2 1 + sinh 1 cosh 1, the value of the formula itself
    assert abs(area_projective(1.0, -2, 1.0)[1] - 31.735188200054118) < 1e-12
    with pytest.raises(GaugeError):
        area_projective(-0.1, -2, 1.0)


@given(chis, st.floats(0, 5))
def test_fuchsian_degeneration(chi, t):
    assert area_epstein_hyperbolic(t, chi, 0.0) == area_projective(t, chi, 0.0)[1]


# --- grafting cylinders and Gauss-Bonnet -------------------------------------------------

def test_grafting_cylinder_examples():
    c = grafting_cylinder(LaminationAtom(2.0, 0.5), 0.0)
    assert c.width == 0 and c.area == 0
    c = grafting_cylinder(LaminationAtom(2.0, 0.5), 1.0)
    assert abs(c.circumference - 2 * math.cosh(1)) < 1e-12
    assert abs(c.width - 0.5 * math.sinh(1)) < 1e-12
    assert abs(c.area - math.sinh(1) * math.cosh(1)) < 1e-12
    with pytest.raises(GaugeError):
        grafting_cylinder(LaminationAtom(1.0, 1.0), -1.0)
    with pytest.raises(ValueError):
        LaminationAtom(0.0, 1.0)


def test_grafting_areas_add_up():
    atoms = [LaminationAtom(1.3, 0.4), LaminationAtom(0.7, 2.0), LaminationAtom(3.1, 0.05)]
    L = lamination_length(atoms)
    assert abs(L - (1.3 * 0.4 + 0.7 * 2.0 + 3.1 * 0.05)) < 1e-15
    for t in (0.0, 0.4, 1.7):
        total = math.fsum(grafting_cylinder(a, t).area for a in atoms)
        curved = -2 * math.pi * -4 * math.cosh(t) ** 2
        assert abs(area_projective(t, -4, L)[1] - curved - total) <= 1e-12 * max(1.0, total)


@pytest.mark.parametrize("chi, t", [(-2, 0.0), (-2, 1.3), (-4, 0.2)])
def test_gauss_bonnet_examples(chi, t):
    assert gauss_bonnet_check(chi, t) < 1e-12


@given(chis, st.floats(0, 8))
def test_gauss_bonnet_property(chi, t):
    assert gauss_bonnet_check(chi, t) < 1e-12 * abs(chi)


@given(chis, st.floats(0.01, 5))
def test_fuchsian_mean_curvature_two_routes(chi, t):
    via_b, direct = fuchsian_mean_curvature_integral(chi, t)
    exact = 2 * math.pi * abs(chi) * math.sinh(t) * math.cosh(t)
    assert abs(via_b - direct) <= 1e-12 * direct
    assert abs(direct - exact) <= 1e-12 * exact


# --- W-volume scaling ------------------------------------------------------------------

def test_w_scale_examples():
    w = WValue(1.25, -2)
    assert w_scale(w, 0, -2).value == w.value
    assert w_scale(WValue(0.0, -2), 1, -2).value == 2 * math.pi
    assert w_scale(WValue(0.0), 0.5, -4).t_gauge == 0.5
    with pytest.raises(ValueError):
        w_scale(w, 1, -4)


@given(st.floats(-50, 50), st.floats(-5, 5), st.floats(-5, 5), chis)
def test_w_scale_additive(base, s, t, chi):
    w = WValue(base, chi)
    assert w_scale(w_scale(w, s, chi), t, chi).value == w_scale(w, s + t, chi).value
    assert w_scale(w, t, chi).value == base + t * math.pi * abs(chi)


def test_w_scale_exact_over_many_steps():
    w = WValue(0.3, -2)
    steps = [Fraction(1, 10)] * 10
    for dt in steps:
        w = w_scale(w, dt, -2)
    assert w.value == w_scale(WValue(0.3, -2), 1, -2).value


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-3, 3))
def test_relative_w_antisymmetric(a, b, s):
    w0, w1 = WValue(a, -2), w_scale(WValue(b, -2), s, -2)
    assert relative_w(w0, w1) == -relative_w(w1, w0)


# --- bounds -------------------------------------------------------------------------

def test_w_upper_examples():
    assert w_upper(-2, 0) == (0.0, 0.0)
    sharp, coarse = w_upper(-2, 1)
    assert abs(sharp - math.pi * math.log1p(1 / (4 * math.pi))) < 1e-15
    assert abs(sharp - 0.2405509155044787) < 1e-12 and coarse == 0.25
    with pytest.raises(ValueError):
        w_upper(-2, -1)


def test_w_upper_sharp_below_coarse():
    rng = np.random.default_rng(1)
    for _ in range(10_000):
        chi = -2 * int(rng.integers(1, 50))
        L = float(rng.uniform(0, 100))
        sharp, coarse = w_upper(chi, L)
        assert sharp <= coarse


def test_w_lower_substitutions():
    assert w_lower(0, 0, 0) == 0
    assert w_lower(2.0, 0.0, 3.0) == pytest.approx(0.5 * 4 - 0.75, abs=1e-15)
    for p2, L in [(1.0, 1.0), (3.0, 0.5), (0.0, 7.0)]:
        assert abs(w_lower(p2, 1.5, L) - (p2 ** 2 / 8 - 17 * L / 32)) < 1e-14


def test_main_bound_examples():
    assert main_bound(0.7, 0) == 0
    assert abs(main_bound(0.3, 1) - 1.3) < 1e-15
    for L in (0.0, 1.0, 2.5, 9.0):
        assert abs(nehari_bound(L) - 2.5 * math.sqrt(L)) <= 1e-12 * max(1.0, L)
    with pytest.raises(ValueError):
        main_bound(-1, 1)


def test_anderson_examples():
    assert anderson_bound(-2, 0) == 0
    assert abs(anderson_bound(-2, 1.5) - 12 * math.pi) < 1e-12
    assert abs(anderson_bound(-4, 1) - 16 * math.pi) < 1e-12


def test_closure_on_random_inputs():
    rng = np.random.default_rng(2)
    for L, phi in rng.uniform([0, 0], [10, 3], size=(10_000, 2)):
        mx = max_phi_two(phi, L)
        assert abs(mx - (1 + phi) * math.sqrt(L)) <= 1e-12 * max(1.0, mx)
        # the maximum is where the lower bound meets L/4
        assert abs(w_lower(mx, phi, L) - L / 4) <= 1e-12 * max(1.0, L)


@given(nonneg, nonneg, st.floats(0, 1), st.floats(0, 1))
def test_monotonicity(L, phi, dL, dphi):
    assert main_bound(phi, L + dL) >= main_bound(phi, L)
    assert main_bound(phi + dphi, L) >= main_bound(phi, L)
    assert w_upper(-2, L + dL)[0] >= w_upper(-2, L)[0]
    assert w_lower(phi + dphi, 0.5, L) >= w_lower(phi, 0.5, L)
    assert w_lower(phi, 0.5, L + dL) <= w_lower(phi, 0.5, L)


# --- inequality chain -----------------------------------------------------------------

def test_chain_fuchsian():
    rep = chain_verify(ProjectiveDescriptor(-2, 0, 0, 0))
    assert rep.violations == [] and rep.nehari_ok
    assert rep.w_lower == 0 and rep.w_upper_coarse == 0 and rep.main_bound == 0 and rep.max_phi_two == 0


def test_chain_flags_excess():
    rep = chain_verify(ProjectiveDescriptor(-2, 1.0, 0.3, 1.3 + 1e-6))
    assert not rep.within_main_bound and not rep.lower_le_upper
    assert "phi_two exceeds (1 + phi_inf) sqrt(L)" in rep.violations
    assert chain_verify(ProjectiveDescriptor(-2, 1.0, 0.3, 1.3)).within_main_bound


def test_chain_flags_anderson_and_nehari():
    rep = chain_verify(ProjectiveDescriptor(-2, 60.0, 2.0, 0.0))
    assert not rep.anderson_ok and not rep.nehari_ok
    assert "L exceeds 4 pi |chi| phi_inf" in rep.violations


def test_chain_closure_random():
    rng = np.random.default_rng(4)
    for L, phi in rng.uniform([0, 0], [10, 3], size=(10_000, 2)):
        rep = chain_verify(ProjectiveDescriptor(-2, L, phi, 0.0))
        assert rep.closure_ok


def test_descriptor_validation():
    for bad in [dict(chi=-3, L=0, phi_inf=0, phi_two=0), dict(chi=0, L=0, phi_inf=0, phi_two=0),
                dict(chi=-2, L=-1, phi_inf=0, phi_two=0), dict(chi=-2, L=0, phi_inf=float("inf"), phi_two=0),
                dict(chi=-2.5, L=0, phi_inf=0, phi_two=0), dict(chi=True, L=0, phi_inf=0, phi_two=0)]:
        with pytest.raises(DescriptorError):
            ProjectiveDescriptor.from_json(bad)
    d = ProjectiveDescriptor.from_json({"chi": -4, "L": 1, "phi_inf": 0.5, "phi_two": 2})
    assert ProjectiveDescriptor.from_json(d.to_json()) == d


def test_load_descriptors_errors():
    assert len(load_descriptors([{"chi": -2, "L": 1, "phi_inf": 0, "phi_two": 0}])) == 1
    assert len(load_descriptors({"descriptors": []})) == 0
    with pytest.raises(DescriptorError, match=r"\[1\].*phi_two"):
        load_descriptors([{"chi": -2, "L": 1, "phi_inf": 0, "phi_two": 0}, {"chi": -2, "L": 1, "phi_inf": 0}])
    with pytest.raises(DescriptorError):
        load_descriptors("nope")


def test_bound_sweep_rows():
    rows = bound_sweep([0.0, 1.0, 4.0], [0.0, 1.5])
    assert len(rows) == 6
    for r in rows:
        assert r["closure_residual"] <= 1e-12 * max(1.0, r["main_bound"])
        assert r["nehari_bound"] == 2.5 * math.sqrt(r["L"])
    assert [r["anderson_admissible"] for r in rows[:3]] == [1, 0, 0]
