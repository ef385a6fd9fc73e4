"""The ten numbered acceptance criteria, each at its stated tolerance.

Every test carries ``@pytest.mark.acceptance(number, title)``; the terminal
summary lists PASS or FAIL per criterion together with the measured values.
"""
import math
import time

import numpy as np
import pytest

from epsteinlab.epstein import (
    ExcludedRegionError,
    admissible_points,
    density_schwarzian_norm,
    dome_check,
    epstein_point,
    fundamental_forms,
    fundamental_forms_multi,
    identity_suite,
    schwarzian_shape_check,
)
from epsteinlab.metrics import DiskUnionScene, ImageDomainField, SupportingDisk, hyperbolic_density_disk
from epsteinlab.schwarzian import Koebe, nehari_scan, schwarzian_norm
from epsteinlab.wvol import (
    LaminationAtom,
    WValue,
    fuchsian_mean_curvature_integral,
    gauss_bonnet_check,
    grafting_cylinder,
    main_bound,
    max_phi_two,
    relative_w,
    w_scale,
)

KOEBE = ImageDomainField(Koebe())
TIMES = (0.0, 0.3, 0.7)


def koebe_samples(count, times, seed):
    rng = np.random.default_rng(seed)
    r = 0.8 * np.sqrt(rng.uniform(size=10 * count))
    zs = r * np.exp(2j * np.pi * rng.uniform(size=10 * count))
    pts = admissible_points(KOEBE, (Koebe()(z) for z in zs), times, count)
    assert len(pts) == count
    return pts


@pytest.mark.acceptance(1, "disk Epstein oracle")
def test_disk_epstein_oracle(detail):
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    zs = np.sqrt(rng.uniform(size=100)) * np.exp(2j * np.pi * rng.uniform(size=100))
    worst = 0.0
    for z in zs:
        x = epstein_point(hyperbolic_density_disk(0, 1, z)).x
        worst = max(worst, abs(abs(x.w) ** 2 + x.t ** 2 - 1))
    x = epstein_point(hyperbolic_density_disk(0, 1, 0.5)).x
    half = max(abs(x.w - 0.8), abs(x.t - 0.6))
    elapsed = time.perf_counter() - start
    detail(f"hemisphere residual {worst:.2e} (100 points), z=1/2 error {half:.2e}, {elapsed:.3f} s")
    assert worst < 1e-9 and half < 1e-12 and elapsed < 1.0


@pytest.mark.acceptance(2, "identity suite on the Koebe image domain")
def test_identity_suite_koebe(detail):
    start = time.perf_counter()
    pts = koebe_samples(20, TIMES, seed=2)
    worst, flow = 0.0, 0.0
    for w in pts:
        for s in TIMES:
            for t in TIMES:
                rep = identity_suite(KOEBE, w, s, t)
                worst = max(worst, rep.residual_3, rep.residual_4, rep.residual_6, rep.residual_7,
                            rep.area_ratio_residual, rep.gauss_residual)
                flow = max(flow, rep.flow_distance_residual)
    elapsed = time.perf_counter() - start
    detail(f"worst identity residual {worst:.2e}, flow distance residual {flow:.2e}, "
           f"{len(pts) * 9} (point, s, t) cases, {elapsed:.2f} s")
    assert worst < 1e-5 and flow < 1e-6 and elapsed < 10.0


@pytest.mark.acceptance(3, "eigenvalue law at the Koebe point w=0")
def test_eigenvalue_law(detail):
    b0 = fundamental_forms(KOEBE, 0, 0.0)
    rep = schwarzian_shape_check(Koebe(), 0, 0.0)
    e_b = float(np.max(np.abs(b0.eigenvalues - np.array([-3.0, -0.6]))))
    e_bhat = float(np.max(np.abs(rep.bhat_numeric - np.array([-2.0, 4.0]))))
    e_thr = abs(rep.threshold_numeric - math.log(2))
    detail(f"B0 eigenvalues {b0.eigenvalues.round(8).tolist()} (error {e_b:.2e}), "
           f"Bhat0 error {e_bhat:.2e}, threshold {rep.threshold_numeric:.10f} (error {e_thr:.2e})")
    assert e_b < 1e-4 and e_bhat < 1e-4 and e_thr < 1e-4


@pytest.mark.acceptance(4, "Nehari saturation by the Koebe function")
def test_nehari_saturation(detail):
    at_zero = schwarzian_norm(Koebe(), 0)
    scan = nehari_scan(Koebe(), 10_000)
    detail(f"norm at 0 = {at_zero!r}, grid sup over 10^4 points = {scan.sup!r}")
    assert abs(at_zero - 1.5) < 1e-10
    assert scan.sup <= 1.5 + 1e-6


@pytest.mark.acceptance(5, "pointwise area identity above the local convexity threshold")
def test_area_integrand(detail):
    pts = koebe_samples(20, (0.0,), seed=5)
    worst = 0.0
    for w in pts:
        n = density_schwarzian_norm(KOEBE(w))
        t = 0.5 * math.log1p(2 * n) + 0.2
        f0, ft = fundamental_forms_multi(KOEBE, w, (0.0, t))
        ahat0 = math.exp(2 * f0.u)
        predicted = 0.25 * np.linalg.det(np.eye(2) + math.exp(-2 * t) * f0.Bhat) * math.exp(2 * t) * ahat0
        worst = max(worst, abs(ft.area_density - predicted) / predicted)
    detail(f"worst relative deviation {worst:.2e} over {len(pts)} samples")
    assert worst < 1e-4


@pytest.mark.acceptance(6, "grafting cylinders and Gauss-Bonnet")
def test_model_geometry(detail):
    rng = np.random.default_rng(6)
    worst_cyl = 0.0
    for _ in range(100):
        length, weight, t = rng.uniform(0.1, 5), rng.uniform(0.1, math.pi), rng.uniform(0, 3)
        c = grafting_cylinder(LaminationAtom(length, weight), t)
        # independent exponential form of cosh and sinh
        ch, sh = (math.exp(t) + math.exp(-t)) / 2, (math.exp(t) - math.exp(-t)) / 2
        area = length * weight * sh * ch
        worst_cyl = max(worst_cyl, abs(c.circumference - length * ch), abs(c.width - weight * sh),
                        abs(c.area - area) / max(1.0, area))
    worst_gb = 0.0
    for _ in range(100):
        chi = -2 * int(rng.integers(1, 6))
        worst_gb = max(worst_gb, gauss_bonnet_check(chi, float(rng.uniform(0, 5))))
    detail(f"cylinder deviation {worst_cyl:.2e}, Gauss-Bonnet residual {worst_gb:.2e}")
    assert worst_cyl < 1e-12 and worst_gb < 1e-12


@pytest.mark.acceptance(7, "inequality chain closure")
def test_chain_closure(detail):
    rng = np.random.default_rng(7)
    worst = 0.0
    for L, phi in rng.uniform([0, 0], [10, 3], size=(10_000, 2)):
        worst = max(worst, abs(max_phi_two(phi, L) - (1 + phi) * math.sqrt(L)))
    cor = max(abs(main_bound(1.5, L) - 2.5 * math.sqrt(L)) for L in rng.uniform(0, 10, 1000))
    detail(f"closure deviation {worst:.2e} over 10^4 samples, 5/2 sqrt(L) deviation {cor:.2e}")
    assert worst < 1e-12 and cor < 1e-12


@pytest.mark.acceptance(8, "two-disk dome")
def test_two_disk_dome(detail):
    scene = DiskUnionScene((SupportingDisk(-0.5, 1.0), SupportingDisk(0.5, 1.0)))
    rng = np.random.default_rng(8)
    worst, regions, excluded = 0.0, {}, 0
    while sum(regions.values()) < 30:
        d = scene.disks[int(rng.integers(2))]
        z = d.center + 0.95 * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
        try:
            rep = dome_check(scene, z)
        except ExcludedRegionError:
            excluded += 1
            continue
        worst = max(worst, rep.hemisphere_residual, rep.support_residual)
        regions[rep.region] = regions.get(rep.region, 0) + 1
    angle = rep.bending_angle
    detail(f"worst hemisphere/support residual {worst:.2e}, regions {dict(sorted(regions.items()))}, "
           f"{excluded} excluded, bending angle {angle!r}")
    assert worst < 1e-6 and abs(angle - math.pi / 3) < 1e-6


@pytest.mark.acceptance(9, "W-volume scaling law")
def test_scaling_law(detail):
    rng = np.random.default_rng(9)
    for _ in range(1000):
        chi = -2 * int(rng.integers(1, 10))
        w = WValue(float(rng.normal(scale=10)), chi)
        s, t = rng.uniform(-3, 3, 2)
        assert w_scale(w_scale(w, s, chi), t, chi).value == w_scale(w, s + t, chi).value
        assert w_scale(w, t, chi).value == w.value + t * math.pi * abs(chi)
        w1 = w_scale(WValue(float(rng.normal(scale=10)), chi), s, chi)
        assert relative_w(w, w1) == -relative_w(w1, w)
    assert w_scale(WValue(0.0, -2), 1, -2).value == 2 * math.pi
    detail("additivity, shift t pi |chi| and antisymmetry exact (==) on 1000 random cases")


@pytest.mark.acceptance(10, "Fuchsian mean curvature integral by two routes")
def test_fuchsian_two_routes(detail):
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(100):
        chi = -2 * int(rng.integers(1, 6))
        t = float(rng.uniform(0.01, 5))
        via_b, direct = fuchsian_mean_curvature_integral(chi, t)
        exact = 2 * math.pi * abs(chi) * math.sinh(t) * math.cosh(t)
        worst = max(worst, abs(via_b - direct) / direct, abs(direct - exact) / exact)
    detail(f"worst relative disagreement {worst:.2e} over 100 (chi, t), t in [0.01, 5]")
    assert worst < 1e-12
