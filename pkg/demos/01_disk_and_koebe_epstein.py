"""Epstein surfaces of the unit disk and of the Koebe image domain.

For the Poincare metric of the unit disk the Epstein map lands on the unit
hemisphere, a totally geodesic plane.  Flowing along the normal for time t
moves every point a hyperbolic distance t and makes the surface umbilic
with shape operator tanh(t) Id.  For the Koebe domain the shape operator at
w = 0 is governed by the Schwarzian norm 3/2: eigenvalues -3 and -3/5 at
time 0, and the surface becomes convex at t = log 2.

Run with:  python demos/01_disk_and_koebe_epstein.py
"""
import math

from epsteinlab.epstein import epstein_flow, fundamental_forms, hyp_distance, schwarzian_shape_check
from epsteinlab.metrics import DiskField, ImageDomainField
from epsteinlab.schwarzian import Koebe, schwarzian_norm

disk = DiskField()
print("Unit disk, Poincare metric")
for z in (0, 0.5, 0.3 - 0.6j):
    x = epstein_flow(disk, z, 0.0).x
    print(f"  z = {z!s:>10}  ->  w = {x.w:.6f}, height = {x.t:.6f}, |w|^2 + t^2 = {abs(x.w) ** 2 + x.t ** 2:.15f}")

x0 = epstein_flow(disk, 0, 0.0).x
for t in (0.5, 1.0):
    d = hyp_distance(x0, epstein_flow(disk, 0, t).x)
    print(f"  flow time {t}: distance travelled {d:.12f}")
fr = fundamental_forms(disk, 0.4j, 1.0)
print(f"  shape operator at t = 1: eigenvalues {fr.eigenvalues.round(8)}, tanh(1) = {math.tanh(1):.8f}")

koebe = ImageDomainField(Koebe())
print("\nKoebe image domain f(z) = z / (1 - z)^2")
print(f"  Schwarzian norm at 0: {schwarzian_norm(Koebe(), 0)}")
fr = fundamental_forms(koebe, 0, 0.0)
print(f"  B_0 eigenvalues at w = 0: {fr.eigenvalues.round(6)}  (law: -3, -3/5)")
print(f"  Bhat_0 eigenvalues:        {fr.bhat_eigenvalues.round(6)}  (law: -2, 4)")
rep = schwarzian_shape_check(Koebe(), 0)
print(f"  convexity threshold found at t = {rep.threshold_numeric:.10f}, log 2 = {math.log(2):.10f}")
for t in (0.0, 0.5, math.log(2), 1.0):
    e = fundamental_forms(koebe, 0, t).eigenvalues
    print(f"  t = {t:.4f}: eigenvalues of B_t = {e.round(6)}")
