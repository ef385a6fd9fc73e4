"""The projective metric of two overlapping disks and its convex dome.

Two unit disks centred at -1/2 and 1/2 overlap.  The boundary of the convex
hull of the complement of their union is the dome: two hemispheres glued
along a geodesic, bent by the exterior angle pi/3.  The Epstein map of the
projective (Thurston) metric retracts every point of the union onto that
dome: onto one of the two faces, or onto the bending geodesic.

Run with:  python demos/02_two_disk_dome.py
"""
import math

import numpy as np

from epsteinlab.epstein import ExcludedRegionError, dome_check
from epsteinlab.metrics import DiskUnionScene, SupportingDisk

scene = DiskUnionScene((SupportingDisk(-0.5, 1.0), SupportingDisk(0.5, 1.0)))
print("Two unit disks centred at -1/2 and +1/2")
for z in (0.9, -1.2, 0.0, 0.05 + 0.2j, 0.4 + 0.7j, -0.3 - 0.9j):
    try:
        rep = dome_check(scene, z)
    except ExcludedRegionError as exc:
        print(f"  z = {z!s:>12}: skipped ({exc})")
        continue
    p = rep.point
    print(f"  z = {z!s:>12}: region {rep.region:8s} point ({p.w.real:+.5f}, {p.w.imag:+.5f}, {p.t:.5f})"
          f"  hemisphere residual {rep.hemisphere_residual:.1e}")

print(f"\nbending angle {rep.bending_angle:.15f}, pi/3 = {math.pi / 3:.15f}")

rng = np.random.default_rng(0)
counts = {}
for _ in range(200):
    d = scene.disks[int(rng.integers(2))]
    z = d.center + 0.95 * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
    try:
        region = dome_check(scene, z).region
    except ExcludedRegionError:
        region = "excluded"
    counts[region] = counts.get(region, 0) + 1
print(f"200 random points by region: {dict(sorted(counts.items()))}")
