"""The bound on the L^2 Schwarzian norm in terms of the bending length.

For a closed surface with projective structure, the W-volume comparison
gives an upper bound L/4 and a lower bound depending on the L^2 and sup
norms of the Schwarzian.  Solving the two together bounds the L^2 norm by
(1 + ||Phi||_inf) sqrt(L); for quotients of a round disk the Nehari bound
3/2 turns this into 5/2 sqrt(L).

Run with:  python demos/03_bound_sweep.py [--out sweep.csv]
"""
import argparse

from epsteinlab.cli import atomic_write_text, rows_to_csv
from epsteinlab.wvol import ProjectiveDescriptor, bound_sweep, chain_verify, w_upper

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--out", help="write the full sweep as CSV")
args = parser.parse_args()

sharp, coarse = w_upper(-2, 1.0)
print(f"genus 2, L = 1: upper bounds for W are {sharp:.10f} (sharp) and {coarse} (coarse)")

print("\n   L   phi_inf  max ||Phi||_2   (1 + phi_inf) sqrt(L)   5/2 sqrt(L)")
rows = bound_sweep([0.0, 0.25, 1.0, 4.0, 9.0], [0.0, 1.5, 3.0])
for r in rows:
    print(f"{r['L']:5.2f}  {r['phi_inf']:6.2f}   {r['max_phi_two']:12.8f}   {r['main_bound']:20.8f}"
          f"   {r['nehari_bound']:10.6f}")

print("\nChecking two descriptors:")
for d in (ProjectiveDescriptor(-2, 1.0, 0.3, 1.2), ProjectiveDescriptor(-2, 1.0, 0.3, 1.35)):
    rep = chain_verify(d)
    verdict = "consistent" if not rep.violations else "; ".join(rep.violations)
    print(f"  {d.to_json()}: bound {rep.main_bound:.4f} -> {verdict}")

if args.out:
    grid = bound_sweep([10 * k / 40 for k in range(41)], [3 * k / 12 for k in range(13)])
    atomic_write_text(args.out, rows_to_csv(grid))
    print(f"\nwrote {len(grid)} rows to {args.out}")
