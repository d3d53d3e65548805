"""Compare how four planar projections and the icosphere distort the sphere.

Each map is summarised with Tissot's indicatrix: the ellipse an
infinitesimal circle turns into.  ``omega`` is the maximal angular
distortion and ``area_scale`` is ``a * b``.
"""

import numpy as np

from geosphere import build_icosphere
from geosphere.distortion import tissot_at, tissot_grid, tissot_icosphere
from geosphere.projection import Kind, LonLat, ProjectionSpec

specs = [ProjectionSpec(Kind.EQUIRECTANGULAR), ProjectionSpec(Kind.MERCATOR),
         ProjectionSpec(Kind.GALL_PETERS), ProjectionSpec(Kind.GNOMONIC, LonLat(0, 0))]

print(f"{'projection':16s} {'samples':>7s} {'max omega':>10s} {'area range':>22s}")
for spec in specs:
    grid = tissot_grid(spec, 36, 19)
    s = grid.samples
    print(f"{spec.kind.value:16s} {len(s):7d} {np.degrees(s.omega.max()):9.3f}d"
          f"   [{s.area_scale.min():8.4f}, {s.area_scale.max():9.4f}]")

# Mercator keeps shapes but inflates areas toward the poles.
merc = ProjectionSpec(Kind.MERCATOR)
for lat in (0, 30, 60, 80):
    t = tissot_at(merc, 0.0, np.radians(lat))
    print(f"mercator at {lat:2d} deg: a = b = {t.a:.4f}, area x{t.area_scale:.3f}")

# The icosphere is nearly uniform, and gets more so with every order.
for order in (0, 2, 4, 6):
    st = tissot_icosphere(build_icosphere(order), samples_per_face=6).stats
    print(f"icosphere order {order}: max a/b {st['a_over_b_max']:.6f}, "
          f"face area ratio {st['area_ratio']:.6f}")
