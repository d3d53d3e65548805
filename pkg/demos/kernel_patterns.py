"""Where do the taps of a 3x3 kernel land on the sphere?

Gnomonic patterns lay a flat grid on the tangent plane; equirectangular
patterns step evenly in latitude and in longitude scaled by ``1/cos(lat)``.
Near the equator both agree, higher up they drift apart.
"""

import numpy as np

from geosphere import build_icosphere, mean_edge_angle
from geosphere.sphereconv import equirect_pattern, gnomonic_pattern, great_circle

s = mean_edge_angle(build_icosphere(7))
print(f"tap spacing = mean order-7 edge = {np.degrees(s) * 3600:.1f} arcsec")

for lat in (0, 30, 60, 80):
    c = (0.0, np.radians(lat))
    g = gnomonic_pattern(c, 3, 3, s)
    e = equirect_pattern(c, 3, 3, s)
    sep = great_circle(g.lon, g.lat, e.lon, e.lat).max()
    print(f"center lat {lat:2d}: max tap separation {sep / s:.2e} spacings")

g = gnomonic_pattern((0.0, np.radians(60)), 3, 3, s)
print("\ngnomonic taps at 60 deg (m, n, dlon, dlat in spacings):")
for m, n, lon, lat in zip(g.m, g.n, g.lon, g.lat):
    print(f"  {m:+d} {n:+d}  {lon / s:+.4f} {(lat - np.radians(60)) / s:+.4f}")
