"""A tour of the icosphere: sizes, edge lengths and point location.

Run with ``python demos/icosphere_tour.py``.
"""

import numpy as np

from geosphere import build_icosphere, mean_edge_angle
from geosphere.projection import lonlat_to_xyz

# Each subdivision splits every triangle into four, so counts grow by ~4x.
print("order  vertices     faces     edges  edge(deg)")
for order in range(8):
    s = build_icosphere(order)
    print(f"{order:5d} {s.num_vertices:9d} {s.num_faces:9d} {s.num_edges:9d}"
          f"  {np.degrees(mean_edge_angle(s)):8.4f}")

# Order 7 has 163842 vertices, close to a 256 x 512 panorama (131072 pixels).
s7 = build_icosphere(7)
print("\n256 x 512 pixels:", 256 * 512, " order-7 vertices:", s7.num_vertices)

# The first vertices of every order are the vertices of the coarser orders.
s3 = build_icosphere(3)
print("order 3 is a prefix of order 7:",
      np.array_equal(s7.vertices[:s3.num_vertices], s3.vertices))

# Locate a few cities on the mesh; the weights reproduce the point on the face.
cities = {"Paris": (2.35, 48.86), "Quito": (-78.47, -0.18), "Sydney": (151.21, -33.87)}
xyz = lonlat_to_xyz(*np.radians(np.array(list(cities.values()))).T)
faces, weights = s7.locate(xyz)
for name, f, w in zip(cities, faces, weights):
    corners = s7.faces[f]
    print(f"{name:7s} face {f:6d} corners {corners} weights {np.round(w, 4)}")
