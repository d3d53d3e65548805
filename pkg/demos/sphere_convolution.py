"""Convolution, down- and upsampling of a signal that lives on vertices."""

import numpy as np

from geosphere import build_icosphere
from geosphere.resample import SphereSignal
from geosphere.sphereconv import (Kernel, build_operator, convolve, downsample,
                                  icosahedral_rotations, rotate_signal, upsample)

sphere = build_icosphere(5)
lon, lat = sphere.lonlat.T
sig = SphereSignal(sphere, np.sin(lat) + 0.3 * np.cos(lat) * np.cos(3 * lon))

# The operator stores, for every vertex and tap, a face and three weights.
op = build_operator(sphere, 3, 3)
print(f"operator: {op.num_vertices} vertices x {op.taps_per_vertex} taps, "
      f"spacing {np.degrees(op.spacing):.3f} deg")

blur = Kernel(np.outer([1, 2, 1], [1, 2, 1]) / 16.0)
edges = Kernel(np.array([[-1, -1, -1], [-1, 8, -1], [-1, -1, -1]], dtype=float))
smooth = convolve(op, sig, blur)
print(f"blur range {smooth.data.min():+.4f}..{smooth.data.max():+.4f} "
      f"(input {sig.data.min():+.4f}..{sig.data.max():+.4f})")
print(f"laplacian max |response| {np.abs(convolve(op, sig, edges).data).max():.2e}")

# Pooling and unpooling move between orders; coarse vertices come first.
coarse = downsample(sig, build_icosphere(4))
fine = upsample(coarse, sphere)
print(f"order 5 -> 4 -> 5: {sig.sphere.num_vertices} -> {coarse.sphere.num_vertices}"
      f" -> {fine.sphere.num_vertices} vertices")
print("down(up(x)) == x:", np.array_equal(downsample(fine, coarse.sphere).data, coarse.data))

# The mesh has icosahedral symmetry, but the kernel is aligned to north, so
# the convolution only commutes with those rotations approximately.
errs = []
for r in icosahedral_rotations(sphere):
    a = convolve(op, rotate_signal(sig, r), blur).data
    b = rotate_signal(smooth, r).data
    errs.append(np.abs(a - b).max())
errs = np.array(errs)
print(f"rotation commutator: {np.sum(errs < 1e-12)} of 60 exact, "
      f"worst {errs.max():.2e}")
