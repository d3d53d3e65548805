"""Spherical images on icospheres: meshes, projections, distortion analysis,
resampling and gnomonic-kernel convolution."""

from .errors import (CapacityError, DimensionError, DomainError, FormatError,
                     GeosphereError, MeshError)
from .geodesic import Icosphere, build_icosphere, locate_point, mean_edge_angle
from .projection import Kind, LonLat, ProjectionSpec, lonlat_to_xyz, project, unproject, xyz_to_lonlat
from .distortion import TissotSample, tissot_at, tissot_grid, tissot_icosphere
from .resample import SphereSignal, equirect_to_sphere, mean_iou, sphere_to_equirect
from .sphereconv import (Kernel, KernelPattern, SamplingOperator, build_operator, convolve,
                         downsample, equirect_pattern, gnomonic_pattern, upsample)

__version__ = "0.1.0"
