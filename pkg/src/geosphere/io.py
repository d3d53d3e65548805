"""File formats: PNG rasters, ISPH sphere signals, ISOP operator caches,
kernel weight text files and kernel pattern CSV.

Binary layouts (all little-endian, trailing CRC32 over the payload):

ISPH  b"ISPH" | u32 version=1 | u32 order | u32 channels | u64 vertices |
      float32[vertices * channels] vertex-major | u32 crc
ISOP  b"ISOP" | u32 version=1 | u32 order | u16 kh | u16 kw | f64 spacing |
      V * kh * kw records {u32 face, u32 corners[3], f64 weights[3]} | u32 crc
"""

import struct
import zlib

import numpy as np
import png

from .errors import FormatError
from .geodesic import num_vertices
from .resample import SphereSignal
from .sphereconv import Kernel, SamplingOperator

ISPH_MAGIC = b"ISPH"
ISOP_MAGIC = b"ISOP"
VERSION = 1

_ISPH_HEADER = struct.Struct("<4sIIIQ")
_ISOP_HEADER = struct.Struct("<4sIIHHd")
_CRC = struct.Struct("<I")
TAP_RECORD = np.dtype([("face", "<u4"), ("corners", "<u4", (3,)), ("weights", "<f8", (3,))])


# --- PNG -------------------------------------------------------------------

def read_png(path, raw=False):
    """Read an 8/16-bit grayscale or RGB PNG as an ``(H, W, C)`` array.

    Values are scaled to ``[0, 1]`` floats unless ``raw`` is set, in which
    case the stored integers are returned (use for class-id maps).  Alpha
    channels are dropped.
    """
    try:
        width, height, rows, info = png.Reader(filename=str(path)).asDirect()
        data = np.vstack([np.asarray(r, dtype=np.uint32) for r in rows])
    except png.Error as exc:
        raise FormatError(f"{path}: {exc}") from exc
    planes = info["planes"]
    data = data.reshape(height, width, planes)
    if info.get("alpha"):
        data = data[:, :, :planes - 1]
    if raw:
        return data.astype(np.int64)
    return data / float(2 ** info["bitdepth"] - 1)


def write_png(path, img, bitdepth=8, raw=False):
    """Write an ``(H, W)``, ``(H, W, 1)`` or ``(H, W, 3)`` array as PNG.

    Float images are expected in ``[0, 1]``; they are clipped and quantized.
    With ``raw`` the values are written as integers unchanged.
    """
    img = np.asarray(img)
    if img.ndim == 2:
        img = img[:, :, None]
    h, w, c = img.shape
    if c not in (1, 3):
        raise ValueError(f"PNG output needs 1 or 3 channels, got {c}")
    if bitdepth not in (8, 16):
        raise ValueError("bitdepth must be 8 or 16")
    maxval = 2 ** bitdepth - 1
    if raw:
        if np.any(img != np.round(img)) or img.min() < 0 or img.max() > maxval:
            raise ValueError(f"raw PNG values must be integers in [0, {maxval}]")
        q = img.astype(np.int64)
    else:
        q = np.round(np.clip(img, 0.0, 1.0) * maxval).astype(np.int64)
    writer = png.Writer(w, h, greyscale=(c == 1), bitdepth=bitdepth)
    with open(path, "wb") as fh:
        writer.write(fh, q.reshape(h, w * c).tolist())


# --- ISPH ------------------------------------------------------------------

def encode_isph(sig):
    payload = np.ascontiguousarray(sig.data, dtype="<f4").tobytes()
    header = _ISPH_HEADER.pack(ISPH_MAGIC, VERSION, sig.order, sig.channels,
                               sig.sphere.num_vertices)
    return header + payload + _CRC.pack(zlib.crc32(payload))


def write_isph(path, sig):
    with open(path, "wb") as fh:
        fh.write(encode_isph(sig))


def decode_isph(buf, sphere_factory=None):
    """Parse ISPH bytes into ``(order, data)`` or a :class:`SphereSignal`.

    When ``sphere_factory`` (``order -> Icosphere``) is given, a signal is
    returned; otherwise the raw ``(order, float32 array)`` pair.
    """
    if len(buf) < _ISPH_HEADER.size:
        raise FormatError(f"truncated ISPH header: {len(buf)} bytes", offset=len(buf))
    magic, version, order, channels, nverts = _ISPH_HEADER.unpack_from(buf, 0)
    if magic != ISPH_MAGIC:
        raise FormatError(f"bad ISPH magic {magic!r}", offset=0)
    if version != VERSION:
        raise FormatError(f"unsupported ISPH version {version}", offset=4)
    if channels < 1:
        raise FormatError("ISPH channel count must be >= 1", offset=12)
    if order > 15 or nverts != num_vertices(order):
        raise FormatError(
            f"vertex count {nverts} does not match order {order}", offset=16)
    start = _ISPH_HEADER.size
    size = nverts * channels * 4
    end = start + size
    if len(buf) < end + _CRC.size:
        raise FormatError(
            f"truncated ISPH payload: need {end + _CRC.size} bytes, have {len(buf)}",
            offset=len(buf))
    if len(buf) > end + _CRC.size:
        raise FormatError("trailing bytes after ISPH checksum", offset=end + _CRC.size)
    payload = buf[start:end]
    (crc,) = _CRC.unpack_from(buf, end)
    if crc != zlib.crc32(payload):
        raise FormatError("ISPH payload CRC32 mismatch", offset=end)
    data = np.frombuffer(payload, dtype="<f4").reshape(nverts, channels)
    if not np.all(np.isfinite(data)):
        bad = int(np.flatnonzero(~np.isfinite(data.ravel()))[0])
        raise FormatError("non-finite value in ISPH payload", offset=start + 4 * bad)
    if sphere_factory is None:
        return order, data
    return SphereSignal(sphere_factory(order), data.astype(np.float64))


def read_isph(path, sphere_factory=None):
    with open(path, "rb") as fh:
        return decode_isph(fh.read(), sphere_factory)


# --- ISOP ------------------------------------------------------------------

def encode_isop(op):
    nv, t = op.face.shape
    rec = np.empty(nv * t, dtype=TAP_RECORD)
    rec["face"] = op.face.ravel()
    rec["corners"] = op.corners.reshape(-1, 3)
    rec["weights"] = op.weights.reshape(-1, 3)
    payload = rec.tobytes()
    header = _ISOP_HEADER.pack(ISOP_MAGIC, VERSION, op.order, op.kh, op.kw, op.spacing)
    return header + payload + _CRC.pack(zlib.crc32(payload))


def write_isop(path, op):
    with open(path, "wb") as fh:
        fh.write(encode_isop(op))


def decode_isop(buf):
    if len(buf) < _ISOP_HEADER.size:
        raise FormatError(f"truncated ISOP header: {len(buf)} bytes", offset=len(buf))
    magic, version, order, kh, kw, spacing = _ISOP_HEADER.unpack_from(buf, 0)
    if magic != ISOP_MAGIC:
        raise FormatError(f"bad ISOP magic {magic!r}", offset=0)
    if version != VERSION:
        raise FormatError(f"unsupported ISOP version {version}", offset=4)
    if order > 15:
        raise FormatError(f"implausible ISOP order {order}", offset=8)
    nv = num_vertices(order)
    t = kh * kw
    start = _ISOP_HEADER.size
    end = start + nv * t * TAP_RECORD.itemsize
    if len(buf) != end + _CRC.size:
        raise FormatError(
            f"ISOP size mismatch: expected {end + _CRC.size} bytes, have {len(buf)}",
            offset=min(len(buf), end))
    payload = buf[start:end]
    (crc,) = _CRC.unpack_from(buf, end)
    if crc != zlib.crc32(payload):
        raise FormatError("ISOP payload CRC32 mismatch", offset=end)
    rec = np.frombuffer(payload, dtype=TAP_RECORD)
    return SamplingOperator(
        order, kh, kw, spacing,
        rec["face"].astype(np.int64).reshape(nv, t),
        rec["corners"].astype(np.int64).reshape(nv, t, 3),
        rec["weights"].reshape(nv, t, 3).copy(),
    )


def read_isop(path):
    with open(path, "rb") as fh:
        return decode_isop(fh.read())


# --- kernel weights & patterns --------------------------------------------

def read_kernel(path):
    """Read a kernel text file.

    First line ``kh kw c_in c_out``, then ``kh * kw * c_in * c_out`` decimals
    in tap-major, then ``c_in``, then ``c_out`` order.
    """
    with open(path, encoding="ascii") as fh:
        tokens = fh.read().split()
    if len(tokens) < 4:
        raise FormatError(f"{path}: kernel header needs 'kh kw c_in c_out'")
    try:
        kh, kw, cin, cout = (int(x) for x in tokens[:4])
        values = np.array([float(x) for x in tokens[4:]])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if values.size != kh * kw * cin * cout:
        raise FormatError(
            f"{path}: expected {kh * kw * cin * cout} weights, found {values.size}")
    return Kernel(values.reshape(kh, kw, cin, cout))


def write_kernel(path, kernel):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{kernel.kh} {kernel.kw} {kernel.c_in} {kernel.c_out}\n")
        for row in kernel.weights.reshape(kernel.kh * kernel.kw, -1):
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def write_pattern_csv(path_or_file, pattern):
    rows = ["m,n,lon,lat"]
    for m, n, lon, lat in zip(pattern.m, pattern.n, pattern.lon, pattern.lat):
        rows.append(f"{m},{n},{lon:.17g},{lat:.17g}")
    text = "\n".join(rows) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def read_pattern_csv(path):
    arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return arr[:, 0].astype(int), arr[:, 1].astype(int), arr[:, 2], arr[:, 3]
