"""Uniform periodic grids on [-L, L)^n and their Fourier calculus.

Samples live at x_j = -L + j*h with h = 2L/size; frequencies on the
reciprocal lattice k/(2L) for k in [-size/2, size/2).  The forward
transform approximates the continuous integral with the e^{-2 pi i x.xi}
convention (Riemann sum, factor h^n); the inverse carries (1/(2L))^n per
axis, so the round trip is the identity.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import BadShape, ShapeMismatch
from .util import kahan_sum

DOMAIN_SPACE = "space"
DOMAIN_FREQ = "frequency"


@dataclass(frozen=True)
class GridSpec:
    n: int
    sizes: tuple
    box_half: float

    def __post_init__(self):
        if len(self.sizes) != self.n:
            raise BadShape("one size per axis required")
        for s in self.sizes:
            if s < 16 or (s & (s - 1)) != 0:
                raise BadShape("sizes must be powers of two, at least 16")
        if self.box_half <= 0:
            raise BadShape("box_half must be positive")
        # isotropic grid: every axis shares one spacing
        spacings = {2.0 * self.box_half / s for s in self.sizes}
        if len(spacings) != 1:
            raise BadShape("all axes must share one spacing h")

    @property
    def h(self) -> float:
        return 2.0 * self.box_half / self.sizes[0]

    def axis_coords(self, axis: int = 0) -> np.ndarray:
        size = self.sizes[axis]
        return -self.box_half + self.h * np.arange(size)

    def coords(self) -> list:
        """Per-axis spatial coordinates (open meshgrid)."""
        axes = [self.axis_coords(a) for a in range(self.n)]
        return list(np.meshgrid(*axes, indexing="ij", sparse=True))

    def freq_axis(self, axis: int = 0) -> np.ndarray:
        size = self.sizes[axis]
        k = np.arange(-size // 2, size // 2)
        return k / (2.0 * self.box_half)

    def freqs(self) -> list:
        axes = [self.freq_axis(a) for a in range(self.n)]
        return list(np.meshgrid(*axes, indexing="ij", sparse=True))

    @property
    def npoints(self) -> int:
        return int(np.prod(self.sizes))


@dataclass
class GridFunction:
    spec: GridSpec
    values: np.ndarray  # complex, shape == spec.sizes
    domain_tag: str = DOMAIN_SPACE

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != tuple(self.spec.sizes):
            raise BadShape(
                f"values shape {self.values.shape} != sizes {self.spec.sizes}"
            )
        if self.domain_tag not in (DOMAIN_SPACE, DOMAIN_FREQ):
            raise BadShape(f"unknown domain tag {self.domain_tag!r}")

    def copy(self) -> "GridFunction":
        return GridFunction(self.spec, self.values.copy(), self.domain_tag)


def from_callable(spec: GridSpec, fn) -> GridFunction:
    """Sample fn(x1, ..., xn) on the grid."""
    return GridFunction(spec, np.asarray(fn(*spec.coords()), dtype=np.complex128)
                        * np.ones(spec.sizes))


def fourier_forward(f: GridFunction) -> GridFunction:
    if f.domain_tag != DOMAIN_SPACE:
        raise ShapeMismatch("fourier_forward expects a spatial function")
    vals = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(f.values)))
    vals *= f.spec.h ** f.spec.n
    return GridFunction(f.spec, vals, DOMAIN_FREQ)


def fourier_inverse(fhat: GridFunction) -> GridFunction:
    if fhat.domain_tag != DOMAIN_FREQ:
        raise ShapeMismatch("fourier_inverse expects a frequency function")
    vals = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(fhat.values)))
    vals /= fhat.spec.h ** fhat.spec.n
    return GridFunction(fhat.spec, vals, DOMAIN_SPACE)


def multiplier_values(spec: GridSpec, multiplier) -> np.ndarray:
    """Evaluate a multiplier callable on the reciprocal lattice."""
    return np.asarray(multiplier(*spec.freqs()), dtype=np.complex128) * np.ones(
        spec.sizes
    )


def apply_multiplier(f: GridFunction, multiplier) -> GridFunction:
    """inverse-transform(M(xi) * forward-transform(f)).

    `multiplier` is a callable of the n open-mesh frequency axes, or a
    precomputed ndarray over the full frequency lattice.
    """
    if isinstance(multiplier, np.ndarray):
        mvals = multiplier
    else:
        mvals = multiplier_values(f.spec, multiplier)
    fhat = fourier_forward(f)
    fhat.values *= mvals
    return fourier_inverse(fhat)


def lp_norm(f: GridFunction, p) -> float:
    """Discretized L^p norm: (h^n sum |f|^p)^(1/p); p = inf gives sup|f|."""
    mag = np.abs(f.values)
    if p == np.inf or p == "inf":
        return float(mag.max())
    if p not in (1, 2):
        raise BadShape("p must be 1, 2 or inf")
    cell = f.spec.h ** f.spec.n
    return float(kahan_sum(mag**p) * cell) ** (1.0 / p)


def inner(f: GridFunction, g: GridFunction) -> complex:
    if f.spec != g.spec:
        raise ShapeMismatch("functions live on different grids")
    cell = f.spec.h ** f.spec.n
    prod = f.values * np.conj(g.values)
    return complex(kahan_sum(prod.real) * cell, kahan_sum(prod.imag) * cell)


def directional_fd(f: GridFunction, v, order: int = 1) -> GridFunction:
    """Spectral derivative along the unit direction v: multiplier
    (2 pi i v.xi)^order."""
    v = np.asarray(v, dtype=float)
    if v.shape != (f.spec.n,):
        raise BadShape("direction has the wrong dimension")
    if order not in (1, 2):
        raise BadShape("order must be 1 or 2")

    def mult(*xi):
        dot = sum(vk * x for vk, x in zip(v, xi))
        return (2j * np.pi * dot) ** order

    return apply_multiplier(f, mult)


def directional_fd_stencil(f: GridFunction, v, order: int = 1) -> GridFunction:
    """Cross-validation path: central finite differences combined along
    axis projections; second order accurate in h."""
    v = np.asarray(v, dtype=float)
    h = f.spec.h
    vals = f.values

    def axis_diff(a, k):
        if k == 1:
            return (np.roll(vals, -1, axis=a) - np.roll(vals, 1, axis=a)) / (2 * h)
        return (
            np.roll(vals, -1, axis=a) - 2 * vals + np.roll(vals, 1, axis=a)
        ) / h**2

    if order == 1:
        out = sum(v[a] * axis_diff(a, 1) for a in range(f.spec.n))
    elif order == 2:
        out = np.zeros_like(vals)
        for a in range(f.spec.n):
            for b in range(f.spec.n):
                if a == b:
                    out += v[a] * v[b] * axis_diff(a, 2)
                else:
                    da = (np.roll(vals, -1, axis=a) - np.roll(vals, 1, axis=a)) / (2 * h)
                    dab = (np.roll(da, -1, axis=b) - np.roll(da, 1, axis=b)) / (2 * h)
                    out += v[a] * v[b] * dab
    else:
        raise BadShape("order must be 1 or 2")
    return GridFunction(f.spec, out, DOMAIN_SPACE)


# ---------------------------------------------------------------------------
# TGF1 binary container and CSV export

_MAGIC_SCALAR = b"TGF1"
_MAGIC_CHANNELS = b"TGFH"
_TAG_CODE = {DOMAIN_SPACE: 0, DOMAIN_FREQ: 1}
_TAG_NAME = {0: DOMAIN_SPACE, 1: DOMAIN_FREQ}


def write_tgf(path, f: GridFunction) -> None:
    """Scalar grid container: magic, u32 n, u32 sizes, f64 box_half per
    axis, u8 domain tag, then little-endian (re, im) f64 pairs row-major."""
    spec = f.spec
    with open(path, "wb") as fh:
        fh.write(_MAGIC_SCALAR)
        fh.write(struct.pack("<I", spec.n))
        fh.write(struct.pack(f"<{spec.n}I", *spec.sizes))
        fh.write(struct.pack(f"<{spec.n}d", *([spec.box_half] * spec.n)))
        fh.write(struct.pack("<B", _TAG_CODE[f.domain_tag]))
        inter = np.empty(f.values.size * 2, dtype="<f8")
        inter[0::2] = f.values.real.ravel()
        inter[1::2] = f.values.imag.ravel()
        fh.write(inter.tobytes())


def read_tgf(path) -> GridFunction:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC_SCALAR:
            raise BadShape(f"not a TGF1 file: magic {magic!r}")
        (n,) = struct.unpack("<I", fh.read(4))
        sizes = struct.unpack(f"<{n}I", fh.read(4 * n))
        halves = struct.unpack(f"<{n}d", fh.read(8 * n))
        (tag,) = struct.unpack("<B", fh.read(1))
        spec = GridSpec(n=n, sizes=tuple(sizes), box_half=halves[0])
        count = int(np.prod(sizes))
        inter = np.frombuffer(fh.read(16 * count), dtype="<f8")
        vals = (inter[0::2] + 1j * inter[1::2]).reshape(sizes)
        return GridFunction(spec, vals, _TAG_NAME[tag])


def write_tgf_channels(path, spec: GridSpec, values: np.ndarray,
                       domain_tag: str = DOMAIN_SPACE) -> None:
    """1-d multichannel variant: extra u32 channel count after the tag,
    data stored channel-major."""
    if spec.n != 1 or values.ndim != 2 or values.shape[1] != spec.sizes[0]:
        raise BadShape("expected (channels, size) values on a 1-d grid")
    channels = values.shape[0]
    with open(path, "wb") as fh:
        fh.write(_MAGIC_CHANNELS)
        fh.write(struct.pack("<I", spec.n))
        fh.write(struct.pack(f"<{spec.n}I", *spec.sizes))
        fh.write(struct.pack(f"<{spec.n}d", spec.box_half))
        fh.write(struct.pack("<B", _TAG_CODE[domain_tag]))
        fh.write(struct.pack("<I", channels))
        vals = np.asarray(values, dtype=np.complex128)
        inter = np.empty(vals.size * 2, dtype="<f8")
        inter[0::2] = vals.real.ravel()
        inter[1::2] = vals.imag.ravel()
        fh.write(inter.tobytes())


def read_tgf_channels(path):
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC_CHANNELS:
            raise BadShape(f"not a multichannel grid file: magic {magic!r}")
        (n,) = struct.unpack("<I", fh.read(4))
        sizes = struct.unpack(f"<{n}I", fh.read(4 * n))
        halves = struct.unpack(f"<{n}d", fh.read(8 * n))
        (tag,) = struct.unpack("<B", fh.read(1))
        (channels,) = struct.unpack("<I", fh.read(4))
        spec = GridSpec(n=n, sizes=tuple(sizes), box_half=halves[0])
        count = channels * int(np.prod(sizes))
        inter = np.frombuffer(fh.read(16 * count), dtype="<f8")
        vals = (inter[0::2] + 1j * inter[1::2]).reshape(channels, sizes[0])
        return spec, vals, _TAG_NAME[tag]


def write_csv(path, f: GridFunction) -> None:
    """One row per grid point: x1,...,xn,re,im."""
    axes = [f.spec.axis_coords(a) for a in range(f.spec.n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    cols = [m.ravel() for m in mesh] + [f.values.real.ravel(), f.values.imag.ravel()]
    data = np.column_stack(cols)
    header = ",".join([f"x{i + 1}" for i in range(f.spec.n)] + ["re", "im"])
    np.savetxt(path, data, delimiter=",", header=header, comments="")
