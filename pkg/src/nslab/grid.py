"""Slab geometry, sampled fields, mixed space-time norms, and disk formats.

The computational domain is a horizontally periodic slab: period-4 box
[-2, 2)^2 in (x1, x2), vertical interval [0, 1] (or the doubled interval
[-1, 1] for reflected fields), time interval [-1, 0].  The bottom wall
x3 = 0 is always a grid plane.

Derivatives are spectral in the periodic directions and 4th-order finite
differences (one-sided closures at the walls) vertically.  The gradient
convention is (grad u)_ij = d_j u_i and tensor divergence acts on the second
index, (div F)_i = sum_j d_j F_ij.
"""

from __future__ import annotations

import dataclasses
import functools
import struct
from typing import Iterable

import numpy as np

from .errors import (
    ConfigurationError,
    DegenerateInputError,
    InvalidFieldError,
    RegionError,
)
from .profiles import phi_abs, phi_profile, theta_time

PERIOD = 4.0

__all__ = [
    "SlabGrid",
    "ScalarField",
    "VectorField",
    "TensorField",
    "FieldSeries",
    "MixedNormSpec",
    "CutoffFamily",
    "build_cutoffs",
    "mixed_norm",
    "norm_report",
    "grad",
    "div",
    "curl",
    "q_star",
    "dump_series",
    "load_series",
    "write_csv",
]


def _is_pow2(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclasses.dataclass(frozen=True)
class SlabGrid:
    """Uniform tensor grid on the slab.

    Attributes:
        nx, ny: horizontal sample counts (powers of two; period-4 box).
        nz: vertical sample count on [0, 1], nodes j/(nz-1), walls included.
        nt: time sample count on [-1, 0], both endpoints included.
    """

    nx: int
    ny: int
    nz: int
    nt: int

    def __post_init__(self):
        if not (_is_pow2(self.nx) and _is_pow2(self.ny)):
            raise ConfigurationError(
                f"horizontal counts must be powers of two, got {self.nx}x{self.ny}")
        if self.nz < 16 or self.nt < 16:
            raise ConfigurationError("need nz >= 16 and nt >= 16")

    @property
    def hx(self) -> float:
        return PERIOD / self.nx

    @property
    def hy(self) -> float:
        return PERIOD / self.ny

    @property
    def hz(self) -> float:
        return 1.0 / (self.nz - 1)

    @property
    def ht(self) -> float:
        return 1.0 / (self.nt - 1)

    @property
    def x(self) -> np.ndarray:
        return -0.5 * PERIOD + self.hx * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return -0.5 * PERIOD + self.hy * np.arange(self.ny)

    @property
    def z(self) -> np.ndarray:
        return self.hz * np.arange(self.nz)

    @property
    def z_full(self) -> np.ndarray:
        """Doubled vertical grid on [-1, 1] sharing the nodes of [0, 1]."""
        return self.hz * np.arange(-(self.nz - 1), self.nz)

    @property
    def t(self) -> np.ndarray:
        return -1.0 + self.ht * np.arange(self.nt)

    def zgrid(self, full_depth: bool) -> np.ndarray:
        return self.z_full if full_depth else self.z

    def kx(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.nx, d=self.hx)

    def ky_r(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.rfftfreq(self.ny, d=self.hy)

    def meshgrid(self, full_depth: bool = False):
        return np.meshgrid(self.x, self.y, self.zgrid(full_depth), indexing="ij")


# ---------------------------------------------------------------------------
# sampled fields
# ---------------------------------------------------------------------------

class _Field:
    rank = 0

    def __init__(self, grid: SlabGrid, data: np.ndarray, full_depth: bool = False):
        data = np.asarray(data, dtype=float)
        nzv = 2 * grid.nz - 1 if full_depth else grid.nz
        want = (3,) * self.rank + (grid.nx, grid.ny, nzv)
        if data.shape != want:
            raise InvalidFieldError(f"expected shape {want}, got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InvalidFieldError("field contains non-finite values")
        self.grid = grid
        self.data = data
        self.full_depth = full_depth

    def copy(self):
        return type(self)(self.grid, self.data.copy(), self.full_depth)

    def __add__(self, other):
        return type(self)(self.grid, self.data + other.data, self.full_depth)

    def __sub__(self, other):
        return type(self)(self.grid, self.data - other.data, self.full_depth)

    def __mul__(self, c):
        return type(self)(self.grid, self.data * c, self.full_depth)

    __rmul__ = __mul__


class ScalarField(_Field):
    rank = 0


class VectorField(_Field):
    rank = 1


class TensorField(_Field):
    rank = 2


_RANK2CLS = {0: ScalarField, 1: VectorField, 2: TensorField}


class FieldSeries:
    """Time-indexed stack of same-shaped fields on a shared grid."""

    def __init__(self, grid: SlabGrid, times: np.ndarray, data: np.ndarray,
                 rank: int = 1, full_depth: bool = False):
        times = np.asarray(times, dtype=float)
        if times.ndim != 1 or len(times) < 2:
            raise InvalidFieldError("need at least two time samples")
        dt = np.diff(times)
        if np.any(dt <= 0) or not np.allclose(dt, dt[0], rtol=1e-10, atol=1e-12):
            raise InvalidFieldError("times must be uniform and increasing")
        nzv = 2 * grid.nz - 1 if full_depth else grid.nz
        want = (len(times),) + (3,) * rank + (grid.nx, grid.ny, nzv)
        data = np.asarray(data, dtype=float)
        if data.shape != want:
            raise InvalidFieldError(f"expected shape {want}, got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InvalidFieldError("series contains non-finite values")
        self.grid = grid
        self.times = times
        self.data = data
        self.rank = rank
        self.full_depth = full_depth

    def frame(self, i: int):
        return _RANK2CLS[self.rank](self.grid, self.data[i], self.full_depth)

    def __len__(self):
        return len(self.times)


# ---------------------------------------------------------------------------
# mixed space-time norms
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class MixedNormSpec:
    """L^{q,r} norm over a cylinder-in-space, window-in-time region.

    Space region: {|x'| < radius} x (z0, z1); time window (t0, t1).
    Defaults describe the parabolic cylinder of radius R touching the wall:
    z0 = 0, z1 = R, t0 = -R^2, t1 = 0.
    """

    q: float
    r: float
    radius: float
    z0: float = 0.0
    z1: float | None = None
    t0: float | None = None
    t1: float = 0.0

    def __post_init__(self):
        if self.q < 1 or self.r < 1:
            raise ConfigurationError("exponents must lie in [1, inf]")
        if self.radius <= 0 or self.radius > 0.5 * PERIOD:
            raise RegionError(f"cylinder radius {self.radius} outside the box")
        if self.z1 is None:
            object.__setattr__(self, "z1", self.radius)
        if self.t0 is None:
            object.__setattr__(self, "t0", -self.radius**2)
        if self.z1 <= self.z0:
            raise RegionError("empty vertical extent")
        if self.t1 <= self.t0:
            raise RegionError("empty time window")


@functools.lru_cache(maxsize=32)
def _disk_weights(nx: int, ny: int, radius: float) -> np.ndarray:
    """Cell-area weights for the disk |x'| < radius on the periodic grid.

    Node-centred cells; cells crossing the circle get an 8x8 midpoint
    subsample fraction.  Absolute weights (already multiplied by hx*hy).
    """
    g = SlabGrid(nx, ny, 17, 17)
    hx, hy = g.hx, g.hy
    X, Y = np.meshgrid(g.x, g.y, indexing="ij")
    rr = np.hypot(X, Y)
    halfdiag = 0.5 * np.hypot(hx, hy)
    w = np.zeros((nx, ny))
    w[rr <= radius - halfdiag] = 1.0
    edge = (rr > radius - halfdiag) & (rr < radius + halfdiag)
    if np.any(edge):
        n = 8
        off = (np.arange(n) + 0.5) / n - 0.5
        ox, oy = np.meshgrid(off * hx, off * hy, indexing="ij")
        xs = X[edge][:, None] + ox.ravel()[None, :]
        ys = Y[edge][:, None] + oy.ravel()[None, :]
        w[edge] = np.mean(np.hypot(xs, ys) < radius, axis=1)
    return w * hx * hy


def _interval_weights(nodes: np.ndarray, a: float, b: float) -> np.ndarray:
    """Node-centred cell overlap lengths with [a, b] (clipped at node range)."""
    h = nodes[1] - nodes[0]
    lo = np.maximum(nodes - 0.5 * h, min(nodes[0], a))
    hi = np.minimum(nodes + 0.5 * h, max(nodes[-1], b))
    lo[0] = nodes[0]
    hi[-1] = nodes[-1]
    return np.clip(np.minimum(hi, b) - np.maximum(lo, a), 0.0, None)


def _space_weights(grid: SlabGrid, spec: MixedNormSpec, full_depth: bool):
    zg = grid.zgrid(full_depth)
    if spec.z0 < zg[0] - 0.51 * grid.hz or spec.z1 > zg[-1] + 0.51 * grid.hz:
        raise RegionError(
            f"vertical extent ({spec.z0}, {spec.z1}) outside grid range")
    wxy = _disk_weights(grid.nx, grid.ny, spec.radius)
    wz = _interval_weights(zg, spec.z0, spec.z1)
    return wxy, wz


def _space_norm(data: np.ndarray, q: float, wxy: np.ndarray, wz: np.ndarray):
    """L^q over the weighted region; data (..., nx, ny, nz), components
    of a tensor contribute through the Frobenius norm."""
    mag2 = data * data
    while mag2.ndim > 3:
        mag2 = mag2.sum(axis=0)
    if np.isinf(q):
        mask = (wxy[:, :, None] > 0) & (wz[None, None, :] > 0)
        return float(np.sqrt(np.max(mag2 * mask)))
    integrand = mag2 ** (q / 2.0)
    val = np.einsum("xyz,xy,z->", integrand, wxy, wz)
    return float(val ** (1.0 / q))


def mixed_norm(series: FieldSeries, spec: MixedNormSpec) -> float:
    """Mixed space-time norm ||f||_{L^{q,r}} over the region in `spec`.

    Space quadrature: node-centred cells (midpoint over the dual cells, with
    subsampled fractions along the circular boundary); time quadrature:
    trapezoid restricted to the window.
    """
    wxy, wz = _space_weights(series.grid, spec, series.full_depth)
    wt = _interval_weights(series.times, spec.t0, spec.t1)
    if not np.any(wt > 0):
        raise DegenerateInputError("time window contains no samples")
    svals = np.array([
        _space_norm(series.data[i], spec.q, wxy, wz)
        if wt[i] > 0 or np.isinf(spec.r) else 0.0
        for i in range(len(series))
    ])
    if np.isinf(spec.r):
        return float(np.max(svals[wt > 0]))
    return float((np.sum(wt * svals**spec.r)) ** (1.0 / spec.r))


def norm_report(series: FieldSeries, spec: MixedNormSpec) -> dict:
    """Norm value plus a quadrature error estimate (coarsened-grid delta)."""
    value = mixed_norm(series, spec)
    coarse = FieldSeries(
        SlabGrid(series.grid.nx // 2, series.grid.ny // 2,
                 (series.grid.nz - 1) // 2 + 1, (series.grid.nt - 1) // 2 + 1),
        series.times[::2], series.data[(slice(None, None, 2),)
                                       + (slice(None),) * series.rank
                                       + (slice(None, None, 2),) * 3],
        series.rank, series.full_depth,
    ) if (series.grid.nx % 2 == 0 and (series.grid.nz - 1) % 2 == 0
          and (series.grid.nt - 1) % 2 == 0 and series.grid.nx >= 32
          and series.grid.nz >= 33 and series.grid.nt >= 33) else None
    est = abs(mixed_norm(coarse, spec) - value) if coarse is not None else float("nan")
    return {"q": spec.q, "r": spec.r, "radius": spec.radius,
            "value": value, "quadrature_estimate": est}


def q_star(q: float) -> float:
    """Forcing exponent paired with q: max(1, 3q/(q+3)), with the convention
    1.1 at the borderline q = 3/2."""
    if q <= 0:
        raise ConfigurationError("q must be positive")
    if q == 1.5:
        return 1.1
    return max(1.0, 3.0 * q / (q + 3.0))


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=16)
def _d1_matrix(n: int, h: float) -> np.ndarray:
    """4th-order first-derivative matrix with one-sided closures."""
    D = np.zeros((n, n))
    c = 1.0 / (12.0 * h)
    for j in range(2, n - 2):
        D[j, j - 2: j + 3] = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) * c
    D[0, :5] = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) * c
    D[1, :5] = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) * c
    D[-1, -5:] = -np.array([-25.0, 48.0, -36.0, 16.0, -3.0])[::-1] * c
    D[-2, -5:] = -np.array([-3.0, -10.0, 18.0, -6.0, 1.0])[::-1] * c
    return D


def _dz(data: np.ndarray, h: float) -> np.ndarray:
    D = _d1_matrix(data.shape[-1], h)
    return np.tensordot(data, D, axes=([-1], [1]))


def _dx_spectral(data: np.ndarray, grid: SlabGrid, axis: int) -> np.ndarray:
    k = grid.kx() if axis == 0 else 2.0 * np.pi * np.fft.fftfreq(grid.ny, d=grid.hy)
    ax = data.ndim - 3 + axis
    fh = np.fft.fft(data, axis=ax)
    shape = [1] * data.ndim
    shape[ax] = data.shape[ax]
    fh *= (1j * k).reshape(shape)
    return np.real(np.fft.ifft(fh, axis=ax))


def _partial(data: np.ndarray, grid: SlabGrid, j: int) -> np.ndarray:
    """d_j of node data (..., nx, ny, nz); j in {0,1,2} for x1, x2, x3."""
    if j == 2:
        return _dz(data, grid.hz)
    return _dx_spectral(data, grid, j)


def grad(field):
    """Gradient: scalar -> vector; vector -> tensor with (grad u)_ij = d_j u_i."""
    g, d = field.grid, field.data
    if field.rank == 0:
        out = np.stack([_partial(d, g, j) for j in range(3)])
        return VectorField(g, out, field.full_depth)
    if field.rank == 1:
        out = np.stack([np.stack([_partial(d[i], g, j) for j in range(3)])
                        for i in range(3)])
        return TensorField(g, out, field.full_depth)
    raise InvalidFieldError("grad expects scalar or vector input")


def div(field):
    """Divergence: vector -> scalar; tensor -> vector ((div F)_i = d_j F_ij)."""
    g, d = field.grid, field.data
    if field.rank == 1:
        out = sum(_partial(d[j], g, j) for j in range(3))
        return ScalarField(g, out, field.full_depth)
    if field.rank == 2:
        out = np.stack([sum(_partial(d[i, j], g, j) for j in range(3))
                        for i in range(3)])
        return VectorField(g, out, field.full_depth)
    raise InvalidFieldError("div expects vector or tensor input")


def curl(field: VectorField) -> VectorField:
    g, d = field.grid, field.data
    if field.rank != 1:
        raise InvalidFieldError("curl expects a vector field")
    out = np.stack([
        _partial(d[2], g, 1) - _partial(d[1], g, 2),
        _partial(d[0], g, 2) - _partial(d[2], g, 0),
        _partial(d[1], g, 0) - _partial(d[0], g, 1),
    ])
    return VectorField(g, out, field.full_depth)


# ---------------------------------------------------------------------------
# cutoffs
# ---------------------------------------------------------------------------

class CutoffFamily:
    """Sampled spatial cutoff zeta(x) = phi(|x'|) phi(|x3|), the time cutoff
    theta, and analytic derivatives of zeta up to total order 3.

    zeta == 1 on the half-cylinder |x'| <= 1/2, 0 <= x3 <= 1/2 and vanishes
    beyond 3/4; all its x3-derivatives vanish identically on the wall.
    """

    def __init__(self, grid: SlabGrid, full_depth: bool = False):
        self.grid = grid
        self.full_depth = full_depth
        X, Y, Z = grid.meshgrid(full_depth)
        self._r = np.hypot(X, Y)
        self._xy = (X, Y)
        self._z = Z
        self._cache: dict[tuple, np.ndarray] = {}
        self.zeta = self.zeta_d((0, 0, 0))
        self.theta = theta_time(grid.t)[0]

    def theta_d(self, order: int) -> np.ndarray:
        return theta_time(self.grid.t, order)[order]

    def zeta_d(self, mi: tuple) -> np.ndarray:
        """Derivative d^mi zeta for a multi-index (m1, m2, m3), |mi| <= 3."""
        mi = tuple(int(m) for m in mi)
        if sum(mi) > 3 or min(mi) < 0:
            raise ConfigurationError(f"unsupported multi-index {mi}")
        if mi not in self._cache:
            hor = self._horizontal_derivative(mi[0], mi[1])
            ver = phi_abs(self._z, mi[2])[mi[2]]
            self._cache[mi] = hor * ver
        return self._cache[mi]

    def _horizontal_derivative(self, m1: int, m2: int) -> np.ndarray:
        """Derivatives of f(x') = phi(|x'|) via the radial chain rule."""
        X, Y = self._xy
        r = np.maximum(self._r, 1e-30)
        p = phi_profile(self._r, m1 + m2)
        n = m1 + m2
        if n == 0:
            return p[0]
        u, v = X / r, Y / r
        # radial direction cosines; phi' vanishes identically near r = 0 so
        # the apparent singularities carry zero weight.
        if n == 1:
            d = u if m1 == 1 else v
            return p[1] * d
        pr = p[1] / r
        if n == 2:
            if (m1, m2) == (2, 0):
                return p[2] * u * u + pr * (1 - u * u)
            if (m1, m2) == (0, 2):
                return p[2] * v * v + pr * (1 - v * v)
            return (p[2] - pr) * u * v
        # third order: d_a d_b d_c phi(r) with unit radial vector e = (u, v)
        e = {1: u, 2: v}
        axes = [1] * m1 + [2] * m2
        a, b, c = axes
        da, db, dc = e[a], e[b], e[c]
        dd = {(1, 1): 1.0 - u * u, (2, 2): 1.0 - v * v,
              (1, 2): -u * v, (2, 1): -u * v}
        ort = lambda i, j: dd[(i, j)]
        t1 = p[3] * da * db * dc
        t2 = (p[2] / r - p[1] / r**2) * (
            da * ort(b, c) + db * ort(a, c) + dc * ort(a, b))
        return t1 + t2


def build_cutoffs(grid: SlabGrid, full_depth: bool = False) -> CutoffFamily:
    return CutoffFamily(grid, full_depth)


# ---------------------------------------------------------------------------
# disk formats
# ---------------------------------------------------------------------------

_MAGIC = b"NSLB"
# magic, version, nx, ny, nz, nt, nzv, ncomp, ntimes, full flag, t0, dt
_HEADER = struct.Struct("<4sI7IB3x2d")


def dump_series(series: FieldSeries, path) -> None:
    """Binary dump: 64-byte header then little-endian float64 payload in
    row-major (t, z, y, x, component) order."""
    g = series.grid
    ncomp = 3 ** series.rank
    nzv = series.data.shape[-1]
    head = _HEADER.pack(_MAGIC, 1, g.nx, g.ny, g.nz, g.nt, nzv, ncomp,
                        len(series), 1 if series.full_depth else 0,
                        series.times[0], series.times[1] - series.times[0])
    head += b"\0" * (64 - len(head))
    flat = series.data.reshape((len(series),) + (ncomp,) + series.data.shape[-3:])
    payload = np.ascontiguousarray(
        np.moveaxis(flat, 1, -1).transpose(0, 3, 2, 1, 4), dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(payload.tobytes())


def load_series(path) -> FieldSeries:
    with open(path, "rb") as fh:
        head = fh.read(64)
        magic, ver, nx, ny, nz, nt, nzv, ncomp, ntimes, full, t0, dt = \
            _HEADER.unpack(head[:_HEADER.size])
        if magic != _MAGIC or ver != 1:
            raise InvalidFieldError("not an NSLB field dump")
        payload = np.frombuffer(fh.read(), dtype="<f8")
    grid = SlabGrid(nx, ny, nz, nt)
    rank = {1: 0, 3: 1, 9: 2}[ncomp]
    data = payload.reshape(ntimes, nzv, ny, nx, ncomp)
    data = np.moveaxis(data.transpose(0, 3, 2, 1, 4), -1, 1)
    data = data.reshape((ntimes,) + (3,) * rank + (nx, ny, nzv))
    times = t0 + dt * np.arange(ntimes)
    return FieldSeries(grid, times, data.copy(), rank, bool(full))


def write_csv(path, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    """Deterministic CSV writer (floats via repr-stable %.17g)."""
    def fmt(v):
        if isinstance(v, float):
            return "%.17g" % v
        return str(v)

    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
