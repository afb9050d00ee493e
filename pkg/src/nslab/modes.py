"""Horizontal-spectral representation and the mollifier convolution engine.

Fields on the periodic box are represented by their Fourier-series
coefficients (rfft2 layout, axes (x, y), normalized by 1/(nx*ny)), with the
vertical direction kept in physical space.  Horizontal convolution against a
radial kernel is then a diagonal multiplier in k; the vertical integral of a
compactly supported kernel is done with Gauss-Legendre nodes placed on the
exact support window, reading the integrand off a quintic spline bank built
over the grid's vertical nodes.

The multiplier of the rescaled mollifier at vertical offset w is
eps^-1 * F(eps*|k|, w/eps), with F the tabulated plane transform in
`profiles`; derivative kernels are exact omega-derivatives of the same
spline, so discrete identities relating a kernel and its vertical
derivative hold to rounding.
"""

from __future__ import annotations

import functools

import numpy as np
from scipy import interpolate

from .errors import ConfigurationError, ResolutionError
from .grid import PERIOD, SlabGrid
from .profiles import gauss_legendre, horizontal_transform

__all__ = [
    "mode_grid",
    "to_modes",
    "from_modes",
    "VerticalSplines",
    "MollifierOp",
    "box_l2_profile",
    "eval_modes_at",
    "band_limit",
]


class _ModeGrid:
    def __init__(self, nx: int, ny: int):
        g = SlabGrid(nx, ny, 17, 17)
        self.nx, self.ny = nx, ny
        self.kx = g.kx()
        self.ky = g.ky_r()
        self.k2 = self.kx[:, None] ** 2 + self.ky[None, :] ** 2
        self.kabs = np.sqrt(self.k2)
        flat = self.kabs.ravel()
        self.kabs_unique, self.kabs_inverse = np.unique(flat, return_inverse=True)
        # Parseval weights for the half spectrum: interior ky columns twice.
        w = np.full((nx, ny // 2 + 1), 2.0)
        w[:, 0] = 1.0
        if ny % 2 == 0:
            w[:, -1] = 1.0
        self.parseval = w


@functools.lru_cache(maxsize=8)
def mode_grid(nx: int, ny: int) -> _ModeGrid:
    return _ModeGrid(nx, ny)


def to_modes(data: np.ndarray) -> np.ndarray:
    """Physical samples (..., nx, ny, nz) -> coefficients (..., nx, ny/2+1, nz)."""
    n = data.shape[-3] * data.shape[-2]
    return np.fft.rfft2(data, axes=(-3, -2)) / n


def from_modes(modes: np.ndarray, ny: int) -> np.ndarray:
    nx = modes.shape[-3]
    return np.fft.irfft2(modes * (nx * ny), s=(nx, ny), axes=(-3, -2))


def band_limit(modes: np.ndarray, mmax: int) -> np.ndarray:
    """Zero all coefficients with horizontal index beyond mmax (both axes)."""
    nx = modes.shape[-3]
    mx = np.fft.fftfreq(nx, d=1.0 / nx).astype(int)
    out = modes.copy()
    out[..., np.abs(mx) > mmax, :, :] = 0.0
    my = np.arange(modes.shape[-2])
    out[..., :, my > mmax, :] = 0.0
    return out


class VerticalSplines:
    """Quintic spline bank over the vertical nodes for a stack of mode
    profiles; evaluates all modes at arbitrary interior points at once.

    Data built from the plateau cutoff is only piecewise smooth (its second
    derivative jumps where the plateau ends); `breaks` lists those interior
    kink locations so each smooth segment gets its own spline instead of one
    global fit that would ring across the kinks.  Breaks must sit on nodes.
    """

    def __init__(self, z: np.ndarray, profiles: np.ndarray, k: int = 5,
                 breaks=()):
        self.z0, self.z1 = float(z[0]), float(z[-1])
        prof = np.moveaxis(np.asarray(profiles), -1, 0)  # z axis leads
        self._complex = np.iscomplexobj(prof)
        inner = sorted(b for b in breaks if self.z0 < b < self.z1)
        edges = [self.z0, *inner, self.z1]
        self._cuts = np.asarray(inner)
        self._segs = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            i0 = int(np.searchsorted(z, lo - 1e-12))
            i1 = int(np.searchsorted(z, hi + 1e-12))
            zs, ps = z[i0:i1], prof[i0:i1]
            if len(zs) <= k:
                raise ResolutionError(
                    "too few vertical nodes for the spline bank segment")
            if abs(zs[0] - lo) > 1e-10 or abs(zs[-1] - hi) > 1e-10:
                raise ResolutionError("spline breaks must lie on grid nodes")
            re = interpolate.make_interp_spline(zs, ps.real, k=k, axis=0)
            im = (interpolate.make_interp_spline(zs, ps.imag, k=k, axis=0)
                  if self._complex else None)
            self._segs.append((re, im))

    def __call__(self, pts: np.ndarray, nu: int = 0) -> np.ndarray:
        pts = np.clip(np.asarray(pts, dtype=float), self.z0, self.z1)
        if len(self._segs) == 1:
            return self._eval_seg(0, pts, nu)
        idx = np.searchsorted(self._cuts, pts, side="right")
        flat = pts.ravel()
        fid = idx.ravel()
        out = None
        for s in range(len(self._segs)):
            sel = fid == s
            if not np.any(sel):
                continue
            vals = self._eval_seg(s, flat[sel], nu)
            if out is None:
                out = np.zeros(flat.shape + vals.shape[1:], dtype=vals.dtype)
            out[sel] = vals
        return out.reshape(pts.shape + out.shape[1:])

    def _eval_seg(self, s: int, pts, nu: int):
        re, im = self._segs[s]
        rv = re(pts) if nu == 0 else re.derivative(nu)(pts)
        if not self._complex:
            return rv
        iv = im(pts) if nu == 0 else im.derivative(nu)(pts)
        return rv + 1j * iv


class MollifierOp:
    """Mode-space mollifier machinery at a fixed length eps on a fixed grid.

    All operators consume/produce coefficient arrays shaped (nx, ny/2+1, nz)
    (or a custom output node set) and are linear in the input profiles.
    """

    def __init__(self, grid: SlabGrid, eps: float, ngl: int = 24,
                 ngl_xi: int = 16):
        if not (0.0 < eps <= 0.25):
            raise ConfigurationError(f"mollification length {eps} outside (0, 1/4]")
        if eps < 2.0 * grid.hz:
            raise ResolutionError(
                f"eps = {eps} under-resolved by the vertical grid (hz = {grid.hz})")
        self.grid = grid
        self.eps = float(eps)
        self.ngl = ngl
        self.ngl_xi = ngl_xi
        self.mg = mode_grid(grid.nx, grid.ny)
        self._ku = self.mg.kabs_unique
        self._inv = self.mg.kabs_inverse

    # -- kernel multiplier ---------------------------------------------------

    def mhat(self, w: np.ndarray, domega: int = 0) -> np.ndarray:
        """Multiplier of d^domega/dw^domega eta_eps at offsets w: (len(w), nx, nyr)."""
        w = np.atleast_1d(np.asarray(w, dtype=float))
        vals = horizontal_transform(self._ku[None, :] * self.eps,
                                    w[:, None] / self.eps, domega)
        vals = vals * self.eps ** (-1 - domega)
        nx, nyr = self.mg.kabs.shape
        return vals[:, self._inv].reshape(len(w), nx, nyr)

    # -- core vertical pass --------------------------------------------------

    def _pass(self, bank: VerticalSplines, z_out: np.ndarray, sign: int,
              zmin: float, zmax: float, domega: int = 0, nu: int = 0) -> np.ndarray:
        """sum_q wq * Mhat(k, zo - sign*yq) * ghat(k, yq) over the exact
        support window {y in [zmin, zmax]: |zo - sign*y| < eps}; z-last output."""
        nx, nyr = self.mg.kabs.shape
        out = np.zeros((nx, nyr, len(z_out)), dtype=complex)
        for i, zo in enumerate(np.asarray(z_out, dtype=float)):
            if sign > 0:
                a, b = max(zmin, zo - self.eps), min(zmax, zo + self.eps)
            else:
                a, b = max(zmin, -zo - self.eps), min(zmax, -zo + self.eps)
            if b - a <= 1e-15:
                continue
            yq, wq = gauss_legendre(self.ngl, a, b)
            vals = bank(yq, nu)
            kern = self.mhat(zo - sign * yq, domega)
            out[..., i] = np.einsum("q,qxy,qxy->xy", wq, kern, vals)
        return out

    # -- public operators ----------------------------------------------------

    def direct(self, bank, z_out, domega: int = 0, nu: int = 0):
        """Half-slab convolution int_0^1 kernel(zo - y) g(y) dy."""
        return self._pass(bank, z_out, +1, bank.z0, bank.z1, domega, nu)

    def image(self, bank, z_out, domega: int = 0, nu: int = 0):
        """Reflected-argument convolution int_0^1 kernel(zo + y) g(y) dy."""
        return self._pass(bank, z_out, -1, bank.z0, bank.z1, domega, nu)

    def even(self, bank, z_out, domega: int = 0, nu: int = 0):
        return (self.direct(bank, z_out, domega, nu)
                + self.image(bank, z_out, domega, nu))

    def odd(self, bank, z_out, domega: int = 0, nu: int = 0):
        return (self.direct(bank, z_out, domega, nu)
                - self.image(bank, z_out, domega, nu))

    def i_alpha(self, bank, z_out, alpha: float, domega: int = 0, nu: int = 0):
        """Damped reflected layer: int_0^eps e^{-alpha xi} int kernel(zo + y + xi)
        g(y) dy dxi.  Vanishes identically for zo >= eps."""
        nx, nyr = self.mg.kabs.shape
        out = np.zeros((nx, nyr, len(z_out)), dtype=complex)
        for i, zo in enumerate(np.asarray(z_out, dtype=float)):
            room = self.eps - zo
            if room <= 1e-15:
                continue
            xq, xw = gauss_legendre(self.ngl_xi, 0.0, room)
            acc = np.zeros((nx, nyr), dtype=complex)
            for xi, wxi in zip(xq, xw):
                b = min(bank.z1, self.eps - zo - xi)
                if b - bank.z0 <= 1e-15:
                    continue
                yq, wq = gauss_legendre(self.ngl, bank.z0, b)
                vals = bank(yq, nu)
                kern = self.mhat(zo + yq + xi, domega)
                acc += wxi * np.exp(-alpha * xi) * np.einsum(
                    "q,qxy,qxy->xy", wq, kern, vals)
            out[..., i] = acc
        return out

    def i_alpha_trace(self, trace_modes: np.ndarray, z_out, alpha: float,
                      domega: int = 0):
        """Wall-trace layer int_0^eps e^{-alpha xi} kern(zo + xi) dxi * ghat(k),
        the boundary term when the vertical derivative is moved onto g."""
        nx, nyr = self.mg.kabs.shape
        out = np.zeros((nx, nyr, len(z_out)), dtype=complex)
        for i, zo in enumerate(np.asarray(z_out, dtype=float)):
            room = self.eps - zo
            if room <= 1e-15:
                continue
            xq, xw = gauss_legendre(self.ngl_xi, 0.0, room)
            kern = self.mhat(zo + xq, domega)
            coef = np.einsum("q,qxy->xy", xw * np.exp(-alpha * xq), kern)
            out[..., i] = coef * trace_modes
        return out


def box_l2_profile(modes: np.ndarray) -> np.ndarray:
    """Horizontal L^2 norm over the box at each trailing node:
    sqrt(L^2 * sum_k weights |ghat_k|^2); leading axes are reduced by
    summation (tensor components contribute in quadrature)."""
    mg = mode_grid(modes.shape[-3], 2 * (modes.shape[-2] - 1))
    mag = (modes.real**2 + modes.imag**2)
    while mag.ndim > 3:
        mag = mag.sum(axis=0)
    return np.sqrt(PERIOD**2 * np.einsum("xyz,xy->z", mag, mg.parseval))


def eval_modes_at(modes: np.ndarray, grid: SlabGrid, pts: np.ndarray) -> np.ndarray:
    """Evaluate the band-limited field at arbitrary horizontal points.

    `modes` has shape (..., nx, nyr) (single vertical level); `pts` is (n, 2)
    in box coordinates.  Returns (..., n) real values.
    """
    mg = mode_grid(grid.nx, grid.ny)
    pts = np.asarray(pts, dtype=float)
    # phases relative to the first grid node (FFT origin)
    px = np.exp(1j * np.outer(mg.kx, pts[:, 0] + 0.5 * PERIOD))
    py = np.exp(1j * np.outer(mg.ky, pts[:, 1] + 0.5 * PERIOD))
    weighted = modes * mg.parseval  # half-spectrum double count
    # Re[sum_k m_k px py] with the ky=0/Nyquist columns counted once
    core = np.einsum("...xy,xn,yn->...n", weighted, px, py)
    return core.real


def dx_multipliers(grid: SlabGrid):
    """(i kx, i ky) broadcast-ready multipliers for the rfft2 layout."""
    mg = mode_grid(grid.nx, grid.ny)
    return (1j * mg.kx)[:, None, None], (1j * mg.ky)[None, :, None]
